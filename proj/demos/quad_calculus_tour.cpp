// A short tour: nilpotent arithmetic, the quad operators, character
// classification, and the telescoping integration identities.

#include <iostream>

#include <quadforms/quadforms.hpp>

using namespace quadforms;

int main() {
    std::cout << "-- nilpotent arithmetic --\n";
    const auto e1 = WeilNumber::generator(0, 2);
    const auto e2 = WeilNumber::generator(1, 2);
    const auto x = WeilNumber::constant(3.0, 2);
    std::cout << "(3 + e1)^2        = " << (x + e1) * (x + e1) << "\n";
    std::cout << "(1 + e1)(1 + e2)  = " << (1.0 + e1) * (1.0 + e2) << "\n";
    std::cout << "sin(e1)           = " << sin(e1) << "\n\n";

    std::cout << "-- derivatives from generators --\n";
    const ExprPtr f = parse("x^2*y + sin(x*y)");
    const RealVec p = {0.5, 2.0};
    const int ax1[] = {1}, ax12[] = {1, 2};
    std::cout << "f = " << to_string(*f) << " at (0.5, 2)\n";
    std::cout << "d1 f      = " << mixed_partial(*f, ax1, p) << "\n";
    std::cout << "d2 d1 f   = " << mixed_partial(*f, ax12, p) << "\n\n";

    std::cout << "-- classifying quad maps --\n";
    const Form0 F = Form0::from_text("x*y");
    const Form1 alpha = Form1::from_vector_field(FieldSpec::vector_field("0, x"));
    const auto samples = default_classify_samples(2);
    std::cout << "delta2(x*y) matches:";
    for (const auto& c : classify(delta2(F), samples).characters)
        std::cout << " " << character_name(c.name);
    std::cout << "\nd(0, x) matches:    ";
    for (const auto& c : classify(exterior_d(alpha), samples).characters)
        std::cout << " " << character_name(c.name);
    std::cout << "\n\n";

    std::cout << "-- telescoping identities on a grid --\n";
    const GridTiling t(RectDomain(0, 1, 0, 1), 16, 16);
    const auto stokes = check_stokes(alpha, t);
    std::cout << stokes.lhs_label << " = " << stokes.lhs << ", " << stokes.rhs_label << " = "
              << stokes.rhs << " (residual " << stokes.residual << ")\n";
    const auto ftc = check_ftc2d(F, t);
    std::cout << ftc.lhs_label << " = " << ftc.lhs << ", " << ftc.rhs_label << " = " << ftc.rhs
              << " (residual " << ftc.residual << ")\n";
    return 0;
}
