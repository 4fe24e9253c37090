// Prints a small table of mixed partials for an expression given on the
// command line, comparing the nilpotent-generator value against central
// finite differences.

#include <cstdio>
#include <iostream>
#include <string>

#include <quadforms/quadforms.hpp>

using namespace quadforms;

int main(int argc, char** argv) {
    const std::string src = argc > 1 ? argv[1] : "exp(x*y) + x^3";
    try {
        const ExprPtr f = parse(src);
        const RealVec p = {0.7, -0.3};
        std::cout << "f(x, y) = " << to_string(*f) << " at (0.7, -0.3)\n\n";
        std::printf("%-10s %22s %22s\n", "partial", "generators", "finite diff");
        const std::pair<const char*, std::vector<int>> rows[] = {
            {"d1", {1}}, {"d2", {2}}, {"d1 d1", {1, 1}}, {"d2 d1", {1, 2}}, {"d2 d2", {2, 2}},
        };
        for (const auto& [label, axes] : rows) {
            const double ad = mixed_partial(*f, axes, p);
            const double fd = central_difference(*f, axes, p);
            std::printf("%-10s %22.15g %22.15g\n", label, ad, fd);
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
