// Acceptance gate: twelve numbered behavioral guarantees, one line each.
// Usage: acceptance [path-to-cli]  (the last two criteria spawn the tool).

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include <quadforms/quadforms.hpp>

using namespace quadforms;

namespace {

int failures = 0;

void report(int num, const char* label, bool pass) {
    std::printf("[%2d/12] %-58s %s\n", num, label, pass ? "PASS" : "FAIL");
    if (!pass) ++failures;
}

struct RunResult {
    int code = -1;
    std::string out;
};

RunResult run_cli(const std::string& cli, const std::string& args) {
    const std::string cmd = cli + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    RunResult r;
    if (!pipe) return r;
    char buf[4096];
    std::size_t got;
    while ((got = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, got);
    const int status = pclose(pipe);
    if (status >= 0 && WIFEXITED(status)) r.code = WEXITSTATUS(status);
    return r;
}

// a random bivariate quadratic with printable coefficients
ExprPtr random_quadratic(Rng& rng) {
    const auto c = [&] { return Expr::num(rng.uniform(-1.0, 1.0)); };
    const ExprPtr x = Expr::variable(0), y = Expr::variable(1);
    ExprPtr e = c();
    e = Expr::add(e, Expr::mul(c(), x));
    e = Expr::add(e, Expr::mul(c(), y));
    e = Expr::add(e, Expr::mul(c(), Expr::mul(x, x)));
    e = Expr::add(e, Expr::mul(c(), Expr::mul(x, y)));
    e = Expr::add(e, Expr::mul(c(), Expr::mul(y, y)));
    return e;
}

// draw scalar fields until the derived form is visibly nonzero on the samples
template <class Make>
Form2 nonzero_form(Rng& rng, int dim, std::span<const SymbolicQuad> samples, Make make) {
    for (int attempt = 0; attempt < 100; ++attempt) {
        Form2 w = make(rng, dim);
        double mag = 0.0;
        for (const auto& q : samples) mag = std::max(mag, w.eval(q).max_abs_coeff());
        if (mag > 1e-3) return w;
    }
    throw Error("could not draw a nondegenerate form");
}

bool affine_expansion_suite() {
    const KockLawvereReport rep = run_kock_lawvere_suite(200, kDefaultSeed, 1e-12, 1e-4);
    return rep.pass && rep.cases == 200;
}

bool character_table_exact() {
    const Dih4 r = Dih4::r(), s = Dih4::s();
    bool ok = true;
    ok = ok && Character::cartan().value(r) == 1 && Character::cartan().value(s) == -1;
    ok = ok && Character::leibniz_fubini().value(r) == -1 && Character::leibniz_fubini().value(s) == 1;
    ok = ok && Character::nieuwentijdt().value(r) == -1 && Character::nieuwentijdt().value(s) == -1;
    // multiplicativity over the whole group, exactly
    for (const Character& c : nontrivial_characters())
        for (int i = 0; i < Dih4::kOrder && ok; ++i)
            for (int j = 0; j < Dih4::kOrder && ok; ++j) {
                const Dih4 a = Dih4::element(i), b = Dih4::element(j);
                ok = c.value(a * b) == c.value(a) * c.value(b);
            }
    return ok;
}

bool operator_typing() {
    Rng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const int dim = rng.uniform_int(2, 3);
        const auto samples = default_classify_samples(dim, 32, kDefaultSeed + trial);

        const Form2 wd2 = nonzero_form(rng, dim, samples, [](Rng& g, int d) {
            return delta2(Form0(random_scalar_field(g, d)));
        });
        const auto r2 = classify(wd2, samples, 1e-9);
        if (!(r2.characters.size() == 1 && r2.has(Character::Name::LeibnizFubini))) return false;

        const Form2 wd = nonzero_form(rng, dim, samples, [](Rng& g, int d) {
            return exterior_d(Form1::from_vector_field(random_vector_field(g, d)));
        });
        const auto rd = classify(wd, samples, 1e-9);
        if (!(rd.characters.size() == 1 && rd.has(Character::Name::Cartan))) return false;
    }
    return true;
}

bool boundary_of_gradient_vanishes() {
    Rng rng(606);
    for (int trial = 0; trial < 100; ++trial) {
        const int dim = rng.uniform_int(2, 3);
        const Form0 F(random_scalar_field(rng, dim));
        const Form2 w = exterior_d(delta0(F));

        const FiniteQuad q = random_finite_quad(rng, dim);
        double scale = 0.0;
        for (const auto& v : q.v) scale = std::max(scale, std::abs(F(v)));
        if (std::abs(w.eval(q)) > 1e-10 * (1.0 + scale)) return false;

        const SymbolicQuad sq = random_symbolic_quad(rng, dim);
        double sscale = 0.0;
        for (const auto& v : sq.v) sscale = std::max(sscale, F(v).max_abs_coeff());
        if (w.eval(sq).max_abs_coeff() > 1e-10 * (1.0 + sscale)) return false;
    }
    return true;
}

bool double_difference_is_hessian() {
    Rng rng(160);
    for (int trial = 0; trial < 100; ++trial) {
        const int dim = rng.uniform_int(2, 3);
        const ExprPtr f = random_polytrig_expr(rng, dim, 3);
        const SymbolicQuad q = random_symbolic_quad(rng, dim, /*parallelogram=*/true);
        const double got = delta2(Form0(FieldSpec::scalar(f))).eval(q).coeff(0b11);

        const auto H = hessian(*f, q.build->P);
        double want = 0.0;
        for (std::size_t i = 0; i < H.size(); ++i)
            for (std::size_t j = 0; j < H.size(); ++j)
                want += H[i][j] * q.build->u[i] * q.build->w[j];

        if (std::abs(got - want) > 1e-9 * (1.0 + std::abs(want))) return false;
    }
    return true;
}

GridTiling random_tiling(Rng& rng, int max_side) {
    return GridTiling(RectDomain(rng.uniform(-1.0, 0.0), rng.uniform(0.1, 1.0),
                                 rng.uniform(-1.0, 0.0), rng.uniform(0.1, 1.0)),
                      rng.uniform_int(1, max_side), rng.uniform_int(1, max_side));
}

bool interior_cancellation() {
    Rng rng(77);
    for (int trial = 0; trial < 50; ++trial) {
        const Form1 a = Form1::from_vector_field(random_vector_field(rng, 2));
        const GridTiling t = random_tiling(rng, 64);
        if (!check_stokes(a, t, 1e-9).pass) return false;
    }
    return true;
}

bool symmetrized_side_sums() {
    Rng rng(78);
    for (int trial = 0; trial < 50; ++trial) {
        const Form1 a = (trial % 2 == 0)
                            ? Form1::from_vector_field(random_vector_field(rng, 2))
                            : delta0(Form0(random_scalar_field(rng, 2)));
        const GridTiling t = random_tiling(rng, 32);
        if (!check_relative_ftc(a, t, 1e-9).pass) return false;
    }
    return true;
}

bool corner_alternation() {
    const GridTiling t(RectDomain(0.0, 1.0, 0.0, 2.0), 16, 16);
    const CheckReport rep = check_ftc2d(Form0::from_text("x^2*y^2"), t, 1e-9);
    if (!(rep.pass && std::abs(rep.lhs - 4.0) <= 1e-9 && std::abs(rep.rhs - 4.0) <= 1e-9))
        return false;

    Rng rng(404);
    for (int trial = 0; trial < 50; ++trial) {
        const Form0 F(random_scalar_field(rng, 2));
        const GridTiling g = random_tiling(rng, 16);
        if (!check_ftc2d(F, g, 1e-9).pass) return false;
    }
    return true;
}

bool riemann_convergence() {
    const std::vector<std::pair<int, int>> grids = {{4, 4}, {8, 8}, {16, 16}, {32, 32}, {64, 64}};
    const ConvergenceReport rep = check_riemann_convergence(
        Form0::from_text("x^2*y^2/4"), RectDomain(0.0, 1.0, 0.0, 1.0), grids, 0.8);
    return rep.pass && rep.monotone && rep.fitted_order && *rep.fitted_order >= 0.8;
}

bool pullback_type_preserved() {
    Rng rng(355);
    const auto samples = default_classify_samples(2, 24);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<ExprPtr> comps;
        for (int k = 0; k < 3; ++k) comps.push_back(random_quadratic(rng));
        const FieldSpec phi = FieldSpec::vector_field(std::move(comps), 2);

        const Form2 w = (trial % 2 == 0)
                            ? exterior_d(Form1::from_vector_field(random_vector_field(rng, 3)))
                            : delta2(Form0(random_scalar_field(rng, 3)));
        if (!check_pullback_type(w, phi, samples, 1e-8).pass) return false;
    }
    return true;
}

bool split_domain_additivity() {
    Rng rng(1212);
    for (int trial = 0; trial < 10; ++trial) {
        const double x0 = rng.uniform(-1.0, 0.0), x1 = rng.uniform(0.2, 1.0);
        const double xm = 0.5 * (x0 + x1);
        const double y0 = rng.uniform(-1.0, 0.0), y1 = rng.uniform(0.2, 1.0);
        const int m = 2 * rng.uniform_int(1, 6), n = rng.uniform_int(1, 6);
        const GridTiling whole(RectDomain(x0, x1, y0, y1), m, n);
        const GridTiling left(RectDomain(x0, xm, y0, y1), m / 2, n);
        const GridTiling right(RectDomain(xm, x1, y0, y1), m / 2, n);

        const Form1 a = Form1::from_vector_field(random_vector_field(rng, 2));
        const Form0 F(random_scalar_field(rng, 2));
        const Form2 parts[3] = {exterior_d(a), delta(a), delta2(F)};
        for (const Form2& w : parts) {
            const double all = integrate2(w, whole);
            const double split = integrate2(w, left) + integrate2(w, right);
            if (std::abs(all - split) > 1e-10 * (1.0 + std::abs(all))) return false;
        }
    }
    return true;
}

bool integration_gate(const std::string& cli) {
    if (cli.empty()) return false;
    const RunResult no =
        run_cli(cli, "integrate --form d --X \"0, x\" --domain 0,1,0,1 --grid 8x8");
    if (no.code != 1) return false;
    if (no.out.find("only Leibniz-Fubini 2-forms") == std::string::npos) return false;

    const RunResult ok =
        run_cli(cli, "integrate --form delta2 --F \"x*y\" --domain 0,1,0,1 --grid 8x8");
    return ok.code == 0 && ok.out == "integral = 1\n";
}

}  // namespace

int main(int argc, char** argv) {
    const std::string cli = argc > 1 ? argv[1] : "";
    try {
        report(1, "one-generator arithmetic is exactly affine (200 cases)", affine_expansion_suite());
        report(2, "sign characters on the relabeling group match the table", character_table_exact());
        report(3, "delta2 classifies LF, d classifies Cartan (50 cases)", operator_typing());
        report(4, "d after delta0 vanishes on all quads (100 cases)", boundary_of_gradient_vanishes());
        report(5, "delta2 on parallelograms equals the Hessian pairing", double_difference_is_hessian());
        report(6, "cell sums of d(alpha) telescope to the boundary", interior_cancellation());
        report(7, "cell sums of delta(alpha) telescope to the side sums", symmetrized_side_sums());
        report(8, "cell sums of delta2(F) telescope to the corner sum", corner_alternation());
        report(9, "riemann sums converge to the corner value, order >= 0.8", riemann_convergence());
        report(10, "pullback preserves the declared character (20 cases)", pullback_type_preserved());
        report(11, "split-domain integrals equal whole-domain integrals", split_domain_additivity());
        report(12, "integrate refuses non-LF forms and accepts LF forms", integration_gate(cli));
    } catch (const std::exception& e) {
        std::fprintf(stderr, "unexpected error: %s\n", e.what());
        return 99;
    }
    return failures;
}
