#include <cmath>
#include <numeric>
#include <string>

#include <catch2/catch_amalgamated.hpp>

#include <quadforms/forms.hpp>
#include <quadforms/random.hpp>
#include <quadforms/tiling.hpp>

using namespace quadforms;

TEST_CASE("pairwise summation matches plain accumulation") {
    CHECK(pairwise_sum({}) == 0.0);

    const std::vector<double> one = {7.25};
    CHECK(pairwise_sum(one) == 7.25);

    std::vector<double> ints(100);
    std::iota(ints.begin(), ints.end(), 1.0);
    CHECK(pairwise_sum(ints) == 5050.0);

    Rng rng(31);
    std::vector<double> xs;
    long double ref = 0.0L;
    for (int i = 0; i < 1000; ++i) {
        xs.push_back(rng.uniform(-1.0, 1.0));
        ref += xs.back();
    }
    CHECK(std::abs(pairwise_sum(xs) - static_cast<double>(ref)) <= 1e-12);
}

TEST_CASE("rectangle domains validate their corners") {
    const RectDomain d(0.0, 2.0, -1.0, 3.0);
    CHECK(d.width() == 2.0);
    CHECK(d.height() == 4.0);
    CHECK_THROWS_AS(RectDomain(1.0, 0.0, 0.0, 1.0), Error);
    CHECK_THROWS_AS(RectDomain(0.0, 1.0, 2.0, 1.0), Error);
}

TEST_CASE("grid nodes, cells, and corners sit where advertised") {
    const GridTiling t(RectDomain(0.0, 1.0, 0.0, 3.0), 2, 3);
    CHECK(t.m() == 2);
    CHECK(t.n() == 3);
    CHECK(t.dim() == 2);
    CHECK_FALSE(t.has_patch());

    CHECK(t.node_vec(0, 0) == RealVec{0.0, 0.0});
    CHECK(t.node_vec(1, 2) == RealVec{0.5, 2.0});
    CHECK(t.node_vec(2, 3) == RealVec{1.0, 3.0});

    const FiniteQuad c = t.cell(1, 2);
    CHECK(c.v[0] == t.node_vec(1, 2));
    CHECK(c.v[1] == t.node_vec(2, 2));
    CHECK(c.v[2] == t.node_vec(2, 3));
    CHECK(c.v[3] == t.node_vec(1, 3));

    CHECK(t.corner_a() == RealVec{0.0, 0.0});
    CHECK(t.corner_b() == RealVec{1.0, 0.0});
    CHECK(t.corner_c() == RealVec{1.0, 3.0});
    CHECK(t.corner_d() == RealVec{0.0, 3.0});

    CHECK_THROWS_AS(GridTiling(RectDomain(0, 1, 0, 1), 0, 3), Error);
    CHECK_THROWS_AS(GridTiling(RectDomain(0, 1, 0, 1), 3, -1), Error);
}

TEST_CASE("a patch maps the lattice into its image") {
    const FieldSpec phi = FieldSpec::vector_field("x, y, x^2 + y^2", 2);
    const GridTiling t(RectDomain(0.0, 1.0, 0.0, 1.0), 2, 2, phi);
    CHECK(t.dim() == 3);
    CHECK(t.has_patch());
    CHECK(t.node_vec(1, 1) == RealVec{0.5, 0.5, 0.5});
    CHECK(t.corner_c() == RealVec{1.0, 1.0, 2.0});

    CHECK_THROWS_AS(GridTiling(RectDomain(0, 1, 0, 1), 2, 2, FieldSpec::scalar("x")), Error);
    CHECK_THROWS_AS(
        GridTiling(RectDomain(0, 1, 0, 1), 2, 2, FieldSpec::vector_field("x, y, z")), Error);
}

TEST_CASE("integration values on hand-checkable grids") {
    const GridTiling unit(RectDomain(0.0, 1.0, 0.0, 1.0), 4, 4);
    CHECK(integrate2(delta2(Form0::from_text("x*y")), unit) == 1.0);
    CHECK(integrate2(Form2::zero(), unit) == 0.0);

    // the alternating area pairing doubles the covered area
    const Form2 area = cartan_from_bilinear(FieldSpec::bilinear("0, 1; -1, 0"));
    CHECK(integrate2(area, unit) == 2.0);
    const GridTiling tall(RectDomain(0.0, 1.0, 0.0, 2.0), 4, 4);
    CHECK(integrate2(area, tall) == 4.0);
}

TEST_CASE("evaluation failures name the offending cell") {
    const Form2 bomb(
        [](const FiniteQuad& q) {
            if (q.v[0][0] >= 0.75) throw Error("boom");
            return 0.0;
        },
        [](const SymbolicQuad&) { return WeilNumber(0.0); });
    const GridTiling t(RectDomain(0.0, 1.0, 0.0, 1.0), 4, 4);
    try {
        integrate2(bomb, t);
        FAIL("expected the cell error to propagate");
    } catch (const Error& e) {
        CHECK(std::string(e.what()) == "cell (3,0): boom");
    }
}

TEST_CASE("boundary sums walk the rectangle anticlockwise") {
    const Form1 a = Form1::from_vector_field(FieldSpec::vector_field("0, x"));
    const GridTiling t(RectDomain(0.0, 1.0, 0.0, 1.0), 4, 4);
    CHECK(boundary_sum(a, t) == 1.0);  // only the x=1 side contributes

    // a potential difference cancels around any closed loop
    const Form1 g = delta0(Form0::from_text("sin(x*y) + x^2"));
    CHECK(std::abs(boundary_sum(g, t)) <= 1e-12);
}

TEST_CASE("side sums report the four directed edges separately") {
    const Form0 F = Form0::from_text("x^2*y + x");
    const Form1 a = delta0(F);
    const GridTiling t(RectDomain(0.0, 1.0, 0.0, 1.0), 4, 4);

    // endpoint differences telescope along each side
    const SideSums s = side_sums(a, t);
    CHECK(s.b_to_a == -1.0);  // F(A) - F(B)
    CHECK(s.b_to_c == 1.0);   // F(C) - F(B)
    CHECK(s.d_to_c == 2.0);   // F(C) - F(D)
    CHECK(s.d_to_a == 0.0);   // F(A) - F(D)
    CHECK(s.total() == 2.0);

    const CheckReport rep = check_relative_ftc(a, t);
    CHECK(rep.lhs == 1.0);
    CHECK(rep.rhs == 1.0);
    CHECK(rep.residual == 0.0);
    CHECK(rep.pass);
    REQUIRE(rep.sides.has_value());
    CHECK(rep.sides->d_to_c == 2.0);
    CHECK(rep.check == "relative-ftc");
    CHECK(rep.lhs_label == "integral of delta(alpha)");
    CHECK(rep.rhs_label == "half sum of side sums");
}

TEST_CASE("interior cancellation leaves only the boundary") {
    const Form1 a = Form1::from_vector_field(FieldSpec::vector_field("0, x"));
    const GridTiling t(RectDomain(0.0, 1.0, 0.0, 1.0), 8, 8);
    const CheckReport rep = check_stokes(a, t);
    CHECK(rep.lhs == 1.0);
    CHECK(rep.rhs == 1.0);
    CHECK(rep.residual == 0.0);
    CHECK(rep.pass);
    CHECK(rep.check == "stokes");
    CHECK(rep.lhs_label == "integral of d(alpha)");
    CHECK(rep.rhs_label == "boundary sum");

    Rng rng(77);
    for (int trial = 0; trial < 50; ++trial) {
        const Form1 b = Form1::from_vector_field(random_vector_field(rng, 2));
        const GridTiling g(RectDomain(rng.uniform(-1.0, 0.0), rng.uniform(0.1, 1.0),
                                      rng.uniform(-1.0, 0.0), rng.uniform(0.1, 1.0)),
                           rng.uniform_int(1, 8), rng.uniform_int(1, 8));
        CHECK(check_stokes(b, g).pass);
        CHECK(check_relative_ftc(b, g).pass);
    }
}

TEST_CASE("the double difference integrates to the corner alternation") {
    const GridTiling t(RectDomain(0.0, 1.0, 0.0, 2.0), 16, 16);
    const CheckReport rep = check_ftc2d(Form0::from_text("x^2*y^2"), t);
    CHECK(rep.lhs == 4.0);
    CHECK(rep.rhs == 4.0);
    CHECK(rep.residual == 0.0);
    CHECK(rep.pass);
    CHECK(rep.rhs_label == "corner sum");

    const GridTiling u(RectDomain(0.0, 1.0, 0.0, 1.0), 8, 8);
    const CheckReport er = check_ftc2d(Form0::from_text("exp(x*y)"), u);
    CHECK(er.rhs == Catch::Approx(std::exp(1.0) - 1.0).epsilon(1e-15));
    CHECK(er.residual <= 1e-12);
    CHECK(er.pass);

    Rng rng(404);
    for (int trial = 0; trial < 30; ++trial) {
        const Form0 F(random_scalar_field(rng, 2));
        const GridTiling g(RectDomain(rng.uniform(-1.0, 0.0), rng.uniform(0.1, 1.0),
                                      rng.uniform(-1.0, 0.0), rng.uniform(0.1, 1.0)),
                           rng.uniform_int(1, 10), rng.uniform_int(1, 10));
        CHECK(check_ftc2d(F, g).pass);
    }
}

TEST_CASE("grid identities survive a curved patch") {
    const FieldSpec phi = FieldSpec::vector_field("x, y, x^2 + y^2", 2);
    const GridTiling t(RectDomain(0.0, 1.0, 0.0, 1.0), 6, 6, phi);

    const Form1 a = Form1::from_vector_field(FieldSpec::vector_field("0, z, 0"));
    const CheckReport st = check_stokes(a, t);
    CHECK(st.pass);
    CHECK(st.residual <= 1e-12);

    const Form0 F = Form0::from_text("x*y + z^2");
    const CheckReport fr = check_ftc2d(F, t);
    CHECK(fr.pass);
    // corners are patch images
    CHECK(fr.rhs == F(RealVec{1, 1, 2}) - F(RealVec{0, 1, 1}) + F(RealVec{0, 0, 0}) -
                        F(RealVec{1, 0, 1}));
}

TEST_CASE("riemann sums of the density converge to the corner value") {
    const std::vector<std::pair<int, int>> grids = {{4, 4}, {8, 8}, {16, 16}, {32, 32}};
    const ConvergenceReport rep = check_riemann_convergence(
        Form0::from_text("x^2*y^2/4"), RectDomain(0.0, 1.0, 0.0, 1.0), grids);

    CHECK(rep.corner == 0.25);
    REQUIRE(rep.rows.size() == 4);
    CHECK(rep.rows[0].abs_error == 0.109375);
    CHECK(rep.rows[1].abs_error == 0.05859375);
    CHECK(rep.rows[2].abs_error == 0.0302734375);
    CHECK(rep.rows[3].abs_error == 0.015380859375);
    CHECK_FALSE(rep.rows[0].order.has_value());
    REQUIRE(rep.rows[1].order.has_value());
    CHECK(*rep.rows[1].order == Catch::Approx(0.9004643264490856).margin(1e-12));
    REQUIRE(rep.fitted_order.has_value());
    CHECK(*rep.fitted_order == Catch::Approx(0.9442919280894676).margin(1e-12));
    CHECK_FALSE(rep.exact);
    CHECK(rep.monotone);
    CHECK(rep.pass);
}

TEST_CASE("bilinear integrands are reproduced exactly at every grid") {
    const std::vector<std::pair<int, int>> grids = {{3, 5}, {7, 2}, {16, 16}};
    const ConvergenceReport rep = check_riemann_convergence(
        Form0::from_text("x*y"), RectDomain(0.0, 1.0, 0.0, 1.0), grids);
    CHECK(rep.exact);
    CHECK(rep.pass);
    for (const auto& row : rep.rows) CHECK(row.abs_error <= 1e-12);
}

TEST_CASE("convergence checks reject degenerate input") {
    const RectDomain dom(0.0, 1.0, 0.0, 1.0);
    const Form0 F = Form0::from_text("x^2*y^2");
    CHECK_THROWS_AS(
        check_riemann_convergence(F, dom, std::span<const std::pair<int, int>>{}), Error);
    const std::vector<std::pair<int, int>> bad = {{0, 4}};
    CHECK_THROWS_AS(check_riemann_convergence(F, dom, bad), Error);
    const std::vector<std::pair<int, int>> one = {{8, 8}};
    CHECK_THROWS_AS(
        check_riemann_convergence(Form0::from_text("x*y + z"), dom, one), Error);

    // a single grid gives no order estimate and no pass for inexact data
    const ConvergenceReport rep = check_riemann_convergence(F, dom, one);
    REQUIRE(rep.rows.size() == 1);
    CHECK_FALSE(rep.rows[0].order.has_value());
    CHECK_FALSE(rep.fitted_order.has_value());
    CHECK_FALSE(rep.pass);
}

TEST_CASE("pullback checks recognize both declared types") {
    const auto samples = default_classify_samples(2, 16);
    const FieldSpec phi = FieldSpec::vector_field("x, y, x^2 + y^2", 2);

    const Form2 wc = exterior_d(Form1::from_vector_field(FieldSpec::vector_field("0, z, 0")));
    const PullbackReport rc = check_pullback_type(wc, phi, samples);
    CHECK(rc.declared.name == Character::Name::Cartan);
    CHECK(rc.pass);

    const Form2 wl = delta2(Form0::from_text("x*y + z^2"));
    const PullbackReport rl = check_pullback_type(wl, phi, samples);
    CHECK(rl.declared.name == Character::Name::LeibnizFubini);
    CHECK(rl.pass);

    CHECK_THROWS_AS(check_pullback_type(Form2::zero(), phi, samples), Error);
    const auto wrong_dim = default_classify_samples(3, 4);
    CHECK_THROWS_AS(check_pullback_type(wc, phi, wrong_dim), Error);
}

TEST_CASE("integrals split across a shared edge") {
    const Form2 w = delta2(Form0::from_text("sin(x*y) + x^2*y"));
    const GridTiling whole(RectDomain(0.0, 1.0, 0.0, 1.0), 8, 4);
    const GridTiling left(RectDomain(0.0, 0.5, 0.0, 1.0), 4, 4);
    const GridTiling right(RectDomain(0.5, 1.0, 0.0, 1.0), 4, 4);

    const double a = integrate2(w, whole);
    const double b = integrate2(w, left) + integrate2(w, right);
    CHECK(std::abs(a - b) <= 1e-10 * (1.0 + std::abs(a)));

    const Form1 al = Form1::from_vector_field(FieldSpec::vector_field("-y^2, x*y"));
    const double sw = integrate2(exterior_d(al), whole);
    const double sp = integrate2(exterior_d(al), left) + integrate2(exterior_d(al), right);
    CHECK(std::abs(sw - sp) <= 1e-10 * (1.0 + std::abs(sw)));
}

TEST_CASE("telescoping survives a very fine grid") {
    const GridTiling t(RectDomain(0.0, 1.0, 0.0, 1.0), 500, 500);
    const CheckReport rep = check_ftc2d(Form0::from_text("x*y"), t);
    CHECK(rep.rhs == 1.0);
    CHECK(rep.residual <= 1e-9);
    CHECK(rep.pass);
}
