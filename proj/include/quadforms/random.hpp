#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "quadforms/derivative.hpp"
#include "quadforms/expr.hpp"
#include "quadforms/field.hpp"
#include "quadforms/quad.hpp"

namespace quadforms {

inline constexpr std::uint64_t kDefaultSeed = 987654321u;

/// Seeded, engine-pinned random source so every sampled check replays
/// byte-identically.
class Rng {
public:
    explicit Rng(std::uint64_t seed = kDefaultSeed) : eng_(seed) {}

    double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
    /// Inclusive on both ends.
    int uniform_int(int lo, int hi) {
        return lo + static_cast<int>(eng_() % static_cast<std::uint64_t>(hi - lo + 1));
    }
    bool chance(double p) { return uniform01() < p; }

private:
    std::mt19937_64 eng_;
};

inline RealVec random_point(Rng& rng, int dim, double lo = -1.0, double hi = 1.0) {
    RealVec p(static_cast<std::size_t>(dim));
    for (auto& x : p) x = rng.uniform(lo, hi);
    return p;
}

/// Random polynomial/trig expression in dim variables: +, -, *, small
/// integer powers, negation, sin, cos. No division, exp, ln or sqrt, so
/// every draw is total on [-1,1]^dim and stays mild enough for finite
/// differences to track.
inline ExprPtr random_polytrig_expr(Rng& rng, int dim, int depth) {
    if (depth <= 0 || rng.chance(0.2)) {
        if (dim >= 1 && rng.chance(0.65)) return Expr::variable(rng.uniform_int(0, dim - 1));
        return Expr::num(rng.uniform(-1.5, 1.5));
    }
    switch (rng.uniform_int(0, 14)) {
    case 0:
    case 1:
    case 2:
        return Expr::add(random_polytrig_expr(rng, dim, depth - 1),
                         random_polytrig_expr(rng, dim, depth - 1));
    case 3:
    case 4:
    case 5:
        return Expr::sub(random_polytrig_expr(rng, dim, depth - 1),
                         random_polytrig_expr(rng, dim, depth - 1));
    case 6:
    case 7:
    case 8:
    case 9:
        return Expr::mul(random_polytrig_expr(rng, dim, depth - 1),
                         random_polytrig_expr(rng, dim, depth - 1));
    case 10:
    case 11:
        return Expr::pow(random_polytrig_expr(rng, dim, depth - 1), rng.uniform_int(2, 3));
    case 12:
        return Expr::neg(random_polytrig_expr(rng, dim, depth - 1));
    case 13:
        return Expr::call(Func::Sin, random_polytrig_expr(rng, dim, depth - 1));
    default:
        return Expr::call(Func::Cos, random_polytrig_expr(rng, dim, depth - 1));
    }
}

inline FieldSpec random_scalar_field(Rng& rng, int dim, int depth = 3) {
    return FieldSpec::scalar(random_polytrig_expr(rng, dim, depth), dim);
}

inline FieldSpec random_vector_field(Rng& rng, int dim, int depth = 2) {
    std::vector<ExprPtr> comps;
    comps.reserve(static_cast<std::size_t>(dim));
    for (int i = 0; i < dim; ++i) comps.push_back(random_polytrig_expr(rng, dim, depth));
    return FieldSpec::vector_field(std::move(comps), dim);
}

inline FiniteQuad random_finite_quad(Rng& rng, int dim, double scale = 1.0) {
    FiniteQuad q;
    for (auto& vert : q.v) vert = random_point(rng, dim, -scale, scale);
    return q;
}

inline SymbolicQuad random_symbolic_quad(Rng& rng, int dim, bool parallelogram = false) {
    RealVec P = random_point(rng, dim);
    RealVec u = random_point(rng, dim);
    RealVec w = random_point(rng, dim);
    RealVec z = parallelogram ? RealVec(static_cast<std::size_t>(dim), 0.0)
                              : random_point(rng, dim);
    return make_symbolic_quad(P, u, w, z);
}

inline std::vector<SymbolicQuad> random_symbolic_quads(Rng& rng, int dim, int count,
                                                       bool parallelogram = false) {
    std::vector<SymbolicQuad> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) out.push_back(random_symbolic_quad(rng, dim, parallelogram));
    return out;
}

/// The default sample set used by classification-style checks:
/// coordinates uniform on [-1,1], fixed seed.
inline std::vector<SymbolicQuad> default_classify_samples(int dim, int count = 32,
                                                          std::uint64_t seed = kDefaultSeed,
                                                          bool parallelogram = false) {
    Rng rng(seed);
    return random_symbolic_quads(rng, dim, count, parallelogram);
}

struct KockLawvereReport {
    int cases = 0;
    double max_affine_residual = 0.0;  // f(x + e*d) vs f(x) + e*(d . grad f)
    double max_fd_residual = 0.0;      // nilpotent mixed partial vs central differences
    double tol_affine = 0.0;
    double tol_fd = 0.0;
    bool pass = false;
};

/// Randomized check that evaluation over one-generator numbers is the
/// affine expansion f(x) + e*d*f'(x) — with nothing above first order —
/// and that nilpotent mixed partials track the finite-difference oracle.
inline KockLawvereReport run_kock_lawvere_suite(int cases = 200,
                                                std::uint64_t seed = kDefaultSeed,
                                                double tol_affine = 1e-12,
                                                double tol_fd = 1e-4,
                                                double fd_step = 1e-5) {
    Rng rng(seed);
    KockLawvereReport rep;
    rep.cases = cases;
    rep.tol_affine = tol_affine;
    rep.tol_fd = tol_fd;
    for (int c = 0; c < cases; ++c) {
        const int dim = rng.uniform_int(1, 3);
        const ExprPtr e = random_polytrig_expr(rng, dim, 3);
        const RealVec p = random_point(rng, dim);
        const RealVec d = random_point(rng, dim);

        // Affine expansion along direction d, one generator.
        WeilVec q;
        q.reserve(p.size());
        for (std::size_t j = 0; j < p.size(); ++j)
            q.push_back(WeilNumber::constant(p[j], 1) + WeilNumber::generator(0, 1) * d[j]);
        const WeilNumber actual = eval_weil(*e, q);
        double slope = 0.0;
        for (std::size_t j = 0; j < p.size(); ++j)
            slope += d[j] * partial(*e, static_cast<int>(j) + 1, p);
        const WeilNumber expected =
            WeilNumber::constant(eval_real(*e, p), 1) + WeilNumber::generator(0, 1) * slope;
        rep.max_affine_residual =
            std::max(rep.max_affine_residual, relative_residual(actual, expected));

        // A spare generator never acquires a coefficient, and the real
        // part matches plain evaluation bit-for-bit.
        WeilVec q2;
        q2.reserve(p.size());
        for (std::size_t j = 0; j < p.size(); ++j)
            q2.push_back(WeilNumber::constant(p[j], 2) + WeilNumber::generator(0, 2) * d[j]);
        const WeilNumber spare = eval_weil(*e, q2);
        if (spare.coeff(2) != 0.0 || spare.coeff(3) != 0.0 ||
            spare.real() != eval_real(*e, p))
            rep.max_affine_residual = std::max(rep.max_affine_residual, 1.0);

        // Mixed partial vs nested central differences.
        const int axes[2] = {rng.uniform_int(1, dim), rng.uniform_int(1, dim)};
        const double ad = mixed_partial(*e, axes, p);
        const double fd = central_difference(*e, axes, p, fd_step);
        rep.max_fd_residual =
            std::max(rep.max_fd_residual, std::abs(ad - fd) / (1.0 + std::abs(ad)));
    }
    rep.pass = rep.max_affine_residual <= tol_affine && rep.max_fd_residual <= tol_fd;
    return rep;
}

}  // namespace quadforms
