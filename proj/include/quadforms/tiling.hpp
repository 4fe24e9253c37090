#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "quadforms/derivative.hpp"
#include "quadforms/error.hpp"
#include "quadforms/field.hpp"
#include "quadforms/forms.hpp"
#include "quadforms/quad.hpp"

namespace quadforms {

/// Deterministic pairwise (recursive halving) summation; the one
/// accumulation order used for every grid total, so runs reproduce
/// bit-identically.
inline double pairwise_sum(std::span<const double> xs) {
    if (xs.size() <= 16) {
        double acc = 0.0;
        for (double x : xs) acc += x;
        return acc;
    }
    const std::size_t half = xs.size() / 2;
    return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

/// The marked rectangle [a1,a2] x [b1,b2]; the markings (corner data)
/// are where corner formulas are evaluated.
struct RectDomain {
    double a1, a2, b1, b2;

    RectDomain(double a1_, double a2_, double b1_, double b2_)
        : a1(a1_), a2(a2_), b1(b1_), b2(b2_) {
        if (!(a1 <= a2) || !(b1 <= b2))
            throw Error("RectDomain: need a1 <= a2 and b1 <= b2");
    }

    double width() const { return a2 - a1; }
    double height() const { return b2 - b1; }
};

/// (m+1) x (n+1) node lattice over a marked rectangle; cell (i,j) is the
/// finite quad (nodes (i,j), (i+1,j), (i+1,j+1), (i,j+1)). An optional
/// patch R^2 -> R^d maps every node, making the grid an image tiling
/// whose marked corners are the images of the rectangle's corners.
class GridTiling {
public:
    GridTiling(RectDomain dom, int m, int n)
        : dom_(dom), m_(m), n_(n), dim_(2) {
        init(nullptr);
    }

    GridTiling(RectDomain dom, int m, int n, FieldSpec patch)
        : dom_(dom), m_(m), n_(n), dim_(patch.components()), patch_(std::move(patch)) {
        if (patch_->kind() != FieldKind::Vector || patch_->dim() != 2)
            throw Error("GridTiling: patch must be a vector field on R^2");
        init(&*patch_);
    }

    const RectDomain& domain() const { return dom_; }
    int m() const { return m_; }
    int n() const { return n_; }
    int dim() const { return dim_; }
    bool has_patch() const { return patch_.has_value(); }

    std::span<const double> node(int i, int j) const {
        const std::size_t at =
            (static_cast<std::size_t>(j) * (static_cast<std::size_t>(m_) + 1) +
             static_cast<std::size_t>(i)) *
            static_cast<std::size_t>(dim_);
        return {nodes_.data() + at, static_cast<std::size_t>(dim_)};
    }

    RealVec node_vec(int i, int j) const {
        auto s = node(i, j);
        return RealVec(s.begin(), s.end());
    }

    FiniteQuad cell(int i, int j) const {
        FiniteQuad q;
        q.v[0] = node_vec(i, j);
        q.v[1] = node_vec(i + 1, j);
        q.v[2] = node_vec(i + 1, j + 1);
        q.v[3] = node_vec(i, j + 1);
        return q;
    }

    /// Marked corners: A bottom-left, B bottom-right, C top-right,
    /// D top-left (patch images when a patch is present).
    RealVec corner_a() const { return node_vec(0, 0); }
    RealVec corner_b() const { return node_vec(m_, 0); }
    RealVec corner_c() const { return node_vec(m_, n_); }
    RealVec corner_d() const { return node_vec(0, n_); }

private:
    void init(const FieldSpec* patch) {
        if (m_ < 1 || n_ < 1) throw Error("GridTiling: need m >= 1 and n >= 1");
        nodes_.resize(static_cast<std::size_t>(m_ + 1) * static_cast<std::size_t>(n_ + 1) *
                      static_cast<std::size_t>(dim_));
        const double hx = dom_.width() / m_;
        const double hy = dom_.height() / n_;
        std::size_t at = 0;
        for (int j = 0; j <= n_; ++j)
            for (int i = 0; i <= m_; ++i) {
                const double xy[2] = {dom_.a1 + i * hx, dom_.b1 + j * hy};
                if (patch) {
                    const auto img = patch->eval_vector<double>(std::span<const double>(xy, 2));
                    for (int k = 0; k < dim_; ++k)
                        nodes_[at++] = img[static_cast<std::size_t>(k)];
                } else {
                    nodes_[at++] = xy[0];
                    nodes_[at++] = xy[1];
                }
            }
    }

    RectDomain dom_;
    int m_, n_, dim_;
    std::optional<FieldSpec> patch_;
    std::vector<double> nodes_;
};

/// Sum of omega over all cells, pairwise-accumulated in row-major cell
/// order. Evaluation failures are rethrown with the offending cell.
inline double integrate2(const Form2& w, const GridTiling& t) {
    std::vector<double> vals;
    vals.reserve(static_cast<std::size_t>(t.m()) * static_cast<std::size_t>(t.n()));
    for (int j = 0; j < t.n(); ++j)
        for (int i = 0; i < t.m(); ++i) {
            try {
                vals.push_back(w.eval(t.cell(i, j)));
            } catch (const Error& err) {
                throw Error("cell (" + std::to_string(i) + "," + std::to_string(j) +
                            "): " + err.what());
            }
        }
    return pairwise_sum(vals);
}

/// Sum of alpha over boundary node pairs, traversed anticlockwise:
/// bottom left-to-right, right bottom-to-top, top right-to-left, left
/// top-to-bottom.
inline double boundary_sum(const Form1& a, const GridTiling& t) {
    std::vector<double> vals;
    vals.reserve(2 * static_cast<std::size_t>(t.m() + t.n()));
    for (int i = 0; i < t.m(); ++i) vals.push_back(a.eval(t.node(i, 0), t.node(i + 1, 0)));
    for (int j = 0; j < t.n(); ++j) vals.push_back(a.eval(t.node(t.m(), j), t.node(t.m(), j + 1)));
    for (int i = t.m(); i >= 1; --i) vals.push_back(a.eval(t.node(i, t.n()), t.node(i - 1, t.n())));
    for (int j = t.n(); j >= 1; --j) vals.push_back(a.eval(t.node(0, j), t.node(0, j - 1)));
    return pairwise_sum(vals);
}

/// Directed side sums with the corner letters A=(0,0), B=(m,0), C=(m,n),
/// D=(0,n): bottom walked B->A, right B->C, top D->C, left D->A.
struct SideSums {
    double b_to_a = 0.0, b_to_c = 0.0, d_to_c = 0.0, d_to_a = 0.0;
    double total() const { return b_to_a + b_to_c + d_to_c + d_to_a; }
};

inline SideSums side_sums(const Form1& a, const GridTiling& t) {
    SideSums s;
    std::vector<double> vals;
    vals.reserve(static_cast<std::size_t>(std::max(t.m(), t.n())));

    vals.clear();
    for (int i = t.m(); i >= 1; --i) vals.push_back(a.eval(t.node(i, 0), t.node(i - 1, 0)));
    s.b_to_a = pairwise_sum(vals);

    vals.clear();
    for (int j = 0; j < t.n(); ++j) vals.push_back(a.eval(t.node(t.m(), j), t.node(t.m(), j + 1)));
    s.b_to_c = pairwise_sum(vals);

    vals.clear();
    for (int i = 0; i < t.m(); ++i) vals.push_back(a.eval(t.node(i, t.n()), t.node(i + 1, t.n())));
    s.d_to_c = pairwise_sum(vals);

    vals.clear();
    for (int j = t.n(); j >= 1; --j) vals.push_back(a.eval(t.node(0, j), t.node(0, j - 1)));
    s.d_to_a = pairwise_sum(vals);

    return s;
}

struct CheckReport {
    std::string check;
    std::string lhs_label, rhs_label;
    double lhs = 0.0, rhs = 0.0;
    double residual = 0.0;
    double tol = 0.0;
    bool pass = false;
    std::optional<SideSums> sides;
};

namespace detail {

inline CheckReport make_report(std::string name, std::string lhs_label, double lhs,
                               std::string rhs_label, double rhs, double tol) {
    CheckReport rep;
    rep.check = std::move(name);
    rep.lhs_label = std::move(lhs_label);
    rep.rhs_label = std::move(rhs_label);
    rep.lhs = lhs;
    rep.rhs = rhs;
    rep.tol = tol;
    rep.residual = std::abs(lhs - rhs) / (1.0 + std::abs(rhs));
    rep.pass = rep.residual <= tol;
    return rep;
}

}  // namespace detail

/// integral of d(alpha) over the cells == anticlockwise boundary sum.
inline CheckReport check_stokes(const Form1& a, const GridTiling& t, double tol = 1e-9) {
    const double lhs = integrate2(exterior_d(a), t);
    const double rhs = boundary_sum(a, t);
    return detail::make_report("stokes", "integral of d(alpha)", lhs, "boundary sum", rhs, tol);
}

/// integral of delta(alpha) over the cells == half the sum of the four
/// directed side sums (B->A, B->C, D->C, D->A).
inline CheckReport check_relative_ftc(const Form1& a, const GridTiling& t, double tol = 1e-9) {
    const double lhs = integrate2(delta(a), t);
    const SideSums s = side_sums(a, t);
    const double rhs = 0.5 * s.total();
    CheckReport rep = detail::make_report("relative-ftc", "integral of delta(alpha)", lhs,
                                          "half sum of side sums", rhs, tol);
    rep.sides = s;
    return rep;
}

/// integral of delta2(F) over the cells == the alternating corner sum
/// F(C) - F(D) + F(A) - F(B) at the marked corners.
inline CheckReport check_ftc2d(const Form0& F, const GridTiling& t, double tol = 1e-9) {
    const double lhs = integrate2(delta2(F), t);
    const double rhs = F(t.corner_c()) - F(t.corner_d()) + F(t.corner_a()) - F(t.corner_b());
    return detail::make_report("ftc2d", "integral of delta2(F)", lhs, "corner sum", rhs, tol);
}

struct ConvergenceRow {
    int m = 0, n = 0;
    double riemann = 0.0, corner = 0.0, abs_error = 0.0;
    std::optional<double> order;
};

struct ConvergenceReport {
    std::vector<ConvergenceRow> rows;
    double corner = 0.0;
    std::optional<double> fitted_order;
    bool exact = false;
    bool monotone = false;
    bool pass = false;
    double order_threshold = 0.8;
};

/// Riemann sums of the density f = d2 d1 F (sampled at each cell's V0)
/// against the corner formula, with per-step and least-squares
/// convergence orders. First-order convergence is the expectation for
/// smooth nonlinear F; bilinear F is reproduced exactly.
inline ConvergenceReport check_riemann_convergence(const Form0& F, const RectDomain& dom,
                                                   std::span<const std::pair<int, int>> grids,
                                                   double order_threshold = 0.8) {
    if (grids.empty()) throw Error("check_riemann_convergence: need at least one grid");
    if (F.dim() > 2) throw Error("check_riemann_convergence: F must be a function on R^2");
    const Expr& fe = *F.field().component(0);

    ConvergenceReport rep;
    rep.order_threshold = order_threshold;
    {
        const RealVec cc = {dom.a2, dom.b2}, cd = {dom.a1, dom.b2};
        const RealVec ca = {dom.a1, dom.b1}, cb = {dom.a2, dom.b1};
        rep.corner = F(cc) - F(cd) + F(ca) - F(cb);
    }

    const int axes[2] = {1, 2};
    for (const auto& [m, n] : grids) {
        if (m < 1 || n < 1) throw Error("check_riemann_convergence: grid sizes must be >= 1");
        const double hx = dom.width() / m;
        const double hy = dom.height() / n;
        std::vector<double> vals;
        vals.reserve(static_cast<std::size_t>(m) * static_cast<std::size_t>(n));
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < m; ++i) {
                const double x0 = dom.a1 + i * hx, x1 = dom.a1 + (i + 1) * hx;
                const double y0 = dom.b1 + j * hy, y1 = dom.b1 + (j + 1) * hy;
                const double p[2] = {x0, y0};
                const double f = mixed_partial(fe, axes, std::span<const double>(p, 2));
                vals.push_back(f * ((x1 - x0) * (y1 - y0)));
            }
        ConvergenceRow row;
        row.m = m;
        row.n = n;
        row.riemann = pairwise_sum(vals);
        row.corner = rep.corner;
        row.abs_error = std::abs(row.riemann - rep.corner);
        if (!rep.rows.empty()) {
            const ConvergenceRow& prev = rep.rows.back();
            const double n_prev = std::sqrt(static_cast<double>(prev.m) * prev.n);
            const double n_cur = std::sqrt(static_cast<double>(m) * n);
            if (prev.abs_error > 0.0 && row.abs_error > 0.0 && n_cur > n_prev)
                row.order = std::log(prev.abs_error / row.abs_error) / std::log(n_cur / n_prev);
        }
        rep.rows.push_back(row);
    }

    const double tiny = 1e-12 * (1.0 + std::abs(rep.corner));
    rep.exact = true;
    rep.monotone = true;
    for (std::size_t k = 0; k < rep.rows.size(); ++k) {
        if (rep.rows[k].abs_error > tiny) rep.exact = false;
        if (k > 0 && rep.rows[k].abs_error > rep.rows[k - 1].abs_error * (1.0 + 1e-9))
            rep.monotone = false;
    }

    // Least-squares slope of log(error) against log(cells-per-axis),
    // negated so a positive number is a convergence order.
    {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        int cnt = 0;
        for (const auto& row : rep.rows) {
            if (row.abs_error <= 0.0) continue;
            const double lx = std::log(std::sqrt(static_cast<double>(row.m) * row.n));
            const double ly = std::log(row.abs_error);
            sx += lx;
            sy += ly;
            sxx += lx * lx;
            sxy += lx * ly;
            ++cnt;
        }
        const double denom = cnt * sxx - sx * sx;
        if (cnt >= 2 && denom != 0.0) rep.fitted_order = -(cnt * sxy - sx * sy) / denom;
    }

    rep.pass = rep.exact ||
               (rep.monotone && rep.fitted_order.has_value() &&
                *rep.fitted_order >= order_threshold);
    return rep;
}

struct PullbackReport {
    Character declared;
    ClassifyResult classification;
    double tol = 0.0;
    bool pass = false;
};

/// Pulls omega back through the patch and re-classifies it on symbolic
/// quads in the patch's domain; passes when the declared character of
/// omega is among the detected ones.
inline PullbackReport check_pullback_type(const Form2& w, const FieldSpec& phi,
                                          std::span<const SymbolicQuad> samples,
                                          double tol = 1e-8) {
    if (!w.declared_character())
        throw Error("check_pullback_type: the form needs a declared character");
    for (const auto& q : samples)
        if (q.dim() != phi.dim())
            throw Error("check_pullback_type: sample quads must live in the patch domain");
    PullbackReport rep;
    rep.declared = *w.declared_character();
    rep.tol = tol;
    rep.classification = classify(pullback(w, phi), samples, tol);
    rep.pass = rep.classification.has(rep.declared.name);
    return rep;
}

}  // namespace quadforms
