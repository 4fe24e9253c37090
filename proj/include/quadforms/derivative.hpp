#pragma once

#include <algorithm>
#include <span>
#include <vector>

#include "quadforms/error.hpp"
#include "quadforms/expr.hpp"
#include "quadforms/weil.hpp"

namespace quadforms {

/// Exact mixed partial by nilpotent lifting: one fresh generator per
/// requested axis (1-based; repeats allowed), read off the coefficient
/// of the product of all generators. Axes are sorted first so that
/// permuted axis lists run the identical computation and agree
/// bit-for-bit.
inline double mixed_partial(const Expr& e, std::span<const int> axes,
                            std::span<const double> p) {
    std::vector<int> order(axes.begin(), axes.end());
    std::sort(order.begin(), order.end());
    const int k = static_cast<int>(order.size());
    if (k == 0) return eval_real(e, p);
    if (k > WeilNumber::kMaxGenerators)
        throw Error("mixed_partial: more axes than the generator budget allows");
    for (int a : order)
        if (a < 1 || a > static_cast<int>(p.size()))
            throw Error("mixed_partial: axis " + std::to_string(a) +
                        " outside point of dimension " + std::to_string(p.size()));
    WeilVec q;
    q.reserve(p.size());
    for (double x : p) q.push_back(WeilNumber::constant(x, k));
    for (int i = 0; i < k; ++i) {
        std::size_t j = static_cast<std::size_t>(order[static_cast<std::size_t>(i)]) - 1;
        q[j] = q[j] + WeilNumber::generator(i, k);
    }
    WeilNumber w = eval_weil(e, q);
    return w.coeff((std::size_t{1} << k) - 1);
}

inline double partial(const Expr& e, int axis, std::span<const double> p) {
    const int axes[1] = {axis};
    return mixed_partial(e, axes, p);
}

inline std::vector<double> gradient(const Expr& e, std::span<const double> p) {
    std::vector<double> g(p.size());
    for (std::size_t i = 0; i < p.size(); ++i)
        g[i] = partial(e, static_cast<int>(i) + 1, p);
    return g;
}

/// Symmetric by construction: entry (i,j) and (j,i) are the same
/// sorted-axes computation.
inline std::vector<std::vector<double>> hessian(const Expr& e, std::span<const double> p) {
    const std::size_t n = p.size();
    std::vector<std::vector<double>> h(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) {
            const int axes[2] = {static_cast<int>(i) + 1, static_cast<int>(j) + 1};
            h[i][j] = h[j][i] = mixed_partial(e, axes, p);
        }
    return h;
}

/// Nested central differences — the classical oracle the nilpotent path
/// is checked against.
inline double central_difference(const Expr& e, std::span<const int> axes,
                                 std::span<const double> p, double step = 1e-5) {
    if (axes.empty()) return eval_real(e, p);
    const int a = axes[0];
    if (a < 1 || a > static_cast<int>(p.size()))
        throw Error("central_difference: axis " + std::to_string(a) +
                    " outside point of dimension " + std::to_string(p.size()));
    std::vector<double> q(p.begin(), p.end());
    auto rest = axes.subspan(1);
    q[static_cast<std::size_t>(a) - 1] = p[static_cast<std::size_t>(a) - 1] + step;
    const double hi = central_difference(e, rest, q, step);
    q[static_cast<std::size_t>(a) - 1] = p[static_cast<std::size_t>(a) - 1] - step;
    const double lo = central_difference(e, rest, q, step);
    return (hi - lo) / (2.0 * step);
}

}  // namespace quadforms
