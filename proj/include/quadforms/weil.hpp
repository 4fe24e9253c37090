#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "quadforms/error.hpp"

namespace quadforms {

/// Element of R[e1..ek] with e_i^2 = 0 for every generator e_i.
///
/// Coefficients are stored densely, indexed by subsets of {e1..ek} packed
/// as bitmasks: coeff(m) is the coefficient of the product of the
/// generators whose bits are set in m. coeff(0) is the real part. A
/// number with k == 0 is exactly a real number; reals convert implicitly
/// and are lifted into the other operand's generator context on use.
///
/// Values are immutable after construction; all operations are pure.
class WeilNumber {
public:
    static constexpr int kMaxGenerators = 8;

    WeilNumber() : gens_(0), c_(1, 0.0) {}
    /*implicit*/ WeilNumber(double x) : gens_(0), c_(1, x) {}

    /// The real number `x` embedded in a context with `generators` generators.
    static WeilNumber constant(double x, int generators) {
        WeilNumber w = zero(generators);
        w.c_[0] = x;
        return w;
    }

    /// The generator e_{i+1} (0-based index i) in a context of `generators`.
    static WeilNumber generator(int i, int generators) {
        WeilNumber w = zero(generators);
        if (i < 0 || i >= generators)
            throw Error("generator index " + std::to_string(i) +
                        " outside context of " + std::to_string(generators));
        w.c_[std::size_t{1} << i] = 1.0;
        return w;
    }

    static WeilNumber zero(int generators) {
        check_budget(generators);
        WeilNumber w;
        w.gens_ = generators;
        w.c_.assign(std::size_t{1} << generators, 0.0);
        return w;
    }

    int generators() const noexcept { return gens_; }
    std::size_t size() const noexcept { return c_.size(); }
    double real() const noexcept { return c_[0]; }

    double coeff(std::size_t mask) const {
        return mask < c_.size() ? c_[mask] : 0.0;
    }
    std::span<const double> coeffs() const noexcept { return c_; }

    /// True when every non-real coefficient is exactly zero.
    bool nilpotent_part_is_zero() const noexcept {
        for (std::size_t m = 1; m < c_.size(); ++m)
            if (c_[m] != 0.0) return false;
        return true;
    }

    double max_abs_coeff() const noexcept {
        double a = 0.0;
        for (double x : c_) a = std::max(a, std::abs(x));
        return a;
    }

    /// Embeds into a wider context; existing subsets keep their coefficients.
    WeilNumber extended(int generators) const {
        if (generators < gens_)
            throw Error("cannot shrink generator context");
        WeilNumber w = zero(generators);
        for (std::size_t m = 0; m < c_.size(); ++m) w.c_[m] = c_[m];
        return w;
    }

    /// The coefficient of the last generator, as a number one context down:
    /// for w in R[e1..ek], returns sum over S not containing e_k of
    /// w[S + e_k] * prod(S) in R[e1..e_{k-1}].
    WeilNumber top_coefficient() const {
        if (gens_ == 0) throw Error("top_coefficient of a real number");
        WeilNumber w = zero(gens_ - 1);
        const std::size_t top = std::size_t{1} << (gens_ - 1);
        for (std::size_t m = 0; m < w.c_.size(); ++m) w.c_[m] = c_[m | top];
        return w;
    }

    friend bool operator==(const WeilNumber& a, const WeilNumber& b) {
        return a.gens_ == b.gens_ && a.c_ == b.c_;
    }

    friend WeilNumber operator+(const WeilNumber& a, const WeilNumber& b) {
        auto [x, y] = aligned(a, b);
        for (std::size_t m = 0; m < x.c_.size(); ++m) x.c_[m] += y.c_[m];
        return x;
    }

    friend WeilNumber operator-(const WeilNumber& a, const WeilNumber& b) {
        auto [x, y] = aligned(a, b);
        for (std::size_t m = 0; m < x.c_.size(); ++m) x.c_[m] -= y.c_[m];
        return x;
    }

    friend WeilNumber operator-(const WeilNumber& a) {
        WeilNumber w = a;
        for (double& x : w.c_) x = -x;
        return w;
    }

    /// Disjoint-subset convolution: products touching any generator twice
    /// vanish, so only pairs of disjoint subsets contribute.
    friend WeilNumber operator*(const WeilNumber& a, const WeilNumber& b) {
        auto [x, y] = aligned(a, b);
        WeilNumber out = zero(x.gens_);
        for (std::size_t u = 0; u < out.c_.size(); ++u) {
            double acc = 0.0;
            std::size_t s = u;
            for (;;) {
                acc += x.c_[s] * y.c_[u ^ s];
                if (s == 0) break;
                s = (s - 1) & u;
            }
            out.c_[u] = acc;
        }
        return out;
    }

    friend WeilNumber operator/(const WeilNumber& a, const WeilNumber& b) {
        auto [x, y] = aligned(a, b);
        if (y.c_[0] == 0.0) {
            if (y.nilpotent_part_is_zero()) throw DomainError("division by zero");
            throw DomainError("division by a number with zero real part");
        }
        // Triangular back-substitution on q * y = x, masks in increasing
        // order; q[0] comes out as x[0]/y[0] with a single fp division.
        WeilNumber q = zero(x.gens_);
        for (std::size_t u = 0; u < q.c_.size(); ++u) {
            double acc = x.c_[u];
            if (u != 0) {
                std::size_t s = (u - 1) & u;  // largest proper submask
                for (;;) {
                    acc -= q.c_[s] * y.c_[u ^ s];
                    if (s == 0) break;
                    s = (s - 1) & u;
                }
            }
            q.c_[u] = acc / y.c_[0];
        }
        return q;
    }

    friend WeilNumber operator+(const WeilNumber& a, double b) { return a + WeilNumber(b); }
    friend WeilNumber operator+(double a, const WeilNumber& b) { return WeilNumber(a) + b; }
    friend WeilNumber operator-(const WeilNumber& a, double b) { return a - WeilNumber(b); }
    friend WeilNumber operator-(double a, const WeilNumber& b) { return WeilNumber(a) - b; }
    friend WeilNumber operator*(const WeilNumber& a, double b) {
        WeilNumber w = a;
        for (double& x : w.c_) x *= b;
        return w;
    }
    friend WeilNumber operator*(double a, const WeilNumber& b) { return b * a; }
    friend WeilNumber operator/(const WeilNumber& a, double b) { return a / WeilNumber(b); }
    friend WeilNumber operator/(double a, const WeilNumber& b) { return WeilNumber(a) / b; }

private:
    static void check_budget(int generators) {
        if (generators < 0 || generators > kMaxGenerators)
            throw Error("generator budget exceeded: " + std::to_string(generators) +
                        " (max " + std::to_string(kMaxGenerators) + ")");
    }

    /// Equal contexts pass through; a real operand is lifted into the other
    /// context; two distinct non-real contexts are an error.
    static std::pair<WeilNumber, WeilNumber> aligned(const WeilNumber& a,
                                                     const WeilNumber& b) {
        if (a.gens_ == b.gens_) return {a, b};
        if (a.gens_ == 0) return {a.extended(b.gens_), b};
        if (b.gens_ == 0) return {a, b.extended(a.gens_)};
        throw Error("mismatched generator contexts: " + std::to_string(a.gens_) +
                    " vs " + std::to_string(b.gens_));
    }

    int gens_;
    std::vector<double> c_;
};

/// Integer powers by binary squaring; exact on nilpotents (no Taylor
/// series involved), so e.g. squaring a pure infinitesimal gives 0.
/// Shared with the plain double evaluator to keep both paths bit-identical.
template <class S>
S pow_int(const S& base, int exponent) {
    if (exponent < 0) {
        return pow_int(S(1.0) / base, -exponent);
    }
    S result(1.0);
    S b = base;
    int e = exponent;
    while (e > 0) {
        if (e & 1) result = result * b;
        b = b * b;
        e >>= 1;
    }
    return result;
}

namespace detail {

/// sum_{j<=k} c[j] * n^j with n the nilpotent part, evaluated by Horner.
/// Exact: n^(k+1) = 0 in a k-generator context.
inline WeilNumber apply_series(const WeilNumber& w, std::span<const double> c) {
    const int k = w.generators();
    const WeilNumber n = w - WeilNumber::constant(w.real(), k);
    WeilNumber r = WeilNumber::constant(c[static_cast<std::size_t>(k)], k);
    for (int j = k - 1; j >= 0; --j)
        r = r * n + WeilNumber::constant(c[static_cast<std::size_t>(j)], k);
    return r;
}

} // namespace detail

inline WeilNumber sin(const WeilNumber& w) {
    const int k = w.generators();
    const double s = std::sin(w.real()), c = std::cos(w.real());
    const double cycle[4] = {s, c, -s, -c};
    std::vector<double> coef(static_cast<std::size_t>(k) + 1);
    double fact = 1.0;
    for (int j = 0; j <= k; ++j) {
        if (j > 0) fact *= j;
        coef[static_cast<std::size_t>(j)] = cycle[j % 4] / fact;
    }
    return detail::apply_series(w, coef);
}

inline WeilNumber cos(const WeilNumber& w) {
    const int k = w.generators();
    const double s = std::sin(w.real()), c = std::cos(w.real());
    const double cycle[4] = {c, -s, -c, s};
    std::vector<double> coef(static_cast<std::size_t>(k) + 1);
    double fact = 1.0;
    for (int j = 0; j <= k; ++j) {
        if (j > 0) fact *= j;
        coef[static_cast<std::size_t>(j)] = cycle[j % 4] / fact;
    }
    return detail::apply_series(w, coef);
}

inline WeilNumber exp(const WeilNumber& w) {
    const int k = w.generators();
    const double e = std::exp(w.real());
    std::vector<double> coef(static_cast<std::size_t>(k) + 1);
    double fact = 1.0;
    for (int j = 0; j <= k; ++j) {
        if (j > 0) fact *= j;
        coef[static_cast<std::size_t>(j)] = e / fact;
    }
    return detail::apply_series(w, coef);
}

inline WeilNumber log(const WeilNumber& w) {
    const double x = w.real();
    if (x <= 0.0) throw DomainError("ln of a non-positive real part");
    const int k = w.generators();
    std::vector<double> coef(static_cast<std::size_t>(k) + 1);
    coef[0] = std::log(x);
    double xj = 1.0;
    for (int j = 1; j <= k; ++j) {
        xj *= x;
        coef[static_cast<std::size_t>(j)] = ((j % 2) ? 1.0 : -1.0) / (j * xj);
    }
    return detail::apply_series(w, coef);
}

inline WeilNumber sqrt(const WeilNumber& w) {
    const double x = w.real();
    const int k = w.generators();
    if (k == 0 || w.nilpotent_part_is_zero()) {
        if (x < 0.0) throw DomainError("sqrt of a negative number");
        return WeilNumber::constant(std::sqrt(x), k);
    }
    if (x <= 0.0)
        throw DomainError("sqrt needs a positive real part under a nonzero infinitesimal");
    std::vector<double> coef(static_cast<std::size_t>(k) + 1);
    coef[0] = std::sqrt(x);
    // binom(1/2, j) * x^(1/2 - j)
    double binom = 1.0;
    double xj = 1.0;
    for (int j = 1; j <= k; ++j) {
        binom *= (0.5 - (j - 1)) / j;
        xj *= x;
        coef[static_cast<std::size_t>(j)] = binom * coef[0] / xj;
    }
    return detail::apply_series(w, coef);
}

/// Largest |a[m] - b[m]| over all subsets, scaled by 1 + the largest
/// coefficient magnitude of either operand. Reals lift into the other
/// operand's context, as everywhere else.
inline double relative_residual(const WeilNumber& a, const WeilNumber& b) {
    if (a.generators() != b.generators()) {
        if (a.generators() == 0) return relative_residual(a.extended(b.generators()), b);
        if (b.generators() == 0) return relative_residual(a, b.extended(a.generators()));
        throw Error("relative_residual: mismatched generator contexts");
    }
    double diff = 0.0;
    for (std::size_t m = 0; m < a.size(); ++m)
        diff = std::max(diff, std::abs(a.coeff(m) - b.coeff(m)));
    return diff / (1.0 + std::max(a.max_abs_coeff(), b.max_abs_coeff()));
}

inline bool approx_equal(const WeilNumber& a, const WeilNumber& b, double tol) {
    return relative_residual(a, b) <= tol;
}

inline std::string to_string(const WeilNumber& w) {
    std::ostringstream os;
    os.precision(17);
    bool first = true;
    for (std::size_t m = 0; m < w.size(); ++m) {
        if (w.coeff(m) == 0.0 && !(m == 0 && w.size() == 1)) continue;
        if (!first) os << " + ";
        os << w.coeff(m);
        for (int i = 0; i < w.generators(); ++i)
            if (m & (std::size_t{1} << i)) os << "*e" << (i + 1);
        first = false;
    }
    if (first) os << "0";
    return os.str();
}

inline std::ostream& operator<<(std::ostream& os, const WeilNumber& w) {
    return os << to_string(w);
}

/// Weil-valued point in R^n.
using WeilVec = std::vector<WeilNumber>;

/// D(n) membership: zero real parts and all pairwise entry products zero
/// (exactly, coefficient-wise).
inline bool is_first_order_displacement(std::span<const WeilNumber> d) {
    for (const auto& x : d)
        if (x.real() != 0.0) return false;
    for (std::size_t i = 0; i < d.size(); ++i)
        for (std::size_t j = 0; j < d.size(); ++j) {
            WeilNumber p = d[i] * d[j];
            if (p.max_abs_coeff() != 0.0) return false;
        }
    return true;
}

} // namespace quadforms
