#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "quadforms/error.hpp"
#include "quadforms/field.hpp"
#include "quadforms/quad.hpp"
#include "quadforms/random.hpp"
#include "quadforms/weil.hpp"

namespace quadforms {

/// Scalar function of position, evaluable at real and Weil points.
class Form0 {
public:
    explicit Form0(FieldSpec f) : f_(std::move(f)) {
        if (f_.kind() != FieldKind::Scalar) throw Error("Form0 needs a scalar field");
    }
    static Form0 from_text(std::string_view src, int dim = -1) {
        return Form0(FieldSpec::scalar(src, dim));
    }

    const FieldSpec& field() const { return f_; }
    int dim() const { return f_.dim(); }

    double operator()(std::span<const double> p) const { return f_.eval_scalar<double>(p); }
    WeilNumber operator()(std::span<const WeilNumber> p) const {
        return f_.eval_scalar<WeilNumber>(p);
    }

private:
    FieldSpec f_;
};

namespace detail {

template <class S>
std::vector<S> sub(std::span<const S> a, std::span<const S> b) {
    std::vector<S> out;
    out.reserve(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out.push_back(a[i] - b[i]);
    return out;
}

template <class S>
std::vector<S> add(std::span<const S> a, std::span<const S> b) {
    std::vector<S> out;
    out.reserve(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out.push_back(a[i] + b[i]);
    return out;
}

template <class S>
S averaged_pairing(const FieldSpec& X, std::span<const S> P, std::span<const S> Q) {
    const auto XP = X.template eval_vector<S>(P);
    const auto XQ = X.template eval_vector<S>(Q);
    S acc(0.0);
    for (std::size_t i = 0; i < P.size(); ++i)
        acc = acc + (0.5 * (XP[i] + XQ[i])) * (Q[i] - P[i]);
    return acc;
}

}  // namespace detail

/// Map on neighbor pairs (P,Q). Backed by a vector field through the
/// endpoint-averaged pairing (1/2)(X(P)+X(Q)).(Q-P) — which is exactly
/// alternating on finite pairs and agrees with X(P).(Q-P) to first
/// order — by the difference of a potential, or by a user pair map.
class Form1 {
public:
    using RealPairFn = std::function<double(std::span<const double>, std::span<const double>)>;
    using WeilPairFn =
        std::function<WeilNumber(std::span<const WeilNumber>, std::span<const WeilNumber>)>;

    static Form1 from_vector_field(FieldSpec X) {
        if (X.kind() != FieldKind::Vector || X.components() != X.dim())
            throw Error("Form1 needs a square vector field (components == dimension)");
        Form1 a;
        a.X_ = std::move(X);
        return a;
    }

    static Form1 from_potential(Form0 F) {
        Form1 a;
        a.F_ = std::move(F);
        return a;
    }

    static Form1 blackbox(RealPairFn re, WeilPairFn we = nullptr) {
        if (!re) throw Error("blackbox Form1 needs at least a real pair map");
        Form1 a;
        a.re_ = std::move(re);
        a.we_ = std::move(we);
        return a;
    }

    double eval(std::span<const double> P, std::span<const double> Q) const {
        if (X_) return detail::averaged_pairing<double>(*X_, P, Q);
        if (F_) return (*F_)(Q) - (*F_)(P);
        return re_(P, Q);
    }

    WeilNumber eval(std::span<const WeilNumber> P, std::span<const WeilNumber> Q) const {
        if (X_) return detail::averaged_pairing<WeilNumber>(*X_, P, Q);
        if (F_) return (*F_)(Q) - (*F_)(P);
        if (!we_) throw Error("blackbox Form1 has no Weil evaluation path");
        return we_(P, Q);
    }

    bool has_weil() const { return X_ || F_ || static_cast<bool>(we_); }

private:
    Form1() = default;
    std::optional<FieldSpec> X_;
    std::optional<Form0> F_;
    RealPairFn re_;
    WeilPairFn we_;
};

inline Form1 delta0(const Form0& F) { return Form1::from_potential(F); }

/// Map on quads, with dual evaluation paths and an optional declared
/// character used by integration's admission rule.
class Form2 {
public:
    using RealFn = std::function<double(const FiniteQuad&)>;
    using WeilFn = std::function<WeilNumber(const SymbolicQuad&)>;

    Form2(RealFn re, WeilFn we, std::optional<Character> declared = std::nullopt)
        : re_(std::move(re)), we_(std::move(we)), declared_(declared) {}

    static Form2 zero() {
        return Form2([](const FiniteQuad&) { return 0.0; },
                     [](const SymbolicQuad&) { return WeilNumber(0.0); });
    }

    double eval(const FiniteQuad& q) const {
        if (!re_) throw Error("Form2 has no real evaluation path");
        return re_(q);
    }
    WeilNumber eval(const SymbolicQuad& q) const {
        if (!we_) throw Error("Form2 has no Weil evaluation path");
        return we_(q);
    }

    const std::optional<Character>& declared_character() const { return declared_; }

private:
    RealFn re_;
    WeilFn we_;
    std::optional<Character> declared_;
};

/// Horizontal difference: alpha(V1,V2) - alpha(V0,V3).
inline Form2 delta_h(const Form1& a) {
    return Form2(
        [a](const FiniteQuad& q) { return a.eval(q.v[1], q.v[2]) - a.eval(q.v[0], q.v[3]); },
        [a](const SymbolicQuad& q) { return a.eval(q.v[1], q.v[2]) - a.eval(q.v[0], q.v[3]); });
}

/// Vertical difference: alpha(V3,V2) - alpha(V0,V1).
inline Form2 delta_v(const Form1& a) {
    return Form2(
        [a](const FiniteQuad& q) { return a.eval(q.v[3], q.v[2]) - a.eval(q.v[0], q.v[1]); },
        [a](const SymbolicQuad& q) { return a.eval(q.v[3], q.v[2]) - a.eval(q.v[0], q.v[1]); });
}

/// Symmetrized difference (1/2)(delta_h + delta_v): the directly
/// integrable combination.
inline Form2 delta(const Form1& a) {
    return Form2(
        [a](const FiniteQuad& q) {
            return 0.5 * ((a.eval(q.v[1], q.v[2]) - a.eval(q.v[0], q.v[3])) +
                          (a.eval(q.v[3], q.v[2]) - a.eval(q.v[0], q.v[1])));
        },
        [a](const SymbolicQuad& q) {
            return 0.5 * ((a.eval(q.v[1], q.v[2]) - a.eval(q.v[0], q.v[3])) +
                          (a.eval(q.v[3], q.v[2]) - a.eval(q.v[0], q.v[1])));
        },
        Character::leibniz_fubini());
}

/// Boundary differential: the oriented sum of alpha around the quad,
/// alpha(V0,V1) + alpha(V1,V2) + alpha(V2,V3) + alpha(V3,V0).
inline Form2 exterior_d(const Form1& a) {
    return Form2(
        [a](const FiniteQuad& q) {
            return a.eval(q.v[0], q.v[1]) + a.eval(q.v[1], q.v[2]) + a.eval(q.v[2], q.v[3]) +
                   a.eval(q.v[3], q.v[0]);
        },
        [a](const SymbolicQuad& q) {
            return a.eval(q.v[0], q.v[1]) + a.eval(q.v[1], q.v[2]) + a.eval(q.v[2], q.v[3]) +
                   a.eval(q.v[3], q.v[0]);
        },
        Character::cartan());
}

/// delta(delta0(F)) collapsed to its corner form
/// F(V2) - F(V3) + F(V0) - F(V1).
inline Form2 delta2(const Form0& F) {
    return Form2(
        [F](const FiniteQuad& q) {
            return F(q.v[2]) - F(q.v[3]) + F(q.v[0]) - F(q.v[1]);
        },
        [F](const SymbolicQuad& q) {
            return F(q.v[2]) - F(q.v[3]) + F(q.v[0]) - F(q.v[1]);
        },
        Character::leibniz_fubini());
}

inline const std::array<Character, 3>& nontrivial_characters() {
    static const std::array<Character, 3> cs = {
        Character::cartan(), Character::leibniz_fubini(), Character::nieuwentijdt()};
    return cs;
}

struct ClassifyResult {
    std::vector<Character> characters;                       // matched set
    std::array<double, 3> max_residual{};                    // [Cartan, LF, Nieuwentijdt]
    std::array<std::array<double, 8>, 3> element_residual{};  // [character][Dih4 index]
    double tol = 0.0;

    bool has(Character::Name n) const {
        for (const auto& c : characters)
            if (c.name == n) return true;
        return false;
    }
};

/// Tests omega(act(t,q)) = sigma(t) * omega(q) coefficient-wise for all
/// eight relabelings over the sample quads; a character matches when its
/// worst residual stays within tol. The zero map matches all three.
inline ClassifyResult classify(const Form2& w, std::span<const SymbolicQuad> samples,
                               double tol = 1e-9) {
    if (samples.empty()) throw Error("classify: need at least one sample quad");
    ClassifyResult res;
    res.tol = tol;
    for (const auto& q : samples) {
        const WeilNumber base = w.eval(q);
        for (int ti = 0; ti < Dih4::kOrder; ++ti) {
            const Dih4 t = Dih4::element(ti);
            const WeilNumber transformed = w.eval(act(t, q));
            for (int ci = 0; ci < 3; ++ci) {
                const double sgn = nontrivial_characters()[static_cast<std::size_t>(ci)].value(t);
                const double r = relative_residual(transformed, sgn * base);
                auto& cell = res.element_residual[static_cast<std::size_t>(ci)]
                                                 [static_cast<std::size_t>(ti)];
                cell = std::max(cell, r);
            }
        }
    }
    for (int ci = 0; ci < 3; ++ci) {
        double worst = 0.0;
        for (double r : res.element_residual[static_cast<std::size_t>(ci)])
            worst = std::max(worst, r);
        res.max_residual[static_cast<std::size_t>(ci)] = worst;
        if (worst <= tol)
            res.characters.push_back(nontrivial_characters()[static_cast<std::size_t>(ci)]);
    }
    return res;
}

/// Character-table classification of a quad map known only through its
/// values on full orbits: row[i] = omega(act(t_i, q)) in Dih4 element
/// order e, r, r2, r3, s, rs, r2s, r3s.
inline ClassifyResult classify_table(std::span<const std::array<double, 8>> rows, double tol = 1e-9) {
    if (rows.empty()) throw Error("classify_table: need at least one orbit row");
    ClassifyResult res;
    res.tol = tol;
    for (const auto& row : rows) {
        double scale = 0.0;
        for (double x : row) scale = std::max(scale, std::abs(x));
        for (int ti = 0; ti < Dih4::kOrder; ++ti) {
            for (int ci = 0; ci < 3; ++ci) {
                const double sgn =
                    nontrivial_characters()[static_cast<std::size_t>(ci)].value(Dih4::element(ti));
                const double r = std::abs(row[static_cast<std::size_t>(ti)] - sgn * row[0]) /
                                 (1.0 + scale);
                auto& cell = res.element_residual[static_cast<std::size_t>(ci)]
                                                 [static_cast<std::size_t>(ti)];
                cell = std::max(cell, r);
            }
        }
    }
    for (int ci = 0; ci < 3; ++ci) {
        double worst = 0.0;
        for (double r : res.element_residual[static_cast<std::size_t>(ci)])
            worst = std::max(worst, r);
        res.max_residual[static_cast<std::size_t>(ci)] = worst;
        if (worst <= tol)
            res.characters.push_back(nontrivial_characters()[static_cast<std::size_t>(ci)]);
    }
    return res;
}

/// Isotypic averaging (1/8) sum_t sigma(t) omega(act(t,q)); idempotent,
/// and the output is sigma-equivariant (or zero).
inline Form2 project(const Form2& w, const Character& sigma) {
    auto re = [w, sigma](const FiniteQuad& q) {
        double acc = 0.0;
        for (int ti = 0; ti < Dih4::kOrder; ++ti) {
            const Dih4 t = Dih4::element(ti);
            acc += sigma.value(t) * w.eval(act(t, q));
        }
        return acc / 8.0;
    };
    auto we = [w, sigma](const SymbolicQuad& q) {
        WeilNumber acc = static_cast<double>(sigma.value(Dih4::identity())) * w.eval(q);
        for (int ti = 1; ti < Dih4::kOrder; ++ti) {
            const Dih4 t = Dih4::element(ti);
            acc = acc + static_cast<double>(sigma.value(t)) * w.eval(act(t, q));
        }
        return acc / 8.0;
    };
    std::optional<Character> declared;
    if (sigma.name != Character::Name::Trivial) declared = sigma;
    return Form2(std::move(re), std::move(we), declared);
}

namespace detail {

inline void check_entry_pattern(const FieldSpec& b, bool want_alternating, double tol,
                                const char* who) {
    Rng rng(kDefaultSeed);
    const int n = b.dim();
    for (int sample = 0; sample < 9; ++sample) {
        RealVec p = sample == 0 ? RealVec(static_cast<std::size_t>(n), 0.0)
                                : random_point(rng, n);
        std::vector<double> e(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
        double scale = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double x = eval_real(*b.entry(i, j), p);
                e[static_cast<std::size_t>(i * n + j)] = x;
                scale = std::max(scale, std::abs(x));
            }
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const double lhs = e[static_cast<std::size_t>(i * n + j)];
                const double rhs = e[static_cast<std::size_t>(j * n + i)];
                const double bad = want_alternating ? std::abs(lhs + rhs) : std::abs(lhs - rhs);
                if (bad > tol * (1.0 + scale))
                    throw Error(std::string(who) + ": bilinear field is not " +
                                (want_alternating ? "alternating" : "symmetric") +
                                " at a sampled point");
            }
    }
}

}  // namespace detail

/// omega(q) = b at V0 applied to (V1 - V3, V2 - V0); b must be
/// alternating. Rotation-invariant and reflection-odd.
inline Form2 cartan_from_bilinear(FieldSpec b, double tol = 1e-9) {
    if (b.kind() != FieldKind::Bilinear)
        throw Error("cartan_from_bilinear needs a bilinear field");
    detail::check_entry_pattern(b, /*want_alternating=*/true, tol, "cartan_from_bilinear");
    auto re = [b](const FiniteQuad& q) {
        const auto v = detail::sub<double>(q.v[1], q.v[3]);
        const auto w2 = detail::sub<double>(q.v[2], q.v[0]);
        return b.eval_bilinear<double>(q.v[0], v, w2);
    };
    auto we = [b](const SymbolicQuad& q) {
        const auto v = detail::sub<WeilNumber>(q.v[1], q.v[3]);
        const auto w2 = detail::sub<WeilNumber>(q.v[2], q.v[0]);
        return b.eval_bilinear<WeilNumber>(q.v[0], v, w2);
    };
    return Form2(std::move(re), std::move(we), Character::cartan());
}

namespace detail {

/// Directional derivative along v of the linear pairing x -> A_x[w],
/// taken at real P with one fresh generator.
inline double dA_real(const FieldSpec& A, std::span<const double> P, const RealVec& v,
                      const RealVec& w) {
    WeilVec pe;
    pe.reserve(P.size());
    for (std::size_t j = 0; j < P.size(); ++j)
        pe.push_back(WeilNumber::constant(P[j], 1) + WeilNumber::generator(0, 1) * v[j]);
    WeilNumber acc(0.0);
    for (int i = 0; i < A.components(); ++i)
        acc = acc + eval_weil(*A.component(i), pe) * w[static_cast<std::size_t>(i)];
    return acc.coeff(1);
}

/// Same with P, v, w already Weil-valued: a third generator carries the
/// direction, and its coefficient is read back in the original context.
inline WeilNumber dA_weil(const FieldSpec& A, const WeilVec& P, const WeilVec& v,
                          const WeilVec& w) {
    WeilVec pe;
    pe.reserve(P.size());
    for (std::size_t j = 0; j < P.size(); ++j)
        pe.push_back(P[j].extended(3) + WeilNumber::generator(2, 3) * v[j].extended(3));
    WeilNumber acc = WeilNumber::zero(3);
    for (int i = 0; i < A.components(); ++i)
        acc = acc + eval_weil(*A.component(i), pe) * w[static_cast<std::size_t>(i)].extended(3);
    return acc.top_coefficient();
}

}  // namespace detail

/// The linear-plus-quadratic display
///   omega(q) = A_{V0}[(V2-V3) + (V0-V1)]
///            + (1/2)(dA_{V0}[V1-V0, V2-V1] + dA_{V0}[V3-V0, V2-V3])
///            + a_{V0}[V2-V0, V2-V0] - a_{V0}[V1-V3, V1-V3]
/// where dA_P[v,w] is the derivative of x -> A_x[w] along v.
inline Form2 lf_from_A_a(FieldSpec A, FieldSpec a) {
    if (A.kind() != FieldKind::Vector || A.components() != A.dim())
        throw Error("lf_from_A_a: A must be a square linear-form field");
    if (a.kind() != FieldKind::Bilinear || a.dim() != A.dim())
        throw Error("lf_from_A_a: a must be a bilinear field of matching dimension");
    auto re = [A, a](const FiniteQuad& q) {
        const auto& V = q.v;
        const RealVec arg1 =
            detail::add<double>(detail::sub<double>(V[2], V[3]), detail::sub<double>(V[0], V[1]));
        const auto AP = A.eval_vector<double>(V[0]);
        double t1 = 0.0;
        for (std::size_t i = 0; i < AP.size(); ++i) t1 += AP[i] * arg1[i];
        const double t2 =
            0.5 * (detail::dA_real(A, V[0], detail::sub<double>(V[1], V[0]),
                                   detail::sub<double>(V[2], V[1])) +
                   detail::dA_real(A, V[0], detail::sub<double>(V[3], V[0]),
                                   detail::sub<double>(V[2], V[3])));
        const RealVec d20 = detail::sub<double>(V[2], V[0]);
        const RealVec d13 = detail::sub<double>(V[1], V[3]);
        const double t3 = a.eval_bilinear<double>(V[0], d20, d20) -
                          a.eval_bilinear<double>(V[0], d13, d13);
        return t1 + t2 + t3;
    };
    auto we = [A, a](const SymbolicQuad& q) {
        const auto& V = q.v;
        const WeilVec arg1 = detail::add<WeilNumber>(detail::sub<WeilNumber>(V[2], V[3]),
                                                     detail::sub<WeilNumber>(V[0], V[1]));
        const auto AP = A.eval_vector<WeilNumber>(V[0]);
        WeilNumber t1(0.0);
        for (std::size_t i = 0; i < AP.size(); ++i) t1 = t1 + AP[i] * arg1[i];
        const WeilNumber t2 =
            0.5 * (detail::dA_weil(A, V[0], detail::sub<WeilNumber>(V[1], V[0]),
                                   detail::sub<WeilNumber>(V[2], V[1])) +
                   detail::dA_weil(A, V[0], detail::sub<WeilNumber>(V[3], V[0]),
                                   detail::sub<WeilNumber>(V[2], V[3])));
        const WeilVec d20 = detail::sub<WeilNumber>(V[2], V[0]);
        const WeilVec d13 = detail::sub<WeilNumber>(V[1], V[3]);
        const WeilNumber t3 = a.eval_bilinear<WeilNumber>(V[0], d20, d20) -
                              a.eval_bilinear<WeilNumber>(V[0], d13, d13);
        return t1 + t2 + t3;
    };
    return Form2(std::move(re), std::move(we), Character::leibniz_fubini());
}

/// omega(q) = b at V0 applied to (V1-V0, V3-V0); b must be symmetric and
/// the quad an (infinitesimal) parallelogram — (V2-V1) must equal
/// (V3-V0).
inline Form2 lf_parallelogram_form(FieldSpec b, double tol = 1e-9) {
    if (b.kind() != FieldKind::Bilinear)
        throw Error("lf_parallelogram_form needs a bilinear field");
    detail::check_entry_pattern(b, /*want_alternating=*/false, tol, "lf_parallelogram_form");
    auto re = [b, tol](const FiniteQuad& q) {
        const auto e1 = detail::sub<double>(q.v[1], q.v[0]);
        const auto e2 = detail::sub<double>(q.v[3], q.v[0]);
        double scale = 0.0, gap = 0.0;
        for (std::size_t i = 0; i < e1.size(); ++i) {
            scale = std::max({scale, std::abs(e1[i]), std::abs(e2[i])});
            gap = std::max(gap, std::abs((q.v[2][i] - q.v[1][i]) - e2[i]));
        }
        if (gap > tol * (1.0 + scale))
            throw DomainError("lf_parallelogram_form: quad is not a parallelogram");
        return b.eval_bilinear<double>(q.v[0], e1, e2);
    };
    auto we = [b, tol](const SymbolicQuad& q) {
        const auto e1 = detail::sub<WeilNumber>(q.v[1], q.v[0]);
        const auto e2 = detail::sub<WeilNumber>(q.v[3], q.v[0]);
        double scale = 0.0, gap = 0.0;
        for (std::size_t i = 0; i < e1.size(); ++i) {
            scale = std::max({scale, e1[i].max_abs_coeff(), e2[i].max_abs_coeff()});
            gap = std::max(gap, ((q.v[2][i] - q.v[1][i]) - e2[i]).max_abs_coeff());
        }
        if (gap > tol * (1.0 + scale))
            throw DomainError("lf_parallelogram_form: quad is not a parallelogram");
        return b.eval_bilinear<WeilNumber>(q.v[0], e1, e2);
    };
    return Form2(std::move(re), std::move(we), Character::leibniz_fubini());
}

/// Precomposition with a patch: vertices map through phi over the same
/// scalars, so symbolic quads stay two-generator symbolic quads and the
/// neighbor structure is preserved on the nose.
inline Form2 pullback(const Form2& w, FieldSpec phi) {
    if (phi.kind() != FieldKind::Vector) throw Error("pullback needs a vector-field patch");
    auto re = [w, phi](const FiniteQuad& q) {
        FiniteQuad out;
        for (int k = 0; k < 4; ++k)
            out.v[static_cast<std::size_t>(k)] =
                phi.eval_vector<double>(q.v[static_cast<std::size_t>(k)]);
        return w.eval(out);
    };
    auto we = [w, phi](const SymbolicQuad& q) {
        SymbolicQuad out;
        for (int k = 0; k < 4; ++k)
            out.v[static_cast<std::size_t>(k)] =
                phi.eval_vector<WeilNumber>(q.v[static_cast<std::size_t>(k)]);
        return w.eval(out);
    };
    return Form2(std::move(re), std::move(we), w.declared_character());
}

/// Worst |alpha(P,Q) + alpha(Q,P)| over random pairs, scale-relative;
/// the sampled alternation test for black-box pair maps.
inline double max_alternation_residual(const Form1& a, int dim, int samples = 32,
                                       std::uint64_t seed = kDefaultSeed) {
    Rng rng(seed);
    double worst = 0.0;
    for (int i = 0; i < samples; ++i) {
        const RealVec P = random_point(rng, dim);
        const RealVec Q = random_point(rng, dim);
        const double pq = a.eval(P, Q);
        const double qp = a.eval(Q, P);
        worst = std::max(worst, std::abs(pq + qp) / (1.0 + std::max(std::abs(pq), std::abs(qp))));
    }
    return worst;
}

}  // namespace quadforms
