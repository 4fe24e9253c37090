#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "quadforms/error.hpp"
#include "quadforms/weil.hpp"

namespace quadforms {

using RealVec = std::vector<double>;

/// Four vertices in cyclic order: V0 bottom-left, V1 bottom-right,
/// V2 top-right, V3 top-left — consecutive vertices are edge-adjacent.
struct FiniteQuad {
    std::array<RealVec, 4> v;
    int dim() const { return static_cast<int>(v[0].size()); }
};

/// Same labeling with Weil-valued vertices. A quad built by
/// make_symbolic_quad keeps its (P,u,w,z) build record; relabeling
/// drops it (the vertices no longer fit that template).
struct SymbolicQuad {
    struct Build {
        RealVec P, u, w, z;
    };
    std::array<WeilVec, 4> v;
    std::optional<Build> build;
    int dim() const { return static_cast<int>(v[0].size()); }
};

using Quad = std::variant<FiniteQuad, SymbolicQuad>;

/// V0 = P, V1 = P + e1*u, V3 = P + e2*w, V2 = P + e1*u + e2*w + e1e2*z.
/// Each consecutive difference is a first-order infinitesimal vector;
/// z = 0 gives an infinitesimal parallelogram.
inline SymbolicQuad make_symbolic_quad(const RealVec& P, const RealVec& u,
                                       const RealVec& w, const RealVec& z) {
    const std::size_t n = P.size();
    if (n == 0 || u.size() != n || w.size() != n || z.size() != n)
        throw Error("make_symbolic_quad: P, u, w, z must share a positive dimension");
    const WeilNumber e1 = WeilNumber::generator(0, 2);
    const WeilNumber e2 = WeilNumber::generator(1, 2);
    const WeilNumber e12 = e1 * e2;
    SymbolicQuad q;
    for (auto& vert : q.v) vert.reserve(n);
    for (std::size_t j = 0; j < n; ++j) {
        const WeilNumber base = WeilNumber::constant(P[j], 2);
        q.v[0].push_back(base);
        q.v[1].push_back(base + e1 * u[j]);
        q.v[3].push_back(base + e2 * w[j]);
        q.v[2].push_back(base + e1 * u[j] + e2 * w[j] + e12 * z[j]);
    }
    q.build = SymbolicQuad::Build{P, u, w, z};
    return q;
}

inline SymbolicQuad make_symbolic_parallelogram(const RealVec& P, const RealVec& u,
                                                const RealVec& w) {
    return make_symbolic_quad(P, u, w, RealVec(P.size(), 0.0));
}

/// Dihedral group of the square in the normal form r^a s^b with
/// r^4 = s^2 = e and s r = r^3 s. r rotates labels one step,
/// s reflects across the V0-V2 diagonal.
class Dih4 {
public:
    static constexpr int kOrder = 8;

    constexpr Dih4() : a_(0), b_(0) {}

    static constexpr Dih4 identity() { return Dih4(0, 0); }
    static constexpr Dih4 r() { return Dih4(1, 0); }
    static constexpr Dih4 s() { return Dih4(0, 1); }
    /// index = a + 4b enumerates {e, r, r2, r3, s, rs, r2s, r3s}.
    static Dih4 element(int index) {
        if (index < 0 || index >= kOrder) throw Error("Dih4 element index out of range");
        return Dih4(index % 4, index / 4);
    }

    int index() const { return a_ + 4 * b_; }
    int rotation_power() const { return a_; }
    bool reflected() const { return b_ != 0; }

    friend constexpr Dih4 operator*(Dih4 t1, Dih4 t2) {
        // (r^a1 s^b1)(r^a2 s^b2): moving s^b1 past r^a2 inverts the
        // rotation when b1 = 1.
        const int a = (t1.a_ + (t1.b_ ? (4 - t2.a_) % 4 : t2.a_)) % 4;
        return Dih4(a, t1.b_ ^ t2.b_);
    }

    constexpr Dih4 inverse() const {
        return b_ ? *this : Dih4((4 - a_) % 4, 0);
    }

    friend constexpr bool operator==(Dih4 x, Dih4 y) {
        return x.a_ == y.a_ && x.b_ == y.b_;
    }

    std::string name() const {
        static const char* names[kOrder] = {"e", "r", "r2", "r3", "s", "rs", "r2s", "r3s"};
        return names[index()];
    }

private:
    constexpr Dih4(int a, int b) : a_(a), b_(b) {}
    int a_, b_;
};

namespace detail {

template <class V>
std::array<V, 4> act_vertices(Dih4 t, std::array<V, 4> v) {
    if (t.reflected()) v = {v[0], v[3], v[2], v[1]};
    for (int k = 0; k < t.rotation_power(); ++k) v = {v[3], v[0], v[1], v[2]};
    return v;
}

}  // namespace detail

/// Relabeling action: act(r): (V0,V1,V2,V3) -> (V3,V0,V1,V2);
/// act(s) swaps V1 and V3. act(t*t') = act(t) o act(t').
inline FiniteQuad act(Dih4 t, const FiniteQuad& q) {
    return FiniteQuad{detail::act_vertices(t, q.v)};
}

inline SymbolicQuad act(Dih4 t, const SymbolicQuad& q) {
    SymbolicQuad out;
    out.v = detail::act_vertices(t, q.v);
    if (t == Dih4::identity()) out.build = q.build;
    return out;
}

inline Quad act(Dih4 t, const Quad& q) {
    if (std::holds_alternative<FiniteQuad>(q)) return act(t, std::get<FiniteQuad>(q));
    return act(t, std::get<SymbolicQuad>(q));
}

namespace detail {

inline RealVec vec_sub(const RealVec& a, const RealVec& b) {
    RealVec out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
    return out;
}

inline double max_abs(const RealVec& a) {
    double m = 0.0;
    for (double x : a) m = std::max(m, std::abs(x));
    return m;
}

}  // namespace detail

/// Zero-volume test for finite quads: in dimension <= 2 every quad is
/// flat; otherwise the three edge vectors V1-V0, V3-V0, V2-V3 must have
/// all 3x3 minors vanish (relative to the cubed edge scale) — the
/// finite stand-in for "every alternating trilinear form vanishes".
inline bool is_flat(const FiniteQuad& q, double tol = 1e-9) {
    const int n = q.dim();
    if (n <= 2) return true;
    const RealVec e1 = detail::vec_sub(q.v[1], q.v[0]);
    const RealVec e2 = detail::vec_sub(q.v[3], q.v[0]);
    const RealVec e3 = detail::vec_sub(q.v[2], q.v[3]);
    const double scale =
        std::max({detail::max_abs(e1), detail::max_abs(e2), detail::max_abs(e3)});
    if (scale == 0.0) return true;
    const double bound = tol * scale * scale * scale;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            for (int k = j + 1; k < n; ++k) {
                const double det =
                    e1[i] * (e2[j] * e3[k] - e2[k] * e3[j]) -
                    e1[j] * (e2[i] * e3[k] - e2[k] * e3[i]) +
                    e1[k] * (e2[i] * e3[j] - e2[j] * e3[i]);
                if (std::abs(det) > bound) return false;
            }
    return true;
}

/// Sign character of Dih4, determined by its values on r and s.
struct Character {
    enum class Name { Trivial, Cartan, LeibnizFubini, Nieuwentijdt };

    Name name = Name::Trivial;
    int on_r = 1;
    int on_s = 1;

    static constexpr Character trivial() { return {Name::Trivial, +1, +1}; }
    static constexpr Character cartan() { return {Name::Cartan, +1, -1}; }
    static constexpr Character leibniz_fubini() { return {Name::LeibnizFubini, -1, +1}; }
    static constexpr Character nieuwentijdt() { return {Name::Nieuwentijdt, -1, -1}; }

    /// sigma(r^a s^b) = sigma(r)^a * sigma(s)^b.
    int value(Dih4 t) const {
        int v = 1;
        if ((t.rotation_power() & 1) && on_r < 0) v = -v;
        if (t.reflected() && on_s < 0) v = -v;
        return v;
    }

    std::string label() const {
        switch (name) {
        case Name::Trivial: return "Trivial";
        case Name::Cartan: return "Cartan";
        case Name::LeibnizFubini: return "LeibnizFubini";
        case Name::Nieuwentijdt: return "Nieuwentijdt";
        }
        return "?";
    }

    friend constexpr bool operator==(const Character& a, const Character& b) {
        return a.name == b.name && a.on_r == b.on_r && a.on_s == b.on_s;
    }
};

}  // namespace quadforms
