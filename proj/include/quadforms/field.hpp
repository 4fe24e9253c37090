#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "quadforms/error.hpp"
#include "quadforms/expr.hpp"

namespace quadforms {

enum class FieldKind { Scalar, Vector, Bilinear };

/// Splits "0, x*(y+1), 2" at top-level commas (commas inside parentheses
/// stay put). Used for vector components and bilinear matrix rows.
inline std::vector<std::string> split_components(std::string_view src, char sep = ',') {
    std::vector<std::string> out;
    int depth = 0;
    std::size_t start = 0;
    for (std::size_t i = 0; i < src.size(); ++i) {
        char c = src[i];
        if (c == '(') ++depth;
        else if (c == ')') --depth;
        else if (c == sep && depth == 0) {
            out.emplace_back(src.substr(start, i - start));
            start = i + 1;
        }
    }
    out.emplace_back(src.substr(start));
    return out;
}

/// A named bundle of expressions: a scalar function, a vector field /
/// linear-form field / parametrization patch (k components), or an n×n
/// matrix of coefficient functions for a bilinear form field.
/// dim is the domain dimension (how many variables the components may use).
class FieldSpec {
public:
    static FieldSpec scalar(ExprPtr e, int dim = -1) {
        if (dim < 0) dim = arity(*e);
        FieldSpec f(FieldKind::Scalar, dim);
        f.comps_.push_back(std::move(e));
        f.validate();
        return f;
    }
    static FieldSpec scalar(std::string_view src, int dim = -1) {
        return scalar(parse(src, dim), dim);
    }

    static FieldSpec vector_field(std::vector<ExprPtr> comps, int dim = -1) {
        if (comps.empty()) throw Error("vector field needs at least one component");
        if (dim < 0) {
            int a = 0;
            for (const auto& c : comps) a = std::max(a, arity(*c));
            dim = std::max<int>(a, static_cast<int>(comps.size()));
        }
        FieldSpec f(FieldKind::Vector, dim);
        f.comps_ = std::move(comps);
        f.validate();
        return f;
    }
    /// Comma-separated component list, e.g. "0, x" or "x, y, x^2 + y^2".
    static FieldSpec vector_field(std::string_view src, int dim = -1) {
        std::vector<ExprPtr> comps;
        for (const auto& part : split_components(src)) comps.push_back(parse(part, dim));
        return vector_field(std::move(comps), dim);
    }

    static FieldSpec bilinear(std::vector<ExprPtr> entries, int dim) {
        if (dim < 1 || entries.size() != static_cast<std::size_t>(dim) * dim)
            throw Error("bilinear field needs an n-by-n entry matrix");
        FieldSpec f(FieldKind::Bilinear, dim);
        f.comps_ = std::move(entries);
        f.validate();
        return f;
    }
    /// Rows separated by ';', entries by ',': "0, 1; -1, 0".
    static FieldSpec bilinear(std::string_view src, int dim = -1) {
        auto rows = split_components(src, ';');
        int n = static_cast<int>(rows.size());
        if (dim < 0) dim = n;
        if (n != dim)
            throw Error("bilinear field: expected " + std::to_string(dim) + " rows, got " +
                        std::to_string(n));
        std::vector<ExprPtr> entries;
        for (const auto& row : rows) {
            auto cells = split_components(row);
            if (static_cast<int>(cells.size()) != dim)
                throw Error("bilinear field: expected " + std::to_string(dim) +
                            " entries per row, got " + std::to_string(cells.size()));
            for (const auto& cell : cells) entries.push_back(parse(cell, dim));
        }
        return bilinear(std::move(entries), dim);
    }

    FieldKind kind() const noexcept { return kind_; }
    int dim() const noexcept { return dim_; }
    int components() const noexcept { return static_cast<int>(comps_.size()); }
    const ExprPtr& component(int i) const { return comps_[static_cast<std::size_t>(i)]; }
    const ExprPtr& entry(int i, int j) const {
        return comps_[static_cast<std::size_t>(i) * dim_ + j];
    }

    template <class S>
    S eval_scalar(std::span<const S> p) const {
        require(FieldKind::Scalar, "scalar");
        return eval(*comps_[0], p);
    }

    template <class S>
    std::vector<S> eval_vector(std::span<const S> p) const {
        require(FieldKind::Vector, "vector");
        std::vector<S> out;
        out.reserve(comps_.size());
        for (const auto& c : comps_) out.push_back(eval(*c, p));
        return out;
    }

    /// sum_{i,j} b_ij(p) * v_i * w_j
    template <class S>
    S eval_bilinear(std::span<const S> p, std::span<const S> v, std::span<const S> w) const {
        require(FieldKind::Bilinear, "bilinear");
        if (v.size() != static_cast<std::size_t>(dim_) ||
            w.size() != static_cast<std::size_t>(dim_))
            throw Error("bilinear field: argument dimension mismatch");
        S acc(0.0);
        for (int i = 0; i < dim_; ++i)
            for (int j = 0; j < dim_; ++j)
                acc = acc + eval(*entry(i, j), p) * v[static_cast<std::size_t>(i)] *
                                w[static_cast<std::size_t>(j)];
        return acc;
    }

private:
    FieldSpec(FieldKind k, int dim) : kind_(k), dim_(dim) {}

    void require(FieldKind k, const char* what) const {
        if (kind_ != k) throw Error(std::string("field is not of ") + what + " kind");
    }

    void validate() const {
        if (dim_ < 0 || dim_ > kMaxVariables)
            throw Error("field dimension " + std::to_string(dim_) + " outside 0.." +
                        std::to_string(kMaxVariables));
        for (const auto& c : comps_)
            if (arity(*c) > dim_)
                throw Error("component uses variable x" + std::to_string(arity(*c)) +
                            " beyond field dimension " + std::to_string(dim_));
    }

    FieldKind kind_;
    int dim_;
    std::vector<ExprPtr> comps_;
};

}  // namespace quadforms
