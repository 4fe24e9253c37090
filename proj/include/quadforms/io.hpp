#pragma once

#include <cctype>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "quadforms/error.hpp"
#include "quadforms/expr.hpp"
#include "quadforms/forms.hpp"
#include "quadforms/quad.hpp"
#include "quadforms/random.hpp"
#include "quadforms/tiling.hpp"

namespace quadforms {

using nlohmann::json;

inline std::string character_name(Character::Name n) {
    switch (n) {
        case Character::Name::Trivial: return "Trivial";
        case Character::Name::Cartan: return "Cartan";
        case Character::Name::LeibnizFubini: return "LeibnizFubini";
        case Character::Name::Nieuwentijdt: return "Nieuwentijdt";
    }
    throw Error("character_name: bad enum value");
}

inline Character character_from_name(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (s == "cartan" || s == "c") return Character::cartan();
    if (s == "leibnizfubini" || s == "leibniz-fubini" || s == "lf")
        return Character::leibniz_fubini();
    if (s == "nieuwentijdt" || s == "n") return Character::nieuwentijdt();
    if (s == "trivial") return Character::trivial();
    throw Error("unknown character name: " + s);
}

inline json to_json(const FiniteQuad& q) {
    json verts = json::array();
    for (const auto& v : q.v) verts.push_back(v);
    return json{{"type", "finite"}, {"vertices", verts}};
}

inline json to_json(const SymbolicQuad& q) {
    if (!q.build)
        throw Error("cannot serialize a symbolic quad without its build data");
    return json{{"type", "symbolic"},
                {"P", q.build->P},
                {"u", q.build->u},
                {"w", q.build->w},
                {"z", q.build->z}};
}

inline json to_json(const Quad& q) {
    if (std::holds_alternative<FiniteQuad>(q)) return to_json(std::get<FiniteQuad>(q));
    return to_json(std::get<SymbolicQuad>(q));
}

inline Quad quad_from_json(const json& j) {
    if (!j.is_object() || !j.contains("type"))
        throw Error("quad JSON must be an object with a \"type\" field");
    const std::string type = j.at("type").get<std::string>();
    if (type == "finite") {
        const auto& verts = j.at("vertices");
        if (!verts.is_array() || verts.size() != 4)
            throw Error("finite quad JSON needs exactly 4 vertices");
        FiniteQuad q;
        for (int i = 0; i < 4; ++i) q.v[static_cast<std::size_t>(i)] = verts[static_cast<std::size_t>(i)].get<RealVec>();
        const std::size_t d = q.v[0].size();
        if (d == 0) throw Error("finite quad JSON vertices must be nonempty");
        for (const auto& v : q.v)
            if (v.size() != d) throw Error("finite quad JSON vertices must share a dimension");
        return q;
    }
    if (type == "symbolic") {
        const RealVec P = j.at("P").get<RealVec>();
        const RealVec u = j.at("u").get<RealVec>();
        const RealVec w = j.at("w").get<RealVec>();
        const RealVec z = j.contains("z") ? j.at("z").get<RealVec>() : RealVec(P.size(), 0.0);
        return make_symbolic_quad(P, u, w, z);
    }
    throw Error("quad JSON type must be \"finite\" or \"symbolic\"");
}

inline json to_json(const SideSums& s) {
    return json{{"b_to_a", s.b_to_a},
                {"b_to_c", s.b_to_c},
                {"d_to_c", s.d_to_c},
                {"d_to_a", s.d_to_a}};
}

inline json to_json(const CheckReport& r) {
    json j{{"check", r.check},
           {"lhs_label", r.lhs_label},
           {"lhs", r.lhs},
           {"rhs_label", r.rhs_label},
           {"rhs", r.rhs},
           {"residual", r.residual},
           {"tol", r.tol},
           {"pass", r.pass}};
    if (r.sides) j["sides"] = to_json(*r.sides);
    return j;
}

inline json to_json(const ClassifyResult& r) {
    json matched = json::array();
    for (const auto& c : r.characters) matched.push_back(character_name(c.name));
    json residuals = json::object();
    json per_element = json::object();
    const auto chars = nontrivial_characters();
    for (std::size_t k = 0; k < chars.size(); ++k) {
        const std::string key = character_name(chars[k].name);
        residuals[key] = r.max_residual[k];
        json row = json::array();
        for (double x : r.element_residual[k]) row.push_back(x);
        per_element[key] = row;
    }
    return json{{"matched", matched},
                {"residuals", residuals},
                {"element_residuals", per_element},
                {"tol", r.tol}};
}

inline json to_json(const ConvergenceRow& row) {
    json j{{"m", row.m},
           {"n", row.n},
           {"riemann", row.riemann},
           {"corner", row.corner},
           {"abs_error", row.abs_error}};
    j["order"] = row.order ? json(*row.order) : json(nullptr);
    return j;
}

inline json to_json(const ConvergenceReport& r) {
    json rows = json::array();
    for (const auto& row : r.rows) rows.push_back(to_json(row));
    json j{{"corner", r.corner},
           {"rows", rows},
           {"exact", r.exact},
           {"monotone", r.monotone},
           {"order_threshold", r.order_threshold},
           {"pass", r.pass}};
    j["fitted_order"] = r.fitted_order ? json(*r.fitted_order) : json(nullptr);
    return j;
}

inline json to_json(const PullbackReport& r) {
    return json{{"declared", character_name(r.declared.name)},
                {"classification", to_json(r.classification)},
                {"tol", r.tol},
                {"pass", r.pass}};
}

inline json to_json(const KockLawvereReport& r) {
    return json{{"cases", r.cases},
                {"max_affine_residual", r.max_affine_residual},
                {"max_fd_residual", r.max_fd_residual},
                {"tol_affine", r.tol_affine},
                {"tol_fd", r.tol_fd},
                {"pass", r.pass}};
}

/// CSV with the columns m,n,riemann,corner,abs_error,order; a row with
/// no order estimate leaves the last cell empty.
inline std::string convergence_csv(const ConvergenceReport& r) {
    std::string out = "m,n,riemann,corner,abs_error,order\n";
    for (const auto& row : r.rows) {
        out += std::to_string(row.m);
        out += ',';
        out += std::to_string(row.n);
        out += ',';
        out += format_double(row.riemann);
        out += ',';
        out += format_double(row.corner);
        out += ',';
        out += format_double(row.abs_error);
        out += ',';
        if (row.order) out += format_double(*row.order);
        out += '\n';
    }
    return out;
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open for writing: " + path);
    f << content;
    if (!f) throw Error("write failed: " + path);
}

inline json read_json_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open: " + path);
    json j;
    try {
        f >> j;
    } catch (const json::exception& e) {
        throw Error("bad JSON in " + path + ": " + e.what());
    }
    return j;
}

}  // namespace quadforms
