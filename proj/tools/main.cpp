// quadforms command-line front end: classify 2-forms by dihedral
// character, verify the calculus identities on grids, take Weil-algebra
// derivatives, and integrate Leibniz-Fubini forms.
//
// Exit codes: 0 pass, 1 verification failure, 2 usage/config error.

#include <chrono>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include <quadforms/quadforms.hpp>

using namespace quadforms;
using nlohmann::json;

namespace {

// ---------------------------------------------------------------- parsing

std::string trim(std::string s) {
    const auto issp = [](unsigned char c) { return std::isspace(c) != 0; };
    while (!s.empty() && issp(static_cast<unsigned char>(s.front()))) s.erase(s.begin());
    while (!s.empty() && issp(static_cast<unsigned char>(s.back()))) s.pop_back();
    return s;
}

double parse_double_arg(const std::string& raw, const std::string& what) {
    const std::string s = trim(raw);
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw Error("bad number for " + what + ": \"" + raw + "\"");
    }
}

long parse_int_arg(const std::string& raw, const std::string& what, long lo, long hi) {
    const std::string s = trim(raw);
    try {
        std::size_t pos = 0;
        const long v = std::stol(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("trailing");
        if (v < lo || v > hi)
            throw Error("value for " + what + " must be in [" + std::to_string(lo) + ", " +
                        std::to_string(hi) + "]");
        return v;
    } catch (const Error&) {
        throw;
    } catch (const std::exception&) {
        throw Error("bad integer for " + what + ": \"" + raw + "\"");
    }
}

std::uint64_t parse_seed_arg(const std::string& raw) {
    const std::string s = trim(raw);
    try {
        std::size_t pos = 0;
        const std::uint64_t v = std::stoull(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw Error("bad integer for --seed: \"" + raw + "\"");
    }
}

RealVec parse_vector_arg(const std::string& raw, const std::string& what) {
    RealVec out;
    for (const auto& part : split_components(raw, ','))
        out.push_back(parse_double_arg(part, what));
    if (out.empty()) throw Error(what + " must list at least one number");
    return out;
}

std::vector<int> parse_axes_arg(const std::string& raw) {
    std::vector<int> out;
    for (const auto& part : split_components(raw, ','))
        out.push_back(static_cast<int>(parse_int_arg(part, "--axes", 1, kMaxVariables)));
    if (out.empty()) throw Error("--axes must list at least one axis");
    return out;
}

std::pair<int, int> parse_grid_arg(const std::string& raw) {
    const std::string s = trim(raw);
    // "MxN", "M,N" (the config-array form), or a bare "N"
    const auto at = s.find_first_of("xX,");
    if (at == std::string::npos) {
        const int n = static_cast<int>(parse_int_arg(s, "--grid", 1, 100000));
        return {n, n};
    }
    const int m = static_cast<int>(parse_int_arg(s.substr(0, at), "--grid", 1, 100000));
    const int n = static_cast<int>(parse_int_arg(s.substr(at + 1), "--grid", 1, 100000));
    return {m, n};
}

std::vector<std::pair<int, int>> parse_grids_arg(const std::string& raw) {
    std::vector<std::pair<int, int>> out;
    for (const auto& part : split_components(raw, ',')) out.push_back(parse_grid_arg(part));
    if (out.empty()) throw Error("--grids must list at least one grid");
    return out;
}

RectDomain parse_domain_arg(const std::string& raw) {
    const RealVec v = parse_vector_arg(raw, "--domain");
    if (v.size() != 4) throw Error("--domain needs four numbers a1,a2,b1,b2");
    return RectDomain(v[0], v[1], v[2], v[3]);
}

// ------------------------------------------------------- config merging

/// Renders a JSON config value as the equivalent command-line string, so
/// config files may write "domain": [0,1,0,1] or "grid": [8, 8] as well
/// as plain strings.
std::string json_value_to_flag(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    if (v.is_number_unsigned()) return std::to_string(v.get<unsigned long long>());
    if (v.is_number_float()) return format_double(v.get<double>());
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_array()) {
        std::string out;
        for (std::size_t i = 0; i < v.size(); ++i) {
            const json& e = v[i];
            if (i) out += ',';
            if (e.is_array()) {  // [[4,4],[8,8]] means 4x4,8x8
                if (e.size() != 2) throw Error("nested config arrays must be [m, n] pairs");
                out += json_value_to_flag(e[0]) + "x" + json_value_to_flag(e[1]);
            } else {
                out += json_value_to_flag(e);
            }
        }
        return out;
    }
    throw Error("config values must be strings, numbers, booleans, or arrays");
}

// ------------------------------------------------------- form building

struct FormOpts {
    std::string form, F, X, A, a, b;
    int dim = -1;  // -1: infer from the fields
};

struct BuiltForm {
    Form2 w;
    int dim_hint;             // sample-quad dimension for classification
    bool parallelogram_only;  // form only accepts parallelogram quads
};

BuiltForm build_form2(const FormOpts& o) {
    if (o.form.empty()) throw Error("--form is required");
    const auto need = [&](const std::string& v, const char* flag) {
        if (v.empty()) throw Error("--form " + o.form + " needs " + flag);
    };
    const auto hint = [&](int field_dim) {
        return o.dim > 0 ? o.dim : std::max(2, field_dim);
    };
    if (o.form == "delta2") {
        need(o.F, "--F");
        Form0 F = Form0::from_text(o.F, o.dim);
        const int h = hint(F.dim());
        return {delta2(F), h, false};
    }
    if (o.form == "delta" || o.form == "d") {
        std::optional<Form1> a;
        int h = 2;
        if (!o.X.empty()) {
            FieldSpec X = FieldSpec::vector_field(o.X, o.dim);
            h = hint(X.dim());
            a = Form1::from_vector_field(std::move(X));
        } else if (!o.F.empty()) {
            Form0 F = Form0::from_text(o.F, o.dim);
            h = hint(F.dim());
            a = delta0(F);
        } else {
            throw Error("--form " + o.form + " needs --X or --F");
        }
        return {o.form == "d" ? exterior_d(*a) : delta(*a), h, false};
    }
    if (o.form == "cartan") {
        need(o.b, "--b");
        FieldSpec b = FieldSpec::bilinear(o.b, o.dim);
        const int h = hint(b.dim());
        return {cartan_from_bilinear(std::move(b)), h, false};
    }
    if (o.form == "lf") {
        need(o.A, "--A");
        need(o.a, "--a");
        FieldSpec A = FieldSpec::vector_field(o.A, o.dim);
        FieldSpec a = FieldSpec::bilinear(o.a, o.dim > 0 ? o.dim : A.dim());
        const int h = hint(A.dim());
        return {lf_from_A_a(std::move(A), std::move(a)), h, false};
    }
    if (o.form == "lf-parallelogram") {
        need(o.b, "--b");
        FieldSpec b = FieldSpec::bilinear(o.b, o.dim);
        const int h = hint(b.dim());
        return {lf_parallelogram_form(std::move(b)), h, true};
    }
    if (o.form == "blackbox-zero") return {Form2::zero(), o.dim > 0 ? o.dim : 2, false};
    if (o.form == "blackbox-table")
        throw Error("--form blackbox-table is only available with classify --table");
    throw Error("unknown --form \"" + o.form +
                "\" (expected delta2, delta, d, cartan, lf, lf-parallelogram, "
                "blackbox-zero, blackbox-table)");
}

void add_inputs(json& inputs, const char* key, const std::string& v) {
    if (!v.empty()) inputs[key] = v;
}

// ------------------------------------------------------- text rendering

std::string render_check(const CheckReport& r) {
    std::string s = "check: " + r.check + "\n";
    s += r.lhs_label + " = " + format_double(r.lhs) + "\n";
    s += r.rhs_label + " = " + format_double(r.rhs) + "\n";
    if (r.sides) {
        s += "side B->A = " + format_double(r.sides->b_to_a) +
             ", B->C = " + format_double(r.sides->b_to_c) +
             ", D->C = " + format_double(r.sides->d_to_c) +
             ", D->A = " + format_double(r.sides->d_to_a) + "\n";
    }
    s += "residual = " + format_double(r.residual) + " (tol " + format_double(r.tol) + ")\n";
    s += std::string("result: ") + (r.pass ? "PASS" : "FAIL") + "\n";
    return s;
}

std::string render_classify(const ClassifyResult& r) {
    std::string matched;
    for (const auto& c : r.characters) {
        if (!matched.empty()) matched += ", ";
        matched += character_name(c.name);
    }
    if (matched.empty()) matched = "none";
    std::string s = "matched: " + matched + "\n";
    const auto& chars = nontrivial_characters();
    for (std::size_t k = 0; k < chars.size(); ++k)
        s += "residual[" + character_name(chars[k].name) +
             "] = " + format_double(r.max_residual[k]) + "\n";
    s += "tol = " + format_double(r.tol) + "\n";
    return s;
}

std::string render_kock_lawvere(const KockLawvereReport& r) {
    std::string s = "check: kock-lawvere\n";
    s += "cases = " + std::to_string(r.cases) + "\n";
    s += "max affine residual = " + format_double(r.max_affine_residual) + " (tol " +
         format_double(r.tol_affine) + ")\n";
    s += "max finite-difference residual = " + format_double(r.max_fd_residual) + " (tol " +
         format_double(r.tol_fd) + ")\n";
    s += std::string("result: ") + (r.pass ? "PASS" : "FAIL") + "\n";
    return s;
}

std::string render_convergence(const ConvergenceReport& r) {
    std::string s = "check: convergence\n";
    s += "corner = " + format_double(r.corner) + "\n";
    char line[160];
    std::snprintf(line, sizeof line, "%6s %6s %22s %14s %10s\n", "m", "n", "riemann", "abs_error",
                  "order");
    s += line;
    for (const auto& row : r.rows) {
        std::string ord = row.order ? format_double(*row.order) : std::string("-");
        std::snprintf(line, sizeof line, "%6d %6d %22s %14s %10s\n", row.m, row.n,
                      format_double(row.riemann).c_str(), format_double(row.abs_error).c_str(),
                      ord.c_str());
        s += line;
    }
    s += "fitted order = " +
         (r.fitted_order ? format_double(*r.fitted_order) : std::string("-")) + " (threshold " +
         format_double(r.order_threshold) + ")\n";
    s += std::string("exact = ") + (r.exact ? "yes" : "no") + ", monotone = " +
         (r.monotone ? "yes" : "no") + "\n";
    s += std::string("result: ") + (r.pass ? "PASS" : "FAIL") + "\n";
    return s;
}

std::string render_pullback(const PullbackReport& r) {
    std::string s = "check: pullback-type\n";
    s += "declared = " + character_name(r.declared.name) + "\n";
    s += render_classify(r.classification);
    s += std::string("result: ") + (r.pass ? "PASS" : "FAIL") + "\n";
    return s;
}

// ------------------------------------------------------------- emitting

struct EmitOpts {
    std::string format = "text";  // text | json | csv
    std::string out;              // empty: stdout
};

void emit(const EmitOpts& eo, const std::string& command, const json& inputs, const json& result,
          const std::string& text, double timing_ms, const std::string* csv = nullptr) {
    std::string payload;
    if (eo.format == "json") {
        json rep{{"command", command}, {"inputs", inputs}, {"result", result}};
        rep["timing_ms"] = timing_ms;
        payload = rep.dump(2);
        payload += '\n';
    } else if (eo.format == "csv") {
        if (!csv) throw Error("--format csv is only available for verify convergence");
        payload = *csv;
    } else if (eo.format == "text") {
        payload = text;
    } else {
        throw Error("unknown --format \"" + eo.format + "\" (expected text, json, csv)");
    }
    if (eo.out.empty())
        std::cout << payload;
    else
        write_text_file(eo.out, payload);
}

class Stopwatch {
public:
    double ms() const {
        return std::chrono::duration<double, std::milli>(
                   std::chrono::steady_clock::now() - start_)
            .count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

// ------------------------------------------------------- flag registry

/// One subcommand's string-valued flags: CLI11 writes into caller-owned
/// slots; afterwards a config file fills whichever flags the command
/// line left unset (keys are the long names without the leading dashes).
class Flags {
public:
    explicit Flags(CLI::App* cmd) : cmd_(cmd) {}

    void add(const char* name, std::string& slot, const char* help) {
        entries_.push_back({cmd_->add_option(name, slot, help), std::string(name).substr(2), &slot});
    }

    void merge_config(const json& cfg) {
        if (!cfg.is_object()) throw Error("config file must hold a JSON object");
        for (auto& e : entries_)
            if (e.opt->count() == 0 && cfg.contains(e.key))
                *e.slot = json_value_to_flag(cfg.at(e.key));
        for (const auto& [key, _] : cfg.items()) {
            bool known = false;
            for (const auto& e : entries_) known = known || e.key == key;
            if (!known) throw Error("config key \"" + key + "\" is not a flag of this command");
        }
    }

private:
    struct Entry {
        CLI::Option* opt;
        std::string key;
        std::string* slot;
    };
    CLI::App* cmd_;
    std::vector<Entry> entries_;
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Infinitesimal-quad 2-form calculator"};
    app.require_subcommand(1);

    // classify ------------------------------------------------------
    std::string c_form, c_F, c_X, c_A, c_a, c_b, c_table, c_dim, c_samples, c_seed, c_tol,
        c_expect, c_format, c_out, c_config;
    CLI::App* classify_cmd =
        app.add_subcommand("classify", "Detect a 2-form's character(s) under quad relabelings");
    Flags classify_flags(classify_cmd);
    classify_flags.add("--form", c_form,
                       "delta2 | delta | d | cartan | lf | lf-parallelogram | blackbox-zero | "
                       "blackbox-table");
    classify_flags.add("--F", c_F, "scalar field, e.g. \"x*y\"");
    classify_flags.add("--X", c_X, "vector field, e.g. \"0, x\"");
    classify_flags.add("--A", c_A, "vector field for --form lf");
    classify_flags.add("--a", c_a, "bilinear matrix for --form lf, rows split by ';'");
    classify_flags.add("--b", c_b, "bilinear matrix for --form cartan / lf-parallelogram");
    classify_flags.add("--table", c_table, "JSON file with rows of 8 orbit values");
    classify_flags.add("--dim", c_dim, "sample-quad dimension (default: inferred, at least 2)");
    classify_flags.add("--samples", c_samples, "number of sample quads (default 32)");
    classify_flags.add("--seed", c_seed, "RNG seed (default 987654321)");
    classify_flags.add("--tol", c_tol, "residual tolerance (default 1e-9)");
    classify_flags.add("--expect", c_expect, "exit 1 unless this character is matched");
    classify_flags.add("--format", c_format, "text | json (default text)");
    classify_flags.add("--out", c_out, "write the report to this file instead of stdout");
    classify_flags.add("--config", c_config, "JSON file supplying unset flags");

    // verify --------------------------------------------------------
    std::string v_checker;
    std::string v_form, v_F, v_X, v_A, v_a, v_b, v_phi, v_patch, v_domain, v_grid, v_grids, v_dim,
        v_samples, v_seed, v_tol, v_tol_affine, v_tol_fd, v_cases, v_threshold, v_format, v_out,
        v_config;
    CLI::App* verify_cmd = app.add_subcommand(
        "verify", "Run a theorem checker: stokes, relative-ftc, ftc2d, pullback-type, "
                  "kock-lawvere, convergence");
    verify_cmd->add_option("checker", v_checker, "checker name")->required();
    Flags verify_flags(verify_cmd);
    verify_flags.add("--form", v_form, "2-form constructor for pullback-type");
    verify_flags.add("--F", v_F, "scalar field");
    verify_flags.add("--X", v_X, "vector field");
    verify_flags.add("--A", v_A, "vector field for --form lf");
    verify_flags.add("--a", v_a, "bilinear matrix for --form lf");
    verify_flags.add("--b", v_b, "bilinear matrix for --form cartan / lf-parallelogram");
    verify_flags.add("--phi", v_phi, "patch map for pullback-type, e.g. \"x, y, x^2+y^2\"");
    verify_flags.add("--patch", v_patch, "patch map R^2 -> R^d applied to the grid");
    verify_flags.add("--domain", v_domain, "a1,a2,b1,b2 (default 0,1,0,1)");
    verify_flags.add("--grid", v_grid, "MxN or N (default 8x8)");
    verify_flags.add("--grids", v_grids, "grid list for convergence (default 4,8,16,32)");
    verify_flags.add("--dim", v_dim, "sample-quad dimension for pullback-type (default 2)");
    verify_flags.add("--samples", v_samples, "sample quads for pullback-type (default 32)");
    verify_flags.add("--seed", v_seed, "RNG seed (default 987654321)");
    verify_flags.add("--tol", v_tol, "residual tolerance (default 1e-9; pullback-type 1e-8)");
    verify_flags.add("--tol-affine", v_tol_affine, "kock-lawvere affine tolerance (default 1e-12)");
    verify_flags.add("--tol-fd", v_tol_fd, "kock-lawvere finite-difference tolerance (default 1e-4)");
    verify_flags.add("--cases", v_cases, "kock-lawvere case count (default 200)");
    verify_flags.add("--threshold", v_threshold, "convergence order threshold (default 0.8)");
    verify_flags.add("--format", v_format, "text | json | csv (csv: convergence only)");
    verify_flags.add("--out", v_out, "write the report to this file instead of stdout");
    verify_flags.add("--config", v_config, "JSON file supplying unset flags");

    // derive --------------------------------------------------------
    std::string d_f, d_point, d_axes, d_format, d_out, d_config;
    CLI::App* derive_cmd =
        app.add_subcommand("derive", "Mixed partial derivatives via nilpotent generators");
    Flags derive_flags(derive_cmd);
    derive_flags.add("--f", d_f, "scalar expression, e.g. \"x^2*y\"");
    derive_flags.add("--point", d_point, "evaluation point, e.g. \"2,3\"");
    derive_flags.add("--axes", d_axes, "1-based axes of the mixed partial, e.g. \"1,2\"");
    derive_flags.add("--format", d_format, "text | json (default text)");
    derive_flags.add("--out", d_out, "write the report to this file instead of stdout");
    derive_flags.add("--config", d_config, "JSON file supplying unset flags");

    // integrate -----------------------------------------------------
    std::string i_form, i_F, i_X, i_A, i_a, i_b, i_patch, i_domain, i_grid, i_dim, i_format,
        i_out, i_config;
    CLI::App* integrate_cmd =
        app.add_subcommand("integrate", "Sum a Leibniz-Fubini 2-form over a grid tiling");
    Flags integrate_flags(integrate_cmd);
    integrate_flags.add("--form", i_form, "2-form constructor (must be Leibniz-Fubini)");
    integrate_flags.add("--F", i_F, "scalar field");
    integrate_flags.add("--X", i_X, "vector field");
    integrate_flags.add("--A", i_A, "vector field for --form lf");
    integrate_flags.add("--a", i_a, "bilinear matrix for --form lf");
    integrate_flags.add("--b", i_b, "bilinear matrix for --form lf-parallelogram");
    integrate_flags.add("--patch", i_patch, "patch map R^2 -> R^d applied to the grid");
    integrate_flags.add("--domain", i_domain, "a1,a2,b1,b2 (default 0,1,0,1)");
    integrate_flags.add("--grid", i_grid, "MxN or N (default 8x8)");
    integrate_flags.add("--dim", i_dim, "field dimension override");
    integrate_flags.add("--format", i_format, "text | json (default text)");
    integrate_flags.add("--out", i_out, "write the report to this file instead of stdout");
    integrate_flags.add("--config", i_config, "JSON file supplying unset flags");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        Stopwatch clock;

        // ---------------------------------------------------- classify
        if (classify_cmd->parsed()) {
            if (!c_config.empty()) classify_flags.merge_config(read_json_file(c_config));
            EmitOpts eo;
            if (!c_format.empty()) eo.format = c_format;
            eo.out = c_out;
            const double tol = c_tol.empty() ? 1e-9 : parse_double_arg(c_tol, "--tol");
            json inputs;
            add_inputs(inputs, "form", c_form);
            inputs["tol"] = tol;

            ClassifyResult r;
            if (c_form == "blackbox-table") {
                if (c_table.empty()) throw Error("--form blackbox-table needs --table FILE");
                const json tj = read_json_file(c_table);
                if (!tj.is_array() || tj.empty())
                    throw Error("--table must hold a nonempty JSON array of rows");
                std::vector<std::array<double, 8>> rows;
                for (const auto& rj : tj) {
                    if (!rj.is_array() || rj.size() != 8)
                        throw Error("each --table row must list 8 orbit values");
                    std::array<double, 8> row{};
                    for (int k = 0; k < 8; ++k) row[static_cast<std::size_t>(k)] = rj[static_cast<std::size_t>(k)].get<double>();
                    rows.push_back(row);
                }
                add_inputs(inputs, "table", c_table);
                r = classify_table(rows, tol);
            } else {
                FormOpts fo;
                fo.form = c_form;
                fo.F = c_F;
                fo.X = c_X;
                fo.A = c_A;
                fo.a = c_a;
                fo.b = c_b;
                if (!c_dim.empty())
                    fo.dim = static_cast<int>(parse_int_arg(c_dim, "--dim", 1, kMaxVariables));
                BuiltForm bf = build_form2(fo);
                const int n = c_samples.empty()
                                  ? 32
                                  : static_cast<int>(parse_int_arg(c_samples, "--samples", 1, 100000));
                const std::uint64_t seed = c_seed.empty() ? kDefaultSeed : parse_seed_arg(c_seed);
                add_inputs(inputs, "F", c_F);
                add_inputs(inputs, "X", c_X);
                add_inputs(inputs, "A", c_A);
                add_inputs(inputs, "a", c_a);
                add_inputs(inputs, "b", c_b);
                inputs["dim"] = bf.dim_hint;
                inputs["samples"] = n;
                inputs["seed"] = seed;
                const auto samples =
                    default_classify_samples(bf.dim_hint, n, seed, bf.parallelogram_only);
                r = classify(bf.w, samples, tol);
            }
            add_inputs(inputs, "expect", c_expect);
            emit(eo, "classify", inputs, to_json(r), render_classify(r), clock.ms());
            if (!c_expect.empty() && !r.has(character_from_name(c_expect).name)) return 1;
            return 0;
        }

        // ------------------------------------------------------ verify
        if (verify_cmd->parsed()) {
            if (!v_config.empty()) verify_flags.merge_config(read_json_file(v_config));
            EmitOpts eo;
            if (!v_format.empty()) eo.format = v_format;
            eo.out = v_out;
            const RectDomain dom =
                v_domain.empty() ? RectDomain(0, 1, 0, 1) : parse_domain_arg(v_domain);
            json inputs;
            inputs["checker"] = v_checker;

            const auto make_tiling = [&]() {
                const auto [m, n] = v_grid.empty() ? std::pair<int, int>{8, 8}
                                                   : parse_grid_arg(v_grid);
                inputs["domain"] = v_domain.empty() ? "0,1,0,1" : v_domain;
                inputs["grid"] = std::to_string(m) + "x" + std::to_string(n);
                if (!v_patch.empty()) {
                    inputs["patch"] = v_patch;
                    return GridTiling(dom, m, n, FieldSpec::vector_field(v_patch, 2));
                }
                return GridTiling(dom, m, n);
            };
            const auto make_alpha = [&]() {
                if (!v_X.empty()) {
                    inputs["X"] = v_X;
                    return Form1::from_vector_field(FieldSpec::vector_field(v_X));
                }
                if (!v_F.empty()) {
                    inputs["F"] = v_F;
                    return delta0(Form0::from_text(v_F));
                }
                throw Error("verify " + v_checker + " needs --X or --F");
            };

            if (v_checker == "stokes" || v_checker == "relative-ftc") {
                const double tol = v_tol.empty() ? 1e-9 : parse_double_arg(v_tol, "--tol");
                const Form1 a = make_alpha();
                const GridTiling t = make_tiling();
                const CheckReport rep = v_checker == "stokes" ? check_stokes(a, t, tol)
                                                              : check_relative_ftc(a, t, tol);
                inputs["tol"] = tol;
                emit(eo, "verify", inputs, to_json(rep), render_check(rep), clock.ms());
                return rep.pass ? 0 : 1;
            }
            if (v_checker == "ftc2d") {
                if (v_F.empty()) throw Error("verify ftc2d needs --F");
                const double tol = v_tol.empty() ? 1e-9 : parse_double_arg(v_tol, "--tol");
                const Form0 F = Form0::from_text(v_F);
                const GridTiling t = make_tiling();
                const CheckReport rep = check_ftc2d(F, t, tol);
                inputs["F"] = v_F;
                inputs["tol"] = tol;
                emit(eo, "verify", inputs, to_json(rep), render_check(rep), clock.ms());
                return rep.pass ? 0 : 1;
            }
            if (v_checker == "kock-lawvere") {
                const int cases = v_cases.empty()
                                      ? 200
                                      : static_cast<int>(parse_int_arg(v_cases, "--cases", 1, 1000000));
                const std::uint64_t seed = v_seed.empty() ? kDefaultSeed : parse_seed_arg(v_seed);
                const double ta =
                    v_tol_affine.empty() ? 1e-12 : parse_double_arg(v_tol_affine, "--tol-affine");
                const double tf = v_tol_fd.empty() ? 1e-4 : parse_double_arg(v_tol_fd, "--tol-fd");
                const KockLawvereReport rep = run_kock_lawvere_suite(cases, seed, ta, tf);
                inputs["cases"] = cases;
                inputs["seed"] = seed;
                inputs["tol_affine"] = ta;
                inputs["tol_fd"] = tf;
                emit(eo, "verify", inputs, to_json(rep), render_kock_lawvere(rep), clock.ms());
                return rep.pass ? 0 : 1;
            }
            if (v_checker == "convergence") {
                if (v_F.empty()) throw Error("verify convergence needs --F");
                const Form0 F = Form0::from_text(v_F, 2);
                const auto grids = parse_grids_arg(v_grids.empty() ? "4,8,16,32" : v_grids);
                const double thr =
                    v_threshold.empty() ? 0.8 : parse_double_arg(v_threshold, "--threshold");
                const ConvergenceReport rep = check_riemann_convergence(F, dom, grids, thr);
                inputs["F"] = v_F;
                inputs["domain"] = v_domain.empty() ? "0,1,0,1" : v_domain;
                inputs["grids"] = v_grids.empty() ? "4,8,16,32" : v_grids;
                inputs["threshold"] = thr;
                const std::string csv = convergence_csv(rep);
                emit(eo, "verify", inputs, to_json(rep), render_convergence(rep), clock.ms(),
                     &csv);
                return rep.pass ? 0 : 1;
            }
            if (v_checker == "pullback-type") {
                if (v_phi.empty()) throw Error("verify pullback-type needs --phi");
                FormOpts fo;
                fo.form = v_form;
                fo.F = v_F;
                fo.X = v_X;
                fo.A = v_A;
                fo.a = v_a;
                fo.b = v_b;
                BuiltForm bf = build_form2(fo);
                const int phi_dim = v_dim.empty()
                                        ? 2
                                        : static_cast<int>(parse_int_arg(v_dim, "--dim", 1,
                                                                         kMaxVariables));
                const FieldSpec phi = FieldSpec::vector_field(v_phi, phi_dim);
                const int n = v_samples.empty()
                                  ? 32
                                  : static_cast<int>(parse_int_arg(v_samples, "--samples", 1,
                                                                   100000));
                const std::uint64_t seed = v_seed.empty() ? kDefaultSeed : parse_seed_arg(v_seed);
                const double tol = v_tol.empty() ? 1e-8 : parse_double_arg(v_tol, "--tol");
                const auto samples =
                    default_classify_samples(phi_dim, n, seed, bf.parallelogram_only);
                const PullbackReport rep = check_pullback_type(bf.w, phi, samples, tol);
                add_inputs(inputs, "form", v_form);
                add_inputs(inputs, "F", v_F);
                add_inputs(inputs, "X", v_X);
                add_inputs(inputs, "A", v_A);
                add_inputs(inputs, "a", v_a);
                add_inputs(inputs, "b", v_b);
                inputs["phi"] = v_phi;
                inputs["dim"] = phi_dim;
                inputs["samples"] = n;
                inputs["seed"] = seed;
                inputs["tol"] = tol;
                emit(eo, "verify", inputs, to_json(rep), render_pullback(rep), clock.ms());
                return rep.pass ? 0 : 1;
            }
            throw Error("unknown checker \"" + v_checker +
                        "\" (expected stokes, relative-ftc, ftc2d, pullback-type, kock-lawvere, "
                        "convergence)");
        }

        // ------------------------------------------------------ derive
        if (derive_cmd->parsed()) {
            if (!d_config.empty()) derive_flags.merge_config(read_json_file(d_config));
            EmitOpts eo;
            if (!d_format.empty()) eo.format = d_format;
            eo.out = d_out;
            if (d_f.empty()) throw Error("derive needs --f");
            if (d_point.empty()) throw Error("derive needs --point");
            if (d_axes.empty()) throw Error("derive needs --axes");
            const ExprPtr f = parse(d_f);
            const RealVec point = parse_vector_arg(d_point, "--point");
            const std::vector<int> axes = parse_axes_arg(d_axes);
            const double value = mixed_partial(*f, axes, point);
            json inputs{{"f", d_f}, {"point", d_point}, {"axes", d_axes}};
            json result{{"value", value}};
            emit(eo, "derive", inputs, result, format_double(value) + "\n", clock.ms());
            return 0;
        }

        // --------------------------------------------------- integrate
        if (integrate_cmd->parsed()) {
            if (!i_config.empty()) integrate_flags.merge_config(read_json_file(i_config));
            EmitOpts eo;
            if (!i_format.empty()) eo.format = i_format;
            eo.out = i_out;
            FormOpts fo;
            fo.form = i_form;
            fo.F = i_F;
            fo.X = i_X;
            fo.A = i_A;
            fo.a = i_a;
            fo.b = i_b;
            if (!i_dim.empty())
                fo.dim = static_cast<int>(parse_int_arg(i_dim, "--dim", 1, kMaxVariables));
            BuiltForm bf = build_form2(fo);

            const auto& dc = bf.w.declared_character();
            if (!dc || dc->name != Character::Name::LeibnizFubini) {
                const std::string ty = dc ? character_name(dc->name) : std::string("undeclared");
                std::cerr << "error: only Leibniz-Fubini 2-forms can be integrated directly; "
                             "this form is "
                          << ty << "\n";
                return 1;
            }

            const RectDomain dom =
                i_domain.empty() ? RectDomain(0, 1, 0, 1) : parse_domain_arg(i_domain);
            const auto [m, n] = i_grid.empty() ? std::pair<int, int>{8, 8}
                                               : parse_grid_arg(i_grid);
            std::optional<GridTiling> t;
            if (!i_patch.empty())
                t.emplace(dom, m, n, FieldSpec::vector_field(i_patch, 2));
            else
                t.emplace(dom, m, n);
            const double value = integrate2(bf.w, *t);

            json inputs;
            add_inputs(inputs, "form", i_form);
            add_inputs(inputs, "F", i_F);
            add_inputs(inputs, "X", i_X);
            add_inputs(inputs, "A", i_A);
            add_inputs(inputs, "a", i_a);
            add_inputs(inputs, "b", i_b);
            add_inputs(inputs, "patch", i_patch);
            inputs["domain"] = i_domain.empty() ? "0,1,0,1" : i_domain;
            inputs["grid"] = std::to_string(m) + "x" + std::to_string(n);
            json result{{"value", value}, {"m", m}, {"n", n}};
            const std::string text = "integral = " + format_double(value) + "\n";
            emit(eo, "integrate", inputs, result, text, clock.ms());
            return 0;
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
