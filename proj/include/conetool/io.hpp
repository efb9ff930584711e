// io.hpp — report emission and config ingestion.
//
// Reports are written with a small deterministic JSON emitter: insertion-
// ordered keys and %.17g floating-point formatting, so reruns with the same
// config are byte-identical.  Configs and golden files are parsed with
// nlohmann/json.  Field data travels as columnar CSV: x, then one re/im
// column pair per mode, one file per time stamp.

#pragma once

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "freezeflow.hpp"
#include "indicial.hpp"
#include "mesh.hpp"
#include "meshnorm.hpp"
#include "operators.hpp"
#include "solve.hpp"
#include "spectrum.hpp"

namespace conetool {

// ── Deterministic JSON value ─────────────────────────────────────────────
struct JValue {
    enum class Type { Null, Bool, Int, Real, Str, Arr, Obj };
    Type type = Type::Null;
    bool b = false;
    long long i = 0;
    double d = 0.0;
    std::string s;
    std::vector<JValue> arr;
    std::vector<std::pair<std::string, JValue>> obj;

    JValue() = default;
    JValue(bool v) : type(Type::Bool), b(v) {}
    JValue(int v) : type(Type::Int), i(v) {}
    JValue(long long v) : type(Type::Int), i(v) {}
    JValue(std::size_t v) : type(Type::Int), i(static_cast<long long>(v)) {}
    JValue(double v) : type(Type::Real), d(v) {}
    JValue(const char* v) : type(Type::Str), s(v) {}
    JValue(std::string v) : type(Type::Str), s(std::move(v)) {}

    static JValue object() {
        JValue v;
        v.type = Type::Obj;
        return v;
    }
    static JValue array() {
        JValue v;
        v.type = Type::Arr;
        return v;
    }

    JValue& set(const std::string& key, JValue v) {
        obj.push_back({key, std::move(v)});
        return *this;
    }
    JValue& push(JValue v) {
        arr.push_back(std::move(v));
        return *this;
    }

    static std::string escape(const std::string& in) {
        std::string out;
        for (char c : in) {
            switch (c) {
                case '"': out += "\\\""; break;
                case '\\': out += "\\\\"; break;
                case '\n': out += "\\n"; break;
                case '\t': out += "\\t"; break;
                default: out += c;
            }
        }
        return out;
    }

    static std::string real17(double v) {
        if (v == 0.0) v = 0.0;  // normalize −0
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return buf;
    }

    void dump(std::string& out, int depth, int indent) const {
        const std::string pad(static_cast<std::size_t>(depth) * indent, ' ');
        const std::string pad1(static_cast<std::size_t>(depth + 1) * indent, ' ');
        switch (type) {
            case Type::Null: out += "null"; break;
            case Type::Bool: out += b ? "true" : "false"; break;
            case Type::Int: out += std::to_string(i); break;
            case Type::Real: out += real17(d); break;
            case Type::Str:
                out += '"';
                out += escape(s);
                out += '"';
                break;
            case Type::Arr:
                if (arr.empty()) {
                    out += "[]";
                    break;
                }
                out += "[\n";
                for (std::size_t k = 0; k < arr.size(); ++k) {
                    out += pad1;
                    arr[k].dump(out, depth + 1, indent);
                    if (k + 1 < arr.size()) out += ',';
                    out += '\n';
                }
                out += pad + "]";
                break;
            case Type::Obj:
                if (obj.empty()) {
                    out += "{}";
                    break;
                }
                out += "{\n";
                for (std::size_t k = 0; k < obj.size(); ++k) {
                    out += pad1 + '"' + escape(obj[k].first) + "\": ";
                    obj[k].second.dump(out, depth + 1, indent);
                    if (k + 1 < obj.size()) out += ',';
                    out += '\n';
                }
                out += pad + "}";
                break;
        }
    }

    std::string dump(int indent = 2) const {
        std::string out;
        dump(out, 0, indent);
        out += '\n';
        return out;
    }
};

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << text;
}

inline std::string read_text(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot read " + path.string());
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

// FNV-1a over a canonical string; stable across runs and platforms.
inline std::string fnv1a_hex(const std::string& data) {
    unsigned long long h = 1469598103934665603ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", h);
    return buf;
}

// ── Serialization ────────────────────────────────────────────────────────
inline JValue spectrum_json(const ModeSpectrum& s) {
    JValue j = JValue::object();
    j.set("n", s.n);
    JValue entries = JValue::array();
    for (const auto& e : s.entries) {
        JValue row = JValue::object();
        row.set("lambda", e.lambda);
        row.set("mult", e.multiplicity);
        entries.push(std::move(row));
    }
    j.set("entries", std::move(entries));
    j.set("l_max", s.l_max);
    return j;
}

inline ModeSpectrum parse_spectrum(const nlohmann::json& j) {
    std::vector<std::pair<double, int>> pairs;
    for (const auto& e : j.at("entries"))
        pairs.push_back({e.at("lambda").get<double>(), e.at("mult").get<int>()});
    ModeSpectrum s = custom_spectrum(pairs, j.at("n").get<int>());
    if (j.contains("l_max")) s.l_max = j.at("l_max").get<int>();
    return s;
}

inline JValue strip_json(const Strip& st) {
    JValue j = JValue::object();
    const char* kind = st.kind == Strip::Kind::I ? "I" : st.kind == Strip::Kind::S ? "S" : "V";
    j.set("kind", kind);
    j.set("re_min", st.re_min);
    j.set("re_max", st.re_max);
    j.set("re_max_inclusive", st.max_inclusive);
    return j;
}

inline JValue q_set_json(const QSetResult& q) {
    JValue j = JValue::object();
    j.set("n", q.n);
    j.set("gamma", q.gamma);
    j.set("k", q.k);
    j.set("strip", strip_json(q.strip));
    j.set("complete", q.complete);
    j.set("gamma_in_window", q.gamma_in_window);
    j.set("superset", q.superset);
    JValue roots = JValue::array();
    for (const auto& r : q.roots) {
        JValue row = JValue::object();
        row.set("rho_re", r.rho.real());
        row.set("rho_im", r.rho.imag());
        row.set("eta", r.eta);
        row.set("x_exponent", r.x_exponent.real());
        JValue sources = JValue::array();
        for (const auto& s : r.sources) {
            JValue src = JValue::object();
            src.set("mode", s.mode);
            src.set("nu", s.nu);
            src.set("mult", s.factor_multiplicity);
            sources.push(std::move(src));
        }
        row.set("sources", std::move(sources));
        if (r.boundary_ambiguous) row.set("boundary_ambiguous", true);
        roots.push(std::move(row));
    }
    j.set("roots", std::move(roots));
    JValue conv = JValue::object();
    conv.set("as_written", "log powers eta in {0,...,eta_rho}");
    conv.set("alternative", "standard convention eta <= eta_rho - 1");
    j.set("log_power_convention", std::move(conv));
    if (!q.warnings.empty()) {
        JValue w = JValue::array();
        for (const auto& s : q.warnings) w.push(s);
        j.set("warnings", std::move(w));
    }
    return j;
}

inline JValue window_json(const ParameterWindow& w) {
    JValue j = JValue::object();
    j.set("name", w.name);
    j.set("lo", w.lo);
    j.set("hi", w.hi);
    j.set("lo_open", w.lo_open);
    j.set("hi_open", w.hi_open);
    j.set("admissible", w.admissible);
    JValue cs = JValue::array();
    for (const auto& c : w.constraints) {
        JValue row = JValue::object();
        row.set("constraint", c.description);
        row.set("lhs", c.lhs);
        row.set("rhs", c.rhs);
        row.set("satisfied", c.satisfied);
        cs.push(std::move(row));
    }
    j.set("constraints", std::move(cs));
    return j;
}

inline JValue fit_json(int mode, const FitResult& f) {
    JValue j = JValue::object();
    j.set("mode", mode);
    j.set("alpha", f.alpha);
    j.set("log_power", f.log_power);
    j.set("residual", f.residual);
    JValue w = JValue::array();
    w.push(f.x_lo);
    w.push(f.x_hi);
    j.set("window", std::move(w));
    j.set("points", f.points);
    if (f.tip_constant != 0.0) {
        j.set("tip_constant_re", f.tip_constant.real());
        j.set("tip_constant_im", f.tip_constant.imag());
    }
    return j;
}

inline JValue deviations_json(const ConeModel& model) {
    JValue j = JValue::object();
    std::string bc = model.outer_bc.type == OuterBC::Type::Neumann
                         ? "neumann"
                         : "dirichlet(" + JValue::real17(model.outer_bc.value) + ")";
    j.set("outer_bc", bc);
    j.set("model_cone_surrogate",
          "full manifold replaced by the model cone x in (0,1] with an outer boundary condition");
    JValue om = JValue::object();
    om.set("one_until", kOmegaOne);
    om.set("zero_from", kOmegaZero);
    j.set("omega", std::move(om));
    return j;
}

inline JValue model_json(const ConeModel& model) {
    JValue j = JValue::object();
    JValue cs = JValue::object();
    switch (model.cross->kind) {
        case CrossSection::Kind::Circle:
            cs.set("kind", "circle");
            cs.set("a", model.cross->radius);
            break;
        case CrossSection::Kind::RoundSphere:
            cs.set("kind", "sphere");
            cs.set("n", model.cross->dim);
            cs.set("a", model.cross->radius);
            break;
        case CrossSection::Kind::Custom: {
            cs.set("kind", "custom");
            cs.set("n", model.cross->dim);
            JValue pairs = JValue::array();
            for (const auto& [lam, mult] : model.cross->custom) {
                JValue p = JValue::array();
                p.push(lam);
                p.push(mult);
                pairs.push(std::move(p));
            }
            cs.set("pairs", std::move(pairs));
            break;
        }
    }
    j.set("cross_section", std::move(cs));
    j.set("l_max", model.l_max);
    JValue mesh = JValue::object();
    mesh.set("grading",
             model.mesh->grading == RadialMesh::Grading::Geometric ? "geometric" : "power");
    mesh.set("N", model.mesh->N);
    if (model.mesh->grading == RadialMesh::Grading::Geometric)
        mesh.set("x0", model.mesh->x(0));
    else
        mesh.set("beta", model.mesh->beta);
    j.set("mesh", std::move(mesh));
    JValue bc = JValue::object();
    bc.set("type", model.outer_bc.type == OuterBC::Type::Neumann ? "neumann" : "dirichlet");
    if (model.outer_bc.type == OuterBC::Type::Dirichlet) bc.set("value", model.outer_bc.value);
    j.set("outer_bc", std::move(bc));
    return j;
}

inline ConeModel parse_model(const nlohmann::json& j) {
    const auto& cs = j.at("cross_section");
    std::string kind = cs.at("kind").get<std::string>();
    CrossSection cross = CrossSection::circle(1.0);
    if (kind == "circle")
        cross = CrossSection::circle(cs.at("a").get<double>());
    else if (kind == "sphere")
        cross = CrossSection::round_sphere(cs.at("n").get<int>(), cs.at("a").get<double>());
    else if (kind == "custom") {
        std::vector<std::pair<double, int>> pairs;
        for (const auto& p : cs.at("pairs"))
            pairs.push_back({p.at(0).get<double>(), p.at(1).get<int>()});
        cross = CrossSection::custom_list(pairs, cs.at("n").get<int>());
    } else
        throw std::invalid_argument("parse_model: unknown cross_section kind '" + kind + "'");

    const auto& mj = j.at("mesh");
    std::string grading = mj.value("grading", "geometric");
    RadialMesh mesh = RadialMesh::geometric(mj.at("N").get<int>(), mj.value("x0", 1e-6));
    if (grading == "power")
        mesh = RadialMesh::power_law(mj.at("N").get<int>(), mj.at("beta").get<double>());
    else if (grading != "geometric")
        throw std::invalid_argument("parse_model: unknown grading '" + grading + "'");

    OuterBC bc = OuterBC::dirichlet();
    if (j.contains("outer_bc")) {
        std::string t = j.at("outer_bc").at("type").get<std::string>();
        if (t == "neumann")
            bc = OuterBC::neumann();
        else if (t == "dirichlet")
            bc = OuterBC::dirichlet(j.at("outer_bc").value("value", 0.0));
        else
            throw std::invalid_argument("parse_model: unknown outer_bc '" + t + "'");
    }
    return ConeModel::make(cross, mesh, bc, j.value("l_max", 4));
}

inline JValue solver_config_json(const SolverConfig& c, const std::string& problem) {
    JValue j = JValue::object();
    j.set("time_stepper",
          c.time_stepper == SolverConfig::Stepper::BackwardEuler ? "backward_euler" : "trbdf2");
    j.set("dt", c.dt);
    j.set("t_end", c.t_end);
    if (problem == "pme") {
        j.set("m", c.m);
        j.set("pme_form", c.pme_form == PmeForm::Transformed ? "transformed" : "direct");
        j.set("newton_tol", c.newton_tol);
        j.set("max_newton", c.max_newton);
    }
    if (problem == "sh") {
        j.set("imex_split", c.imex_split);
        JValue V = JValue::array();
        for (const auto& cd : c.V.coeffs) {
            JValue row = JValue::array();
            for (double a : cd) row.push(a);
            V.push(std::move(row));
        }
        j.set("V", std::move(V));
        j.set("growth_guard", c.growth_guard);
    }
    return j;
}

inline SolverConfig parse_solver_config(const nlohmann::json& j) {
    SolverConfig c;
    std::string st = j.value("time_stepper", "trbdf2");
    if (st == "backward_euler")
        c.time_stepper = SolverConfig::Stepper::BackwardEuler;
    else if (st == "trbdf2")
        c.time_stepper = SolverConfig::Stepper::TrBdf2;
    else
        throw std::invalid_argument("parse_solver_config: unknown time_stepper '" + st + "'");
    c.dt = j.at("dt").get<double>();
    c.t_end = j.at("t_end").get<double>();
    c.m = j.value("m", 1.0);
    std::string form = j.value("pme_form", "transformed");
    if (form == "direct")
        c.pme_form = PmeForm::Direct;
    else if (form != "transformed")
        throw std::invalid_argument("parse_solver_config: unknown pme_form '" + form + "'");
    c.newton_tol = j.value("newton_tol", 1e-10);
    c.max_newton = j.value("max_newton", 25);
    c.imex_split = j.value("imex_split", true);
    c.growth_guard = j.value("growth_guard", 100.0);
    if (j.contains("V"))
        for (const auto& row : j.at("V")) {
            std::vector<double> cd;
            for (const auto& a : row) cd.push_back(a.get<double>());
            c.V.coeffs.push_back(std::move(cd));
        }
    return c;
}

// ── Field CSV ────────────────────────────────────────────────────────────
inline void write_field_csv(const std::filesystem::path& path, const ConeField& f) {
    std::ostringstream out;
    out << "x";
    for (const auto& mp : f.modes) out << ",mode_" << mp.m << "_re,mode_" << mp.m << "_im";
    out << "\n";
    for (int i = 0; i < f.mesh->size(); ++i) {
        out << JValue::real17(f.mesh->x(i));
        for (const auto& mp : f.modes)
            out << ',' << JValue::real17(mp.v(i).real()) << ',' << JValue::real17(mp.v(i).imag());
        out << "\n";
    }
    write_text(path, out.str());
}

inline ConeField read_field_csv(const std::filesystem::path& path, const ConeModel& model) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot read " + path.string());
    std::string header;
    std::getline(f, header);
    std::vector<int> mode_labels;
    {
        std::stringstream hs(header);
        std::string col;
        std::getline(hs, col, ',');  // x
        while (std::getline(hs, col, ',')) {
            if (col.rfind("mode_", 0) == 0 && col.size() > 8 &&
                col.compare(col.size() - 3, 3, "_re") == 0)
                mode_labels.push_back(std::stoi(col.substr(5, col.size() - 8)));
        }
    }
    ConeField out;
    out.mesh = model.mesh;
    out.cross = model.cross;
    for (int m : mode_labels) out.modes.push_back({m, Eigen::VectorXcd::Zero(model.mesh->size())});
    std::string line;
    int row = 0;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        std::stringstream ls(line);
        std::string cell;
        std::getline(ls, cell, ',');
        for (std::size_t m = 0; m < mode_labels.size(); ++m) {
            std::getline(ls, cell, ',');
            double re = std::stod(cell);
            std::getline(ls, cell, ',');
            double im = std::stod(cell);
            out.modes[m].v(row) = Complex(re, im);
        }
        ++row;
    }
    if (row != model.mesh->size())
        throw std::runtime_error("read_field_csv: row count does not match the mesh");
    return out;
}

// ── Trajectory directory ─────────────────────────────────────────────────
inline void write_trajectory(const std::filesystem::path& dir, const Trajectory& traj) {
    std::filesystem::create_directories(dir);
    JValue manifest = JValue::object();
    manifest.set("problem", traj.problem);
    JValue mj = model_json(traj.model);
    manifest.set("model_hash", fnv1a_hex(mj.dump()));
    manifest.set("model", std::move(mj));
    manifest.set("config", solver_config_json(traj.config, traj.problem));
    manifest.set("scheme", traj.config.time_stepper == SolverConfig::Stepper::BackwardEuler
                               ? "backward_euler"
                               : "trbdf2");
    manifest.set("dt", traj.config.dt);
    JValue times = JValue::array();
    JValue files = JValue::array();
    for (std::size_t k = 0; k < traj.slices.size(); ++k) {
        char name[32];
        std::snprintf(name, sizeof(name), "t_%06zu.csv", k);
        times.push(traj.slices[k].t);
        files.push(std::string(name));
        write_field_csv(dir / name, traj.slices[k]);
    }
    manifest.set("times", std::move(times));
    manifest.set("files", std::move(files));
    manifest.set("complete", true);
    manifest.set("deviations", deviations_json(traj.model));
    write_text(dir / "manifest.json", manifest.dump());
}

inline Trajectory read_trajectory(const std::filesystem::path& dir) {
    nlohmann::json manifest = nlohmann::json::parse(read_text(dir / "manifest.json"));
    Trajectory traj;
    traj.problem = manifest.at("problem").get<std::string>();
    traj.model = parse_model(manifest.at("model"));
    traj.config = parse_solver_config(manifest.at("config"));
    const auto& times = manifest.at("times");
    const auto& files = manifest.at("files");
    for (std::size_t k = 0; k < files.size(); ++k) {
        ConeField f = read_field_csv(dir / files[k].get<std::string>(), traj.model);
        f.t = times[k].get<double>();
        traj.slices.push_back(std::move(f));
    }
    return traj;
}

// ── Report comparison ────────────────────────────────────────────────────
struct CompareResult {
    bool schema_mismatch = false;
    std::vector<std::string> diffs;
    bool ok() const { return !schema_mismatch && diffs.empty(); }
};

inline void compare_json(const nlohmann::json& a, const nlohmann::json& b, double tol_abs,
                         double tol_rel, const std::string& path, CompareResult& res) {
    if (a.is_object() && b.is_object()) {
        for (auto it = a.begin(); it != a.end(); ++it) {
            if (!b.contains(it.key())) {
                res.schema_mismatch = true;
                res.diffs.push_back(path + "/" + it.key() + ": missing in golden");
                continue;
            }
            compare_json(it.value(), b.at(it.key()), tol_abs, tol_rel, path + "/" + it.key(), res);
        }
        for (auto it = b.begin(); it != b.end(); ++it)
            if (!a.contains(it.key())) {
                res.schema_mismatch = true;
                res.diffs.push_back(path + "/" + it.key() + ": missing in report");
            }
        return;
    }
    if (a.is_array() && b.is_array()) {
        if (a.size() != b.size()) {
            res.schema_mismatch = true;
            res.diffs.push_back(path + ": array size " + std::to_string(a.size()) + " vs " +
                                std::to_string(b.size()));
            return;
        }
        for (std::size_t k = 0; k < a.size(); ++k)
            compare_json(a[k], b[k], tol_abs, tol_rel, path + "[" + std::to_string(k) + "]", res);
        return;
    }
    if (a.is_number() && b.is_number()) {
        double x = a.get<double>(), y = b.get<double>();
        double diff = std::abs(x - y);
        if (diff > tol_abs && diff > tol_rel * std::max(std::abs(x), std::abs(y)))
            res.diffs.push_back(path + ": " + JValue::real17(x) + " vs " + JValue::real17(y));
        return;
    }
    if (a != b) {
        if (a.type() != b.type()) {
            res.schema_mismatch = true;
            res.diffs.push_back(path + ": type mismatch");
        } else {
            res.diffs.push_back(path + ": " + a.dump() + " vs " + b.dump());
        }
    }
}

inline CompareResult compare_reports(const nlohmann::json& report, const nlohmann::json& golden,
                                     double tol_abs, double tol_rel) {
    CompareResult res;
    compare_json(report, golden, tol_abs, tol_rel, "", res);
    return res;
}

}  // namespace conetool
