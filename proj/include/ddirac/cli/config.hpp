#ifndef DDIRAC_CLI_CONFIG_HPP
#define DDIRAC_CLI_CONFIG_HPP

// JSON run configuration for the ddirac command-line tool.
//
//   {
//     "system": "harmonic_oscillator",   // | free_particle | nonholonomic_particle
//     "formulation": "lagrangian",        // | hamiltonian
//     "h": 0.1, "lambda": 1.0, "masses": [1.0],
//     "seed": [0, 0.1],                   // [q0, q1] or, Hamiltonian, [q0, p0]
//     "p0": [1.0],                        // optional, Lagrangian only
//     "steps": 10,
//     "solver": {"tol": 1e-10, "max_iter": 50, "damping": true,
//                "predictor": "extrapolate", "check_jacobian": false},
//     "output": {"path": "out.csv", "format": "csv"},
//     "diagnostics": true
//   }

#include <ddirac/builtin.hpp>
#include <ddirac/stepper.hpp>

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

namespace ddirac::cli {

/// Configuration problem. `field()` names the offending key (empty for
/// syntax errors) and `line()` is 1-based when known, 0 otherwise.
class ConfigError : public InvalidInput
{
public:
    ConfigError(const std::string& what, std::string field, std::size_t line = 0)
        : InvalidInput(what), field_(std::move(field)), line_(line)
    {
    }
    const std::string& field() const noexcept { return field_; }
    std::size_t line() const noexcept { return line_; }

private:
    std::string field_;
    std::size_t line_;
};

enum class OutputFormat { csv, json };

struct OutputSpec
{
    std::string path = "-"; ///< "-" writes to standard output
    OutputFormat format = OutputFormat::csv;
};

struct RunConfig
{
    builtin::SystemId system = builtin::SystemId::harmonic_oscillator;
    SystemKind formulation = SystemKind::lagrangian;
    builtin::Params params;
    Eigen::Index n = 1;
    /// [q0, q1] (Lagrangian) or [q0, p0] (Hamiltonian), 2n entries.
    Vector seed;
    std::optional<Vector> p0;
    std::size_t steps = 0;
    SolverOptions solver;
    OutputSpec output;
    bool diagnostics = true;
};

namespace detail {

using nlohmann::json;

inline void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& prefix)
{
    for (const auto& item : obj.items())
        if (!allowed.count(item.key())) {
            const std::string field = prefix + item.key();
            throw ConfigError("unknown key '" + field + "'", field);
        }
}

inline double number(const json& v, const std::string& field)
{
    if (!v.is_number()) throw ConfigError("'" + field + "' must be a number", field);
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ConfigError("'" + field + "' must be finite", field);
    return d;
}

inline Vector vector(const json& v, const std::string& field)
{
    if (!v.is_array()) throw ConfigError("'" + field + "' must be an array of numbers", field);
    Vector out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<Eigen::Index>(i)) = number(v[i], field);
    return out;
}

inline bool boolean(const json& v, const std::string& field)
{
    if (!v.is_boolean()) throw ConfigError("'" + field + "' must be true or false", field);
    return v.get<bool>();
}

inline std::string string(const json& v, const std::string& field)
{
    if (!v.is_string()) throw ConfigError("'" + field + "' must be a string", field);
    return v.get<std::string>();
}

inline std::size_t line_of(const std::string& text, std::size_t byte)
{
    byte = std::min(byte, text.size());
    return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<long>(byte), '\n'));
}

} // namespace detail

inline OutputFormat parse_format(const std::string& s, const std::string& field = "output.format")
{
    if (s == "csv") return OutputFormat::csv;
    if (s == "json") return OutputFormat::json;
    throw ConfigError("'" + field + "' must be 'csv' or 'json'", field);
}

inline const char* to_string(OutputFormat f) { return f == OutputFormat::csv ? "csv" : "json"; }

inline const char* to_string(Predictor p) { return p == Predictor::extrapolate ? "extrapolate" : "hold"; }

/// Parses and validates a JSON run configuration, applying defaults.
inline RunConfig parse_config(const std::string& text)
{
    using detail::json;
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        const std::size_t line = detail::line_of(text, e.byte == 0 ? 0 : e.byte - 1);
        throw ConfigError("parse error at line " + std::to_string(line) + ": " + e.what(), "", line);
    }
    if (!doc.is_object()) throw ConfigError("configuration must be a JSON object", "");

    detail::reject_unknown(doc,
                           {"system", "formulation", "h", "lambda", "masses", "seed", "p0", "steps", "solver",
                            "output", "diagnostics"},
                           "");

    RunConfig cfg;
    if (!doc.contains("system")) throw ConfigError("missing required key 'system'", "system");
    const std::string id = detail::string(doc["system"], "system");
    const auto sid = builtin::parse_system_id(id);
    if (!sid) throw ConfigError("unknown system '" + id + "'", "system");
    cfg.system = *sid;

    if (doc.contains("formulation")) {
        const std::string f = detail::string(doc["formulation"], "formulation");
        if (f == "lagrangian")
            cfg.formulation = SystemKind::lagrangian;
        else if (f == "hamiltonian")
            cfg.formulation = SystemKind::hamiltonian;
        else
            throw ConfigError("'formulation' must be 'lagrangian' or 'hamiltonian'", "formulation");
    }

    if (!doc.contains("h")) throw ConfigError("missing required key 'h'", "h");
    cfg.params.h = detail::number(doc["h"], "h");
    if (!(cfg.params.h > 0.0)) throw ConfigError("'h' must be positive", "h");

    switch (cfg.system) {
    case builtin::SystemId::harmonic_oscillator:
        if (!doc.contains("lambda")) throw ConfigError("harmonic_oscillator requires 'lambda'", "lambda");
        break;
    case builtin::SystemId::free_particle:
        if (doc.contains("lambda")) throw ConfigError("free_particle takes no 'lambda'", "lambda");
        break;
    case builtin::SystemId::nonholonomic_particle: break;
    }
    if (doc.contains("lambda")) {
        cfg.params.lambda = detail::number(doc["lambda"], "lambda");
        if (cfg.params.lambda < 0.0) throw ConfigError("'lambda' must be nonnegative", "lambda");
    }

    if (!doc.contains("seed")) throw ConfigError("missing required key 'seed'", "seed");
    cfg.seed = detail::vector(doc["seed"], "seed");
    if (cfg.seed.size() == 0 || cfg.seed.size() % 2 != 0)
        throw ConfigError("'seed' must hold 2n numbers", "seed");
    switch (cfg.system) {
    case builtin::SystemId::harmonic_oscillator: cfg.n = 1; break;
    case builtin::SystemId::nonholonomic_particle: cfg.n = 3; break;
    case builtin::SystemId::free_particle: cfg.n = cfg.seed.size() / 2; break;
    }
    if (cfg.seed.size() != 2 * cfg.n)
        throw ConfigError("'seed' must hold " + std::to_string(2 * cfg.n) + " numbers for " + id, "seed");

    if (doc.contains("masses")) {
        cfg.params.masses = detail::vector(doc["masses"], "masses");
        if (cfg.params.masses.size() != cfg.n)
            throw ConfigError("'masses' must hold " + std::to_string(cfg.n) + " numbers", "masses");
        if (!(cfg.params.masses.array() > 0.0).all()) throw ConfigError("'masses' must be positive", "masses");
    } else {
        cfg.params.masses = Vector::Ones(cfg.n);
    }

    if (doc.contains("p0")) {
        if (cfg.formulation != SystemKind::lagrangian)
            throw ConfigError("'p0' applies to the lagrangian formulation only (put p0 in 'seed')", "p0");
        Vector p0 = detail::vector(doc["p0"], "p0");
        if (p0.size() != cfg.n) throw ConfigError("'p0' must hold " + std::to_string(cfg.n) + " numbers", "p0");
        cfg.p0 = std::move(p0);
    }

    if (!doc.contains("steps")) throw ConfigError("missing required key 'steps'", "steps");
    const json& steps = doc["steps"];
    if (!steps.is_number_integer()) throw ConfigError("'steps' must be an integer", "steps");
    if (steps.get<long long>() < 0) throw ConfigError("'steps' must be nonnegative", "steps");
    cfg.steps = steps.get<std::size_t>();

    if (doc.contains("solver")) {
        const json& s = doc["solver"];
        if (!s.is_object()) throw ConfigError("'solver' must be an object", "solver");
        detail::reject_unknown(s, {"tol", "max_iter", "damping", "predictor", "check_jacobian"}, "solver.");
        if (s.contains("tol")) {
            cfg.solver.tol = detail::number(s["tol"], "solver.tol");
            if (!(cfg.solver.tol > 0.0)) throw ConfigError("'solver.tol' must be positive", "solver.tol");
        }
        if (s.contains("max_iter")) {
            if (!s["max_iter"].is_number_integer() || s["max_iter"].get<long long>() < 1)
                throw ConfigError("'solver.max_iter' must be a positive integer", "solver.max_iter");
            cfg.solver.max_iter = s["max_iter"].get<int>();
        }
        if (s.contains("damping")) cfg.solver.damping = detail::boolean(s["damping"], "solver.damping");
        if (s.contains("predictor")) {
            const std::string p = detail::string(s["predictor"], "solver.predictor");
            if (p == "extrapolate")
                cfg.solver.predictor = Predictor::extrapolate;
            else if (p == "hold")
                cfg.solver.predictor = Predictor::hold;
            else
                throw ConfigError("'solver.predictor' must be 'extrapolate' or 'hold'", "solver.predictor");
        }
        if (s.contains("check_jacobian"))
            cfg.solver.check_jacobian = detail::boolean(s["check_jacobian"], "solver.check_jacobian");
    }

    if (doc.contains("output")) {
        const json& o = doc["output"];
        if (!o.is_object()) throw ConfigError("'output' must be an object", "output");
        detail::reject_unknown(o, {"path", "format"}, "output.");
        if (o.contains("path")) {
            cfg.output.path = detail::string(o["path"], "output.path");
            if (cfg.output.path.empty()) throw ConfigError("'output.path' must not be empty", "output.path");
        }
        if (o.contains("format")) cfg.output.format = parse_format(detail::string(o["format"], "output.format"));
    }

    if (doc.contains("diagnostics")) cfg.diagnostics = detail::boolean(doc["diagnostics"], "diagnostics");
    return cfg;
}

inline RunConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open configuration file '" + path + "'", "");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

inline DiscreteSystem make_system(const RunConfig& cfg)
{
    return builtin::make_system(cfg.system, cfg.params, cfg.formulation);
}

/// Lagrangian: (q0, p0, q1) with p0 = -D1 L_d(q0, q1) unless given.
/// Hamiltonian: (q0, p0).
inline Seed make_seed(const RunConfig& cfg, const DiscreteSystem& sys)
{
    const Vector first = cfg.seed.head(cfg.n);
    const Vector second = cfg.seed.tail(cfg.n);
    if (cfg.formulation == SystemKind::hamiltonian) return CanonicalState{first, second};
    if (cfg.p0) return PontryaginPoint(first, *cfg.p0, second);
    return consistent_initial_point(sys.lag(), first, second);
}

} // namespace ddirac::cli

#endif // DDIRAC_CLI_CONFIG_HPP
