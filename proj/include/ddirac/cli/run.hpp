#ifndef DDIRAC_CLI_RUN_HPP
#define DDIRAC_CLI_RUN_HPP

// Running a configuration and emitting trajectory tables.
//
// One row per curve point x_k, k = 0..K:
//   k, q_1..q_n, p_1..p_n, qplus_1..qplus_n,
//   residual, inclusion_residual, constraint_residual, lambda_1..lambda_m
// Row k >= 1 carries the diagnostics of the k-th solve. Row 0 carries the
// seed's inclusion and constraint residuals (Lagrangian) or zeros
// (Hamiltonian). Numbers are printed with 17 significant digits.

#include <ddirac/cli/config.hpp>

#include <chrono>
#include <cstdio>
#include <ostream>
#include <vector>

namespace ddirac::cli {

struct RunSummary
{
    std::size_t steps_completed = 0;
    double max_residual = 0.0;
    double max_inclusion_residual = 0.0;
    double max_constraint_residual = 0.0;
    double wall_time_s = 0.0;
    std::optional<StepFailure> failure;
};

/// Shortest text that reads back to the same double.
inline std::string format_number(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline std::vector<std::string> column_names(Eigen::Index n, Eigen::Index m, bool diagnostics)
{
    std::vector<std::string> cols{"k"};
    for (const char* block : {"q", "p", "qplus"})
        for (Eigen::Index i = 1; i <= n; ++i) cols.push_back(std::string(block) + "_" + std::to_string(i));
    if (diagnostics) {
        cols.insert(cols.end(), {"residual", "inclusion_residual", "constraint_residual"});
        for (Eigen::Index i = 1; i <= m; ++i) cols.push_back("lambda_" + std::to_string(i));
    }
    return cols;
}

/// Table rows as numbers; column 0 is the integer index k.
inline std::vector<std::vector<double>> trajectory_rows(const Trajectory& traj, Eigen::Index m, bool diagnostics)
{
    std::vector<std::vector<double>> rows;
    rows.reserve(traj.curve.size());
    for (std::size_t k = 0; k < traj.curve.size(); ++k) {
        const PontryaginPoint& x = traj.curve.points[k];
        std::vector<double> row{static_cast<double>(k)};
        for (const Vector* block : {&x.q, &x.p, &x.qplus}) row.insert(row.end(), block->begin(), block->end());
        if (diagnostics) {
            if (k == 0) {
                row.push_back(0.0);
                row.push_back(traj.initial_data_residual);
                row.push_back(traj.initial_constraint_residual);
                row.insert(row.end(), static_cast<std::size_t>(m), 0.0);
            } else {
                const StepDiagnostics& d = traj.diagnostics[k - 1];
                row.push_back(d.residual);
                row.push_back(d.inclusion_residual);
                row.push_back(d.constraint_residual);
                row.insert(row.end(), d.multipliers.begin(), d.multipliers.end());
            }
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

inline void write_csv(std::ostream& out, const Trajectory& traj, Eigen::Index n, Eigen::Index m, bool diagnostics)
{
    const auto cols = column_names(n, m, diagnostics);
    for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
    out << '\n';
    for (const auto& row : trajectory_rows(traj, m, diagnostics)) {
        out << static_cast<long long>(row[0]);
        for (std::size_t i = 1; i < row.size(); ++i) out << ',' << format_number(row[i]);
        out << '\n';
    }
}

inline RunSummary summarize(const Trajectory& traj, double wall_time_s)
{
    RunSummary s;
    s.steps_completed = traj.steps_completed();
    for (const auto& d : traj.diagnostics) {
        s.max_residual = std::max(s.max_residual, d.residual);
        s.max_inclusion_residual = std::max(s.max_inclusion_residual, d.inclusion_residual);
        s.max_constraint_residual = std::max(s.max_constraint_residual, d.constraint_residual);
    }
    s.wall_time_s = wall_time_s;
    s.failure = traj.failure;
    return s;
}

inline nlohmann::json summary_json(const RunSummary& s)
{
    nlohmann::json j{{"steps_completed", s.steps_completed},
                     {"max_residual", s.max_residual},
                     {"max_inclusion_residual", s.max_inclusion_residual},
                     {"max_constraint_residual", s.max_constraint_residual},
                     {"wall_time_s", s.wall_time_s}};
    if (s.failure) j["failure"] = {{"step", s.failure->step}, {"message", s.failure->message}};
    return j;
}

inline void write_json(std::ostream& out, const RunConfig& cfg, const Trajectory& traj, Eigen::Index m,
                       const RunSummary& summary)
{
    using nlohmann::json;
    json meta{{"system", builtin::to_string(cfg.system)},
              {"formulation", to_string(cfg.formulation)},
              {"n", cfg.n},
              {"m", m},
              {"steps", cfg.steps},
              {"h", cfg.params.h},
              {"lambda", cfg.params.lambda},
              {"masses", std::vector<double>(cfg.params.masses.begin(), cfg.params.masses.end())},
              {"solver",
               {{"tol", cfg.solver.tol},
                {"max_iter", cfg.solver.max_iter},
                {"damping", cfg.solver.damping},
                {"predictor", to_string(cfg.solver.predictor)},
                {"check_jacobian", cfg.solver.check_jacobian}}},
              {"columns", column_names(cfg.n, m, cfg.diagnostics)},
              {"warnings", traj.warnings}};
    json rows = json::array();
    for (const auto& row : trajectory_rows(traj, m, cfg.diagnostics)) {
        json r = json::array();
        r.push_back(static_cast<long long>(row[0]));
        for (std::size_t i = 1; i < row.size(); ++i) r.push_back(row[i]);
        rows.push_back(std::move(r));
    }
    json doc{{"metadata", std::move(meta)}, {"rows", std::move(rows)}, {"summary", summary_json(summary)}};
    // nlohmann prints doubles with round-trip precision.
    out << doc.dump(2) << '\n';
}

inline void print_summary(std::ostream& out, const RunSummary& s)
{
    out << "steps_completed: " << s.steps_completed << '\n'
        << "max_residual: " << format_number(s.max_residual) << '\n'
        << "max_inclusion_residual: " << format_number(s.max_inclusion_residual) << '\n'
        << "max_constraint_residual: " << format_number(s.max_constraint_residual) << '\n'
        << "wall_time_s: " << s.wall_time_s << '\n';
    if (s.failure) out << "failed_step: " << s.failure->step << '\n';
}

struct RunOutcome
{
    Trajectory trajectory;
    RunSummary summary;
};

/// Runs `cfg` and writes the table to `data` in the configured format.
inline RunOutcome run(const RunConfig& cfg, std::ostream& data)
{
    const DiscreteSystem sys = make_system(cfg);
    const Seed seed = make_seed(cfg, sys);
    const auto start = std::chrono::steady_clock::now();
    RunOutcome out{run_trajectory(sys, seed, cfg.steps, cfg.solver), {}};
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    out.summary = summarize(out.trajectory, wall);
    if (cfg.output.format == OutputFormat::csv)
        write_csv(data, out.trajectory, cfg.n, sys.m(), cfg.diagnostics);
    else
        write_json(data, cfg, out.trajectory, sys.m(), out.summary);
    return out;
}

} // namespace ddirac::cli

#endif // DDIRAC_CLI_RUN_HPP
