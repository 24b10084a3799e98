#ifndef DDIRAC_NEWTON_HPP
#define DDIRAC_NEWTON_HPP

#include <ddirac/derivatives.hpp>

#include <cmath>
#include <functional>
#include <limits>
#include <string>

namespace ddirac {

/// Initial guess for the unknown next configuration.
enum class Predictor {
    extrapolate, ///< constant velocity: 2 q_{k+1} - q_k
    hold,        ///< q_{k+1}
};

struct SolverOptions
{
    double tol = 1e-10;   ///< on |F|_inf
    int max_iter = 50;
    bool damping = true;  ///< halving line search on |F|_inf
    double min_step = 1.0 / 1048576.0; // 2^-20
    Predictor predictor = Predictor::extrapolate;
    bool check_jacobian = false; ///< compare assembled Jacobians with finite differences
    double max_condition = 1e14; ///< Newton matrices above this are treated as singular

    void validate() const
    {
        if (!(tol > 0.0)) throw InvalidInput("SolverOptions: tol must be positive");
        if (max_iter < 1) throw InvalidInput("SolverOptions: max_iter must be at least 1");
        if (!(min_step > 0.0 && min_step <= 1.0)) throw InvalidInput("SolverOptions: min_step must be in (0, 1]");
        if (!(max_condition > 1.0)) throw InvalidInput("SolverOptions: max_condition must exceed 1");
    }
};

struct NewtonResult
{
    Vector root;
    int iterations = 0;
    double residual = 0.0;
    double condition = 1.0; ///< of the last Newton matrix (1 if none was formed)
};

using ResidualFn = std::function<Vector(const Vector&)>;
using JacobianFn = std::function<Matrix(const Vector&)>;

inline double condition_number(const Matrix& j)
{
    if (j.size() == 0) return 1.0;
    Eigen::JacobiSVD<Matrix> svd(j);
    const auto& s = svd.singularValues();
    const double smin = s(s.size() - 1);
    if (!(smin > 0.0)) return std::numeric_limits<double>::infinity();
    return s(0) / smin;
}

/// Damped Newton for a square system F(x) = 0. `jac` may be empty, in which
/// case central differences of F are used.
inline NewtonResult newton_solve(const ResidualFn& f, const JacobianFn& jac, const Vector& x0,
                                 const SolverOptions& opts)
{
    opts.validate();
    auto eval = [&](const Vector& x) {
        Vector r = detail::guarded("residual", f, x);
        if (r.size() != x.size())
            throw InvalidInput("newton_solve: residual has dimension " + std::to_string(r.size()) +
                               ", unknowns " + std::to_string(x.size()));
        return r;
    };
    auto norm = [](const Vector& r) { return r.size() == 0 ? 0.0 : r.cwiseAbs().maxCoeff(); };

    NewtonResult out;
    out.root = x0;
    Vector r = eval(out.root);
    out.residual = norm(r);
    if (!std::isfinite(out.residual)) throw EvaluationError("newton_solve: non-finite residual at initial guess");

    while (out.residual > opts.tol) {
        if (out.iterations >= opts.max_iter)
            throw ConvergenceError("Newton iteration did not converge in " + std::to_string(opts.max_iter) +
                                       " iterations (residual " + std::to_string(out.residual) + ")",
                                   out.residual);
        const Matrix j = jac ? detail::guarded("Jacobian", jac, out.root) : fd::jacobian(eval, out.root);
        if (j.rows() != out.root.size() || j.cols() != out.root.size())
            throw InvalidInput("newton_solve: Jacobian has wrong shape");
        if (opts.check_jacobian && jac) {
            const double err = fd::relative_error(j, fd::jacobian(eval, out.root));
            if (!(err < kPartialConsistencyTol))
                throw EvaluationError("newton_solve: Jacobian disagrees with finite differences (rel. error " +
                                      std::to_string(err) + ")");
        }
        out.condition = condition_number(j);
        if (!(out.condition < opts.max_condition))
            throw SingularityError("Newton matrix is singular (condition estimate " + std::to_string(out.condition) +
                                       ")",
                                   out.condition);
        const Vector dx = j.fullPivLu().solve(-r);

        double t = 1.0;
        Vector trial = out.root + dx;
        Vector rt = eval(trial);
        if (opts.damping) {
            while (!(norm(rt) < out.residual) && t * 0.5 >= opts.min_step) {
                t *= 0.5;
                trial = out.root + t * dx;
                rt = eval(trial);
            }
        }
        out.root = std::move(trial);
        r = std::move(rt);
        out.residual = norm(r);
        ++out.iterations;
        if (!std::isfinite(out.residual))
            throw EvaluationError("newton_solve: residual became non-finite at iteration " +
                                  std::to_string(out.iterations));
    }
    return out;
}

} // namespace ddirac

#endif // DDIRAC_NEWTON_HPP
