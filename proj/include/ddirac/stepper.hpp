#ifndef DDIRAC_STEPPER_HPP
#define DDIRAC_STEPPER_HPP

// Implicit steppers for the discrete Lagrange-Dirac and Hamilton-Dirac
// equations. Every accepted step is certified against the discrete Dirac
// inclusion.

#include <ddirac/newton.hpp>
#include <ddirac/systems.hpp>

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace ddirac {

/// Certification bound: inclusion residual <= kCertificationFactor * tol.
inline constexpr double kCertificationFactor = 10.0;

/// Condition estimate above which the Hamiltonian cross block is flagged.
inline constexpr double kRegularityCondition = 1e12;

struct StepResult
{
    /// The newly completed point of the curve.
    PontryaginPoint next;
    /// Momentum carried to the following index: p_{k+2} = D2 L_d(q_{k+1}, q_{k+2})
    /// for the Lagrangian stepper, p_{k+1} for the Hamiltonian one.
    Vector carried_momentum;
    Vector multipliers;
    int iterations = 0;
    double residual = 0.0;
    double inclusion_residual = 0.0;
    double constraint_residual = 0.0;
    double condition = 1.0;
    bool regularity_warning = false;
};

namespace detail {

inline double inf_norm(const Vector& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

inline void certify(double inclusion, const SolverOptions& opts)
{
    if (!(inclusion <= kCertificationFactor * opts.tol))
        throw CertificationError("step converged but the Dirac inclusion residual " + std::to_string(inclusion) +
                                 " exceeds " + std::to_string(kCertificationFactor * opts.tol));
}

inline Vector multiplier_guess(const std::optional<Vector>& guess, Eigen::Index m)
{
    if (guess && guess->size() == m) return *guess;
    return Vector::Zero(m);
}

} // namespace detail

/// Distance of the force-balance covector p0 + D1 L_d(q0, q0+) from the
/// annihilator A(q0)^T; zero iff x0 can start a trajectory.
inline double check_initial_data(const DiscreteSystem& sys, const PontryaginPoint& x0)
{
    if (sys.kind() != SystemKind::lagrangian)
        throw UnsupportedOperation("check_initial_data: Hamiltonian initial data (q0, p0) is unconstrained");
    detail::require(x0.dim() == sys.n(), "check_initial_data: dimension mismatch");
    const Vector force = x0.p + sys.lag().d1(x0.q, x0.qplus);
    return project_off_rows(sys.dist().annihilator(x0.q), force).norm();
}

/// The consistent initial point (q0, -D1 L_d(q0, q1), q1).
inline PontryaginPoint consistent_initial_point(const DiscreteLagrangian& lag, const Vector& q0, const Vector& q1)
{
    return {q0, -lag.d1(q0, q1), q1};
}

/// One Lagrange-Dirac step from x = (q_k, p_k, q_{k+1}).
///
/// Unknowns (q_{k+2}, lambda) solve
///   D2 L_d(q_k, q_{k+1}) + D1 L_d(q_{k+1}, q_{k+2}) - A(q_{k+1})^T lambda = 0,
///   phi_d(q_{k+1}, q_{k+2}) = 0,
/// and the result is x_{k+1} = (q_{k+1}, D2 L_d(q_k, q_{k+1}), q_{k+2}).
inline StepResult step_lagrangian(const DiscreteSystem& sys, const PontryaginPoint& x, const SolverOptions& opts,
                                  const std::optional<Vector>& multiplier_guess = std::nullopt)
{
    opts.validate();
    const DiscreteLagrangian& lag = sys.lag();
    const Eigen::Index n = sys.n();
    const Eigen::Index m = sys.m();
    detail::require(x.dim() == n, "step_lagrangian: dimension mismatch");

    const Vector& q_prev = x.q;
    const Vector& q_cur = x.qplus;
    const Vector p_cur = lag.d2(q_prev, q_cur);
    const Matrix a = sys.dist().annihilator(q_cur);
    const DiscreteConstraint& phi = sys.constraint();

    auto residual = [&](const Vector& z) {
        const Vector q_new = z.head(n);
        const Vector lambda = z.tail(m);
        Vector r(n + m);
        r.head(n) = p_cur + lag.d1(q_cur, q_new) - a.transpose() * lambda;
        r.tail(m) = phi(q_cur, q_new);
        return r;
    };
    auto jacobian = [&](const Vector& z) {
        const Vector q_new = z.head(n);
        Matrix j = Matrix::Zero(n + m, n + m);
        j.topLeftCorner(n, n) = lag.d12(q_cur, q_new);
        j.topRightCorner(n, m) = -a.transpose();
        j.bottomLeftCorner(m, n) = phi.jacobian2(q_cur, q_new);
        return j;
    };

    Vector z0(n + m);
    z0.head(n) = opts.predictor == Predictor::extrapolate ? Vector(2.0 * q_cur - q_prev) : q_cur;
    z0.tail(m) = detail::multiplier_guess(multiplier_guess, m);

    const NewtonResult sol = newton_solve(residual, jacobian, z0, opts);

    StepResult out;
    out.next = PontryaginPoint(q_cur, p_cur, sol.root.head(n));
    out.carried_momentum = lag.d2(q_cur, out.next.qplus);
    out.multipliers = sol.root.tail(m);
    out.iterations = sol.iterations;
    out.residual = sol.residual;
    out.condition = sol.condition;
    out.constraint_residual = detail::inf_norm(phi(q_cur, out.next.qplus));
    out.inclusion_residual = dirac_inclusion_residual(sys, out.next, out.carried_momentum);
    detail::certify(out.inclusion_residual, opts);
    return out;
}

/// One Hamilton-Dirac step from (q_k, p_k).
///
/// Unknowns (p_{k+1}, q_{k+1}, lambda) solve
///   p_k - dH/dq(q_k, p_{k+1}) - A(q_k)^T lambda = 0,
///   q_{k+1} - dH/dp(q_k, p_{k+1}) = 0,
///   phi_d(q_k, q_{k+1}) = 0,
/// and the result is x_k = (q_k, p_k, q_{k+1}) with p_{k+1} carried.
inline StepResult step_hamiltonian(const DiscreteSystem& sys, const Vector& q, const Vector& p,
                                   const SolverOptions& opts,
                                   const std::optional<Vector>& multiplier_guess = std::nullopt)
{
    opts.validate();
    const DiscreteHamiltonian& ham = sys.ham();
    const Eigen::Index n = sys.n();
    const Eigen::Index m = sys.m();
    detail::require(q.size() == n && p.size() == n, "step_hamiltonian: dimension mismatch");

    const Matrix a = sys.dist().annihilator(q);
    const DiscreteConstraint& phi = sys.constraint();

    // z = (p_{k+1}, q_{k+1}, lambda)
    auto residual = [&](const Vector& z) {
        const Vector p_next = z.segment(0, n);
        const Vector q_next = z.segment(n, n);
        const Vector lambda = z.tail(m);
        Vector r(2 * n + m);
        r.segment(0, n) = p - ham.dq(q, p_next) - a.transpose() * lambda;
        r.segment(n, n) = q_next - ham.dp(q, p_next);
        r.tail(m) = phi(q, q_next);
        return r;
    };
    auto jacobian = [&](const Vector& z) {
        const Vector p_next = z.segment(0, n);
        const Vector q_next = z.segment(n, n);
        Matrix j = Matrix::Zero(2 * n + m, 2 * n + m);
        j.block(0, 0, n, n) = -ham.cross(q, p_next);
        j.block(0, 2 * n, n, m) = -a.transpose();
        j.block(n, 0, n, n) = -ham.pp(q, p_next);
        j.block(n, n, n, n) = Matrix::Identity(n, n);
        j.block(2 * n, n, m, n) = phi.jacobian2(q, q_next);
        return j;
    };

    Vector z0(2 * n + m);
    z0.segment(0, n) = p;
    z0.segment(n, n) = opts.predictor == Predictor::extrapolate ? ham.dp(q, p) : q;
    z0.tail(m) = detail::multiplier_guess(multiplier_guess, m);

    StepResult out;
    out.regularity_warning = !(condition_number(ham.cross(q, p)) <= kRegularityCondition);

    const NewtonResult sol = newton_solve(residual, jacobian, z0, opts);

    const Vector p_next = sol.root.segment(0, n);
    out.next = PontryaginPoint(q, p, sol.root.segment(n, n));
    out.carried_momentum = p_next;
    out.multipliers = sol.root.tail(m);
    out.iterations = sol.iterations;
    out.residual = sol.residual;
    out.condition = sol.condition;
    out.regularity_warning =
        out.regularity_warning || !(condition_number(ham.cross(q, p_next)) <= kRegularityCondition);
    out.constraint_residual = detail::inf_norm(phi(q, out.next.qplus));
    out.inclusion_residual = dirac_inclusion_residual(sys, out.next, p_next);
    detail::certify(out.inclusion_residual, opts);
    return out;
}

/// Initial data for a Hamiltonian run.
struct CanonicalState
{
    Vector q;
    Vector p;
};

/// A Lagrangian run starts from a point of the bundle, a Hamiltonian one
/// from (q0, p0).
using Seed = std::variant<PontryaginPoint, CanonicalState>;

struct StepDiagnostics
{
    double residual = 0.0;
    double inclusion_residual = 0.0;
    double constraint_residual = 0.0;
    Vector multipliers;
    int iterations = 0;
    bool regularity_warning = false;
};

struct StepFailure
{
    std::size_t step = 0;
    std::string message;
};

struct TrajectoryMetadata
{
    std::string system;
    SystemKind kind = SystemKind::lagrangian;
    std::size_t steps_requested = 0;
    SolverOptions options;
};

/// A solved discrete curve x_0..x_K together with one diagnostics record per
/// solved step. K equals the requested N unless a step failed.
///
/// Lagrangian runs: step k solves the equations at index k+1 and produces
/// x_{k+1}; x_0 is the seed. Hamiltonian runs: step k solves the equations at
/// index k, completing x_k and producing (q_{k+1}, p_{k+1}); the last point's
/// q+ is not determined by the run and is stored equal to its q.
struct Trajectory
{
    DiscreteCurve curve;
    std::vector<StepDiagnostics> diagnostics;
    TrajectoryMetadata metadata;
    /// Inclusion residual of the seed (Lagrangian runs); 0 for Hamiltonian runs.
    double initial_data_residual = 0.0;
    /// |phi_d(q0, q0+)|_inf of the seed (Lagrangian runs).
    double initial_constraint_residual = 0.0;
    std::vector<std::string> warnings;
    std::optional<StepFailure> failure;

    bool ok() const noexcept { return !failure.has_value(); }
    std::size_t steps_completed() const noexcept { return diagnostics.size(); }
};

namespace detail {

inline StepDiagnostics diagnostics_of(const StepResult& r)
{
    return {r.residual, r.inclusion_residual, r.constraint_residual, r.multipliers, r.iterations,
            r.regularity_warning};
}

} // namespace detail

/// Iterates the stepper matching `sys.kind()` `steps` times. Step failures do
/// not throw: the partial trajectory is returned with `failure` set.
inline Trajectory run_trajectory(const DiscreteSystem& sys, const Seed& seed, std::size_t steps,
                                 const SolverOptions& opts)
{
    opts.validate();
    Trajectory traj;
    traj.metadata = {sys.name(), sys.kind(), steps, opts};
    traj.diagnostics.reserve(steps);
    traj.curve.points.reserve(steps + 1);
    std::optional<Vector> lambda;

    if (sys.kind() == SystemKind::lagrangian) {
        const auto* x0 = std::get_if<PontryaginPoint>(&seed);
        detail::require(x0 != nullptr, "run_trajectory: a Lagrangian system needs a PontryaginPoint seed");
        detail::require(x0->dim() == sys.n(), "run_trajectory: seed dimension mismatch");
        traj.curve.points.push_back(*x0);
        traj.initial_data_residual = dirac_inclusion_residual(sys, *x0, sys.lag().d2(x0->q, x0->qplus));
        traj.initial_constraint_residual = detail::inf_norm(sys.constraint()(x0->q, x0->qplus));
        if (traj.initial_data_residual > opts.tol)
            traj.warnings.push_back("initial data is inconsistent (inclusion residual " +
                                    std::to_string(traj.initial_data_residual) + ")");
        if (traj.initial_constraint_residual > opts.tol)
            traj.warnings.push_back("initial data violates the discrete constraint (residual " +
                                    std::to_string(traj.initial_constraint_residual) + ")");
        for (std::size_t k = 0; k < steps; ++k) {
            try {
                StepResult r = step_lagrangian(sys, traj.curve.points.back(), opts, lambda);
                lambda = r.multipliers;
                traj.curve.points.push_back(std::move(r.next));
                traj.diagnostics.push_back(detail::diagnostics_of(r));
            } catch (const Error& e) {
                traj.failure = StepFailure{k, e.what()};
                break;
            }
        }
    } else {
        const auto* s0 = std::get_if<CanonicalState>(&seed);
        detail::require(s0 != nullptr, "run_trajectory: a Hamiltonian system needs a (q0, p0) seed");
        detail::require(s0->q.size() == sys.n() && s0->p.size() == sys.n(),
                        "run_trajectory: seed dimension mismatch");
        traj.curve.points.emplace_back(s0->q, s0->p, s0->q);
        for (std::size_t k = 0; k < steps; ++k) {
            try {
                const PontryaginPoint& cur = traj.curve.points.back();
                StepResult r = step_hamiltonian(sys, cur.q, cur.p, opts, lambda);
                lambda = r.multipliers;
                if (r.regularity_warning)
                    traj.warnings.push_back("step " + std::to_string(k) +
                                            ": cross derivative d2H/dqdp is near-singular");
                Vector q_next = r.next.qplus;
                traj.curve.points.back() = std::move(r.next);
                traj.curve.points.emplace_back(q_next, r.carried_momentum, q_next);
                traj.diagnostics.push_back(detail::diagnostics_of(r));
            } catch (const Error& e) {
                traj.failure = StepFailure{k, e.what()};
                break;
            }
        }
    }
    return traj;
}

} // namespace ddirac

#endif // DDIRAC_STEPPER_HPP
