#ifndef DDIRAC_SYSTEMS_HPP
#define DDIRAC_SYSTEMS_HPP

// Discrete Lagrangian and Hamiltonian systems with kinematic and discrete
// constraints, the one-forms psi_L and psi_H they induce on the discrete
// Pontryagin bundle, and the residual of the discrete Dirac inclusion
//
//     (ver(p_k), 0) (+) psi_k  in  D(Delta(x_k), omega_P^d).

#include <ddirac/bundle.hpp>
#include <ddirac/derivatives.hpp>

#include <string>
#include <utility>
#include <variant>

namespace ddirac {

using MatrixFn = std::function<Matrix(const Vector&, const Vector&)>;
using VectorFn = std::function<Vector(const Vector&, const Vector&)>;

namespace detail {

inline Matrix checked_matrix(const MatrixFn& fn, const Vector& a, const Vector& b, Eigen::Index rows,
                             Eigen::Index cols, const char* what)
{
    Matrix m = guarded(what, fn, a, b);
    if (m.rows() != rows || m.cols() != cols)
        throw EvaluationError(std::string(what) + " returned " + std::to_string(m.rows()) + "x" +
                              std::to_string(m.cols()) + ", expected " + std::to_string(rows) + "x" +
                              std::to_string(cols));
    require_finite(m, what);
    return m;
}

inline std::pair<Vector, Vector> random_pair(std::mt19937& rng, Eigen::Index n)
{
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Vector a(n), b(n);
    for (auto& x : a) x = u(rng);
    for (auto& x : b) x = u(rng);
    return {a, b};
}

} // namespace detail

/// L_d(q, q+) with partials D1 L_d in T*_q Q and D2 L_d in T*_{q+} Q.
/// `d12` optionally supplies d(D1 L_d)/dq+, used by the Newton matrix.
class DiscreteLagrangian
{
public:
    DiscreteLagrangian(Eigen::Index n, DerivativeProvider ld, MatrixFn d12 = {},
                       Validation validation = Validation::on)
        : n_(n), ld_(std::move(ld)), d12_(std::move(d12))
    {
        detail::require(n_ > 0, "DiscreteLagrangian: n must be positive");
        if (validation == Validation::on) validate();
    }

    Eigen::Index n() const noexcept { return n_; }
    const DerivativeProvider& provider() const noexcept { return ld_; }
    bool has_analytic_d12() const noexcept { return static_cast<bool>(d12_); }

    double value(const Vector& q, const Vector& qplus) const { return ld_.value(q, qplus); }
    Vector d1(const Vector& q, const Vector& qplus) const { return ld_.d1(q, qplus); }
    Vector d2(const Vector& q, const Vector& qplus) const { return ld_.d2(q, qplus); }

    /// d(D1 L_d)/dq+ as an n x n matrix.
    Matrix d12(const Vector& q, const Vector& qplus) const
    {
        if (d12_) return detail::checked_matrix(d12_, q, qplus, n_, n_, "mixed second derivative");
        return fd_d12(q, qplus);
    }

    Matrix fd_d12(const Vector& q, const Vector& qplus) const
    {
        return fd::jacobian([&](const Vector& y) { return d1(q, y); }, qplus, ld_.fd_scale());
    }

    /// Worst analytic-vs-FD discrepancy over `probes` random points.
    double max_fd_discrepancy(int probes = 5, unsigned seed = 7) const
    {
        double worst = ld_.max_fd_discrepancy(n_, n_, probes, seed);
        if (d12_) {
            std::mt19937 rng(seed + 1);
            for (int i = 0; i < probes; ++i) {
                auto [q, qp] = detail::random_pair(rng, n_);
                worst = std::max(worst, fd::relative_error(d12(q, qp), fd_d12(q, qp)));
            }
        }
        return worst;
    }

private:
    void validate() const
    {
        const double err = max_fd_discrepancy();
        if (!(err < kPartialConsistencyTol))
            throw InvalidInput("DiscreteLagrangian: analytic partials disagree with finite differences (rel. error " +
                               std::to_string(err) + ")");
    }

    Eigen::Index n_;
    DerivativeProvider ld_;
    MatrixFn d12_;
};

/// Right discrete Hamiltonian H_d(q, p+). `dq_dp` and `dp_dp` optionally
/// supply d(dH/dq)/dp+ and d(dH/dp)/dp+.
class DiscreteHamiltonian
{
public:
    DiscreteHamiltonian(Eigen::Index n, DerivativeProvider hd, MatrixFn dq_dp = {}, MatrixFn dp_dp = {},
                        Validation validation = Validation::on)
        : n_(n), hd_(std::move(hd)), dq_dp_(std::move(dq_dp)), dp_dp_(std::move(dp_dp))
    {
        detail::require(n_ > 0, "DiscreteHamiltonian: n must be positive");
        if (validation == Validation::on) validate();
    }

    Eigen::Index n() const noexcept { return n_; }
    const DerivativeProvider& provider() const noexcept { return hd_; }

    double value(const Vector& q, const Vector& pplus) const { return hd_.value(q, pplus); }
    Vector dq(const Vector& q, const Vector& pplus) const { return hd_.d1(q, pplus); }
    Vector dp(const Vector& q, const Vector& pplus) const { return hd_.d2(q, pplus); }

    /// The cross block d^2 H_d / dq dp+ (row i: component i of dH/dq).
    Matrix cross(const Vector& q, const Vector& pplus) const
    {
        if (dq_dp_) return detail::checked_matrix(dq_dp_, q, pplus, n_, n_, "cross second derivative");
        return fd_cross(q, pplus);
    }

    Matrix pp(const Vector& q, const Vector& pplus) const
    {
        if (dp_dp_) return detail::checked_matrix(dp_dp_, q, pplus, n_, n_, "momentum second derivative");
        return fd_pp(q, pplus);
    }

    Matrix fd_cross(const Vector& q, const Vector& pplus) const
    {
        return fd::jacobian([&](const Vector& y) { return dq(q, y); }, pplus, hd_.fd_scale());
    }

    Matrix fd_pp(const Vector& q, const Vector& pplus) const
    {
        return fd::jacobian([&](const Vector& y) { return dp(q, y); }, pplus, hd_.fd_scale());
    }

    double max_fd_discrepancy(int probes = 5, unsigned seed = 7) const
    {
        double worst = hd_.max_fd_discrepancy(n_, n_, probes, seed);
        std::mt19937 rng(seed + 1);
        for (int i = 0; i < probes; ++i) {
            auto [q, p] = detail::random_pair(rng, n_);
            if (dq_dp_) worst = std::max(worst, fd::relative_error(cross(q, p), fd_cross(q, p)));
            if (dp_dp_) worst = std::max(worst, fd::relative_error(pp(q, p), fd_pp(q, p)));
        }
        return worst;
    }

private:
    void validate() const
    {
        const double err = max_fd_discrepancy();
        if (!(err < kPartialConsistencyTol))
            throw InvalidInput("DiscreteHamiltonian: analytic partials disagree with finite differences (rel. error " +
                               std::to_string(err) + ")");
    }

    Eigen::Index n_;
    DerivativeProvider hd_;
    MatrixFn dq_dp_;
    MatrixFn dp_dp_;
};

/// The discrete constraint submanifold {phi_d(q, q+) = 0} of Q x Q.
class DiscreteConstraint
{
public:
    DiscreteConstraint(Eigen::Index n, Eigen::Index md, VectorFn phi, MatrixFn jac2 = {})
        : n_(n), md_(md), phi_(std::move(phi)), jac2_(std::move(jac2))
    {
        detail::require(n_ > 0, "DiscreteConstraint: n must be positive");
        detail::require(md_ >= 0 && md_ <= n_, "DiscreteConstraint: codimension must satisfy 0 <= md <= n");
        detail::require(md_ == 0 || static_cast<bool>(phi_), "DiscreteConstraint: missing phi");
    }

    /// D = Q x Q.
    static DiscreteConstraint none(Eigen::Index n) { return {n, 0, {}}; }

    Eigen::Index n() const noexcept { return n_; }
    Eigen::Index md() const noexcept { return md_; }
    bool has_analytic_jacobian() const noexcept { return static_cast<bool>(jac2_); }

    Vector operator()(const Vector& q, const Vector& qplus) const
    {
        detail::require(q.size() == n_ && qplus.size() == n_, "DiscreteConstraint: dimension mismatch");
        if (md_ == 0) return Vector(0);
        Vector v = detail::guarded("discrete constraint", phi_, q, qplus);
        if (v.size() != md_)
            throw EvaluationError("discrete constraint returned dimension " + std::to_string(v.size()) +
                                  ", expected " + std::to_string(md_));
        detail::require_finite(v, "discrete constraint");
        return v;
    }

    /// d phi_d / dq+, an md x n matrix.
    Matrix jacobian2(const Vector& q, const Vector& qplus) const
    {
        if (md_ == 0) return Matrix(0, n_);
        if (jac2_) return detail::checked_matrix(jac2_, q, qplus, md_, n_, "constraint Jacobian");
        return fd_jacobian2(q, qplus);
    }

    Matrix fd_jacobian2(const Vector& q, const Vector& qplus) const
    {
        return fd::jacobian([&](const Vector& y) { return (*this)(q, y); }, qplus);
    }

private:
    Eigen::Index n_;
    Eigen::Index md_;
    VectorFn phi_;
    MatrixFn jac2_;
};

/// phi_d(q, q+) = A(q)(q+ - q): the discrete constraint obtained from the
/// kinematic one through the identity-chart retraction R_q(v) = q + v.
inline DiscreteConstraint retraction_constraint(const KinematicDistribution& dist)
{
    const Eigen::Index n = dist.n();
    if (dist.m() == 0) return DiscreteConstraint::none(n);
    return DiscreteConstraint(
        n, dist.m(), [dist](const Vector& q, const Vector& qplus) -> Vector { return dist.annihilator(q) * (qplus - q); },
        [dist](const Vector& q, const Vector&) -> Matrix { return dist.annihilator(q); });
}

enum class SystemKind { lagrangian, hamiltonian };

inline const char* to_string(SystemKind k) { return k == SystemKind::lagrangian ? "lagrangian" : "hamiltonian"; }

/// A discrete Dirac system (Q, D(Delta, omega_P^d), D, psi) with psi either
/// psi_L or psi_H. The corank of the kinematic distribution must equal the
/// codimension of the discrete constraint so each step is a square system.
class DiscreteSystem
{
public:
    static DiscreteSystem lagrangian(DiscreteLagrangian lag, KinematicDistribution dist,
                                     DiscreteConstraint constraint, std::string name = "lagrangian")
    {
        const auto n = lag.n();
        return DiscreteSystem(std::move(lag), n, std::move(dist), std::move(constraint), std::move(name));
    }

    static DiscreteSystem lagrangian(DiscreteLagrangian lag, std::string name = "lagrangian")
    {
        const auto n = lag.n();
        return lagrangian(std::move(lag), KinematicDistribution::unconstrained(n), DiscreteConstraint::none(n),
                          std::move(name));
    }

    static DiscreteSystem hamiltonian(DiscreteHamiltonian ham, KinematicDistribution dist,
                                      DiscreteConstraint constraint, std::string name = "hamiltonian")
    {
        const auto n = ham.n();
        return DiscreteSystem(std::move(ham), n, std::move(dist), std::move(constraint), std::move(name));
    }

    static DiscreteSystem hamiltonian(DiscreteHamiltonian ham, std::string name = "hamiltonian")
    {
        const auto n = ham.n();
        return hamiltonian(std::move(ham), KinematicDistribution::unconstrained(n), DiscreteConstraint::none(n),
                           std::move(name));
    }

    SystemKind kind() const noexcept
    {
        return std::holds_alternative<DiscreteLagrangian>(energy_) ? SystemKind::lagrangian : SystemKind::hamiltonian;
    }

    Eigen::Index n() const noexcept { return n_; }
    Eigen::Index m() const noexcept { return dist_.m(); }
    const std::string& name() const noexcept { return name_; }
    const KinematicDistribution& dist() const noexcept { return dist_; }
    const DiscreteConstraint& constraint() const noexcept { return constraint_; }

    const DiscreteLagrangian& lag() const
    {
        if (auto* l = std::get_if<DiscreteLagrangian>(&energy_)) return *l;
        throw UnsupportedOperation("system '" + name_ + "' is Hamiltonian, not Lagrangian");
    }

    const DiscreteHamiltonian& ham() const
    {
        if (auto* h = std::get_if<DiscreteHamiltonian>(&energy_)) return *h;
        throw UnsupportedOperation("system '" + name_ + "' is Lagrangian, not Hamiltonian");
    }

private:
    DiscreteSystem(std::variant<DiscreteLagrangian, DiscreteHamiltonian> energy, Eigen::Index n,
                   KinematicDistribution dist, DiscreteConstraint constraint, std::string name)
        : energy_(std::move(energy)), n_(n), dist_(std::move(dist)), constraint_(std::move(constraint)),
          name_(std::move(name))
    {
        detail::require(dist_.n() == n_ && constraint_.n() == n_,
                        "DiscreteSystem: energy, distribution and constraint dimensions differ");
        detail::require(dist_.m() == constraint_.md(),
                        "DiscreteSystem: distribution corank " + std::to_string(dist_.m()) +
                            " must equal constraint codimension " + std::to_string(constraint_.md()));
    }

    std::variant<DiscreteLagrangian, DiscreteHamiltonian> energy_;
    Eigen::Index n_;
    KinematicDistribution dist_;
    DiscreteConstraint constraint_;
    std::string name_;
};

/// psi_L at x = (q_k, p_k, q_{k+1}) with p_next = p_{k+1}:
/// (-D1 L_d, 0, p_{k+1} - D2 L_d).
inline CotangentPd psi_L(const DiscreteLagrangian& lag, const PontryaginPoint& x, const Vector& p_next)
{
    detail::require(x.dim() == lag.n() && p_next.size() == lag.n(), "psi_L: dimension mismatch");
    return {-lag.d1(x.q, x.qplus), Vector::Zero(lag.n()), p_next - lag.d2(x.q, x.qplus)};
}

/// psi_H at x = (q_k, p_k, q_{k+1}) with p_next = p_{k+1}:
/// (dH/dq, dH/dp - q_{k+1}, 0), partials taken at (q_k, p_{k+1}).
inline CotangentPd psi_H(const DiscreteHamiltonian& ham, const PontryaginPoint& x, const Vector& p_next)
{
    detail::require(x.dim() == ham.n() && p_next.size() == ham.n(), "psi_H: dimension mismatch");
    return {ham.dq(x.q, p_next), ham.dp(x.q, p_next) - x.qplus, Vector::Zero(ham.n())};
}

inline CotangentPd psi(const DiscreteSystem& sys, const PontryaginPoint& x, const Vector& p_next)
{
    return sys.kind() == SystemKind::lagrangian ? psi_L(sys.lag(), x, p_next) : psi_H(sys.ham(), x, p_next);
}

/// Residual of (ver(p), 0) (+) psi in D(Delta(x), omega_P^d). With
/// v = (0, p, 0) and beta = psi - i_v omega_P^d this is the larger of the
/// distance of v from Delta(x) and the Euclidean norm of beta restricted to
/// Delta(x), i.e. |(P_ker A(q) beta_q, beta_p, beta_q+)|.
inline double dirac_inclusion_residual(const DiscreteSystem& sys, const PontryaginPoint& x, const Vector& p_next)
{
    detail::require(x.dim() == sys.n() && p_next.size() == sys.n(), "dirac_inclusion_residual: dimension mismatch");
    const TangentPd v = vertical_lift(x, x.p);
    const CotangentPd beta = psi(sys, x, p_next) - interior_product(v);
    const Matrix a = sys.dist().annihilator(x.q);

    const double off = (v.dq - project_off_rows(a, v.dq)).norm();
    const Vector bq = project_off_rows(a, beta.bq);
    const double restricted = std::sqrt(bq.squaredNorm() + beta.bp.squaredNorm() + beta.bqplus.squaredNorm());
    return std::max(off, restricted);
}

} // namespace ddirac

#endif // DDIRAC_SYSTEMS_HPP
