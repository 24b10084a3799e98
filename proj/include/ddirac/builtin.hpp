#ifndef DDIRAC_BUILTIN_HPP
#define DDIRAC_BUILTIN_HPP

// Built-in mechanical systems on Q = R^n. All share the discrete Lagrangian
//
//     L_d(q, q+) = (q+ - q)^T M (q+ - q) / (2h) - (h lambda / 2) |q|^2
//
// with diagonal mass matrix M, and its right Legendre transform
//
//     H_d(q, p+) = p+ . q + (h/2) p+^T M^{-1} p+ + (h lambda / 2) |q|^2.
//
// With n = 1, M = 1 this is the discrete harmonic oscillator; lambda = 0
// gives a free particle.

#include <ddirac/systems.hpp>

#include <optional>
#include <string>

namespace ddirac::builtin {

enum class SystemId { harmonic_oscillator, free_particle, nonholonomic_particle };

inline const char* to_string(SystemId id)
{
    switch (id) {
    case SystemId::harmonic_oscillator: return "harmonic_oscillator";
    case SystemId::free_particle: return "free_particle";
    case SystemId::nonholonomic_particle: return "nonholonomic_particle";
    }
    return "unknown";
}

inline std::optional<SystemId> parse_system_id(const std::string& s)
{
    if (s == "harmonic_oscillator") return SystemId::harmonic_oscillator;
    if (s == "free_particle") return SystemId::free_particle;
    if (s == "nonholonomic_particle") return SystemId::nonholonomic_particle;
    return std::nullopt;
}

namespace detail {

inline void check_params(double h, const Vector& masses)
{
    ddirac::detail::require(h > 0.0 && std::isfinite(h), "builtin: h must be positive");
    ddirac::detail::require(masses.size() > 0, "builtin: empty mass vector");
    ddirac::detail::require(masses.allFinite() && (masses.array() > 0.0).all(), "builtin: masses must be positive");
}

} // namespace detail

inline DiscreteLagrangian quadratic_lagrangian(double h, const Vector& masses, double lambda)
{
    detail::check_params(h, masses);
    const Eigen::Index n = masses.size();
    const Matrix mass = masses.asDiagonal();
    auto value = [h, mass, lambda](const Vector& q, const Vector& qp) {
        const Vector dq = qp - q;
        return dq.dot(mass * dq) / (2.0 * h) - 0.5 * h * lambda * q.squaredNorm();
    };
    auto d1 = [h, mass, lambda](const Vector& q, const Vector& qp) -> Vector {
        return -(mass * (qp - q)) / h - h * lambda * q;
    };
    auto d2 = [h, mass](const Vector& q, const Vector& qp) -> Vector { return (mass * (qp - q)) / h; };
    auto d12 = [h, mass](const Vector&, const Vector&) -> Matrix { return -mass / h; };
    return DiscreteLagrangian(n, DerivativeProvider(value, d1, d2), d12);
}

/// H_d(q, p+) = p+ q+ - L_d(q, q+) with p+ = D2 L_d(q, q+).
inline DiscreteHamiltonian quadratic_hamiltonian(double h, const Vector& masses, double lambda)
{
    detail::check_params(h, masses);
    const Eigen::Index n = masses.size();
    const Matrix inv_mass = masses.cwiseInverse().asDiagonal();
    auto value = [h, inv_mass, lambda](const Vector& q, const Vector& pp) {
        return pp.dot(q) + 0.5 * h * pp.dot(inv_mass * pp) + 0.5 * h * lambda * q.squaredNorm();
    };
    auto dq = [h, lambda](const Vector& q, const Vector& pp) -> Vector { return pp + h * lambda * q; };
    auto dp = [h, inv_mass](const Vector& q, const Vector& pp) -> Vector { return q + h * (inv_mass * pp); };
    auto dq_dp = [n](const Vector&, const Vector&) -> Matrix { return Matrix::Identity(n, n); };
    auto dp_dp = [h, inv_mass](const Vector&, const Vector&) -> Matrix { return h * inv_mass; };
    return DiscreteHamiltonian(n, DerivativeProvider(value, dq, dp), dq_dp, dp_dp);
}

/// The knife-edge style constraint dq3 = q2 dq1 on R^3: A(q) = [-q2, 0, 1].
inline KinematicDistribution nonholonomic_distribution()
{
    return KinematicDistribution(3, 1, [](const Vector& q) {
        Matrix a(1, 3);
        a << -q(1), 0.0, 1.0;
        return a;
    });
}

struct Params
{
    double h = 0.1;
    double lambda = 0.0;
    /// One positive entry per degree of freedom; its size fixes n.
    Vector masses;
};

/// Builds a built-in system in the requested formulation. Nonholonomic
/// systems use the retraction-induced discrete constraint.
inline DiscreteSystem make_system(SystemId id, const Params& params, SystemKind kind)
{
    const std::string name = to_string(id);
    Vector masses = params.masses;
    if (id == SystemId::harmonic_oscillator && masses.size() == 0) masses = Vector::Ones(1);
    if (id == SystemId::nonholonomic_particle && masses.size() == 0) masses = Vector::Ones(3);
    if (id == SystemId::harmonic_oscillator)
        ddirac::detail::require(masses.size() == 1, "harmonic_oscillator is one-dimensional");
    if (id == SystemId::nonholonomic_particle)
        ddirac::detail::require(masses.size() == 3, "nonholonomic_particle is three-dimensional");
    if (id == SystemId::free_particle)
        ddirac::detail::require(params.lambda == 0.0, "free_particle has no potential (lambda must be 0)");

    const Eigen::Index n = masses.size();
    KinematicDistribution dist = id == SystemId::nonholonomic_particle ? nonholonomic_distribution()
                                                                      : KinematicDistribution::unconstrained(n);
    DiscreteConstraint constraint = retraction_constraint(dist);
    if (kind == SystemKind::lagrangian)
        return DiscreteSystem::lagrangian(quadratic_lagrangian(params.h, masses, params.lambda), std::move(dist),
                                          std::move(constraint), name);
    return DiscreteSystem::hamiltonian(quadratic_hamiltonian(params.h, masses, params.lambda), std::move(dist),
                                       std::move(constraint), name);
}

} // namespace ddirac::builtin

#endif // DDIRAC_BUILTIN_HPP
