#ifndef DDIRAC_BUNDLE_HPP
#define DDIRAC_BUNDLE_HPP

// The discrete Pontryagin bundle T*Q x Q over Q = R^n in global coordinates.
// A point is (q, p, q+); tangent and cotangent vectors at a point are split
// into the same three blocks.

#include <ddirac/linalg_dirac.hpp>

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

namespace ddirac {

namespace detail {

inline Vector stack3(const Vector& a, const Vector& b, const Vector& c)
{
    Vector s(a.size() + b.size() + c.size());
    s << a, b, c;
    return s;
}

inline void require_blocks(const Vector& a, const Vector& b, const Vector& c, const char* who)
{
    require(a.size() == b.size() && b.size() == c.size(),
            std::string(who) + ": blocks have different dimensions");
}

} // namespace detail

struct PontryaginPoint
{
    Vector q;
    Vector p;
    Vector qplus;

    PontryaginPoint() = default;
    PontryaginPoint(Vector q_, Vector p_, Vector qplus_)
        : q(std::move(q_)), p(std::move(p_)), qplus(std::move(qplus_))
    {
        detail::require_blocks(q, p, qplus, "PontryaginPoint");
        detail::require(q.allFinite() && p.allFinite() && qplus.allFinite(),
                        "PontryaginPoint: non-finite entry");
    }

    Eigen::Index dim() const noexcept { return q.size(); }
};

struct TangentPd
{
    Vector dq;
    Vector dp;
    Vector dqplus;

    TangentPd(Vector dq_, Vector dp_, Vector dqplus_)
        : dq(std::move(dq_)), dp(std::move(dp_)), dqplus(std::move(dqplus_))
    {
        detail::require_blocks(dq, dp, dqplus, "TangentPd");
    }

    static TangentPd zero(Eigen::Index n)
    {
        return {Vector::Zero(n), Vector::Zero(n), Vector::Zero(n)};
    }

    static TangentPd from_stacked(const Vector& s)
    {
        detail::require(s.size() % 3 == 0, "TangentPd: stacked length not divisible by 3");
        const Eigen::Index n = s.size() / 3;
        return {s.segment(0, n), s.segment(n, n), s.segment(2 * n, n)};
    }

    Eigen::Index dim() const noexcept { return dq.size(); }
    Vector stacked() const { return detail::stack3(dq, dp, dqplus); }
};

struct CotangentPd
{
    Vector bq;
    Vector bp;
    Vector bqplus;

    CotangentPd(Vector bq_, Vector bp_, Vector bqplus_)
        : bq(std::move(bq_)), bp(std::move(bp_)), bqplus(std::move(bqplus_))
    {
        detail::require_blocks(bq, bp, bqplus, "CotangentPd");
    }

    static CotangentPd from_stacked(const Vector& s)
    {
        detail::require(s.size() % 3 == 0, "CotangentPd: stacked length not divisible by 3");
        const Eigen::Index n = s.size() / 3;
        return {s.segment(0, n), s.segment(n, n), s.segment(2 * n, n)};
    }

    Eigen::Index dim() const noexcept { return bq.size(); }
    Vector stacked() const { return detail::stack3(bq, bp, bqplus); }

    double operator()(const TangentPd& w) const
    {
        detail::require(w.dim() == dim(), "CotangentPd: dimension mismatch");
        return bq.dot(w.dq) + bp.dot(w.dp) + bqplus.dot(w.dqplus);
    }

    CotangentPd operator-(const CotangentPd& o) const
    {
        detail::require(o.dim() == dim(), "CotangentPd: dimension mismatch");
        return {bq - o.bq, bp - o.bp, bqplus - o.bqplus};
    }
};

struct DiscreteCurve
{
    std::vector<PontryaginPoint> points;

    std::size_t size() const noexcept { return points.size(); }
    /// Number of steps N for a curve of N+1 points.
    std::size_t steps() const noexcept { return points.empty() ? 0 : points.size() - 1; }
};

/// The kinematic constraint distribution, given by rows A(q) spanning its
/// annihilator. m == 0 means unconstrained.
class KinematicDistribution
{
public:
    using AnnihilatorFn = std::function<Matrix(const Vector&)>;

    KinematicDistribution(Eigen::Index n, Eigen::Index m, AnnihilatorFn annihilator)
        : n_(n), m_(m), fn_(std::move(annihilator))
    {
        detail::require(n > 0, "KinematicDistribution: n must be positive");
        detail::require(m >= 0 && m <= n, "KinematicDistribution: corank must satisfy 0 <= m <= n");
        detail::require(m == 0 || static_cast<bool>(fn_), "KinematicDistribution: missing annihilator");
    }

    static KinematicDistribution unconstrained(Eigen::Index n) { return {n, 0, {}}; }

    static KinematicDistribution constant(Matrix a)
    {
        const Eigen::Index n = a.cols();
        const Eigen::Index m = a.rows();
        return {n, m, [a = std::move(a)](const Vector&) { return a; }};
    }

    Eigen::Index n() const noexcept { return n_; }
    Eigen::Index m() const noexcept { return m_; }

    /// A(q), checked for shape and full row rank.
    Matrix annihilator(const Vector& q) const
    {
        detail::require(q.size() == n_, "KinematicDistribution: q has wrong dimension");
        if (m_ == 0) return Matrix(0, n_);
        Matrix a;
        try {
            a = fn_(q);
        } catch (const Error&) {
            throw;
        } catch (const std::exception& e) {
            throw EvaluationError(std::string("annihilator evaluation failed: ") + e.what());
        }
        if (a.rows() != m_ || a.cols() != n_)
            throw InvalidInput("KinematicDistribution: annihilator returned " + std::to_string(a.rows()) +
                               "x" + std::to_string(a.cols()) + ", expected " + std::to_string(m_) + "x" +
                               std::to_string(n_));
        if (!a.allFinite()) throw EvaluationError("annihilator returned non-finite entries");
        Eigen::JacobiSVD<Matrix> svd(a);
        const auto& s = svd.singularValues();
        if (!(s(0) > 0.0) || !(s(s.size() - 1) > kRankCutoff * s(0)))
            throw DegenerateConstraint("annihilator A(q) is rank deficient");
        return a;
    }

private:
    Eigen::Index n_;
    Eigen::Index m_;
    AnnihilatorFn fn_;
};

/// omega_P^d(u, w) = -(u.dq . w.dp - u.dp . w.dq). The q+ blocks never enter.
inline double omega_pd(const TangentPd& u, const TangentPd& w)
{
    detail::require(u.dim() == w.dim(), "omega_pd: dimension mismatch " + detail::dims(u.dim(), w.dim()));
    return -(u.dq.dot(w.dp) - u.dp.dot(w.dq));
}

/// omega_P^d as a SkewForm on the stacked 3n coordinates.
inline SkewForm omega_pd_form(Eigen::Index n)
{
    Matrix w = Matrix::Zero(3 * n, 3 * n);
    w.block(0, n, n, n) = Matrix::Identity(n, n);
    w.block(n, 0, n, n) = -Matrix::Identity(n, n);
    return SkewForm(std::move(w));
}

/// ver_{alpha_q}(beta) = (0, beta, 0).
inline TangentPd vertical_lift(const PontryaginPoint& x, const Vector& beta)
{
    detail::require(beta.size() == x.dim(), "vertical_lift: dimension mismatch " + detail::dims(beta.size(), x.dim()));
    return {Vector::Zero(x.dim()), beta, Vector::Zero(x.dim())};
}

/// i_v omega_P^d.
inline CotangentPd interior_product(const TangentPd& v)
{
    return {v.dp, -v.dq, Vector::Zero(v.dim())};
}

/// Rows [A(q) | 0 | 0] spanning the annihilator of the lifted distribution
/// at x; a tangent vector lies in it iff A(q) dq = 0.
inline Matrix lift_annihilator(const KinematicDistribution& dist, const PontryaginPoint& x)
{
    detail::require(x.dim() == dist.n(), "lift_annihilator: dimension mismatch " + detail::dims(x.dim(), dist.n()));
    const Eigen::Index n = dist.n();
    Matrix lifted = Matrix::Zero(dist.m(), 3 * n);
    if (dist.m() > 0) lifted.leftCols(n) = dist.annihilator(x.q);
    return lifted;
}

/// Smallest k with |x_k.qplus - x_{k+1}.q|_inf > tol, or nullopt if admissible.
inline std::optional<std::size_t> admissibility_check(const DiscreteCurve& curve, double tol = 1e-12)
{
    detail::require(!curve.points.empty(), "admissibility_check: empty curve");
    for (std::size_t k = 0; k + 1 < curve.points.size(); ++k) {
        const auto& a = curve.points[k].qplus;
        const auto& b = curve.points[k + 1].q;
        detail::require(a.size() == b.size(), "admissibility_check: non-uniform dimension");
        if (a.size() > 0 && (a - b).cwiseAbs().maxCoeff() > tol) return k;
    }
    return std::nullopt;
}

} // namespace ddirac

#endif // DDIRAC_BUNDLE_HPP
