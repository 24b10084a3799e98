#ifndef DDIRAC_TESTS_ORACLES_HPP
#define DDIRAC_TESTS_ORACLES_HPP

// Reference computations used only by the tests. None of these call into the
// library's solvers, subspace routines or finite-difference helpers.

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <random>
#include <stdexcept>

namespace oracle {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Distance from v to the column span of `basis` via the normal equations.
inline double ls_distance(const Matrix& basis, const Vector& v)
{
    if (basis.cols() == 0) return v.norm();
    const Matrix gram = basis.transpose() * basis;
    const Vector c = gram.ldlt().solve(basis.transpose() * v);
    return (v - basis * c).norm();
}

/// Modified Gram-Schmidt, run twice; drops columns with norm below `drop`.
inline Matrix gram_schmidt(const Matrix& m, double drop = 1e-9)
{
    Matrix out(m.rows(), 0);
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        Vector v = m.col(j);
        const double scale = std::max(1.0, v.norm());
        for (int pass = 0; pass < 2; ++pass)
            for (Eigen::Index i = 0; i < out.cols(); ++i) v -= out.col(i).dot(v) * out.col(i);
        if (v.norm() > drop * scale) {
            out.conservativeResize(Eigen::NoChange, out.cols() + 1);
            out.col(out.cols() - 1) = v.normalized();
        }
    }
    return out;
}

/// Orthogonal projector onto the span of the columns of `m`.
inline Matrix projector(const Matrix& m)
{
    const Matrix q = gram_schmidt(m);
    return q * q.transpose();
}

/// Plain Newton with a forward-difference Jacobian and Householder QR.
inline Vector newton(const std::function<Vector(const Vector&)>& f, Vector x, double tol = 1e-13,
                     int max_iter = 100)
{
    for (int it = 0; it < max_iter; ++it) {
        const Vector r = f(x);
        if (r.cwiseAbs().maxCoeff() <= tol) return x;
        Matrix j(r.size(), x.size());
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            Vector xp = x;
            const double h = 1e-7 * std::max(1.0, std::abs(x(i)));
            xp(i) += h;
            j.col(i) = (f(xp) - r) / h;
        }
        x -= j.householderQr().solve(r);
    }
    const Vector r = f(x);
    if (r.cwiseAbs().maxCoeff() > 1e3 * tol) throw std::runtime_error("oracle::newton did not converge");
    return x;
}

inline Vector random_vector(std::mt19937& rng, Eigen::Index n, double lo = -1.0, double hi = 1.0)
{
    std::uniform_real_distribution<double> u(lo, hi);
    Vector v(n);
    for (auto& x : v) x = u(rng);
    return v;
}

inline Matrix random_matrix(std::mt19937& rng, Eigen::Index r, Eigen::Index c)
{
    std::normal_distribution<double> g(0.0, 1.0);
    Matrix m(r, c);
    for (Eigen::Index i = 0; i < r; ++i)
        for (Eigen::Index j = 0; j < c; ++j) m(i, j) = g(rng);
    return m;
}

inline Matrix random_skew(std::mt19937& rng, Eigen::Index n)
{
    const Matrix b = random_matrix(rng, n, n);
    return b - b.transpose();
}

/// A smooth discrete Lagrangian on R^n, polynomial in z = (q, q+):
///   L(q, q+) = (q+ - q)^T M (q+ - q) / (2h) + h (z^T S z / 2 + eps sum_i c_i z_i^3)
/// with M symmetric positive definite and S symmetric. Gradient and Hessian
/// are closed form.
struct PolyLagrangian
{
    Eigen::Index n;
    double h;
    Matrix mass;
    Matrix s;
    Vector c;
    double eps;

    static PolyLagrangian random(std::mt19937& rng, Eigen::Index n, double h = 0.1, double eps = 0.1)
    {
        const Matrix b = random_matrix(rng, n, n);
        const Matrix mass = b * b.transpose() + Matrix::Identity(n, n);
        const Matrix t = random_matrix(rng, 2 * n, 2 * n);
        return {n, h, mass, 0.5 * (t + t.transpose()), random_vector(rng, 2 * n), eps};
    }

    Vector stack(const Vector& q, const Vector& qp) const
    {
        Vector z(2 * n);
        z << q, qp;
        return z;
    }

    double value(const Vector& q, const Vector& qp) const
    {
        const Vector z = stack(q, qp);
        const Vector d = qp - q;
        return d.dot(mass * d) / (2 * h) + h * (0.5 * z.dot(s * z) + eps * c.dot(z.array().cube().matrix()));
    }

    /// Full gradient with respect to z = (q, q+).
    Vector grad(const Vector& q, const Vector& qp) const
    {
        const Vector z = stack(q, qp);
        const Vector d = mass * (qp - q) / h;
        Vector g = h * (s * z + 3 * eps * c.cwiseProduct(z.cwiseProduct(z)));
        g.head(n) -= d;
        g.tail(n) += d;
        return g;
    }

    Matrix hess(const Vector& q, const Vector& qp) const
    {
        const Vector z = stack(q, qp);
        Matrix hs = h * s;
        hs.diagonal() += h * 6 * eps * c.cwiseProduct(z);
        hs.topLeftCorner(n, n) += mass / h;
        hs.bottomRightCorner(n, n) += mass / h;
        hs.topRightCorner(n, n) -= mass / h;
        hs.bottomLeftCorner(n, n) -= mass / h;
        return hs;
    }

    Vector d1(const Vector& q, const Vector& qp) const { return grad(q, qp).head(n); }
    Vector d2(const Vector& q, const Vector& qp) const { return grad(q, qp).tail(n); }
};

/// Next configuration from the unconstrained discrete Euler-Lagrange equation
/// D2 L(q_prev, q) + D1 L(q, q_next) = 0, by Newton with the exact Hessian.
inline Vector del_next(const PolyLagrangian& lag, const Vector& q_prev, const Vector& q, Vector guess)
{
    const Vector p = lag.d2(q_prev, q);
    const Eigen::Index n = lag.n;
    for (int it = 0; it < 100; ++it) {
        const Vector r = p + lag.d1(q, guess);
        if (r.cwiseAbs().maxCoeff() <= 1e-14) break;
        const Matrix j = lag.hess(q, guess).topRightCorner(n, n);
        guess -= j.colPivHouseholderQr().solve(r);
    }
    return guess;
}

} // namespace oracle

#endif // DDIRAC_TESTS_ORACLES_HPP
