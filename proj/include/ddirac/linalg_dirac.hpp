#ifndef DDIRAC_LINALG_DIRAC_HPP
#define DDIRAC_LINALG_DIRAC_HPP

// Finite-dimensional Dirac structures on V (+) V*, with V = R^N.
//
// A vector of V (+) V* is stored either as a PairedVector or, inside subspace
// bases, as a stacked column [v; a] of length 2N.

#include <ddirac/errors.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>

namespace ddirac {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Relative singular-value cutoff used for every rank decision.
inline constexpr double kRankCutoff = 1e-10;

namespace detail {

inline void require(bool cond, const std::string& what)
{
    if (!cond) throw InvalidInput(what);
}

inline std::string dims(Eigen::Index a, Eigen::Index b)
{
    return std::to_string(a) + " vs " + std::to_string(b);
}

} // namespace detail

/// Orthonormal basis for the column span of `m`, dropping directions whose
/// singular value is below `rel_cutoff` times the largest one.
inline Matrix orthonormal_columns(const Matrix& m, double rel_cutoff = kRankCutoff)
{
    if (m.cols() == 0 || m.rows() == 0) return Matrix(m.rows(), 0);
    Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU);
    const auto& s = svd.singularValues();
    const double smax = s.size() > 0 ? s(0) : 0.0;
    Eigen::Index rank = 0;
    if (smax > 0.0) {
        while (rank < s.size() && s(rank) > rel_cutoff * smax) ++rank;
    }
    return svd.matrixU().leftCols(rank);
}

/// Orthonormal basis for the null space of `m` (as columns).
inline Matrix null_space(const Matrix& m, double rel_cutoff = kRankCutoff)
{
    const Eigen::Index cols = m.cols();
    if (cols == 0) return Matrix(0, 0);
    if (m.rows() == 0) return Matrix::Identity(cols, cols);
    Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    const double smax = s(0);
    Eigen::Index rank = 0;
    if (smax > 0.0) {
        while (rank < s.size() && s(rank) > rel_cutoff * smax) ++rank;
    }
    return svd.matrixV().rightCols(cols - rank);
}

/// Component of `f` orthogonal to the row space of `a`, i.e. its projection
/// onto ker a. With `a` an annihilator matrix this is the restriction of a
/// covector to the distribution, measured in the Euclidean metric.
inline Vector project_off_rows(const Matrix& a, const Vector& f)
{
    detail::require(a.rows() == 0 || a.cols() == f.size(),
                    "project_off_rows: dimension mismatch " + detail::dims(a.cols(), f.size()));
    if (a.rows() == 0) return f;
    const Matrix u = orthonormal_columns(a.transpose());
    return f - u * (u.transpose() * f);
}

/// A linear subspace of R^N held by a full-column-rank basis.
class LinSubspace
{
public:
    /// Takes `basis` as-is; its columns must be linearly independent.
    explicit LinSubspace(Matrix basis) : basis_(std::move(basis))
    {
        detail::require(basis_.rows() > 0, "LinSubspace: ambient dimension must be positive");
        detail::require(basis_.cols() <= basis_.rows(),
                        "LinSubspace: more basis vectors than ambient dimension");
        detail::require(basis_.allFinite(), "LinSubspace: non-finite basis entry");
        if (basis_.cols() > 0) {
            Eigen::JacobiSVD<Matrix> svd(basis_);
            const auto& s = svd.singularValues();
            const double smax = s(0);
            const double smin = s(s.size() - 1);
            if (!(smax > 0.0) || !(smin > kRankCutoff * smax))
                throw InvalidInput("LinSubspace: basis is rank deficient");
        }
    }

    /// The span of arbitrary (possibly dependent) columns, orthonormalized.
    static LinSubspace span(const Matrix& generators)
    {
        detail::require(generators.rows() > 0, "LinSubspace::span: ambient dimension must be positive");
        return LinSubspace(orthonormal_columns(generators));
    }

    static LinSubspace full(Eigen::Index n) { return LinSubspace(Matrix::Identity(n, n)); }
    static LinSubspace zero(Eigen::Index n) { return LinSubspace(Matrix(n, 0)); }

    Eigen::Index ambient_dim() const noexcept { return basis_.rows(); }
    Eigen::Index dim() const noexcept { return basis_.cols(); }
    const Matrix& basis() const noexcept { return basis_; }

    Matrix orthonormal() const { return orthonormal_columns(basis_); }

private:
    Matrix basis_;
};

/// An element (v, a) of V (+) V*.
struct PairedVector
{
    Vector v;
    Vector a;

    PairedVector(Vector v_, Vector a_) : v(std::move(v_)), a(std::move(a_))
    {
        detail::require(v.size() == a.size(),
                        "PairedVector: block sizes differ " + detail::dims(v.size(), a.size()));
    }

    Eigen::Index dim() const noexcept { return v.size(); }

    Vector stacked() const
    {
        Vector s(2 * v.size());
        s << v, a;
        return s;
    }

    static PairedVector from_stacked(const Vector& s)
    {
        detail::require(s.size() % 2 == 0, "PairedVector: odd stacked length");
        const Eigen::Index n = s.size() / 2;
        return PairedVector(s.head(n), s.tail(n));
    }
};

/// A two-form on R^N. The matrix acts as v |-> i_v Omega, so
/// Omega(v, w) = (mat * v) . w.
class SkewForm
{
public:
    explicit SkewForm(Matrix mat) : mat_(std::move(mat))
    {
        detail::require(mat_.rows() == mat_.cols(), "SkewForm: matrix must be square");
        detail::require(mat_.allFinite(), "SkewForm: non-finite entry");
        if (mat_.size() > 0 && (mat_ + mat_.transpose()).cwiseAbs().maxCoeff() >= 1e-12)
            throw InvalidInput("SkewForm: matrix is not skew-symmetric");
    }

    static SkewForm zero(Eigen::Index n) { return SkewForm(Matrix::Zero(n, n)); }

    Eigen::Index dim() const noexcept { return mat_.rows(); }
    const Matrix& matrix() const noexcept { return mat_; }

    double operator()(const Vector& v, const Vector& w) const { return (mat_ * v).dot(w); }
    Vector contract(const Vector& v) const { return mat_ * v; }

private:
    Matrix mat_;
};

/// <<x, y>> = <x.a, y.v> + <y.a, x.v>.
inline double pairing(const PairedVector& x, const PairedVector& y)
{
    detail::require(x.dim() == y.dim(), "pairing: dimension mismatch " + detail::dims(x.dim(), y.dim()));
    return x.a.dot(y.v) + y.a.dot(x.v);
}

/// D(delta, omega) = {(v, a) : v in delta, (a - omega v) vanishes on delta},
/// returned as an orthonormal basis of R^{2N} columns [v; a]. Computed as the
/// kernel of (v, a) |-> (P_perp v, B^T (a - omega v)).
inline LinSubspace induced_dirac(const LinSubspace& delta, const SkewForm& omega)
{
    const Eigen::Index n = delta.ambient_dim();
    detail::require(omega.dim() == n, "induced_dirac: dimension mismatch " + detail::dims(omega.dim(), n));

    const Matrix b = delta.orthonormal();
    const Eigen::Index k = b.cols();

    Matrix map = Matrix::Zero(n + k, 2 * n);
    map.topLeftCorner(n, n) = Matrix::Identity(n, n) - b * b.transpose();
    map.bottomLeftCorner(k, n) = -b.transpose() * omega.matrix();
    map.bottomRightCorner(k, n) = b.transpose();

    Matrix kernel = null_space(map);
    if (kernel.cols() != n)
        throw InvalidInput("induced_dirac: kernel has dimension " + std::to_string(kernel.cols()) +
                           ", expected " + std::to_string(n) + " (ill-conditioned distribution)");
    return LinSubspace(std::move(kernel));
}

/// Maximal isotropy test: dim d == n and the pairing vanishes on the basis.
inline bool is_dirac(const LinSubspace& d, Eigen::Index n, double tol)
{
    detail::require(d.ambient_dim() % 2 == 0, "is_dirac: odd ambient dimension");
    detail::require(d.ambient_dim() == 2 * n,
                    "is_dirac: ambient dimension " + std::to_string(d.ambient_dim()) + " is not 2n");
    if (d.dim() != n) return false;
    if (n == 0) return true;
    const auto& m = d.basis();
    const Matrix v = m.topRows(n);
    const Matrix a = m.bottomRows(n);
    const Matrix gram = a.transpose() * v + v.transpose() * a;
    return gram.cwiseAbs().maxCoeff() < tol;
}

/// Distance of `x` from D(delta, omega): the larger of the distance of x.v
/// from delta and the largest |x.a(w) - omega(x.v, w)| over the stored basis
/// vectors w of delta. Zero iff x lies in D(delta, omega).
inline double membership_residual(const PairedVector& x, const LinSubspace& delta, const SkewForm& omega)
{
    const Eigen::Index n = delta.ambient_dim();
    detail::require(x.dim() == n && omega.dim() == n,
                    "membership_residual: dimension mismatch " + detail::dims(x.dim(), n));
    const Matrix q = delta.orthonormal();
    const double off = (x.v - q * (q.transpose() * x.v)).norm();
    double form = 0.0;
    if (delta.dim() > 0)
        form = (delta.basis().transpose() * (x.a - omega.contract(x.v))).cwiseAbs().maxCoeff();
    return std::max(off, form);
}

} // namespace ddirac

#endif // DDIRAC_LINALG_DIRAC_HPP
