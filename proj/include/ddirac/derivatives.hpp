#ifndef DDIRAC_DERIVATIVES_HPP
#define DDIRAC_DERIVATIVES_HPP

// Partial derivatives of two-block scalar functions f(a, b), analytic when
// the caller supplies them and central differences otherwise.

#include <ddirac/linalg_dirac.hpp>

#include <cmath>
#include <functional>
#include <limits>
#include <random>

namespace ddirac {

namespace fd {

/// eps^(1/3), the usual central-difference step base for first derivatives.
inline double default_scale()
{
    return std::cbrt(std::numeric_limits<double>::epsilon());
}

inline double step(double scale, double x) { return scale * std::max(1.0, std::abs(x)); }

inline Vector gradient(const std::function<double(const Vector&)>& f, const Vector& x,
                       double scale = default_scale())
{
    Vector g(x.size());
    Vector xp = x;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double h = step(scale, x(i));
        xp(i) = x(i) + h;
        const double fp = f(xp);
        xp(i) = x(i) - h;
        const double fm = f(xp);
        xp(i) = x(i);
        g(i) = (fp - fm) / (2.0 * h);
    }
    return g;
}

inline Matrix jacobian(const std::function<Vector(const Vector&)>& f, const Vector& x,
                       double scale = default_scale())
{
    const Vector f0 = f(x);
    Matrix j(f0.size(), x.size());
    Vector xp = x;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double h = step(scale, x(i));
        xp(i) = x(i) + h;
        const Vector fp = f(xp);
        xp(i) = x(i) - h;
        const Vector fm = f(xp);
        xp(i) = x(i);
        j.col(i) = (fp - fm) / (2.0 * h);
    }
    return j;
}

/// |a - b|_inf / max(1, |b|_inf): relative for large entries, absolute near 0.
inline double relative_error(const Matrix& a, const Matrix& b)
{
    if (a.size() == 0) return 0.0;
    const double diff = (a - b).cwiseAbs().maxCoeff();
    return diff / std::max(1.0, b.cwiseAbs().maxCoeff());
}

} // namespace fd

namespace detail {

template <class Fn, class... Args>
auto guarded(const char* what, const Fn& fn, const Args&... args)
{
    try {
        return fn(args...);
    } catch (const Error&) {
        throw;
    } catch (const std::exception& e) {
        throw EvaluationError(std::string(what) + " evaluation failed: " + e.what());
    }
}

inline void require_finite(const Matrix& m, const char* what)
{
    if (!m.allFinite()) throw EvaluationError(std::string(what) + " returned non-finite values");
}

} // namespace detail

/// A scalar function f(a, b) of two vector blocks with optional analytic
/// partials D1 f = df/da and D2 f = df/db.
class DerivativeProvider
{
public:
    using Function = std::function<double(const Vector&, const Vector&)>;
    using Partial = std::function<Vector(const Vector&, const Vector&)>;

    DerivativeProvider() = default;
    explicit DerivativeProvider(Function f, Partial d1 = {}, Partial d2 = {},
                                double fd_scale = fd::default_scale())
        : f_(std::move(f)), d1_(std::move(d1)), d2_(std::move(d2)), fd_scale_(fd_scale)
    {
        detail::require(static_cast<bool>(f_), "DerivativeProvider: missing function");
        detail::require(fd_scale_ > 0.0, "DerivativeProvider: fd_scale must be positive");
    }

    bool has_analytic_d1() const noexcept { return static_cast<bool>(d1_); }
    bool has_analytic_d2() const noexcept { return static_cast<bool>(d2_); }
    double fd_scale() const noexcept { return fd_scale_; }

    double value(const Vector& a, const Vector& b) const
    {
        const double v = detail::guarded("function", f_, a, b);
        if (!std::isfinite(v)) throw EvaluationError("function returned a non-finite value");
        return v;
    }

    Vector d1(const Vector& a, const Vector& b) const
    {
        Vector g = d1_ ? detail::guarded("first-slot partial", d1_, a, b) : fd_d1(a, b);
        check_size(g, a.size(), "first-slot partial");
        return g;
    }

    Vector d2(const Vector& a, const Vector& b) const
    {
        Vector g = d2_ ? detail::guarded("second-slot partial", d2_, a, b) : fd_d2(a, b);
        check_size(g, b.size(), "second-slot partial");
        return g;
    }

    Vector fd_d1(const Vector& a, const Vector& b) const
    {
        return fd::gradient([&](const Vector& x) { return value(x, b); }, a, fd_scale_);
    }

    Vector fd_d2(const Vector& a, const Vector& b) const
    {
        return fd::gradient([&](const Vector& x) { return value(a, x); }, b, fd_scale_);
    }

    /// Largest relative discrepancy between the analytic partials and central
    /// differences over `probes` points drawn uniformly from [-box, box].
    double max_fd_discrepancy(Eigen::Index na, Eigen::Index nb, int probes = 5, unsigned seed = 7,
                              double box = 1.0) const
    {
        std::mt19937 rng(seed);
        std::uniform_real_distribution<double> u(-box, box);
        double worst = 0.0;
        for (int i = 0; i < probes; ++i) {
            Vector a(na), b(nb);
            for (auto& x : a) x = u(rng);
            for (auto& x : b) x = u(rng);
            if (d1_) worst = std::max(worst, fd::relative_error(d1(a, b), fd_d1(a, b)));
            if (d2_) worst = std::max(worst, fd::relative_error(d2(a, b), fd_d2(a, b)));
        }
        return worst;
    }

private:
    static void check_size(const Vector& g, Eigen::Index n, const char* what)
    {
        if (g.size() != n)
            throw EvaluationError(std::string(what) + " has dimension " + std::to_string(g.size()) +
                                  ", expected " + std::to_string(n));
        detail::require_finite(g, what);
    }

    Function f_;
    Partial d1_;
    Partial d2_;
    double fd_scale_ = fd::default_scale();
};

/// Tolerance for analytic-vs-finite-difference agreement at construction.
inline constexpr double kPartialConsistencyTol = 1e-5;

enum class Validation { on, off };

} // namespace ddirac

#endif // DDIRAC_DERIVATIVES_HPP
