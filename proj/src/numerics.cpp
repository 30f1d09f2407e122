#include "curvres/numerics.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

#include <cmath>
#include <complex>
#include <map>
#include <mutex>
#include <numbers>

#include "curvres/error.hpp"

namespace curvres {

const QuadratureRule1D& gauss_legendre(std::size_t n)
{
    static std::mutex mtx;
    static std::map<std::size_t, QuadratureRule1D> cache;
    std::lock_guard lock(mtx);
    if (auto it = cache.find(n); it != cache.end()) return it->second;
    if (n == 0) throw ContractError("gauss_legendre: need at least one node");

    // Golub-Welsch: nodes are eigenvalues of the Jacobi matrix.
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t k = 1; k < n; ++k) {
        const double kk = static_cast<double>(k);
        const double b = kk / std::sqrt(4.0 * kk * kk - 1.0);
        jac(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k - 1)) = b;
        jac(static_cast<Eigen::Index>(k - 1), static_cast<Eigen::Index>(k)) = b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jac);
    QuadratureRule1D rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        rule.nodes[i] = es.eigenvalues()(ii);
        const double v0 = es.eigenvectors()(0, ii);
        rule.weights[i] = 2.0 * v0 * v0;
    }
    // Polish nodes with Newton on P_n for full double accuracy.
    for (std::size_t i = 0; i < n; ++i) {
        double x = rule.nodes[i];
        double dp = 1.0;
        for (int it = 0; it < 3; ++it) {
            double p0 = 1.0, p1 = x;
            for (std::size_t k = 2; k <= n; ++k) {
                const double kk = static_cast<double>(k);
                const double p2 = ((2.0 * kk - 1.0) * x * p1 - (kk - 1.0) * p0) / kk;
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) {
                p1 = x;
                p0 = 1.0;
            }
            dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
            x -= p1 / dp;
        }
        rule.nodes[i] = x;
        rule.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return cache.emplace(n, std::move(rule)).first->second;
}

const TriangleRule& triangle_rule(int degree)
{
    static std::mutex mtx;
    static std::map<int, TriangleRule> cache;
    std::lock_guard lock(mtx);
    if (auto it = cache.find(degree); it != cache.end()) return it->second;

    // Collapsed tensor rule: x = u (1 - v), y = v, dx dy = (1 - v) du dv.  The
    // factor (1 - v) raises the degree in v by one.
    const std::size_t nu = static_cast<std::size_t>(degree / 2 + 1);
    const std::size_t nv = static_cast<std::size_t>((degree + 1) / 2 + 1);
    const QuadratureRule1D gu = gauss_legendre(nu);
    const QuadratureRule1D gv = gauss_legendre(nv);
    TriangleRule rule;
    for (std::size_t i = 0; i < nu; ++i) {
        const double u = 0.5 * (gu.nodes[i] + 1.0);
        for (std::size_t j = 0; j < nv; ++j) {
            const double v = 0.5 * (gv.nodes[j] + 1.0);
            const double x = u * (1.0 - v);
            const double y = v;
            rule.bary.push_back({1.0 - x - y, x, y});
            rule.weights.push_back(0.25 * gu.weights[i] * gv.weights[j] * (1.0 - v));
        }
    }
    return cache.emplace(degree, std::move(rule)).first->second;
}

std::vector<double> spectral_derivative(std::span<const double> samples, double period, int order)
{
    const std::size_t n = samples.size();
    if (n == 0) return {};
    if (order == 0) return {samples.begin(), samples.end()};
    Eigen::FFT<double> fft;
    std::vector<double> in(samples.begin(), samples.end());
    std::vector<std::complex<double>> spec;
    fft.fwd(spec, in);  // full-length complex spectrum
    const double w0 = 2.0 * std::numbers::pi / period;
    const std::complex<double> iu(0.0, 1.0);
    for (std::size_t k = 0; k < n; ++k) {
        long kk = static_cast<long>(k);
        if (k > n / 2) kk -= static_cast<long>(n);
        if (n % 2 == 0 && k == n / 2 && (order % 2 == 1)) {
            spec[k] = 0.0;
            continue;
        }
        std::complex<double> factor = 1.0;
        const std::complex<double> ik = iu * (w0 * static_cast<double>(kk));
        for (int o = 0; o < order; ++o) factor *= ik;
        spec[k] *= factor;
    }
    std::vector<double> out;
    fft.inv(out, spec);
    out.resize(n);
    return out;
}

double hermite_trapezoid(std::span<const double> f, std::span<const double> df, double step)
{
    if (f.size() != df.size() || f.size() < 2) throw ContractError("hermite_trapezoid: size mismatch");
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < f.size(); ++i)
        sum += 0.5 * step * (f[i] + f[i + 1]) + step * step / 12.0 * (df[i] - df[i + 1]);
    return sum;
}

UniformSpline::UniformSpline(std::vector<double> values, double x0, double step)
    : values_(std::move(values)), x0_(x0), step_(step)
{
    const std::size_t n = values_.size();
    if (n < 2) throw InputError("spline needs at least two samples");
    second_.assign(n, 0.0);
    if (n == 2) return;
    // Natural spline: tridiagonal system for interior second derivatives.
    std::vector<double> c(n, 0.0), d(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double rhs = 6.0 * (values_[i + 1] - 2.0 * values_[i] + values_[i - 1]) / (step_ * step_);
        const double denom = 4.0 - (i > 1 ? c[i - 1] : 0.0);
        c[i] = 1.0 / denom;
        d[i] = (rhs - (i > 1 ? d[i - 1] : 0.0)) / denom;
    }
    for (std::size_t i = n - 2; i >= 1; --i) {
        second_[i] = d[i] - c[i] * second_[i + 1];
        if (i == 1) break;
    }
}

double UniformSpline::operator()(double x) const
{
    const std::size_t n = values_.size();
    double u = (x - x0_) / step_;
    auto i = static_cast<std::ptrdiff_t>(std::floor(u));
    i = std::clamp<std::ptrdiff_t>(i, 0, static_cast<std::ptrdiff_t>(n) - 2);
    const double t = u - static_cast<double>(i);
    const auto k = static_cast<std::size_t>(i);
    const double a = 1.0 - t;
    const double h2 = step_ * step_;
    return a * values_[k] + t * values_[k + 1] +
           ((a * a * a - a) * second_[k] + (t * t * t - t) * second_[k + 1]) * h2 / 6.0;
}

double UniformSpline::derivative(double x) const
{
    const std::size_t n = values_.size();
    double u = (x - x0_) / step_;
    auto i = static_cast<std::ptrdiff_t>(std::floor(u));
    i = std::clamp<std::ptrdiff_t>(i, 0, static_cast<std::ptrdiff_t>(n) - 2);
    const double t = u - static_cast<double>(i);
    const auto k = static_cast<std::size_t>(i);
    const double a = 1.0 - t;
    return (values_[k + 1] - values_[k]) / step_ +
           (-(3.0 * a * a - 1.0) * second_[k] + (3.0 * t * t - 1.0) * second_[k + 1]) * step_ / 6.0;
}

double wrap_periodic(double x, double period)
{
    double w = std::fmod(x, period);
    if (w < 0.0) w += period;
    if (w >= period) w -= period;
    return w;
}

PeriodicQuinticHermite::PeriodicQuinticHermite(std::vector<double> y, std::vector<double> dy,
                                               std::vector<double> d2y, double period)
    : y_(std::move(y)), dy_(std::move(dy)), d2y_(std::move(d2y)), period_(period)
{
    if (y_.empty() || y_.size() != dy_.size() || y_.size() != d2y_.size())
        throw ContractError("PeriodicQuinticHermite: inconsistent sample sizes");
    step_ = period_ / static_cast<double>(y_.size());
}

std::size_t PeriodicQuinticHermite::locate(double& x, double& t) const
{
    x = wrap_periodic(x, period_);
    const double u = x / step_;
    auto i = static_cast<std::size_t>(u);
    if (i >= y_.size()) i = y_.size() - 1;
    t = u - static_cast<double>(i);
    return i;
}

namespace {

// Quintic Hermite basis on t in [0, 1] for a cell of width h.
struct Quintic {
    double v[6];  // coefficients of y0, y1, h*dy0, h*dy1, h^2*d2y0, h^2*d2y1
};

Quintic quintic_basis(double t, int deriv)
{
    const double t2 = t * t, t3 = t2 * t, t4 = t3 * t, t5 = t4 * t;
    Quintic q{};
    if (deriv == 0) {
        q.v[0] = 1 - 10 * t3 + 15 * t4 - 6 * t5;
        q.v[1] = 10 * t3 - 15 * t4 + 6 * t5;
        q.v[2] = t - 6 * t3 + 8 * t4 - 3 * t5;
        q.v[3] = -4 * t3 + 7 * t4 - 3 * t5;
        q.v[4] = 0.5 * (t2 - 3 * t3 + 3 * t4 - t5);
        q.v[5] = 0.5 * (t3 - 2 * t4 + t5);
    } else if (deriv == 1) {
        q.v[0] = -30 * t2 + 60 * t3 - 30 * t4;
        q.v[1] = 30 * t2 - 60 * t3 + 30 * t4;
        q.v[2] = 1 - 18 * t2 + 32 * t3 - 15 * t4;
        q.v[3] = -12 * t2 + 28 * t3 - 15 * t4;
        q.v[4] = 0.5 * (2 * t - 9 * t2 + 12 * t3 - 5 * t4);
        q.v[5] = 0.5 * (3 * t2 - 8 * t3 + 5 * t4);
    } else {
        q.v[0] = -60 * t + 180 * t2 - 120 * t3;
        q.v[1] = 60 * t - 180 * t2 + 120 * t3;
        q.v[2] = -36 * t + 96 * t2 - 60 * t3;
        q.v[3] = -24 * t + 84 * t2 - 60 * t3;
        q.v[4] = 0.5 * (2 - 18 * t + 36 * t2 - 20 * t3);
        q.v[5] = 0.5 * (6 * t - 24 * t2 + 20 * t3);
    }
    return q;
}

}  // namespace

double PeriodicQuinticHermite::operator()(double x) const
{
    double t = 0.0;
    const std::size_t i = locate(x, t);
    const std::size_t j = (i + 1) % y_.size();
    const Quintic q = quintic_basis(t, 0);
    const double h = step_;
    return q.v[0] * y_[i] + q.v[1] * y_[j] + h * (q.v[2] * dy_[i] + q.v[3] * dy_[j]) +
           h * h * (q.v[4] * d2y_[i] + q.v[5] * d2y_[j]);
}

double PeriodicQuinticHermite::prime(double x) const
{
    double t = 0.0;
    const std::size_t i = locate(x, t);
    const std::size_t j = (i + 1) % y_.size();
    const Quintic q = quintic_basis(t, 1);
    const double h = step_;
    return (q.v[0] * y_[i] + q.v[1] * y_[j]) / h + (q.v[2] * dy_[i] + q.v[3] * dy_[j]) +
           h * (q.v[4] * d2y_[i] + q.v[5] * d2y_[j]);
}

double PeriodicQuinticHermite::double_prime(double x) const
{
    double t = 0.0;
    const std::size_t i = locate(x, t);
    const std::size_t j = (i + 1) % y_.size();
    const Quintic q = quintic_basis(t, 2);
    const double h = step_;
    return (q.v[0] * y_[i] + q.v[1] * y_[j]) / (h * h) + (q.v[2] * dy_[i] + q.v[3] * dy_[j]) / h +
           (q.v[4] * d2y_[i] + q.v[5] * d2y_[j]);
}

PeriodicCubicHermite::PeriodicCubicHermite(std::vector<double> y, std::vector<double> dy, double period)
    : y_(std::move(y)), dy_(std::move(dy)), period_(period)
{
    if (y_.empty() || y_.size() != dy_.size()) throw ContractError("PeriodicCubicHermite: inconsistent sizes");
    step_ = period_ / static_cast<double>(y_.size());
}

double PeriodicCubicHermite::operator()(double x) const
{
    x = wrap_periodic(x, period_);
    auto i = static_cast<std::size_t>(x / step_);
    if (i >= y_.size()) i = y_.size() - 1;
    const std::size_t j = (i + 1) % y_.size();
    const double t = x / step_ - static_cast<double>(i);
    const double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * y_[i] + (t3 - 2 * t2 + t) * step_ * dy_[i] + (-2 * t3 + 3 * t2) * y_[j] +
           (t3 - t2) * step_ * dy_[j];
}

double PeriodicCubicHermite::prime(double x) const
{
    x = wrap_periodic(x, period_);
    auto i = static_cast<std::size_t>(x / step_);
    if (i >= y_.size()) i = y_.size() - 1;
    const std::size_t j = (i + 1) % y_.size();
    const double t = x / step_ - static_cast<double>(i);
    const double t2 = t * t;
    return ((6 * t2 - 6 * t) * y_[i] + (-6 * t2 + 6 * t) * y_[j]) / step_ + (3 * t2 - 4 * t + 1) * dy_[i] +
           (3 * t2 - 2 * t) * dy_[j];
}

LinearFit least_squares_line(std::span<const double> x, std::span<const double> y)
{
    if (x.size() != y.size() || x.size() < 2) throw ContractError("least_squares_line: need >= 2 points");
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double den = n * sxx - sx * sx;
    LinearFit fit;
    fit.slope = (n * sxy - sx * sy) / den;
    fit.intercept = (sy - fit.slope * sx) / n;
    return fit;
}

}  // namespace curvres
