#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace curvres {

struct QuadratureRule1D {
    std::vector<double> nodes;    // on [-1, 1]
    std::vector<double> weights;  // sum to 2
};

/// Gauss-Legendre rule with `n` points on [-1, 1].
const QuadratureRule1D& gauss_legendre(std::size_t n);

/// Composite Gauss-Legendre integral of f over [a, b] with `panels` panels of
/// `points` nodes each.
template <class F>
double integrate(F&& f, double a, double b, std::size_t panels = 32, std::size_t points = 8)
{
    const QuadratureRule1D& rule = gauss_legendre(points);
    const double h = (b - a) / static_cast<double>(panels);
    double sum = 0.0;
    for (std::size_t p = 0; p < panels; ++p) {
        const double mid = a + (static_cast<double>(p) + 0.5) * h;
        double part = 0.0;
        for (std::size_t q = 0; q < rule.nodes.size(); ++q) part += rule.weights[q] * f(mid + 0.5 * h * rule.nodes[q]);
        sum += 0.5 * h * part;
    }
    return sum;
}

/// Quadrature on the reference triangle {x, y >= 0, x + y <= 1} (area 1/2).
/// Points carry barycentric coordinates (l0, l1, l2) with l1 = x, l2 = y.
struct TriangleRule {
    std::vector<std::array<double, 3>> bary;
    std::vector<double> weights;  // sum to 1/2
};

/// Collapsed Gauss rule exact for polynomials of total degree `degree`.
const TriangleRule& triangle_rule(int degree);

/// Spectral derivative of order `order` of uniformly sampled periodic data
/// with the given period.  Odd derivatives drop the Nyquist mode.
std::vector<double> spectral_derivative(std::span<const double> samples, double period, int order);

/// Trapezoid rule with the Euler-Maclaurin end correction on a uniform grid:
/// exact for cubics per cell.  Uses samples of f and f'.
double hermite_trapezoid(std::span<const double> f, std::span<const double> df, double step);

/// Natural-boundary cubic spline through uniformly spaced samples.
class UniformSpline {
public:
    UniformSpline() = default;
    UniformSpline(std::vector<double> values, double x0, double step);

    double operator()(double x) const;
    double derivative(double x) const;
    double x0() const { return x0_; }
    double x1() const { return x0_ + step_ * static_cast<double>(values_.size() - 1); }

private:
    std::vector<double> values_;
    std::vector<double> second_;  // spline second derivatives at the knots
    double x0_ = 0.0;
    double step_ = 1.0;
};

/// Periodic quintic Hermite interpolation of uniformly sampled data with
/// first and second derivatives.  Abscissae are wrapped into [0, period).
class PeriodicQuinticHermite {
public:
    PeriodicQuinticHermite() = default;
    PeriodicQuinticHermite(std::vector<double> y, std::vector<double> dy, std::vector<double> d2y, double period);

    double operator()(double x) const;
    double prime(double x) const;
    double double_prime(double x) const;
    double period() const { return period_; }

private:
    std::size_t locate(double& x, double& t) const;

    std::vector<double> y_, dy_, d2y_;
    double period_ = 1.0;
    double step_ = 1.0;
};

/// Periodic cubic Hermite interpolation (value + first derivative samples).
class PeriodicCubicHermite {
public:
    PeriodicCubicHermite() = default;
    PeriodicCubicHermite(std::vector<double> y, std::vector<double> dy, double period);

    double operator()(double x) const;
    double prime(double x) const;

private:
    std::vector<double> y_, dy_;
    double period_ = 1.0;
    double step_ = 1.0;
};

/// Wrap x into [0, period).
double wrap_periodic(double x, double period);

/// Least-squares slope and intercept of y against x.
struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
};
LinearFit least_squares_line(std::span<const double> x, std::span<const double> y);

}  // namespace curvres
