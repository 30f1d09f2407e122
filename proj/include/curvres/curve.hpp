#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <ostream>
#include <string_view>
#include <vector>

#include "curvres/numerics.hpp"

namespace curvres {

using Point = std::array<double, 2>;

/// A closed planar curve given either analytically (t -> x(t) on a period)
/// or as a periodic table of sample points.
class ClosedCurve {
public:
    using Parametrization = std::function<Point(double)>;

    static ClosedCurve from_function(Parametrization x, double period);
    static ClosedCurve from_expressions(std::string_view x1, std::string_view x2, double period);
    /// Periodic samples; a trailing copy of the first point is dropped.
    static ClosedCurve from_samples(std::vector<Point> points);

    static ClosedCurve circle(double radius, Point centre = {0.0, 0.0});
    static ClosedCurve ellipse(double a, double b, Point centre = {0.0, 0.0});

    /// `count` points at uniform parameter values over one period.
    std::vector<Point> sample(std::size_t count) const;
    bool analytic() const { return static_cast<bool>(x_); }
    double period() const { return period_; }
    /// |x(period) - x(0)|; zero for sample tables.
    double closure_gap() const;

private:
    Parametrization x_;
    std::vector<Point> table_;
    double period_ = 1.0;
};

/// Arc-length parametrized curve with its Frenet frame on a uniform s grid.
///
/// The orientation produced by reparametrize_arclength is clockwise, so the
/// normal nu = (-alpha_2', alpha_1') points out of the bounded component and
/// the curvature of a convex curve is negative.
class CurveFrame {
public:
    CurveFrame() = default;

    std::size_t size() const { return s_.size(); }
    double length() const { return length_; }
    double step() const { return length_ / static_cast<double>(s_.size()); }
    double eps_star() const { return eps_star_; }
    double curvature_total() const;  // trapezoid integral of kappa

    const std::vector<double>& s() const { return s_; }
    const std::vector<Point>& points() const { return points_; }
    const std::vector<Point>& tangents() const { return tangent_; }
    const std::vector<Point>& normals() const { return normal_; }
    const std::vector<double>& kappa() const { return kappa_; }

    // Off-grid evaluation (periodic Hermite interpolation).
    Point position(double s) const;
    Point tangent(double s) const;  // derivative of the interpolant, not renormalized
    Point normal(double s) const;
    Point second_derivative(double s) const;
    double curvature(double s) const;

    Point tubular_to_cartesian(double s, double r) const;
    /// Nearest-point projection; empty if the point is not within
    /// `half_width` of the curve (or the projection fails to converge).
    std::optional<std::array<double, 2>> cartesian_to_tubular(const Point& x, double half_width) const;

    /// The same curve traversed in the opposite direction, s -> L - s:
    /// kappa -> -kappa, nu -> -nu.
    CurveFrame flipped() const;
    /// True when nu points out of the bounded component.
    bool outward() const { return outward_; }

    /// Signed shoelace area of the sample polygon (negative for clockwise).
    double signed_area() const;
    /// Winding-number test against the sample polygon.
    bool contains(const Point& x) const;

    void write_csv(std::ostream& out) const;

    friend CurveFrame reparametrize_arclength(const ClosedCurve& curve, std::size_t grid_size);

private:
    void build_interpolants();

    std::vector<double> s_;
    std::vector<Point> points_, tangent_, normal_, second_;
    std::vector<double> kappa_, kappa_prime_;
    double length_ = 0.0;
    double eps_star_ = 0.0;
    bool outward_ = true;

    PeriodicQuinticHermite x1_, x2_;
    PeriodicCubicHermite kappa_interp_;
};

/// Uniform arc-length resampling with spectral differentiation.  Throws
/// InputError for open, self-intersecting or zero-speed curves.
CurveFrame reparametrize_arclength(const ClosedCurve& curve, std::size_t grid_size = 256);

/// Pairwise segment intersection test on a closed polyline (heuristic).
bool polyline_is_simple(const std::vector<Point>& points);

/// Winding number of a closed polyline around x.
int winding_number(const std::vector<Point>& polygon, const Point& x);

}  // namespace curvres
