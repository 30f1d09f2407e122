#include "curvres/curve.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <memory>
#include <numbers>

#include "curvres/error.hpp"
#include "curvres/expr.hpp"

namespace curvres {

namespace {

using cplx = std::complex<double>;

// Trigonometric interpolant of uniformly sampled periodic data.
class TrigSeries {
public:
    TrigSeries(const std::vector<double>& samples, double period) : omega_(2.0 * std::numbers::pi / period)
    {
        const std::size_t n = samples.size();
        Eigen::FFT<double> fft;
        std::vector<cplx> spec;
        fft.fwd(spec, samples);
        half_ = n / 2;
        c_.assign(2 * half_ + 1, cplx(0.0));
        for (std::size_t k = 0; k <= half_; ++k) {
            cplx ck = spec[k] / static_cast<double>(n);
            cplx cm = k == 0 ? ck : spec[n - k] / static_cast<double>(n);
            if (n % 2 == 0 && k == half_) {
                ck *= 0.5;
                cm = ck;  // Nyquist split evenly
            }
            c_[half_ + k] = ck;
            c_[half_ - k] = cm;
        }
    }

    // d-th derivative at t.
    double operator()(double t, int d = 0) const
    {
        double sum = c_[half_].real() * (d == 0 ? 1.0 : 0.0);
        const cplx w = std::polar(1.0, omega_ * t);
        cplx e = 1.0;
        for (std::size_t k = 1; k <= half_; ++k) {
            e *= w;
            const double kw = static_cast<double>(k) * omega_;
            cplx f = cplx(0.0, kw);
            cplx fac = std::pow(f, d);
            cplx facm = std::pow(-f, d);
            sum += (c_[half_ + k] * fac * e + c_[half_ - k] * facm * std::conj(e)).real();
        }
        return sum;
    }

    // Antiderivative vanishing at t = 0.
    double integral(double t) const
    {
        double sum = c_[half_].real() * t;
        const cplx w = std::polar(1.0, omega_ * t);
        cplx e = 1.0;
        for (std::size_t k = 1; k <= half_; ++k) {
            e *= w;
            const cplx ikw(0.0, static_cast<double>(k) * omega_);
            sum += (c_[half_ + k] * (e - 1.0) / ikw + c_[half_ - k] * (std::conj(e) - 1.0) / (-ikw)).real();
        }
        return sum;
    }

    double mean() const { return c_[half_].real(); }

private:
    std::vector<cplx> c_;
    std::size_t half_ = 0;
    double omega_;
};

double cross(const Point& a, const Point& b) { return a[0] * b[1] - a[1] * b[0]; }
double dot(const Point& a, const Point& b) { return a[0] * b[0] + a[1] * b[1]; }
Point sub(const Point& a, const Point& b) { return {a[0] - b[0], a[1] - b[1]}; }

bool segments_intersect(const Point& p1, const Point& p2, const Point& q1, const Point& q2)
{
    const double d1 = cross(sub(p2, p1), sub(q1, p1));
    const double d2 = cross(sub(p2, p1), sub(q2, p1));
    const double d3 = cross(sub(q2, q1), sub(p1, q1));
    const double d4 = cross(sub(q2, q1), sub(p2, q1));
    return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0)) && d1 != 0 && d2 != 0 && d3 != 0 && d4 != 0;
}

}  // namespace

ClosedCurve ClosedCurve::from_function(Parametrization x, double period)
{
    if (!(period > 0.0) || !std::isfinite(period)) throw InputError("curve period must be positive");
    ClosedCurve c;
    c.x_ = std::move(x);
    c.period_ = period;
    return c;
}

ClosedCurve ClosedCurve::from_expressions(std::string_view x1, std::string_view x2, double period)
{
    auto e1 = std::make_shared<Expression>(Expression::parse(x1, {"t"}));
    auto e2 = std::make_shared<Expression>(Expression::parse(x2, {"t"}));
    return from_function([e1, e2](double t) { return Point{(*e1)({t}), (*e2)({t})}; }, period);
}

ClosedCurve ClosedCurve::from_samples(std::vector<Point> points)
{
    if (points.size() > 1) {
        const Point& a = points.front();
        const Point& b = points.back();
        if (std::hypot(a[0] - b[0], a[1] - b[1]) == 0.0) points.pop_back();
    }
    if (points.size() < 8) throw InputError("curve table needs at least 8 distinct samples");
    for (const auto& p : points)
        if (!std::isfinite(p[0]) || !std::isfinite(p[1])) throw InputError("curve table has non-finite samples");
    ClosedCurve c;
    c.table_ = std::move(points);
    c.period_ = 1.0;
    return c;
}

ClosedCurve ClosedCurve::circle(double radius, Point centre)
{
    if (!(radius > 0.0)) throw InputError("circle radius must be positive");
    return from_function(
        [=](double t) { return Point{centre[0] + radius * std::cos(t), centre[1] + radius * std::sin(t)}; },
        2.0 * std::numbers::pi);
}

ClosedCurve ClosedCurve::ellipse(double a, double b, Point centre)
{
    if (!(a > 0.0) || !(b > 0.0)) throw InputError("ellipse semi-axes must be positive");
    return from_function([=](double t) { return Point{centre[0] + a * std::cos(t), centre[1] + b * std::sin(t)}; },
                         2.0 * std::numbers::pi);
}

std::vector<Point> ClosedCurve::sample(std::size_t count) const
{
    std::vector<Point> out(count);
    if (x_) {
        for (std::size_t j = 0; j < count; ++j) {
            out[j] = x_(period_ * static_cast<double>(j) / static_cast<double>(count));
            if (!std::isfinite(out[j][0]) || !std::isfinite(out[j][1]))
                throw InputError("curve parametrization is not finite");
        }
        return out;
    }
    if (count == table_.size()) return table_;
    std::vector<double> a(table_.size()), b(table_.size());
    for (std::size_t j = 0; j < table_.size(); ++j) {
        a[j] = table_[j][0];
        b[j] = table_[j][1];
    }
    const TrigSeries sa(a, period_), sb(b, period_);
    for (std::size_t j = 0; j < count; ++j) {
        const double t = period_ * static_cast<double>(j) / static_cast<double>(count);
        out[j] = {sa(t), sb(t)};
    }
    return out;
}

double ClosedCurve::closure_gap() const
{
    if (!x_) return 0.0;
    const Point a = x_(0.0), b = x_(period_);
    return std::hypot(a[0] - b[0], a[1] - b[1]);
}

bool polyline_is_simple(const std::vector<Point>& p)
{
    const std::size_t n = p.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Point& a = p[i];
        const Point& b = p[(i + 1) % n];
        for (std::size_t j = i + 2; j < n; ++j) {
            if (i == 0 && j == n - 1) continue;  // neighbours through the seam
            if (segments_intersect(a, b, p[j], p[(j + 1) % n])) return false;
        }
    }
    return true;
}

int winding_number(const std::vector<Point>& poly, const Point& x)
{
    int wn = 0;
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Point& a = poly[i];
        const Point& b = poly[(i + 1) % n];
        const double side = cross(sub(b, a), sub(x, a));
        if (a[1] <= x[1]) {
            if (b[1] > x[1] && side > 0) ++wn;
        } else if (b[1] <= x[1] && side < 0) {
            --wn;
        }
    }
    return wn;
}

CurveFrame reparametrize_arclength(const ClosedCurve& curve, std::size_t grid_size)
{
    if (grid_size < 16) throw ContractError("arc-length grid needs at least 16 points");
    const std::size_t m = std::max<std::size_t>(4 * grid_size, 1024);
    const std::vector<Point> raw = curve.sample(m);
    double extent = 0.0;
    for (const auto& p : raw) extent = std::max({extent, std::abs(p[0]), std::abs(p[1])});
    if (curve.closure_gap() > 1e-8 * std::max(extent, 1.0)) throw InputError("curve is not closed");

    const double period = curve.period();
    std::vector<double> a(m), b(m);
    for (std::size_t j = 0; j < m; ++j) {
        a[j] = raw[j][0];
        b[j] = raw[j][1];
    }
    const TrigSeries xa(a, period), xb(b, period);
    std::vector<double> speed(m);
    double smax = 0.0, smin = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < m; ++j) {
        const double t = period * static_cast<double>(j) / static_cast<double>(m);
        speed[j] = std::hypot(xa(t, 1), xb(t, 1));
        smax = std::max(smax, speed[j]);
        smin = std::min(smin, speed[j]);
    }
    if (!(smin > 1e-10 * smax) || !(smax > 0.0)) throw InputError("curve parametrization has zero speed");
    const TrigSeries sigma(speed, period);
    const double length = sigma.mean() * period;

    CurveFrame f;
    const std::size_t n = grid_size;
    f.length_ = length;
    f.s_.resize(n);
    f.points_.resize(n);
    f.tangent_.resize(n);
    f.normal_.resize(n);
    f.second_.resize(n);
    f.kappa_.resize(n);
    f.kappa_prime_.resize(n);
    double t = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double s = length * static_cast<double>(j) / static_cast<double>(n);
        f.s_[j] = s;
        // Newton on S(t) = s; S is strictly increasing.
        for (int it = 0; it < 60; ++it) {
            const double g = sigma.integral(t) - s;
            const double dt = g / sigma(t);
            t -= dt;
            if (std::abs(dt) < 1e-15 * period) break;
        }
        const Point d1{xa(t, 1), xb(t, 1)};
        const Point d2{xa(t, 2), xb(t, 2)};
        const Point d3{xa(t, 3), xb(t, 3)};
        const double sp = std::hypot(d1[0], d1[1]);
        const double spd = dot(d1, d2) / sp;
        const double c12 = cross(d1, d2);
        f.points_[j] = {xa(t), xb(t)};
        f.tangent_[j] = {d1[0] / sp, d1[1] / sp};
        f.second_[j] = {(d2[0] - d1[0] * spd / sp) / (sp * sp), (d2[1] - d1[1] * spd / sp) / (sp * sp)};
        f.kappa_[j] = c12 / (sp * sp * sp);
        f.kappa_prime_[j] = (cross(d1, d3) / (sp * sp * sp) - 3.0 * c12 * spd / std::pow(sp, 4)) / sp;
        f.normal_[j] = {-f.tangent_[j][1], f.tangent_[j][0]};
        t += (length / static_cast<double>(n)) / sp;  // predictor for the next point
    }

    if (!polyline_is_simple(f.points_) || !polyline_is_simple(raw)) throw InputError("curve is self-intersecting");

    double kmax = 0.0;
    for (double k : f.kappa_) kmax = std::max(kmax, std::abs(k));
    f.eps_star_ = kmax > 0.0 ? 1.0 / kmax : std::numeric_limits<double>::infinity();

    // Orientation: nu must point out of the bounded component.
    const double delta = 0.25 * std::min(f.eps_star_, length / static_cast<double>(n));
    int inward = 0, votes = 0;
    for (std::size_t j = 0; j < n; j += std::max<std::size_t>(1, n / 16)) {
        const Point probe{f.points_[j][0] + delta * f.normal_[j][0], f.points_[j][1] + delta * f.normal_[j][1]};
        inward += winding_number(raw, probe) != 0 ? 1 : 0;
        ++votes;
    }
    f.build_interpolants();
    if (2 * inward > votes) {
        f = f.flipped();
    }
    f.outward_ = true;
    return f;
}

void CurveFrame::build_interpolants()
{
    const std::size_t n = s_.size();
    std::vector<double> y1(n), y2(n), d1(n), d2(n), e1(n), e2(n);
    for (std::size_t j = 0; j < n; ++j) {
        y1[j] = points_[j][0];
        y2[j] = points_[j][1];
        d1[j] = tangent_[j][0];
        d2[j] = tangent_[j][1];
        e1[j] = second_[j][0];
        e2[j] = second_[j][1];
    }
    x1_ = PeriodicQuinticHermite(y1, d1, e1, length_);
    x2_ = PeriodicQuinticHermite(y2, d2, e2, length_);
    kappa_interp_ = PeriodicCubicHermite(kappa_, kappa_prime_, length_);
}

CurveFrame CurveFrame::flipped() const
{
    CurveFrame f = *this;
    const std::size_t n = s_.size();
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t k = (n - j) % n;
        f.points_[j] = points_[k];
        f.tangent_[j] = {-tangent_[k][0], -tangent_[k][1]};
        f.second_[j] = second_[k];
        f.kappa_[j] = -kappa_[k];
        f.kappa_prime_[j] = kappa_prime_[k];
        f.normal_[j] = {-normal_[k][0], -normal_[k][1]};
    }
    f.outward_ = !outward_;
    f.build_interpolants();
    return f;
}

double CurveFrame::curvature_total() const
{
    double sum = 0.0;
    for (double k : kappa_) sum += k;
    return sum * step();
}

Point CurveFrame::position(double s) const { return {x1_(s), x2_(s)}; }
Point CurveFrame::tangent(double s) const { return {x1_.prime(s), x2_.prime(s)}; }
Point CurveFrame::second_derivative(double s) const { return {x1_.double_prime(s), x2_.double_prime(s)}; }

Point CurveFrame::normal(double s) const
{
    const Point t = tangent(s);
    const double len = std::hypot(t[0], t[1]);
    return {-t[1] / len, t[0] / len};
}

double CurveFrame::curvature(double s) const { return kappa_interp_(s); }

Point CurveFrame::tubular_to_cartesian(double s, double r) const
{
    const Point a = position(s);
    const Point nu = normal(s);
    return {a[0] + r * nu[0], a[1] + r * nu[1]};
}

std::optional<std::array<double, 2>> CurveFrame::cartesian_to_tubular(const Point& x, double half_width) const
{
    std::size_t best = 0;
    double dbest = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < points_.size(); ++j) {
        const double d = std::hypot(x[0] - points_[j][0], x[1] - points_[j][1]);
        if (d < dbest) {
            dbest = d;
            best = j;
        }
    }
    if (dbest > half_width + step()) return std::nullopt;
    double s = s_[best];
    bool converged = false;
    for (int it = 0; it < 40; ++it) {
        const Point d = sub(x, position(s));
        const Point t = tangent(s);
        const Point tt = second_derivative(s);
        const double g = dot(d, t);
        const double dg = -dot(t, t) + dot(d, tt);
        if (dg == 0.0) break;
        const double ds = g / dg;
        s -= std::clamp(ds, -step(), step());
        if (std::abs(ds) < 1e-14 * length_) {
            converged = true;
            break;
        }
    }
    if (!converged) return std::nullopt;
    s = wrap_periodic(s, length_);
    const Point d = sub(x, position(s));
    const double r = dot(d, normal(s));
    if (std::abs(r) > half_width) return std::nullopt;
    return std::array<double, 2>{s, r};
}

double CurveFrame::signed_area() const
{
    double a = 0.0;
    const std::size_t n = points_.size();
    for (std::size_t j = 0; j < n; ++j) a += cross(points_[j], points_[(j + 1) % n]);
    return 0.5 * a;
}

bool CurveFrame::contains(const Point& x) const { return winding_number(points_, x) != 0; }

void CurveFrame::write_csv(std::ostream& out) const
{
    out << "s,x1,x2,kappa\n";
    out.precision(17);
    for (std::size_t j = 0; j < s_.size(); ++j)
        out << s_[j] << ',' << points_[j][0] << ',' << points_[j][1] << ',' << kappa_[j] << '\n';
}

}  // namespace curvres
