#include "curvres/radial.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "curvres/error.hpp"
#include "curvres/ode.hpp"

namespace curvres {

namespace {

constexpr double pi = std::numbers::pi;

double floor_of(const std::function<double(double)>& W, double rho_max)
{
    double w = W(0.0);
    for (int i = 1; i <= 2000; ++i) w = std::min(w, W(rho_max * i / 2000.0));
    return w;
}

}  // namespace

RadialOracle RadialOracle::heps(const RadialBenchmark& b, const PotentialProfile& profile, double eps)
{
    if (!(eps > 0.0) || eps >= 0.5 * b.radius) throw ConfigError("radial oracle: epsilon must lie in (0, R/2)");
    if (profile.u_depends_on_s()) throw UnsupportedModelError("radial oracle needs U independent of s");
    RadialOracle o;
    o.b_ = b;
    o.kind_ = Kind::heps;
    o.eps_ = eps;
    const double R = b.radius;
    o.layer_ = [profile, eps, R](double rho) {
        const double n = (rho - R) / eps;
        if (n < -1.0 || n > 1.0) return 0.0;
        return profile.V(n) / (eps * eps) + profile.U(0.0, n) / eps;
    };
    double vmin = 0.0;
    for (int i = 0; i <= 2000; ++i) vmin = std::min(vmin, o.layer_(R - eps + 2.0 * eps * i / 2000.0));
    o.floor_ = floor_of(b.W, b.rho_max) + vmin;
    return o;
}

RadialOracle RadialOracle::limit(const RadialBenchmark& b, double theta, double upsilon)
{
    if (theta == 0.0 || !std::isfinite(theta)) throw UnsupportedModelError("radial oracle: theta must be non-zero");
    RadialOracle o;
    o.b_ = b;
    o.kind_ = Kind::limit;
    o.theta_ = theta;
    o.upsilon_ = upsilon;
    o.floor_ = floor_of(b.W, b.rho_max) - 4.0 * upsilon * upsilon * (1.0 + 1.0 / (theta * theta)) - 1.0;
    return o;
}

RadialOracle RadialOracle::dirichlet(const RadialBenchmark& b, Kind which)
{
    if (which != Kind::dirichlet_inner && which != Kind::dirichlet_outer && which != Kind::dirichlet_split)
        throw ContractError("radial oracle: not a Dirichlet kind");
    RadialOracle o;
    o.b_ = b;
    o.kind_ = which;
    o.floor_ = floor_of(b.W, b.rho_max);
    return o;
}

// Pruefer angle of -(rho f')' + (m^2/rho + rho (W + V)) f = lambda rho f,
// tan(phi) = f / (rho f'), integrated up to rho_max (or the radius for the
// inner Dirichlet problem).
double RadialOracle::pruefer_end(int m, double lambda, Kind part) const
{
    const double R = b_.radius;
    const double mm = static_cast<double>(m) * m;
    OdeOptions opt;
    opt.rtol = b_.ode_rtol;
    opt.atol = 1e-13;
    auto rhs_scaled = [&](double scale, bool with_layer) {
        return [&, scale, with_layer](double rho, const OdeState<1>& y) -> OdeState<1> {
            double q = mm / rho + rho * b_.W(rho);
            if (with_layer) q += rho * layer_(rho);
            const double c = std::cos(y[0]), s = std::sin(y[0]);
            return {c * c / (scale * rho) + scale * (lambda * rho - q) * s * s};
        };
    };
    if (part == Kind::dirichlet_outer) {
        return dopri5<1>(rhs_scaled(1.0, false), {0.0}, R, b_.rho_max, opt)[0];
    }
    // Regular start from the series f = rho^m (1 + c2 rho^2).
    const double rho0 = 1e-4 * R;
    const double q0 = b_.W(0.0) + (layer_ ? layer_(0.0) : 0.0);
    const double c2 = (q0 - lambda) / (4.0 * (m + 1.0));
    double phi = std::atan2(1.0 + c2 * rho0 * rho0, m + (m + 2.0) * c2 * rho0 * rho0);
    if (part == Kind::heps) {
        const double a = R - eps_, bnd = R + eps_;
        phi = dopri5<1>(rhs_scaled(1.0, true), {phi}, rho0, a, opt)[0];
        phi = dopri5<1>(rhs_scaled(1.0, true), {phi}, a, bnd, opt)[0];
        return dopri5<1>(rhs_scaled(1.0, true), {phi}, bnd, b_.rho_max, opt)[0];
    }
    phi = dopri5<1>(rhs_scaled(1.0, false), {phi}, rho0, R, opt)[0];
    if (part == Kind::dirichlet_inner) return phi;
    // Transmission: g = u / theta outside is continuous and rho theta^2 g'
    // jumps by R upsilon g.
    const double s = std::sin(phi);
    if (s != 0.0) {
        const double k = std::floor(phi / pi);
        const double cot = std::cos(phi) / s + R * upsilon_;
        phi = k * pi + std::atan2(1.0, cot);
    }
    const double scale = theta_ * theta_;
    return dopri5<1>(rhs_scaled(scale, false), {phi}, R, b_.rho_max, opt)[0];
}

int RadialOracle::count_part(int m, double lambda, Kind part) const
{
    return static_cast<int>(std::floor(pruefer_end(m, lambda, part) / pi));
}

int RadialOracle::count_below(int m, double lambda) const
{
    if (m < 0) throw ContractError("radial oracle: negative angular mode");
    if (kind_ == Kind::dirichlet_split)
        return count_part(m, lambda, Kind::dirichlet_inner) + count_part(m, lambda, Kind::dirichlet_outer);
    return count_part(m, lambda, kind_);
}

double RadialOracle::eigenvalue(int m, int j) const
{
    double lo = floor_ - 1.0;
    while (count_below(m, lo) > j) lo -= 2.0 * std::abs(lo) + 10.0;
    double hi = std::max(lo + 1.0, 1.0);
    while (count_below(m, hi) <= j) hi += 2.0 * (hi - lo);
    for (int it = 0; it < 200 && hi - lo > 1e-13 * std::max(1.0, std::abs(hi)); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (count_below(m, mid) <= j)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

std::vector<RadialOracle::Level> RadialOracle::window(double lo, double hi, int m_max) const
{
    std::vector<Level> out;
    for (int m = 0; m <= m_max; ++m) {
        const int a = count_below(m, lo), b = count_below(m, hi);
        for (int j = a; j < b; ++j) out.push_back({eigenvalue(m, j), m, j, m == 0 ? 1 : 2});
    }
    std::sort(out.begin(), out.end(), [](const Level& x, const Level& y) { return x.lambda < y.lambda; });
    return out;
}

std::vector<double> RadialOracle::lowest(std::size_t k, int m_max) const
{
    if (kind_ == Kind::heps) throw ContractError("radial oracle: lowest() is meant for limit problems");
    double hi = floor_ + 10.0;
    for (int round = 0; round < 40; ++round, hi += 2.0 * (hi - floor_)) {
        std::size_t total = 0;
        for (int m = 0; m <= m_max; ++m) total += static_cast<std::size_t>(count_below(m, hi)) * (m == 0 ? 1 : 2);
        if (total < k) continue;
        std::vector<double> vals;
        for (const Level& l : window(floor_ - 1.0, hi, m_max))
            for (int c = 0; c < l.multiplicity; ++c) vals.push_back(l.lambda);
        vals.resize(k);
        return vals;
    }
    throw NumericalError("radial oracle: could not bracket the requested eigenvalues");
}

double RadialFunction::value(double r, int side) const
{
    if (r == radius && side != 0) {
        const auto it = std::lower_bound(rho.begin(), rho.end(), radius);
        const std::size_t i = static_cast<std::size_t>(it - rho.begin());
        return side < 0 ? f[i] : f[i + 1];
    }
    auto it = std::upper_bound(rho.begin(), rho.end(), r);
    std::size_t i = it == rho.begin() ? 0 : static_cast<std::size_t>(it - rho.begin()) - 1;
    i = std::min(i, rho.size() - 2);
    if (rho[i + 1] == rho[i]) ++i;  // duplicated abscissa at the radius
    i = std::min(i, rho.size() - 2);
    const double h = rho[i + 1] - rho[i];
    const double t = (r - rho[i]) / h;
    const double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * f[i] + (t3 - 2 * t2 + t) * h * df[i] + (-2 * t3 + 3 * t2) * f[i + 1] +
           (t3 - t2) * h * df[i + 1];
}

double RadialFunction::derivative(double r, int side) const
{
    if (r == radius && side != 0) {
        const auto it = std::lower_bound(rho.begin(), rho.end(), radius);
        const std::size_t i = static_cast<std::size_t>(it - rho.begin());
        return side < 0 ? df[i] : df[i + 1];
    }
    auto it = std::upper_bound(rho.begin(), rho.end(), r);
    std::size_t i = it == rho.begin() ? 0 : static_cast<std::size_t>(it - rho.begin()) - 1;
    i = std::min(i, rho.size() - 2);
    if (rho[i + 1] == rho[i]) ++i;
    i = std::min(i, rho.size() - 2);
    const double h = rho[i + 1] - rho[i];
    const double t = (r - rho[i]) / h;
    const double d0 = (6 * t * t - 6 * t) / h, d1 = 3 * t * t - 4 * t + 1, d2 = (-6 * t * t + 6 * t) / h,
                 d3 = 3 * t * t - 2 * t;
    return d0 * f[i] + d1 * df[i] + d2 * f[i + 1] + d3 * df[i + 1];
}

RadialFunction RadialOracle::eigenfunction(int m, double lambda) const
{
    if (kind_ == Kind::heps) throw ContractError("radial eigenfunctions are provided for limit problems only");
    const double R = b_.radius;
    const double mm = static_cast<double>(m) * m;
    OdeOptions opt;
    opt.rtol = 1e-12;
    opt.atol = 1e-300;
    // y = (f, rho f')
    auto rhs = [&](double rho, const OdeState<2>& y) -> OdeState<2> {
        return {y[1] / rho, (mm / rho + rho * (b_.W(rho) - lambda)) * y[0]};
    };
    const std::size_t n_in = 1200, n_out = 2400;
    RadialFunction out;
    out.radius = R;
    out.theta = kind_ == Kind::limit ? theta_ : 1.0;

    std::vector<double> g_in(n_in + 1), g_out(n_out + 1);
    const double rho0 = 1e-6 * R;
    for (std::size_t i = 0; i <= n_in; ++i) g_in[i] = rho0 + (R - rho0) * static_cast<double>(i) / n_in;
    for (std::size_t i = 0; i <= n_out; ++i) g_out[i] = b_.rho_max - (b_.rho_max - R) * static_cast<double>(i) / n_out;
    std::vector<OdeState<2>> s_in(n_in + 1), s_out(n_out + 1);
    const double c2 = (b_.W(0.0) - lambda) / (4.0 * (m + 1.0));
    const double f0 = std::pow(rho0, m) * (1.0 + c2 * rho0 * rho0);
    const double p0 = std::pow(rho0, m) * (m + (m + 2.0) * c2 * rho0 * rho0);
    integrate_on_grid<2>(rhs, {f0, p0}, g_in, s_in, opt);
    integrate_on_grid<2>(rhs, {0.0, -1e-30}, g_out, s_out, opt);

    double a_in = 1.0, a_out = 1.0;
    const double fin = s_in.back()[0], fout = s_out.back()[0];
    if (kind_ == Kind::dirichlet_inner) {
        a_out = 0.0;
    } else if (kind_ == Kind::dirichlet_outer) {
        a_in = 0.0;
    } else if (kind_ == Kind::dirichlet_split) {
        // Whichever side owns this level: the one whose count jumps at lambda.
        const double d = 1e-7 * std::max(1.0, std::abs(lambda));
        const bool inner = count_part(m, lambda + d, Kind::dirichlet_inner) > count_part(m, lambda - d, Kind::dirichlet_inner);
        if (inner)
            a_out = 0.0;
        else
            a_in = 0.0;
    } else {
        // u+ = theta u-; fall back to the flux condition if the trace vanishes.
        if (std::abs(fout) > 1e-12 * std::abs(s_out.back()[1]))
            a_out = theta_ * fin / fout;
        else
            a_out = (s_in.back()[1] + R * upsilon_ * fin) / (theta_ * s_out.back()[1]);
    }
    for (std::size_t i = 0; i <= n_in; ++i) {
        out.rho.push_back(g_in[i]);
        out.f.push_back(a_in * s_in[i][0]);
        out.df.push_back(a_in * s_in[i][1] / g_in[i]);
    }
    for (std::size_t i = n_out + 1; i-- > 0;) {
        out.rho.push_back(g_out[i]);
        out.f.push_back(a_out * s_out[i][0]);
        out.df.push_back(a_out * s_out[i][1] / g_out[i]);
    }
    // Normalize f(rho) cos(m phi) in L2 of the plane (trapezoid on each side).
    double norm2 = 0.0;
    for (std::size_t i = 0; i + 1 < out.rho.size(); ++i) {
        const double h = out.rho[i + 1] - out.rho[i];
        if (h <= 0.0) continue;
        norm2 += 0.5 * h * (out.f[i] * out.f[i] * out.rho[i] + out.f[i + 1] * out.f[i + 1] * out.rho[i + 1]);
    }
    norm2 *= m == 0 ? 2.0 * pi : pi;
    const double scale = 1.0 / std::sqrt(norm2);
    for (double& v : out.f) v *= scale;
    for (double& v : out.df) v *= scale;
    return out;
}

}  // namespace curvres
