#include "curvres/resonance.hpp"

#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "curvres/error.hpp"
#include "curvres/numerics.hpp"

namespace curvres {

std::vector<double> unit_interval_grid(std::size_t samples)
{
    if (samples < 2) throw ContractError("n-grid needs at least two samples");
    std::vector<double> n(samples);
    for (std::size_t k = 0; k < samples; ++k)
        n[k] = -1.0 + 2.0 * static_cast<double>(k) / static_cast<double>(samples - 1);
    n.back() = 1.0;
    return n;
}

double GridFunction::operator()(double x) const
{
    const double h = step();
    const double u = (x - n.front()) / h;
    auto i = static_cast<std::ptrdiff_t>(std::floor(u));
    i = std::clamp<std::ptrdiff_t>(i, 0, static_cast<std::ptrdiff_t>(n.size()) - 2);
    const auto k = static_cast<std::size_t>(i);
    const double t = u - static_cast<double>(i);
    const double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * value[k] + (t3 - 2 * t2 + t) * h * derivative[k] +
           (-2 * t3 + 3 * t2) * value[k + 1] + (t3 - t2) * h * derivative[k + 1];
}

namespace {

GridFunction shoot(const PotentialProfile& profile, double alpha, double y0, double dy0, const ResonanceOptions& opts)
{
    GridFunction g;
    g.n = unit_interval_grid(opts.samples);
    std::vector<OdeState<2>> states(g.n.size());
    auto rhs = [&](double n, const OdeState<2>& y) -> OdeState<2> { return {y[1], alpha * profile.V(n) * y[0]}; };
    integrate_on_grid<2>(rhs, {y0, dy0}, g.n, states, opts.ode);
    g.value.resize(g.n.size());
    g.derivative.resize(g.n.size());
    for (std::size_t k = 0; k < g.n.size(); ++k) {
        g.value[k] = states[k][0];
        g.derivative[k] = states[k][1];
    }
    return g;
}

double defect_only(const PotentialProfile& profile, double alpha, const ResonanceOptions& opts)
{
    auto rhs = [&](double n, const OdeState<2>& y) -> OdeState<2> { return {y[1], alpha * profile.V(n) * y[0]}; };
    return dopri5<2>(rhs, {1.0, 0.0}, -1.0, 1.0, opts.ode)[1];
}

}  // namespace

HalfBoundState detect_resonance(const PotentialProfile& profile, double tol, const ResonanceOptions& opts)
{
    if (!(tol > 0.0)) throw ContractError("detect_resonance: tolerance must be positive");
    profile.check_finite(opts.samples, 1.0, 4);
    HalfBoundState st;
    st.h = shoot(profile, 1.0, 1.0, 0.0, opts);
    st.defect = st.h.derivative.back();
    st.max_abs_h = 0.0;
    for (double v : st.h.value) st.max_abs_h = std::max(st.max_abs_h, std::abs(v));
    st.resonant = std::abs(st.defect) <= tol * (1.0 + st.max_abs_h);
    st.theta = st.h.value.back();
    if (st.resonant && st.theta == 0.0)
        throw UnsupportedModelError("half-bound state vanishes at n = 1 (theta = 0)");
    return st;
}

double resonance_defect(const PotentialProfile& base, double alpha, const ResonanceOptions& opts)
{
    return defect_only(base, alpha, opts);
}

CouplingScan scan_coupling(const PotentialProfile& base, double alpha_lo, double alpha_hi, std::size_t grid,
                           const ResonanceOptions& opts)
{
    if (!std::isfinite(alpha_lo) || !std::isfinite(alpha_hi) || alpha_hi <= alpha_lo)
        throw ContractError("scan_coupling: coupling range must be finite and non-empty");
    if (grid < 2) throw ContractError("scan_coupling: grid must have at least two points");
    base.check_finite(opts.samples, 1.0, 4);

    CouplingScan scan;
    scan.alpha.resize(grid);
    scan.defect.resize(grid);
    scan.resonant.resize(grid);
    for (std::size_t j = 0; j < grid; ++j) {
        const double a = alpha_lo + (alpha_hi - alpha_lo) * static_cast<double>(j) / static_cast<double>(grid - 1);
        scan.alpha[j] = a;
        scan.defect[j] = defect_only(base, a, opts);
    }

    const bool zero_in_range = alpha_lo <= 0.0 && 0.0 <= alpha_hi;
    // V = 0 (or V vanishing on the sample grid): every coupling is resonant.
    double vmax = 0.0;
    for (double n : unit_interval_grid(opts.samples)) vmax = std::max(vmax, std::abs(base.V(n)));
    std::size_t zero_run = 0, longest_run = 0;
    for (double d : scan.defect) {
        zero_run = (std::abs(d) <= opts.tol * 1e-6) ? zero_run + 1 : 0;
        longest_run = std::max(longest_run, zero_run);
    }
    if (vmax == 0.0 || longest_run >= 2) {
        scan.degenerate = true;
        for (std::size_t j = 0; j < grid; ++j) scan.resonant[j] = std::abs(scan.defect[j]) <= opts.tol;
        if (zero_in_range) scan.roots.push_back(0.0);
        return scan;
    }

    auto defect_fn = [&](double a) { return defect_only(base, a, opts); };
    std::vector<double> roots;
    if (zero_in_range) roots.push_back(0.0);
    for (std::size_t j = 0; j < grid; ++j) {
        if (scan.defect[j] == 0.0) roots.push_back(scan.alpha[j]);
        if (j + 1 == grid) break;
        const double d0 = scan.defect[j], d1 = scan.defect[j + 1];
        if (d0 == 0.0 || d1 == 0.0 || (d0 > 0.0) == (d1 > 0.0)) continue;
        std::uintmax_t iters = 200;
        const auto bracket = boost::math::tools::toms748_solve(defect_fn, scan.alpha[j], scan.alpha[j + 1], d0, d1,
                                                               boost::math::tools::eps_tolerance<double>(50), iters);
        roots.push_back(0.5 * (bracket.first + bracket.second));
    }
    std::sort(roots.begin(), roots.end());
    for (double r : roots) {
        if (scan.roots.empty() || std::abs(r - scan.roots.back()) > 1e-9 * (1.0 + std::abs(r))) scan.roots.push_back(r);
    }
    for (std::size_t j = 0; j < grid; ++j) {
        // Threshold relative to the solution size at this coupling.
        const HalfBoundState st = detect_resonance(base.scaled(scan.alpha[j]), opts.tol, opts);
        scan.resonant[j] = st.resonant;
    }
    return scan;
}

GridFunction solve_h1(const PotentialProfile& profile, const ResonanceOptions& opts)
{
    profile.check_finite(opts.samples, 1.0, 4);
    return shoot(profile, 1.0, 0.0, 1.0, opts);
}

H2Field solve_h2(const PotentialProfile& profile, const HalfBoundState& h, std::span<const double> s_grid,
                 std::span<const double> kappa, const ResonanceOptions& opts)
{
    if (!h.resonant) throw ContractError("solve_h2: the profile is not resonant");
    if (s_grid.size() != kappa.size()) throw ContractError("solve_h2: s grid and curvature sizes differ");
    H2Field field;
    field.s.assign(s_grid.begin(), s_grid.end());
    const std::vector<double> ngrid = unit_interval_grid(opts.samples);
    std::vector<OdeState<4>> states(ngrid.size());
    for (std::size_t i = 0; i < s_grid.size(); ++i) {
        const double s = s_grid[i];
        const double k = kappa[i];
        // (h, h', h2, h2') integrated together so h is exact at every stage.
        auto rhs = [&](double n, const OdeState<4>& y) -> OdeState<4> {
            const double v = profile.V(n);
            return {y[1], v * y[0], y[3], v * y[2] - k * y[1] - profile.U(s, n) * y[0]};
        };
        integrate_on_grid<4>(rhs, {1.0, 0.0, 0.0, 0.0}, ngrid, states, opts.ode);
        GridFunction g;
        g.n = ngrid;
        g.value.resize(ngrid.size());
        g.derivative.resize(ngrid.size());
        for (std::size_t q = 0; q < ngrid.size(); ++q) {
            g.value[q] = states[q][2];
            g.derivative[q] = states[q][3];
        }
        field.rows.push_back(std::move(g));
    }
    return field;
}

double first_moment(const PotentialProfile& profile)
{
    return -integrate([&](double n) { return n * profile.V(n); }, -1.0, 1.0, 64, 8);
}

namespace {

double interp_periodic(const std::vector<double>& s, const std::vector<double>& f, double length, double x)
{
    if (f.size() == 1) return f[0];
    // Uniform periodic grid: periodic cubic Hermite with spectral slopes would
    // over-fit noisy data, so use Catmull-Rom style cubic through 4 points.
    const std::size_t n = f.size();
    const double step = length / static_cast<double>(n);
    const double u = wrap_periodic(x - s.front(), length) / step;
    const auto i = static_cast<std::size_t>(u) % n;
    const double t = u - std::floor(u);
    const double p0 = f[(i + n - 1) % n], p1 = f[i], p2 = f[(i + 1) % n], p3 = f[(i + 2) % n];
    return p1 + 0.5 * t * (p2 - p0 + t * (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3 + t * (3.0 * (p1 - p2) + p3 - p0)));
}

}  // namespace

double TransmissionData::upsilon_at(double x) const
{
    if (!resonant) throw ContractError("upsilon requested for a non-resonant profile");
    return interp_periodic(s, upsilon, length, x);
}

double TransmissionData::mu_at(double x) const
{
    if (!resonant) throw ContractError("mu requested for a non-resonant profile");
    return interp_periodic(s, mu, length, x);
}

double TransmissionData::mu0_at(double x) const { return interp_periodic(s, mu0, length, x); }

TransmissionData TransmissionData::constant(double theta, double upsilon, double length, std::size_t grid)
{
    TransmissionData t;
    t.resonant = true;
    t.theta = theta;
    t.length = length;
    for (std::size_t i = 0; i < grid; ++i) t.s.push_back(length * static_cast<double>(i) / static_cast<double>(grid));
    t.kappa.assign(grid, 0.0);
    t.mu0.assign(grid, upsilon);
    t.mu.assign(grid, upsilon);
    t.upsilon.assign(grid, upsilon);
    return t;
}

TransmissionData TransmissionData::delta_interaction(double strength, double length, std::size_t grid)
{
    return constant(1.0, strength, length, grid);
}

TransmissionData compute_transmission(const PotentialProfile& profile, const HalfBoundState& h,
                                      std::span<const double> s_grid, std::span<const double> kappa, double length,
                                      const ResonanceOptions& opts)
{
    if (s_grid.size() != kappa.size() || s_grid.empty())
        throw ContractError("compute_transmission: s grid and curvature sizes differ");
    TransmissionData t;
    t.resonant = h.resonant;
    t.theta = h.theta;
    t.length = length;
    t.s.assign(s_grid.begin(), s_grid.end());
    t.kappa.assign(kappa.begin(), kappa.end());
    t.mu1 = first_moment(profile);

    const bool per_s = profile.u_depends_on_s();
    t.mu0.resize(s_grid.size());
    for (std::size_t i = 0; i < s_grid.size(); ++i) {
        if (!per_s && i > 0) {
            t.mu0[i] = t.mu0[0];
            continue;
        }
        const double s = s_grid[i];
        t.mu0[i] = profile.u_is_zero() ? 0.0 : integrate([&](double n) { return profile.U(s, n); }, -1.0, 1.0, 64, 8);
    }
    if (!h.resonant) return t;

    t.mu.resize(s_grid.size());
    for (std::size_t i = 0; i < s_grid.size(); ++i) {
        if (profile.u_is_zero()) {
            t.mu[i] = 0.0;
            continue;
        }
        if (!per_s && i > 0) {
            t.mu[i] = t.mu[0];
            continue;
        }
        const double s = s_grid[i];
        // mu accumulates int U h^2 alongside the half-bound state itself.
        auto rhs = [&](double n, const OdeState<3>& y) -> OdeState<3> {
            return {y[1], profile.V(n) * y[0], profile.U(s, n) * y[0] * y[0]};
        };
        t.mu[i] = dopri5<3>(rhs, {1.0, 0.0, 0.0}, -1.0, 1.0, opts.ode)[2];
    }
    t.upsilon.resize(s_grid.size());
    for (std::size_t i = 0; i < s_grid.size(); ++i)
        t.upsilon[i] = 0.5 * (t.theta * t.theta - 1.0) * t.kappa[i] + t.mu[i];
    return t;
}

}  // namespace curvres
