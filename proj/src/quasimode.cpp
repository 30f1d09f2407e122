#include "curvres/quasimode.hpp"

#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>

#include "curvres/eigensolve.hpp"
#include "curvres/error.hpp"
#include "curvres/numerics.hpp"
#include "curvres/resonance.hpp"

namespace curvres {

// ---------------------------------------------------------------- fields

RadialLimitField::RadialLimitField(std::shared_ptr<const CurveFrame> frame, RadialFunction f, int m, Point centre)
    : frame_(std::move(frame)), f_(std::move(f)), m_(m), c_(centre)
{
}

double RadialLimitField::angular(const Point& x) const
{
    return std::cos(m_ * std::atan2(x[1] - c_[1], x[0] - c_[0]));
}

double RadialLimitField::at_node(const InterfaceMesh& mesh, std::size_t node) const
{
    const Point& x = mesh.nodes[node];
    const double rho = std::hypot(x[0] - c_[0], x[1] - c_[1]);
    const bool on_curve = mesh.in_tube[node] && mesh.tubular[node][1] == 0.0;
    const double f = on_curve ? f_.value(f_.radius, mesh.node_side[node]) : f_.value(rho);
    return f * angular(x);
}

double RadialLimitField::value(double s, double r) const
{
    if (r == 0.0) throw ContractError("RadialLimitField::value needs r != 0");
    const Point x = frame_->tubular_to_cartesian(s, r);
    return f_.value(std::hypot(x[0] - c_[0], x[1] - c_[1])) * angular(x);
}

double RadialLimitField::dr(double s, double r) const
{
    if (r == 0.0) throw ContractError("RadialLimitField::dr needs r != 0");
    const Point x = frame_->tubular_to_cartesian(s, r);
    const Point nu = frame_->normal(s);
    const double dx = x[0] - c_[0], dy = x[1] - c_[1];
    const double rho = std::hypot(dx, dy), phi = std::atan2(dy, dx);
    const double fr = f_.derivative(rho), f = f_.value(rho);
    // grad = f' cos(m phi) e_rho - (m f / rho) sin(m phi) e_phi
    const double gr = fr * std::cos(m_ * phi), gp = -m_ * f / rho * std::sin(m_ * phi);
    const double gx = gr * dx / rho - gp * dy / rho, gy = gr * dy / rho + gp * dx / rho;
    return gx * nu[0] + gy * nu[1];
}

LimitTraces RadialLimitField::traces(double s) const
{
    const Point x = frame_->position(s);
    const double a = angular(x);
    const double R = f_.radius;
    LimitTraces t;
    t.um = f_.value(R, -1) * a;
    t.up = f_.value(R, +1) * a;
    // On the circle nu is radial and |d phi / ds| = 1 / R.
    t.drm = f_.derivative(R, -1) * a;
    t.drp = f_.derivative(R, +1) * a;
    t.ss_m = -static_cast<double>(m_ * m_) / (R * R) * t.um;
    return t;
}

FemLimitField::FemLimitField(const InterfaceMesh& mesh, Eigen::VectorXd node_values)
    : values_(std::move(node_values)), length_(mesh.frame->length())
{
    if (values_.size() != static_cast<Eigen::Index>(mesh.size()))
        throw ContractError("FemLimitField: one value per mesh node expected");
    const std::size_t nc = mesh.curve_minus.size();
    minus_.resize(nc);
    plus_.resize(nc);
    const double hs = length_ / static_cast<double>(nc);
    for (std::size_t i = 0; i < mesh.size(); ++i) {
        if (!mesh.in_tube[i]) continue;
        const double s = mesh.tubular[i][0], r = mesh.tubular[i][1];
        const std::size_t j = static_cast<std::size_t>(std::lround(s / hs)) % nc;
        const int side = r == 0.0 ? mesh.node_side[i] : (r < 0.0 ? -1 : 1);
        Column& c = side < 0 ? minus_[j] : plus_[j];
        c.r.push_back(r);
        c.u.push_back(values_[static_cast<Eigen::Index>(i)]);
    }
    for (auto* cols : {&minus_, &plus_})
        for (Column& c : *cols) {
            std::vector<std::size_t> order(c.r.size());
            for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
            std::sort(order.begin(), order.end(), [&](auto a, auto b) { return c.r[a] < c.r[b]; });
            Column sorted;
            for (auto k : order) sorted.r.push_back(c.r[k]), sorted.u.push_back(c.u[k]);
            if (sorted.r.size() < 4) throw GeometryError("FemLimitField: tubular column too short");
            c = std::move(sorted);
        }
    std::vector<double> trace(nc);
    for (std::size_t j = 0; j < nc; ++j) trace[j] = column_eval(minus_[j], 0.0, false);
    ss_minus_ = spectral_derivative(trace, length_, 2);
}

double FemLimitField::at_node(const InterfaceMesh&, std::size_t node) const
{
    return values_[static_cast<Eigen::Index>(node)];
}

// Cubic Lagrange fit through the four column samples nearest to r.
double FemLimitField::column_eval(const Column& c, double r, bool derivative) const
{
    const std::size_t n = c.r.size();
    std::size_t k = static_cast<std::size_t>(std::lower_bound(c.r.begin(), c.r.end(), r) - c.r.begin());
    std::size_t lo = k >= 2 ? k - 2 : 0;
    lo = std::min(lo, n - 4);
    double val = 0.0, der = 0.0;
    for (std::size_t a = lo; a < lo + 4; ++a) {
        double l = 1.0, dl = 0.0;
        for (std::size_t b = lo; b < lo + 4; ++b) {
            if (b == a) continue;
            const double w = 1.0 / (c.r[a] - c.r[b]);
            dl = dl * (r - c.r[b]) * w + l * w;
            l *= (r - c.r[b]) * w;
        }
        val += l * c.u[a];
        der += dl * c.u[a];
    }
    return derivative ? der : val;
}

double FemLimitField::interp_columns(double s, double r, bool derivative) const
{
    const std::vector<Column>& cols = r < 0.0 ? minus_ : plus_;
    const std::size_t nc = cols.size();
    const double x = wrap_periodic(s, length_) / length_ * static_cast<double>(nc);
    const std::size_t j = static_cast<std::size_t>(std::floor(x)) % nc;
    const double t = x - std::floor(x);
    const double a = column_eval(cols[j], r, derivative);
    if (t < 1e-12) return a;
    return (1.0 - t) * a + t * column_eval(cols[(j + 1) % nc], r, derivative);
}

double FemLimitField::value(double s, double r) const { return interp_columns(s, r, false); }
double FemLimitField::dr(double s, double r) const { return interp_columns(s, r, true); }

LimitTraces FemLimitField::traces(double s) const
{
    const std::size_t nc = minus_.size();
    const double x = wrap_periodic(s, length_) / length_ * static_cast<double>(nc);
    const std::size_t j = static_cast<std::size_t>(std::lround(x)) % nc;
    LimitTraces t;
    t.um = column_eval(minus_[j], 0.0, false);
    t.up = column_eval(plus_[j], 0.0, false);
    t.drm = column_eval(minus_[j], 0.0, true);
    t.drp = column_eval(plus_[j], 0.0, true);
    t.ss_m = ss_minus_[j];
    return t;
}

// ---------------------------------------------------------------- layer

double cutoff_zeta(double r, double beta)
{
    if (r < 0.0 || r >= beta) return 0.0;
    if (r <= 0.5 * beta) return 1.0;
    const double t = (r - 0.5 * beta) / (0.5 * beta);
    return 1.0 - t * t * t * (10.0 - 15.0 * t + 6.0 * t * t);
}

namespace {

// y solving -y'' + V y = g with y(-1) = y'(-1) = 0 by variation of
// parameters with h (Neumann data) and h1 (Dirichlet data), Wronskian 1:
// y = h int g h1 - h1 int g h.
GridFunction cauchy_solve(const std::vector<double>& g, const GridFunction& h, const GridFunction& h1)
{
    const std::size_t n = g.size();
    const double dn = h.step();
    GridFunction y;
    y.n = h.n;
    y.value.assign(n, 0.0);
    y.derivative.assign(n, 0.0);
    double a = 0.0, b = 0.0;  // int g h1, int g h
    for (std::size_t k = 1; k < n; ++k) {
        a += 0.5 * dn * (g[k - 1] * h1.value[k - 1] + g[k] * h1.value[k]);
        b += 0.5 * dn * (g[k - 1] * h.value[k - 1] + g[k] * h.value[k]);
        y.value[k] = h.value[k] * a - h1.value[k] * b;
        y.derivative[k] = h.derivative[k] * a - h1.derivative[k] * b;
    }
    return y;
}

GridFunction combine(double a, const GridFunction& x, double b, const GridFunction& y)
{
    GridFunction z;
    z.n = x.n;
    z.value.resize(x.n.size());
    z.derivative.resize(x.n.size());
    for (std::size_t k = 0; k < x.n.size(); ++k) {
        z.value[k] = a * x.value[k] + b * y.value[k];
        z.derivative[k] = a * x.derivative[k] + b * y.derivative[k];
    }
    return z;
}

}  // namespace

double Quasimode::max_jump() const
{
    double m = 0.0;
    for (std::size_t j = 0; j < s.size(); ++j) m = std::max({m, std::abs(jump_minus[j]), std::abs(jump_plus[j])});
    return m;
}

double Quasimode::max_slope_jump() const
{
    double m = 0.0;
    for (std::size_t j = 0; j < s.size(); ++j)
        m = std::max({m, std::abs(slope_jump_minus[j]), std::abs(slope_jump_plus[j])});
    return m;
}

Quasimode build_quasimode(const LimitField& u, double lambda, const InterfaceMesh& mesh,
                          const PotentialProfile& profile, const PlaneFunction& W, const QuasimodeOptions& opts)
{
    const CurveFrame& frame = *mesh.frame;
    const double eps = mesh.epsilon;
    if (!(eps > 0.0)) throw ConfigError("quasimodes need a mesh with an epsilon-layer");
    const double beta = opts.beta_fraction * frame.eps_star();
    if (!(beta > 0.0) || 2.0 * beta >= frame.eps_star()) throw ConfigError("cutoff radius must satisfy 2 beta < eps*");

    ResonanceOptions ro;
    ro.samples = opts.n_samples;
    const HalfBoundState hb = detect_resonance(profile, ro.tol, ro);
    const GridFunction& h = hb.h;
    const GridFunction h1 = solve_h1(profile, ro);
    const std::vector<double>& ngrid = h.n;
    const std::size_t N = ngrid.size();
    std::vector<double> Vn(N);
    for (std::size_t k = 0; k < N; ++k) Vn[k] = profile.V(ngrid[k]);

    const std::size_t nc = mesh.curve_minus.size();
    const double length = frame.length();
    const double hs = length / static_cast<double>(nc);

    Quasimode q;
    q.lambda = lambda;
    q.epsilon = eps;
    q.beta = beta;
    q.resonant = hb.resonant;
    q.s.resize(nc);
    q.jump_minus.resize(nc);
    q.jump_plus.resize(nc);
    q.slope_jump_minus.resize(nc);
    q.slope_jump_plus.resize(nc);

    // Transmission residual scale.
    double scale = 0.0;
    std::vector<LimitTraces> tr(nc);
    for (std::size_t j = 0; j < nc; ++j) {
        q.s[j] = hs * static_cast<double>(j);
        tr[j] = u.traces(q.s[j]);
        scale = std::max({scale, std::abs(tr[j].um), std::abs(tr[j].up), std::abs(tr[j].drm), std::abs(tr[j].drp)});
    }
    if (scale == 0.0) throw ContractError("limit eigenfunction vanishes near the curve");

    TransmissionData trans;
    if (hb.resonant) {
        std::vector<double> kap(nc);
        for (std::size_t j = 0; j < nc; ++j) kap[j] = frame.curvature(q.s[j]);
        trans = compute_transmission(profile, hb, q.s, kap, length, ro);
        for (std::size_t j = 0; j < nc; ++j) {
            const double res = hb.theta * tr[j].drp - tr[j].drm - trans.upsilon[j] * tr[j].um;
            const double jump = tr[j].up - hb.theta * tr[j].um;
            q.solvability_residual = std::max({q.solvability_residual, std::abs(res), std::abs(jump)});
        }
    } else {
        for (std::size_t j = 0; j < nc; ++j)
            q.solvability_residual = std::max({q.solvability_residual, std::abs(tr[j].um), std::abs(tr[j].up)});
    }
    q.solvability_residual /= scale;
    if (q.solvability_residual > opts.solvability_tol)
        throw SolvabilityError("limit eigenpair violates the transmission conditions (relative residual " +
                               std::to_string(q.solvability_residual) + ")");

    // Layer nodes by column.
    std::vector<std::vector<std::size_t>> layer_nodes(nc);
    for (std::size_t i = 0; i < mesh.size(); ++i)
        if (mesh.in_tube[i] && std::abs(mesh.tubular[i][1]) <= eps * (1.0 + 1e-12)) {
            const std::size_t j = static_cast<std::size_t>(std::lround(mesh.tubular[i][0] / hs)) % nc;
            layer_nodes[j].push_back(i);
        }

    q.node_values = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(mesh.size()));
    std::vector<double> g(N);
    for (std::size_t j = 0; j < nc; ++j) {
        const double s = q.s[j];
        const double kappa = frame.curvature(s);
        const LimitTraces& t = tr[j];
        std::vector<double> Us(N);
        for (std::size_t k = 0; k < N; ++k) Us[k] = profile.U(s, ngrid[k]);

        GridFunction v0, v1;
        v0.n = ngrid;
        v0.value.assign(N, 0.0);
        v0.derivative.assign(N, 0.0);
        if (hb.resonant) {
            v0 = combine(t.um, h, 0.0, h);
            // h2: -h2'' + V h2 = kappa h' + U h; v1 = d_r u- h1 - u- h2, so v1(-1) = 0.
            for (std::size_t k = 0; k < N; ++k) g[k] = kappa * h.derivative[k] + Us[k] * h.value[k];
            const GridFunction h2 = cauchy_solve(g, h, h1);
            v1 = combine(t.drm, h1, -t.um, h2);
        } else {
            // Homogeneous equation with Neumann data d_r u-+ at n = -+1.
            const double a = (t.drp - t.drm * h1.derivative.back()) / hb.defect;
            v1 = combine(a, h, t.drm, h1);
        }
        // -v2'' + V v2 = -(kappa d_n + U) v1 + (d_s^2 - n kappa^2 d_n - W(s, 0) + lambda) v0
        const Point x0 = frame.position(s);
        const double w0 = W(x0[0], x0[1]);
        for (std::size_t k = 0; k < N; ++k) {
            g[k] = -(kappa * v1.derivative[k] + Us[k] * v1.value[k]);
            if (hb.resonant)
                g[k] += t.ss_m * h.value[k] - ngrid[k] * kappa * kappa * v0.derivative[k] + (lambda - w0) * v0.value[k];
        }
        const GridFunction v2 = cauchy_solve(g, h, h1);
        q.v1_at_minus_one = std::max(q.v1_at_minus_one, hb.resonant ? std::abs(v1.value.front()) : 0.0);
        q.v2_cauchy = std::max(q.v2_cauchy, std::abs(v2.value.front()) + std::abs(v2.derivative.front()));

        const GridFunction layer = combine(1.0, v0, 1.0, combine(eps, v1, eps * eps, v2));
        for (std::size_t i : layer_nodes[j])
            q.node_values[static_cast<Eigen::Index>(i)] = layer(std::clamp(mesh.tubular[i][1] / eps, -1.0, 1.0));

        // Jumps in the direction of increasing r.
        q.jump_minus[j] = layer.value.front() - u.value(s, -eps);
        q.jump_plus[j] = u.value(s, eps) - layer.value.back();
        q.slope_jump_minus[j] = layer.derivative.front() / eps - u.dr(s, -eps);
        q.slope_jump_plus[j] = u.dr(s, eps) - layer.derivative.back() / eps;
    }

    // Outside the layer: u - eta, with eta carrying the jumps of v^ and d_r v^
    // across r = +-eps (the inner term enters with the sign that reproduces
    // the jump in the direction of increasing r).
    auto periodic_linear = [&](const std::vector<double>& y, double s) {
        const double x = wrap_periodic(s, length) / hs;
        const std::size_t j = static_cast<std::size_t>(std::floor(x)) % nc;
        const double t = x - std::floor(x);
        return (1.0 - t) * y[j] + t * y[(j + 1) % nc];
    };
    auto eta = [&](double s, double r) {
        if (r > eps) {
            const double z = cutoff_zeta(r - eps, beta);
            if (z == 0.0) return 0.0;
            return (periodic_linear(q.jump_plus, s) + periodic_linear(q.slope_jump_plus, s) * (r - eps)) * z;
        }
        if (r < -eps) {
            const double z = cutoff_zeta(-r - eps, beta);
            if (z == 0.0) return 0.0;
            return -(periodic_linear(q.jump_minus, s) + periodic_linear(q.slope_jump_minus, s) * (r + eps)) * z;
        }
        return 0.0;
    };
    for (std::size_t i = 0; i < mesh.size(); ++i) {
        if (mesh.in_tube[i] && std::abs(mesh.tubular[i][1]) <= eps * (1.0 + 1e-12)) continue;
        double value = u.at_node(mesh, i);
        if (mesh.in_tube[i]) {
            value -= eta(mesh.tubular[i][0], mesh.tubular[i][1]);
        } else if (!mesh.on_box[i]) {
            const auto sr = frame.cartesian_to_tubular(mesh.nodes[i], std::min(eps + beta, 0.999 * frame.eps_star()));
            if (sr) value -= eta((*sr)[0], (*sr)[1]);
        }
        q.node_values[static_cast<Eigen::Index>(i)] = value;
    }
    return q;
}

double quasimode_residual(const Quasimode& q, const OperatorMatrices& heps)
{
    if (q.node_values.size() != static_cast<Eigen::Index>(heps.node_dof.size()))
        throw ContractError("quasimode and operator live on different meshes");
    const Eigen::VectorXd x = heps.restrict(q.node_values);
    const Eigen::VectorXd r = heps.K * x - q.lambda * (heps.M * x);
    Eigen::SimplicialLLT<SparseMatrix> llt(heps.M);
    if (llt.info() != Eigen::Success) throw NumericalError("mass matrix is not positive definite");
    const double num = std::sqrt(std::max(0.0, r.dot(llt.solve(r))));
    const double den = std::sqrt(x.dot(heps.M * x));
    if (!(den > 0.0)) throw ContractError("quasimode vanishes");
    return num / den;
}

BracketCheck check_quasimode_bracket(const Quasimode& q, const OperatorMatrices& heps, double delta)
{
    BracketCheck b;
    b.delta = delta;
    const double pad = 1e-9 * std::max(1.0, std::abs(q.lambda));
    const auto lo = eigen_count_below(heps.K, heps.M, q.lambda - delta - pad);
    const auto hi = eigen_count_below(heps.K, heps.M, q.lambda + delta + pad);
    const auto r = solve_lowest(heps.K, heps.M, 2, q.lambda - delta - pad);
    b.nearest = r.eigenvalues.front();
    for (double v : r.eigenvalues)
        if (std::abs(v - q.lambda) < std::abs(b.nearest - q.lambda)) b.nearest = v;
    b.distance = std::abs(b.nearest - q.lambda);
    b.holds = (lo && hi) ? *hi > *lo : b.distance <= delta;
    return b;
}

}  // namespace curvres
