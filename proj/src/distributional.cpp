#include "curvres/distributional.hpp"

#include <cmath>

#include "curvres/error.hpp"
#include "curvres/numerics.hpp"
#include "curvres/resonance.hpp"

namespace curvres {

TestFunction TestFunction::gaussian(Point c, double w)
{
    TestFunction t;
    t.value = [c, w](const Point& x) {
        const double dx = x[0] - c[0], dy = x[1] - c[1];
        return std::exp(-(dx * dx + dy * dy) / (w * w));
    };
    t.gradient = [c, w](const Point& x) {
        const double dx = x[0] - c[0], dy = x[1] - c[1];
        const double g = -2.0 / (w * w) * std::exp(-(dx * dx + dy * dy) / (w * w));
        return Point{g * dx, g * dy};
    };
    return t;
}

void DistributionalReport::write_csv(std::ostream& out) const
{
    out << "eps,integral,predicted,error,eps_integral\n";
    out.precision(17);
    for (std::size_t i = 0; i < eps.size(); ++i)
        out << eps[i] << ',' << integral[i] << ',' << predicted << ',' << error[i] << ',' << scaled[i] << '\n';
}

DistributionalReport distributional_limit_check(const PotentialProfile& profile, const CurveFrame& frame,
                                                const TestFunction& phi, const std::vector<double>& eps_list,
                                                std::size_t s_points, std::size_t n_points)
{
    if (s_points < 16 || n_points < 4) throw ConfigError("distributional check: too few quadrature points");
    for (double e : eps_list)
        if (!(e > 0.0) || e >= frame.eps_star()) throw ConfigError("distributional check: eps must lie in (0, eps*)");
    const QuadratureRule1D& g = gauss_legendre(n_points);
    const double length = frame.length();
    const double ds = length / static_cast<double>(s_points);

    DistributionalReport rep;
    rep.mu1 = first_moment(profile);
    for (std::size_t q = 0; q < g.nodes.size(); ++q) rep.v_integral += g.weights[q] * profile.V(g.nodes[q]);
    rep.divergent = std::abs(rep.v_integral) > 1e-10;

    // Limit functional: int_gamma (-mu1 d_nu phi + (mu1 kappa + mu0) phi) ds.
    double pred = 0.0, gam = 0.0;
    for (std::size_t j = 0; j < s_points; ++j) {
        const double s = ds * static_cast<double>(j);
        const Point x = frame.position(s), nu = frame.normal(s);
        const Point grad = phi.gradient(x);
        const double f = phi.value(x);
        double mu0 = 0.0;
        for (std::size_t q = 0; q < g.nodes.size(); ++q) mu0 += g.weights[q] * profile.U(s, g.nodes[q]);
        pred += -rep.mu1 * (grad[0] * nu[0] + grad[1] * nu[1]) + (rep.mu1 * frame.curvature(s) + mu0) * f;
        gam += f;
    }
    rep.predicted = pred * ds;
    rep.gamma_integral = gam * ds;
    rep.scaled_limit = rep.v_integral * rep.gamma_integral;

    for (double eps : eps_list) {
        // int int (eps^-1 V(n) + U(s, n)) phi(alpha + eps n nu) (1 - eps n kappa) dn ds
        double total = 0.0;
        for (std::size_t j = 0; j < s_points; ++j) {
            const double s = ds * static_cast<double>(j);
            const double kappa = frame.curvature(s);
            double row = 0.0;
            for (std::size_t q = 0; q < g.nodes.size(); ++q) {
                const double n = g.nodes[q];
                const double v = profile.V(n) / eps + profile.U(s, n);
                row += g.weights[q] * v * phi.value(frame.tubular_to_cartesian(s, eps * n)) * (1.0 - eps * n * kappa);
            }
            total += row;
        }
        total *= ds;
        rep.eps.push_back(eps);
        rep.integral.push_back(total);
        rep.error.push_back(std::abs(total - rep.predicted));
        rep.scaled.push_back(eps * total);
    }
    if (rep.eps.size() >= 2) {
        std::vector<double> lx, ly;
        for (std::size_t i = 0; i < rep.eps.size(); ++i) {
            const double e = rep.divergent ? std::abs(rep.scaled[i] - rep.scaled_limit) : rep.error[i];
            if (e > 0.0) {
                lx.push_back(std::log(rep.eps[i]));
                ly.push_back(std::log(e));
            }
        }
        if (lx.size() >= 2) rep.order = least_squares_line(lx, ly).slope;
    }
    return rep;
}

}  // namespace curvres
