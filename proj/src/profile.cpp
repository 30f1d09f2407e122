#include "curvres/profile.hpp"

#include <algorithm>
#include <cmath>

#include "curvres/error.hpp"
#include "curvres/expr.hpp"
#include "curvres/numerics.hpp"

namespace curvres {

PotentialProfile::PotentialProfile()
    : v_([](double) { return 0.0; }), u_([](double, double) { return 0.0; }), label_("zero")
{
}

PotentialProfile PotentialProfile::from_expressions(std::string_view v_expr, std::string_view u_expr)
{
    auto v = std::make_shared<Expression>(Expression::parse(v_expr, {"n"}));
    auto u = std::make_shared<Expression>(Expression::parse(u_expr, {"s", "n"}));
    PotentialProfile p;
    p.v_ = [v](double n) { return (*v)({n}); };
    p.u_ = [u](double s, double n) { return (*u)({s, n}); };
    p.u_zero_ = u->is_constant() && (*u)({0.0, 0.0}) == 0.0;
    p.u_depends_on_s_ = u->depends_on("s");
    p.label_ = "V=" + std::string(v_expr) + "; U=" + std::string(u_expr);
    return p;
}

PotentialProfile PotentialProfile::from_functions(VFunction v, UFunction u, bool u_depends_on_s, std::string label)
{
    PotentialProfile p;
    p.v_ = std::move(v);
    p.u_zero_ = !u;
    if (u) p.u_ = std::move(u);
    p.u_depends_on_s_ = u_depends_on_s && !p.u_zero_;
    p.label_ = std::move(label);
    return p;
}

PotentialProfile PotentialProfile::from_samples(std::vector<double> v_samples,
                                                std::vector<std::vector<double>> u_table, double u_period)
{
    if (v_samples.size() < 2) throw InputError("profile table: V needs at least two samples");
    for (double x : v_samples)
        if (!std::isfinite(x)) throw InputError("profile table: non-finite V sample");
    const double step = 2.0 / static_cast<double>(v_samples.size() - 1);
    auto vs = std::make_shared<UniformSpline>(std::move(v_samples), -1.0, step);
    PotentialProfile p;
    p.v_ = [vs](double n) { return (*vs)(n); };
    p.label_ = "table";
    if (u_table.empty()) return p;

    const std::size_t ns = u_table.size();
    const std::size_t nn = u_table.front().size();
    if (nn < 2) throw InputError("profile table: U rows need at least two samples");
    for (const auto& row : u_table) {
        if (row.size() != nn) throw InputError("profile table: ragged U table");
        for (double x : row)
            if (!std::isfinite(x)) throw InputError("profile table: non-finite U sample");
    }
    auto rows = std::make_shared<std::vector<UniformSpline>>();
    for (auto& row : u_table) rows->emplace_back(row, -1.0, 2.0 / static_cast<double>(nn - 1));
    p.u_zero_ = false;
    p.u_depends_on_s_ = ns > 1;
    p.u_ = [rows, ns, u_period](double s, double n) {
        if (ns == 1) return (*rows)[0](n);
        // Periodic linear blend between the two neighbouring s rows.
        const double x = wrap_periodic(s, u_period) / u_period * static_cast<double>(ns);
        const auto i = static_cast<std::size_t>(x) % ns;
        const double t = x - std::floor(x);
        return (1.0 - t) * (*rows)[i](n) + t * (*rows)[(i + 1) % ns](n);
    };
    return p;
}

PotentialProfile PotentialProfile::scaled(double alpha) const
{
    PotentialProfile p = *this;
    auto v = v_;
    p.v_ = [v, alpha](double n) { return alpha * v(n); };
    return p;
}

PotentialProfile PotentialProfile::reflected(double length) const
{
    PotentialProfile p = *this;
    auto v = v_;
    auto u = u_;
    p.v_ = [v](double n) { return v(-n); };
    p.u_ = [u, length](double s, double n) { return u(wrap_periodic(length - s, length), -n); };
    p.label_ = label_ + " (reflected)";
    return p;
}

double PotentialProfile::boundary_magnitude(double u_period, std::size_t s_samples) const
{
    double m = std::max(std::abs(v_(-1.0)), std::abs(v_(1.0)));
    if (!u_zero_) {
        for (std::size_t i = 0; i < s_samples; ++i) {
            const double s = u_period * static_cast<double>(i) / static_cast<double>(s_samples);
            m = std::max({m, std::abs(u_(s, -1.0)), std::abs(u_(s, 1.0))});
        }
    }
    return m;
}

void PotentialProfile::check_finite(std::size_t n_samples, double u_period, std::size_t s_samples) const
{
    for (std::size_t k = 0; k < n_samples; ++k) {
        const double n = -1.0 + 2.0 * static_cast<double>(k) / static_cast<double>(n_samples - 1);
        if (!std::isfinite(v_(n))) throw InputError("potential V is not finite at n = " + std::to_string(n));
        if (u_zero_) continue;
        for (std::size_t i = 0; i < s_samples; ++i) {
            const double s = u_period * static_cast<double>(i) / static_cast<double>(s_samples);
            if (!std::isfinite(u_(s, n)))
                throw InputError("potential U is not finite at (s, n) = (" + std::to_string(s) + ", " +
                                 std::to_string(n) + ")");
        }
    }
}

}  // namespace curvres
