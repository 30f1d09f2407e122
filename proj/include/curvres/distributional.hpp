#pragma once

#include <functional>
#include <ostream>
#include <vector>

#include "curvres/curve.hpp"
#include "curvres/profile.hpp"

namespace curvres {

/// A smooth test function with its gradient.
struct TestFunction {
    std::function<double(const Point&)> value;
    std::function<Point(const Point&)> gradient;

    /// exp(-|x - c|^2 / w^2).
    static TestFunction gaussian(Point centre, double width);
};

struct DistributionalReport {
    std::vector<double> eps;
    std::vector<double> integral;   // I(eps) = int V_eps phi dx
    std::vector<double> error;      // |I(eps) - I*| (only meaningful when int V = 0)
    std::vector<double> scaled;     // eps I(eps)
    double predicted = 0.0;         // I* = <mu1 d_nu delta + (mu1 kappa + mu0) delta, phi>
    double v_integral = 0.0;        // int V dn
    double gamma_integral = 0.0;    // int_gamma phi
    double scaled_limit = 0.0;      // int V * int_gamma phi
    double mu1 = 0.0;
    bool divergent = false;         // int V != 0: I(eps) ~ eps^-1
    double order = 0.0;             // fitted decay order of `error` (or of |eps I - limit|)

    void write_csv(std::ostream& out) const;
};

/// I(eps) by tubular quadrature (trapezoid in s, Gauss in n) against the
/// distributional limit of V_eps.
DistributionalReport distributional_limit_check(const PotentialProfile& profile, const CurveFrame& frame,
                                                const TestFunction& phi, const std::vector<double>& eps_list,
                                                std::size_t s_points = 1024, std::size_t n_points = 64);

}  // namespace curvres
