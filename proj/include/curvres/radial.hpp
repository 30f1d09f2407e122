#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "curvres/profile.hpp"

namespace curvres {

/// Radially symmetric benchmark: gamma is the circle of the given radius
/// centred at the origin, W depends on |x| only and U on n only.
struct RadialBenchmark {
    double radius = 1.0;
    std::function<double(double)> W = [](double rho) { return rho * rho; };
    double rho_max = 8.0;  // Dirichlet truncation of the half-line
    double ode_rtol = 1e-11;
};

/// A radial profile f(rho) sampled with its derivative; for the limit
/// operator the trace jumps at the radius.
struct RadialFunction {
    std::vector<double> rho, f, df;
    double radius = 1.0;
    double theta = 1.0;
    /// Value and derivative; `side` selects the one-sided trace at the radius.
    double value(double r, int side = 0) const;
    double derivative(double r, int side = 0) const;
};

/// Sturm-counting shooting oracle for a single angular mode m of
/// -Delta + W + V_eps (or of the limit / Dirichlet problems) in the plane.
/// Eigenvalue j of mode m is the j-th root of the Pruefer-angle count.
class RadialOracle {
public:
    enum class Kind { heps, limit, dirichlet_inner, dirichlet_outer, dirichlet_split };

    static RadialOracle heps(const RadialBenchmark& b, const PotentialProfile& profile, double eps);
    /// u+ = theta u-, theta d_r u+ - d_r u- = upsilon u- at the radius.
    static RadialOracle limit(const RadialBenchmark& b, double theta, double upsilon);
    static RadialOracle dirichlet(const RadialBenchmark& b, Kind which = Kind::dirichlet_split);

    Kind kind() const { return kind_; }

    /// Number of eigenvalues of mode m strictly below lambda.
    int count_below(int m, double lambda) const;
    /// Eigenvalue j (0-based) of mode m.
    double eigenvalue(int m, int j) const;

    struct Level {
        double lambda;
        int m;
        int j;
        int multiplicity;  // 1 for m = 0, 2 otherwise
    };
    /// All levels in [lo, hi) for modes 0..m_max, ascending.
    std::vector<Level> window(double lo, double hi, int m_max) const;
    /// The lowest k planar eigenvalues counted with multiplicity (for
    /// problems bounded below by a modest constant: limit and Dirichlet).
    std::vector<double> lowest(std::size_t k, int m_max = 40) const;

    /// Eigenfunction of a limit or Dirichlet level, normalized so that
    /// f(rho) cos(m phi) has unit L2 norm in the plane.
    RadialFunction eigenfunction(int m, double lambda) const;

    /// Lower bound of the radial potential (start of bisection).
    double floor_value() const { return floor_; }

private:
    double pruefer_end(int m, double lambda, Kind part) const;
    int count_part(int m, double lambda, Kind part) const;

    RadialBenchmark b_;
    Kind kind_ = Kind::limit;
    std::function<double(double)> layer_;  // V_eps(rho)
    double eps_ = 0.0;
    double theta_ = 1.0, upsilon_ = 0.0;
    double floor_ = 0.0;
};

}  // namespace curvres
