#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "curvres/ode.hpp"
#include "curvres/profile.hpp"

namespace curvres {

struct ResonanceOptions {
    std::size_t samples = 2048;  // uniform n-grid on [-1, 1]
    double tol = 1e-8;           // relative defect threshold
    OdeOptions ode{};
};

/// A function sampled with its derivative on the uniform grid n_k = -1 + 2k/(N-1).
struct GridFunction {
    std::vector<double> n;
    std::vector<double> value;
    std::vector<double> derivative;

    double step() const { return n.size() > 1 ? n[1] - n[0] : 0.0; }
    /// Cubic Hermite interpolation between grid samples.
    double operator()(double x) const;
};

/// Output of the 1D resonance engine.  h solves -h'' + V h = 0 with
/// h(-1) = 1, h'(-1) = 0; the profile is resonant when h'(1) vanishes.
struct HalfBoundState {
    GridFunction h;
    double theta = 0.0;   // h(1); only meaningful when resonant
    double defect = 0.0;  // h'(1)
    double max_abs_h = 0.0;
    bool resonant = false;
};

HalfBoundState detect_resonance(const PotentialProfile& profile, double tol = 1e-8,
                                const ResonanceOptions& opts = {});

/// h'(1) for the profile alpha * V (U ignored).
double resonance_defect(const PotentialProfile& base, double alpha, const ResonanceOptions& opts = {});

struct CouplingScan {
    std::vector<double> roots;  // resonant couplings, ascending
    bool degenerate = false;    // defect vanishes identically (V = 0)
    std::vector<double> alpha;  // scan grid
    std::vector<double> defect; // defect on the scan grid
    std::vector<bool> resonant; // grid points that pass the resonance threshold
};

/// All alpha in [alpha_lo, alpha_hi] for which -d^2/dn^2 + alpha V is resonant:
/// sign changes of the defect on a uniform grid, refined by bracketing.
/// alpha = 0 is always reported when it lies in the range.
CouplingScan scan_coupling(const PotentialProfile& base, double alpha_lo, double alpha_hi, std::size_t grid,
                           const ResonanceOptions& opts = {});

/// h1: -h1'' + V h1 = 0, h1(-1) = 0, h1'(-1) = 1.
GridFunction solve_h1(const PotentialProfile& profile, const ResonanceOptions& opts = {});

/// h2(s, .) for each s of the grid: -h2'' + V h2 = kappa(s) h' + U(s, .) h
/// with zero Cauchy data at n = -1.
struct H2Field {
    std::vector<double> s;
    std::vector<GridFunction> rows;  // one per s
};

H2Field solve_h2(const PotentialProfile& profile, const HalfBoundState& h, std::span<const double> s_grid,
                 std::span<const double> kappa, const ResonanceOptions& opts = {});

/// Coefficients of the limit transmission conditions on the s grid.
struct TransmissionData {
    bool resonant = false;
    double theta = 0.0;
    double length = 0.0;      // period of s
    double mu1 = 0.0;         // -int n V dn
    std::vector<double> s;
    std::vector<double> kappa;
    std::vector<double> mu0;  // int U(s, n) dn
    std::vector<double> mu;   // int U(s, n) h^2 dn (resonant only)
    std::vector<double> upsilon;  // (theta^2 - 1) kappa / 2 + mu (resonant only)

    /// Periodic interpolation in s; ContractError if the data are not resonant.
    double upsilon_at(double s_value) const;
    double mu_at(double s_value) const;
    double mu0_at(double s_value) const;

    /// theta = 1 and constant upsilon: the classical delta interaction.
    static TransmissionData delta_interaction(double strength, double length, std::size_t grid = 64);
    /// Arbitrary theta with a constant upsilon (kappa recorded as zero).
    static TransmissionData constant(double theta, double upsilon, double length, std::size_t grid = 64);
};

/// mu, mu0, mu1 and upsilon.  For a non-resonant `h` only mu0 and mu1 are
/// filled in; asking for mu or upsilon afterwards is a contract error.
TransmissionData compute_transmission(const PotentialProfile& profile, const HalfBoundState& h,
                                      std::span<const double> s_grid, std::span<const double> kappa, double length,
                                      const ResonanceOptions& opts = {});

/// mu1 = -int n V(n) dn.
double first_moment(const PotentialProfile& profile);

/// Uniform grid n_k = -1 + 2k/(N-1).
std::vector<double> unit_interval_grid(std::size_t samples);

}  // namespace curvres
