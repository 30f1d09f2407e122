#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "curvres/curve.hpp"
#include "curvres/mesh.hpp"
#include "curvres/operators.hpp"
#include "curvres/profile.hpp"
#include "curvres/radial.hpp"

namespace curvres {

struct ConvergenceOptions {
    std::vector<double> eps_list{0.2, 0.1, 0.05, 0.025};
    std::size_t track = 3;        // lowest limit eigenvalues followed
    std::size_t extra = 10;       // additional H_eps pairs solved for matching
    MeshOptions mesh;             // epsilon is overwritten per run
    bool richardson = true;       // levels mesh.level and mesh.level + 1
    double min_overlap = 0.5;     // below this a pair counts as lost
};

struct ConvergenceRow {
    double eps = 0.0;
    int index = 0;                // limit eigenvalue index
    double lambda_eps = 0.0;
    double lambda_limit = 0.0;
    double gap = 0.0;             // lambda_eps - lambda_limit
    double overlap = 0.0;         // NaN for the radial path
    bool tracked = true;
};

struct RateFit {
    int index = 0;
    double lambda_limit = 0.0;    // at the smallest eps
    double c = 0.0, p = 0.0;      // |gap| ~ c eps^p
    std::size_t points = 0;
};

struct ConvergenceReport {
    std::string path;             // "fem" or "radial"
    std::string limit;            // "transmission" or "dirichlet-split"
    bool resonant = false;
    std::vector<ConvergenceRow> rows;
    std::vector<RateFit> fits;
    std::vector<std::string> warnings;

    /// eps,lambda_eps,lambda_limit,gap,overlap (plus index, tracked)
    void write_csv(std::ostream& out) const;
    /// JSON object with (c, p) per tracked eigenvalue.
    std::string summary_json() const;
    /// Smallest fitted exponent (NaN without fits).
    double min_order() const;
};

/// H_eps against its limit on the FEM path: for each eps the limit operator
/// (transmission if the profile is resonant, Dirichlet split otherwise) and
/// H_eps are solved on the same mesh; pairs are matched by M-overlap and, with
/// Richardson on, both sides are extrapolated from two refinement levels
/// before the gap is taken.
ConvergenceReport run_convergence(const CurveFrame& frame, const PlaneFunction& W, const PotentialProfile& profile,
                                  const ConvergenceOptions& opts);

/// The same study with the radial shooting oracle (circle, radial W, U
/// independent of s): levels are followed per angular mode, skipping the
/// H_eps levels that sink below the limit spectrum.
ConvergenceReport run_radial_convergence(const RadialBenchmark& bench, const PotentialProfile& profile,
                                         const ConvergenceOptions& opts);

/// Fits log|gap| = log c + p log eps over the tracked rows of each index.
std::vector<RateFit> fit_rates(const std::vector<ConvergenceRow>& rows);

}  // namespace curvres
