#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "curvres/convergence.hpp"
#include "curvres/curve.hpp"
#include "curvres/distributional.hpp"
#include "curvres/eigensolve.hpp"
#include "curvres/mesh.hpp"
#include "curvres/operators.hpp"
#include "curvres/profile.hpp"
#include "curvres/quasimode.hpp"
#include "curvres/radial.hpp"

namespace curvres {

struct CurveConfig {
    std::string type = "circle";  // circle | ellipse | expression | points
    double radius = 1.0;
    double a = 2.0, b = 1.0;
    Point centre{0.0, 0.0};
    std::string x1, x2;           // in t, for type expression
    double period = 0.0;          // 0: 2 pi
    std::vector<Point> points;
    std::size_t samples = 256;    // arc-length grid of the frame
};

struct ProfileConfig {
    std::string V = "0", U = "0";           // expressions in n and (s, n)
    std::vector<double> V_samples;           // alternative: uniform table on [-1, 1]
    std::vector<std::vector<double>> U_samples;
    double U_period = 0.0;                   // 0: curve length
};

/// One experiment.  Every section is optional; unknown keys are errors.
struct ExperimentConfig {
    std::string source = "<config>";
    ProfileConfig profile;
    CurveConfig curve;
    std::string W = "x1^2 + x2^2";           // in x1, x2 and r = |x|
    std::vector<double> eps{0.2, 0.1, 0.05, 0.025};
    MeshOptions mesh;

    std::string op = "heps";                 // solve: heps | limit | dirichlet-split
    std::size_t k = 6;
    std::optional<double> sigma;
    SolverOptions solver;

    ConvergenceOptions convergence;
    std::string convergence_path = "fem";    // fem | radial

    QuasimodeOptions quasimode;
    int quasimode_index = 0;                 // limit eigenpair used
    std::string quasimode_field = "fem";     // fem | radial

    Point dist_centre{0.8, 0.3};
    double dist_width = 0.5;
    std::size_t dist_s_points = 1024, dist_n_points = 64;

    double scan_lo = 0.0, scan_hi = 0.0;     // scan_coupling when scan_hi > scan_lo
    std::size_t scan_grid = 200;

    std::string output = "out";
    std::uint64_t seed = 0;                  // recorded only; nothing is random
    int threads = 1;

    CurveFrame frame() const;
    PotentialProfile potential() const;
    PlaneFunction confining() const;
    /// Radial benchmark for circle curves about the origin with radial W.
    RadialBenchmark radial_benchmark() const;
};

/// Throws ConfigError "source:line:col: message" on malformed input.
ExperimentConfig parse_config(const std::string& text, const std::string& source = "<config>");
ExperimentConfig load_config(const std::string& path);

}  // namespace curvres
