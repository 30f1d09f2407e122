#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <memory>
#include <vector>

#include "curvres/curve.hpp"
#include "curvres/mesh.hpp"
#include "curvres/operators.hpp"
#include "curvres/profile.hpp"
#include "curvres/radial.hpp"

namespace curvres {

/// One-sided data of a limit eigenfunction on the curve.
struct LimitTraces {
    double um = 0.0, up = 0.0;    // u-(s), u+(s)
    double drm = 0.0, drp = 0.0;  // d_r u-(s), d_r u+(s)
    double ss_m = 0.0;            // d_s^2 u-(s)
};

/// A limit eigenfunction u (of the transmission operator or the Dirichlet
/// split) seen from the tubular coordinates of the outward frame.
class LimitField {
public:
    virtual ~LimitField() = default;
    /// u at a mesh node; curve nodes report the trace of their side.
    virtual double at_node(const InterfaceMesh& mesh, std::size_t node) const = 0;
    /// u and d_r u at (s, r), r != 0, taken from the side of r.
    virtual double value(double s, double r) const = 0;
    virtual double dr(double s, double r) const = 0;
    virtual LimitTraces traces(double s) const = 0;
};

/// f(rho) cos(m phi) about the centre of a circle (radial benchmark).
class RadialLimitField final : public LimitField {
public:
    RadialLimitField(std::shared_ptr<const CurveFrame> frame, RadialFunction f, int m, Point centre = {0.0, 0.0});
    double at_node(const InterfaceMesh& mesh, std::size_t node) const override;
    double value(double s, double r) const override;
    double dr(double s, double r) const override;
    LimitTraces traces(double s) const override;

private:
    double angular(const Point& x) const;
    std::shared_ptr<const CurveFrame> frame_;
    RadialFunction f_;
    int m_;
    Point c_;
};

/// A P1 limit eigenvector on the tubular columns of its mesh.  Off-curve
/// values and normal derivatives come from one-sided cubic fits along each
/// column; d_s^2 u- from spectral differentiation of the trace.
class FemLimitField final : public LimitField {
public:
    FemLimitField(const InterfaceMesh& mesh, Eigen::VectorXd node_values);
    double at_node(const InterfaceMesh& mesh, std::size_t node) const override;
    double value(double s, double r) const override;
    double dr(double s, double r) const override;
    LimitTraces traces(double s) const override;

private:
    struct Column {
        std::vector<double> r;      // ascending
        std::vector<double> u;
    };
    double column_eval(const Column& c, double r, bool derivative) const;
    double interp_columns(double s, double r, bool derivative) const;
    Eigen::VectorXd values_;
    double length_ = 0.0;
    std::vector<Column> minus_, plus_;  // per s column
    std::vector<double> ss_minus_;
};

struct QuasimodeOptions {
    double beta_fraction = 0.4;     // beta = fraction * eps*
    std::size_t n_samples = 1025;   // n grid for the layer profiles
    double solvability_tol = 1e-6;  // relative transmission residual
};

struct Quasimode {
    double lambda = 0.0;
    double epsilon = 0.0;
    double beta = 0.0;
    bool resonant = false;
    Eigen::VectorXd node_values;        // v_eps at the mesh nodes
    std::vector<double> s;              // column abscissae
    std::vector<double> jump_minus, jump_plus;              // [v^]_{-eps}, [v^]_{eps}
    std::vector<double> slope_jump_minus, slope_jump_plus;  // [d_nu v^]_{-eps}, [d_nu v^]_{eps}
    double solvability_residual = 0.0;  // max |theta d_r u+ - d_r u- - Upsilon u-| / scale
    double v1_at_minus_one = 0.0;       // max |v1(s, -1)|
    double v2_cauchy = 0.0;             // max |v2(s, -1)| + |d_n v2(s, -1)|

    double max_jump() const;
    double max_slope_jump() const;
};

/// Cutoff: 1 on [0, beta/2], 0 outside [0, beta), quintic smoothstep between.
double cutoff_zeta(double r, double beta);

/// Layer expansion v0 + eps v1 + eps^2 v2 matched to u - eta_eps outside the
/// layer; evaluated at the nodes of an H_eps mesh.
Quasimode build_quasimode(const LimitField& u, double lambda, const InterfaceMesh& mesh,
                          const PotentialProfile& profile, const PlaneFunction& W, const QuasimodeOptions& opts = {});

/// |(K - lambda M) v|_{M^-1} / |v|_M for the nodal vector of the quasimode.
double quasimode_residual(const Quasimode& q, const OperatorMatrices& heps);

struct BracketCheck {
    double delta = 0.0;
    double nearest = 0.0;   // H_eps eigenvalue closest to lambda
    double distance = 0.0;
    bool holds = false;     // distance <= delta
};

/// Locates the H_eps eigenvalue nearest to lambda and compares with delta.
BracketCheck check_quasimode_bracket(const Quasimode& q, const OperatorMatrices& heps, double delta);

}  // namespace curvres
