#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <functional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "curvres/mesh.hpp"
#include "curvres/profile.hpp"
#include "curvres/resonance.hpp"

namespace curvres {

using SparseMatrix = Eigen::SparseMatrix<double>;
using PlaneFunction = std::function<double(double, double)>;

/// A discrete symmetric pencil (K, M) on a set of degrees of freedom, with
/// the map back to mesh nodes: node i carries coef[i] * x[dof[i]], or zero
/// when dof[i] < 0 (Dirichlet node or node outside the subdomain).
struct OperatorMatrices {
    SparseMatrix K, M;
    std::vector<int> node_dof;
    std::vector<double> node_coef;
    std::string tag;

    Eigen::Index dofs() const { return K.rows(); }
    Eigen::VectorXd expand(const Eigen::VectorXd& x) const;
    /// Least-squares restriction of node values to dofs (inverse of expand
    /// on its range).
    Eigen::VectorXd restrict(const Eigen::VectorXd& node_values) const;
};

/// Which Frenet frame defines the minus side: the outward one (nu out of the
/// bounded component) or its flip.
enum class Orientation { outward, flipped };

/// -Delta + W + eps^-2 V(r/eps) + eps^-1 U(s, r/eps), P1 elements,
/// homogeneous Dirichlet data on the box.
OperatorMatrices assemble_heps(const InterfaceMesh& mesh, const PlaneFunction& W, const PotentialProfile& profile);

/// Limit operator with u+ = theta u- and the boundary form int Upsilon u- psi-.
/// `trans` must be parametrized by the arc length of the chosen orientation.
OperatorMatrices assemble_limit(const InterfaceMesh& mesh, const PlaneFunction& W, const TransmissionData& trans,
                                Orientation orientation = Orientation::outward);

/// -Delta + W on the inner and outer subdomains with Dirichlet data on the
/// curve (and the box).
std::pair<OperatorMatrices, OperatorMatrices> assemble_dirichlet_split(const InterfaceMesh& mesh,
                                                                       const PlaneFunction& W);

/// P1 mass matrix over all mesh nodes (curve pairs kept separate).
SparseMatrix node_mass_matrix(const InterfaceMesh& mesh);

/// Coordinate-format text export: "row col value" per stored entry.
void write_triplets(std::ostream& out, const SparseMatrix& A);

/// max |A - A^T| / max |A|.
double asymmetry(const SparseMatrix& A);

}  // namespace curvres
