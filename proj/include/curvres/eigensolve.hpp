#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cstddef>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "curvres/error.hpp"

namespace curvres {

struct SpectralResult {
    std::vector<double> eigenvalues;  // ascending
    Eigen::MatrixXd vectors;          // M-orthonormal columns
    std::vector<double> residuals;    // |Kx - lambda Mx| / |Kx|
    std::string tag;
    double sigma = 0.0;               // shift actually used
    bool converged = true;

    std::size_t size() const { return eigenvalues.size(); }
    void write_csv(std::ostream& out) const;
};

struct SolverOptions {
    double tol = 1e-9;                    // residual contract
    std::size_t dense_threshold = 600;    // dense solver at or below this size
    int max_restarts = 500;
    std::size_t ncv = 0;                  // Krylov dimension; 0 = automatic
};

/// Raised when the iteration stops short; carries what did converge.
struct EigenNotConverged : NumericalError {
    EigenNotConverged(const std::string& w, SpectralResult p) : NumericalError(w), partial(std::move(p)) {}
    SpectralResult partial;
};

/// The k eigenvalues of K x = lambda M x nearest above sigma (shift-invert
/// Lanczos; dense solver for small systems).  Without sigma, a shift just
/// below the spectrum is located so the lowest k are returned.
SpectralResult solve_lowest(const Eigen::SparseMatrix<double>& K, const Eigen::SparseMatrix<double>& M,
                            std::size_t k, std::optional<double> sigma = std::nullopt,
                            const SolverOptions& opts = {});

/// Rigorous lower bound of the pencil's spectrum from Gershgorin discs of K
/// and the lumped mass.
double spectrum_lower_bound(const Eigen::SparseMatrix<double>& K, const Eigen::SparseMatrix<double>& M);

/// Number of eigenvalues of the pencil below sigma, from the inertia of
/// K - sigma M; empty when sigma is (numerically) an eigenvalue.
std::optional<std::size_t> eigen_count_below(const Eigen::SparseMatrix<double>& K, const Eigen::SparseMatrix<double>& M,
                                             double sigma);

/// A shift below the lowest eigenvalue, within rel * max(1, |lambda_min|)
/// of it (inertia bisection).
double shift_below_spectrum(const Eigen::SparseMatrix<double>& K, const Eigen::SparseMatrix<double>& M,
                            double rel = 0.02);

struct EigenPairing {
    std::vector<int> match;               // for each pair of `a`, the index in `b` (or -1)
    std::vector<double> overlap;          // cluster-projected |<u_a, u_b>_M|
    std::vector<double> gap;              // |lambda_a - lambda_b|
    struct Cluster {
        std::vector<int> a, b;            // indices of the matched clusters
        std::vector<double> principal_angles;
    };
    std::vector<Cluster> clusters;
};

/// Greedy one-to-one pairing maximizing M-overlaps.  Eigenvalues within
/// cluster_tol * |lambda| of each other are treated as one subspace.
/// `map_b` carries b's vectors into a's space (identity when empty); M is the
/// mass matrix of a's space.
EigenPairing match_eigenpairs(const SpectralResult& a, const SpectralResult& b, const Eigen::SparseMatrix<double>& M,
                              const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& map_b = {},
                              double cluster_tol = 1e-6);

/// Groups of consecutive eigenvalues closer than tol * max(1, |lambda|).
std::vector<std::vector<int>> eigen_clusters(const std::vector<double>& values, double tol);

}  // namespace curvres
