#include "curvres/eigensolve.hpp"

#include <arpack/arpack.hpp>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace curvres {

namespace {

using Sparse = Eigen::SparseMatrix<double>;

void finalize(SpectralResult& r, const Sparse& K, const Sparse& M)
{
    // Ascending order, deterministic signs, residual certificates.
    std::vector<std::size_t> order(r.eigenvalues.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto i, auto j) { return r.eigenvalues[i] < r.eigenvalues[j]; });
    std::vector<double> vals(order.size());
    Eigen::MatrixXd vecs(r.vectors.rows(), static_cast<Eigen::Index>(order.size()));
    for (std::size_t c = 0; c < order.size(); ++c) {
        vals[c] = r.eigenvalues[order[c]];
        Eigen::VectorXd x = r.vectors.col(static_cast<Eigen::Index>(order[c]));
        Eigen::Index imax = 0;
        x.cwiseAbs().maxCoeff(&imax);
        if (x[imax] < 0) x = -x;
        x /= std::sqrt(x.dot(M * x));
        vecs.col(static_cast<Eigen::Index>(c)) = x;
    }
    r.eigenvalues = std::move(vals);
    r.vectors = std::move(vecs);
    r.residuals.resize(r.eigenvalues.size());
    for (std::size_t c = 0; c < r.eigenvalues.size(); ++c) {
        const Eigen::VectorXd x = r.vectors.col(static_cast<Eigen::Index>(c));
        const Eigen::VectorXd kx = K * x;
        const Eigen::VectorXd mx = M * x;
        const double den = std::max({kx.norm(), std::abs(r.eigenvalues[c]) * mx.norm(), 1e-300});
        r.residuals[c] = (kx - r.eigenvalues[c] * mx).norm() / den;
    }
}

SpectralResult solve_dense(const Sparse& K, const Sparse& M, std::size_t k, double sigma)
{
    const Eigen::MatrixXd Kd(K), Md(M);
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(Kd, Md);
    if (es.info() != Eigen::Success) throw NumericalError("dense generalized eigensolver failed");
    SpectralResult r;
    r.sigma = sigma;
    std::vector<Eigen::Index> pick;
    for (Eigen::Index i = 0; i < es.eigenvalues().size() && pick.size() < k; ++i)
        if (es.eigenvalues()[i] >= sigma) pick.push_back(i);
    r.vectors.resize(Kd.rows(), static_cast<Eigen::Index>(pick.size()));
    for (std::size_t c = 0; c < pick.size(); ++c) {
        r.eigenvalues.push_back(es.eigenvalues()[pick[c]]);
        r.vectors.col(static_cast<Eigen::Index>(c)) = es.eigenvectors().col(pick[c]);
    }
    finalize(r, K, M);
    return r;
}

}  // namespace

void SpectralResult::write_csv(std::ostream& out) const
{
    out << "index,eigenvalue,residual\n";
    out.precision(17);
    for (std::size_t i = 0; i < eigenvalues.size(); ++i) out << i << ',' << eigenvalues[i] << ',' << residuals[i] << '\n';
}

double spectrum_lower_bound(const Sparse& K, const Sparse& M)
{
    const Eigen::Index n = K.rows();
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(n), off = Eigen::VectorXd::Zero(n), lumped = Eigen::VectorXd::Zero(n),
                    mrow = Eigen::VectorXd::Zero(n);
    for (int c = 0; c < K.outerSize(); ++c)
        for (Sparse::InnerIterator it(K, c); it; ++it) {
            if (it.row() == it.col())
                diag[it.row()] += it.value();
            else
                off[it.row()] += std::abs(it.value());
        }
    for (int c = 0; c < M.outerSize(); ++c)
        for (Sparse::InnerIterator it(M, c); it; ++it) {
            lumped[it.row()] += it.value();
            mrow[it.row()] += std::abs(it.value());
        }
    const double gk = (diag - off).minCoeff();
    double bound;
    if (gk >= 0.0)
        bound = gk / mrow.maxCoeff();
    else
        bound = gk / (0.25 * lumped.minCoeff());  // P1 consistent mass >= lumped / 4
    return bound - 1e-8 * std::abs(bound) - 1e-12;
}

std::optional<std::size_t> eigen_count_below(const Sparse& K, const Sparse& M, double sigma)
{
    // Sylvester: K - sigma M = L D L^T is congruent to D.
    Eigen::SimplicialLDLT<Sparse, Eigen::Lower, Eigen::AMDOrdering<int>> ldlt(K - sigma * M);
    if (ldlt.info() != Eigen::Success) return std::nullopt;
    const Eigen::VectorXd d = ldlt.vectorD();
    if (!d.allFinite() || d.cwiseAbs().minCoeff() <= 1e-14 * d.cwiseAbs().maxCoeff()) return std::nullopt;
    return static_cast<std::size_t>((d.array() < 0.0).count());
}

double shift_below_spectrum(const Sparse& K, const Sparse& M, double rel)
{
    double lo = spectrum_lower_bound(K, M);
    // Any diagonal Rayleigh quotient bounds the lowest eigenvalue from above.
    double hi = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < K.rows(); ++i) hi = std::min(hi, K.coeff(i, i) / M.coeff(i, i));
    hi += 1e-9 * std::max(1.0, std::abs(hi));
    while (hi - lo > rel * std::max(1.0, std::abs(hi))) {
        double mid = 0.5 * (lo + hi);
        auto c = eigen_count_below(K, M, mid);
        for (int t = 1; !c && t < 4; ++t) {
            mid += 1e-7 * t * std::max(1.0, std::abs(mid));
            c = eigen_count_below(K, M, mid);
        }
        if (!c) break;
        (*c == 0 ? lo : hi) = mid;
    }
    return lo;
}

SpectralResult solve_lowest(const Sparse& K, const Sparse& M, std::size_t k, std::optional<double> sigma_in,
                            const SolverOptions& opts)
{
    const Eigen::Index n = K.rows();
    if (K.cols() != n || M.rows() != n || M.cols() != n) throw ContractError("solve_lowest: K and M sizes differ");
    SpectralResult empty;
    if (k == 0 || n == 0) {
        empty.vectors.resize(n, 0);
        return empty;
    }
    if (static_cast<Eigen::Index>(k) > n) throw ContractError("solve_lowest: more eigenpairs requested than dofs");
    const bool dense = static_cast<std::size_t>(n) <= opts.dense_threshold || static_cast<Eigen::Index>(2 * k + 2) >= n;
    if (dense) return solve_dense(K, M, k, sigma_in ? *sigma_in : -std::numeric_limits<double>::infinity());
    double sigma = sigma_in ? *sigma_in : shift_below_spectrum(K, M);

    Eigen::SimplicialLDLT<Sparse, Eigen::Lower, Eigen::AMDOrdering<int>> ldlt;
    bool factored = false;
    for (int attempt = 0; attempt < 4 && !factored; ++attempt) {
        const Sparse A = K - sigma * M;
        ldlt.compute(A);
        if (ldlt.info() == Eigen::Success) {
            const Eigen::VectorXd d = ldlt.vectorD();
            const double dmax = d.cwiseAbs().maxCoeff();
            factored = d.allFinite() && d.cwiseAbs().minCoeff() > 1e-14 * dmax;
        }
        if (!factored) sigma -= 1e-6 * std::max(1.0, std::abs(sigma)) * static_cast<double>(attempt + 1);
    }
    if (!factored) throw NumericalError("shift-invert factorization is singular near sigma = " + std::to_string(sigma));

    const a_int nn = static_cast<a_int>(n);
    const a_int nev = static_cast<a_int>(k);
    a_int ncv = opts.ncv ? static_cast<a_int>(opts.ncv) : std::max<a_int>(2 * nev + 1, nev + 20);
    ncv = std::min<a_int>(ncv, nn);
    const a_int lworkl = ncv * (ncv + 8);
    std::vector<double> resid(static_cast<std::size_t>(n)), v(static_cast<std::size_t>(n) * ncv),
        workd(3 * static_cast<std::size_t>(n)), workl(static_cast<std::size_t>(lworkl));
    std::mt19937_64 rng(20240607);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    for (double& x : resid) x = uni(rng);
    a_int iparam[11] = {0}, ipntr[14] = {0};
    iparam[0] = 1;
    iparam[2] = opts.max_restarts;
    iparam[6] = 3;
    a_int ido = 0, info = 1;
    Eigen::VectorXd tmp(n);
    while (true) {
        arpack::saupd(ido, arpack::bmat::generalized, nn, arpack::which::largest_algebraic, nev, 0.0, resid.data(),
                      ncv, v.data(), nn, iparam, ipntr, workd.data(), workl.data(), lworkl, info);
        if (ido == 99) break;
        Eigen::Map<Eigen::VectorXd> x(workd.data() + ipntr[0] - 1, n);
        Eigen::Map<Eigen::VectorXd> y(workd.data() + ipntr[1] - 1, n);
        if (ido == -1) {
            tmp = M * x;
            y = ldlt.solve(tmp);
        } else if (ido == 1) {
            Eigen::Map<Eigen::VectorXd> bx(workd.data() + ipntr[2] - 1, n);
            y = ldlt.solve(Eigen::VectorXd(bx));
        } else if (ido == 2) {
            y = M * x;
        } else {
            throw NumericalError("unexpected ARPACK request " + std::to_string(ido));
        }
    }
    const bool stalled = info == 1;
    if (info < 0 || info > 1) throw NumericalError("ARPACK dsaupd failed with info = " + std::to_string(info));
    const a_int nconv = iparam[4];

    std::vector<a_int> select(static_cast<std::size_t>(ncv), 1);
    std::vector<double> d(static_cast<std::size_t>(nev)), z(static_cast<std::size_t>(n) * nev);
    a_int info2 = 0;
    if (nconv > 0)
        arpack::seupd(1, arpack::howmny::ritz_vectors, select.data(), d.data(), z.data(), nn, sigma,
                      arpack::bmat::generalized, nn, arpack::which::largest_algebraic, nev, 0.0, resid.data(), ncv,
                      v.data(), nn, iparam, ipntr, workd.data(), workl.data(), lworkl, info2);
    if (info2 != 0) throw NumericalError("ARPACK dseupd failed with info = " + std::to_string(info2));

    SpectralResult r;
    r.sigma = sigma;
    const Eigen::Index got = std::min<Eigen::Index>(nconv, nev);
    r.vectors.resize(n, got);
    for (Eigen::Index c = 0; c < got; ++c) {
        r.eigenvalues.push_back(d[static_cast<std::size_t>(c)]);
        r.vectors.col(c) = Eigen::Map<const Eigen::VectorXd>(z.data() + c * n, n);
    }
    finalize(r, K, M);
    double worst = 0.0;
    for (double res : r.residuals) worst = std::max(worst, res);
    if (stalled || got < nev || worst > opts.tol) {
        r.converged = false;
        throw EigenNotConverged("eigensolver stopped with " + std::to_string(got) + " of " + std::to_string(nev) +
                                    " pairs; worst residual " + std::to_string(worst),
                                r);
    }
    return r;
}

std::vector<std::vector<int>> eigen_clusters(const std::vector<double>& values, double tol)
{
    std::vector<std::vector<int>> out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!out.empty()) {
            const double prev = values[static_cast<std::size_t>(out.back().back())];
            if (std::abs(values[i] - prev) <= tol * std::max(1.0, std::abs(prev))) {
                out.back().push_back(static_cast<int>(i));
                continue;
            }
        }
        out.push_back({static_cast<int>(i)});
    }
    return out;
}

EigenPairing match_eigenpairs(const SpectralResult& a, const SpectralResult& b, const Sparse& M,
                              const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& map_b, double cluster_tol)
{
    const Eigen::Index n = a.vectors.rows();
    const Eigen::Index ka = a.vectors.cols(), kb = b.vectors.cols();
    Eigen::MatrixXd B(n, kb);
    for (Eigen::Index j = 0; j < kb; ++j) {
        Eigen::VectorXd col = map_b ? map_b(b.vectors.col(j)) : Eigen::VectorXd(b.vectors.col(j));
        if (col.size() != n) throw ContractError("match_eigenpairs: dimension mismatch without an overlap map");
        B.col(j) = col;
    }
    if (M.rows() != n) throw ContractError("match_eigenpairs: mass matrix does not match the vectors");
    const Eigen::MatrixXd MA = M * a.vectors;
    Eigen::MatrixXd G = MA.transpose() * B;
    for (Eigen::Index i = 0; i < ka; ++i) {
        const double na = std::sqrt(a.vectors.col(i).dot(MA.col(i)));
        for (Eigen::Index j = 0; j < kb; ++j) {
            const double nb = std::sqrt(B.col(j).dot(M * B.col(j)));
            G(i, j) /= na * nb;
        }
    }
    const auto ca = eigen_clusters(a.eigenvalues, cluster_tol);
    const auto cb = eigen_clusters(b.eigenvalues, cluster_tol);
    std::vector<int> cluster_of_a(static_cast<std::size_t>(ka)), cluster_of_b(static_cast<std::size_t>(kb));
    for (std::size_t c = 0; c < ca.size(); ++c)
        for (int i : ca[c]) cluster_of_a[static_cast<std::size_t>(i)] = static_cast<int>(c);
    for (std::size_t c = 0; c < cb.size(); ++c)
        for (int j : cb[c]) cluster_of_b[static_cast<std::size_t>(j)] = static_cast<int>(c);

    struct Cand {
        double p, gap;
        int i, j;
    };
    std::vector<Cand> cands;
    for (Eigen::Index i = 0; i < ka; ++i)
        for (Eigen::Index j = 0; j < kb; ++j) {
            // Projection onto whichever side's cluster is larger: a basis of a
            // degenerate subspace is arbitrary on both sides.
            double pa = 0.0, pb = 0.0;
            for (int ii : ca[static_cast<std::size_t>(cluster_of_a[static_cast<std::size_t>(i)])])
                pa += G(ii, j) * G(ii, j);
            for (int jj : cb[static_cast<std::size_t>(cluster_of_b[static_cast<std::size_t>(j)])])
                pb += G(i, jj) * G(i, jj);
            cands.push_back({std::min(1.0, std::sqrt(std::max(pa, pb))), std::abs(a.eigenvalues[i] - b.eigenvalues[j]),
                             static_cast<int>(i), static_cast<int>(j)});
        }
    std::stable_sort(cands.begin(), cands.end(), [](const Cand& x, const Cand& y) {
        if (std::abs(x.p - y.p) > 1e-12) return x.p > y.p;
        return x.gap < y.gap;
    });
    EigenPairing out;
    out.match.assign(static_cast<std::size_t>(ka), -1);
    out.overlap.assign(static_cast<std::size_t>(ka), 0.0);
    out.gap.assign(static_cast<std::size_t>(ka), std::numeric_limits<double>::quiet_NaN());
    std::vector<std::uint8_t> used(static_cast<std::size_t>(kb), 0);
    for (const Cand& c : cands) {
        if (out.match[static_cast<std::size_t>(c.i)] >= 0 || used[static_cast<std::size_t>(c.j)]) continue;
        out.match[static_cast<std::size_t>(c.i)] = c.j;
        out.overlap[static_cast<std::size_t>(c.i)] = c.p;
        out.gap[static_cast<std::size_t>(c.i)] = c.gap;
        used[static_cast<std::size_t>(c.j)] = 1;
    }
    // Inside a cluster of a, hand the matched b levels out in ascending order.
    for (const auto& cl : ca) {
        std::vector<int> js;
        for (int i : cl)
            if (out.match[static_cast<std::size_t>(i)] >= 0) js.push_back(out.match[static_cast<std::size_t>(i)]);
        if (js.size() != cl.size()) continue;
        std::sort(js.begin(), js.end(), [&](int x, int y) { return b.eigenvalues[static_cast<std::size_t>(x)] < b.eigenvalues[static_cast<std::size_t>(y)]; });
        for (std::size_t k = 0; k < cl.size(); ++k) {
            const auto i = static_cast<std::size_t>(cl[k]);
            out.match[i] = js[k];
            out.gap[i] = std::abs(a.eigenvalues[i] - b.eigenvalues[static_cast<std::size_t>(js[k])]);
            double pa = 0.0, pb = 0.0;
            for (int ii : cl) pa += G(ii, js[k]) * G(ii, js[k]);
            for (int jj : cb[static_cast<std::size_t>(cluster_of_b[static_cast<std::size_t>(js[k])])])
                pb += G(cl[k], jj) * G(cl[k], jj);
            out.overlap[i] = std::min(1.0, std::sqrt(std::max(pa, pb)));
        }
    }
    for (const auto& cl : ca) {
        EigenPairing::Cluster rep;
        rep.a = cl;
        for (int i : cl)
            if (out.match[static_cast<std::size_t>(i)] >= 0) rep.b.push_back(out.match[static_cast<std::size_t>(i)]);
        if (!rep.b.empty()) {
            Eigen::MatrixXd sub(static_cast<Eigen::Index>(rep.a.size()), static_cast<Eigen::Index>(rep.b.size()));
            for (std::size_t r = 0; r < rep.a.size(); ++r)
                for (std::size_t c = 0; c < rep.b.size(); ++c) sub(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = G(rep.a[r], rep.b[c]);
            Eigen::JacobiSVD<Eigen::MatrixXd> svd(sub);
            for (Eigen::Index s = 0; s < svd.singularValues().size(); ++s)
                rep.principal_angles.push_back(std::acos(std::clamp(svd.singularValues()[s], 0.0, 1.0)));
        }
        out.clusters.push_back(std::move(rep));
    }
    return out;
}

}  // namespace curvres
