#include "curvres/convergence.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "curvres/eigensolve.hpp"
#include "curvres/error.hpp"
#include "curvres/numerics.hpp"
#include "curvres/resonance.hpp"

namespace curvres {

namespace {

void check_eps_list(const std::vector<double>& eps)
{
    if (eps.empty()) throw ConfigError("eps list is empty");
    for (std::size_t i = 0; i < eps.size(); ++i) {
        if (!(eps[i] > 0.0)) throw ConfigError("eps values must be positive");
        if (i > 0 && !(eps[i] < eps[i - 1])) throw ConfigError("eps list must be strictly decreasing");
    }
}

// Limit eigenpairs of one mesh, as node-space vectors mapped into the H_eps dofs.
struct LimitSide {
    std::vector<double> values;
    Eigen::MatrixXd vectors;  // columns in H_eps dofs
};

LimitSide limit_side(const InterfaceMesh& mesh, const PlaneFunction& W, const PotentialProfile& profile,
                     const HalfBoundState& hb, const OperatorMatrices& heps, std::size_t k)
{
    const CurveFrame& f = *mesh.frame;
    LimitSide out;
    std::vector<std::pair<double, Eigen::VectorXd>> pairs;
    if (hb.resonant) {
        const auto t = compute_transmission(profile, hb, f.s(), f.kappa(), f.length());
        const auto lim = assemble_limit(mesh, W, t);
        const auto r = solve_lowest(lim.K, lim.M, k);
        for (std::size_t i = 0; i < r.size(); ++i)
            pairs.emplace_back(r.eigenvalues[i], heps.restrict(lim.expand(r.vectors.col(static_cast<Eigen::Index>(i)))));
    } else {
        const auto [in, out_op] = assemble_dirichlet_split(mesh, W);
        for (const auto* op : {&in, &out_op}) {
            const auto r = solve_lowest(op->K, op->M, k);
            for (std::size_t i = 0; i < r.size(); ++i)
                pairs.emplace_back(r.eigenvalues[i],
                                   heps.restrict(op->expand(r.vectors.col(static_cast<Eigen::Index>(i)))));
        }
        std::stable_sort(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        pairs.resize(k);
    }
    out.vectors.resize(heps.dofs(), static_cast<Eigen::Index>(pairs.size()));
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        out.values.push_back(pairs[i].first);
        out.vectors.col(static_cast<Eigen::Index>(i)) = pairs[i].second;
    }
    return out;
}

struct LevelResult {
    std::vector<double> lambda_eps, lambda_limit, overlap;
};

LevelResult solve_level(const CurveFrame& frame, const PlaneFunction& W, const PotentialProfile& profile,
                        const HalfBoundState& hb, const ConvergenceOptions& opts, double eps, int level)
{
    MeshOptions mo = opts.mesh;
    mo.epsilon = eps;
    mo.level = level;
    const auto mesh = build_mesh(frame, mo);
    const auto heps = assemble_heps(mesh, W, profile);
    const LimitSide lim = limit_side(mesh, W, profile, hb, heps, opts.track);

    // H_eps pairs above a shift below the tracked limit levels; the layer's
    // own (diverging) levels live far below.
    const double lo = lim.values.front();
    const double sigma = lo - std::max(1.0, 0.5 * std::abs(lo));
    const auto r = solve_lowest(heps.K, heps.M, opts.track + opts.extra, sigma);

    SpectralResult a;
    a.eigenvalues = lim.values;
    a.vectors = lim.vectors;
    // Discretization splits degenerate limit levels by ~1e-5; treat them as one.
    const auto pairing = match_eigenpairs(a, r, heps.M, {}, 1e-3);
    LevelResult out;
    for (std::size_t i = 0; i < lim.values.size(); ++i) {
        const int j = pairing.match[i];
        out.lambda_limit.push_back(lim.values[i]);
        out.lambda_eps.push_back(j >= 0 ? r.eigenvalues[static_cast<std::size_t>(j)]
                                        : std::numeric_limits<double>::quiet_NaN());
        out.overlap.push_back(pairing.overlap[i]);
    }
    return out;
}

void finish(ConvergenceReport& rep, double min_overlap)
{
    for (auto& row : rep.rows)
        if (!(row.overlap >= min_overlap) && !std::isnan(row.overlap)) {
            row.tracked = false;
            std::ostringstream w;
            w << "eigenvalue " << row.index << " lost at eps=" << row.eps << " (overlap " << row.overlap
              << "); excluded from the fit";
            rep.warnings.push_back(w.str());
        }
    rep.fits = fit_rates(rep.rows);
}

}  // namespace

std::vector<RateFit> fit_rates(const std::vector<ConvergenceRow>& rows)
{
    std::map<int, std::vector<const ConvergenceRow*>> by_index;
    for (const auto& r : rows)
        if (r.tracked && std::isfinite(r.gap) && r.gap != 0.0) by_index[r.index].push_back(&r);
    std::vector<RateFit> fits;
    for (const auto& [index, list] : by_index) {
        RateFit f;
        f.index = index;
        f.points = list.size();
        f.lambda_limit = list.back()->lambda_limit;
        if (list.size() >= 2) {
            std::vector<double> x, y;
            for (const auto* r : list) {
                x.push_back(std::log(r->eps));
                y.push_back(std::log(std::abs(r->gap)));
            }
            const auto line = least_squares_line(x, y);
            f.p = line.slope;
            f.c = std::exp(line.intercept);
        } else {
            f.p = f.c = std::numeric_limits<double>::quiet_NaN();
        }
        fits.push_back(f);
    }
    return fits;
}

ConvergenceReport run_convergence(const CurveFrame& frame, const PlaneFunction& W, const PotentialProfile& profile,
                                  const ConvergenceOptions& opts)
{
    check_eps_list(opts.eps_list);
    if (opts.track == 0) throw ConfigError("nothing to track");
    const auto hb = detect_resonance(profile);
    ConvergenceReport rep;
    rep.path = "fem";
    rep.resonant = hb.resonant;
    rep.limit = hb.resonant ? "transmission" : "dirichlet-split";
    for (double eps : opts.eps_list) {
        if (!(eps < 0.5 * frame.eps_star())) throw ConfigError("eps must stay below eps*/2");
        const auto coarse = solve_level(frame, W, profile, hb, opts, eps, opts.mesh.level);
        LevelResult use = coarse;
        if (opts.richardson) {
            const auto fine = solve_level(frame, W, profile, hb, opts, eps, opts.mesh.level + 1);
            for (std::size_t i = 0; i < use.lambda_eps.size(); ++i) {
                use.lambda_eps[i] = (4.0 * fine.lambda_eps[i] - coarse.lambda_eps[i]) / 3.0;
                use.lambda_limit[i] = (4.0 * fine.lambda_limit[i] - coarse.lambda_limit[i]) / 3.0;
                use.overlap[i] = std::min(coarse.overlap[i], fine.overlap[i]);
            }
        }
        for (std::size_t i = 0; i < use.lambda_eps.size(); ++i) {
            ConvergenceRow row;
            row.eps = eps;
            row.index = static_cast<int>(i);
            row.lambda_eps = use.lambda_eps[i];
            row.lambda_limit = use.lambda_limit[i];
            row.gap = row.lambda_eps - row.lambda_limit;
            row.overlap = use.overlap[i];
            rep.rows.push_back(row);
        }
    }
    finish(rep, opts.min_overlap);
    return rep;
}

ConvergenceReport run_radial_convergence(const RadialBenchmark& bench, const PotentialProfile& profile,
                                         const ConvergenceOptions& opts)
{
    check_eps_list(opts.eps_list);
    if (opts.track == 0) throw ConfigError("nothing to track");
    const auto hb = detect_resonance(profile);
    ConvergenceReport rep;
    rep.path = "radial";
    rep.resonant = hb.resonant;
    rep.limit = hb.resonant ? "transmission" : "dirichlet-split";

    RadialOracle lim = RadialOracle::dirichlet(bench);
    if (hb.resonant) {
        const auto frame = reparametrize_arclength(ClosedCurve::circle(bench.radius), 256);
        const auto t = compute_transmission(profile, hb, frame.s(), frame.kappa(), frame.length());
        lim = RadialOracle::limit(bench, t.theta, t.upsilon.front());
    }

    // Lowest `track` limit levels with multiplicity, as (m, j).
    struct Tracked {
        int m, j;
        double lambda;
    };
    std::vector<Tracked> tracked;
    for (double hi = lim.floor_value() + 10.0; tracked.size() < opts.track; hi += 10.0) {
        tracked.clear();
        for (const auto& l : lim.window(lim.floor_value(), hi, 40))
            for (int c = 0; c < l.multiplicity && tracked.size() < opts.track; ++c) tracked.push_back({l.m, l.j, l.lambda});
        if (hi > lim.floor_value() + 1e4) throw NumericalError("limit spectrum not found");
    }

    for (double eps : opts.eps_list) {
        if (!(eps < 0.5 * bench.radius)) throw ConfigError("eps must stay below eps*/2");
        const auto o = RadialOracle::heps(bench, profile, eps);
        for (std::size_t i = 0; i < tracked.size(); ++i) {
            const auto& t = tracked[i];
            // H_eps levels below the limit operator's floor belong to the layer.
            const int sunk = o.count_below(t.m, lim.floor_value());
            ConvergenceRow row;
            row.eps = eps;
            row.index = static_cast<int>(i);
            row.lambda_eps = o.eigenvalue(t.m, sunk + t.j);
            row.lambda_limit = t.lambda;
            row.gap = row.lambda_eps - row.lambda_limit;
            row.overlap = std::numeric_limits<double>::quiet_NaN();
            rep.rows.push_back(row);
        }
    }
    finish(rep, opts.min_overlap);
    return rep;
}

void ConvergenceReport::write_csv(std::ostream& out) const
{
    out << "eps,lambda_eps,lambda_limit,gap,overlap,index,tracked\n";
    out << std::setprecision(12);
    for (const auto& r : rows) {
        out << r.eps << ',' << r.lambda_eps << ',' << r.lambda_limit << ',' << r.gap << ',';
        if (std::isnan(r.overlap))
            out << "nan";
        else
            out << r.overlap;
        out << ',' << r.index << ',' << (r.tracked ? 1 : 0) << '\n';
    }
}

std::string ConvergenceReport::summary_json() const
{
    nlohmann::ordered_json j;
    j["path"] = path;
    j["limit"] = limit;
    j["resonant"] = resonant;
    j["fits"] = nlohmann::ordered_json::array();
    for (const auto& f : fits) {
        nlohmann::ordered_json e;
        e["index"] = f.index;
        e["lambda_limit"] = f.lambda_limit;
        e["c"] = std::isfinite(f.c) ? nlohmann::ordered_json(f.c) : nlohmann::ordered_json(nullptr);
        e["p"] = std::isfinite(f.p) ? nlohmann::ordered_json(f.p) : nlohmann::ordered_json(nullptr);
        e["points"] = f.points;
        j["fits"].push_back(e);
    }
    j["min_p"] = fits.empty() ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(min_order());
    j["warnings"] = warnings;
    return j.dump(2);
}

double ConvergenceReport::min_order() const
{
    double p = std::numeric_limits<double>::infinity();
    for (const auto& f : fits) p = std::min(p, std::isnan(f.p) ? -std::numeric_limits<double>::infinity() : f.p);
    return fits.empty() ? std::numeric_limits<double>::quiet_NaN() : p;
}

}  // namespace curvres
