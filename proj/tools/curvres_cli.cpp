// curvres command-line front end: one experiment per invocation, driven by a
// YAML config.  Exit codes: 0 ok, 2 config/input error, 3 numerical failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numbers>

#include "curvres/config.hpp"
#include "curvres/convergence.hpp"
#include "curvres/distributional.hpp"
#include "curvres/eigensolve.hpp"
#include "curvres/error.hpp"
#include "curvres/operators.hpp"
#include "curvres/quasimode.hpp"
#include "curvres/radial.hpp"
#include "curvres/resonance.hpp"

namespace fs = std::filesystem;
using namespace curvres;

namespace {

std::ofstream open_out(const fs::path& dir, const std::string& name)
{
    std::ofstream f(dir / name);
    if (!f) throw ConfigError("cannot write " + (dir / name).string());
    f << std::setprecision(12);
    return f;
}

void write_json(const fs::path& dir, const std::string& name, const nlohmann::ordered_json& j)
{
    auto f = open_out(dir, name);
    f << j.dump(2) << '\n';
}

// ------------------------------------------------------------------ resonance

int cmd_resonance(const ExperimentConfig& c, const fs::path& out)
{
    const auto p = c.potential();
    const auto frame = c.frame();
    const auto hb = detect_resonance(p);
    const double mu1 = first_moment(p);

    auto f = open_out(out, "resonance.csv");
    f << "kind,alpha,resonant,theta,defect,mu1\n";
    f << "profile,1," << (hb.resonant ? 1 : 0) << ',' << (hb.resonant ? hb.theta : std::nan("")) << ','
      << hb.defect << ',' << mu1 << '\n';
    if (c.scan_hi > c.scan_lo) {
        const auto scan = scan_coupling(p, c.scan_lo, c.scan_hi, c.scan_grid);
        for (double a : scan.roots) {
            const auto h = detect_resonance(p.scaled(a));
            f << "scan," << a << ',' << (h.resonant ? 1 : 0) << ',' << h.theta << ',' << h.defect << ','
              << a * mu1 << '\n';
        }
    }

    const auto t = compute_transmission(p, hb, frame.s(), frame.kappa(), frame.length());
    auto g = open_out(out, "transmission.csv");
    g << "s,kappa,mu0,mu,upsilon\n";
    for (std::size_t i = 0; i < t.s.size(); ++i) {
        g << t.s[i] << ',' << t.kappa[i] << ',' << t.mu0[i] << ',';
        if (t.resonant)
            g << t.mu[i] << ',' << t.upsilon[i] << '\n';
        else
            g << "nan,nan\n";
    }
    std::cout << (hb.resonant ? "resonant, theta = " + std::to_string(hb.theta)
                              : "non-resonant, defect = " + std::to_string(hb.defect))
              << '\n';
    return 0;
}

// ------------------------------------------------------------------ solve

OperatorMatrices assemble_selected(const std::string& op, const InterfaceMesh& mesh, const ExperimentConfig& c)
{
    const auto W = c.confining();
    const auto p = c.potential();
    if (op == "heps") return assemble_heps(mesh, W, p);
    if (op == "limit") {
        const auto hb = detect_resonance(p);
        if (!hb.resonant) throw ConfigError("profile is not resonant; the limit is the Dirichlet split");
        const auto& f = *mesh.frame;
        return assemble_limit(mesh, W, compute_transmission(p, hb, f.s(), f.kappa(), f.length()));
    }
    throw ContractError("unknown operator " + op);
}

int cmd_solve(const ExperimentConfig& c, const std::string& op, const fs::path& out)
{
    MeshOptions mo = c.mesh;
    mo.epsilon = op == "heps" ? c.eps.front() : 0.0;
    const auto mesh = build_mesh(c.frame(), mo);

    std::vector<std::pair<double, double>> values;  // eigenvalue, residual
    std::vector<Eigen::VectorXd> fields;
    auto collect = [&](const OperatorMatrices& A, std::size_t k) {
        if (k == 0) return;
        const auto r = solve_lowest(A.K, A.M, std::min<std::size_t>(k, static_cast<std::size_t>(A.dofs())), c.sigma,
                                    c.solver);
        for (std::size_t i = 0; i < r.size(); ++i) {
            values.emplace_back(r.eigenvalues[i], r.residuals[i]);
            fields.push_back(A.expand(r.vectors.col(static_cast<Eigen::Index>(i))));
        }
    };
    if (op == "dirichlet-split") {
        const auto [in, outer] = assemble_dirichlet_split(mesh, c.confining());
        collect(in, c.k);
        collect(outer, c.k);
        std::vector<std::size_t> order(values.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return values[a].first < values[b].first; });
        order.resize(std::min(order.size(), c.k));
        decltype(values) v2;
        decltype(fields) f2;
        for (auto i : order) v2.push_back(values[i]), f2.push_back(fields[i]);
        values = std::move(v2);
        fields = std::move(f2);
    } else {
        collect(assemble_selected(op, mesh, c), c.k);
    }

    auto f = open_out(out, "eigenvalues.csv");
    f << "index,eigenvalue,residual\n";
    for (std::size_t i = 0; i < values.size(); ++i) f << i << ',' << values[i].first << ',' << values[i].second << '\n';

    auto g = open_out(out, "eigenvectors.csv");
    g << "node,x1,x2,side";
    for (std::size_t i = 0; i < fields.size(); ++i) g << ",u" << i;
    g << '\n';
    for (std::size_t n = 0; n < mesh.size(); ++n) {
        g << n << ',' << mesh.nodes[n][0] << ',' << mesh.nodes[n][1] << ',' << static_cast<int>(mesh.node_side[n]);
        for (const auto& fld : fields) g << ',' << fld[static_cast<Eigen::Index>(n)];
        g << '\n';
    }
    for (std::size_t i = 0; i < values.size(); ++i) std::cout << std::setprecision(10) << values[i].first << '\n';
    return 0;
}

// ------------------------------------------------------------------ converge

int cmd_converge(const ExperimentConfig& c, const fs::path& out)
{
    const auto rep = c.convergence_path == "radial"
                         ? run_radial_convergence(c.radial_benchmark(), c.potential(), c.convergence)
                         : run_convergence(c.frame(), c.confining(), c.potential(), c.convergence);
    auto f = open_out(out, "convergence.csv");
    rep.write_csv(f);
    auto g = open_out(out, "convergence.json");
    g << rep.summary_json() << '\n';
    for (const auto& w : rep.warnings) std::cerr << "warning: " << w << '\n';
    for (const auto& fit : rep.fits)
        std::cout << "lambda[" << fit.index << "] -> " << fit.lambda_limit << ": p = " << fit.p << ", c = " << fit.c
                  << '\n';
    return 0;
}

// ------------------------------------------------------------------ distcheck

int cmd_distcheck(const ExperimentConfig& c, const fs::path& out)
{
    const auto rep = distributional_limit_check(c.potential(), c.frame(),
                                                TestFunction::gaussian(c.dist_centre, c.dist_width), c.eps,
                                                c.dist_s_points, c.dist_n_points);
    auto f = open_out(out, "distcheck.csv");
    rep.write_csv(f);
    nlohmann::ordered_json j;
    j["mu1"] = rep.mu1;
    j["v_integral"] = rep.v_integral;
    j["predicted"] = rep.predicted;
    j["divergent"] = rep.divergent;
    j["scaled_limit"] = rep.scaled_limit;
    j["order"] = rep.order;
    write_json(out, "distcheck.json", j);
    std::cout << (rep.divergent ? "divergent (int V != 0), eps*I -> " + std::to_string(rep.scaled_limit)
                                : "limit " + std::to_string(rep.predicted))
              << ", fitted order " << rep.order << '\n';
    return 0;
}

// ------------------------------------------------------------------ quasimode

struct LimitPair {
    double lambda;
    std::unique_ptr<LimitField> field;
};

LimitPair fem_limit_pair(const ExperimentConfig& c, const InterfaceMesh& mesh, const HalfBoundState& hb)
{
    const auto W = c.confining();
    const auto p = c.potential();
    const auto idx = static_cast<std::size_t>(c.quasimode_index);
    std::vector<std::pair<double, Eigen::VectorXd>> pairs;
    if (hb.resonant) {
        const auto& f = *mesh.frame;
        const auto lim = assemble_limit(mesh, W, compute_transmission(p, hb, f.s(), f.kappa(), f.length()));
        const auto r = solve_lowest(lim.K, lim.M, idx + 1, std::nullopt, c.solver);
        pairs.emplace_back(r.eigenvalues[idx], lim.expand(r.vectors.col(static_cast<Eigen::Index>(idx))));
    } else {
        const auto [in, outer] = assemble_dirichlet_split(mesh, W);
        for (const auto* op : {&in, &outer}) {
            const auto r = solve_lowest(op->K, op->M, idx + 1, std::nullopt, c.solver);
            for (std::size_t i = 0; i < r.size(); ++i)
                pairs.emplace_back(r.eigenvalues[i], op->expand(r.vectors.col(static_cast<Eigen::Index>(i))));
        }
        std::stable_sort(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    }
    const auto& pr = hb.resonant ? pairs.front() : pairs.at(idx);
    return {pr.first, std::make_unique<FemLimitField>(mesh, pr.second)};
}

LimitPair radial_limit_pair(const ExperimentConfig& c, const HalfBoundState& hb)
{
    const auto bench = c.radial_benchmark();
    const auto p = c.potential();
    RadialOracle o = RadialOracle::dirichlet(bench);
    if (hb.resonant) {
        const auto f = c.frame();
        const auto t = compute_transmission(p, hb, f.s(), f.kappa(), f.length());
        o = RadialOracle::limit(bench, t.theta, t.upsilon.front());
    }
    int seen = 0;
    for (double hi = o.floor_value() + 10.0; hi < o.floor_value() + 1e4; hi += 10.0) {
        for (const auto& l : o.window(o.floor_value(), hi, 40)) {
            if (seen + l.multiplicity > c.quasimode_index) {
                auto shared = std::make_shared<CurveFrame>(c.frame());
                return {l.lambda, std::make_unique<RadialLimitField>(shared, o.eigenfunction(l.m, l.lambda), l.m)};
            }
            seen += l.multiplicity;
        }
        seen = 0;
    }
    throw NumericalError("limit eigenvalue not found");
}

int cmd_quasimode(const ExperimentConfig& c, const fs::path& out)
{
    const auto p = c.potential();
    const auto W = c.confining();
    const auto hb = detect_resonance(p);
    auto f = open_out(out, "quasimode.csv");
    f << "eps,lambda,residual,nearest,distance,holds,max_jump,max_slope_jump,solvability\n";
    nlohmann::ordered_json j;
    j["resonant"] = hb.resonant;
    j["rows"] = nlohmann::ordered_json::array();
    std::vector<double> deltas;
    bool all_hold = true;
    const auto frame = c.frame();
    for (double eps : c.eps) {
        MeshOptions mo = c.mesh;
        mo.epsilon = eps;
        const auto mesh = build_mesh(frame, mo);
        const auto heps = assemble_heps(mesh, W, p);
        const auto pair = c.quasimode_field == "radial" ? radial_limit_pair(c, hb) : fem_limit_pair(c, mesh, hb);
        const auto q = build_quasimode(*pair.field, pair.lambda, mesh, p, W, c.quasimode);
        const double d = quasimode_residual(q, heps);
        const auto b = check_quasimode_bracket(q, heps, d);
        deltas.push_back(d);
        all_hold = all_hold && b.holds;
        f << eps << ',' << pair.lambda << ',' << d << ',' << b.nearest << ',' << b.distance << ',' << (b.holds ? 1 : 0)
          << ',' << q.max_jump() << ',' << q.max_slope_jump() << ',' << q.solvability_residual << '\n';
        std::cout << "eps " << eps << ": lambda " << pair.lambda << ", residual " << d << ", nearest " << b.nearest
                  << (b.holds ? " (within)" : " (OUTSIDE)") << '\n';
    }
    for (std::size_t i = 1; i < deltas.size(); ++i) j["ratios"].push_back(deltas[i - 1] / deltas[i]);
    j["all_within_residual"] = all_hold;
    write_json(out, "quasimode.json", j);
    return 0;
}

// ------------------------------------------------------------------ mesh-dump

int cmd_mesh_dump(const ExperimentConfig& c, const fs::path& out)
{
    MeshOptions mo = c.mesh;
    mo.epsilon = c.eps.front();
    const auto mesh = build_mesh(c.frame(), mo);
    auto f = open_out(out, "mesh.txt");
    mesh.write(f);
    std::cout << mesh.size() << " nodes, " << mesh.triangles.size() << " triangles, " << mesh.layer_triangle_count()
              << " in the layer\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Spectral experiments for Schroedinger operators with potentials concentrated near curves"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand
    std::string config_path, out_dir, op;
    int threads = 0;
    app.add_option("--config", config_path, "YAML experiment config")->check(CLI::ExistingFile);
    app.add_option("--out", out_dir, "output directory (overrides the config)");
    app.add_option("--threads", threads, "worker threads for linear algebra")->check(CLI::PositiveNumber);

    auto* res = app.add_subcommand("resonance", "resonance data and transmission coefficients");
    auto* solve = app.add_subcommand("solve", "lowest eigenpairs of one operator");
    solve->add_option("--operator", op, "heps | limit | dirichlet-split (overrides the config)")
        ->check(CLI::IsMember({"heps", "limit", "dirichlet-split"}));
    auto* conv = app.add_subcommand("converge", "eigenvalue convergence over the eps schedule");
    auto* dist = app.add_subcommand("distcheck", "distributional limit of the concentrated potential");
    auto* qm = app.add_subcommand("quasimode", "quasimode residuals over the eps schedule");
    auto* dump = app.add_subcommand("mesh-dump", "write the mesh for the first eps");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        ExperimentConfig c = config_path.empty() ? parse_config("") : load_config(config_path);
        if (threads > 0) c.threads = threads;
        Eigen::setNbThreads(c.threads);
        {
            // The layer model assumes V, U vanish at n = +-1; warn but carry on.
            const double period = c.profile.U_period > 0.0 ? c.profile.U_period : c.frame().length();
            const double b = c.potential().boundary_magnitude(period);
            if (b > 1e-8)
                std::cerr << "warning: profile does not vanish at n = +-1 (max " << b << ")\n";
        }
        const fs::path out = out_dir.empty() ? fs::path(c.output) : fs::path(out_dir);
        fs::create_directories(out);

        if (*res) return cmd_resonance(c, out);
        if (*solve) return cmd_solve(c, op.empty() ? c.op : op, out);
        if (*conv) return cmd_converge(c, out);
        if (*dist) return cmd_distcheck(c, out);
        if (*qm) return cmd_quasimode(c, out);
        if (*dump) return cmd_mesh_dump(c, out);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.category() == Error::Category::config ? 2 : 3;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
