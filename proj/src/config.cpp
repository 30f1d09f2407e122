#include "curvres/config.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "curvres/error.hpp"
#include "curvres/expr.hpp"

namespace curvres {

namespace {

class Reader {
public:
    explicit Reader(std::string source) : source_(std::move(source)) {}

    [[noreturn]] void fail(const YAML::Node& node, const std::string& msg) const
    {
        std::ostringstream os;
        os << source_;
        if (node.IsDefined() && node.Mark().line >= 0)
            os << ':' << node.Mark().line + 1 << ':' << node.Mark().column + 1;
        os << ": " << msg;
        throw ConfigError(os.str());
    }

    void only(const YAML::Node& map, const std::string& where, std::initializer_list<const char*> keys) const
    {
        if (!map.IsMap()) fail(map, where + " must be a mapping");
        const std::set<std::string> allowed(keys.begin(), keys.end());
        for (const auto& kv : map) {
            const auto key = kv.first.as<std::string>();
            if (!allowed.count(key)) fail(kv.first, "unknown key '" + key + "' in " + where);
        }
    }

    template <class T>
    T get(const YAML::Node& node, const std::string& what) const
    {
        if (!node.IsScalar()) fail(node, what + " must be a scalar");
        try {
            return node.as<T>();
        } catch (const YAML::Exception&) {
            fail(node, "cannot read " + what + " from '" + node.Scalar() + "'");
        }
    }

    double number(const YAML::Node& node, const std::string& what, double lo, double hi, bool open_lo = false) const
    {
        const double v = get<double>(node, what);
        if (!std::isfinite(v) || v < lo || v > hi || (open_lo && v == lo)) {
            std::ostringstream os;
            os << what << " = " << v << " outside " << (open_lo ? "(" : "[") << lo << ", " << hi << "]";
            fail(node, os.str());
        }
        return v;
    }

    std::size_t count(const YAML::Node& node, const std::string& what, long lo, long hi) const
    {
        const long v = get<long>(node, what);
        if (v < lo || v > hi) fail(node, what + " = " + std::to_string(v) + " outside [" + std::to_string(lo) + ", " +
                                         std::to_string(hi) + "]");
        return static_cast<std::size_t>(v);
    }

    bool flag(const YAML::Node& node, const std::string& what) const { return get<bool>(node, what); }

    std::string choice(const YAML::Node& node, const std::string& what, std::initializer_list<const char*> options) const
    {
        const auto v = get<std::string>(node, what);
        for (const char* o : options)
            if (v == o) return v;
        std::string list;
        for (const char* o : options) list += (list.empty() ? "" : ", ") + std::string(o);
        fail(node, what + " must be one of " + list);
    }

    // Parsed here so that bad expressions are reported at their line.
    std::string expression(const YAML::Node& node, const std::string& what, std::vector<std::string> vars) const
    {
        const auto text = get<std::string>(node, what);
        try {
            Expression::parse(text, std::move(vars));
        } catch (const InputError& e) {
            fail(node, what + ": " + e.what());
        }
        return text;
    }

    std::vector<double> numbers(const YAML::Node& node, const std::string& what) const
    {
        if (!node.IsSequence()) fail(node, what + " must be a list");
        std::vector<double> v;
        for (const auto& x : node) v.push_back(number(x, what, -1e300, 1e300));
        return v;
    }

    Point point(const YAML::Node& node, const std::string& what) const
    {
        const auto v = numbers(node, what);
        if (v.size() != 2) fail(node, what + " must have two entries");
        return {v[0], v[1]};
    }

private:
    std::string source_;
};

void read_curve(const Reader& rd, const YAML::Node& n, CurveConfig& c)
{
    rd.only(n, "curve", {"type", "radius", "a", "b", "centre", "x1", "x2", "period", "points", "samples"});
    if (n["type"]) c.type = rd.choice(n["type"], "curve.type", {"circle", "ellipse", "expression", "points"});
    if (n["radius"]) c.radius = rd.number(n["radius"], "curve.radius", 0.0, 1e6, true);
    if (n["a"]) c.a = rd.number(n["a"], "curve.a", 0.0, 1e6, true);
    if (n["b"]) c.b = rd.number(n["b"], "curve.b", 0.0, 1e6, true);
    if (n["centre"]) c.centre = rd.point(n["centre"], "curve.centre");
    if (n["x1"]) c.x1 = rd.expression(n["x1"], "curve.x1", {"t"});
    if (n["x2"]) c.x2 = rd.expression(n["x2"], "curve.x2", {"t"});
    if (n["period"]) c.period = rd.number(n["period"], "curve.period", 0.0, 1e6, true);
    if (n["samples"]) c.samples = rd.count(n["samples"], "curve.samples", 16, 1 << 16);
    if (n["points"]) {
        if (!n["points"].IsSequence()) rd.fail(n["points"], "curve.points must be a list of [x1, x2]");
        for (const auto& p : n["points"]) c.points.push_back(rd.point(p, "curve.points entry"));
    }
    if (c.type == "expression" && (c.x1.empty() || c.x2.empty()))
        rd.fail(n, "curve.type expression needs x1 and x2");
    if (c.type == "points" && c.points.size() < 8) rd.fail(n, "curve.type points needs at least 8 points");
}

void read_profile(const Reader& rd, const YAML::Node& n, ProfileConfig& p)
{
    rd.only(n, "profile", {"V", "U", "V_samples", "U_samples", "U_period"});
    if (n["V"]) p.V = rd.expression(n["V"], "profile.V", {"n"});
    if (n["U"]) p.U = rd.expression(n["U"], "profile.U", {"s", "n"});
    if (n["V_samples"]) {
        p.V_samples = rd.numbers(n["V_samples"], "profile.V_samples");
        if (p.V_samples.size() < 4) rd.fail(n["V_samples"], "profile.V_samples needs at least 4 values");
    }
    if (n["U_samples"]) {
        const auto& t = n["U_samples"];
        if (!t.IsSequence()) rd.fail(t, "profile.U_samples must be a list of rows");
        for (const auto& row : t) p.U_samples.push_back(rd.numbers(row, "profile.U_samples row"));
        if (p.V_samples.empty()) rd.fail(t, "profile.U_samples needs V_samples");
    }
    if (n["U_period"]) p.U_period = rd.number(n["U_period"], "profile.U_period", 0.0, 1e6, true);
    if (n["V_samples"] && n["V"]) rd.fail(n["V"], "give either profile.V or profile.V_samples");
}

void read_mesh(const Reader& rd, const YAML::Node& n, MeshOptions& m)
{
    rd.only(n, "mesh", {"n_s", "n_layer", "level", "band", "grading", "exterior_growth", "box"});
    if (n["n_s"]) m.n_s = rd.count(n["n_s"], "mesh.n_s", 8, 1 << 14);
    if (n["n_layer"]) {
        m.n_layer = rd.count(n["n_layer"], "mesh.n_layer", 8, 1024);
        if (m.n_layer % 2) rd.fail(n["n_layer"], "mesh.n_layer must be even");
    }
    if (n["level"]) m.level = static_cast<int>(rd.count(n["level"], "mesh.level", 0, 4));
    if (n["band"]) m.band = rd.number(n["band"], "mesh.band", 0.0, 0.9, true);
    if (n["grading"]) m.grading = rd.number(n["grading"], "mesh.grading", 1.0, 3.0);
    if (n["exterior_growth"]) m.exterior_growth = rd.number(n["exterior_growth"], "mesh.exterior_growth", 0.0, 1.0);
    if (n["box"]) m.box = rd.number(n["box"], "mesh.box", 0.0, 1e4, true);
}

void read_solver(const Reader& rd, const YAML::Node& n, ExperimentConfig& c)
{
    rd.only(n, "solver", {"operator", "k", "sigma", "tol", "dense_threshold", "max_restarts", "ncv"});
    if (n["operator"]) c.op = rd.choice(n["operator"], "solver.operator", {"heps", "limit", "dirichlet-split"});
    if (n["k"]) c.k = rd.count(n["k"], "solver.k", 0, 500);
    if (n["sigma"]) c.sigma = rd.number(n["sigma"], "solver.sigma", -1e12, 1e12);
    if (n["tol"]) c.solver.tol = rd.number(n["tol"], "solver.tol", 0.0, 1e-2, true);
    if (n["dense_threshold"]) c.solver.dense_threshold = rd.count(n["dense_threshold"], "solver.dense_threshold", 0, 20000);
    if (n["max_restarts"]) c.solver.max_restarts = static_cast<int>(rd.count(n["max_restarts"], "solver.max_restarts", 1, 100000));
    if (n["ncv"]) c.solver.ncv = rd.count(n["ncv"], "solver.ncv", 0, 5000);
}

void read_convergence(const Reader& rd, const YAML::Node& n, ExperimentConfig& c)
{
    rd.only(n, "convergence", {"track", "extra", "richardson", "min_overlap", "path"});
    auto& o = c.convergence;
    if (n["track"]) o.track = rd.count(n["track"], "convergence.track", 1, 100);
    if (n["extra"]) o.extra = rd.count(n["extra"], "convergence.extra", 0, 200);
    if (n["richardson"]) o.richardson = rd.flag(n["richardson"], "convergence.richardson");
    if (n["min_overlap"]) o.min_overlap = rd.number(n["min_overlap"], "convergence.min_overlap", 0.0, 1.0);
    if (n["path"]) c.convergence_path = rd.choice(n["path"], "convergence.path", {"fem", "radial"});
}

void read_quasimode(const Reader& rd, const YAML::Node& n, ExperimentConfig& c)
{
    rd.only(n, "quasimode", {"beta_fraction", "samples", "solvability_tol", "index", "field"});
    auto& q = c.quasimode;
    if (n["beta_fraction"]) q.beta_fraction = rd.number(n["beta_fraction"], "quasimode.beta_fraction", 0.0, 0.5, true);
    if (n["beta_fraction"] && q.beta_fraction >= 0.5) rd.fail(n["beta_fraction"], "quasimode.beta_fraction must be < 0.5");
    if (n["samples"]) q.n_samples = rd.count(n["samples"], "quasimode.samples", 17, 1 << 16);
    if (n["solvability_tol"]) q.solvability_tol = rd.number(n["solvability_tol"], "quasimode.solvability_tol", 0.0, 1.0, true);
    if (n["index"]) c.quasimode_index = static_cast<int>(rd.count(n["index"], "quasimode.index", 0, 100));
    if (n["field"]) c.quasimode_field = rd.choice(n["field"], "quasimode.field", {"fem", "radial"});
}

}  // namespace

ExperimentConfig parse_config(const std::string& text, const std::string& source)
{
    ExperimentConfig c;
    c.source = source;
    const Reader rd(source);
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        throw ConfigError(source + ":" + std::to_string(e.mark.line + 1) + ":" + std::to_string(e.mark.column + 1) +
                          ": " + e.msg);
    }
    if (root.IsNull()) return c;
    rd.only(root, "the top level",
            {"profile", "curve", "W", "eps", "mesh", "solver", "convergence", "quasimode", "distcheck", "scan",
             "output", "seed", "threads"});

    if (root["profile"]) read_profile(rd, root["profile"], c.profile);
    if (root["curve"]) read_curve(rd, root["curve"], c.curve);
    if (root["W"]) c.W = rd.expression(root["W"], "W", {"x1", "x2", "r"});
    if (root["eps"]) {
        const auto& e = root["eps"];
        c.eps = e.IsSequence() ? rd.numbers(e, "eps") : std::vector<double>{rd.number(e, "eps", 0.0, 1e3, true)};
        if (c.eps.empty()) rd.fail(e, "eps list is empty");
        for (std::size_t i = 0; i < c.eps.size(); ++i) {
            if (!(c.eps[i] > 0.0)) rd.fail(e, "eps values must be positive");
            if (i > 0 && !(c.eps[i] < c.eps[i - 1])) rd.fail(e, "eps values must be strictly decreasing");
        }
    }
    if (root["mesh"]) read_mesh(rd, root["mesh"], c.mesh);
    if (root["solver"]) read_solver(rd, root["solver"], c);
    if (root["convergence"]) read_convergence(rd, root["convergence"], c);
    if (root["quasimode"]) read_quasimode(rd, root["quasimode"], c);
    if (const auto& d = root["distcheck"]) {
        rd.only(d, "distcheck", {"centre", "width", "s_points", "n_points"});
        if (d["centre"]) c.dist_centre = rd.point(d["centre"], "distcheck.centre");
        if (d["width"]) c.dist_width = rd.number(d["width"], "distcheck.width", 0.0, 1e3, true);
        if (d["s_points"]) c.dist_s_points = rd.count(d["s_points"], "distcheck.s_points", 16, 1 << 20);
        if (d["n_points"]) c.dist_n_points = rd.count(d["n_points"], "distcheck.n_points", 2, 4096);
    }
    if (const auto& s = root["scan"]) {
        rd.only(s, "scan", {"lo", "hi", "grid"});
        if (s["lo"]) c.scan_lo = rd.number(s["lo"], "scan.lo", -1e6, 1e6);
        if (s["hi"]) c.scan_hi = rd.number(s["hi"], "scan.hi", -1e6, 1e6);
        if (s["grid"]) c.scan_grid = rd.count(s["grid"], "scan.grid", 4, 1 << 20);
        if (!(c.scan_hi > c.scan_lo)) rd.fail(s, "scan needs hi > lo");
    }
    if (root["output"]) c.output = rd.get<std::string>(root["output"], "output");
    if (root["seed"]) c.seed = rd.get<std::uint64_t>(root["seed"], "seed");
    if (root["threads"]) c.threads = static_cast<int>(rd.count(root["threads"], "threads", 1, 256));
    // FEM limit fields carry discretization error in their transmission data.
    if (c.quasimode_field == "fem" && !(root["quasimode"] && root["quasimode"]["solvability_tol"]))
        c.quasimode.solvability_tol = 5e-2;
    c.convergence.eps_list = c.eps;
    c.convergence.mesh = c.mesh;
    return c;
}

ExperimentConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError(path + ": cannot open");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path);
}

CurveFrame ExperimentConfig::frame() const
{
    const auto& c = curve;
    ClosedCurve cc = ClosedCurve::circle(c.radius, c.centre);
    if (c.type == "ellipse")
        cc = ClosedCurve::ellipse(c.a, c.b, c.centre);
    else if (c.type == "expression")
        cc = ClosedCurve::from_expressions(c.x1, c.x2, c.period > 0.0 ? c.period : 2.0 * std::numbers::pi);
    else if (c.type == "points")
        cc = ClosedCurve::from_samples(c.points);
    return reparametrize_arclength(cc, c.samples);
}

PotentialProfile ExperimentConfig::potential() const
{
    if (!profile.V_samples.empty()) {
        double period = profile.U_period;
        if (period == 0.0 && !profile.U_samples.empty()) period = frame().length();
        return PotentialProfile::from_samples(profile.V_samples, profile.U_samples, period > 0.0 ? period : 1.0);
    }
    return PotentialProfile::from_expressions(profile.V, profile.U);
}

PlaneFunction ExperimentConfig::confining() const
{
    const auto e = std::make_shared<Expression>(Expression::parse(W, {"x1", "x2", "r"}));
    return [e](double x, double y) { return (*e)({x, y, std::hypot(x, y)}); };
}

RadialBenchmark ExperimentConfig::radial_benchmark() const
{
    if (curve.type != "circle" || curve.centre[0] != 0.0 || curve.centre[1] != 0.0)
        throw ConfigError(source + ": the radial path needs a circle centred at the origin");
    const auto w = confining();
    for (double rho : {0.3, 1.0, 2.2, 4.0})
        for (double t : {0.4, 1.9, 3.7})
            if (std::abs(w(rho * std::cos(t), rho * std::sin(t)) - w(rho, 0.0)) > 1e-10 * (1.0 + std::abs(w(rho, 0.0))))
                throw ConfigError(source + ": the radial path needs a radial W");
    RadialBenchmark b;
    b.radius = curve.radius;
    b.W = [w](double rho) { return w(rho, 0.0); };
    b.rho_max = std::max(8.0, 1.6 * mesh.box);
    return b;
}

}  // namespace curvres
