#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include <json.hpp>

#include "curvres/convergence.hpp"
#include "curvres/error.hpp"

using namespace curvres;

namespace {

const PlaneFunction oscillator = [](double x, double y) { return x * x + y * y; };

const CurveFrame& circle()
{
    static const CurveFrame f = reparametrize_arclength(ClosedCurve::circle(1.0), 256);
    return f;
}

}  // namespace

TEST(Convergence, RadialResonantRateIsFirstOrder)
{
    const auto rep = run_radial_convergence(RadialBenchmark{}, PotentialProfile::from_expressions("-pi^2/4"),
                                            ConvergenceOptions{});
    EXPECT_TRUE(rep.resonant);
    EXPECT_EQ(rep.limit, "transmission");
    ASSERT_EQ(rep.fits.size(), 3u);
    const double want[] = {2.0, 4.0, 4.0};
    for (const auto& f : rep.fits) {
        EXPECT_NEAR(f.lambda_limit, want[f.index], 1e-7);
        EXPECT_GE(f.p, 0.9);
        EXPECT_LE(f.p, 1.3);
        EXPECT_EQ(f.points, 4u);
    }
    // lambda_eps approaches from above for the sign-flip layer.
    for (const auto& r : rep.rows) EXPECT_GT(r.gap, 0.0);
}

TEST(Convergence, RadialNonResonantApproachesTheDirichletSplit)
{
    const auto rep =
        run_radial_convergence(RadialBenchmark{}, PotentialProfile::from_expressions("1"), ConvergenceOptions{});
    EXPECT_FALSE(rep.resonant);
    EXPECT_EQ(rep.limit, "dirichlet-split");
    // (1 - rho^2) exp(-rho^2 / 2) vanishes on the circle: 6 is an eigenvalue of both sides.
    ASSERT_EQ(rep.fits.size(), 3u);
    EXPECT_NEAR(rep.fits[0].lambda_limit, 6.0, 1e-7);
    EXPECT_NEAR(rep.fits[1].lambda_limit, 6.0, 1e-7);
    EXPECT_GE(rep.min_order(), 0.9);
}

TEST(Convergence, ZeroProfileSitsAtTheNoiseFloor)
{
    const auto rep =
        run_radial_convergence(RadialBenchmark{}, PotentialProfile::from_expressions("0"), ConvergenceOptions{});
    for (const auto& r : rep.rows) EXPECT_LT(std::abs(r.gap), 1e-7);
}

TEST(Convergence, FemPathAgreesWithRadialPath)
{
    ConvergenceOptions o;
    o.eps_list = {0.2, 0.1};
    o.mesh.n_s = 64;
    o.extra = 8;
    const auto p = PotentialProfile::from_expressions("-pi^2/4");
    const auto fem = run_convergence(circle(), oscillator, p, o);
    const auto rad = run_radial_convergence(RadialBenchmark{}, p, o);
    ASSERT_EQ(fem.rows.size(), rad.rows.size());
    for (std::size_t i = 0; i < fem.rows.size(); ++i) {
        EXPECT_TRUE(fem.rows[i].tracked);
        EXPECT_GT(fem.rows[i].overlap, 0.9);
        EXPECT_NEAR(fem.rows[i].gap, rad.rows[i].gap, 0.1 * rad.rows[i].gap) << i;
    }
}

TEST(Convergence, ReportsExport)
{
    ConvergenceOptions o;
    o.eps_list = {0.1, 0.05};
    o.track = 2;
    const auto rep = run_radial_convergence(RadialBenchmark{}, PotentialProfile::from_expressions("-pi^2/4"), o);
    std::ostringstream csv;
    rep.write_csv(csv);
    std::istringstream in(csv.str());
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "eps,lambda_eps,lambda_limit,gap,overlap,index,tracked");
    int n = 0;
    while (std::getline(in, line)) ++n;
    EXPECT_EQ(n, 4);
    const auto j = nlohmann::json::parse(rep.summary_json());
    EXPECT_EQ(j["fits"].size(), 2u);
    EXPECT_NEAR(j["fits"][0]["p"].get<double>(), rep.fits[0].p, 1e-12);
}

TEST(Convergence, RateFitRecoversPowerLaw)
{
    std::vector<ConvergenceRow> rows;
    for (double eps : {0.2, 0.1, 0.05}) {
        ConvergenceRow r;
        r.eps = eps;
        r.gap = -3.0 * eps * eps;
        rows.push_back(r);
    }
    rows[1].tracked = false;
    const auto f = fit_rates(rows);
    ASSERT_EQ(f.size(), 1u);
    EXPECT_NEAR(f[0].p, 2.0, 1e-12);
    EXPECT_NEAR(f[0].c, 3.0, 1e-12);
    EXPECT_EQ(f[0].points, 2u);
}

TEST(Convergence, RejectsBadSchedules)
{
    ConvergenceOptions o;
    o.eps_list = {0.05, 0.1};
    const auto p = PotentialProfile::from_expressions("1");
    EXPECT_THROW(run_radial_convergence(RadialBenchmark{}, p, o), ConfigError);
    o.eps_list = {0.6};
    EXPECT_THROW(run_convergence(circle(), oscillator, p, o), ConfigError);
    o.eps_list = {};
    EXPECT_THROW(run_radial_convergence(RadialBenchmark{}, p, o), ConfigError);
}
