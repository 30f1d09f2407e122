#include <gtest/gtest.h>

#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <numbers>

#include "curvres/error.hpp"
#include "curvres/radial.hpp"

using namespace curvres;
using std::numbers::pi;

TEST(Radial, SignFlipLimitIsTheHarmonicOscillator)
{
    // theta = -1, upsilon = 0: g = u / theta solves the free problem.
    const auto o = RadialOracle::limit(RadialBenchmark{}, -1.0, 0.0);
    const auto v = o.lowest(6);
    const double want[] = {2, 4, 4, 6, 6, 6};
    for (int i = 0; i < 6; ++i) EXPECT_NEAR(v[i], want[i], 1e-8) << i;
}

TEST(Radial, CountIsConsistentWithEigenvalues)
{
    const auto o = RadialOracle::limit(RadialBenchmark{}, 0.7, -0.4);
    for (int m = 0; m < 3; ++m)
        for (int j = 0; j < 3; ++j) {
            const double l = o.eigenvalue(m, j);
            EXPECT_EQ(o.count_below(m, l - 1e-6), j);
            EXPECT_EQ(o.count_below(m, l + 1e-6), j + 1);
        }
}

TEST(Radial, DirichletDiskIsBesselZero)
{
    RadialBenchmark b;
    b.W = [](double) { return 0.0; };
    const auto in = RadialOracle::dirichlet(b, RadialOracle::Kind::dirichlet_inner);
    EXPECT_NEAR(in.eigenvalue(0, 0), std::pow(boost::math::cyl_bessel_j_zero(0.0, 1), 2), 1e-8);
    EXPECT_NEAR(in.eigenvalue(1, 0), std::pow(boost::math::cyl_bessel_j_zero(1.0, 1), 2), 1e-8);
    // The split problem contains both sides.
    const auto split = RadialOracle::dirichlet(b);
    const auto out = RadialOracle::dirichlet(b, RadialOracle::Kind::dirichlet_outer);
    const double lam = 30.0;
    EXPECT_EQ(split.count_below(0, lam), in.count_below(0, lam) + out.count_below(0, lam));
}

TEST(Radial, DeltaInteractionMatchesBesselDeterminant)
{
    // W = 0 in the disk of radius 8, u continuous, u'+ - u'- = a u at rho = 1.
    RadialBenchmark b;
    b.W = [](double) { return 0.0; };
    const double a = 1.5;
    const auto o = RadialOracle::limit(b, 1.0, a);
    using boost::math::cyl_bessel_j;
    using boost::math::cyl_neumann;
    auto det = [&](double k) {
        const double B = cyl_neumann(0, 8 * k), C = -cyl_bessel_j(0, 8 * k);
        const double j = cyl_bessel_j(0, k), dj = -k * cyl_bessel_j(1, k);
        const double outer = B * j + C * cyl_neumann(0, k);
        const double douter = -k * (B * cyl_bessel_j(1, k) + C * cyl_neumann(1, k));
        return outer * (dj + a * j) - j * douter;
    };
    for (int jj = 0; jj < 3; ++jj) {
        const double lam = o.eigenvalue(0, jj);
        const double k = std::sqrt(lam);
        boost::uintmax_t it = 100;
        const auto r = boost::math::tools::toms748_solve(det, k * (1 - 1e-3), k * (1 + 1e-3),
                                                         boost::math::tools::eps_tolerance<double>(50), it);
        EXPECT_NEAR(lam, std::pow(0.5 * (r.first + r.second), 2), 1e-7 * lam) << jj;
    }
}

TEST(Radial, FreeLayerReducesToOscillator)
{
    const auto o = RadialOracle::heps(RadialBenchmark{}, PotentialProfile::from_expressions("0"), 0.05);
    EXPECT_NEAR(o.eigenvalue(0, 0), 2.0, 1e-8);
    EXPECT_NEAR(o.eigenvalue(1, 0), 4.0, 1e-8);
}

TEST(Radial, ThinBarrierApproachesDeltaInteraction)
{
    // U = c / eps on the layer integrates to a delta of strength 2c.
    const double c = 0.75;
    const auto lim = RadialOracle::limit(RadialBenchmark{}, 1.0, 2 * c);
    const double want = lim.eigenvalue(0, 0);
    double prev = 1e9;
    for (double eps : {0.02, 0.01, 0.005}) {
        const auto o = RadialOracle::heps(RadialBenchmark{}, PotentialProfile::from_expressions("0", "0.75"), eps);
        const double err = std::abs(o.eigenvalue(0, 0) - want);
        EXPECT_LT(err, prev);
        prev = err;
    }
    EXPECT_LT(prev, 5e-3);
}

TEST(Radial, EigenfunctionOfSignFlipIsGaussian)
{
    const auto o = RadialOracle::limit(RadialBenchmark{}, -1.0, 0.0);
    const auto f = o.eigenfunction(0, o.eigenvalue(0, 0));
    const double c = 1.0 / std::sqrt(pi);
    EXPECT_NEAR(f.value(0.5), c * std::exp(-0.125), 1e-6);
    EXPECT_NEAR(f.value(1.5), -c * std::exp(-1.125), 1e-6);
    EXPECT_NEAR(f.value(1.0, -1), c * std::exp(-0.5), 1e-6);
    EXPECT_NEAR(f.value(1.0, +1), -c * std::exp(-0.5), 1e-6);
    EXPECT_NEAR(f.derivative(0.5), -0.5 * c * std::exp(-0.125), 1e-6);
}

TEST(Radial, RejectsBadInput)
{
    EXPECT_THROW(RadialOracle::limit(RadialBenchmark{}, 0.0, 1.0), UnsupportedModelError);
    EXPECT_THROW(RadialOracle::heps(RadialBenchmark{}, PotentialProfile::from_expressions("0"), 0.8), ConfigError);
    EXPECT_THROW(RadialOracle::limit(RadialBenchmark{}, 1.0, 0.0).count_below(-1, 0.0), ContractError);
}
