#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "curvres/error.hpp"
#include "curvres/numerics.hpp"
#include "curvres/resonance.hpp"

using namespace curvres;
using std::numbers::pi;

TEST(Resonance, ConstantWellIsResonantWithThetaMinusOne)
{
    // h = cos(pi (n+1) / 2): h'(1) = 0, h(1) = -1.
    const auto p = PotentialProfile::from_expressions("-pi^2/4");
    const auto st = detect_resonance(p);
    EXPECT_TRUE(st.resonant);
    EXPECT_NEAR(st.theta, -1.0, 1e-10);
    EXPECT_NEAR(st.h(0.0), std::cos(pi / 2), 1e-10);
}

TEST(Resonance, PositiveBarrierIsNotResonant)
{
    const auto st = detect_resonance(PotentialProfile::from_expressions("1"));
    EXPECT_FALSE(st.resonant);
    EXPECT_NEAR(st.defect, std::sinh(2.0), 1e-10);
}

TEST(Resonance, ZeroPotentialIsResonantWithThetaOne)
{
    const auto st = detect_resonance(PotentialProfile::from_expressions("0"));
    EXPECT_TRUE(st.resonant);
    EXPECT_DOUBLE_EQ(st.theta, 1.0);
}

TEST(Resonance, RejectsNonFinitePotential)
{
    EXPECT_THROW(detect_resonance(PotentialProfile::from_expressions("1/(n-n)")), InputError);
}

TEST(Resonance, CouplingScanFindsNeumannEigenvalues)
{
    // -h'' - alpha h = 0 with Neumann data: alpha = (k pi / 2)^2.
    const auto scan = scan_coupling(PotentialProfile::from_expressions("-1"), -1.0, 12.0, 200);
    ASSERT_EQ(scan.roots.size(), 3u);
    EXPECT_NEAR(scan.roots[0], 0.0, 1e-12);
    EXPECT_NEAR(scan.roots[1], pi * pi / 4, 1e-9);
    EXPECT_NEAR(scan.roots[2], pi * pi, 1e-9);
    EXPECT_FALSE(scan.degenerate);
}

TEST(Resonance, CouplingScanFlagsZeroPotential)
{
    const auto scan = scan_coupling(PotentialProfile::from_expressions("0"), -2.0, 2.0, 11);
    EXPECT_TRUE(scan.degenerate);
}

TEST(Resonance, WronskianAndH1)
{
    const auto p = PotentialProfile::from_expressions("-pi^2/4*(1+0.3*n)", "0");
    // tune coupling to a resonance first
    const auto scan = scan_coupling(p, 0.5, 1.5, 21);
    ASSERT_FALSE(scan.roots.empty());
    const auto q = p.scaled(scan.roots.front());
    const auto st = detect_resonance(q);
    ASSERT_TRUE(st.resonant);
    const auto h1 = solve_h1(q);
    for (std::size_t k = 0; k < h1.n.size(); k += 97) {
        const double w = st.h.value[k] * h1.derivative[k] - st.h.derivative[k] * h1.value[k];
        EXPECT_NEAR(w, 1.0, 1e-9);
    }
    EXPECT_NEAR(h1.derivative.back(), 1.0 / st.theta, 1e-8);
    // int h h' = (theta^2 - 1) / 2
    double acc = 0.0;
    for (std::size_t k = 0; k + 1 < st.h.n.size(); ++k) {
        const double a = st.h.value[k] * st.h.derivative[k], b = st.h.value[k + 1] * st.h.derivative[k + 1];
        acc += 0.5 * (a + b) * st.h.step();
    }
    EXPECT_NEAR(acc, 0.5 * (st.theta * st.theta - 1.0), 1e-5);
}

TEST(Resonance, H2NormalDerivativeMatchesUpsilon)
{
    const auto base = PotentialProfile::from_expressions("-pi^2/4*(1+0.3*n)", "cos(s)*(1-n^2)");
    const auto scan = scan_coupling(base, 0.5, 1.5, 21);
    ASSERT_FALSE(scan.roots.empty());
    const auto q = base.scaled(scan.roots.front());
    const auto st = detect_resonance(q);
    ASSERT_TRUE(st.resonant);
    const std::vector<double> s{0.0, 1.0, 2.5};
    const std::vector<double> kappa{0.7, -0.2, 1.3};
    const auto t = compute_transmission(q, st, s, kappa, 2 * pi);
    const auto h2 = solve_h2(q, st, s, kappa);
    for (std::size_t i = 0; i < s.size(); ++i)
        EXPECT_NEAR(h2.rows[i].derivative.back(), -t.upsilon[i] / st.theta, 1e-8);
    EXPECT_NEAR(t.mu0[0], 4.0 / 3.0, 1e-12);
}

TEST(Resonance, NonResonantTransmissionRefusesUpsilon)
{
    const auto p = PotentialProfile::from_expressions("1", "1");
    const auto st = detect_resonance(p);
    const std::vector<double> s{0.0}, k{1.0};
    const auto t = compute_transmission(p, st, s, k, 1.0);
    EXPECT_THROW(t.upsilon_at(0.0), ContractError);
    EXPECT_THROW(t.mu_at(0.0), ContractError);
    EXPECT_NEAR(t.mu0_at(0.3), 2.0, 1e-12);
}

TEST(Resonance, ReflectionInvertsThetaAndScalesMu)
{
    const auto base = PotentialProfile::from_expressions("-pi^2/4*(1+0.3*n)", "1+n");
    const auto scan = scan_coupling(base, 0.5, 1.5, 21);
    const auto q = base.scaled(scan.roots.front());
    const auto st = detect_resonance(q);
    const auto rq = q.reflected(1.0);
    const auto rst = detect_resonance(rq);
    ASSERT_TRUE(rst.resonant);
    EXPECT_NEAR(rst.theta, 1.0 / st.theta, 1e-9);
    const std::vector<double> s{0.0}, k{0.0};
    const auto t = compute_transmission(q, st, s, k, 1.0);
    const auto rt = compute_transmission(rq, rst, s, k, 1.0);
    EXPECT_NEAR(rt.mu[0], t.mu[0] / (st.theta * st.theta), 1e-9);
}

TEST(Resonance, FirstMomentOfOddProfile)
{
    // -int n sin(pi n) dn = -2/pi
    EXPECT_NEAR(first_moment(PotentialProfile::from_expressions("sin(pi*n)")), -2.0 / pi, 1e-13);
}
