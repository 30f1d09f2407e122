#include <gtest/gtest.h>

#include <cmath>
#include <memory>

#include "curvres/eigensolve.hpp"
#include "curvres/error.hpp"
#include "curvres/operators.hpp"
#include "curvres/quasimode.hpp"
#include "curvres/radial.hpp"

using namespace curvres;

namespace {

const PlaneFunction oscillator = [](double x, double y) { return x * x + y * y; };

std::shared_ptr<const CurveFrame> circle()
{
    static const auto f = std::make_shared<CurveFrame>(reparametrize_arclength(ClosedCurve::circle(1.0), 256));
    return f;
}

// Sign-flip layer: theta = -1, upsilon = 0 on the unit circle; the limit
// ground state is the Gaussian with its sign flipped outside.
const PotentialProfile& flip() {
    static const auto p = PotentialProfile::from_expressions("-pi^2/4");
    return p;
}

RadialLimitField flip_ground()
{
    const auto o = RadialOracle::limit(RadialBenchmark{}, -1.0, 0.0);
    return RadialLimitField(circle(), o.eigenfunction(0, 2.0), 0);
}

struct Run {
    Quasimode q;
    double delta;
    BracketCheck bracket;
};

Run run(const LimitField& u, double lambda, const PotentialProfile& p, double eps, QuasimodeOptions qo = {})
{
    MeshOptions o;
    o.epsilon = eps;
    const auto mesh = build_mesh(*circle(), o);
    const auto h = assemble_heps(mesh, oscillator, p);
    auto q = build_quasimode(u, lambda, mesh, p, oscillator, qo);
    const double d = quasimode_residual(q, h);
    const auto b = check_quasimode_bracket(q, h, d);
    return {std::move(q), d, b};
}

}  // namespace

TEST(Quasimode, CutoffShape)
{
    const double beta = 0.4;
    EXPECT_EQ(cutoff_zeta(-1e-9, beta), 0.0);
    EXPECT_EQ(cutoff_zeta(0.0, beta), 1.0);
    EXPECT_EQ(cutoff_zeta(0.2, beta), 1.0);
    EXPECT_NEAR(cutoff_zeta(0.3, beta), 0.5, 1e-14);
    EXPECT_EQ(cutoff_zeta(0.4, beta), 0.0);
    double prev = 1.0;
    for (double r = 0.2; r < 0.4; r += 0.01) {
        EXPECT_LE(cutoff_zeta(r, beta), prev);
        prev = cutoff_zeta(r, beta);
    }
    // C2 join at both ends.
    const double h = 1e-4;
    EXPECT_NEAR((cutoff_zeta(0.2 + h, beta) - 1.0) / h, 0.0, 1e-4);
    EXPECT_NEAR(cutoff_zeta(0.4 - h, beta) / h, 0.0, 1e-4);
}

TEST(Quasimode, LayerCorrectorsHaveZeroCauchyData)
{
    const auto r = run(flip_ground(), 2.0, flip(), 0.1);
    EXPECT_TRUE(r.q.resonant);
    EXPECT_LT(r.q.solvability_residual, 1e-6);
    EXPECT_LT(r.q.v1_at_minus_one, 1e-12);
    EXPECT_LT(r.q.v2_cauchy, 1e-12);
}

TEST(Quasimode, ResidualIsOrderEpsilonAndBracketsAnEigenvalue)
{
    const auto u = flip_ground();
    const auto a = run(u, 2.0, flip(), 0.1), b = run(u, 2.0, flip(), 0.05);
    EXPECT_NEAR(a.q.max_jump() / b.q.max_jump(), 2.0, 0.1);
    const double ratio = a.delta / b.delta;
    EXPECT_GT(ratio, 1.6);
    EXPECT_LT(ratio, 2.4);
    for (const auto* r : {&a, &b}) {
        EXPECT_TRUE(r->bracket.holds) << r->q.epsilon;
        EXPECT_LE(r->bracket.distance, r->delta);
    }
}

TEST(Quasimode, WrongEigenvalueRaisesTheResidual)
{
    const auto u = flip_ground();
    const auto r = run(u, 2.0, flip(), 0.05);
    auto q = r.q;
    q.lambda += 5.0;
    MeshOptions o;
    o.epsilon = 0.05;
    const auto mesh = build_mesh(*circle(), o);
    const auto h = assemble_heps(mesh, oscillator, flip());
    // |(A - lambda - 5) v| >= 5 |v| - |(A - lambda) v|
    EXPECT_GE(quasimode_residual(q, h), 5.0 - r.delta - 1e-9);
    EXPECT_GT(quasimode_residual(q, h), r.delta);
}

TEST(Quasimode, ResidualIsHomogeneous)
{
    const auto r = run(flip_ground(), 2.0, flip(), 0.1);
    MeshOptions o;
    o.epsilon = 0.1;
    const auto mesh = build_mesh(*circle(), o);
    const auto h = assemble_heps(mesh, oscillator, flip());
    auto q = r.q;
    q.node_values *= -3.7;
    EXPECT_NEAR(quasimode_residual(q, h), r.delta, 1e-10 * r.delta);
}

TEST(Quasimode, NonResonantLayerStartsAtFirstOrder)
{
    const auto p = PotentialProfile::from_expressions("1");
    const auto o = RadialOracle::dirichlet(RadialBenchmark{}, RadialOracle::Kind::dirichlet_inner);
    const double lam = o.eigenvalue(0, 0);
    const RadialLimitField u(circle(), o.eigenfunction(0, lam), 0);
    const auto a = run(u, lam, p, 0.1), b = run(u, lam, p, 0.05);
    EXPECT_FALSE(a.q.resonant);
    EXPECT_LT(a.q.solvability_residual, 1e-6);
    // Jumps and layer values are O(eps): v0 = 0.
    const double jr = a.q.max_jump() / b.q.max_jump();
    EXPECT_GT(jr, 1.6);
    EXPECT_LT(jr, 3.0);
    const double ratio = a.delta / b.delta;
    EXPECT_GT(ratio, 1.6);
    EXPECT_LT(ratio, 2.6);
    EXPECT_TRUE(a.bracket.holds);
    EXPECT_TRUE(b.bracket.holds);
}

TEST(Quasimode, FieldViolatingTheTransmissionIsRejected)
{
    // Free layer transmits continuously; the sign-flip ground state does not fit.
    MeshOptions o;
    const auto mesh = build_mesh(*circle(), o);
    EXPECT_THROW(build_quasimode(flip_ground(), 2.0, mesh, PotentialProfile::from_expressions("0"), oscillator),
                 SolvabilityError);
    QuasimodeOptions bad;
    bad.beta_fraction = 0.6;
    EXPECT_THROW(build_quasimode(flip_ground(), 2.0, mesh, flip(), oscillator, bad), ConfigError);
}

TEST(Quasimode, FemLimitFieldMatchesRadialField)
{
    MeshOptions o;
    const auto mesh = build_mesh(*circle(), o);
    const auto hb = detect_resonance(flip());
    const auto t = compute_transmission(flip(), hb, circle()->s(), circle()->kappa(), circle()->length());
    const auto lim = assemble_limit(mesh, oscillator, t);
    const auto r = solve_lowest(lim.K, lim.M, 1);
    const FemLimitField uf(mesh, lim.expand(r.vectors.col(0)));
    const auto ur = flip_ground();
    const double sign = uf.traces(0.0).um > 0 ? 1.0 : -1.0;
    for (double s : {0.0, 1.1, 4.0}) {
        const auto a = uf.traces(s), b = ur.traces(s);
        EXPECT_NEAR(sign * a.um, b.um, 2e-3 * std::abs(b.um));
        EXPECT_NEAR(sign * a.up, b.up, 2e-3 * std::abs(b.up));
        EXPECT_NEAR(sign * a.drm, b.drm, 5e-3 * std::abs(b.drm));
        EXPECT_NEAR(sign * a.drp, b.drp, 5e-3 * std::abs(b.drp));
        EXPECT_NEAR(sign * uf.value(s, 0.07), ur.value(s, 0.07), 2e-3 * std::abs(ur.value(s, 0.07)));
    }
    QuasimodeOptions qo;
    qo.solvability_tol = 5e-2;
    const auto q = build_quasimode(uf, r.eigenvalues[0], mesh, flip(), oscillator, qo);
    EXPECT_LT(q.solvability_residual, 1e-3);
}
