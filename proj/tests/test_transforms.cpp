#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "varagg/additivity.hpp"
#include "varagg/errors.hpp"
#include "varagg/numeric.hpp"
#include "varagg/transforms.hpp"

using namespace varagg;
using M = MarginalDistribution;
using D = DependenceModel;

namespace {

const M kPareto = M::pareto2(1, 1);

RiskVector plus_one() {
  return RiskVector(D::functional(kPareto, {CatalogMap::Identity, CatalogMap::ReciprocalOnePlus}));
}
RiskVector triple() {
  return RiskVector(
      D::functional(kPareto, {CatalogMap::Identity, CatalogMap::Identity, CatalogMap::Reciprocal}));
}
RiskVector ordinal() { return RiskVector({kPareto, kPareto}, D::ordinal_sum()); }
RiskVector counter() { return RiskVector({kPareto, kPareto}, D::counter_monotone()); }

}  // namespace

TEST(Transforms, ShiftEquivarianceExact) {
  const auto rv = shift(RiskVector({kPareto, M::levy(1)}, D::independent()), {3.0, -2.0});
  EXPECT_EQ(rv.margins()[0].quantile(0.5), 4.0);
  EXPECT_EQ(rv.margins()[0].lower_endpoint(), 3.0);
  EXPECT_EQ(rv.margins()[1].lower_endpoint(), -2.0);
  EXPECT_EQ(rv.margins()[0].cdf(3.0), 0.0);
  for (const auto& base : {plus_one(), triple(), ordinal(), counter()}) {
    std::vector<double> a(base.dimension(), 1.25);
    const auto sd = build_sum_distribution(base);
    const auto sa = build_sum_distribution(shift(base, a));
    for (double p : default_p_grid(101)) {
      EXPECT_NEAR(sa.quantile(p), sd.quantile(p) + 1.25 * a.size(), 1e-12 * (1 + sa.quantile(p)));
    }
  }
}

TEST(Transforms, ZeroShiftIsIdentity) {
  const auto rv = shift(plus_one(), {0.0, 0.0});
  const auto sd0 = build_sum_distribution(plus_one());
  const auto sd = build_sum_distribution(rv);
  for (double p : {0.1, 0.5, 0.9}) EXPECT_EQ(sd.quantile(p), sd0.quantile(p));
}

TEST(Transforms, ReflectEquivariance) {
  const auto rv = reflect(RiskVector({kPareto}, D::independent()), {10.0});
  EXPECT_NEAR(rv.margins()[0].quantile(0.75), 10 - 1.0 / 3.0, 1e-14);
  EXPECT_EQ(rv.margins()[0].upper_endpoint(), 10.0);
  EXPECT_EQ(rv.margins()[0].ddf(10.0), 0.0);
  for (double p : {0.01, 0.3, 0.99}) {
    EXPECT_NEAR(rv.margins()[0].quantile(p), 10 - kPareto.quantile(1 - p), 1e-12 * (10 + kPareto.quantile(1 - p)));
  }
}

TEST(Transforms, ReflectOfDiscreteUsesLeftQuantileDirectly) {
  const auto rv = reflect(RiskVector({M::dyadic(10)}, D::independent()), {100.0});
  const M& m = rv.margins()[0];
  // P(X = 0) = 1/2, so P(100 - X <= 100) = 1 and P(100 - X < 100) = 1/2.
  EXPECT_EQ(m.quantile(0.6), 100.0);
  EXPECT_EQ(m.quantile(0.5), 98.0);
  // Check against a direct scan of the reflected cdf.
  for (double p : {0.1, 0.3, 0.5, 0.55, 0.9}) {
    const double q = m.quantile(p);
    EXPECT_GE(m.cdf(q), p);
    EXPECT_LT(m.cdf(std::nextafter(q, -kInf)), p);
  }
}

TEST(Transforms, ReflectSignFlipOfGap) {
  for (const auto& base : {plus_one(), triple(), counter(), RiskVector(D::bivariate_pareto(1.0))}) {
    const std::vector<double> b(base.dimension(), 50.0);
    const auto rb = reflect(base, b);
    const auto grid = default_p_grid(401);
    const auto g0 = scan(base, build_sum_distribution(base), grid);
    const auto g1 = scan(rb, build_sum_distribution(rb), grid);
    for (std::size_t i = 0; i <= grid.size() / 2; ++i) {
      const std::size_t j = grid.size() - 1 - i;
      ASSERT_EQ(grid[j], 1 - grid[i]);
      EXPECT_NEAR(g1.gap[i], -g0.gap[j], 1e-9 * (1 + std::abs(g1.var_sum[i])));
      EXPECT_NEAR(g1.gap[j], -g0.gap[i], 1e-9 * (1 + std::abs(g1.var_sum[j])));
    }
  }
}

TEST(Transforms, ReflectedSuperAdditiveBecomesSubAdditive) {
  const auto base = triple();
  const auto rb = reflect(base, {100, 100, 100});
  const auto r = scan(rb, build_sum_distribution(rb));
  EXPECT_EQ(r.overall, Overall::SubAdditiveEverywhere);
}

TEST(Transforms, OrdinalSignFlipUsesRightQuantileOnTheFlat) {
  const auto base = ordinal();
  const auto sd = build_sum_distribution(base);
  const auto rb = reflect(base, {50, 50});
  const auto sb = build_sum_distribution(rb);
  // F_S is flat at 1/2 on [1, 6]: the reflection picks up the right end.
  EXPECT_NEAR(sb.quantile(0.5), 100 - sd.quantile_right(0.5), 1e-9);
  EXPECT_NEAR(sb.quantile(0.5), 94.0, 1e-9);
  for (double p : {0.1, 0.3, 0.7, 0.9}) {
    EXPECT_NEAR(sb.quantile(p), 100 - sd.quantile(1 - p), 1e-9 * 100);
  }
}

TEST(Transforms, ShiftedAndReflectedNsd) {
  const auto tri = triple();
  const auto ta = shift(tri, {1, 2, 3});
  EXPECT_TRUE(check_shifted_nsd(ta, build_sum_distribution(ta)).holds());
  const auto ord = ordinal();
  const auto oa = shift(ord, {5, 5});
  const auto v = check_shifted_nsd(oa, build_sum_distribution(oa));
  ASSERT_EQ(v.outcome, Outcome::FailsWithWitness);
  EXPECT_NEAR(v.witness[0], 1.0, 1e-3);

  const auto cb = reflect(counter(), {100, 100});
  EXPECT_TRUE(check_reflected_nsd(cb, build_sum_distribution(cb)).holds());
  const auto bp = reflect(RiskVector(D::bivariate_pareto(0.5)), {100, 100});
  EXPECT_EQ(check_reflected_nsd(bp, build_sum_distribution(bp)).outcome, Outcome::FailsWithWitness);
  EXPECT_THROW(check_reflected_nsd(ta, build_sum_distribution(ta)), ConfigurationError);
}

TEST(Transforms, PhiReductions) {
  const M ma = kPareto.with_shift(5.0);
  EXPECT_NEAR(shifted_phi(ma, 5.0, 1.0), std::log(0.5), 1e-15);
  const auto rb = reflect(RiskVector({kPareto}, D::independent()), {7.0});
  EXPECT_NEAR(reflected_phi(rb.margins()[0], 7.0, 1.0), std::log(0.5), 1e-15);
  EXPECT_EQ(shifted_phi(ma, 5.0, 0.0), 0.0);
  EXPECT_EQ(reflected_phi(rb.margins()[0], 7.0, 0.0), 0.0);
  for (double x = 1e-3; x < 1e6; x *= 1.7) {
    const double base = phi_eval(kPareto, x);
    EXPECT_NEAR(shifted_phi(ma, 5.0, x), base, 1e-12 * std::abs(base));
    EXPECT_NEAR(reflected_phi(rb.margins()[0], 7.0, x), base, 1e-9 * std::abs(base));
  }
}

TEST(Transforms, ConvexSquareOnTripleStaysSuperAdditive) {
  const auto rv = convex_transform(triple(), TransformSpec::power(2.0));
  const auto sd = build_sum_distribution(rv);
  EXPECT_EQ(sd.method(), SumMethod::FunctionalReduction);
  const auto r = scan(rv, sd);
  EXPECT_EQ(r.overall, Overall::SuperAdditiveEverywhere);
  const auto mc = monte_carlo_sum(rv, 1000000, 5);
  const auto rm = scan(rv, mc, default_p_grid(401));
  EXPECT_EQ(rm.count(GapClass::Sub), 0u);
  // Exact law of X^2 + X^2 + X^-2 against the sample.
  const double eps = mc.dkw_epsilon();
  for (double s : {3.0, 5.0, 20.0, 1e3}) EXPECT_NEAR(sd.cdf(s), mc.cdf(s), eps);
}

TEST(Transforms, IdentityPowerLeavesVectorUnchanged) {
  const auto base = triple();
  const auto rv = convex_transform(base, TransformSpec::power(1.0));
  const auto s0 = build_sum_distribution(base);
  const auto s1 = build_sum_distribution(rv);
  for (double p : {0.1, 0.5, 0.9}) EXPECT_NEAR(s1.quantile(p), s0.quantile(p), 1e-10 * s0.quantile(p));
  for (double x : {0.5, 2.0}) EXPECT_EQ(rv.margins()[0].cdf(x), base.margins()[0].cdf(x));
}

TEST(Transforms, ConvexMapPropertiesAndPhi) {
  const auto rv = convex_transform(RiskVector({kPareto, kPareto}, D::independent()), TransformSpec::expm1());
  const M& m = rv.margins()[0];
  EXPECT_EQ(phi_scan(m).outcome, Outcome::NumericallyHolds);
  const MonotoneMap xi = MonotoneMap::expm1(0.0);
  EXPECT_EQ(xi.apply(0.0), 0.0);
  // Secant slopes from the fixed point are non-decreasing.
  for (double x = 0.01; x < 50; x *= 1.3) {
    EXPECT_LE(xi.apply(x) / x, xi.apply(1.3 * x) / (1.3 * x));
  }
  const MonotoneMap sq = MonotoneMap::power(2.5, 1.0);
  for (double x = 1.01; x < 50; x *= 1.3) {
    EXPECT_LE((sq.apply(x) - 1) / (x - 1), (sq.apply(1.3 * x) - 1) / (1.3 * x - 1));
  }
}

TEST(Transforms, ConvexTransformErrors) {
  EXPECT_THROW(convex_transform(triple(), TransformSpec::power(0.5)), ConfigurationError);
  const auto refl = reflect(counter(), {10, 10});
  EXPECT_THROW(convex_transform(refl, TransformSpec::power(2)), ConfigurationError);
  auto spec = TransformSpec::power(2);
  spec.anchors = {1.0, 0.0};
  EXPECT_THROW(convex_transform(counter(), spec), ConfigurationError);
  EXPECT_THROW(shift(counter(), {1.0}), ConfigurationError);
}

TEST(Transforms, CompactSupportHasNoStrictOneSidedRegime) {
  const M u = M::uniform01();
  const auto co = RiskVector({u, u}, D::comonotone());
  EXPECT_EQ(scan(co, build_sum_distribution(co)).overall, Overall::AdditiveEverywhere);
  for (const auto& rv : {RiskVector({u, u}, D::counter_monotone()), RiskVector({u, u}, D::independent()),
                         RiskVector({u, u}, D::ordinal_sum()),
                         RiskVector({u, M::tabulated({0, 0.5, 2}, {0, 0.8, 1})}, D::counter_monotone())}) {
    const auto r = scan(rv, build_sum_distribution(rv));
    EXPECT_EQ(r.overall, Overall::Mixed) << rv.describe();
  }
}
