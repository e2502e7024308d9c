#include <gtest/gtest.h>

#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <vector>

#include "varagg/errors.hpp"
#include "varagg/margins.hpp"
#include "varagg/numeric.hpp"

using varagg::MarginalDistribution;
using varagg::MonotoneMap;
using M = MarginalDistribution;

namespace {

std::vector<M> continuous_catalog() {
  return {M::pareto2(1, 1),       M::pareto2(2.5, 3),    M::frechet(0.5, 1),
          M::frechet(2, 0.7),     M::levy(2),            M::beta_prime1(2),
          M::beta_prime1(0.3),    M::log_hazard(0.5),    M::log_hazard(0.0),
          M::log_hazard(-0.5),    M::log_cauchy(1.0),    M::log_cauchy(0.4),
          M::inverse_gamma(1, 1), M::inverse_gamma(2.5, 0.5), M::uniform01(),
          M::pw_frechet()};
}

std::vector<double> p_grid() {
  std::vector<double> ps;
  for (int i = 1; i < 400; ++i) ps.push_back(i / 400.0);
  for (double p : {1e-4, 1e-3, 0.999, 0.9999}) ps.push_back(p);
  return ps;
}

}  // namespace

TEST(Margins, SpecExamples) {
  EXPECT_EQ(M::pareto2(1, 1).cdf(1.0), 0.5);
  EXPECT_NEAR(M::inverse_gamma(1, 1).cdf(1.0), std::exp(-1.0), 1e-15);
  EXPECT_EQ(M::pareto2(1, 1).quantile(0.5), 1.0);
  EXPECT_NEAR(M::frechet(0.5, 1).quantile(std::exp(-1.0)), 1.0, 1e-15);
  EXPECT_EQ(M::dyadic().quantile(0.6), 2.0);
  for (const auto& m : continuous_catalog()) {
    EXPECT_EQ(m.cdf(m.lower_endpoint() - 1.0), 0.0) << m.describe();
  }
}

TEST(Margins, ClosedFormsAgainstIndependentFormulas) {
  const double xs[] = {1e-3, 0.2, 1.0, 3.5, 40.0, 1e5};
  for (double x : xs) {
    EXPECT_NEAR(M::pareto2(2.5, 3).cdf(x), 1 - std::pow(3 / (3 + x), 2.5), 1e-14);
    EXPECT_NEAR(M::frechet(2, 0.7).cdf(x), std::exp(-std::pow(x / 0.7, -2)), 1e-14);
    EXPECT_NEAR(M::levy(2).cdf(x), static_cast<double>(boost::math::erfc(std::sqrt(1.0 / x))),
                1e-14);
    EXPECT_NEAR(M::beta_prime1(2).cdf(x), std::pow(x / (1 + x), 2), 1e-14);
    EXPECT_NEAR(M::log_hazard(0.5).cdf(x), std::exp(-std::sqrt(std::log(1 + x)) / x), 1e-14);
    EXPECT_NEAR(M::log_cauchy(0.4).cdf(x), 0.5 + std::atan(0.4 * std::log(x)) / M_PI, 1e-14);
    EXPECT_NEAR(M::inverse_gamma(2.5, 0.5).cdf(x), boost::math::gamma_q(2.5, 0.5 / x), 1e-14);
  }
  EXPECT_NEAR(M::pw_frechet().cdf(0.5), 0.25 / std::exp(1.0), 1e-16);
  EXPECT_NEAR(M::pw_frechet().cdf(4.0), std::exp(-0.5), 1e-16);
}

TEST(Margins, DdfComplementsCdf) {
  for (const auto& m : continuous_catalog()) {
    for (double x = 1e-4; x < 1e6; x *= 1.3) {
      EXPECT_NEAR(m.ddf(x), 1.0 - m.cdf(x), 1e-14) << m.describe() << " x=" << x;
    }
  }
}

TEST(Margins, CdfMonotoneWithLimits) {
  for (const auto& m : continuous_catalog()) {
    double prev = 0.0;
    for (double x = 1e-8; x < 1e12; x *= 1.1) {
      const double F = m.cdf(x);
      EXPECT_GE(F, prev) << m.describe() << " x=" << x;
      prev = F;
    }
    // Log-Cauchy tails decay like 1/log x and do not reach 1e-6 inside the double range.
    const double slack = m.family() == varagg::Family::LogCauchy ? 2e-3 : 1e-6;
    EXPECT_GT(m.cdf(1e300), 1.0 - slack) << m.describe();
    EXPECT_LT(m.cdf(1e-300), slack) << m.describe();
  }
}

TEST(Margins, QuantileRoundTripContinuous) {
  for (const auto& m : continuous_catalog()) {
    for (double p : p_grid()) {
      const double q = m.quantile(p);
      // Extreme Log-Cauchy quantiles (exp(+-7958) at alpha=0.4) are not representable.
      if (q == 0.0 || std::isinf(q)) {
        EXPECT_EQ(m.family(), varagg::Family::LogCauchy);
        continue;
      }
      EXPECT_NEAR(m.cdf(q), p, 1e-9) << m.describe() << " p=" << p;
    }
  }
}

TEST(Margins, ClosedFormQuantilesMatchBisection) {
  for (const auto& m : continuous_catalog()) {
    if (!m.has_closed_form_quantile()) continue;
    for (double p : p_grid()) {
      const double bis = varagg::bisect_left_quantile([&](double x) { return m.cdf(x); }, p,
                                                      m.lower_endpoint());
      if (std::isinf(bis) || bis == 0.0) continue;
      EXPECT_NEAR(m.quantile(p), bis, 1e-9 * (1 + std::fabs(bis))) << m.describe() << " p=" << p;
    }
  }
}

TEST(Margins, PiecewiseFrechetPowerQuantileBranches) {
  const M m = M::pw_frechet();
  EXPECT_NEAR(m.quantile(0.1), std::sqrt(std::exp(1.0) * 0.1), 1e-15);
  EXPECT_NEAR(m.quantile(0.8), 1.0 / std::pow(std::log(1 / 0.8), 2), 1e-12);
  EXPECT_NEAR(m.quantile(1.0 / std::exp(1.0)), 1.0, 1e-15);
}

TEST(Margins, LogHazardRange) {
  EXPECT_THROW(M::log_hazard(1.0), varagg::DomainError);
  EXPECT_THROW(M::log_hazard(2.0), varagg::DomainError);
  EXPECT_NO_THROW(M::log_hazard(-3.0));
  EXPECT_EQ(M::log_hazard(0.5).cdf(0.0), 0.0);
  EXPECT_LT(M::log_hazard(0.5).cdf(1e-300), 1e-100);
}

TEST(Margins, DyadicLeftInverseExact) {
  const M d = M::dyadic(60);
  EXPECT_EQ(d.cdf(-0.5), 0.0);
  EXPECT_EQ(d.cdf(0.0), 0.5);
  EXPECT_EQ(d.cdf(1.99), 0.5);
  EXPECT_EQ(d.cdf(2.0), 0.75);
  EXPECT_EQ(d.cdf(5.0), 0.875);
  EXPECT_EQ(d.cdf_left(2.0), 0.5);
  EXPECT_EQ(d.quantile(0.5), 0.0);
  for (int k = 1; k < 50; ++k) {
    const double atom = std::ldexp(1.0, k);
    const double F = d.cdf(atom);
    EXPECT_EQ(F, 1.0 - std::ldexp(1.0, -(k + 1)));
    EXPECT_EQ(d.quantile(F), atom);
    EXPECT_GE(d.cdf(d.quantile(F)), F);
    EXPECT_GT(d.quantile(std::nextafter(F, 1.0)), atom);
    // p strictly inside the band (1-2^-k, 1-2^-(k+1)]
    const double p = 1.0 - 0.75 * std::ldexp(1.0, -k);
    EXPECT_EQ(d.quantile(p), atom);
  }
  EXPECT_FALSE(d.is_continuous());
  EXPECT_FALSE(d.density(3.0).has_value());
}

TEST(Margins, TabulatedLinearAndStep) {
  const M lin = M::tabulated({0, 1, 2, 4}, {0, 0.5, 0.5, 1});
  EXPECT_EQ(lin.cdf(0.5), 0.25);
  EXPECT_EQ(lin.cdf(1.5), 0.5);
  EXPECT_EQ(lin.quantile(0.25), 0.5);
  EXPECT_EQ(lin.quantile(0.5), 1.0);
  EXPECT_EQ(lin.quantile_right(0.5), 2.0);
  EXPECT_EQ(lin.quantile(0.75), 3.0);
  EXPECT_TRUE(lin.is_continuous());

  const M st = M::tabulated({1, 2, 3}, {0.2, 0.7, 1.0}, varagg::Interpolation::Step);
  EXPECT_EQ(st.cdf(0.99), 0.0);
  EXPECT_EQ(st.cdf(1.0), 0.2);
  EXPECT_EQ(st.cdf(2.5), 0.7);
  EXPECT_EQ(st.cdf_left(2.0), 0.2);
  EXPECT_EQ(st.quantile(0.2), 1.0);
  EXPECT_EQ(st.quantile(0.2000001), 2.0);
  EXPECT_EQ(st.quantile_right(0.2), 2.0);
  EXPECT_THROW(M::tabulated({0, 1}, {0, 0.9}), varagg::ConfigurationError);
  EXPECT_THROW(M::tabulated({1, 0}, {0, 1}), varagg::ConfigurationError);
}

TEST(Margins, ShiftIsExactLocation) {
  const M base = M::pareto2(1, 1);
  const M sh = base.with_shift(3.0);
  EXPECT_EQ(sh.quantile(0.5), 4.0);
  EXPECT_EQ(sh.lower_endpoint(), 3.0);
  EXPECT_EQ(sh.cdf(4.0), 0.5);
  EXPECT_EQ(sh.cdf(2.9), 0.0);
}

TEST(Margins, MappedReciprocalOfParetoIsPareto) {
  // 1/X has the same law as X for X ~ ParetoII(1,1).
  const M x = M::pareto2(1, 1);
  const M inv = M::mapped(MonotoneMap::reciprocal(), x);
  for (double t = 1e-3; t < 1e3; t *= 1.7) EXPECT_NEAR(inv.cdf(t), x.cdf(t), 1e-15);
  for (double p : p_grid()) EXPECT_NEAR(inv.quantile(p), x.quantile(p), 1e-12 * (1 + x.quantile(p)));
  EXPECT_EQ(inv.lower_endpoint(), 0.0);
  EXPECT_TRUE(std::isinf(inv.upper_endpoint()));
}

TEST(Margins, MappedReciprocalOnePlusOfParetoIsUniform) {
  const M y = M::mapped(MonotoneMap::reciprocal_one_plus(), M::pareto2(1, 1));
  for (double p : p_grid()) EXPECT_NEAR(y.quantile(p), p, 1e-15);
  EXPECT_NEAR(y.cdf(0.3), 0.3, 1e-15);
  EXPECT_EQ(y.cdf(-0.1), 0.0);
  EXPECT_EQ(y.cdf(1.5), 1.0);
  EXPECT_EQ(y.upper_endpoint(), 1.0);
}

TEST(Margins, ReflectUsesRightQuantile) {
  const M x = M::pareto2(1, 1);
  const M r = M::mapped(MonotoneMap::reflect(10.0), x);
  EXPECT_NEAR(r.quantile(0.75), 10.0 - 1.0 / 3.0, 1e-14);
  EXPECT_EQ(r.upper_endpoint(), 10.0);

  // Discrete: left-quantile of the reflected CDF computed directly.
  const M d = M::dyadic(20);
  const M rd = M::mapped(MonotoneMap::reflect(100.0), d);
  for (double p : {0.1, 0.25, 0.3, 0.5, 0.6, 0.75, 0.9}) {
    const double direct = varagg::bisect_left_quantile([&](double v) { return rd.cdf(v); }, p,
                                                       rd.lower_endpoint());
    EXPECT_NEAR(rd.quantile(p), direct, 1e-9) << p;
    EXPECT_GE(rd.cdf(rd.quantile(p)), p);
  }
}

TEST(Margins, ConvexMapsPushForward) {
  const M x = M::pareto2(1, 1);
  const M sq = M::mapped(MonotoneMap::power(2.0, 0.0), x);
  const M ex = M::mapped(MonotoneMap::expm1(0.0), x);
  for (double p : p_grid()) {
    const double q = x.quantile(p);
    EXPECT_NEAR(sq.quantile(p), q * q, 1e-12 * (1 + q * q));
    if (q < 700.0) EXPECT_NEAR(ex.cdf(std::expm1(q)), p, 1e-12);
  }
  EXPECT_THROW(M::mapped(MonotoneMap::power(0.5, 0.0), x), varagg::ConfigurationError);
  EXPECT_THROW(M::mapped(MonotoneMap::power(2.0, 1.0), x), varagg::ConfigurationError);
}

TEST(Margins, DensityMatchesCdfDerivative) {
  for (const auto& m : continuous_catalog()) {
    for (double x : {0.05, 0.3, 0.9, 1.7, 6.0, 50.0}) {
      if (x >= m.upper_endpoint()) continue;
      const double h = 1e-6 * x;
      const double fd = (m.cdf(x + h) - m.cdf(x - h)) / (2 * h);
      const auto f = m.density(x);
      ASSERT_TRUE(f.has_value());
      EXPECT_NEAR(*f, fd, 1e-5 * (1 + fd)) << m.describe() << " x=" << x;
    }
  }
}

TEST(Margins, DomainErrors) {
  EXPECT_THROW(M::pareto2(1, 1).quantile(0.0), varagg::DomainError);
  EXPECT_THROW(M::pareto2(1, 1).quantile(1.0), varagg::DomainError);
  EXPECT_THROW(M::pareto2(-1, 1), varagg::DomainError);
  EXPECT_THROW(M::levy(0), varagg::DomainError);
}
