#include <gtest/gtest.h>

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>
#include <vector>

#include "varagg/kernels.hpp"
#include "varagg/risk_vector.hpp"

using namespace varagg;
using M = MarginalDistribution;
using D = DependenceModel;

namespace {

bool bitwise_equal(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

class Kernels : public ::testing::Test {
 protected:
  void SetUp() override { omp_set_num_threads(4); }
};

}  // namespace

TEST_F(Kernels, SampleSumsSerialEqualsParallel) {
  const RiskVector rv({M::pareto2(1, 1), M::frechet(0.5, 1), M::levy(1)}, D::independent());
  const auto s = kernels::sample_sums(rv, 20000, 7, Exec::Serial);
  const auto p = kernels::sample_sums(rv, 20000, 7, Exec::Parallel);
  EXPECT_TRUE(bitwise_equal(s, p));
}

TEST_F(Kernels, SampleSumsPartitionConcatenates) {
  const RiskVector rv({M::pareto2(1, 1), M::pareto2(1, 1)}, D::ordinal_sum());
  const auto full = kernels::sample_sums(rv, 1000, 3, Exec::Serial);
  auto a = kernels::sample_sums(rv, 400, 3, Exec::Parallel, 0);
  const auto b = kernels::sample_sums(rv, 600, 3, Exec::Parallel, 400);
  a.insert(a.end(), b.begin(), b.end());
  EXPECT_TRUE(bitwise_equal(full, a));
}

TEST_F(Kernels, SampleVectorsRowMajor) {
  const RiskVector rv(D::functional(M::pareto2(1, 1), {CatalogMap::Identity, CatalogMap::Reciprocal}));
  const auto s = kernels::sample_vectors(rv, 500, 11, Exec::Serial);
  const auto p = kernels::sample_vectors(rv, 500, 11, Exec::Parallel);
  ASSERT_EQ(s.size(), 1000u);
  EXPECT_TRUE(bitwise_equal(s, p));
  for (std::size_t i = 0; i < 500; ++i) EXPECT_NEAR(s[2 * i] * s[2 * i + 1], 1.0, 1e-12);
}

TEST_F(Kernels, MapGridSerialEqualsParallel) {
  std::vector<double> xs(3001);
  for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = 1e-3 * static_cast<double>(i);
  const M m = M::inverse_gamma(2.5, 1);
  auto f = [&](double x) { return m.cdf(x); };
  EXPECT_TRUE(bitwise_equal(kernels::map_grid(f, xs, Exec::Serial), kernels::map_grid(f, xs, Exec::Parallel)));
}

TEST_F(Kernels, ExceptionsPropagateFromParallelRegion) {
  std::vector<double> xs(100, 1.0);
  xs[57] = -1.0;
  auto f = [](double x) {
    if (x < 0) throw std::runtime_error("bad point");
    return x;
  };
  EXPECT_THROW(kernels::map_grid(f, xs, Exec::Parallel), std::runtime_error);
  EXPECT_THROW(kernels::map_grid(f, xs, Exec::Serial), std::runtime_error);
}

TEST_F(Kernels, KsStatisticMatchesBruteForce) {
  std::vector<double> xs = {0.1, 0.2, 0.2, 0.2, 0.5, 0.7, 0.7, 0.9};
  auto cdf = [](double x) { return std::clamp(x, 0.0, 1.0); };
  // Brute force over both one-sided limits at each sample point.
  double brute = 0.0;
  const double n = static_cast<double>(xs.size());
  for (double x : xs) {
    const double below = static_cast<double>(std::count_if(xs.begin(), xs.end(), [&](double y) { return y < x; }));
    const double at = static_cast<double>(std::count_if(xs.begin(), xs.end(), [&](double y) { return y <= x; }));
    brute = std::max({brute, std::abs(at / n - x), std::abs(below / n - x)});
  }
  EXPECT_DOUBLE_EQ(kernels::ks_statistic(xs, cdf, cdf, Exec::Serial), brute);
  EXPECT_DOUBLE_EQ(kernels::ks_statistic(xs, cdf, cdf, Exec::Parallel), brute);
}

TEST_F(Kernels, KsStatisticStrideSerialEqualsParallel) {
  const RiskVector rv({M::uniform01(), M::uniform01()}, D::independent());
  auto xs = kernels::sample_sums(rv, 50000, 5, Exec::Parallel);
  std::sort(xs.begin(), xs.end());
  auto tri = [](double s) { return s <= 1 ? 0.5 * s * s : 1 - 0.5 * (2 - s) * (2 - s); };
  auto cdf = [&](double s) { return tri(std::clamp(s, 0.0, 2.0)); };
  const double a = kernels::ks_statistic(xs, cdf, cdf, Exec::Serial, 7);
  const double b = kernels::ks_statistic(xs, cdf, cdf, Exec::Parallel, 7);
  EXPECT_EQ(a, b);
  EXPECT_LT(a, std::sqrt(std::log(2e6) / (2 * 50000.0)));
}

TEST_F(Kernels, KsUpperBoundBracketsExactStatistic) {
  const RiskVector rv({M::uniform01(), M::uniform01()}, D::independent());
  auto xs = kernels::sample_sums(rv, 20000, 9, Exec::Parallel);
  std::sort(xs.begin(), xs.end());
  auto tri = [](double s) { return s <= 1 ? 0.5 * s * s : 1 - 0.5 * (2 - s) * (2 - s); };
  auto cdf = [&](double s) { return tri(std::clamp(s, 0.0, 2.0)); };
  const double exact = kernels::ks_statistic(xs, cdf, cdf, Exec::Serial);
  EXPECT_EQ(kernels::ks_upper_bound(xs, cdf, cdf, Exec::Serial, 1), exact);
  for (std::size_t stride : {2u, 13u, 101u}) {
    const double a = kernels::ks_upper_bound(xs, cdf, cdf, Exec::Serial, stride);
    EXPECT_EQ(a, kernels::ks_upper_bound(xs, cdf, cdf, Exec::Parallel, stride));
    EXPECT_GE(a, exact);
    EXPECT_LE(a, exact + 2.0 * static_cast<double>(stride) / 20000.0);
  }
}

TEST_F(Kernels, SearchMaxTiesResolveToSmallestIndex) {
  auto f = [](std::uint64_t i) { return i % 1000 == 17 ? 5.0 : -static_cast<double>(i % 7); };
  const auto s = kernels::search_max(100000, f, Exec::Serial);
  const auto p = kernels::search_max(100000, f, Exec::Parallel);
  EXPECT_EQ(s.index, 17u);
  EXPECT_EQ(p.index, 17u);
  EXPECT_EQ(s.value, 5.0);
}

TEST_F(Kernels, SearchMaxIgnoresNaN) {
  auto f = [](std::uint64_t i) { return i == 3 ? std::nan("") : static_cast<double>(i % 5); };
  const auto p = kernels::search_max(20, f, Exec::Parallel);
  EXPECT_EQ(p.index, 4u);
  EXPECT_EQ(p.value, 4.0);
}
