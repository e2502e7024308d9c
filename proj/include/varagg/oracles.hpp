#pragma once

#include <cstdint>
#include <vector>

#include "varagg/additivity.hpp"
#include "varagg/aggregate.hpp"
#include "varagg/kernels.hpp"
#include "varagg/margins.hpp"
#include "varagg/model_spec.hpp"
#include "varagg/risk_vector.hpp"

namespace varagg {

struct McEstimate {
  // Empirical CDF of S as a step-interpolated tabulated law.
  MarginalDistribution law;
  // DKW half-width at confidence 1 - delta.
  double epsilon;
  double delta;
  std::size_t n;
  std::uint64_t seed;
};

inline constexpr std::size_t kMinMcSamples = 1000;

// Throws DomainError when n < 1000 or when target_epsilon > 0 cannot be reached
// with n draws; the message carries the achievable epsilon.
McEstimate mc_estimate_cdf(const RiskVector& rv, std::size_t n, std::uint64_t seed,
                           double delta = 1e-6, double target_epsilon = 0.0,
                           Exec exec = Exec::Parallel);
McEstimate mc_estimate_cdf(const ModelSpec& spec, std::size_t n, std::uint64_t seed,
                           Exec exec = Exec::Parallel);

using Mass = unsigned __int128;

// Finite law with masses in units of 2^-exponent.
struct ExactTable {
  std::vector<double> values;  // increasing
  std::vector<Mass> cumulative;
  int exponent = 0;

  double cdf(double x) const;
  // inf{x : F(x) >= p}, decided by integer comparison against ceil(p 2^exponent).
  double quantile(double p) const;
};

struct BruteForceResult {
  ExactTable sum;
  std::vector<ExactTable> margins;
  SumDistribution distribution;
  AdditivityReport report;
};

inline constexpr std::size_t kMaxSupport = 1000000;

// Exact enumeration of the joint support of dyadic vectors: mutually exclusive
// coupling, or independent dyadic margins. Throws SizeError beyond 1e6 support
// points and ConfigurationError for other vectors.
BruteForceResult brute_force_discrete(const RiskVector& rv,
                                      const std::vector<double>& p_grid = default_p_grid());

}  // namespace varagg
