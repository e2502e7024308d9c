#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "varagg/aggregate.hpp"
#include "varagg/driver.hpp"
#include "varagg/kernels.hpp"
#include "varagg/risk_vector.hpp"

namespace varagg {

enum class GapClass { Super, Sub, Equal };
enum class Overall { SuperAdditiveEverywhere, SubAdditiveEverywhere, AdditiveEverywhere, Mixed };

std::string gap_class_name(GapClass c);
std::string overall_name(Overall o);

struct AdditivityReport {
  std::vector<double> p;
  std::vector<double> var_sum;
  std::vector<double> var_margin_total;
  std::vector<double> gap;  // var_sum - var_margin_total
  std::vector<GapClass> cls;
  std::vector<double> crossings;
  double abs_tol = 1e-9;
  // Probability half-width used for sampled or tabulated sum laws (0 for exact ones).
  double p_band = 0.0;
  std::string sum_method;
  std::vector<std::string> margin_methods;
  Overall overall = Overall::AdditiveEverywhere;

  std::size_t count(GapClass c) const;
};

// 2001-point Chebyshev grid on [1e-4, 1 - 1e-4], symmetric about 1/2 and containing it.
std::vector<double> default_p_grid(std::size_t n = 2001, double lo = 1e-4, double hi = 1 - 1e-4);

AdditivityReport scan(const RiskVector& rv, const SumDistribution& sd,
                      const std::vector<double>& p_grid = default_p_grid(),
                      Exec exec = Exec::Parallel, double abs_tol = 1e-9);

Overall classify_overall(const std::vector<GapClass>& cls);

// X_{i,k} = X_i | S <= k and S_k = S | S <= k.
class TruncatedVector {
 public:
  TruncatedVector(RiskVector rv, SumDistribution sd, double k);

  double k() const { return k_; }
  // F_S(k).
  double level() const { return level_; }
  const RiskVector& base() const { return rv_; }

  double sum_cdf(double s) const;
  // Left quantile of S_k, by bisection on sum_cdf.
  double sum_quantile(double p) const;
  // VaR_p of the tilde variable: VaR_{p F_S(k)}[X_i].
  double tilde_quantile(std::size_t i, double p) const;

  bool has_exact_margins() const { return rep_.has_value(); }
  // P(X_i <= x | S <= k); needs an exact driver representation.
  double margin_cdf(std::size_t i, double x) const;
  double margin_quantile(std::size_t i, double p) const;

  // Rejection sample of draws with S <= k, row-major n x d.
  std::vector<double> conditional_sample(std::size_t n, std::uint64_t seed,
                                         Exec exec = Exec::Parallel) const;

 private:
  RiskVector rv_;
  SumDistribution sd_;
  double k_;
  double level_;
  std::optional<DriverRepresentation> rep_;
};

TruncatedVector truncate_by_sum(const RiskVector& rv, const SumDistribution& sd, double k);

struct ConvergenceRow {
  double k;
  double distance;  // sup over margins and probes of |F_{X_i,k}(x) - F_{X_i}(x)|
  bool exact;
};

// Exact where the coupling has a driver representation, otherwise from conditional
// samples of size mc_n.
std::vector<ConvergenceRow> convergence_probe(const RiskVector& rv, const SumDistribution& sd,
                                              const std::vector<double>& ks,
                                              const std::vector<double>& xs,
                                              std::size_t mc_n = 100000,
                                              std::uint64_t seed = 1);

inline constexpr std::uint64_t kMaxRejectionProposals = 100000000;
inline constexpr double kMinAcceptance = 1e-6;

}  // namespace varagg
