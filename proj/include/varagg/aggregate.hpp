#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "varagg/driver.hpp"
#include "varagg/kernels.hpp"
#include "varagg/margins.hpp"
#include "varagg/risk_vector.hpp"

namespace varagg {

enum class SumMethod { ClosedForm, FunctionalReduction, Convolution, MonteCarlo };

std::string method_name(SumMethod m);

// Law of S = sum X_i. Subclasses supply the CDF; quantiles default to bracketed
// bisection from the lower endpoint.
class SumLaw {
 public:
  virtual ~SumLaw() = default;
  virtual double cdf(double s) const = 0;
  virtual double cdf_left(double s) const { return cdf(s); }
  virtual double quantile(double p) const;
  virtual double quantile_right(double q) const;
  virtual double lower_endpoint() const = 0;
  virtual bool continuous() const { return true; }
  // Estimated sup-norm error of cdf(); zero for exact laws.
  virtual double achieved_tolerance() const { return 0.0; }
};

class SumDistribution {
 public:
  SumDistribution(std::shared_ptr<const SumLaw> law, SumMethod method, std::string tag);

  SumMethod method() const { return method_; }
  const std::string& formula_tag() const { return tag_; }

  double cdf(double s) const;
  double cdf_left(double s) const;
  double quantile(double p) const;
  double quantile_right(double q) const;
  double lower_endpoint() const { return law_->lower_endpoint(); }
  bool is_continuous() const { return law_->continuous(); }

  // Monte Carlo only.
  std::size_t sample_count() const;
  std::uint64_t seed() const;
  const std::vector<double>& sorted_sample() const;
  double dkw_epsilon(double delta = 1e-6) const;

  double achieved_tolerance() const { return law_->achieved_tolerance(); }

  const SumLaw& law() const { return *law_; }

 private:
  std::shared_ptr<const SumLaw> law_;
  SumMethod method_;
  std::string tag_;
};

struct SumOptions {
  double convolution_tolerance = 1e-8;
  std::size_t mc_samples = 1000000;
  std::uint64_t seed = 20240611;
  Exec exec = Exec::Parallel;
};

// Picks the best available method for the vector: closed forms, exact reduction
// over the driver, convolution for n <= 4 independent margins, Monte Carlo otherwise.
SumDistribution build_sum_distribution(const RiskVector& rv, const SumOptions& opt = {});

SumDistribution functional_reduction(const MarginalDistribution& driver,
                                     const std::vector<CatalogMap>& maps);
SumDistribution functional_reduction(DriverRepresentation rep, std::string tag);
SumDistribution comonotone_sum(const std::vector<MarginalDistribution>& margins);
SumDistribution bivariate_pareto_sum(double alpha);
SumDistribution dyadic_sum(int K);
SumDistribution convolve_independent(const std::vector<MarginalDistribution>& margins,
                                     double tolerance, Exec exec = Exec::Parallel);
SumDistribution monte_carlo_sum(const RiskVector& rv, std::size_t n, std::uint64_t seed,
                                Exec exec = Exec::Parallel);
SumDistribution monte_carlo_from_sample(std::vector<double> sums, std::uint64_t seed);
// Law of offset + orientation * S.
SumDistribution affine_sum(const SumDistribution& base, double offset, int orientation);

inline double sum_cdf(const SumDistribution& sd, double s) { return sd.cdf(s); }
inline double sum_quantile(const SumDistribution& sd, double p) { return sd.quantile(p); }

double dkw_epsilon(std::size_t n, double delta);

}  // namespace varagg
