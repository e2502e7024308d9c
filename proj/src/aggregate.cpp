#include "varagg/aggregate.hpp"

#include <algorithm>
#include <cmath>

#include "varagg/errors.hpp"
#include "varagg/numeric.hpp"

namespace varagg {

std::string method_name(SumMethod m) {
  switch (m) {
    case SumMethod::ClosedForm: return "ClosedForm";
    case SumMethod::FunctionalReduction: return "FunctionalReduction";
    case SumMethod::Convolution: return "Convolution";
    case SumMethod::MonteCarlo: return "MonteCarlo";
  }
  return "?";
}

double dkw_epsilon(std::size_t n, double delta) {
  return std::sqrt(std::log(2.0 / delta) / (2.0 * static_cast<double>(n)));
}

double SumLaw::quantile(double p) const {
  return bisect_left_quantile([this](double s) { return cdf(s); }, p, lower_endpoint());
}

double SumLaw::quantile_right(double q) const {
  return bisect_right_quantile([this](double s) { return cdf(s); }, q, lower_endpoint());
}

namespace {

class MonteCarloLaw : public SumLaw {
 public:
  MonteCarloLaw(std::vector<double> sorted, std::uint64_t seed)
      : xs_(std::move(sorted)), seed_(seed) {}

  double cdf(double s) const override {
    return static_cast<double>(std::upper_bound(xs_.begin(), xs_.end(), s) - xs_.begin()) / n();
  }
  double cdf_left(double s) const override {
    return static_cast<double>(std::lower_bound(xs_.begin(), xs_.end(), s) - xs_.begin()) / n();
  }
  double quantile(double p) const override {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("quantile: p must lie in (0,1)");
    // Order statistic ceil(n p), adjusted so that k/n >= p > (k-1)/n in floating point.
    const double dn = n();
    std::size_t k = static_cast<std::size_t>(std::ceil(dn * p));
    k = std::clamp<std::size_t>(k, 1, xs_.size());
    while (k > 1 && static_cast<double>(k - 1) / dn >= p) --k;
    while (k < xs_.size() && static_cast<double>(k) / dn < p) ++k;
    return xs_[k - 1];
  }
  double quantile_right(double q) const override {
    const double dn = n();
    std::size_t k = static_cast<std::size_t>(std::floor(dn * q));
    while (k > 0 && static_cast<double>(k) / dn > q) --k;
    while (k < xs_.size() && static_cast<double>(k + 1) / dn <= q) ++k;
    // k samples lie at or below the level; the next order statistic is where F exceeds q.
    return xs_[std::min(k, xs_.size() - 1)];
  }
  double lower_endpoint() const override { return xs_.front(); }
  bool continuous() const override { return false; }

  const std::vector<double>& sample() const { return xs_; }
  std::uint64_t seed() const { return seed_; }

 private:
  double n() const { return static_cast<double>(xs_.size()); }
  std::vector<double> xs_;
  std::uint64_t seed_;
};

class ReductionLaw : public SumLaw {
 public:
  explicit ReductionLaw(DriverRepresentation rep) : rep_(std::move(rep)), lower_(rep_.sum_infimum()) {}
  double cdf(double s) const override { return rep_.measure_sum_le(s); }
  double cdf_left(double s) const override { return rep_.measure_sum_le(s, true); }
  double lower_endpoint() const override { return lower_; }
  const DriverRepresentation& rep() const { return rep_; }

 private:
  DriverRepresentation rep_;
  double lower_;
};

class ComonotoneLaw : public ReductionLaw {
 public:
  explicit ComonotoneLaw(const std::vector<MarginalDistribution>& margins)
      : ReductionLaw(DriverRepresentation::comonotone(margins)), margins_(margins) {}
  double quantile(double p) const override {
    double s = 0.0;
    for (const auto& m : margins_) s += m.quantile(p);
    return s;
  }
  double quantile_right(double q) const override {
    double s = 0.0;
    for (const auto& m : margins_) s += m.quantile_right(q);
    return s;
  }
  bool continuous() const override {
    return std::all_of(margins_.begin(), margins_.end(),
                       [](const MarginalDistribution& m) { return m.is_continuous(); });
  }

 private:
  std::vector<MarginalDistribution> margins_;
};

class BivariateParetoLaw : public SumLaw {
 public:
  explicit BivariateParetoLaw(double alpha) : a_(alpha) {}
  double cdf(double s) const override {
    if (s <= 0.0) return 0.0;
    return -std::expm1(-(a_ + 1.0) * std::log1p(s)) - (a_ + 1.0) * s * std::pow(1.0 + s, -a_ - 1.0);
  }
  double lower_endpoint() const override { return 0.0; }

 private:
  double a_;
};

class DyadicLaw : public SumLaw {
 public:
  explicit DyadicLaw(int K) : K_(K) {}
  double cdf(double s) const override {
    if (s < 2.0) return 0.0;
    const int k = std::ilogb(s);
    if (k >= K_) return 1.0;
    return 1.0 - std::ldexp(1.0, -k);
  }
  double cdf_left(double s) const override { return cdf(std::nextafter(s, -kInf)); }
  double quantile(double p) const override {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("quantile: p must lie in (0,1)");
    for (int k = 1; k < K_; ++k) {
      if (p <= 1.0 - std::ldexp(1.0, -k)) return std::ldexp(1.0, k);
    }
    return std::ldexp(1.0, K_);
  }
  double quantile_right(double q) const override {
    for (int k = 1; k < K_; ++k) {
      if (q < 1.0 - std::ldexp(1.0, -k)) return std::ldexp(1.0, k);
    }
    return std::ldexp(1.0, K_);
  }
  double lower_endpoint() const override { return 2.0; }
  bool continuous() const override { return false; }

 private:
  int K_;
};

class SingleMarginLaw : public SumLaw {
 public:
  explicit SingleMarginLaw(MarginalDistribution m) : m_(std::move(m)) {}
  double cdf(double s) const override { return m_.cdf(s); }
  double cdf_left(double s) const override { return m_.cdf_left(s); }
  double quantile(double p) const override { return m_.quantile(p); }
  double quantile_right(double q) const override { return m_.quantile_right(q); }
  double lower_endpoint() const override { return m_.lower_endpoint(); }
  bool continuous() const override { return m_.is_continuous(); }

 private:
  MarginalDistribution m_;
};

class AffineLaw : public SumLaw {
 public:
  AffineLaw(SumDistribution base, double c, int sigma) : base_(std::move(base)), c_(c), sigma_(sigma) {}
  double cdf(double s) const override {
    if (sigma_ > 0) return base_.cdf(s - c_);
    return 1.0 - base_.cdf_left(c_ - s);
  }
  double cdf_left(double s) const override {
    if (sigma_ > 0) return base_.cdf_left(s - c_);
    return 1.0 - base_.cdf(c_ - s);
  }
  double quantile(double p) const override {
    if (sigma_ > 0) return c_ + base_.quantile(p);
    return c_ - base_.quantile_right(1.0 - p);
  }
  double quantile_right(double q) const override {
    if (sigma_ > 0) return c_ + base_.quantile_right(q);
    if (q == 0.0) return -kInf;
    return c_ - base_.quantile(1.0 - q);
  }
  double lower_endpoint() const override {
    return sigma_ > 0 ? c_ + base_.lower_endpoint() : -kInf;
  }
  bool continuous() const override { return base_.is_continuous(); }

 private:
  SumDistribution base_;
  double c_;
  int sigma_;
};

template <class Law>
const Law* as(const std::shared_ptr<const SumLaw>& law) {
  return dynamic_cast<const Law*>(law.get());
}

}  // namespace

SumDistribution::SumDistribution(std::shared_ptr<const SumLaw> law, SumMethod method,
                                 std::string tag)
    : law_(std::move(law)), method_(method), tag_(std::move(tag)) {}

double SumDistribution::cdf(double s) const {
  if (std::isnan(s)) throw DomainError("sum_cdf: NaN argument");
  if (s == -kInf) return 0.0;
  if (s == kInf) return 1.0;
  return law_->cdf(s);
}

double SumDistribution::cdf_left(double s) const {
  if (s == -kInf) return 0.0;
  if (s == kInf) return 1.0;
  return law_->cdf_left(s);
}

double SumDistribution::quantile(double p) const {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("sum_quantile: p must lie in (0,1)");
  return law_->quantile(p);
}

double SumDistribution::quantile_right(double q) const {
  if (!(q >= 0.0 && q < 1.0)) throw DomainError("quantile_right: level must lie in [0,1)");
  return law_->quantile_right(q);
}

std::size_t SumDistribution::sample_count() const { return sorted_sample().size(); }

std::uint64_t SumDistribution::seed() const {
  const auto* mc = as<MonteCarloLaw>(law_);
  if (!mc) throw ConfigurationError("seed(): not a Monte Carlo sum");
  return mc->seed();
}

const std::vector<double>& SumDistribution::sorted_sample() const {
  const auto* mc = as<MonteCarloLaw>(law_);
  if (!mc) throw ConfigurationError("sorted_sample(): not a Monte Carlo sum");
  return mc->sample();
}

double SumDistribution::dkw_epsilon(double delta) const {
  return varagg::dkw_epsilon(sample_count(), delta);
}

SumDistribution functional_reduction(DriverRepresentation rep, std::string tag) {
  return SumDistribution(std::make_shared<ReductionLaw>(std::move(rep)),
                         SumMethod::FunctionalReduction, std::move(tag));
}

SumDistribution functional_reduction(const MarginalDistribution& driver,
                                     const std::vector<CatalogMap>& maps) {
  std::string tag = "h(x)=";
  for (std::size_t i = 0; i < maps.size(); ++i) tag += (i ? "+" : "") + catalog_map_name(maps[i]);
  return functional_reduction(DriverRepresentation::functional(driver, maps), tag);
}

SumDistribution comonotone_sum(const std::vector<MarginalDistribution>& margins) {
  return SumDistribution(std::make_shared<ComonotoneLaw>(margins), SumMethod::ClosedForm,
                         "comonotone: VaR_p[S] = sum VaR_p[X_i]");
}

SumDistribution bivariate_pareto_sum(double alpha) {
  return SumDistribution(std::make_shared<BivariateParetoLaw>(alpha), SumMethod::ClosedForm,
                         "F_S(s) = 1-(1+s)^(-a-1)(1+(a+1)s)");
}

SumDistribution dyadic_sum(int K) {
  return SumDistribution(std::make_shared<DyadicLaw>(K), SumMethod::ClosedForm,
                         "F_S(s) = 1-2^-k, 2^k <= s < 2^(k+1)");
}

SumDistribution monte_carlo_from_sample(std::vector<double> sums, std::uint64_t seed) {
  if (sums.empty()) throw DomainError("Monte Carlo sum needs at least one draw");
  std::sort(sums.begin(), sums.end());
  return SumDistribution(std::make_shared<MonteCarloLaw>(std::move(sums), seed),
                         SumMethod::MonteCarlo, "empirical");
}

SumDistribution monte_carlo_sum(const RiskVector& rv, std::size_t n, std::uint64_t seed,
                                Exec exec) {
  if (n == 0) throw DomainError("Monte Carlo sum needs n >= 1");
  return monte_carlo_from_sample(kernels::sample_sums(rv, n, seed, exec), seed);
}

SumDistribution affine_sum(const SumDistribution& base, double offset, int orientation) {
  if (orientation != 1 && orientation != -1) throw ConfigurationError("orientation must be +-1");
  if (orientation > 0 && base.method() == SumMethod::MonteCarlo) {
    std::vector<double> xs = base.sorted_sample();
    for (double& x : xs) x += offset;
    return monte_carlo_from_sample(std::move(xs), base.seed());
  }
  if (base.method() == SumMethod::MonteCarlo) {
    std::vector<double> xs = base.sorted_sample();
    for (double& x : xs) x = offset - x;
    return monte_carlo_from_sample(std::move(xs), base.seed());
  }
  std::string tag = (orientation > 0 ? "shift(" : "reflect(") + base.formula_tag() + ")";
  return SumDistribution(std::make_shared<AffineLaw>(base, offset, orientation), base.method(),
                         tag);
}

SumDistribution build_sum_distribution(const RiskVector& rv, const SumOptions& opt) {
  const DependenceModel& dep = rv.dependence();
  if (rv.has_transforms()) {
    if (rv.is_affine()) {
      const SumDistribution base = build_sum_distribution(rv.base_vector(), opt);
      return affine_sum(base, rv.affine_offset(), rv.orientation());
    }
    if (auto rep = driver_representation(dep, rv.base_margins())) {
      return functional_reduction(rep->compose(rv.chains()), "composed driver reduction");
    }
    return monte_carlo_sum(rv, opt.mc_samples, opt.seed, opt.exec);
  }
  const auto& margins = rv.base_margins();
  if (margins.size() == 1) {
    return SumDistribution(std::make_shared<SingleMarginLaw>(margins[0]), SumMethod::ClosedForm,
                           "single margin");
  }
  if (rv.is_comonotone()) return comonotone_sum(margins);
  switch (dep.kind) {
    case DependenceKind::Comonotone: return comonotone_sum(margins);
    case DependenceKind::BivariateParetoII: return bivariate_pareto_sum(dep.pareto_alpha);
    case DependenceKind::MutuallyExclusiveDyadic: return dyadic_sum(dep.dyadic_K);
    case DependenceKind::FunctionalCoupling:
      return functional_reduction(*dep.driver, dep.maps);
    case DependenceKind::CounterMonotoneBivariate:
      return functional_reduction(DriverRepresentation::counter_monotone(margins[0], margins[1]),
                                  "counter-monotone reduction");
    case DependenceKind::OrdinalSumWW:
      return functional_reduction(DriverRepresentation::ordinal_sum(margins[0], margins[1]),
                                  "ordinal-sum reduction");
    case DependenceKind::Independent:
      if (margins.size() <= 4) {
        return convolve_independent(margins, opt.convolution_tolerance, opt.exec);
      }
      return monte_carlo_sum(rv, opt.mc_samples, opt.seed, opt.exec);
  }
  return monte_carlo_sum(rv, opt.mc_samples, opt.seed, opt.exec);
}

}  // namespace varagg
