#include <algorithm>
#include <cmath>

#include "varagg/additivity.hpp"
#include "varagg/errors.hpp"
#include "varagg/numeric.hpp"

namespace varagg {

TruncatedVector::TruncatedVector(RiskVector rv, SumDistribution sd, double k)
    : rv_(std::move(rv)), sd_(std::move(sd)), k_(k), level_(0.0) {
  if (!std::isfinite(k)) throw DomainError("truncation level must be finite");
  level_ = sd_.cdf(k);
  if (!(level_ > 0.0)) throw DomainError("truncation: P(S <= k) = 0, empty conditioning event");
  if (!rv_.has_transforms()) rep_ = driver_representation(rv_.dependence(), rv_.base_margins());
}

double TruncatedVector::sum_cdf(double s) const {
  if (s >= k_) return 1.0;
  return std::min(sd_.cdf(s) / level_, 1.0);
}

double TruncatedVector::sum_quantile(double p) const {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("sum_quantile: p must lie in (0,1)");
  return bisect_left_quantile([this](double s) { return sum_cdf(s); }, p, sd_.lower_endpoint(), k_);
}

double TruncatedVector::tilde_quantile(std::size_t i, double p) const {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("tilde_quantile: p must lie in (0,1)");
  return rv_.margins().at(i).quantile(p * level_);
}

double TruncatedVector::margin_cdf(std::size_t i, double x) const {
  if (!rep_) throw ConfigurationError("exact conditional margins need a driver representation");
  if (i >= rv_.dimension()) throw ConfigurationError("margin index out of range");
  return std::min(rep_->measure_component_and_sum(i, x, k_) / level_, 1.0);
}

double TruncatedVector::margin_quantile(std::size_t i, double p) const {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("margin_quantile: p must lie in (0,1)");
  return bisect_left_quantile([this, i](double x) { return margin_cdf(i, x); }, p,
                              rv_.margins().at(i).lower_endpoint(), k_);
}

std::vector<double> TruncatedVector::conditional_sample(std::size_t n, std::uint64_t seed,
                                                        Exec exec) const {
  const std::size_t d = rv_.dimension();
  std::vector<double> out;
  out.reserve(n * d);
  std::uint64_t used = 0;
  std::size_t accepted = 0;
  const auto batch = static_cast<std::uint64_t>(
      std::clamp(1.2 * static_cast<double>(n) / level_ + 1024.0, 1024.0, 1e7));
  while (accepted < n) {
    if (used >= kMaxRejectionProposals) {
      throw DomainError("conditional_sample: proposal cap reached");
    }
    if (used >= 1000000 && static_cast<double>(accepted) / static_cast<double>(used) < kMinAcceptance) {
      throw DomainError("conditional_sample: acceptance rate below 1e-6");
    }
    const std::uint64_t m = std::min(batch, kMaxRejectionProposals - used);
    const auto xs = kernels::sample_vectors(rv_, m, seed, exec, used);
    used += m;
    for (std::uint64_t r = 0; r < m && accepted < n; ++r) {
      double s = 0.0;
      for (std::size_t j = 0; j < d; ++j) s += xs[r * d + j];
      if (s <= k_) {
        out.insert(out.end(), xs.begin() + static_cast<std::ptrdiff_t>(r * d),
                   xs.begin() + static_cast<std::ptrdiff_t>((r + 1) * d));
        ++accepted;
      }
    }
  }
  return out;
}

TruncatedVector truncate_by_sum(const RiskVector& rv, const SumDistribution& sd, double k) {
  return TruncatedVector(rv, sd, k);
}

std::vector<ConvergenceRow> convergence_probe(const RiskVector& rv, const SumDistribution& sd,
                                              const std::vector<double>& ks,
                                              const std::vector<double>& xs, std::size_t mc_n,
                                              std::uint64_t seed) {
  if (ks.empty() || xs.empty()) throw ConfigurationError("convergence_probe: empty grid");
  for (std::size_t j = 1; j < ks.size(); ++j) {
    if (!(ks[j] > ks[j - 1])) throw ConfigurationError("convergence_probe: k must increase");
  }
  std::vector<ConvergenceRow> rows;
  const std::size_t d = rv.dimension();
  for (double k : ks) {
    const TruncatedVector tv(rv, sd, k);
    double dist = 0.0;
    if (tv.has_exact_margins()) {
      for (std::size_t i = 0; i < d; ++i) {
        for (double x : xs) {
          dist = std::max(dist, std::abs(tv.margin_cdf(i, x) - rv.margins()[i].cdf(x)));
        }
      }
    } else {
      const auto smp = tv.conditional_sample(mc_n, seed);
      for (std::size_t i = 0; i < d; ++i) {
        std::vector<double> col(mc_n);
        for (std::size_t r = 0; r < mc_n; ++r) col[r] = smp[r * d + i];
        std::sort(col.begin(), col.end());
        for (double x : xs) {
          const double emp = static_cast<double>(std::upper_bound(col.begin(), col.end(), x) - col.begin()) /
                             static_cast<double>(mc_n);
          dist = std::max(dist, std::abs(emp - rv.margins()[i].cdf(x)));
        }
      }
    }
    rows.push_back({k, dist, tv.has_exact_margins()});
  }
  return rows;
}

}  // namespace varagg
