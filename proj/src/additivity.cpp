#include "varagg/additivity.hpp"

#include <algorithm>
#include <cmath>

#include "varagg/errors.hpp"
#include "varagg/numeric.hpp"

namespace varagg {

std::string gap_class_name(GapClass c) {
  switch (c) {
    case GapClass::Super: return "Super";
    case GapClass::Sub: return "Sub";
    case GapClass::Equal: return "Equal";
  }
  return "?";
}

std::string overall_name(Overall o) {
  switch (o) {
    case Overall::SuperAdditiveEverywhere: return "SuperAdditiveEverywhere";
    case Overall::SubAdditiveEverywhere: return "SubAdditiveEverywhere";
    case Overall::AdditiveEverywhere: return "AdditiveEverywhere";
    case Overall::Mixed: return "Mixed";
  }
  return "?";
}

std::size_t AdditivityReport::count(GapClass c) const {
  return static_cast<std::size_t>(std::count(cls.begin(), cls.end(), c));
}

std::vector<double> default_p_grid(std::size_t n, double lo, double hi) {
  if (n < 2 || !(lo > 0.0) || !(hi < 1.0) || !(lo < hi)) {
    throw DomainError("p grid must have >= 2 points inside (0,1)");
  }
  std::vector<double> p(n);
  const double mid = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
    const double c = std::cos(M_PI * static_cast<double>(i) / static_cast<double>(n - 1));
    p[i] = mid - half * c;
    // Exact mirror p -> 1 - p when the grid is symmetric about 1/2.
    p[n - 1 - i] = lo + hi == 1.0 ? 1.0 - p[i] : mid + half * c;
  }
  if (n % 2 == 1) p[n / 2] = mid;
  p.front() = lo;
  p.back() = hi;
  return p;
}

Overall classify_overall(const std::vector<GapClass>& cls) {
  const bool sup = std::find(cls.begin(), cls.end(), GapClass::Super) != cls.end();
  const bool sub = std::find(cls.begin(), cls.end(), GapClass::Sub) != cls.end();
  if (sup && sub) return Overall::Mixed;
  if (sup) return Overall::SuperAdditiveEverywhere;
  if (sub) return Overall::SubAdditiveEverywhere;
  return Overall::AdditiveEverywhere;
}

namespace {

double margin_total(const std::vector<MarginalDistribution>& ms, double p) {
  double t = 0.0;
  for (const auto& m : ms) t += m.quantile(p);
  return t;
}

}  // namespace

AdditivityReport scan(const RiskVector& rv, const SumDistribution& sd,
                      const std::vector<double>& p_grid, Exec exec, double abs_tol) {
  if (!(abs_tol >= 0.0)) throw DomainError("scan: abs_tol must be non-negative");
  if (p_grid.empty()) throw DomainError("scan: empty p grid");
  for (double p : p_grid) {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("scan: p grid must lie inside (0,1)");
  }
  const auto& ms = rv.margins();
  AdditivityReport r;
  r.p = p_grid;
  r.abs_tol = abs_tol;
  r.sum_method = method_name(sd.method());
  for (const auto& m : ms) {
    r.margin_methods.push_back(m.has_closed_form_quantile() ? "closed-form" : "bisection");
  }
  if (sd.method() == SumMethod::MonteCarlo) {
    r.p_band = sd.dkw_epsilon(1e-6);
  } else if (sd.method() == SumMethod::Convolution) {
    r.p_band = sd.achieved_tolerance();
  }
  r.var_sum = kernels::map_grid([&](double p) { return sd.quantile(p); }, p_grid, exec);
  r.var_margin_total = kernels::map_grid([&](double p) { return margin_total(ms, p); }, p_grid, exec);
  const std::size_t n = p_grid.size();
  r.gap.resize(n);
  r.cls.resize(n);

  // With a probability band, VaR_{p-band}[S] > m + tol iff F_S(m + tol) < p - band and
  // VaR_{p+band}[S] < m - tol iff F_S((m - tol)-) >= p + band, so each side costs one
  // CDF evaluation instead of a quantile inversion.
  std::vector<double> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = static_cast<double>(i);
  std::vector<double> code(n, 0.0);
  if (r.p_band > 0.0) {
    code = kernels::map_grid(
        [&](double di) {
          const auto i = static_cast<std::size_t>(di);
          const double p = p_grid[i];
          const double m = r.var_margin_total[i];
          const bool super = p - r.p_band > 0.0 ? sd.cdf(m + r.abs_tol) < p - r.p_band
                                                 : sd.lower_endpoint() > m + r.abs_tol;
          const bool sub = p + r.p_band < 1.0 && sd.cdf_left(m - r.abs_tol) >= p + r.p_band;
          return super ? 1.0 : sub ? -1.0 : 0.0;
        },
        idx, exec);
  }
  for (std::size_t i = 0; i < n; ++i) {
    r.gap[i] = r.var_sum[i] - r.var_margin_total[i];
    if (r.p_band > 0.0) {
      r.cls[i] = code[i] > 0 ? GapClass::Super : code[i] < 0 ? GapClass::Sub : GapClass::Equal;
    } else {
      const double tol = r.abs_tol + 4e-12 * (std::abs(r.var_sum[i]) + std::abs(r.var_margin_total[i]));
      r.cls[i] = r.gap[i] > tol ? GapClass::Super : r.gap[i] < -tol ? GapClass::Sub : GapClass::Equal;
    }
  }
  r.overall = classify_overall(r.cls);

  // Crossings between consecutive strict points of opposite sign.
  std::optional<std::size_t> last;
  for (std::size_t i = 0; i < n; ++i) {
    if (r.cls[i] == GapClass::Equal) continue;
    if (last && r.cls[*last] != r.cls[i]) {
      const bool super_first = r.cls[*last] == GapClass::Super;
      auto gap_at = [&](double p) { return sd.quantile(p) - margin_total(ms, p); };
      auto flipped = [&](double p) { return super_first ? !(gap_at(p) > 0.0) : gap_at(p) > 0.0; };
      double tol = 0.0;
      if (r.p_band > 0.0) tol = r.p_band;
      r.crossings.push_back(bisect_predicate(flipped, r.p[*last], r.p[i], tol));
    }
    last = i;
  }
  return r;
}

}  // namespace varagg
