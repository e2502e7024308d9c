#include "varagg/properties.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "varagg/errors.hpp"
#include "varagg/numeric.hpp"
#include "varagg/rng.hpp"

namespace varagg {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

double rounding_slack(double a, double b) {
  return kPropertySlack + 8.0 * kEps * (std::abs(a) + std::abs(b));
}

std::vector<double> log_grid(double lo, double hi, std::size_t n) {
  std::vector<double> out(n);
  if (n == 1) {
    out[0] = lo;
    return out;
  }
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
  }
  out.front() = lo;
  out.back() = hi;
  return out;
}

void require_nonnegative(const RiskVector& rv, const char* what) {
  for (const auto& m : rv.margins()) {
    if (m.lower_endpoint() < 0.0) {
      throw ConfigurationError(std::string(what) +
                               ": margins must be supported on [0, inf); use the shifted variant");
    }
  }
}

double product_cdf(const std::vector<MarginalDistribution>& ms, double t) {
  double p = 1.0;
  for (const auto& m : ms) p *= m.cdf(t);
  return p;
}

double product_ddf(const std::vector<MarginalDistribution>& ms, double t) {
  double p = 1.0;
  for (const auto& m : ms) p *= m.ddf(t);
  return p;
}

std::vector<double> atoms_of(const MarginalDistribution& m) {
  std::vector<double> xs;
  if (m.family() == Family::DyadicDiscrete) {
    xs.push_back(m.shift());
    for (int k = 1; k <= m.truncation(); ++k) xs.push_back(m.shift() + std::ldexp(1.0, k));
  } else if (m.family() == Family::Tabulated && m.knots().mode == Interpolation::Step) {
    for (double x : m.knots().x) xs.push_back(m.shift() + x);
  }
  return xs;
}

}  // namespace

std::string property_name(Property p) {
  switch (p) {
    case Property::NSD: return "NSD";
    case Property::NLODDiagonal: return "NLODDiagonal";
    case Property::NUODDiagonal: return "NUODDiagonal";
    case Property::SD: return "SD";
    case Property::PhiNonIncreasing: return "PhiNonIncreasing";
    case Property::ReverseHazard: return "ReverseHazard";
    case Property::ScaleShrink: return "ScaleShrink";
  }
  return "?";
}

std::string outcome_name(Outcome o) {
  switch (o) {
    case Outcome::CertifiedHolds: return "CertifiedHolds";
    case Outcome::NumericallyHolds: return "NumericallyHolds";
    case Outcome::FailsWithWitness: return "FailsWithWitness";
    case Outcome::NotApplicable: return "NotApplicable";
  }
  return "?";
}

std::vector<double> TGrid::values() const {
  if (points == 0 || !(lo > 0.0) || !(hi >= lo) || !std::isfinite(hi)) {
    throw ConfigurationError("probe grid must be non-empty with 0 < lo <= hi < inf");
  }
  return log_grid(lo, hi, points);
}

std::string TGrid::describe() const {
  std::ostringstream os;
  os << "log grid, " << points << " points on [" << format_double(lo) << ", " << format_double(hi)
     << "]";
  return os.str();
}

PropertyVerdict diagonal_check(Property property, const std::function<double(double)>& diff,
                               const std::vector<double>& ts, const std::string& probe_spec) {
  if (ts.empty()) throw ConfigurationError("probe grid is empty");
  PropertyVerdict v;
  v.property = property;
  v.probe_spec = probe_spec;
  const std::vector<double> d = kernels::map_grid(diff, ts, Exec::Parallel);

  std::size_t best = 0;
  for (std::size_t i = 1; i < d.size(); ++i) {
    if (d[i] > d[best]) best = i;
  }
  auto bad = [&](std::size_t i) { return d[i] > kPropertySlack; };
  for (std::size_t i = 0; i + 1 < d.size(); ++i) {
    if (bad(i) == bad(i + 1)) continue;
    if (bad(i + 1)) {
      v.sign_changes.push_back(
          bisect_predicate([&](double t) { return diff(t) > 0.0; }, ts[i], ts[i + 1]));
    } else {
      v.sign_changes.push_back(
          bisect_predicate([&](double t) { return !(diff(t) > 0.0); }, ts[i], ts[i + 1]));
    }
  }
  v.violation = d[best];
  if (!bad(best)) {
    v.outcome = Outcome::NumericallyHolds;
    return v;
  }
  double t = ts[best];
  if (best > 0 && best + 1 < ts.size()) {
    const auto g = golden_section_min([&](double z) { return -diff(std::exp(z)); },
                                      std::log(ts[best - 1]), std::log(ts[best + 1]), 1e-12);
    if (-g.value > d[best]) t = std::exp(g.x);
  }
  const double at = diff(t);
  if (!(at > kPropertySlack)) t = ts[best];
  v.outcome = Outcome::FailsWithWitness;
  v.witness = {t};
  v.violation = diff(t);
  return v;
}

PropertyVerdict check_nsd(const RiskVector& rv, const SumDistribution& sd, const TGrid& grid) {
  require_nonnegative(rv, "check_nsd");
  const auto& ms = rv.margins();
  return diagonal_check(
      Property::NSD, [&](double t) { return sd.cdf(t) - product_cdf(ms, t); }, grid.values(),
      grid.describe() + ", sum law " + method_name(sd.method()));
}

PropertyVerdict check_nlod_diagonal(const RiskVector& rv, const TGrid& grid) {
  if (rv.dependence().kind == DependenceKind::Independent && !rv.has_transforms()) {
    PropertyVerdict v;
    v.property = Property::NLODDiagonal;
    v.outcome = Outcome::CertifiedHolds;
    v.probe_spec = "independent coupling: joint cdf equals the product";
    return v;
  }
  const auto& ms = rv.margins();
  return diagonal_check(
      Property::NLODDiagonal, [&](double t) { return rv.diagonal_cdf(t) - product_cdf(ms, t); },
      grid.values(), grid.describe());
}

PropertyVerdict check_nuod_diagonal(const RiskVector& rv, const TGrid& grid) {
  if (rv.dependence().kind == DependenceKind::Independent && !rv.has_transforms()) {
    PropertyVerdict v;
    v.property = Property::NUODDiagonal;
    v.outcome = Outcome::CertifiedHolds;
    v.probe_spec = "independent coupling: joint ddf equals the product";
    return v;
  }
  const auto& ms = rv.margins();
  return diagonal_check(
      Property::NUODDiagonal,
      [&](double t) {
        const std::vector<double> x(ms.size(), t);
        return rv.joint_ddf(x) - product_ddf(ms, t);
      },
      grid.values(), grid.describe());
}

double phi_eval(const MarginalDistribution& m, double x) {
  if (x == 0.0) return 0.0;
  const double g = m.log_cdf(x);
  if (g == -kInf) return -kInf;
  return x * g;
}

double logcauchy_objective(double u) {
  const double s = std::sin(M_PI * u);
  return -M_PI * u * std::log(u) / (s * s);
}

double logcauchy_threshold() {
  static const double value = golden_section_min(logcauchy_objective, 0.05, 0.95, 1e-10).value;
  return value;
}

std::optional<bool> phi_certified(const MarginalDistribution& m) {
  if (m.shift() != 0.0) return std::nullopt;
  const double a = m.alpha();
  switch (m.family()) {
    case Family::Frechet:
    case Family::ParetoII:
    case Family::InverseGamma: return a <= 1.0;
    case Family::Levy:
    case Family::BetaPrimeOne: return true;
    case Family::LogHazard: return a >= 0.0 && a < 1.0;
    case Family::LogCauchy: return a <= logcauchy_threshold();
    default: return std::nullopt;
  }
}

std::string phi_certified_range(Family f) {
  switch (f) {
    case Family::Frechet:
    case Family::ParetoII:
    case Family::InverseGamma: return "0 < alpha <= 1";
    case Family::Levy: return "all theta > 0";
    case Family::BetaPrimeOne: return "all alpha > 0";
    case Family::LogHazard: return "0 <= alpha < 1";
    case Family::LogCauchy: {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.4f", logcauchy_threshold());
      return std::string("0 < alpha <= ") + buf;
    }
    default: return "none";
  }
}

std::vector<double> default_phi_grid(const MarginalDistribution& m, std::size_t points) {
  const double lo = std::max(m.lower_endpoint(), 0.0);
  double c = m.quantile(0.5) - lo;
  if (!(c > 0.0) || !std::isfinite(c)) c = 1.0;
  double hi = std::min(lo + c * 1e12, m.upper_endpoint());
  std::vector<double> xs = log_grid(c * 1e-8, hi - lo, points);
  for (double& x : xs) x += lo;
  return xs;
}

PropertyVerdict phi_scan(const MarginalDistribution& m, std::size_t points) {
  PropertyVerdict v;
  v.property = Property::PhiNonIncreasing;
  std::vector<double> xs = atoms_of(m);
  if (xs.empty()) {
    xs = default_phi_grid(m, points);
    v.probe_spec = "consecutive pairs on a log grid of " + std::to_string(points) + " points";
  } else {
    v.probe_spec = "consecutive atoms (" + std::to_string(xs.size()) + ")";
  }
  std::vector<double> px;
  std::vector<double> pv;
  for (double x : xs) {
    const double f = phi_eval(m, x);
    if (std::isfinite(f)) {
      px.push_back(x);
      pv.push_back(f);
    }
  }
  double best = 0.0;
  std::size_t at = 0;
  for (std::size_t i = 0; i + 1 < pv.size(); ++i) {
    const double rise = pv[i + 1] - pv[i];
    if (rise > rounding_slack(pv[i], pv[i + 1]) && rise > best) {
      best = rise;
      at = i;
    }
  }
  if (best > 0.0) {
    v.outcome = Outcome::FailsWithWitness;
    v.witness = {px[at], px[at + 1]};
    v.violation = best;
    if (m.is_continuous()) {
      // Ends of the rising runs, refined on the sign of a central difference.
      auto rising = [&](double x) {
        return phi_eval(m, x * (1 + 1e-7)) > phi_eval(m, x * (1 - 1e-7));
      };
      std::vector<bool> up(pv.size() - 1);
      for (std::size_t i = 0; i + 1 < pv.size(); ++i) {
        up[i] = pv[i + 1] - pv[i] > rounding_slack(pv[i], pv[i + 1]);
      }
      for (std::size_t i = 1; i < up.size(); ++i) {
        if (up[i] == up[i - 1]) continue;
        const bool start = up[i];
        auto pred = [&](double x) { return start ? rising(x) : !rising(x); };
        const double a = px[i - 1];
        const double b = px[i + 1];
        v.sign_changes.push_back(!pred(a) && pred(b) ? bisect_predicate(pred, a, b, 1e-12 * b) : px[i]);
      }
    }
  } else {
    v.outcome = Outcome::NumericallyHolds;
  }
  return v;
}

PropertyVerdict phi_monotonicity(const MarginalDistribution& m) {
  const auto cert = phi_certified(m);
  if (cert && *cert) {
    PropertyVerdict v;
    v.property = Property::PhiNonIncreasing;
    v.outcome = Outcome::CertifiedHolds;
    v.probe_spec = "certified range " + phi_certified_range(m.family());
    return v;
  }
  PropertyVerdict v = phi_scan(m);
  if (cert) {
    v.probe_spec += "; outside certified range " + phi_certified_range(m.family());
  }
  return v;
}

double sd_gap(const std::vector<MarginalDistribution>& margins, const std::vector<double>& x) {
  double s = 0.0;
  double phix = 0.0;
  for (std::size_t i = 0; i < margins.size(); ++i) {
    s += x[i];
    phix += phi_eval(margins[i], x[i]);
  }
  double phis = 0.0;
  for (const auto& m : margins) phis += phi_eval(m, s);
  if (!std::isfinite(phix) || !std::isfinite(phis)) return -kInf;
  return phis - phix;
}

PropertyVerdict check_sd(const std::vector<MarginalDistribution>& margins,
                         const SdSearchSpec& spec) {
  const std::size_t n = margins.size();
  if (n < 2) throw ConfigurationError("check_sd needs at least two margins");
  PropertyVerdict v;
  v.property = Property::SD;
  const bool all_certified = std::all_of(margins.begin(), margins.end(), [](const auto& m) {
    const auto c = phi_certified(m);
    return c && *c;
  });
  if (all_certified) {
    v.outcome = Outcome::CertifiedHolds;
    v.probe_spec = "separable aggregator with every phi_i certified non-increasing";
    return v;
  }

  // Deterministic probes: single-coordinate corners and the diagonal at powers of two.
  std::vector<std::vector<double>> fixed;
  for (int k = -20; k <= 40; ++k) {
    const double t = std::ldexp(1.0, k);
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> x(n, 0.0);
      x[i] = t;
      fixed.push_back(x);
    }
    fixed.emplace_back(n, t);
  }
  const CounterRng rng(spec.seed, 7);
  auto probe = [&](std::uint64_t idx) {
    if (idx < fixed.size()) return fixed[idx];
    std::vector<double> x(n);
    for (std::size_t j = 0; j < n; ++j) {
      const auto slot = static_cast<std::uint32_t>(2 * j);
      if (rng.uniform(idx, slot) < 0.25) {
        x[j] = 0.0;
        continue;
      }
      const double c = std::tan(M_PI * (rng.uniform(idx, slot + 1) - 0.5));
      x[j] = std::clamp(std::exp(std::min(c, 700.0)), 0.0, 1e12);
    }
    return x;
  };
  auto excess = [&](std::uint64_t idx) {
    const auto x = probe(idx);
    const double g = sd_gap(margins, x);
    if (!std::isfinite(g)) return -kInf;
    double phis = 0.0;
    double s = 0.0;
    for (double xi : x) s += xi;
    for (const auto& m : margins) phis += phi_eval(m, s);
    return g - rounding_slack(phis, phis - g);
  };
  // Structured probes first; random draws only when none of them violates.
  auto best = kernels::search_max(fixed.size(), excess, spec.exec);
  if (!(best.value > 0.0)) {
    auto rest = kernels::search_max(
        spec.trials, [&](std::uint64_t i) { return excess(fixed.size() + i); }, spec.exec);
    rest.index += fixed.size();
    if (rest.value > best.value) best = rest;
  }
  v.seed = spec.seed;
  v.probe_spec = std::to_string(fixed.size()) + " corner/diagonal probes + " +
                 std::to_string(spec.trials) + " exp-Cauchy draws";
  if (best.value > 0.0) {
    v.outcome = Outcome::FailsWithWitness;
    v.witness = probe(best.index);
    v.violation = sd_gap(margins, v.witness);
  } else {
    v.outcome = Outcome::NumericallyHolds;
  }
  return v;
}

PropertyVerdict reverse_hazard_check(const MarginalDistribution& m, const std::vector<double>& xs) {
  PropertyVerdict v;
  v.property = Property::ReverseHazard;
  v.probe_spec = std::to_string(xs.size()) + " probe points";
  double best = 0.0;
  for (double x : xs) {
    const auto f = m.density(x);
    if (!f) {
      v.outcome = Outcome::NotApplicable;
      v.probe_spec = "no density available";
      return v;
    }
    const double F = m.cdf(x);
    // Subnormal values carry too few digits for the ratio f/F.
    constexpr double tiny = std::numeric_limits<double>::min();
    if (!(F >= tiny) || !(x > 0.0) || (*f > 0.0 && *f < tiny)) continue;
    const double lhs = x * *f / F;
    const double rhs = -m.log_cdf(x);
    const double d = lhs - rhs;
    if (d > rounding_slack(lhs, rhs) && d > best) {
      best = d;
      v.witness = {x};
    }
  }
  v.violation = best;
  v.outcome = best > 0.0 ? Outcome::FailsWithWitness : Outcome::NumericallyHolds;
  return v;
}

PropertyVerdict scale_shrink_check(const MarginalDistribution& m, const std::vector<double>& xs,
                                   const std::vector<double>& lambdas) {
  PropertyVerdict v;
  v.property = Property::ScaleShrink;
  v.probe_spec = std::to_string(xs.size()) + " points x " + std::to_string(lambdas.size()) +
                 " scale factors";
  double best = 0.0;
  for (double lam : lambdas) {
    if (!(lam >= 1.0)) throw ConfigurationError("scale_shrink_check: lambda must be >= 1");
    for (double x : xs) {
      const double g = m.log_cdf(x);
      const double gl = m.log_cdf(lam * x);
      if (!std::isfinite(g) || !std::isfinite(gl)) continue;
      const double lhs = gl;
      const double rhs = g / lam;
      const double d = lhs - rhs;
      if (d > rounding_slack(lhs, rhs) && d > best) {
        best = d;
        v.witness = {x, lam};
      }
    }
  }
  v.violation = best;
  v.outcome = best > 0.0 ? Outcome::FailsWithWitness : Outcome::NumericallyHolds;
  return v;
}

}  // namespace varagg
