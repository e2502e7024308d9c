#include "varagg/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>

#include "varagg/errors.hpp"
#include "varagg/numeric.hpp"

namespace varagg {

McEstimate mc_estimate_cdf(const RiskVector& rv, std::size_t n, std::uint64_t seed, double delta,
                           double target_epsilon, Exec exec) {
  if (!(delta > 0.0 && delta < 1.0)) throw DomainError("mc_estimate_cdf: delta must lie in (0,1)");
  const double eps = dkw_epsilon(std::max<std::size_t>(n, 1), delta);
  if (n < kMinMcSamples) {
    throw DomainError("mc_estimate_cdf: n = " + std::to_string(n) +
                      " is below 1000; achievable epsilon " + format_double(eps));
  }
  if (target_epsilon > 0.0 && eps > target_epsilon) {
    throw DomainError("mc_estimate_cdf: epsilon " + format_double(target_epsilon) +
                      " needs more than n = " + std::to_string(n) + " draws; achievable epsilon " +
                      format_double(eps));
  }
  std::vector<double> s = kernels::sample_sums(rv, n, seed, exec);
  std::sort(s.begin(), s.end());
  std::vector<double> x;
  std::vector<double> F;
  const double dn = static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (i + 1 < n && s[i + 1] == s[i]) continue;
    x.push_back(s[i]);
    F.push_back(i + 1 == n ? 1.0 : static_cast<double>(i + 1) / dn);
  }
  return {MarginalDistribution::tabulated(std::move(x), std::move(F), Interpolation::Step), eps,
          delta, n, seed};
}

McEstimate mc_estimate_cdf(const ModelSpec& spec, std::size_t n, std::uint64_t seed, Exec exec) {
  return mc_estimate_cdf(spec.build(), n, seed, spec.analysis.tolerances.dkw_delta, 0.0, exec);
}

namespace {

double mass_to_double(Mass m, int exponent) {
  const auto hi = static_cast<std::uint64_t>(m >> 64);
  const auto lo = static_cast<std::uint64_t>(m);
  return std::ldexp(std::ldexp(static_cast<double>(hi), 64) + static_cast<double>(lo), -exponent);
}

// ceil(p 2^e) for p in (0,1); exact since scaling by a power of two is exact.
Mass scaled_ceil(double p, int exponent) { return static_cast<Mass>(std::ceil(std::ldexp(p, exponent))); }
Mass scaled_floor(double p, int exponent) { return static_cast<Mass>(std::floor(std::ldexp(p, exponent))); }

struct Atom {
  double value;
  Mass mass;  // units 2^-K
};

// Atoms of the dyadic margin with truncation K, masses in units of 2^-K:
// 0 carries 2^(K-1), 2^k carries 2^(K-k-1) for 1 <= k < K and 2^K carries 1.
std::vector<Atom> dyadic_atoms(int K) {
  std::vector<Atom> a;
  a.push_back({0.0, Mass{1} << (K - 1)});
  for (int k = 1; k < K; ++k) a.push_back({std::ldexp(1.0, k), Mass{1} << (K - k - 1)});
  a.push_back({std::ldexp(1.0, K), Mass{1}});
  return a;
}

ExactTable table_from(const std::map<double, Mass>& masses, int exponent) {
  ExactTable t;
  t.exponent = exponent;
  Mass c = 0;
  for (const auto& [v, m] : masses) {
    c += m;
    t.values.push_back(v);
    t.cumulative.push_back(c);
  }
  if (c != (Mass{1} << exponent)) throw DomainError("brute_force_discrete: masses do not sum to one");
  return t;
}

class ExactDiscreteLaw : public SumLaw {
 public:
  explicit ExactDiscreteLaw(ExactTable t) : t_(std::move(t)) {}
  double cdf(double s) const override { return t_.cdf(s); }
  double cdf_left(double s) const override { return t_.cdf(std::nextafter(s, -kInf)); }
  double quantile(double p) const override { return t_.quantile(p); }
  double quantile_right(double q) const override {
    if (!(q >= 0.0 && q < 1.0)) throw DomainError("quantile_right: q must lie in [0,1)");
    const Mass target = scaled_floor(q, t_.exponent);
    const auto it = std::upper_bound(t_.cumulative.begin(), t_.cumulative.end(), target);
    return t_.values[static_cast<std::size_t>(it - t_.cumulative.begin())];
  }
  double lower_endpoint() const override { return t_.values.front(); }
  bool continuous() const override { return false; }

 private:
  ExactTable t_;
};

}  // namespace

double ExactTable::cdf(double x) const {
  const auto it = std::upper_bound(values.begin(), values.end(), x);
  if (it == values.begin()) return 0.0;
  return mass_to_double(cumulative[static_cast<std::size_t>(it - values.begin()) - 1], exponent);
}

double ExactTable::quantile(double p) const {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("quantile: p must lie in (0,1)");
  const Mass target = scaled_ceil(p, exponent);
  const auto it = std::lower_bound(cumulative.begin(), cumulative.end(), target);
  return values[static_cast<std::size_t>(it - cumulative.begin())];
}

BruteForceResult brute_force_discrete(const RiskVector& rv, const std::vector<double>& p_grid) {
  if (rv.has_transforms()) throw ConfigurationError("brute_force_discrete: transformed vectors are not enumerable");
  const auto& ms = rv.margins();
  const std::size_t d = ms.size();
  for (const auto& m : ms) {
    if (m.family() != Family::DyadicDiscrete || m.shift() != 0.0) {
      throw ConfigurationError("brute_force_discrete: margins must be unshifted dyadic laws");
    }
  }
  std::map<double, Mass> sum;
  std::vector<std::map<double, Mass>> margin(d);
  int exponent = 0;
  const DependenceKind kind = rv.dependence().kind;
  if (kind == DependenceKind::MutuallyExclusiveDyadic) {
    // Exactly one coordinate is non-zero; P(X_i = v, others 0) = P(X_i = v) for v > 0.
    exponent = ms[0].truncation();
    for (std::size_t i = 0; i < d; ++i) {
      if (ms[i].truncation() != exponent) throw ConfigurationError("brute_force_discrete: truncations differ");
      for (const Atom& a : dyadic_atoms(exponent)) {
        if (a.value == 0.0) continue;
        sum[a.value] += a.mass;
        margin[i][a.value] += a.mass;
        for (std::size_t j = 0; j < d; ++j) {
          if (j != i) margin[j][0.0] += a.mass;
        }
      }
    }
  } else if (kind == DependenceKind::Independent) {
    double support = 1.0;
    for (const auto& m : ms) {
      exponent += m.truncation();
      support *= m.truncation() + 1;
    }
    if (support > static_cast<double>(kMaxSupport)) {
      throw SizeError("brute_force_discrete: joint support exceeds 1e6 points");
    }
    if (exponent > 120) throw SizeError("brute_force_discrete: masses exceed 120 bits");
    std::vector<std::vector<Atom>> atoms;
    for (const auto& m : ms) atoms.push_back(dyadic_atoms(m.truncation()));
    std::vector<std::size_t> idx(d, 0);
    while (true) {
      Mass mass = 1;
      double s = 0.0;
      for (std::size_t i = 0; i < d; ++i) {
        mass *= atoms[i][idx[i]].mass;
        s += atoms[i][idx[i]].value;
      }
      sum[s] += mass;
      for (std::size_t i = 0; i < d; ++i) margin[i][atoms[i][idx[i]].value] += mass;
      std::size_t i = 0;
      while (i < d && ++idx[i] == atoms[i].size()) idx[i++] = 0;
      if (i == d) break;
    }
  } else {
    throw ConfigurationError("brute_force_discrete: needs a mutually exclusive or independent dyadic vector");
  }
  if (sum.size() > kMaxSupport) throw SizeError("brute_force_discrete: sum support exceeds 1e6 points");

  ExactTable sum_table = table_from(sum, exponent);
  std::vector<ExactTable> margin_tables;
  for (const auto& m : margin) margin_tables.push_back(table_from(m, exponent));

  SumDistribution sd(std::make_shared<ExactDiscreteLaw>(sum_table), SumMethod::ClosedForm,
                     "exact-enumeration");

  AdditivityReport r;
  r.p = p_grid;
  r.abs_tol = 0.0;
  r.sum_method = "exact-enumeration";
  r.margin_methods.assign(d, "exact-enumeration");
  auto total = [&](double p) {
    double t = 0.0;
    for (const auto& m : margin_tables) t += m.quantile(p);
    return t;
  };
  for (double p : p_grid) {
    const double vs = sum_table.quantile(p);
    const double vm = total(p);
    r.var_sum.push_back(vs);
    r.var_margin_total.push_back(vm);
    r.gap.push_back(vs - vm);
    r.cls.push_back(vs > vm ? GapClass::Super : vs < vm ? GapClass::Sub : GapClass::Equal);
  }
  r.overall = classify_overall(r.cls);
  std::optional<std::size_t> last;
  for (std::size_t i = 0; i < r.p.size(); ++i) {
    if (r.cls[i] == GapClass::Equal) continue;
    if (last && r.cls[*last] != r.cls[i]) {
      const bool super_first = r.cls[*last] == GapClass::Super;
      auto flipped = [&](double p) {
        const bool super = sum_table.quantile(p) > total(p);
        return super_first ? !super : super;
      };
      r.crossings.push_back(bisect_predicate(flipped, r.p[*last], r.p[i]));
    }
    last = i;
  }
  return {std::move(sum_table), std::move(margin_tables), std::move(sd), std::move(r)};
}

}  // namespace varagg
