#include "varagg/dependence.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "varagg/errors.hpp"
#include "varagg/numeric.hpp"
#include "varagg/rng.hpp"

namespace varagg {

std::string kind_name(DependenceKind k) {
  switch (k) {
    case DependenceKind::Comonotone: return "comonotone";
    case DependenceKind::CounterMonotoneBivariate: return "countermonotone";
    case DependenceKind::Independent: return "independent";
    case DependenceKind::OrdinalSumWW: return "ordinal_sum";
    case DependenceKind::FunctionalCoupling: return "functional";
    case DependenceKind::MutuallyExclusiveDyadic: return "mutually_exclusive_dyadic";
    case DependenceKind::BivariateParetoII: return "bivariate_pareto";
  }
  return "unknown";
}

std::string catalog_map_name(CatalogMap m) {
  switch (m) {
    case CatalogMap::Identity: return "x";
    case CatalogMap::Reciprocal: return "1/x";
    case CatalogMap::ReciprocalOnePlus: return "1/(1+x)";
  }
  return "?";
}

CatalogMap parse_catalog_map(const std::string& s) {
  if (s == "x") return CatalogMap::Identity;
  if (s == "1/x") return CatalogMap::Reciprocal;
  if (s == "1/(1+x)") return CatalogMap::ReciprocalOnePlus;
  throw ConfigurationError("unknown component map '" + s + "' (catalog: x, 1/x, 1/(1+x))");
}

double apply_catalog_map(CatalogMap m, double x) {
  switch (m) {
    case CatalogMap::Identity: return x;
    case CatalogMap::Reciprocal: return 1.0 / x;
    case CatalogMap::ReciprocalOnePlus: return 1.0 / (1.0 + x);
  }
  return x;
}

namespace {

DependenceModel with_kind(DependenceKind k) {
  DependenceModel d;
  d.kind = k;
  return d;
}

}  // namespace

DependenceModel DependenceModel::comonotone() { return with_kind(DependenceKind::Comonotone); }
DependenceModel DependenceModel::counter_monotone() {
  return with_kind(DependenceKind::CounterMonotoneBivariate);
}
DependenceModel DependenceModel::independent() { return with_kind(DependenceKind::Independent); }
DependenceModel DependenceModel::ordinal_sum() { return with_kind(DependenceKind::OrdinalSumWW); }

DependenceModel DependenceModel::functional(const MarginalDistribution& driver,
                                            std::vector<CatalogMap> maps) {
  if (maps.empty()) throw ConfigurationError("functional coupling needs at least one map");
  const bool needs_positive = std::any_of(maps.begin(), maps.end(), [](CatalogMap m) {
    return m != CatalogMap::Identity;
  });
  if (needs_positive && driver.lower_endpoint() < 0.0) {
    throw ConfigurationError("reciprocal maps need a driver supported on [0, inf)");
  }
  DependenceModel d = with_kind(DependenceKind::FunctionalCoupling);
  d.driver = driver;
  d.maps = std::move(maps);
  return d;
}

DependenceModel DependenceModel::mutually_exclusive_dyadic(int K) {
  if (K < 1 || K > 1000) throw ConfigurationError("dyadic truncation K must lie in [1, 1000]");
  DependenceModel d = with_kind(DependenceKind::MutuallyExclusiveDyadic);
  d.dyadic_K = K;
  return d;
}

DependenceModel DependenceModel::bivariate_pareto(double alpha) {
  if (!(alpha > 0.0)) throw ConfigurationError("bivariate Pareto needs alpha > 0");
  DependenceModel d = with_kind(DependenceKind::BivariateParetoII);
  d.pareto_alpha = alpha;
  return d;
}

std::optional<std::size_t> DependenceModel::fixed_dimension() const {
  switch (kind) {
    case DependenceKind::CounterMonotoneBivariate:
    case DependenceKind::OrdinalSumWW:
    case DependenceKind::MutuallyExclusiveDyadic:
    case DependenceKind::BivariateParetoII: return 2;
    case DependenceKind::FunctionalCoupling: return maps.size();
    default: return std::nullopt;
  }
}

bool DependenceModel::determines_margins() const {
  return kind == DependenceKind::FunctionalCoupling ||
         kind == DependenceKind::MutuallyExclusiveDyadic ||
         kind == DependenceKind::BivariateParetoII;
}

std::vector<MarginalDistribution> DependenceModel::implied_margins() const {
  std::vector<MarginalDistribution> out;
  switch (kind) {
    case DependenceKind::FunctionalCoupling:
      for (CatalogMap m : maps) {
        switch (m) {
          case CatalogMap::Identity: out.push_back(*driver); break;
          case CatalogMap::Reciprocal:
            out.push_back(MarginalDistribution::mapped(MonotoneMap::reciprocal(), *driver));
            break;
          case CatalogMap::ReciprocalOnePlus:
            out.push_back(
                MarginalDistribution::mapped(MonotoneMap::reciprocal_one_plus(), *driver));
            break;
        }
      }
      break;
    case DependenceKind::MutuallyExclusiveDyadic:
      out.assign(2, MarginalDistribution::dyadic(dyadic_K));
      break;
    case DependenceKind::BivariateParetoII:
      out.assign(2, MarginalDistribution::pareto2(pareto_alpha, 1.0));
      break;
    default:
      throw ConfigurationError(kind_name(kind) + " does not determine its margins");
  }
  return out;
}

std::string DependenceModel::describe() const {
  std::ostringstream os;
  os << kind_name(kind);
  if (kind == DependenceKind::FunctionalCoupling) {
    os << "(driver=" << driver->describe() << ",maps=[";
    for (std::size_t i = 0; i < maps.size(); ++i) os << (i ? "," : "") << catalog_map_name(maps[i]);
    os << "])";
  } else if (kind == DependenceKind::BivariateParetoII) {
    os << "(alpha=" << format_double(pareto_alpha) << ")";
  } else if (kind == DependenceKind::MutuallyExclusiveDyadic) {
    os << "(K=" << dyadic_K << ")";
  }
  return os.str();
}

void validate(const DependenceModel& model, const std::vector<MarginalDistribution>& margins) {
  if (margins.empty()) throw ConfigurationError("at least one margin required");
  if (auto n = model.fixed_dimension(); n && *n != margins.size()) {
    throw ConfigurationError(kind_name(model.kind) + " expects " + std::to_string(*n) +
                             " margins, got " + std::to_string(margins.size()));
  }
}

double quantile01(const MarginalDistribution& m, double u) {
  if (u <= 0.0) return m.lower_endpoint();
  if (u >= 1.0) return m.upper_endpoint();
  return m.quantile(u);
}

namespace {

double dyadic_conditional(double x, int K) {
  if (x < 2.0) return 0.0;
  const int k = std::ilogb(x);
  if (k >= K) return 1.0;
  return 1.0 - std::ldexp(1.0, -k);
}

double functional_joint(const DependenceModel& model, std::span<const double> x) {
  double lo = -kInf;
  double hi = kInf;
  for (std::size_t i = 0; i < model.maps.size(); ++i) {
    const double xi = x[i];
    if (xi == kInf) continue;
    switch (model.maps[i]) {
      case CatalogMap::Identity: hi = std::min(hi, xi); break;
      case CatalogMap::Reciprocal:
        if (xi <= 0.0) return 0.0;
        lo = std::max(lo, 1.0 / xi);
        break;
      case CatalogMap::ReciprocalOnePlus:
        if (xi <= 0.0) return 0.0;
        lo = std::max(lo, 1.0 / xi - 1.0);
        break;
    }
  }
  if (hi < lo) return 0.0;
  const MarginalDistribution& d = *model.driver;
  return std::max(0.0, d.cdf(hi) - d.cdf_left(lo));
}

}  // namespace

double joint_cdf(const DependenceModel& model, const std::vector<MarginalDistribution>& margins,
                 std::span<const double> x) {
  validate(model, margins);
  if (x.size() != margins.size()) throw ConfigurationError("joint_cdf: point dimension mismatch");
  for (double xi : x) {
    if (std::isnan(xi)) throw DomainError("joint_cdf: NaN coordinate");
  }
  const std::size_t n = margins.size();
  switch (model.kind) {
    case DependenceKind::Comonotone: {
      double m = 1.0;
      for (std::size_t i = 0; i < n; ++i) m = std::min(m, margins[i].cdf(x[i]));
      return m;
    }
    case DependenceKind::CounterMonotoneBivariate:
      return std::max(margins[0].cdf(x[0]) + margins[1].cdf(x[1]) - 1.0, 0.0);
    case DependenceKind::Independent: {
      double p = 1.0;
      for (std::size_t i = 0; i < n; ++i) p *= margins[i].cdf(x[i]);
      return p;
    }
    case DependenceKind::OrdinalSumWW: {
      const double u = margins[0].cdf(x[0]);
      const double v = margins[1].cdf(x[1]);
      if (u <= 0.5 && v <= 0.5) return std::max(u + v - 0.5, 0.0);
      if (u > 0.5 && v > 0.5) return std::max(u + v - 1.0, 0.5);
      return std::min(u, v);
    }
    case DependenceKind::FunctionalCoupling:
      return functional_joint(model, x);
    case DependenceKind::MutuallyExclusiveDyadic:
      if (x[0] < 0.0 || x[1] < 0.0) return 0.0;
      return 0.5 * dyadic_conditional(x[0], model.dyadic_K) +
             0.5 * dyadic_conditional(x[1], model.dyadic_K);
    case DependenceKind::BivariateParetoII: {
      if (x[0] < 0.0 || x[1] < 0.0) return 0.0;
      const double a = model.pareto_alpha;
      const double v = 1.0 - std::pow(1.0 + x[0], -a) - std::pow(1.0 + x[1], -a) +
                       std::pow(1.0 + x[0] + x[1], -a);
      return std::clamp(v, 0.0, 1.0);
    }
  }
  return 0.0;
}

double joint_ddf(const DependenceModel& model, const std::vector<MarginalDistribution>& margins,
                 std::span<const double> x) {
  validate(model, margins);
  const std::size_t n = margins.size();
  if (x.size() != n) throw ConfigurationError("joint_ddf: point dimension mismatch");
  if (n > 16) throw SizeError("joint_ddf: inclusion-exclusion limited to 16 components");
  if (model.kind == DependenceKind::BivariateParetoII) {
    if (x[0] < 0.0 || x[1] < 0.0) {
      std::vector<double> y(x.begin(), x.end());
      // P(X1 > x1, X2 > x2) with a negative coordinate reduces to a marginal survival.
      if (y[0] < 0.0 && y[1] < 0.0) return 1.0;
      const double z = y[0] < 0.0 ? y[1] : y[0];
      return std::pow(1.0 + z, -model.pareto_alpha);
    }
    return std::pow(1.0 + x[0] + x[1], -model.pareto_alpha);
  }
  std::vector<double> y(n);
  double total = 0.0;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    int bits = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (1u << i)) {
        y[i] = x[i];
        ++bits;
      } else {
        y[i] = kInf;
      }
    }
    const double term = mask == 0 ? 1.0 : joint_cdf(model, margins, y);
    total += (bits % 2 ? -term : term);
  }
  return std::clamp(total, 0.0, 1.0);
}

double diagonal_cdf(const DependenceModel& model, const std::vector<MarginalDistribution>& margins,
                    double t) {
  const std::vector<double> x(margins.size(), t);
  return joint_cdf(model, margins, x);
}

Sampler::Sampler(DependenceModel model, std::vector<MarginalDistribution> margins,
                 std::uint64_t seed, std::uint32_t stream)
    : model_(std::move(model)), margins_(std::move(margins)), seed_(seed), stream_(stream) {
  validate(model_, margins_);
}

void Sampler::draw(std::uint64_t index, std::span<double> out) const {
  const CounterRng rng(seed_, stream_);
  const std::size_t n = margins_.size();
  switch (model_.kind) {
    case DependenceKind::Comonotone: {
      const double u = rng.uniform(index, 0);
      for (std::size_t i = 0; i < n; ++i) out[i] = margins_[i].quantile(u);
      break;
    }
    case DependenceKind::CounterMonotoneBivariate: {
      const double u = rng.uniform(index, 0);
      out[0] = margins_[0].quantile(u);
      out[1] = margins_[1].quantile(1.0 - u);
      break;
    }
    case DependenceKind::Independent:
      for (std::size_t i = 0; i < n; ++i) {
        out[i] = margins_[i].quantile(rng.uniform(index, static_cast<std::uint32_t>(i)));
      }
      break;
    case DependenceKind::OrdinalSumWW: {
      const double u = rng.uniform(index, 0);
      const double v = u <= 0.5 ? 0.5 - u : 1.5 - u;
      out[0] = margins_[0].quantile(u);
      out[1] = margins_[1].quantile(v);
      break;
    }
    case DependenceKind::FunctionalCoupling: {
      const double d = model_.driver->quantile(rng.uniform(index, 0));
      for (std::size_t i = 0; i < n; ++i) out[i] = apply_catalog_map(model_.maps[i], d);
      break;
    }
    case DependenceKind::MutuallyExclusiveDyadic: {
      const double pick = rng.uniform(index, 0);
      const double g = rng.uniform(index, 1);
      // g = (m + 1/2) 2^-53 is never a power of two, so -ilogb(g) is the
      // geometric index k with P(k) = 2^-k.
      const int k = std::min(-std::ilogb(g), model_.dyadic_K);
      const std::size_t c = pick < 0.5 ? 0 : 1;
      out[c] = std::ldexp(1.0, k);
      out[1 - c] = 0.0;
      break;
    }
    case DependenceKind::BivariateParetoII: {
      const double a = model_.pareto_alpha;
      const double u = rng.uniform(index, 0);
      const double v = rng.uniform(index, 1);
      const double x1 = std::expm1(-std::log1p(-u) / a);
      out[0] = x1;
      out[1] = (1.0 + x1) * std::expm1(-std::log(v) / (a + 1.0));
      break;
    }
  }
}

std::vector<double> sample(const DependenceModel& model,
                           const std::vector<MarginalDistribution>& margins, std::size_t count,
                           std::uint64_t seed) {
  if (count == 0) throw DomainError("sample: count must be positive");
  const Sampler s(model, margins, seed);
  const std::size_t n = s.dimension();
  std::vector<double> out(count * n);
  for (std::size_t i = 0; i < count; ++i) s.draw(i, std::span<double>(out.data() + i * n, n));
  return out;
}

}  // namespace varagg
