#include "varagg/transforms.hpp"

#include <cmath>

#include "varagg/errors.hpp"
#include "varagg/numeric.hpp"

namespace varagg {

std::string transform_kind_name(TransformKind k) {
  switch (k) {
    case TransformKind::Shift: return "shift";
    case TransformKind::Reflect: return "reflect";
    case TransformKind::ConvexMap: return "convex";
  }
  return "?";
}

std::string convex_family_name(ConvexFamily f) {
  return f == ConvexFamily::Power ? "pow" : "expm1";
}

TransformSpec TransformSpec::shift(std::vector<double> a) {
  TransformSpec s;
  s.kind = TransformKind::Shift;
  s.a = std::move(a);
  return s;
}

TransformSpec TransformSpec::reflect(std::vector<double> b) {
  TransformSpec s;
  s.kind = TransformKind::Reflect;
  s.b = std::move(b);
  return s;
}

TransformSpec TransformSpec::power(double c) {
  TransformSpec s;
  s.kind = TransformKind::ConvexMap;
  s.map = ConvexFamily::Power;
  s.c = c;
  return s;
}

TransformSpec TransformSpec::expm1() {
  TransformSpec s;
  s.kind = TransformKind::ConvexMap;
  s.map = ConvexFamily::Expm1;
  return s;
}

namespace {

void require_finite(const std::vector<double>& v, std::size_t n, const char* what) {
  if (v.size() != n) {
    throw ConfigurationError(std::string(what) + ": expected " + std::to_string(n) + " values");
  }
  for (double x : v) {
    if (!std::isfinite(x)) throw ConfigurationError(std::string(what) + ": values must be finite");
  }
}

}  // namespace

RiskVector shift(const RiskVector& rv, const std::vector<double>& a) {
  require_finite(a, rv.dimension(), "shift");
  std::vector<MonotoneMap> maps;
  for (double ai : a) maps.push_back(MonotoneMap::shift(ai));
  return rv.with_maps(maps);
}

RiskVector reflect(const RiskVector& rv, const std::vector<double>& b) {
  require_finite(b, rv.dimension(), "reflect");
  std::vector<MonotoneMap> maps;
  for (double bi : b) maps.push_back(MonotoneMap::reflect(bi));
  return rv.with_maps(maps);
}

RiskVector convex_transform(const RiskVector& rv, const TransformSpec& spec) {
  if (spec.kind != TransformKind::ConvexMap) throw ConfigurationError("not a convex transform");
  if (spec.map == ConvexFamily::Power && !(spec.c >= 1.0 && std::isfinite(spec.c))) {
    throw ConfigurationError("power map needs a finite exponent c >= 1");
  }
  const auto& ms = rv.margins();
  if (!spec.anchors.empty() && spec.anchors.size() != ms.size()) {
    throw ConfigurationError("convex transform: one anchor per component required");
  }
  std::vector<MonotoneMap> maps;
  for (std::size_t i = 0; i < ms.size(); ++i) {
    const double lo = ms[i].lower_endpoint();
    if (!std::isfinite(lo)) {
      throw ConfigurationError("convex transform needs a finite lower endpoint to fix");
    }
    const double anchor = spec.anchors.empty() ? lo : spec.anchors[i];
    if (anchor != lo) {
      throw ConfigurationError("convex map must fix the lower endpoint " + format_double(lo));
    }
    maps.push_back(spec.map == ConvexFamily::Power ? MonotoneMap::power(spec.c, anchor)
                                                   : MonotoneMap::expm1(anchor));
  }
  return rv.with_maps(maps);
}

RiskVector apply_transform(const RiskVector& rv, const TransformSpec& spec) {
  switch (spec.kind) {
    case TransformKind::Shift: return shift(rv, spec.a);
    case TransformKind::Reflect: return reflect(rv, spec.b);
    case TransformKind::ConvexMap: return convex_transform(rv, spec);
  }
  throw ConfigurationError("unknown transform");
}

std::vector<double> affine_constants(const RiskVector& rv) {
  if (!rv.is_affine()) throw ConfigurationError("vector is not an affine transform of its base");
  std::vector<double> out;
  for (const auto& chain : rv.chains()) {
    double c = 0.0;
    for (const auto& m : chain) c = m.kind == MapKind::Shift ? c + m.param : m.param - c;
    out.push_back(c);
  }
  return out;
}

PropertyVerdict check_shifted_nsd(const RiskVector& rv_a, const SumDistribution& sd_a,
                                  const TGrid& grid) {
  if (rv_a.orientation() != 1) throw ConfigurationError("check_shifted_nsd: expected a shift");
  const auto a = affine_constants(rv_a);
  double a_plus = 0.0;
  for (double x : a) a_plus += x;
  const auto& ms = rv_a.margins();
  auto diff = [&](double t) {
    double p = 1.0;
    for (std::size_t i = 0; i < ms.size(); ++i) p *= ms[i].cdf(t + a[i]);
    return sd_a.cdf(t + a_plus) - p;
  };
  return diagonal_check(Property::NSD, diff, grid.values(), grid.describe() + ", shifted diagonal");
}

PropertyVerdict check_reflected_nsd(const RiskVector& rv_b, const SumDistribution& sd_b,
                                    const TGrid& grid) {
  if (rv_b.orientation() != -1) throw ConfigurationError("check_reflected_nsd: expected a reflection");
  const auto b = affine_constants(rv_b);
  double b_plus = 0.0;
  for (double x : b) b_plus += x;
  const auto& ms = rv_b.margins();
  auto diff = [&](double t) {
    double p = 1.0;
    for (std::size_t i = 0; i < ms.size(); ++i) p *= ms[i].ddf(b[i] - t);
    return (1.0 - sd_b.cdf(b_plus - t)) - p;
  };
  return diagonal_check(Property::NSD, diff, grid.values(), grid.describe() + ", reflected diagonal");
}

double shifted_phi(const MarginalDistribution& margin_a, double a, double x) {
  if (x == 0.0) return 0.0;
  const double g = margin_a.log_cdf(x + a);
  return g == -kInf ? -kInf : x * g;
}

double reflected_phi(const MarginalDistribution& margin_b, double b, double x) {
  if (x == 0.0) return 0.0;
  const double d = margin_b.ddf(b - x);
  return d > 0.0 ? x * std::log(d) : -kInf;
}

}  // namespace varagg
