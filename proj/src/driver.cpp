#include "varagg/driver.hpp"

#include <algorithm>
#include <limits>
#include <cmath>

#include "varagg/errors.hpp"
#include "varagg/numeric.hpp"

namespace varagg {
namespace {

constexpr int kMaxBisect = 200;

bool monotone_piece_increasing(const DriverRepresentation& rep, std::size_t b, double lo,
                               double hi) {
  return rep.total(b, hi) >= rep.total(b, lo);
}

// Unique minimiser in x >= lo of c1 x + c2 / x + c3 / (1 + x), a convex function on x > 0.
std::optional<double> catalog_minimiser(double c1, double c2, double c3, double lo) {
  if (c1 == 0.0 || (c2 == 0.0 && c3 == 0.0)) return std::nullopt;
  double x;
  if (c3 == 0.0) {
    x = std::sqrt(c2 / c1);
  } else if (c2 == 0.0) {
    x = std::sqrt(c3 / c1) - 1.0;
  } else {
    auto deriv = [&](double t) { return c1 - c2 / (t * t) - c3 / ((1 + t) * (1 + t)); };
    double a = 1e-300;
    double b = 1.0;
    while (deriv(b) < 0.0) b *= 2.0;
    x = bisect_predicate([&](double t) { return deriv(t) >= 0.0; }, a, b);
  }
  if (!(x > lo)) return std::nullopt;
  return x;
}

std::vector<double> piece_edges(const DriverBlock& blk) {
  std::vector<double> e;
  e.push_back(blk.u_lo);
  for (double t : blk.turning_points) {
    if (t > blk.u_lo && t < blk.u_hi) e.push_back(t);
  }
  e.push_back(blk.u_hi);
  return e;
}

}  // namespace

Interval monotone_sublevel(const std::function<double(double)>& g, bool increasing, double a,
                           double b, double x, bool strict) {
  auto in = [&](double u) {
    const double v = g(u);
    return strict ? v < x : v <= x;
  };
  if (increasing) {
    if (!in(a)) return {a, a};
    if (in(b)) return {a, b};
    double lo = a;
    double hi = b;
    for (int i = 0; i < kMaxBisect; ++i) {
      const double mid = lo + 0.5 * (hi - lo);
      if (mid <= lo || mid >= hi) break;
      if (in(mid)) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    return {a, 0.5 * (lo + hi)};
  }
  if (!in(b)) return {b, b};
  if (in(a)) return {a, b};
  double lo = a;
  double hi = b;
  for (int i = 0; i < kMaxBisect; ++i) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    if (in(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return {0.5 * (lo + hi), b};
}

DriverRepresentation::DriverRepresentation(std::vector<DriverBlock> blocks)
    : blocks_(std::move(blocks)) {
  if (blocks_.empty()) throw ConfigurationError("driver representation needs a block");
  const std::size_t n = blocks_.front().components.size();
  for (auto& b : blocks_) {
    if (b.components.size() != n) throw ConfigurationError("blocks disagree on dimension");
    std::sort(b.turning_points.begin(), b.turning_points.end());
  }
}

std::size_t DriverRepresentation::dimension() const { return blocks_.front().components.size(); }

double DriverRepresentation::total(std::size_t block, double u) const {
  const DriverBlock& b = blocks_[block];
  if (b.total) return b.total(u);
  double s = 0.0;
  for (const auto& c : b.components) s += c.value(u);
  return s;
}

DriverRepresentation DriverRepresentation::comonotone(
    const std::vector<MarginalDistribution>& margins) {
  DriverBlock b;
  for (const auto& m : margins) {
    b.components.push_back({[m](double u) { return quantile01(m, u); }, true});
  }
  return DriverRepresentation({std::move(b)});
}

DriverRepresentation DriverRepresentation::counter_monotone(const MarginalDistribution& a,
                                                            const MarginalDistribution& c) {
  DriverBlock b;
  b.components.push_back({[a](double u) { return quantile01(a, u); }, true});
  b.components.push_back({[c](double u) { return quantile01(c, 1.0 - u); }, false});
  b.turning_points = detect_turning_points(b);
  return DriverRepresentation({std::move(b)});
}

DriverRepresentation DriverRepresentation::ordinal_sum(const MarginalDistribution& a,
                                                       const MarginalDistribution& c) {
  DriverBlock lower;
  lower.u_lo = 0.0;
  lower.u_hi = 0.5;
  lower.components.push_back({[a](double u) { return quantile01(a, u); }, true});
  lower.components.push_back({[c](double u) { return quantile01(c, 0.5 - u); }, false});
  lower.turning_points = detect_turning_points(lower);
  DriverBlock upper;
  upper.u_lo = 0.5;
  upper.u_hi = 1.0;
  upper.components.push_back({[a](double u) { return quantile01(a, u); }, true});
  upper.components.push_back({[c](double u) { return quantile01(c, 1.5 - u); }, false});
  upper.turning_points = detect_turning_points(upper);
  return DriverRepresentation({std::move(lower), std::move(upper)});
}

DriverRepresentation DriverRepresentation::functional(const MarginalDistribution& driver,
                                                      const std::vector<CatalogMap>& maps) {
  DriverBlock b;
  double c[3] = {0.0, 0.0, 0.0};
  for (CatalogMap m : maps) {
    c[static_cast<int>(m)] += 1.0;
    const bool inc = m == CatalogMap::Identity;
    b.components.push_back(
        {[driver, m](double u) { return apply_catalog_map(m, quantile01(driver, u)); }, inc});
  }
  b.total = [driver, c0 = c[0], c1 = c[1], c2 = c[2]](double u) {
    const double x = quantile01(driver, u);
    double s = 0.0;
    if (c0 != 0.0) s += c0 * x;
    if (c1 != 0.0) s += c1 / x;
    if (c2 != 0.0) s += c2 / (1.0 + x);
    return s;
  };
  if (auto xm = catalog_minimiser(c[0], c[1], c[2], driver.lower_endpoint())) {
    b.turning_points.push_back(driver.cdf(*xm));
  }
  return DriverRepresentation({std::move(b)});
}

DriverRepresentation DriverRepresentation::compose(
    const std::vector<std::vector<MonotoneMap>>& chains) const {
  if (chains.size() != dimension()) throw ConfigurationError("compose: one chain per component");
  std::vector<DriverBlock> out;
  for (const auto& blk : blocks_) {
    DriverBlock nb;
    nb.u_lo = blk.u_lo;
    nb.u_hi = blk.u_hi;
    for (std::size_t i = 0; i < chains.size(); ++i) {
      for (const auto& m : chains[i]) {
        if (!m.increasing()) throw ConfigurationError("compose: maps must be increasing");
      }
      auto f = blk.components[i].value;
      auto chain = chains[i];
      nb.components.push_back({[f, chain](double u) {
                                 double v = f(u);
                                 for (const auto& m : chain) v = m.apply(v);
                                 return v;
                               },
                               blk.components[i].increasing});
    }
    nb.turning_points = detect_turning_points(nb);
    out.push_back(std::move(nb));
  }
  return DriverRepresentation(std::move(out));
}

std::vector<double> detect_turning_points(const DriverBlock& block, int scan_points) {
  bool all_same = true;
  for (const auto& c : block.components) {
    all_same = all_same && c.increasing == block.components.front().increasing;
  }
  if (all_same) return {};
  auto h = [&](double u) {
    if (block.total) return block.total(u);
    double s = 0.0;
    for (const auto& c : block.components) s += c.value(u);
    return s;
  };
  const double a = block.u_lo;
  const double w = block.u_hi - block.u_lo;
  std::vector<double> us(scan_points);
  std::vector<double> hs(scan_points);
  for (int j = 0; j < scan_points; ++j) {
    us[j] = a + w * j / (scan_points - 1);
    hs[j] = h(us[j]);
  }
  std::vector<double> turning;
  int last_sign = 0;
  int last_idx = 0;
  for (int j = 0; j + 1 < scan_points; ++j) {
    const double d = hs[j + 1] - hs[j];
    if (std::isnan(d)) continue;
    const int sign = d > 0 ? 1 : (d < 0 ? -1 : 0);
    if (sign == 0) continue;
    if (last_sign != 0 && sign != last_sign) {
      const double lo = us[last_idx];
      const double hi = us[j + 1];
      const double flip = last_sign < 0 ? 1.0 : -1.0;
      const auto g = golden_section_min([&](double u) { return flip * h(u); }, lo, hi, 1e-15);
      turning.push_back(g.x);
    }
    last_sign = sign;
    last_idx = j;
  }
  return turning;
}

double DriverRepresentation::measure_sum_le(double s, bool strict) const {
  double m = 0.0;
  for (const auto& iv : sum_sublevel_intervals(s, strict)) m += iv.second - iv.first;
  return std::clamp(m, 0.0, 1.0);
}

std::vector<Interval> DriverRepresentation::sum_sublevel_intervals(double s, bool strict) const {
  std::vector<Interval> out;
  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    const auto edges = piece_edges(blocks_[b]);
    auto hb = [this, b](double u) { return total(b, u); };
    for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
      const bool inc = monotone_piece_increasing(*this, b, edges[k], edges[k + 1]);
      const Interval iv = monotone_sublevel(hb, inc, edges[k], edges[k + 1], s, strict);
      if (!(iv.second > iv.first)) continue;
      // Near a smooth interior minimum, s within a few ulps of h(t) leaves a sliver of
      // width ~sqrt(ulp) that is rounding noise, not mass.
      const double t = inc ? edges[k] : edges[k + 1];
      const bool interior = t != blocks_[b].u_lo && t != blocks_[b].u_hi;
      if (interior && iv.second - iv.first < 1e-6) {
        const double ht = hb(t);
        if (s - ht <= 8.0 * std::numeric_limits<double>::epsilon() * std::abs(ht)) continue;
      }
      out.push_back(iv);
    }
  }
  return out;
}

double DriverRepresentation::measure_joint(std::span<const double> x) const {
  if (x.size() != dimension()) throw ConfigurationError("measure_joint: dimension mismatch");
  double m = 0.0;
  for (const auto& blk : blocks_) {
    double lo = blk.u_lo;
    double hi = blk.u_hi;
    for (std::size_t i = 0; i < x.size() && lo < hi; ++i) {
      if (x[i] == kInf) continue;
      const Interval iv =
          monotone_sublevel(blk.components[i].value, blk.components[i].increasing, lo, hi, x[i]);
      lo = iv.first;
      hi = iv.second;
    }
    if (hi > lo) m += hi - lo;
  }
  return std::clamp(m, 0.0, 1.0);
}

double DriverRepresentation::measure_component_and_sum(std::size_t i, double x, double s) const {
  double m = 0.0;
  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    const DriverBlock& blk = blocks_[b];
    const Interval J = monotone_sublevel(blk.components[i].value, blk.components[i].increasing,
                                         blk.u_lo, blk.u_hi, x);
    if (!(J.second > J.first)) continue;
    const auto edges = piece_edges(blk);
    auto hb = [this, b](double u) { return total(b, u); };
    for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
      const double lo = std::max(edges[k], J.first);
      const double hi = std::min(edges[k + 1], J.second);
      if (!(hi > lo)) continue;
      const bool inc = monotone_piece_increasing(*this, b, edges[k], edges[k + 1]);
      const Interval iv = monotone_sublevel(hb, inc, lo, hi, s);
      m += iv.second - iv.first;
    }
  }
  return std::clamp(m, 0.0, 1.0);
}

double DriverRepresentation::sum_infimum() const {
  double best = kInf;
  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    for (double e : piece_edges(blocks_[b])) best = std::min(best, total(b, e));
  }
  return best;
}

std::optional<DriverRepresentation> driver_representation(
    const DependenceModel& model, const std::vector<MarginalDistribution>& margins) {
  validate(model, margins);
  switch (model.kind) {
    case DependenceKind::Comonotone: return DriverRepresentation::comonotone(margins);
    case DependenceKind::CounterMonotoneBivariate:
      return DriverRepresentation::counter_monotone(margins[0], margins[1]);
    case DependenceKind::OrdinalSumWW:
      return DriverRepresentation::ordinal_sum(margins[0], margins[1]);
    case DependenceKind::FunctionalCoupling:
      return DriverRepresentation::functional(*model.driver, model.maps);
    default: return std::nullopt;
  }
}

}  // namespace varagg
