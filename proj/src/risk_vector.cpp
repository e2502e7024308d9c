#include "varagg/risk_vector.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "varagg/errors.hpp"
#include "varagg/numeric.hpp"

namespace varagg {
namespace {

bool chain_increasing(const std::vector<MonotoneMap>& chain) {
  bool inc = true;
  for (const auto& m : chain) inc = (inc == m.increasing());
  return inc;
}

double chain_inverse(const std::vector<MonotoneMap>& chain, double y) {
  for (auto it = chain.rbegin(); it != chain.rend(); ++it) y = it->inverse(y);
  return y;
}

}  // namespace

RiskVector::RiskVector(std::vector<MarginalDistribution> margins, DependenceModel dependence)
    : base_(std::move(margins)), dep_(std::move(dependence)) {
  validate(dep_, base_);
  chains_.assign(base_.size(), {});
  rebuild();
}

RiskVector::RiskVector(DependenceModel dependence)
    : RiskVector(dependence.implied_margins(), dependence) {}

void RiskVector::rebuild() {
  effective_.clear();
  for (std::size_t i = 0; i < base_.size(); ++i) {
    MarginalDistribution m = base_[i];
    for (const auto& map : chains_[i]) m = MarginalDistribution::mapped(map, m);
    effective_.push_back(m);
  }
  const bool inc0 = chain_increasing(chains_[0]);
  for (const auto& c : chains_) {
    if (chain_increasing(c) != inc0) {
      throw ConfigurationError("all components must share one orientation");
    }
  }
  orientation_ = inc0 ? 1 : -1;
}

bool RiskVector::has_transforms() const {
  return std::any_of(chains_.begin(), chains_.end(), [](const auto& c) { return !c.empty(); });
}

bool RiskVector::is_affine() const {
  for (const auto& c : chains_) {
    for (const auto& m : c) {
      if (m.kind != MapKind::Shift && m.kind != MapKind::Reflect) return false;
    }
  }
  return true;
}

double RiskVector::affine_offset() const {
  if (!is_affine()) throw ConfigurationError("affine_offset: chain is not affine");
  double total = 0.0;
  for (const auto& chain : chains_) {
    double c = 0.0;
    for (const auto& m : chain) c = m.kind == MapKind::Shift ? c + m.param : m.param - c;
    total += c;
  }
  return total;
}

bool RiskVector::is_comonotone() const {
  if (dep_.kind == DependenceKind::Comonotone) return true;
  if (dep_.kind == DependenceKind::FunctionalCoupling) {
    return std::all_of(dep_.maps.begin(), dep_.maps.end(),
                       [](CatalogMap m) { return m == CatalogMap::Identity; });
  }
  return base_.size() == 1;
}

bool RiskVector::margins_continuous() const {
  return std::all_of(effective_.begin(), effective_.end(),
                     [](const MarginalDistribution& m) { return m.is_continuous(); });
}

RiskVector RiskVector::with_maps(const std::vector<MonotoneMap>& per_component) const {
  if (per_component.size() != dimension()) {
    throw ConfigurationError("transform: one map per component required");
  }
  RiskVector out = *this;
  for (std::size_t i = 0; i < per_component.size(); ++i) {
    out.chains_[i].push_back(per_component[i]);
  }
  out.rebuild();
  return out;
}

RiskVector RiskVector::base_vector() const { return RiskVector(base_, dep_); }

double RiskVector::joint_cdf(std::span<const double> x) const {
  if (x.size() != dimension()) throw ConfigurationError("joint_cdf: dimension mismatch");
  if (!has_transforms()) return varagg::joint_cdf(dep_, base_, x);
  std::vector<double> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = chain_inverse(chains_[i], x[i]);
  if (orientation_ > 0) return varagg::joint_cdf(dep_, base_, y);
  // P(X_i >= y_i): step just below y so that atoms at y are included.
  for (double& v : y) v = std::nextafter(v, -kInf);
  return varagg::joint_ddf(dep_, base_, y);
}

double RiskVector::joint_ddf(std::span<const double> x) const {
  if (x.size() != dimension()) throw ConfigurationError("joint_ddf: dimension mismatch");
  if (!has_transforms()) return varagg::joint_ddf(dep_, base_, x);
  std::vector<double> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = chain_inverse(chains_[i], x[i]);
  if (orientation_ > 0) return varagg::joint_ddf(dep_, base_, y);
  for (double& v : y) v = std::nextafter(v, -kInf);
  return varagg::joint_cdf(dep_, base_, y);
}

double RiskVector::diagonal_cdf(double t) const {
  const std::vector<double> x(dimension(), t);
  return joint_cdf(x);
}

std::string RiskVector::describe() const {
  std::ostringstream os;
  os << dep_.describe() << " [";
  for (std::size_t i = 0; i < effective_.size(); ++i) {
    os << (i ? ", " : "") << effective_[i].describe();
  }
  os << "]";
  return os.str();
}

VectorSampler::VectorSampler(const RiskVector& rv, std::uint64_t seed, std::uint32_t stream)
    : sampler_(rv.dependence(), rv.base_margins(), seed, stream), chains_(rv.chains()) {}

void VectorSampler::draw(std::uint64_t index, std::span<double> out) const {
  sampler_.draw(index, out);
  for (std::size_t i = 0; i < chains_.size(); ++i) {
    for (const auto& m : chains_[i]) out[i] = m.apply(out[i]);
  }
}

double VectorSampler::draw_sum(std::uint64_t index, std::span<double> scratch) const {
  draw(index, scratch);
  double s = 0.0;
  for (double v : scratch) s += v;
  return s;
}

}  // namespace varagg
