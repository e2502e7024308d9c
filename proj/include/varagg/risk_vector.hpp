#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "varagg/dependence.hpp"
#include "varagg/margins.hpp"

namespace varagg {

// n margins coupled by a DependenceModel, optionally followed by a chain of
// monotone maps per component (shift, reflection, convex transform).
class RiskVector {
 public:
  RiskVector(std::vector<MarginalDistribution> margins, DependenceModel dependence);
  // Margins implied by the coupling (functional, dyadic, bivariate Pareto).
  explicit RiskVector(DependenceModel dependence);

  std::size_t dimension() const { return base_.size(); }
  const DependenceModel& dependence() const { return dep_; }
  const std::vector<MarginalDistribution>& base_margins() const { return base_; }
  const std::vector<MarginalDistribution>& margins() const { return effective_; }
  const std::vector<std::vector<MonotoneMap>>& chains() const { return chains_; }

  bool has_transforms() const;
  bool is_affine() const;
  // +1 when every component chain is increasing, -1 when every chain is decreasing.
  int orientation() const { return orientation_; }
  // With Y_i = c_i + orientation X_i (affine chains only), returns sum of c_i.
  double affine_offset() const;
  bool is_comonotone() const;
  bool margins_continuous() const;

  RiskVector with_maps(const std::vector<MonotoneMap>& per_component) const;
  RiskVector base_vector() const;

  double joint_cdf(std::span<const double> x) const;
  double joint_ddf(std::span<const double> x) const;
  double diagonal_cdf(double t) const;

  std::string describe() const;

 private:
  void rebuild();

  std::vector<MarginalDistribution> base_;
  DependenceModel dep_;
  std::vector<std::vector<MonotoneMap>> chains_;
  std::vector<MarginalDistribution> effective_;
  int orientation_ = 1;
};

class VectorSampler {
 public:
  VectorSampler(const RiskVector& rv, std::uint64_t seed, std::uint32_t stream = 0);
  std::size_t dimension() const { return sampler_.dimension(); }
  void draw(std::uint64_t index, std::span<double> out) const;
  double draw_sum(std::uint64_t index, std::span<double> scratch) const;

 private:
  Sampler sampler_;
  std::vector<std::vector<MonotoneMap>> chains_;
};

}  // namespace varagg
