#pragma once

#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "varagg/dependence.hpp"
#include "varagg/margins.hpp"

namespace varagg {

// A coupling in which every component is a monotone function of one uniform
// driver U, split into blocks of the u-axis. Within a block each component is
// monotone with a known direction; the total h = sum of components is monotone
// between consecutive turning points.
struct DriverComponent {
  std::function<double(double)> value;
  bool increasing = true;
};

struct DriverBlock {
  double u_lo = 0.0;
  double u_hi = 1.0;
  std::vector<DriverComponent> components;
  std::vector<double> turning_points;
  std::function<double(double)> total;  // optional fast path for the sum
};

using Interval = std::pair<double, double>;

class DriverRepresentation {
 public:
  explicit DriverRepresentation(std::vector<DriverBlock> blocks);

  static DriverRepresentation comonotone(const std::vector<MarginalDistribution>& margins);
  static DriverRepresentation counter_monotone(const MarginalDistribution& a,
                                               const MarginalDistribution& b);
  static DriverRepresentation ordinal_sum(const MarginalDistribution& a,
                                          const MarginalDistribution& b);
  static DriverRepresentation functional(const MarginalDistribution& driver,
                                         const std::vector<CatalogMap>& maps);

  // Each component chain is applied after the existing component value; maps must
  // be increasing. Turning points of the new total are found numerically.
  DriverRepresentation compose(const std::vector<std::vector<MonotoneMap>>& chains) const;

  std::size_t dimension() const;
  const std::vector<DriverBlock>& blocks() const { return blocks_; }
  double total(std::size_t block, double u) const;

  // Lebesgue measure of {u : h(u) <= s} (or < s when strict).
  double measure_sum_le(double s, bool strict = false) const;
  // Measure of {u : g_i(u) <= x_i for all i}; +inf entries are unconstrained.
  double measure_joint(std::span<const double> x) const;
  // Measure of {u : g_i(u) <= x, h(u) <= s}.
  double measure_component_and_sum(std::size_t i, double x, double s) const;
  std::vector<Interval> sum_sublevel_intervals(double s, bool strict = false) const;
  double sum_infimum() const;

 private:
  std::vector<DriverBlock> blocks_;
};

// Numerically located interior extrema of the block total.
std::vector<double> detect_turning_points(const DriverBlock& block, int scan_points = 2049);

// Sub-interval of [a,b] where a monotone g satisfies g <= x (g < x when strict).
Interval monotone_sublevel(const std::function<double(double)>& g, bool increasing, double a,
                           double b, double x, bool strict = false);

std::optional<DriverRepresentation> driver_representation(
    const DependenceModel& model, const std::vector<MarginalDistribution>& margins);

}  // namespace varagg
