#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace varagg {

enum class Family {
  ParetoII,
  Frechet,
  Levy,
  BetaPrimeOne,
  LogHazard,
  LogCauchy,
  InverseGamma,
  UniformUnit,
  PiecewiseFrechetPower,
  DyadicDiscrete,
  Tabulated,
  Mapped,
};

std::string family_name(Family f);

enum class MapKind { Shift, Reflect, Reciprocal, ReciprocalOnePlus, Power, Expm1 };

// Strictly monotone continuous map y = m(x).
//   Shift:             x + param
//   Reflect:           param - x
//   Reciprocal:        1 / x            (x > 0)
//   ReciprocalOnePlus: 1 / (1 + x)      (x > -1)
//   Power:             anchor + (x - anchor)^param, param >= 1, x >= anchor
//   Expm1:             anchor + exp(x - anchor) - 1, x >= anchor
struct MonotoneMap {
  MapKind kind = MapKind::Shift;
  double param = 0.0;
  double anchor = 0.0;

  static MonotoneMap shift(double a) { return {MapKind::Shift, a, 0.0}; }
  static MonotoneMap reflect(double b) { return {MapKind::Reflect, b, 0.0}; }
  static MonotoneMap reciprocal() { return {MapKind::Reciprocal, 0.0, 0.0}; }
  static MonotoneMap reciprocal_one_plus() { return {MapKind::ReciprocalOnePlus, 0.0, 0.0}; }
  static MonotoneMap power(double c, double anchor) { return {MapKind::Power, c, anchor}; }
  static MonotoneMap expm1(double anchor) { return {MapKind::Expm1, 0.0, anchor}; }

  bool increasing() const;
  double apply(double x) const;
  // Preimage of y, extended to +-inf outside the image so that the margin CDF of
  // the mapped law can be evaluated for every real y.
  double inverse(double y) const;
  // |d inverse / dy|
  double inverse_jacobian(double y) const;
  std::string describe() const;
};

enum class Interpolation { Linear, Step };

struct Knots {
  std::vector<double> x;
  std::vector<double> F;
  Interpolation mode = Interpolation::Linear;
};

class MarginalDistribution {
 public:
  static MarginalDistribution pareto2(double alpha, double theta = 1.0);
  static MarginalDistribution frechet(double alpha, double theta = 1.0);
  static MarginalDistribution levy(double theta);
  static MarginalDistribution beta_prime1(double alpha);
  static MarginalDistribution log_hazard(double alpha);
  static MarginalDistribution log_cauchy(double alpha);
  static MarginalDistribution inverse_gamma(double alpha, double theta = 1.0);
  static MarginalDistribution uniform01();
  static MarginalDistribution pw_frechet();
  static MarginalDistribution dyadic(int K = 60);
  static MarginalDistribution tabulated(std::vector<double> x, std::vector<double> F,
                                        Interpolation mode = Interpolation::Linear);
  static MarginalDistribution mapped(const MonotoneMap& m, const MarginalDistribution& base);

  MarginalDistribution with_shift(double a) const;

  double cdf(double x) const;
  double cdf_left(double x) const;  // P(X < x)
  double ddf(double x) const;
  double log_cdf(double x) const;
  std::optional<double> density(double x) const;
  double quantile(double p) const;
  double quantile_right(double q) const;  // inf{x : F(x) > q}, q in [0,1)

  double lower_endpoint() const;
  double upper_endpoint() const;
  bool is_continuous() const;
  bool has_closed_form_quantile() const;

  Family family() const { return family_; }
  double alpha() const { return alpha_; }
  double theta() const { return theta_; }
  double shift() const { return shift_; }
  int truncation() const { return K_; }
  const MonotoneMap& map() const { return map_; }
  const MarginalDistribution& base() const;
  const Knots& knots() const;
  std::string describe() const;

 private:
  MarginalDistribution() = default;

  double base_cdf(double z) const;
  double base_cdf_left(double z) const;
  double base_ddf(double z) const;
  double base_log_cdf(double z) const;
  std::optional<double> base_density(double z) const;
  double base_quantile(double p) const;
  double base_quantile_right(double q) const;
  double base_lower() const;
  double base_upper() const;

  Family family_ = Family::UniformUnit;
  double alpha_ = 0.0;
  double theta_ = 0.0;
  double shift_ = 0.0;
  int K_ = 0;
  double lga_ = 0.0;
  MonotoneMap map_{};
  std::shared_ptr<const MarginalDistribution> base_;
  std::shared_ptr<const Knots> knots_;
};

}  // namespace varagg
