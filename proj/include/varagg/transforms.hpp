#pragma once

#include <string>
#include <vector>

#include "varagg/aggregate.hpp"
#include "varagg/properties.hpp"
#include "varagg/risk_vector.hpp"

namespace varagg {

enum class TransformKind { Shift, Reflect, ConvexMap };
enum class ConvexFamily { Power, Expm1 };

std::string transform_kind_name(TransformKind k);
std::string convex_family_name(ConvexFamily f);

struct TransformSpec {
  TransformKind kind = TransformKind::Shift;
  std::vector<double> a;  // Shift
  std::vector<double> b;  // Reflect
  ConvexFamily map = ConvexFamily::Power;
  double c = 1.0;  // Power exponent
  // Fixed points of the convex maps; empty means each margin's lower endpoint.
  std::vector<double> anchors;

  static TransformSpec shift(std::vector<double> a);
  static TransformSpec reflect(std::vector<double> b);
  static TransformSpec power(double c);
  static TransformSpec expm1();
};

RiskVector shift(const RiskVector& rv, const std::vector<double>& a);
RiskVector reflect(const RiskVector& rv, const std::vector<double>& b);
// xi_i strictly increasing and convex with xi_i(a_i) = a_i at the lower endpoint a_i.
RiskVector convex_transform(const RiskVector& rv, const TransformSpec& spec);
RiskVector apply_transform(const RiskVector& rv, const TransformSpec& spec);

// Per-component constants c_i of an affine vector Y_i = c_i +- X_i.
std::vector<double> affine_constants(const RiskVector& rv);

// F_{S^a}(t + a_+) <= prod F_{X_i^a}(t + a_i).
PropertyVerdict check_shifted_nsd(const RiskVector& rv_a, const SumDistribution& sd_a,
                                  const TGrid& grid = {});
// P(S^b > b_+ - t) <= prod P(X_i^b > b_i - t).
PropertyVerdict check_reflected_nsd(const RiskVector& rv_b, const SumDistribution& sd_b,
                                    const TGrid& grid = {});

// x log F_{X^a}(x + a).
double shifted_phi(const MarginalDistribution& margin_a, double a, double x);
// x log P(X^b > b - x).
double reflected_phi(const MarginalDistribution& margin_b, double b, double x);

}  // namespace varagg
