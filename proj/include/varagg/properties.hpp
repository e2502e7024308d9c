#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "varagg/aggregate.hpp"
#include "varagg/kernels.hpp"
#include "varagg/margins.hpp"
#include "varagg/risk_vector.hpp"

namespace varagg {

enum class Property { NSD, NLODDiagonal, NUODDiagonal, SD, PhiNonIncreasing, ReverseHazard, ScaleShrink };
enum class Outcome { CertifiedHolds, NumericallyHolds, FailsWithWitness, NotApplicable };

std::string property_name(Property p);
std::string outcome_name(Outcome o);

struct PropertyVerdict {
  Property property = Property::NSD;
  Outcome outcome = Outcome::NumericallyHolds;
  // t for diagonal checks, (x, y) for phi, the x-vector for SD, (x, lambda) for scale shrinking.
  std::vector<double> witness;
  // Size of the violation at the witness (positive when it fails).
  double violation = 0.0;
  std::optional<std::size_t> margin_index;
  // Boundaries of the violation set, refined by bisection.
  std::vector<double> sign_changes;
  std::string probe_spec;
  std::optional<std::uint64_t> seed;

  bool holds() const {
    return outcome == Outcome::CertifiedHolds || outcome == Outcome::NumericallyHolds;
  }
};

inline constexpr double kPropertySlack = 1e-10;

// Log-spaced probe grid.
struct TGrid {
  double lo = 1e-6;
  double hi = 1e8;
  std::size_t points = 500;
  std::vector<double> values() const;
  std::string describe() const;
};

// F_S(t) <= prod F_i(t) for t >= 0.
PropertyVerdict check_nsd(const RiskVector& rv, const SumDistribution& sd, const TGrid& grid = {});
// F_X(t,...,t) <= prod F_i(t).
PropertyVerdict check_nlod_diagonal(const RiskVector& rv, const TGrid& grid = {});
// P(X > t,...,t) <= prod P(X_i > t).
PropertyVerdict check_nuod_diagonal(const RiskVector& rv, const TGrid& grid = {});

// Generic diagonal check: fails where diff(t) > slack; refines the argmax and the
// boundaries of the violation set.
PropertyVerdict diagonal_check(Property property, const std::function<double(double)>& diff,
                               const std::vector<double>& ts, const std::string& probe_spec);

// x log F(x); 0 at x = 0, -inf where F(x) = 0 < x.
double phi_eval(const MarginalDistribution& m, double x);

// Closed-form certificate for the analysed families: true / false when the family has
// a known range, nullopt otherwise.
std::optional<bool> phi_certified(const MarginalDistribution& m);
std::string phi_certified_range(Family f);

// Numeric scan of phi on a log grid (atoms included for discrete laws).
PropertyVerdict phi_scan(const MarginalDistribution& m, std::size_t points = 4000);
PropertyVerdict phi_monotonicity(const MarginalDistribution& m);

double logcauchy_objective(double u);
double logcauchy_threshold();

struct SdSearchSpec {
  std::uint64_t trials = 100000;
  std::uint64_t seed = 20240611;
  Exec exec = Exec::Parallel;
};

// Phi(x) >= Phi(s,...,s), s = sum x_i.
PropertyVerdict check_sd(const std::vector<MarginalDistribution>& margins,
                         const SdSearchSpec& spec = {});
double sd_gap(const std::vector<MarginalDistribution>& margins, const std::vector<double>& x);

std::vector<double> default_phi_grid(const MarginalDistribution& m, std::size_t points = 2000);

// x h(x) <= -log F(x) with h = f/F.
PropertyVerdict reverse_hazard_check(const MarginalDistribution& m, const std::vector<double>& xs);
// G(lambda x) <= G(x)/lambda with G = log F.
PropertyVerdict scale_shrink_check(const MarginalDistribution& m, const std::vector<double>& xs,
                                   const std::vector<double>& lambdas = {1, 1.5, 2, 4, 10, 100, 1e3});

}  // namespace varagg
