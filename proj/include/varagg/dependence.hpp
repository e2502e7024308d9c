#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "varagg/margins.hpp"

namespace varagg {

enum class DependenceKind {
  Comonotone,
  CounterMonotoneBivariate,
  Independent,
  OrdinalSumWW,
  FunctionalCoupling,
  MutuallyExclusiveDyadic,
  BivariateParetoII,
};

std::string kind_name(DependenceKind k);

// Component maps of a functional coupling: "x", "1/x", "1/(1+x)".
enum class CatalogMap { Identity, Reciprocal, ReciprocalOnePlus };

std::string catalog_map_name(CatalogMap m);
CatalogMap parse_catalog_map(const std::string& s);
double apply_catalog_map(CatalogMap m, double x);

struct DependenceModel {
  DependenceKind kind = DependenceKind::Independent;
  std::optional<MarginalDistribution> driver;
  std::vector<CatalogMap> maps;
  double pareto_alpha = 1.0;
  int dyadic_K = 60;

  static DependenceModel comonotone();
  static DependenceModel counter_monotone();
  static DependenceModel independent();
  static DependenceModel ordinal_sum();
  static DependenceModel functional(const MarginalDistribution& driver, std::vector<CatalogMap> maps);
  static DependenceModel mutually_exclusive_dyadic(int K = 60);
  static DependenceModel bivariate_pareto(double alpha);

  // Dimension forced by the kind, if any.
  std::optional<std::size_t> fixed_dimension() const;
  // Kinds whose margins are determined by the coupling itself.
  bool determines_margins() const;
  std::vector<MarginalDistribution> implied_margins() const;
  std::string describe() const;
};

// Throws ConfigurationError when margins and model are incompatible.
void validate(const DependenceModel& model, const std::vector<MarginalDistribution>& margins);

double joint_cdf(const DependenceModel& model, const std::vector<MarginalDistribution>& margins,
                 std::span<const double> x);
// P(X_i > x_i for all i), by inclusion-exclusion over joint_cdf.
double joint_ddf(const DependenceModel& model, const std::vector<MarginalDistribution>& margins,
                 std::span<const double> x);
double diagonal_cdf(const DependenceModel& model, const std::vector<MarginalDistribution>& margins,
                    double t);

// Exact sampler. draw(i) depends only on (seed, stream, i).
class Sampler {
 public:
  Sampler(DependenceModel model, std::vector<MarginalDistribution> margins, std::uint64_t seed,
          std::uint32_t stream = 0);

  std::size_t dimension() const { return margins_.size(); }
  void draw(std::uint64_t index, std::span<double> out) const;

 private:
  DependenceModel model_;
  std::vector<MarginalDistribution> margins_;
  std::uint64_t seed_;
  std::uint32_t stream_;
};

// Row-major count x n matrix.
std::vector<double> sample(const DependenceModel& model,
                           const std::vector<MarginalDistribution>& margins, std::size_t count,
                           std::uint64_t seed);

// Quantile extended to u in [0,1] by the endpoints.
double quantile01(const MarginalDistribution& m, double u);

}  // namespace varagg
