#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "varagg/kernels.hpp"
#include "varagg/model_spec.hpp"
#include "varagg/risk_vector.hpp"

namespace varagg {

// Closed-form sum quantiles and CDFs of the worked examples.
namespace closed_form {
double opener_var(double p);       // X + 1/X, X ~ Pareto(1, 1)
double plus_one_var(double p);     // X + 1/(1 + X)
double ordinal_var(double p);      // W/W ordinal sum of two Pareto(1, 1)
double triple_var(double p);       // X + X + 1/X
double triple_cdf(double s);
double bivariate_pareto_var(double p);  // alpha = 1
double golden_ratio();
double ordinal_crossing();  // (3 - sqrt 6) / 2
}  // namespace closed_form

// Model specs of the worked examples.
namespace models {
ModelSpec opener();
ModelSpec plus_one();
ModelSpec ordinal();
ModelSpec triple();
ModelSpec frechet_triple();
ModelSpec bivariate_pareto(double alpha);
ModelSpec dyadic(int K);
}  // namespace models

struct FixtureCheck {
  std::string name;
  std::string expected;
  std::string actual;
  double tol = 0.0;
  bool pass = false;
  // "closed form", "derived", "oracle" or "property".
  std::string source;
};

struct FixtureResult {
  std::string id;
  std::vector<FixtureCheck> checks;
  // File name relative to the fixture directory, and its content.
  std::vector<std::pair<std::string, std::string>> artifacts;
  bool pass() const;
};

struct FixtureOptions {
  std::uint64_t seed = 20240611;
  std::size_t mc_samples = 1000000;
  Exec exec = Exec::Parallel;
};

const std::vector<std::string>& fixture_ids();
// Throws ConfigurationError for an unknown id.
FixtureResult run_fixture(const std::string& id, const FixtureOptions& opt = {});

std::string checks_csv(const FixtureResult& r);
std::string summary_csv(const std::vector<FixtureResult>& rs);
// Writes out_dir/<id>/<artifact> for every artifact plus checks.csv.
void write_fixture(const FixtureResult& r, const std::filesystem::path& out_dir);

}  // namespace varagg
