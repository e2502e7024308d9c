#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "varagg/additivity.hpp"
#include "varagg/aggregate.hpp"
#include "varagg/errors.hpp"
#include "varagg/fixtures.hpp"
#include "varagg/model_spec.hpp"
#include "varagg/numeric.hpp"
#include "varagg/properties.hpp"
#include "varagg/report_io.hpp"

namespace fs = std::filesystem;
using namespace varagg;

namespace {

constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kConfig = 2;

struct Globals {
  std::string out;
  std::optional<std::uint64_t> seed;
  std::string format = "csv";
  std::optional<double> tol;
};

ModelSpec load(const std::string& path, const Globals& g) {
  ModelSpec spec = load_model_spec(path);
  if (g.seed) spec.analysis.mc.seed = *g.seed;
  if (g.tol) spec.analysis.tolerances.gap_abs = *g.tol;
  return spec;
}

// Writes to --out when given, otherwise to stdout.
void emit(const Globals& g, const std::string& file, const std::string& content) {
  if (g.out.empty()) {
    std::cout << content;
  } else {
    write_atomic(fs::path(g.out) / file, content);
    std::cerr << "wrote " << (fs::path(g.out) / file).string() << "\n";
  }
}

std::vector<PropertyVerdict> verdicts(const std::string& which, const ModelSpec& spec,
                                      const RiskVector& rv, const SumDistribution& sd) {
  std::vector<PropertyVerdict> vs;
  SdSearchSpec sds;
  sds.seed = spec.analysis.mc.seed;
  if (which == "nsd") vs.push_back(check_nsd(rv, sd, spec.analysis.t_grid));
  if (which == "nlod") vs.push_back(check_nlod_diagonal(rv, spec.analysis.t_grid));
  if (which == "sd") vs.push_back(check_sd(rv.margins(), sds));
  if (which == "phi") {
    for (std::size_t i = 0; i < rv.dimension(); ++i) {
      PropertyVerdict v = phi_monotonicity(rv.margins()[i]);
      v.margin_index = i;
      vs.push_back(v);
    }
  }
  return vs;
}

Json verdict_array(const std::vector<PropertyVerdict>& vs) {
  Json a = Json::array();
  for (const auto& v : vs) a.push_back(verdict_to_json(v));
  return a;
}

int cmd_scan(const Globals& g, const std::string& path) {
  const ModelSpec spec = load(path, g);
  const RiskVector rv = spec.build();
  const SumDistribution sd = build_sum_distribution(rv, spec.sum_options());
  const AdditivityReport r =
      scan(rv, sd, spec.analysis.p_grid.values(), Exec::Parallel, spec.analysis.tolerances.gap_abs);
  if (g.format == "json") {
    emit(g, "report.json", report_to_json(r).dump(2) + "\n");
  } else {
    emit(g, "gap.csv", gap_csv(r));
  }
  return kPass;
}

int cmd_check(const Globals& g, const std::string& prop, const std::string& path) {
  const ModelSpec spec = load(path, g);
  const RiskVector rv = spec.build();
  const SumDistribution sd = build_sum_distribution(rv, spec.sum_options());
  const auto vs = verdicts(prop, spec, rv, sd);
  emit(g, prop + ".json", verdict_array(vs).dump(2) + "\n");
  for (const auto& v : vs) {
    if (!v.holds() && v.outcome != Outcome::NotApplicable) return kFail;
  }
  return kPass;
}

int cmd_analyze(const Globals& g, const std::string& path) {
  const ModelSpec spec = load(path, g);
  const RiskVector rv = spec.build();
  const SumDistribution sd = build_sum_distribution(rv, spec.sum_options());
  const AdditivityReport r =
      scan(rv, sd, spec.analysis.p_grid.values(), Exec::Parallel, spec.analysis.tolerances.gap_abs);
  std::vector<PropertyVerdict> vs;
  for (const char* p : {"nsd", "nlod", "sd", "phi"}) {
    if (std::string(p) == "nsd" && sd.lower_endpoint() < 0.0) continue;
    for (auto& v : verdicts(p, spec, rv, sd)) vs.push_back(std::move(v));
  }
  Json j;
  j["model"] = to_json(spec);
  j["sum"] = sum_sidecar(sd);
  j["overall"] = overall_name(r.overall);
  j["crossings"] = r.crossings;
  j["verdicts"] = verdict_array(vs);
  if (g.out.empty()) {
    std::cout << j.dump(2) << "\n";
  } else {
    emit(g, "analysis.json", j.dump(2) + "\n");
    emit(g, "gap.csv", gap_csv(r));
  }
  return kPass;
}

int cmd_truncate(const Globals& g, const std::string& path, double k) {
  const ModelSpec spec = load(path, g);
  const RiskVector rv = spec.build();
  const SumDistribution sd = build_sum_distribution(rv, spec.sum_options());
  const TruncatedVector tv = truncate_by_sum(rv, sd, k);
  std::ostringstream os;
  os << "p,var_sum_k,var_sum_at_p_level";
  for (std::size_t i = 0; i < rv.dimension(); ++i) os << ",tilde_var_" << i + 1;
  os << "\n";
  for (double p : default_p_grid(99, 0.01, 0.99)) {
    os << format_double(p) << ',' << format_double(tv.sum_quantile(p)) << ','
       << format_double(sd.quantile(p * tv.level()));
    for (std::size_t i = 0; i < rv.dimension(); ++i) os << ',' << format_double(tv.tilde_quantile(i, p));
    os << '\n';
  }
  std::cerr << "F_S(" << format_double(k) << ") = " << format_double(tv.level()) << "\n";
  emit(g, "truncation.csv", os.str());
  return kPass;
}

int cmd_reproduce(const Globals& g, const std::string& which) {
  FixtureOptions opt;
  if (g.seed) opt.seed = *g.seed;
  std::vector<std::string> ids;
  if (which == "all") {
    ids = fixture_ids();
  } else {
    ids = {which};
  }
  const fs::path out = g.out.empty() ? fs::path("varagg_out") : fs::path(g.out);
  std::vector<FixtureResult> results;
  for (const auto& id : ids) {
    results.push_back(run_fixture(id, opt));
    const FixtureResult& r = results.back();
    write_fixture(r, out);
    for (const auto& c : r.checks) {
      std::cout << (c.pass ? "PASS " : "FAIL ") << r.id << ": " << c.name << " expected "
                << c.expected << " actual " << c.actual << "\n";
    }
  }
  if (g.format == "json") {
    Json a = Json::array();
    for (const auto& r : results) {
      for (const auto& c : r.checks) {
        a.push_back(Json{{"fixture", r.id}, {"check", c.name}, {"expected", c.expected},
                         {"actual", c.actual}, {"tol", c.tol}, {"pass", c.pass}, {"source", c.source}});
      }
    }
    write_atomic(out / "summary.json", a.dump(2) + "\n");
  } else {
    write_atomic(out / "summary.csv", summary_csv(results));
  }
  bool ok = true;
  for (const auto& r : results) ok = ok && r.pass();
  return ok ? kPass : kFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"VaR aggregation analysis"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--out", g.out, "output directory");
  app.add_option("--seed", g.seed, "Monte Carlo seed");
  app.add_option("--format", g.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--tol", g.tol, "absolute gap tolerance")->check(CLI::NonNegativeNumber);

  std::string spec_path;
  std::string property;
  std::string fixture;
  double k = 0.0;

  auto* analyze = app.add_subcommand("analyze", "sum law, gap scan and property verdicts");
  analyze->add_option("spec", spec_path, "model spec JSON")->required();
  auto* check = app.add_subcommand("check", "one property verdict");
  check->add_option("property", property, "nsd, sd, phi or nlod")
      ->required()
      ->check(CLI::IsMember({"nsd", "sd", "phi", "nlod"}));
  check->add_option("spec", spec_path, "model spec JSON")->required();
  auto* scan_cmd = app.add_subcommand("scan", "VaR gap curve");
  scan_cmd->add_option("spec", spec_path, "model spec JSON")->required();
  auto* reproduce = app.add_subcommand("reproduce", "recompute a worked example");
  reproduce->add_option("fixture", fixture, "fixture id or all")->required();
  auto* truncate = app.add_subcommand("truncate", "condition on S <= k");
  truncate->add_option("spec", spec_path, "model spec JSON")->required();
  truncate->add_option("--k", k, "truncation level")->required();
  for (auto* sub : {analyze, check, scan_cmd, reproduce, truncate}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kConfig;
  }

  try {
    if (*analyze) return cmd_analyze(g, spec_path);
    if (*check) return cmd_check(g, property, spec_path);
    if (*scan_cmd) return cmd_scan(g, spec_path);
    if (*reproduce) return cmd_reproduce(g, fixture);
    if (*truncate) return cmd_truncate(g, spec_path, k);
  } catch (const ConfigurationError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kConfig;
  } catch (const DomainError& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return kConfig;
  } catch (const SizeError& e) {
    std::cerr << "size error: " << e.what() << "\n";
    return kConfig;
  }
  return kConfig;
}
