#include "varagg/report_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

#include "varagg/errors.hpp"
#include "varagg/numeric.hpp"

namespace varagg {

namespace {

// JSON has no infinities; they are written as strings.
Json number(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

Json numbers(const std::vector<double>& xs) {
  Json a = Json::array();
  for (double x : xs) a.push_back(number(x));
  return a;
}

}  // namespace

std::string gap_csv(const AdditivityReport& r) {
  std::ostringstream os;
  os << "p,var_sum,var_margin_total,gap,class\n";
  for (std::size_t i = 0; i < r.p.size(); ++i) {
    os << format_double(r.p[i]) << ',' << format_double(r.var_sum[i]) << ','
       << format_double(r.var_margin_total[i]) << ',' << format_double(r.gap[i]) << ','
       << gap_class_name(r.cls[i]) << '\n';
  }
  return os.str();
}

std::string cdf_csv(const std::vector<double>& xs, const std::vector<double>& Fs) {
  if (xs.size() != Fs.size()) throw ConfigurationError("cdf_csv: column lengths differ");
  std::ostringstream os;
  os << "x,F\n";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    os << format_double(xs[i]) << ',' << format_double(Fs[i]) << '\n';
  }
  return os.str();
}

Json report_to_json(const AdditivityReport& r) {
  Json j;
  j["p"] = numbers(r.p);
  j["var_sum"] = numbers(r.var_sum);
  j["var_margin_total"] = numbers(r.var_margin_total);
  j["gap"] = numbers(r.gap);
  Json cls = Json::array();
  for (GapClass c : r.cls) cls.push_back(gap_class_name(c));
  j["class"] = cls;
  j["crossings"] = numbers(r.crossings);
  j["abs_tol"] = r.abs_tol;
  j["p_band"] = r.p_band;
  j["sum_method"] = r.sum_method;
  j["margin_methods"] = r.margin_methods;
  j["overall"] = overall_name(r.overall);
  return j;
}

Json verdict_to_json(const PropertyVerdict& v) {
  Json j;
  j["property"] = property_name(v.property);
  j["outcome"] = outcome_name(v.outcome);
  j["witness"] = numbers(v.witness);
  j["violation"] = number(v.violation);
  j["margin_index"] = v.margin_index ? Json(*v.margin_index) : Json(nullptr);
  j["sign_changes"] = numbers(v.sign_changes);
  j["probe_spec"] = v.probe_spec;
  j["seed"] = v.seed ? Json(*v.seed) : Json(nullptr);
  return j;
}

Json sum_sidecar(const SumDistribution& sd) {
  Json j;
  j["method"] = method_name(sd.method());
  j["formula_tag"] = sd.formula_tag();
  if (sd.method() == SumMethod::MonteCarlo) {
    j["seed"] = sd.seed();
    j["samples"] = sd.sample_count();
    j["dkw_epsilon"] = sd.dkw_epsilon(1e-6);
  } else {
    j["seed"] = nullptr;
  }
  j["achieved_tolerance"] = sd.achieved_tolerance();
  return j;
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigurationError("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw ConfigurationError("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw ConfigurationError("cannot rename " + tmp.string() + ": " + ec.message());
  }
}

}  // namespace varagg
