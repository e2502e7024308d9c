#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "varagg/additivity.hpp"
#include "varagg/aggregate.hpp"
#include "varagg/model_spec.hpp"
#include "varagg/properties.hpp"

namespace varagg {

// Numbers use the shortest round-trip decimal form, so equal inputs give equal bytes.
std::string gap_csv(const AdditivityReport& r);
std::string cdf_csv(const std::vector<double>& xs, const std::vector<double>& Fs);

Json report_to_json(const AdditivityReport& r);
Json verdict_to_json(const PropertyVerdict& v);
// Method, formula tag, seed and tolerance of a sum law.
Json sum_sidecar(const SumDistribution& sd);

// Writes through a temporary file in the same directory, then renames it into place.
void write_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace varagg
