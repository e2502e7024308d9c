#pragma once

#include <functional>
#include <string>
#include <limits>

namespace varagg {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Left-quantile inf{x : cdf(x) >= p} by a safeguarded bracketing search (Illinois
// regula falsi with bisection fallback). The bracket starts at
// [lower, lower + 1] and the upper end is doubled until cdf >= p; for lower = -inf
// the lower end is expanded downwards from 0 in the same way. Returns the upper end
// once its width is below 1e-12 (1 + |x|).
double bisect_left_quantile(const std::function<double(double)>& cdf, double p, double lower,
                            double upper = kInf);

// Same search started from [lo, hi] when cdf(lo) < p <= cdf(hi); otherwise the
// bracket policy above from lower.
double bracketed_left_quantile(const std::function<double(double)>& cdf, double p, double lo,
                               double hi, double lower);

// inf{x : cdf(x) > q}, same bracket policy.
double bisect_right_quantile(const std::function<double(double)>& cdf, double q, double lower,
                             double upper = kInf);

// Boundary of a predicate that is false at lo and true at hi. Returns the true end of
// the final bracket, narrowed until hi - lo <= tol or no representable midpoint remains.
double bisect_predicate(const std::function<bool(double)>& pred, double lo, double hi,
                        double tol = 0.0);

struct GoldenResult {
  double x;
  double value;
};

// Minimum of a unimodal function on [a, b].
GoldenResult golden_section_min(const std::function<double(double)>& f, double a, double b,
                                double tol);

// Shortest round-trip decimal text of a double.
std::string format_double(double x);

}  // namespace varagg
