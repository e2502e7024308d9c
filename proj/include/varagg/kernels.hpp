#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace varagg {

class RiskVector;

// Every data-parallel loop has a serial reference and an OpenMP version that
// must produce bitwise-identical output.
enum class Exec { Serial, Parallel };

std::string exec_name(Exec e);

namespace kernels {

// Sums S_i = sum_j X_ij of draws i in [first, first + n).
std::vector<double> sample_sums(const RiskVector& rv, std::size_t n, std::uint64_t seed, Exec exec,
                                std::uint64_t first = 0);

// Row-major n x d matrix of draws.
std::vector<double> sample_vectors(const RiskVector& rv, std::size_t n, std::uint64_t seed,
                                   Exec exec, std::uint64_t first = 0);

// f evaluated at each point: quantile grids, convolution tabulation, CDF curves.
std::vector<double> map_grid(const std::function<double(double)>& f, const std::vector<double>& xs,
                             Exec exec);

// sup_x |F_n(x) - F(x)| over the points of a sorted sample, using both one-sided
// limits of the empirical CDF at each distinct point. stride > 1 evaluates every
// stride-th distinct point only.
double ks_statistic(const std::vector<double>& sorted, const std::function<double(double)>& cdf,
                    const std::function<double(double)>& cdf_left, Exec exec,
                    std::size_t stride = 1);

// Certified upper bound on sup_x |F_n(x) - F(x)| that evaluates F only at every
// stride-th distinct sample point. Between two evaluated points both F and F_n are
// monotone, so the gap contributes at most max(F_n(b-) - F(a), F(b-) - F_n(a)).
// stride = 1 reproduces ks_statistic.
double ks_upper_bound(const std::vector<double>& sorted, const std::function<double(double)>& cdf,
                      const std::function<double(double)>& cdf_left, Exec exec,
                      std::size_t stride);

struct ArgMax {
  std::uint64_t index = 0;
  double value = -1.0 / 0.0;
};

// argmax of f over [0, n); ties resolve to the smallest index.
ArgMax search_max(std::uint64_t n, const std::function<double(std::uint64_t)>& f, Exec exec);

}  // namespace kernels
}  // namespace varagg
