#include "varagg/kernels.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>
#include <span>

#include "varagg/risk_vector.hpp"

namespace varagg {

std::string exec_name(Exec e) { return e == Exec::Serial ? "serial" : "parallel"; }

namespace kernels {
namespace {

// Exceptions must not escape an OpenMP region; the first one is rethrown after it.
class ExceptionSlot {
 public:
  template <class F>
  void run(F&& f) {
    try {
      f();
    } catch (...) {
      std::lock_guard<std::mutex> lock(mu_);
      if (!ep_) ep_ = std::current_exception();
    }
  }
  void rethrow() {
    if (ep_) std::rethrow_exception(ep_);
  }

 private:
  std::mutex mu_;
  std::exception_ptr ep_;
};

bool better(const ArgMax& a, const ArgMax& b) {
  if (std::isnan(a.value)) return false;
  if (std::isnan(b.value)) return true;
  return a.value > b.value || (a.value == b.value && a.index < b.index);
}

}  // namespace

std::vector<double> sample_sums(const RiskVector& rv, std::size_t n, std::uint64_t seed, Exec exec,
                                std::uint64_t first) {
  const VectorSampler s(rv, seed);
  const std::size_t d = s.dimension();
  std::vector<double> out(n);
  if (exec == Exec::Serial) {
    std::vector<double> row(d);
    for (std::size_t i = 0; i < n; ++i) out[i] = s.draw_sum(first + i, row);
    return out;
  }
  ExceptionSlot err;
#pragma omp parallel
  {
    std::vector<double> row(d);
#pragma omp for schedule(static)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) {
      err.run([&] { out[i] = s.draw_sum(first + i, row); });
    }
  }
  err.rethrow();
  return out;
}

std::vector<double> sample_vectors(const RiskVector& rv, std::size_t n, std::uint64_t seed,
                                   Exec exec, std::uint64_t first) {
  const VectorSampler s(rv, seed);
  const std::size_t d = s.dimension();
  std::vector<double> out(n * d);
  if (exec == Exec::Serial) {
    for (std::size_t i = 0; i < n; ++i) s.draw(first + i, std::span<double>(out.data() + i * d, d));
    return out;
  }
  ExceptionSlot err;
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) {
    err.run([&] { s.draw(first + i, std::span<double>(out.data() + i * d, d)); });
  }
  err.rethrow();
  return out;
}

std::vector<double> map_grid(const std::function<double(double)>& f, const std::vector<double>& xs,
                             Exec exec) {
  std::vector<double> out(xs.size());
  if (exec == Exec::Serial) {
    for (std::size_t i = 0; i < xs.size(); ++i) out[i] = f(xs[i]);
    return out;
  }
  ExceptionSlot err;
#pragma omp parallel for schedule(dynamic, 8)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(xs.size()); ++i) {
    err.run([&] { out[i] = f(xs[i]); });
  }
  err.rethrow();
  return out;
}

double ks_statistic(const std::vector<double>& sorted, const std::function<double(double)>& cdf,
                    const std::function<double(double)>& cdf_left, Exec exec, std::size_t stride) {
  const std::size_t n = sorted.size();
  if (n == 0) return 0.0;
  // Start indices of runs of equal values.
  std::vector<std::size_t> starts;
  for (std::size_t i = 0; i < n; ++i) {
    if (i == 0 || sorted[i] != sorted[i - 1]) starts.push_back(i);
  }
  const std::size_t m = starts.size();
  const double dn = static_cast<double>(n);
  auto at = [&](std::size_t k) {
    const std::size_t lo = starts[k];
    const std::size_t hi = k + 1 < m ? starts[k + 1] : n;
    const double x = sorted[lo];
    const double above = std::fabs(static_cast<double>(hi) / dn - cdf(x));
    const double below = std::fabs(static_cast<double>(lo) / dn - cdf_left(x));
    return std::max(above, below);
  };
  stride = std::max<std::size_t>(stride, 1);
  const std::size_t count = (m + stride - 1) / stride;
  auto index = [&](std::size_t j) { return std::min(j * stride, m - 1); };
  double best = 0.0;
  if (exec == Exec::Serial) {
    for (std::size_t j = 0; j < count; ++j) best = std::max(best, at(index(j)));
    best = std::max(best, at(m - 1));
    return best;
  }
  ExceptionSlot err;
#pragma omp parallel for schedule(dynamic, 64) reduction(max : best)
  for (std::int64_t j = 0; j < static_cast<std::int64_t>(count); ++j) {
    err.run([&] { best = std::max(best, at(index(j))); });
  }
  err.rethrow();
  best = std::max(best, at(m - 1));
  return best;
}

double ks_upper_bound(const std::vector<double>& sorted, const std::function<double(double)>& cdf,
                      const std::function<double(double)>& cdf_left, Exec exec,
                      std::size_t stride) {
  const std::size_t n = sorted.size();
  if (n == 0) return 0.0;
  std::vector<std::size_t> starts;
  for (std::size_t i = 0; i < n; ++i) {
    if (i == 0 || sorted[i] != sorted[i - 1]) starts.push_back(i);
  }
  const std::size_t m = starts.size();
  stride = std::max<std::size_t>(stride, 1);
  std::vector<std::size_t> picks;
  for (std::size_t k = 0; k < m; k += stride) picks.push_back(k);
  if (picks.back() != m - 1) picks.push_back(m - 1);
  const std::size_t q = picks.size();
  std::vector<double> f(q), fl(q);
  auto eval = [&](std::size_t j) {
    const double x = sorted[starts[picks[j]]];
    f[j] = cdf(x);
    fl[j] = cdf_left(x);
  };
  if (exec == Exec::Serial) {
    for (std::size_t j = 0; j < q; ++j) eval(j);
  } else {
    ExceptionSlot err;
#pragma omp parallel for schedule(dynamic, 64)
    for (std::int64_t j = 0; j < static_cast<std::int64_t>(q); ++j) {
      err.run([&] { eval(static_cast<std::size_t>(j)); });
    }
    err.rethrow();
  }
  const double dn = static_cast<double>(n);
  auto fn_at = [&](std::size_t k) {
    return static_cast<double>(k + 1 < m ? starts[k + 1] : n) / dn;
  };
  auto fn_before = [&](std::size_t k) { return static_cast<double>(starts[k]) / dn; };
  double best = 0.0;
  for (std::size_t j = 0; j < q; ++j) {
    const std::size_t k = picks[j];
    best = std::max({best, std::fabs(fn_at(k) - f[j]), std::fabs(fn_before(k) - fl[j])});
    if (j + 1 < q) {
      const std::size_t kb = picks[j + 1];
      if (kb > k + 1) {
        best = std::max({best, fn_before(kb) - f[j], fl[j + 1] - fn_at(k)});
      }
    }
  }
  return best;
}

ArgMax search_max(std::uint64_t n, const std::function<double(std::uint64_t)>& f, Exec exec) {
  ArgMax best;
  if (exec == Exec::Serial) {
    for (std::uint64_t i = 0; i < n; ++i) {
      const ArgMax c{i, f(i)};
      if (better(c, best)) best = c;
    }
    return best;
  }
  ExceptionSlot err;
#pragma omp parallel
  {
    ArgMax local;
#pragma omp for schedule(static)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) {
      err.run([&] {
        const ArgMax c{static_cast<std::uint64_t>(i), f(static_cast<std::uint64_t>(i))};
        if (better(c, local)) local = c;
      });
    }
#pragma omp critical
    if (better(local, best)) best = local;
  }
  err.rethrow();
  return best;
}

}  // namespace kernels
}  // namespace varagg
