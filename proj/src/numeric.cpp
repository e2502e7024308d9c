#include "varagg/numeric.hpp"

#include <charconv>
#include <algorithm>
#include <cmath>

#include "varagg/errors.hpp"

namespace varagg {
namespace {

bool close_enough(double lo, double hi) {
  const double mid = lo + 0.5 * (hi - lo);
  return hi - lo <= 1e-12 * (1.0 + std::fabs(hi)) || mid <= lo || mid >= hi;
}

// Illinois-modified regula falsi on a bracket whose predicate is false at lo and true
// at hi, with a bisection step whenever three steps in a row fail to halve it.
template <class Cdf>
double solve_bracket(const Cdf& cdf, double level, bool strict, double lo, double hi, double flo,
                     double fhi) {
  auto reached = [&](double f) { return strict ? f > level : f >= level; };
  double glo = flo - level;
  double ghi = fhi - level;
  int side = 0;
  int stalled = 0;
  double ref_width = hi - lo;
  while (!close_enough(lo, hi)) {
    const double mid = lo + 0.5 * (hi - lo);
    double x = mid;
    if (stalled < 3 && ghi > glo && std::isfinite(ghi) && std::isfinite(glo)) {
      const double t = hi - ghi * (hi - lo) / (ghi - glo);
      if (t > lo && t < hi) x = t;
    }
    const double fx = cdf(x);
    if (reached(fx)) {
      hi = x;
      ghi = fx - level;
      if (side == 1) glo *= 0.5;
      side = 1;
    } else {
      lo = x;
      glo = fx - level;
      if (side == -1) ghi *= 0.5;
      side = -1;
    }
    if (hi - lo <= 0.5 * ref_width) {
      ref_width = hi - lo;
      stalled = 0;
    } else if (++stalled > 3) {
      stalled = 0;
      ref_width = hi - lo;
    }
  }
  return hi;
}

// Smallest x with cdf(x) >= level (strict = false) or cdf(x) > level (strict = true),
// bracketed by doubling from lower.
template <class Cdf>
double bracket_and_solve(const Cdf& cdf, double level, bool strict, double lower, double upper) {
  auto reached = [&](double f) { return strict ? f > level : f >= level; };
  double lo;
  double hi;
  double flo = 0.0;
  double fhi = 0.0;
  if (std::isinf(lower)) {
    const double f0 = cdf(0.0);
    if (reached(f0)) {
      hi = 0.0;
      fhi = f0;
      double step = 1.0;
      lo = -step;
      flo = cdf(lo);
      while (reached(flo)) {
        hi = lo;
        fhi = flo;
        step *= 2.0;
        if (step > 1e308) return -kInf;
        lo = -step;
        flo = cdf(lo);
      }
    } else {
      lo = 0.0;
      flo = f0;
      double step = 1.0;
      hi = step;
      fhi = cdf(hi);
      while (!reached(fhi)) {
        if (hi >= upper) return upper;
        lo = hi;
        flo = fhi;
        step *= 2.0;
        if (step > 1e308) return kInf;
        hi = std::min(step, upper);
        fhi = cdf(hi);
      }
    }
  } else {
    flo = cdf(lower);
    if (reached(flo)) return lower;
    lo = lower;
    double step = 1.0;
    hi = std::min(lower + step, upper);
    fhi = cdf(hi);
    while (!reached(fhi)) {
      if (hi >= upper) return upper;
      lo = hi;
      flo = fhi;
      step *= 2.0;
      hi = lower + step;
      if (hi > upper) hi = upper;
      if (step > 1e308) return kInf;
      fhi = cdf(hi);
    }
  }
  return solve_bracket(cdf, level, strict, lo, hi, flo, fhi);
}

}  // namespace

double bisect_left_quantile(const std::function<double(double)>& cdf, double p, double lower,
                            double upper) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("quantile: p must lie in (0,1)");
  return bracket_and_solve(cdf, p, false, lower, upper);
}

double bracketed_left_quantile(const std::function<double(double)>& cdf, double p, double lo,
                               double hi, double lower) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("quantile: p must lie in (0,1)");
  if (lo < hi) {
    const double flo = cdf(lo);
    const double fhi = cdf(hi);
    if (flo < p && fhi >= p) return solve_bracket(cdf, p, false, lo, hi, flo, fhi);
  }
  return bracket_and_solve(cdf, p, false, lower, kInf);
}

double bisect_right_quantile(const std::function<double(double)>& cdf, double q, double lower,
                             double upper) {
  if (!(q >= 0.0 && q < 1.0)) throw DomainError("right quantile: level must lie in [0,1)");
  return bracket_and_solve(cdf, q, true, lower, upper);
}

double bisect_predicate(const std::function<bool(double)>& pred, double lo, double hi,
                        double tol) {
  for (int i = 0; i < 2000; ++i) {
    const double mid = lo + 0.5 * (hi - lo);
    if (hi - lo <= tol || mid <= lo || mid >= hi) break;
    if (pred(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

GoldenResult golden_section_min(const std::function<double(double)>& f, double a, double b,
                                double tol) {
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = f(d);
    }
    if (c >= d) break;
  }
  const double x = 0.5 * (a + b);
  return {x, f(x)};
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

}  // namespace varagg
