#include "varagg/special_functions.hpp"

#include <cmath>
#include <limits>

#include "varagg/errors.hpp"

namespace varagg {
namespace {

constexpr double kEps = 1e-17;
constexpr double kTiny = 1e-300;
constexpr int kMaxIter = 100000;

// log P(a, x) by the power series, valid for x < a + 1.
double log_lower_series(double a, double x, double lga) {
  double ap = a;
  double del = 1.0 / a;
  double sum = del;
  for (int n = 0; n < kMaxIter; ++n) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * kEps) break;
  }
  return std::log(sum) - x + a * std::log(x) - lga;
}

// log Q(a, x) by the modified Lentz continued fraction, valid for x >= a + 1.
double log_upper_cf(double a, double x, double lga) {
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxIter; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps * 4) break;
  }
  return std::log(h) - x + a * std::log(x) - lga;
}

void check_args(double a, double t) {
  if (!(a > 0.0)) throw DomainError("upper_gamma_reg: shape must be positive");
  if (!(t >= 0.0)) throw DomainError("upper_gamma_reg: argument must be non-negative");
}

const double kLgammaHalf = 0.5 * std::log(M_PI);

}  // namespace

double lgamma_safe(double a) {
  int sign = 0;
  return ::lgamma_r(a, &sign);
}

double log_upper_gamma_reg(double a, double t, double lga) {
  check_args(a, t);
  if (t == 0.0) return 0.0;
  if (std::isinf(t)) return -std::numeric_limits<double>::infinity();
  if (t < a + 1.0) return std::log1p(-std::exp(log_lower_series(a, t, lga)));
  return log_upper_cf(a, t, lga);
}

double upper_gamma_reg(double a, double t, double lga) {
  check_args(a, t);
  if (t == 0.0) return 1.0;
  if (std::isinf(t)) return 0.0;
  if (t < a + 1.0) return -std::expm1(log_lower_series(a, t, lga));
  return std::exp(log_upper_cf(a, t, lga));
}

double upper_gamma_reg(double a, double t) {
  check_args(a, t);
  return upper_gamma_reg(a, t, lgamma_safe(a));
}

double log_upper_gamma_reg(double a, double t) {
  check_args(a, t);
  return log_upper_gamma_reg(a, t, lgamma_safe(a));
}

double erfc_reg(double t) {
  if (std::isnan(t)) return t;
  if (t < 0.0) return 2.0 - erfc_reg(-t);
  return upper_gamma_reg(0.5, t * t, kLgammaHalf);
}

double log_erfc_reg(double t) {
  if (t < 0.0) return std::log(erfc_reg(t));
  return log_upper_gamma_reg(0.5, t * t, kLgammaHalf);
}

}  // namespace varagg
