#include <algorithm>
#include <cmath>
#include <memory>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "varagg/aggregate.hpp"
#include "varagg/errors.hpp"
#include "varagg/numeric.hpp"

namespace varagg {

namespace {

using boost::math::quadrature::gauss_kronrod;

constexpr std::size_t kGridPoints = 4097;
constexpr double kMaxSupport = 1e300;

// Monotone cubic (Fritsch-Carlson) table of a CDF on x = lo + scale sinh(z), z uniform.
class CdfTable {
 public:
  CdfTable(double lo, double scale, double hi, const std::function<double(double)>& f, Exec exec)
      : lo_(lo), scale_(scale) {
    zmax_ = std::asinh((hi - lo) / scale);
    dz_ = zmax_ / static_cast<double>(kGridPoints - 1);
    std::vector<double> xs(kGridPoints);
    for (std::size_t i = 0; i < kGridPoints; ++i) xs[i] = x_at(static_cast<double>(i) * dz_);
    F_ = kernels::map_grid(f, xs, exec);
    F_.front() = std::max(F_.front(), 0.0);
    for (std::size_t i = 1; i < F_.size(); ++i) F_[i] = std::clamp(F_[i], F_[i - 1], 1.0);
    slopes();
  }

  double operator()(double x) const {
    if (!(x > lo_)) return 0.0;
    const double z = std::asinh((x - lo_) / scale_);
    if (z >= zmax_) return tail(x);
    const double t = z / dz_;
    const std::size_t i = std::min(static_cast<std::size_t>(t), kGridPoints - 2);
    const double w = t - static_cast<double>(i);
    const double h00 = (1 + 2 * w) * (1 - w) * (1 - w);
    const double h10 = w * (1 - w) * (1 - w);
    const double h01 = w * w * (3 - 2 * w);
    const double h11 = w * w * (w - 1);
    const double v = h00 * F_[i] + h10 * dz_ * d_[i] + h01 * F_[i + 1] + h11 * dz_ * d_[i + 1];
    return std::clamp(v, F_[i], F_[i + 1]);
  }

  double x_at(double z) const { return lo_ + scale_ * std::sinh(z); }
  double dz() const { return dz_; }
  std::size_t size() const { return F_.size(); }

 private:
  void slopes() {
    const std::size_t n = F_.size();
    std::vector<double> delta(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) delta[i] = (F_[i + 1] - F_[i]) / dz_;
    d_.assign(n, 0.0);
    d_[0] = delta[0];
    d_[n - 1] = delta[n - 2];
    for (std::size_t i = 1; i + 1 < n; ++i) {
      if (delta[i - 1] * delta[i] <= 0.0) continue;
      d_[i] = 2.0 / (1.0 / delta[i - 1] + 1.0 / delta[i]);  // harmonic mean keeps monotonicity
    }
  }

  // Power-law decay of 1 - F fitted to the last two knots.
  double tail(double x) const {
    const std::size_t n = F_.size();
    const double s1 = 1.0 - F_[n - 2];
    const double s2 = 1.0 - F_[n - 1];
    if (s2 <= 0.0) return 1.0;
    const double x1 = x_at(static_cast<double>(n - 2) * dz_) - lo_;
    const double x2 = x_at(zmax_) - lo_;
    double k = std::log(s1 / s2) / std::log(x2 / x1);
    if (!(k > 0.0)) k = 1.0;
    return 1.0 - s2 * std::pow((x - lo_) / x2, -k);
  }

  double lo_;
  double scale_;
  double zmax_ = 0.0;
  double dz_ = 0.0;
  std::vector<double> F_;
  std::vector<double> d_;
};

// Probability levels whose A-quantiles split the u-range, so the steep part of
// F_A(s - Q_X(u)) near u = F_X(s - lo_A) gets its own panels.
constexpr double kSplitLevels[] = {1e-8, 1e-4, 1e-2, 0.1, 0.5, 0.9, 0.99, 1 - 1e-4, 1 - 1e-8};

// F_{A+X}(s) = int_0^{F_X(s - lo_A)} F_A(s - Q_X(u)) du, with breaks at u = F_X(s - a_k).
double convolve_at(const std::function<double(double)>& FA, double loA,
                   const std::vector<double>& a_breaks, const MarginalDistribution& X, double s,
                   double tol, double* err) {
  const double u_hi = X.cdf(s - loA);
  if (!(u_hi > 0.0)) {
    if (err) *err = 0.0;
    return 0.0;
  }
  std::vector<double> edges = {0.0, u_hi};
  for (double a : a_breaks) {
    const double u = X.cdf(s - a);
    if (u > 1e-2 * u_hi && u < u_hi) edges.push_back(u);
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  auto g = [&](double u) {
    const double q = X.quantile(std::clamp(u, 1e-300, std::nextafter(1.0, 0.0)));
    return FA(s - q);
  };
  // Every panel is mapped onto [0, 1] and integrates 1 + integrand, so the GK test
  // becomes absolute: a panel of width w gets relative tolerance abs_tol / w, and
  // one narrower than abs_tol is not refined at all (its integral is at most w).
  const double abs_tol = tol * 1e-2;
  auto integrate = [&](const auto& f, double w, double* e) {
    const unsigned depth = w > abs_tol ? 12 : 0;
    const double rel = std::clamp(abs_tol / w, 1e-15, 1e-3);
    return w * (gauss_kronrod<double, 31>::integrate(f, 0.0, 1.0, depth, rel, e) - 1.0);
  };
  // On the first panel u = u_1 w^3 flattens the logarithmic singularity of
  // heavy-tailed quantiles at u = 0.
  const double u1 = edges[1];
  auto first = [&](double w) { return 1.0 + g(u1 * w * w * w) * 3.0 * w * w; };
  double e = 0.0;
  double v = integrate(first, u1, &e);
  double e_total = u1 * e;
  for (std::size_t i = 1; i + 1 < edges.size(); ++i) {
    const double a = edges[i];
    const double w = edges[i + 1] - a;
    auto panel = [&](double t) { return 1.0 + g(a + w * t); };
    v += integrate(panel, w, &e);
    e_total += w * e;
  }
  if (err) *err = e_total;
  return std::clamp(v, 0.0, 1.0);
}

// A-quantiles at kSplitLevels by bisection on the CDF.
std::vector<double> split_points(const std::function<double(double)>& FA, double loA) {
  std::vector<double> out;
  for (double level : kSplitLevels) out.push_back(bisect_left_quantile(FA, level, loA));
  return out;
}

class ConvolutionLaw : public SumLaw {
 public:
  ConvolutionLaw(std::vector<MarginalDistribution> margins, double tol, Exec exec)
      : margins_(std::move(margins)), tol_(tol) {
    for (const auto& m : margins_) {
      if (!std::isfinite(m.lower_endpoint())) {
        throw ConfigurationError("convolution needs finite lower endpoints");
      }
      lower_ += m.lower_endpoint();
    }
    const std::size_t n = margins_.size();
    // Partial sums S_1..S_{n-1} are tabulated; the last step is integrated directly.
    const MarginalDistribution& first = margins_[0];
    inner_ = [first](double x) { return first.cdf(x); };
    inner_lo_ = first.lower_endpoint();
    for (double level : kSplitLevels) breaks_.push_back(first.quantile(level));
    double est = 0.0;
    for (std::size_t k = 1; k + 1 < n; ++k) {
      const double lo_next = inner_lo_ + margins_[k].lower_endpoint();
      double hi = 0.0;
      double med = 0.0;
      const double tail_p = 1.0 - tol_ / (10.0 * static_cast<double>(n));
      for (std::size_t j = 0; j <= k; ++j) {
        hi = std::max(hi, margins_[j].quantile(tail_p) - margins_[j].lower_endpoint());
        med += margins_[j].quantile(0.5) - margins_[j].lower_endpoint();
      }
      hi = std::min(lo_next + static_cast<double>(k + 1) * hi, kMaxSupport);
      const double scale = std::max(med / 8.0, 1e-6);
      const auto FA = inner_;
      const double loA = inner_lo_;
      const MarginalDistribution X = margins_[k];
      const double t = tol_;
      const std::vector<double> br = breaks_;
      auto direct = [FA, loA, br, X, t](double s) { return convolve_at(FA, loA, br, X, s, t, nullptr); };
      auto table = std::make_shared<const CdfTable>(lo_next, scale, hi, direct, exec);
      // Interpolation error, probed at cell midpoints.
      for (std::size_t i = 1; i < table->size(); i += 97) {
        const double x = table->x_at((static_cast<double>(i) - 0.5) * table->dz());
        est = std::max(est, std::abs((*table)(x) - direct(x)));
      }
      inner_ = [table](double x) { return (*table)(x); };
      inner_lo_ = lo_next;
      breaks_ = split_points(inner_, inner_lo_);
    }
    achieved_ = est + tol_ * 1e-2;
  }

  double cdf(double s) const override {
    if (margins_.size() == 1) return margins_[0].cdf(s);
    if (!(s > lower_)) return 0.0;
    double e = 0.0;
    return convolve_at(inner_, inner_lo_, breaks_, margins_.back(), s, tol_, &e);
  }
  // Bracket for independent margins: S >= X_i + sum of the other lower endpoints, and
  // every X_i <= Q_i(p^(1/n)) jointly with probability p.
  double quantile(double p) const override {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("quantile: p must lie in (0,1)");
    if (margins_.size() == 1) return margins_[0].quantile(p);
    const double root = std::pow(p, 1.0 / static_cast<double>(margins_.size()));
    double lo = -kInf;
    double hi = 0.0;
    for (const auto& m : margins_) {
      lo = std::max(lo, m.quantile(p) - m.lower_endpoint());
      hi += m.quantile(root);
    }
    lo += lower_;
    // Step just below the lower bound so cdf(lo) < p unless F_S jumps there.
    lo = std::nextafter(lo, -kInf);
    return bracketed_left_quantile([this](double s) { return cdf(s); }, p, lo, hi, lower_);
  }
  double lower_endpoint() const override { return lower_; }
  bool continuous() const override {
    return std::any_of(margins_.begin(), margins_.end(),
                       [](const MarginalDistribution& m) { return m.is_continuous(); });
  }
  double achieved_tolerance() const override { return achieved_; }

 private:
  std::vector<MarginalDistribution> margins_;
  double tol_;
  double lower_ = 0.0;
  std::function<double(double)> inner_;
  double inner_lo_ = 0.0;
  std::vector<double> breaks_;
  double achieved_ = 0.0;
};

}  // namespace

SumDistribution convolve_independent(const std::vector<MarginalDistribution>& margins,
                                     double tolerance, Exec exec) {
  if (margins.empty()) throw ConfigurationError("convolution needs at least one margin");
  if (!(tolerance > 0.0)) throw ConfigurationError("convolution tolerance must be positive");
  return SumDistribution(std::make_shared<ConvolutionLaw>(margins, tolerance, exec),
                         SumMethod::Convolution, "independent convolution");
}

}  // namespace varagg
