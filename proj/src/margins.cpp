#include "varagg/margins.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "varagg/errors.hpp"
#include "varagg/numeric.hpp"
#include "varagg/special_functions.hpp"

namespace varagg {
namespace {

constexpr double kE = 2.718281828459045;

void require(bool ok, const char* msg) {
  if (!ok) throw DomainError(msg);
}

double log_cauchy_cdf(double alpha, double z) {
  const double y = alpha * std::log(z);
  if (y < 0.0) return std::atan(-1.0 / y) / M_PI;
  return 0.5 + std::atan(y) / M_PI;
}

}  // namespace

std::string family_name(Family f) {
  switch (f) {
    case Family::ParetoII: return "pareto2";
    case Family::Frechet: return "frechet";
    case Family::Levy: return "levy";
    case Family::BetaPrimeOne: return "betaprime1";
    case Family::LogHazard: return "loghazard";
    case Family::LogCauchy: return "logcauchy";
    case Family::InverseGamma: return "invgamma";
    case Family::UniformUnit: return "uniform01";
    case Family::PiecewiseFrechetPower: return "pwfrechet";
    case Family::DyadicDiscrete: return "dyadic";
    case Family::Tabulated: return "tabulated";
    case Family::Mapped: return "mapped";
  }
  return "unknown";
}

bool MonotoneMap::increasing() const {
  return !(kind == MapKind::Reflect || kind == MapKind::Reciprocal ||
           kind == MapKind::ReciprocalOnePlus);
}

double MonotoneMap::apply(double x) const {
  switch (kind) {
    case MapKind::Shift: return x + param;
    case MapKind::Reflect: return param - x;
    case MapKind::Reciprocal: return 1.0 / x;
    case MapKind::ReciprocalOnePlus: return 1.0 / (1.0 + x);
    case MapKind::Power: return anchor + std::pow(x - anchor, param);
    case MapKind::Expm1: return anchor + std::expm1(x - anchor);
  }
  return x;
}

double MonotoneMap::inverse(double y) const {
  switch (kind) {
    case MapKind::Shift: return y - param;
    case MapKind::Reflect: return param - y;
    case MapKind::Reciprocal: return y > 0.0 ? 1.0 / y : kInf;
    case MapKind::ReciprocalOnePlus: return y > 0.0 ? 1.0 / y - 1.0 : kInf;
    case MapKind::Power: return y < anchor ? -kInf : anchor + std::pow(y - anchor, 1.0 / param);
    case MapKind::Expm1: return y <= anchor - 1.0 ? -kInf : anchor + std::log1p(y - anchor);
  }
  return y;
}

double MonotoneMap::inverse_jacobian(double y) const {
  switch (kind) {
    case MapKind::Shift:
    case MapKind::Reflect: return 1.0;
    case MapKind::Reciprocal:
    case MapKind::ReciprocalOnePlus: return 1.0 / (y * y);
    case MapKind::Power: return std::pow(y - anchor, 1.0 / param - 1.0) / param;
    case MapKind::Expm1: return 1.0 / (1.0 + y - anchor);
  }
  return 1.0;
}

std::string MonotoneMap::describe() const {
  std::ostringstream os;
  switch (kind) {
    case MapKind::Shift: os << "x+" << format_double(param); break;
    case MapKind::Reflect: os << format_double(param) << "-x"; break;
    case MapKind::Reciprocal: os << "1/x"; break;
    case MapKind::ReciprocalOnePlus: os << "1/(1+x)"; break;
    case MapKind::Power:
      os << "pow(c=" << format_double(param) << ",a=" << format_double(anchor) << ")";
      break;
    case MapKind::Expm1: os << "expm1(a=" << format_double(anchor) << ")"; break;
  }
  return os.str();
}

MarginalDistribution MarginalDistribution::pareto2(double alpha, double theta) {
  require(alpha > 0 && theta > 0, "pareto2: alpha and theta must be positive");
  MarginalDistribution m;
  m.family_ = Family::ParetoII;
  m.alpha_ = alpha;
  m.theta_ = theta;
  return m;
}

MarginalDistribution MarginalDistribution::frechet(double alpha, double theta) {
  require(alpha > 0 && theta > 0, "frechet: alpha and theta must be positive");
  MarginalDistribution m;
  m.family_ = Family::Frechet;
  m.alpha_ = alpha;
  m.theta_ = theta;
  return m;
}

MarginalDistribution MarginalDistribution::levy(double theta) {
  require(theta > 0, "levy: theta must be positive");
  MarginalDistribution m;
  m.family_ = Family::Levy;
  m.theta_ = theta;
  return m;
}

MarginalDistribution MarginalDistribution::beta_prime1(double alpha) {
  require(alpha > 0, "betaprime1: alpha must be positive");
  MarginalDistribution m;
  m.family_ = Family::BetaPrimeOne;
  m.alpha_ = alpha;
  return m;
}

MarginalDistribution MarginalDistribution::log_hazard(double alpha) {
  require(alpha < 1 && std::isfinite(alpha), "loghazard: alpha must be < 1");
  MarginalDistribution m;
  m.family_ = Family::LogHazard;
  m.alpha_ = alpha;
  return m;
}

MarginalDistribution MarginalDistribution::log_cauchy(double alpha) {
  require(alpha > 0, "logcauchy: alpha must be positive");
  MarginalDistribution m;
  m.family_ = Family::LogCauchy;
  m.alpha_ = alpha;
  return m;
}

MarginalDistribution MarginalDistribution::inverse_gamma(double alpha, double theta) {
  require(alpha > 0 && theta > 0, "invgamma: alpha and theta must be positive");
  MarginalDistribution m;
  m.family_ = Family::InverseGamma;
  m.alpha_ = alpha;
  m.theta_ = theta;
  m.lga_ = lgamma_safe(alpha);
  return m;
}

MarginalDistribution MarginalDistribution::uniform01() {
  MarginalDistribution m;
  m.family_ = Family::UniformUnit;
  return m;
}

MarginalDistribution MarginalDistribution::pw_frechet() {
  MarginalDistribution m;
  m.family_ = Family::PiecewiseFrechetPower;
  return m;
}

MarginalDistribution MarginalDistribution::dyadic(int K) {
  require(K >= 1 && K <= 1000, "dyadic: truncation K must lie in [1, 1000]");
  MarginalDistribution m;
  m.family_ = Family::DyadicDiscrete;
  m.K_ = K;
  return m;
}

MarginalDistribution MarginalDistribution::tabulated(std::vector<double> x, std::vector<double> F,
                                                     Interpolation mode) {
  if (x.empty() || x.size() != F.size()) {
    throw ConfigurationError("tabulated: knots must be non-empty and of equal length");
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]) || !(F[i] >= 0.0 && F[i] <= 1.0)) {
      throw ConfigurationError("tabulated: knot out of range");
    }
    if (i > 0 && (!(x[i] > x[i - 1]) || F[i] < F[i - 1])) {
      throw ConfigurationError("tabulated: knots must be increasing in x and non-decreasing in F");
    }
  }
  if (F.back() != 1.0) throw ConfigurationError("tabulated: last knot must carry F = 1");
  MarginalDistribution m;
  m.family_ = Family::Tabulated;
  m.knots_ = std::make_shared<const Knots>(Knots{std::move(x), std::move(F), mode});
  return m;
}

MarginalDistribution MarginalDistribution::mapped(const MonotoneMap& map,
                                                  const MarginalDistribution& base) {
  const double lo = base.lower_endpoint();
  switch (map.kind) {
    case MapKind::Reciprocal:
      if (lo < 0.0) throw ConfigurationError("1/x map needs a non-negative base law");
      break;
    case MapKind::ReciprocalOnePlus:
      if (!(lo > -1.0)) throw ConfigurationError("1/(1+x) map needs a base law above -1");
      break;
    case MapKind::Power:
      if (!(map.param >= 1.0)) throw ConfigurationError("power map needs exponent c >= 1");
      if (lo < map.anchor) throw ConfigurationError("power map anchor above the base support");
      break;
    case MapKind::Expm1:
      if (lo < map.anchor) throw ConfigurationError("expm1 map anchor above the base support");
      break;
    case MapKind::Shift:
    case MapKind::Reflect:
      if (!std::isfinite(map.param)) throw ConfigurationError("shift/reflect needs a finite offset");
      break;
  }
  MarginalDistribution m;
  m.family_ = Family::Mapped;
  m.map_ = map;
  m.base_ = std::make_shared<const MarginalDistribution>(base);
  return m;
}

MarginalDistribution MarginalDistribution::with_shift(double a) const {
  MarginalDistribution m = *this;
  m.shift_ += a;
  return m;
}

const MarginalDistribution& MarginalDistribution::base() const {
  if (!base_) throw ConfigurationError("base(): not a mapped law");
  return *base_;
}

const Knots& MarginalDistribution::knots() const {
  if (!knots_) throw ConfigurationError("knots(): not a tabulated law");
  return *knots_;
}

double MarginalDistribution::base_cdf(double z) const {
  switch (family_) {
    case Family::ParetoII:
      if (z <= 0.0) return 0.0;
      if (alpha_ == 1.0) return z / (theta_ + z);
      return -std::expm1(-alpha_ * std::log1p(z / theta_));
    case Family::Frechet:
      if (z <= 0.0) return 0.0;
      return std::exp(-std::pow(z / theta_, -alpha_));
    case Family::Levy:
      if (z <= 0.0) return 0.0;
      return erfc_reg(std::sqrt(theta_ / (2.0 * z)));
    case Family::BetaPrimeOne:
      if (z <= 0.0) return 0.0;
      return std::exp(-alpha_ * std::log1p(1.0 / z));
    case Family::LogHazard:
      if (z <= 0.0) return 0.0;
      return std::exp(-std::pow(std::log1p(z), alpha_) / z);
    case Family::LogCauchy:
      if (z <= 0.0) return 0.0;
      return log_cauchy_cdf(alpha_, z);
    case Family::InverseGamma:
      if (z <= 0.0) return 0.0;
      return upper_gamma_reg(alpha_, theta_ / z, lga_);
    case Family::UniformUnit:
      return std::clamp(z, 0.0, 1.0);
    case Family::PiecewiseFrechetPower:
      if (z <= 0.0) return 0.0;
      if (z <= 1.0) return z * z / kE;
      return std::exp(-1.0 / std::sqrt(z));
    case Family::DyadicDiscrete: {
      if (z < 0.0) return 0.0;
      if (z < 2.0) return 0.5;
      const int k = std::ilogb(z);
      if (k >= K_) return 1.0;
      return 1.0 - std::ldexp(1.0, -(k + 1));
    }
    case Family::Tabulated: {
      const Knots& t = *knots_;
      if (z < t.x.front()) return 0.0;
      if (z >= t.x.back()) return 1.0;
      const auto it = std::upper_bound(t.x.begin(), t.x.end(), z);
      const std::size_t j = static_cast<std::size_t>(it - t.x.begin());
      if (t.mode == Interpolation::Step) return t.F[j - 1];
      const double w = (z - t.x[j - 1]) / (t.x[j] - t.x[j - 1]);
      return t.F[j - 1] + w * (t.F[j] - t.F[j - 1]);
    }
    case Family::Mapped: {
      const double y = map_.inverse(z);
      if (map_.increasing()) return base_->cdf(y);
      return 1.0 - base_->cdf_left(y);
    }
  }
  return 0.0;
}

double MarginalDistribution::base_cdf_left(double z) const {
  switch (family_) {
    case Family::DyadicDiscrete:
      return base_cdf(std::nextafter(z, -kInf));
    case Family::Tabulated: {
      const Knots& t = *knots_;
      if (t.mode == Interpolation::Step || z == t.x.front()) {
        return base_cdf(std::nextafter(z, -kInf));
      }
      return base_cdf(z);
    }
    case Family::Mapped: {
      const double y = map_.inverse(z);
      if (map_.increasing()) return base_->cdf_left(y);
      return 1.0 - base_->cdf(y);
    }
    default:
      return base_cdf(z);
  }
}

double MarginalDistribution::base_ddf(double z) const {
  switch (family_) {
    case Family::ParetoII:
      if (z <= 0.0) return 1.0;
      return std::exp(-alpha_ * std::log1p(z / theta_));
    case Family::Frechet:
      if (z <= 0.0) return 1.0;
      return -std::expm1(-std::pow(z / theta_, -alpha_));
    case Family::BetaPrimeOne:
      if (z <= 0.0) return 1.0;
      return -std::expm1(-alpha_ * std::log1p(1.0 / z));
    case Family::LogCauchy: {
      if (z <= 0.0) return 1.0;
      const double y = alpha_ * std::log(z);
      if (y > 0.0) return std::atan(1.0 / y) / M_PI;
      return 1.0 - log_cauchy_cdf(alpha_, z);
    }
    case Family::Mapped: {
      const double y = map_.inverse(z);
      if (map_.increasing()) return base_->ddf(y);
      return base_->cdf_left(y);
    }
    default:
      return 1.0 - base_cdf(z);
  }
}

double MarginalDistribution::base_log_cdf(double z) const {
  switch (family_) {
    case Family::ParetoII:
      if (z <= 0.0) return -kInf;
      return std::log1p(-std::exp(-alpha_ * std::log1p(z / theta_)));
    case Family::Frechet:
      if (z <= 0.0) return -kInf;
      return -std::pow(z / theta_, -alpha_);
    case Family::Levy:
      if (z <= 0.0) return -kInf;
      return log_erfc_reg(std::sqrt(theta_ / (2.0 * z)));
    case Family::BetaPrimeOne:
      if (z <= 0.0) return -kInf;
      return -alpha_ * std::log1p(1.0 / z);
    case Family::LogHazard:
      if (z <= 0.0) return -kInf;
      return -std::pow(std::log1p(z), alpha_) / z;
    case Family::InverseGamma:
      if (z <= 0.0) return -kInf;
      return log_upper_gamma_reg(alpha_, theta_ / z, lga_);
    case Family::PiecewiseFrechetPower:
      if (z <= 0.0) return -kInf;
      if (z <= 1.0) return 2.0 * std::log(z) - 1.0;
      return -1.0 / std::sqrt(z);
    case Family::Mapped:
      if (map_.increasing()) return base_->log_cdf(map_.inverse(z));
      break;
    default:
      break;
  }
  const double F = base_cdf(z);
  return F > 0.5 ? std::log1p(-base_ddf(z)) : std::log(F);
}

std::optional<double> MarginalDistribution::base_density(double z) const {
  switch (family_) {
    case Family::ParetoII:
      if (z < 0.0) return 0.0;
      return alpha_ / theta_ * std::exp(-(alpha_ + 1.0) * std::log1p(z / theta_));
    case Family::Frechet: {
      if (z <= 0.0) return 0.0;
      const double r = std::pow(z / theta_, -alpha_);
      return alpha_ / z * r * std::exp(-r);
    }
    case Family::Levy:
      if (z <= 0.0) return 0.0;
      return std::sqrt(theta_ / (2.0 * M_PI)) * std::pow(z, -1.5) * std::exp(-theta_ / (2.0 * z));
    case Family::BetaPrimeOne:
      if (z <= 0.0) return 0.0;
      return alpha_ * std::exp((alpha_ - 1.0) * std::log(z) - (alpha_ + 1.0) * std::log1p(z));
    case Family::LogHazard: {
      if (z <= 0.0) return 0.0;
      const double L = std::log1p(z);
      const double g = std::pow(L, alpha_) / z;
      const double dg = alpha_ * std::pow(L, alpha_ - 1.0) / ((1.0 + z) * z) - g / z;
      return -dg * std::exp(-g);
    }
    case Family::LogCauchy: {
      if (z <= 0.0) return 0.0;
      const double y = alpha_ * std::log(z);
      return alpha_ / (M_PI * z * (1.0 + y * y));
    }
    case Family::InverseGamma:
      if (z <= 0.0) return 0.0;
      return std::exp(alpha_ * std::log(theta_) - (alpha_ + 1.0) * std::log(z) - theta_ / z - lga_);
    case Family::UniformUnit:
      return (z >= 0.0 && z <= 1.0) ? 1.0 : 0.0;
    case Family::PiecewiseFrechetPower:
      if (z <= 0.0) return 0.0;
      if (z <= 1.0) return 2.0 * z / kE;
      return 0.5 * std::pow(z, -1.5) * std::exp(-1.0 / std::sqrt(z));
    case Family::DyadicDiscrete:
      return std::nullopt;
    case Family::Tabulated: {
      const Knots& t = *knots_;
      if (t.mode == Interpolation::Step || t.F.front() > 0.0) return std::nullopt;
      if (z < t.x.front() || z >= t.x.back()) return 0.0;
      const auto it = std::upper_bound(t.x.begin(), t.x.end(), z);
      const std::size_t j = static_cast<std::size_t>(it - t.x.begin());
      return (t.F[j] - t.F[j - 1]) / (t.x[j] - t.x[j - 1]);
    }
    case Family::Mapped: {
      const double y = map_.inverse(z);
      if (!std::isfinite(y)) return 0.0;
      const auto f = base_->density(y);
      if (!f) return std::nullopt;
      return *f * map_.inverse_jacobian(z);
    }
  }
  return std::nullopt;
}

double MarginalDistribution::base_quantile(double p) const {
  auto bisect = [&](double lower) {
    return bisect_left_quantile([this](double z) { return base_cdf(z); }, p, lower);
  };
  switch (family_) {
    case Family::ParetoII:
      if (alpha_ == 1.0) return theta_ * p / (1.0 - p);
      return theta_ * std::expm1(-std::log1p(-p) / alpha_);
    case Family::Frechet:
      return theta_ * std::pow(-std::log(p), -1.0 / alpha_);
    case Family::BetaPrimeOne: {
      const double lr = std::log(p) / alpha_;
      return std::exp(lr) / -std::expm1(lr);
    }
    case Family::LogCauchy:
      return std::exp(std::tan(M_PI * (p - 0.5)) / alpha_);
    case Family::UniformUnit:
      return p;
    case Family::PiecewiseFrechetPower:
      if (p <= 1.0 / kE) return std::sqrt(kE * p);
      {
        const double l = std::log(p);
        return 1.0 / (l * l);
      }
    case Family::DyadicDiscrete: {
      if (p <= 0.5) return 0.0;
      for (int k = 1; k < K_; ++k) {
        if (p <= 1.0 - std::ldexp(1.0, -(k + 1))) return std::ldexp(1.0, k);
      }
      return std::ldexp(1.0, K_);
    }
    case Family::Tabulated: {
      const Knots& t = *knots_;
      const auto it = std::lower_bound(t.F.begin(), t.F.end(), p);
      const std::size_t j = static_cast<std::size_t>(it - t.F.begin());
      if (j == 0 || t.mode == Interpolation::Step) return t.x[j];
      const double w = (p - t.F[j - 1]) / (t.F[j] - t.F[j - 1]);
      return t.x[j - 1] + w * (t.x[j] - t.x[j - 1]);
    }
    case Family::Mapped:
      if (map_.increasing()) return map_.apply(base_->quantile(p));
      return map_.apply(base_->quantile_right(1.0 - p));
    case Family::Levy:
    case Family::LogHazard:
    case Family::InverseGamma:
      return bisect(0.0);
  }
  return bisect(base_lower());
}

double MarginalDistribution::base_quantile_right(double q) const {
  switch (family_) {
    case Family::DyadicDiscrete: {
      if (q < 0.5) return 0.0;
      for (int k = 1; k < K_; ++k) {
        if (q < 1.0 - std::ldexp(1.0, -(k + 1))) return std::ldexp(1.0, k);
      }
      return std::ldexp(1.0, K_);
    }
    case Family::Tabulated: {
      const Knots& t = *knots_;
      const auto it = std::upper_bound(t.F.begin(), t.F.end(), q);
      const std::size_t j = static_cast<std::size_t>(it - t.F.begin());
      if (j == 0 || t.mode == Interpolation::Step) return t.x[j];
      const double w = (q - t.F[j - 1]) / (t.F[j] - t.F[j - 1]);
      return t.x[j - 1] + w * (t.x[j] - t.x[j - 1]);
    }
    case Family::Mapped:
      if (map_.increasing()) return map_.apply(base_->quantile_right(q));
      if (q == 0.0) return map_.apply(base_->upper_endpoint());
      return map_.apply(base_->quantile(1.0 - q));
    default:
      if (q == 0.0) return base_lower();
      return base_quantile(q);
  }
}

double MarginalDistribution::base_lower() const {
  switch (family_) {
    case Family::Tabulated: return knots_->x.front();
    case Family::Mapped:
      return map_.increasing() ? map_.apply(base_->lower_endpoint())
                               : map_.apply(base_->upper_endpoint());
    default: return 0.0;
  }
}

double MarginalDistribution::base_upper() const {
  switch (family_) {
    case Family::UniformUnit: return 1.0;
    case Family::DyadicDiscrete: return std::ldexp(1.0, K_);
    case Family::Tabulated: {
      const Knots& t = *knots_;
      return t.x[static_cast<std::size_t>(std::lower_bound(t.F.begin(), t.F.end(), 1.0) -
                                          t.F.begin())];
    }
    case Family::Mapped:
      return map_.increasing() ? map_.apply(base_->upper_endpoint())
                               : map_.apply(base_->lower_endpoint());
    default: return kInf;
  }
}

double MarginalDistribution::cdf(double x) const {
  if (std::isnan(x)) throw DomainError("cdf: NaN argument");
  if (x == -kInf) return 0.0;
  if (x == kInf) return 1.0;
  return base_cdf(x - shift_);
}

double MarginalDistribution::cdf_left(double x) const {
  if (std::isnan(x)) throw DomainError("cdf_left: NaN argument");
  if (x == -kInf) return 0.0;
  if (x == kInf) return 1.0;
  return base_cdf_left(x - shift_);
}

double MarginalDistribution::ddf(double x) const {
  if (std::isnan(x)) throw DomainError("ddf: NaN argument");
  if (x == -kInf) return 1.0;
  if (x == kInf) return 0.0;
  return base_ddf(x - shift_);
}

double MarginalDistribution::log_cdf(double x) const {
  if (x == -kInf) return -kInf;
  if (x == kInf) return 0.0;
  return base_log_cdf(x - shift_);
}

std::optional<double> MarginalDistribution::density(double x) const {
  return base_density(x - shift_);
}

double MarginalDistribution::quantile(double p) const {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("quantile: p must lie in (0,1)");
  return shift_ + base_quantile(p);
}

double MarginalDistribution::quantile_right(double q) const {
  if (!(q >= 0.0 && q < 1.0)) throw DomainError("quantile_right: level must lie in [0,1)");
  return shift_ + base_quantile_right(q);
}

double MarginalDistribution::lower_endpoint() const { return shift_ + base_lower(); }
double MarginalDistribution::upper_endpoint() const { return shift_ + base_upper(); }

bool MarginalDistribution::is_continuous() const {
  switch (family_) {
    case Family::DyadicDiscrete: return false;
    case Family::Tabulated:
      return knots_->mode == Interpolation::Linear && knots_->F.front() == 0.0;
    case Family::Mapped: return base_->is_continuous();
    default: return true;
  }
}

bool MarginalDistribution::has_closed_form_quantile() const {
  switch (family_) {
    case Family::Levy:
    case Family::LogHazard:
    case Family::InverseGamma: return false;
    case Family::Mapped: return base_->has_closed_form_quantile();
    default: return true;
  }
}

std::string MarginalDistribution::describe() const {
  std::ostringstream os;
  os << family_name(family_) << "(";
  switch (family_) {
    case Family::ParetoII:
    case Family::Frechet:
    case Family::InverseGamma:
      os << "alpha=" << format_double(alpha_) << ",theta=" << format_double(theta_);
      break;
    case Family::Levy: os << "theta=" << format_double(theta_); break;
    case Family::BetaPrimeOne:
    case Family::LogHazard:
    case Family::LogCauchy: os << "alpha=" << format_double(alpha_); break;
    case Family::DyadicDiscrete: os << "K=" << K_; break;
    case Family::Tabulated: os << "knots=" << knots_->x.size(); break;
    case Family::Mapped: os << map_.describe() << "," << base_->describe(); break;
    default: break;
  }
  if (shift_ != 0.0) os << ",shift=" << format_double(shift_);
  os << ")";
  return os.str();
}

}  // namespace varagg
