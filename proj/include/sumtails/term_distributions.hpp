#pragma once

// Catalog of the symmetric term laws: uniform on [-1/2, 1/2], the power
// family A / (1 + xi^(2l)), the 1/(pi cosh xi) profile and the centred
// Gaussian. Each entry knows its density, exact variance, upper tail,
// quantile function and the scaled characteristic function
//
//   g(omega; s) = int exp(i omega xi / s) f(xi) dxi.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "sumtails/errors.hpp"

namespace sumtails {

enum class TermKind { Uniform, PowerFamily, Sech, Gauss };

inline std::string to_string(TermKind kind) {
  switch (kind) {
    case TermKind::Uniform: return "uniform";
    case TermKind::PowerFamily: return "power";
    case TermKind::Sech: return "sech";
    case TermKind::Gauss: return "gauss";
  }
  return "unknown";
}

class TermDistribution {
 public:
  static TermDistribution uniform() noexcept {
    return TermDistribution(TermKind::Uniform, 0, 1.0);
  }

  static TermDistribution power_family(int l) {
    if (l < 1) throw InvalidArgument("power family index l must be >= 1");
    return TermDistribution(TermKind::PowerFamily, l, 1.0);
  }

  static TermDistribution sech() noexcept {
    return TermDistribution(TermKind::Sech, 0, 1.0);
  }

  static TermDistribution gauss(double sigma = 1.0) {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) {
      throw InvalidArgument("gauss sigma must be positive and finite");
    }
    return TermDistribution(TermKind::Gauss, 0, sigma);
  }

  TermKind kind() const noexcept { return kind_; }
  int l() const noexcept { return l_; }

  // A = (l / pi) sin(pi / 2l); zero for the other kinds.
  double amplitude() const noexcept { return amplitude_; }

  double gauss_sigma() const noexcept { return gauss_sigma_; }

  bool has_finite_variance() const noexcept {
    return !(kind_ == TermKind::PowerFamily && l_ == 1);
  }

  // Standard deviation; throws DivergentVariance for the l = 1 entry.
  double sigma() const {
    if (!has_finite_variance()) throw DivergentVariance();
    return sigma_;
  }

  std::string name() const {
    switch (kind_) {
      case TermKind::PowerFamily: return "power(l=" + std::to_string(l_) + ")";
      case TermKind::Gauss: {
        if (gauss_sigma_ == 1.0) return "gauss";
        return "gauss(sigma=" + std::to_string(gauss_sigma_) + ")";
      }
      default: return to_string(kind_);
    }
  }

  bool operator==(const TermDistribution&) const = default;

 private:
  TermDistribution(TermKind kind, int l, double gauss_sigma)
      : kind_(kind), l_(l), gauss_sigma_(gauss_sigma) {
    using std::numbers::pi;
    switch (kind_) {
      case TermKind::Uniform: sigma_ = std::sqrt(1.0 / 12.0); break;
      case TermKind::PowerFamily: {
        amplitude_ = (l_ / pi) * std::sin(pi / (2.0 * l_));
        if (l_ >= 2) {
          sigma_ = std::sqrt(std::sin(pi / (2.0 * l_)) /
                             std::sin(3.0 * pi / (2.0 * l_)));
        } else {
          sigma_ = std::numeric_limits<double>::infinity();
        }
        break;
      }
      case TermKind::Sech: sigma_ = pi / 2.0; break;
      case TermKind::Gauss: sigma_ = gauss_sigma_; break;
    }
  }

  TermKind kind_;
  int l_ = 0;
  double gauss_sigma_ = 1.0;
  double amplitude_ = 0.0;
  double sigma_ = 0.0;
};

namespace detail {

inline double int_pow(double x, int n) {
  double result = 1.0;
  while (n > 0) {
    if (n & 1) result *= x;
    x *= x;
    n >>= 1;
  }
  return result;
}

// Partial-fraction constants of 1 / (1 + t^(2l)). Poles come in pairs
// theta and pi - theta with opposite cosines; an odd l adds theta = pi/2.
class PowerPoleConstants {
 public:
  explicit PowerPoleConstants(int l) : l_(l) {
    using std::numbers::pi;
    for (int k = 0; 2 * k + 1 < l; ++k) {
      const double theta = pi * (2 * k + 1) / (2.0 * l);
      cos_.push_back(std::cos(theta));
      sin_.push_back(std::sin(theta));
    }
  }

  // int_0^x dt / (1 + t^(2l)) for x >= 0, accurate for moderate x.
  double body_integral(double x) const {
    const double x2 = x * x;
    double sum = 0.0;
    for (std::size_t k = 0; k < cos_.size(); ++k) {
      const double c = cos_[k];
      const double s = sin_[k];
      const double cross = 2.0 * x * c;
      sum += c * std::log((x2 + cross + 1.0) / (x2 - cross + 1.0));
      // atan((x - c)/s) + atan((x + c)/s), which lies in [0, pi) for x >= 0.
      const double a = (x - c) / s;
      const double b = (x + c) / s;
      sum += 2.0 * s * std::atan2(a + b, 1.0 - a * b);
    }
    if (l_ % 2 == 1) sum += 2.0 * std::atan(x);
    return sum / (2.0 * l_);
  }

 private:
  int l_;
  std::vector<double> cos_;
  std::vector<double> sin_;
};

// int_x^inf dt / (1 + t^(2l)) = sum_k (-1)^k x^(1 - 2l(k+1)) / (2l(k+1) - 1),
// used for x > kPowerSeriesSwitch where the ratio x^(-2l) is at most 1/16.
inline double power_family_tail_integral(int l, double x) {
  const double ratio = 1.0 / int_pow(x, 2 * l);
  double power = x * ratio;
  double sum = 0.0;
  for (int k = 0; k < 200; ++k) {
    const double term = power / (2.0 * l * (k + 1) - 1.0);
    sum += (k % 2 == 0) ? term : -term;
    if (term <= 1e-17 * sum) break;
    power *= ratio;
  }
  return sum;
}

inline constexpr double kPowerSeriesSwitch = 2.0;

}  // namespace detail

inline double pdf(const TermDistribution& dist, double xi) {
  using std::numbers::pi;
  switch (dist.kind()) {
    case TermKind::Uniform: return std::abs(xi) <= 0.5 ? 1.0 : 0.0;
    case TermKind::PowerFamily:
      return dist.amplitude() / (1.0 + detail::int_pow(std::abs(xi), 2 * dist.l()));
    case TermKind::Sech: return 1.0 / (pi * std::cosh(xi));
    case TermKind::Gauss: {
      const double s = dist.gauss_sigma();
      const double u = xi / s;
      return std::exp(-0.5 * u * u) / (s * std::sqrt(2.0 * pi));
    }
  }
  return 0.0;
}

// d f / d xi, used by the quantile polish.
inline double pdf_derivative(const TermDistribution& dist, double xi) {
  switch (dist.kind()) {
    case TermKind::Uniform: return 0.0;
    case TermKind::PowerFamily: {
      const int two_l = 2 * dist.l();
      const double ax = std::abs(xi);
      const double p_minus = detail::int_pow(ax, two_l - 1);
      const double denom = 1.0 + p_minus * ax;
      const double d = -dist.amplitude() * two_l * p_minus / (denom * denom);
      return xi < 0 ? -d : d;
    }
    case TermKind::Sech: return -pdf(dist, xi) * std::tanh(xi);
    case TermKind::Gauss: {
      const double s = dist.gauss_sigma();
      return -xi / (s * s) * pdf(dist, xi);
    }
  }
  return 0.0;
}

// Exact variance; DivergentVariance for the power family with l = 1.
inline double variance(const TermDistribution& dist) {
  const double s = dist.sigma();
  switch (dist.kind()) {
    case TermKind::Uniform: return 1.0 / 12.0;
    case TermKind::Sech: return std::numbers::pi * std::numbers::pi / 4.0;
    case TermKind::PowerFamily: {
      using std::numbers::pi;
      const double l = dist.l();
      return std::sin(pi / (2.0 * l)) / std::sin(3.0 * pi / (2.0 * l));
    }
    case TermKind::Gauss: return s * s;
  }
  return s * s;
}


// P(xi > t).
inline double tail_prob(const TermDistribution& dist, double t) {
  using std::numbers::pi;
  if (std::isnan(t)) return t;
  switch (dist.kind()) {
    case TermKind::Uniform: return std::clamp(0.5 - t, 0.0, 1.0);
    case TermKind::PowerFamily: {
      const double at = std::abs(t);
      double upper;
      if (std::isinf(at)) {
        upper = 0.0;
      } else if (dist.l() == 1) {
        upper = at > 1.0 ? std::atan(1.0 / at) / pi : 0.5 - std::atan(at) / pi;
      } else if (at > detail::kPowerSeriesSwitch) {
        upper = dist.amplitude() * detail::power_family_tail_integral(dist.l(), at);
      } else {
        upper = 0.5 - dist.amplitude() *
                          detail::PowerPoleConstants(dist.l()).body_integral(at);
      }
      return t >= 0.0 ? upper : 1.0 - upper;
    }
    case TermKind::Sech: {
      const double upper = (2.0 / pi) * std::atan(std::exp(-std::abs(t)));
      return t >= 0.0 ? upper : 1.0 - upper;
    }
    case TermKind::Gauss:
      return 0.5 * std::erfc(t / (dist.gauss_sigma() * std::numbers::sqrt2));
  }
  return 0.0;
}

inline double cdf(const TermDistribution& dist, double t) {
  return tail_prob(dist, -t);
}

namespace detail {

// Acklam's rational approximation to the standard normal quantile,
// polished by one Halley step on erfc.
inline double standard_normal_quantile(double u) {
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00, 2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double low = 0.02425;
  double x;
  if (u < low) {
    const double q = std::sqrt(-2.0 * std::log(u));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (u <= 1.0 - low) {
    const double q = u - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-u));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  // Halley refinement against the lower tail (or upper tail above 1/2).
  for (int iter = 0; iter < 2; ++iter) {
    double e;
    if (u < 0.5) {
      e = 0.5 * std::erfc(-x / std::numbers::sqrt2) - u;
    } else {
      e = (1.0 - u) - 0.5 * std::erfc(x / std::numbers::sqrt2);
    }
    const double w = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
    x = x - w / (1.0 + 0.5 * x * w);
  }
  return x;
}

inline constexpr double kQuantileTol = 1e-12;

// Solves tail_prob(x) = q for x >= 0 with 0 < q <= 1/2 by Newton steps
// kept inside a shrinking bracket.
inline double power_family_upper_quantile(const TermDistribution& dist, double q) {
  const int l = dist.l();
  const double A = dist.amplitude();
  if (q >= 0.5) return 0.0;
  // tail_prob(x) <= A x^(1-2l) / (2l-1), so this x already has tail <= q.
  double hi = std::pow(A / ((2.0 * l - 1.0) * q), 1.0 / (2.0 * l - 1.0));
  hi = std::max(hi, 1.0);
  while (tail_prob(dist, hi) > q) hi *= 2.0;
  double lo = 0.0;
  double x = hi > detail::kPowerSeriesSwitch ? hi : (0.5 - q) / A;
  x = std::clamp(x, lo, hi);
  for (int iter = 0; iter < 200; ++iter) {
    const double h = tail_prob(dist, x) - q;  // decreasing in x
    if (h > 0.0) {
      lo = x;
    } else {
      hi = x;
    }
    const double f = pdf(dist, x);
    double next = x + h / f;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const double step = std::abs(next - x);
    x = next;
    if (step <= kQuantileTol * std::max(1.0, x) ||
        hi - lo <= kQuantileTol * std::max(1.0, x)) {
      break;
    }
  }
  return x;
}

}  // namespace detail

// Inverse CDF. u must lie in (0, 1); the endpoints map to -/+ infinity
// (or -/+ 1/2 for the uniform entry).
inline double quantile(const TermDistribution& dist, double u) {
  using std::numbers::pi;
  if (!(u >= 0.0 && u <= 1.0)) throw InvalidArgument("quantile needs u in [0, 1]");
  switch (dist.kind()) {
    case TermKind::Uniform: return u - 0.5;
    case TermKind::PowerFamily: {
      if (u == 0.0) return -std::numeric_limits<double>::infinity();
      if (u == 1.0) return std::numeric_limits<double>::infinity();
      if (dist.l() == 1) return std::tan(pi * (u - 0.5));
      if (u == 0.5) return 0.0;
      if (u > 0.5) return detail::power_family_upper_quantile(dist, 1.0 - u);
      return -detail::power_family_upper_quantile(dist, u);
    }
    case TermKind::Sech: return std::asinh(std::tan(pi * (u - 0.5)));
    case TermKind::Gauss: {
      if (u == 0.0) return -std::numeric_limits<double>::infinity();
      if (u == 1.0) return std::numeric_limits<double>::infinity();
      return dist.gauss_sigma() * detail::standard_normal_quantile(u);
    }
  }
  return 0.0;
}

// Open-interval uniform variate from a 64-bit engine: (k + 1/2) 2^-52 with
// a 52-bit k, so both ends 2^-53 and 1 - 2^-53 are exact.
template <class URBG>
double uniform_open01(URBG& rng) {
  static_assert(URBG::max() - URBG::min() == std::numeric_limits<std::uint64_t>::max(),
                "uniform_open01 expects a full 64-bit engine");
  const std::uint64_t bits = static_cast<std::uint64_t>(rng() - URBG::min()) >> 12;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-52;
}

// One draw by inversion.
template <class URBG>
double sample(const TermDistribution& dist, URBG& rng) {
  return quantile(dist, uniform_open01(rng));
}

// Quantile function for bulk sampling. For the power family with l >= 2 the
// map w = q^(1/(2l-1)) -> w * x(q) is smooth on [0, 2^(-1/(2l-1))] and is
// tabulated as a cubic Hermite spline; each lookup is polished by Newton
// steps on the exact tail until the next step is predicted below 1e-12.
class FastQuantile {
 public:
  explicit FastQuantile(const TermDistribution& dist, std::size_t nodes = 2048)
      : dist_(dist), poles_(std::max(dist.l(), 1)) {
    if (dist.kind() != TermKind::PowerFamily || dist.l() < 2) return;
    const int l = dist.l();
    two_l_ = 2 * l;
    amplitude_ = dist.amplitude();
    exponent_ = 2.0 * l - 1.0;
    w_max_ = std::pow(0.5, 1.0 / exponent_);
    nodes_ = std::max<std::size_t>(nodes, 16);
    step_ = w_max_ / static_cast<double>(nodes_ - 1);
    h_.resize(nodes_);
    dh_.resize(nodes_);
    const double x_limit =
        std::pow(dist.amplitude() / exponent_, 1.0 / exponent_);  // w -> 0
    for (std::size_t i = 0; i < nodes_; ++i) {
      const double w = step_ * static_cast<double>(i);
      if (i == 0) {
        h_[i] = x_limit;
        dh_[i] = 0.0;
        continue;
      }
      const double q = (i + 1 == nodes_) ? 0.5 : std::pow(w, exponent_);
      const double x = detail::power_family_upper_quantile(dist, q);
      h_[i] = w * x;
      const double dq_dw = exponent_ * std::pow(w, exponent_ - 1.0);
      dh_[i] = x - w * dq_dw / pdf(dist, x);
    }
  }

  const TermDistribution& distribution() const noexcept { return dist_; }

  double operator()(double u) const {
    if (h_.empty()) return quantile(dist_, u);
    if (!(u > 0.0 && u < 1.0)) return quantile(dist_, u);
    if (u == 0.5) return 0.0;
    const bool upper = u > 0.5;
    const double q = upper ? 1.0 - u : u;
    const double x = upper_quantile(q);
    return upper ? x : -x;
  }

 private:
  double upper_tail(double x) const {
    if (x > detail::kPowerSeriesSwitch) {
      return amplitude_ * detail::power_family_tail_integral(two_l_ / 2, x);
    }
    return 0.5 - amplitude_ * poles_.body_integral(x);
  }

  double upper_quantile(double q) const {
    const double w = two_l_ == 4 ? std::cbrt(q) : std::pow(q, 1.0 / exponent_);
    double pos = w / step_;
    std::size_t i = static_cast<std::size_t>(pos);
    if (i >= nodes_ - 1) i = nodes_ - 2;
    const double t = pos - static_cast<double>(i);
    const double t2 = t * t;
    const double t3 = t2 * t;
    const double h = (2 * t3 - 3 * t2 + 1) * h_[i] + (t3 - 2 * t2 + t) * step_ * dh_[i] +
                     (-2 * t3 + 3 * t2) * h_[i + 1] + (t3 - t2) * step_ * dh_[i + 1];
    double x = std::max(h / w, 0.0);
    for (int iter = 0; iter < 4; ++iter) {
      const double x_pow = detail::int_pow(x, two_l_ - 1);
      const double denom = 1.0 + x_pow * x;
      const double f = amplitude_ / denom;
      const double step = (upper_tail(x) - q) / f;
      x += step;
      // Newton error after this step is about |f'/(2f)| step^2.
      const double curvature = two_l_ * x_pow / (2.0 * denom);
      const double tol = detail::kQuantileTol * std::max(1.0, x);
      if (curvature * step * step <= 0.1 * tol && std::abs(step) <= 1e-4 * std::max(1.0, x)) {
        return x;
      }
    }
    return detail::power_family_upper_quantile(dist_, q);
  }

  TermDistribution dist_;
  detail::PowerPoleConstants poles_;
  int two_l_ = 2;
  double amplitude_ = 0.0;
  double exponent_ = 1.0;
  double w_max_ = 0.0;
  double step_ = 0.0;
  std::size_t nodes_ = 0;
  std::vector<double> h_;
  std::vector<double> dh_;
};

// Complex pole sum for the power family, evaluated at complex t = omega / s:
//   g = i sin(pi/2l) sum_j exp(i t xi_j) / xi_j^(2l-1),
//   xi_j = exp(i pi (2j+1) / 2l), 0 <= j < l.
// Valid as the characteristic function for Re t >= 0 and as its analytic
// continuation elsewhere.
inline std::complex<double> power_family_pole_sum(int l, std::complex<double> t) {
  using std::numbers::pi;
  using cd = std::complex<double>;
  const cd i(0.0, 1.0);
  cd sum(0.0, 0.0);
  for (int j = 0; j < l; ++j) {
    const double theta = pi * (2 * j + 1) / (2.0 * l);
    const cd pole = std::polar(1.0, theta);
    const cd pole_pow = std::polar(1.0, theta * (2 * l - 1));
    sum += std::exp(i * t * pole) / pole_pow;
  }
  return i * std::sin(pi / (2.0 * l)) * sum;
}

// Real scaled characteristic function g(omega; s).
inline double charfun_g(const TermDistribution& dist, double omega, double scale) {
  using std::numbers::pi;
  if (!(scale > 0.0)) throw InvalidArgument("charfun_g requires scale > 0");
  const double t = std::abs(omega) / scale;
  switch (dist.kind()) {
    case TermKind::Uniform: {
      const double half = 0.5 * t;
      if (half < 1e-4) {
        const double h2 = half * half;
        return 1.0 - h2 / 6.0 + h2 * h2 / 120.0;
      }
      return std::sin(half) / half;
    }
    case TermKind::PowerFamily: {
      if (t == 0.0) return 1.0;
      const std::complex<double> g = power_family_pole_sum(dist.l(), t);
      if (std::abs(g.imag()) >= 1e-9) throw NonRealCharFunction(omega, g.imag());
      return g.real();
    }
    case TermKind::Sech: return 1.0 / std::cosh(0.5 * pi * t);
    case TermKind::Gauss: {
      const double u = dist.gauss_sigma() * t;
      return std::exp(-0.5 * u * u);
    }
  }
  return 0.0;
}

// Monotone non-increasing upper bound on |g(omega; s)| for omega >= 0,
// used to place the truncation point of the inversion integral.
inline double charfun_envelope(const TermDistribution& dist, double omega,
                               double scale) {
  using std::numbers::pi;
  const double t = std::abs(omega) / scale;
  switch (dist.kind()) {
    case TermKind::Uniform: return t <= 2.0 ? 1.0 : 2.0 / t;
    case TermKind::PowerFamily: {
      const double sn = std::sin(pi / (2.0 * dist.l()));
      return std::min(1.0, dist.l() * sn * std::exp(-sn * t));
    }
    case TermKind::Sech:
    case TermKind::Gauss: return charfun_g(dist, omega, scale);
  }
  return 1.0;
}

}  // namespace sumtails
