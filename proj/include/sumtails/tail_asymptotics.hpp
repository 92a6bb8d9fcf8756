#pragma once

// Closed-form laws for the normalized sum z: the Gaussian core, the
// single-big-jump density N f(x), the power-law tail of the A/(1+xi^2l)
// family, the leading residue tail of the sech family, the Cauchy law and
// the uniform hard cutoff. Plus the Gaussian/jump crossover z_G and the
// small-argument series of g on the negative imaginary axis.

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <optional>
#include <string>

#include "sumtails/errors.hpp"
#include "sumtails/special_functions.hpp"
#include "sumtails/term_distributions.hpp"

namespace sumtails {

inline double log_gaussian_density(double z) {
  return -0.5 * z * z - 0.5 * std::log(2.0 * std::numbers::pi);
}

inline double gaussian_density(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

// Cauchy law; exact for the l = 1 family at every N when z = x / N.
inline double levy_density(double z) {
  return 1.0 / (std::numbers::pi * (1.0 + z * z));
}

inline double uniform_support_bound(int n_terms) {
  if (n_terms < 1) throw InvalidArgument("n_terms must be >= 1");
  return std::sqrt(3.0 * n_terms);
}

struct SingleJump {
  double density = 0.0;  // N f(x)
  bool valid = false;    // N * P(|xi| > |x|) < 0.1
};

inline SingleJump single_big_jump(const TermDistribution& dist, int n_terms, double x) {
  if (n_terms < 1) throw InvalidArgument("n_terms must be >= 1");
  SingleJump out;
  out.density = n_terms * pdf(dist, x);
  const double two_sided = 2.0 * tail_prob(dist, std::abs(x));
  out.valid = n_terms * two_sided < 0.1;
  return out;
}

// The jump density expressed in z: s N f(s z).
inline double single_big_jump_z(const TermDistribution& dist, int n_terms, double scale,
                                double z) {
  return scale * single_big_jump(dist, n_terms, scale * z).density;
}

// ln of l N sin(pi/2l) / (pi (sigma sqrt N)^(2l-1) z^(2l)).
inline double log_power_tail(int l, int n_terms, double z) {
  using std::numbers::pi;
  if (l < 2) throw DivergentVariance();
  if (n_terms < 1) throw InvalidArgument("n_terms must be >= 1");
  if (!(z > 0.0)) throw InvalidArgument("power_tail requires z > 0");
  const double sigma = TermDistribution::power_family(l).sigma();
  const double log_scale = std::log(sigma) + 0.5 * std::log(static_cast<double>(n_terms));
  return std::log(l * static_cast<double>(n_terms) * std::sin(pi / (2.0 * l)) / pi) -
         (2.0 * l - 1.0) * log_scale - 2.0 * l * std::log(z);
}

inline double power_tail(int l, int n_terms, double z) {
  return std::exp(log_power_tail(l, n_terms, z));
}

// ln of N^(N/2) z^(N-1) exp(-pi z sqrt(N) / 2) / (N-1)!.
inline double log_sech_tail(int n_terms, double z) {
  if (n_terms < 1) throw InvalidArgument("n_terms must be >= 1");
  if (!(z > 0.0)) throw InvalidArgument("sech_tail requires z > 0");
  const double n = n_terms;
  return 0.5 * n * std::log(n) - log_factorial(n_terms - 1) + (n - 1.0) * std::log(z) -
         0.5 * std::numbers::pi * z * std::sqrt(n);
}

inline double sech_tail(int n_terms, double z) {
  return std::exp(log_sech_tail(n_terms, z));
}

// Generic power-law tail f ~ A / |xi|^m for |xi| >> xi_c.
struct HeavyTailModel {
  double amplitude = 1.0;
  double exponent = 2.0;
  double cutoff = 1.0;

  void validate() const {
    if (!(exponent > 1.0)) throw InvalidArgument("heavy tail exponent must exceed 1");
    if (!(amplitude > 0.0)) throw InvalidArgument("heavy tail amplitude must be positive");
    if (!(cutoff > 0.0)) throw InvalidArgument("heavy tail cutoff must be positive");
  }

  double density(double xi) const { return amplitude / std::pow(std::abs(xi), exponent); }
  bool finite_variance() const { return exponent > 3.0; }

  static HeavyTailModel from(const TermDistribution& dist) {
    if (dist.kind() != TermKind::PowerFamily) {
      throw InvalidArgument("only the power family has a power-law tail");
    }
    return HeavyTailModel{dist.amplitude(), 2.0 * dist.l(), 1.0};
  }
};

enum class AsymptoteKind { GaussianCore, PowerTail, SechTail, LevyExact, HardCutoff };

inline std::string to_string(AsymptoteKind kind) {
  switch (kind) {
    case AsymptoteKind::GaussianCore: return "gaussian_core";
    case AsymptoteKind::PowerTail: return "power_tail";
    case AsymptoteKind::SechTail: return "sech_tail";
    case AsymptoteKind::LevyExact: return "levy_exact";
    case AsymptoteKind::HardCutoff: return "hard_cutoff";
  }
  return "unknown";
}

struct AsymptoteValue {
  double value = 0.0;
  double log_value = 0.0;
  bool in_validity = false;
};

// A tagged closed-form model. Evaluation below onset_z is allowed and
// reported through in_validity.
struct TailAsymptote {
  AsymptoteKind kind = AsymptoteKind::GaussianCore;
  int l = 0;
  int n_terms = 1;
  double sigma = 1.0;
  double onset_z = std::numeric_limits<double>::min();

  static TailAsymptote gaussian_core() { return {}; }

  static TailAsymptote power(int l, int n_terms) {
    if (l < 2) throw DivergentVariance();
    const double sigma = TermDistribution::power_family(l).sigma();
    return {AsymptoteKind::PowerTail, l, n_terms, sigma, std::sqrt(double(n_terms)) / sigma};
  }

  static TailAsymptote sech(int n_terms) {
    return {AsymptoteKind::SechTail, 0, n_terms, std::numbers::pi / 2.0,
            std::sqrt(double(n_terms))};
  }

  static TailAsymptote levy() {
    return {AsymptoteKind::LevyExact, 1, 1, std::numeric_limits<double>::infinity(),
            std::numeric_limits<double>::min()};
  }

  static TailAsymptote hard_cutoff(int n_terms) {
    return {AsymptoteKind::HardCutoff, 0, n_terms, std::sqrt(1.0 / 12.0),
            uniform_support_bound(n_terms)};
  }

  AsymptoteValue evaluate(double z) const {
    const double az = std::abs(z);
    AsymptoteValue out;
    out.in_validity = az > onset_z;
    switch (kind) {
      case AsymptoteKind::GaussianCore: out.log_value = log_gaussian_density(z); break;
      case AsymptoteKind::PowerTail:
        out.log_value = az > 0.0 ? log_power_tail(l, n_terms, az)
                                 : std::numeric_limits<double>::infinity();
        break;
      case AsymptoteKind::SechTail:
        out.log_value = az > 0.0 ? log_sech_tail(n_terms, az)
                                 : -std::numeric_limits<double>::infinity();
        break;
      case AsymptoteKind::LevyExact: out.log_value = std::log(levy_density(z)); break;
      case AsymptoteKind::HardCutoff:
        out.in_validity = az >= onset_z;
        out.log_value = out.in_validity ? -std::numeric_limits<double>::infinity()
                                        : std::numeric_limits<double>::quiet_NaN();
        break;
    }
    out.value = std::exp(out.log_value);
    return out;
  }
};

// The tail model registered for a normalized sum of N terms, if any. The
// uniform hard cutoff carries no density values and is not registered.
inline std::optional<TailAsymptote> registered_asymptote(const TermDistribution& dist,
                                                         int n_terms) {
  switch (dist.kind()) {
    case TermKind::PowerFamily:
      if (dist.l() == 1) return TailAsymptote::levy();
      return TailAsymptote::power(dist.l(), n_terms);
    case TermKind::Sech: return TailAsymptote::sech(n_terms);
    case TermKind::Gauss: return TailAsymptote::gaussian_core();
    case TermKind::Uniform: return std::nullopt;
  }
  return std::nullopt;
}

enum class CrossoverMode { Iterate, Solve };

// z_G where the Gaussian core meets the single-jump density. Iterate mode
// returns the two-term expression sqrt((m-3) ln N + m ln((m-3) ln N));
// solve mode bisects p_G(z) = s N f(s z) for the power family with 2l = m.
inline double crossover_zg(double m, int n_terms, CrossoverMode mode) {
  if (!(m > 3.0)) throw InvalidArgument("crossover requires m > 3");
  if (n_terms < 2) throw InvalidArgument("crossover requires N >= 2");
  const double lead = (m - 3.0) * std::log(static_cast<double>(n_terms));
  if (mode == CrossoverMode::Iterate) {
    if (!(lead > 1.0)) throw InvalidArgument("crossover iterate requires (m-3) ln N > 1");
    return std::sqrt(lead + m * std::log(lead));
  }

  const double half = 0.5 * m;
  if (std::abs(half - std::round(half)) > 1e-12) {
    throw InvalidArgument("solve mode needs an even integer m (power family 2l = m)");
  }
  const auto dist = TermDistribution::power_family(static_cast<int>(std::round(half)));
  const double scale = dist.sigma() * std::sqrt(static_cast<double>(n_terms));
  auto defect = [&](double z) {
    return gaussian_density(z) - single_big_jump_z(dist, n_terms, scale, z);
  };
  double lo = 1.0;
  double hi = 10.0 * std::sqrt(static_cast<double>(n_terms));
  double f_lo = defect(lo);
  const double f_hi = defect(hi);
  if (f_lo == 0.0) return lo;
  if (f_hi == 0.0) return hi;
  if ((f_lo > 0.0) == (f_hi > 0.0)) {
    throw NoCrossover("Gaussian core and single-jump density do not cross on [1, 10 sqrt(N)]");
  }
  while (hi - lo > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    const double f_mid = defect(mid);
    if (f_mid == 0.0) return mid;
    if ((f_mid > 0.0) == (f_lo > 0.0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

struct SeriesValue {
  std::complex<double> value;
  bool convergence_warning = false;
};

// g(-i w'') = sum_p r_p + i sum_q s_q with t = w'' / s,
//   r_p = t^(2p) / (2p)! * sin(pi/2l) / sin(pi (2p+1) / 2l),
//   s_q = l sin(pi/2l) (-1)^(q-1) t^(2ql-1) / (2ql-1)!.
inline SeriesValue series_g_imag(int l, double scale, double omega_pp, int p_max = 20,
                                 int q_max = 20) {
  using std::numbers::pi;
  if (l < 1) throw InvalidArgument("l must be >= 1");
  if (!(scale > 0.0)) throw InvalidArgument("scale must be positive");
  if (!(omega_pp >= 0.0)) throw InvalidArgument("omega'' must be nonnegative");
  if (p_max < 0 || q_max < 1) throw InvalidArgument("series truncation out of range");

  const double t = omega_pp / scale;
  const double log_t = t > 0.0 ? std::log(t) : -std::numeric_limits<double>::infinity();
  const double sin_base = std::sin(pi / (2.0 * l));

  auto power_over_factorial = [&](int k) {
    if (k == 0) return 1.0;
    if (t == 0.0) return 0.0;
    return std::exp(k * log_t - log_factorial(k));
  };

  SeriesValue out;
  double real_sum = 0.0;
  double prev_r = 0.0;
  double last_r = 0.0;
  for (int p = 0; p <= p_max; ++p) {
    const double r = power_over_factorial(2 * p) * sin_base /
                     std::sin(pi * (2 * p + 1) / (2.0 * l));
    real_sum += r;
    prev_r = last_r;
    last_r = r;
  }
  double imag_sum = 0.0;
  double prev_s = 0.0;
  double last_s = 0.0;
  for (int q = 1; q <= q_max; ++q) {
    const int k = 2 * q * l - 1;
    const double sign = (q % 2 == 1) ? 1.0 : -1.0;
    const double s = l * sin_base * sign * power_over_factorial(k);
    imag_sum += s;
    prev_s = last_s;
    last_s = s;
  }
  out.value = {real_sum, imag_sum};
  const bool r_grows = p_max > 0 && last_r != 0.0 && std::abs(last_r) >= std::abs(prev_r);
  const bool s_grows = q_max > 1 && last_s != 0.0 && std::abs(last_s) >= std::abs(prev_s);
  out.convergence_warning = r_grows || s_grows;
  return out;
}

// Closed-form g at the imaginary argument -i w'' from the pole sum.
inline std::complex<double> pole_sum_at_imaginary(int l, double scale, double omega_pp) {
  return power_family_pole_sum(l, std::complex<double>(0.0, -omega_pp / scale));
}

// Leading imaginary part of g(-i w'')^N: N s_1.
inline double im_gN_leading(int l, int n_terms, double scale, double omega_pp) {
  using std::numbers::pi;
  if (l < 1) throw InvalidArgument("l must be >= 1");
  if (!(scale > 0.0)) throw InvalidArgument("scale must be positive");
  const double t = omega_pp / scale;
  return n_terms * l * std::sin(pi / (2.0 * l)) * std::pow(t, 2 * l - 1) /
         factorial(2 * l - 1);
}

}  // namespace sumtails
