#pragma once

// Exact finite-N density of the normalized sum by inverting the
// characteristic function. Every catalog g is real and even, so
//
//   p_N(z) = (1/pi) int_0^inf g(omega; s)^N cos(omega z) domega,
//   P(Z > z) = 1/2 - (1/pi) int_0^inf g(omega; s)^N sin(omega z) / omega domega.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <exception>
#include <numbers>
#include <optional>
#include <thread>
#include <vector>

#include "sumtails/errors.hpp"
#include "sumtails/quadrature.hpp"
#include "sumtails/special_functions.hpp"
#include "sumtails/tail_asymptotics.hpp"
#include "sumtails/term_distributions.hpp"

namespace sumtails {

// A term law, a term count N and the divisor s applied to the raw sum:
// s = sigma sqrt(N) for finite variance, s = N for the l = 1 family.
struct SumSpec {
  TermDistribution distribution = TermDistribution::gauss();
  int n_terms = 1;
  double scale = 1.0;

  static SumSpec normalized(const TermDistribution& dist, int n_terms) {
    if (n_terms < 1) throw InvalidArgument("n_terms must be >= 1");
    SumSpec spec;
    spec.distribution = dist;
    spec.n_terms = n_terms;
    spec.scale = expected_scale(dist, n_terms);
    return spec;
  }

  static double expected_scale(const TermDistribution& dist, int n_terms) {
    if (dist.has_finite_variance()) {
      return dist.sigma() * std::sqrt(static_cast<double>(n_terms));
    }
    return static_cast<double>(n_terms);
  }

  void validate() const {
    if (n_terms < 1) throw InvalidArgument("n_terms must be >= 1");
    const double expected = expected_scale(distribution, n_terms);
    if (!(std::abs(scale - expected) <= 1e-12 * expected)) {
      throw InvalidArgument("scale does not match the normalization rule");
    }
  }

  bool operator==(const SumSpec&) const = default;
};

struct QuadratureConfig {
  double rel_tol = 1e-10;
  double abs_tol = 1e-14;
  double log_cutoff = -40.0;  // truncate where N ln|g| drops below this
  std::size_t max_panels = 1'000'000;

  void validate() const {
    if (!(rel_tol > 0.0)) throw InvalidArgument("rel_tol must be positive");
    if (!(abs_tol > 0.0)) throw InvalidArgument("abs_tol must be positive");
    if (!(log_cutoff < 0.0)) throw InvalidArgument("log_cutoff must be negative");
    if (max_panels < 1) throw InvalidArgument("max_panels must be positive");
  }

  bool operator==(const QuadratureConfig&) const = default;
};

// sign(g)^N exp(N ln|g|).
inline double g_power(double g_value, int n_terms) {
  if (g_value == 0.0) return 0.0;
  const double magnitude = std::exp(n_terms * std::log(std::abs(g_value)));
  const bool negative = g_value < 0.0 && (n_terms % 2 == 1);
  return negative ? -magnitude : magnitude;
}

// |N ln g(omega; sigma sqrt N) + omega^2 / 2|: how far the scaled
// characteristic function is from the Gaussian at fixed omega.
inline double gaussianization_residual(const TermDistribution& dist, int n_terms,
                                       double omega) {
  const double scale = dist.sigma() * std::sqrt(static_cast<double>(n_terms));
  const double g = charfun_g(dist, omega, scale);
  return std::abs(n_terms * std::log(g) + 0.5 * omega * omega);
}

namespace detail {

inline constexpr double kUniformOmegaCap = 1024.0;

inline double panel_width(const SumSpec& spec, double z) {
  return std::min(std::numbers::pi / (2.0 * std::max(std::abs(z), 1.0)), spec.scale);
}

// Integral over [Omega, inf) of (sin(a w)/(a w))^N e^{i z w} w^-extra, with
// a = 1/(2s), by expanding sin^N into exponentials.
inline std::complex<double> uniform_remainder(const SumSpec& spec, double z, double omega,
                                              int extra_power) {
  using cd = std::complex<double>;
  const int n = spec.n_terms;
  const double a = 0.5 / spec.scale;
  const int power = n + extra_power;
  cd sum(0.0, 0.0);
  double binom = 1.0;
  for (int k = 0; k <= n; ++k) {
    if (k > 0) binom = binom * (n - k + 1) / k;
    const double beta = z + (n - 2 * k) * a;
    cd term;
    if (beta == 0.0) {
      // A bare w^-1 term only arises for N = 1 at the jump of the box and
      // contributes to the component the caller discards.
      term = power >= 2 ? cd(std::pow(omega, 1.0 - power) / (power - 1), 0.0) : cd(0.0, 0.0);
    } else {
      term = oscillatory_power_tail(power, beta, omega);
    }
    sum += ((k % 2 == 0) ? binom : -binom) * term;
  }
  const cd two_i_pow = std::pow(cd(0.0, 2.0), n);
  return sum / two_i_pow / std::pow(a, n);
}

}  // namespace detail

// Smallest omega at which N ln(envelope of |g|) falls below the cutoff,
// located by doubling then bisection. For the uniform entry the result is
// capped at 1024 s; the remainder is then added analytically.
inline double truncation_omega(const SumSpec& spec, const QuadratureConfig& cfg) {
  const auto& dist = spec.distribution;
  auto below = [&](double omega) {
    const double env = charfun_envelope(dist, omega, spec.scale);
    if (env <= 0.0) return true;
    return spec.n_terms * std::log(env) < cfg.log_cutoff;
  };
  double lo = 0.0;
  double hi = spec.scale;
  while (!below(hi)) {
    lo = hi;
    hi *= 2.0;
    if (!std::isfinite(hi)) throw Error("truncation point diverged");
  }
  while (hi - lo > 1e-9 * hi) {
    const double mid = 0.5 * (lo + hi);
    if (below(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  if (dist.kind() == TermKind::Uniform) {
    hi = std::min(hi, detail::kUniformOmegaCap * spec.scale);
  }
  return hi;
}

struct DensityPoint {
  double z = 0.0;
  double value = 0.0;
  double error_estimate = 0.0;
  std::size_t panels = 0;
  bool underflow = false;  // |p| < 1e-300 reported as 0
};

inline DensityPoint density_point(const SumSpec& spec, double z,
                                  const QuadratureConfig& cfg = {}) {
  spec.validate();
  cfg.validate();
  const double az = std::abs(z);
  const double omega_max = truncation_omega(spec, cfg);
  const auto& dist = spec.distribution;
  const int n = spec.n_terms;
  const double scale = spec.scale;

  auto integrand = [&](double omega) {
    return g_power(charfun_g(dist, omega, scale), n) * std::cos(omega * az);
  };
  const QuadratureResult q =
      integrate_panels(integrand, 0.0, omega_max, detail::panel_width(spec, az), cfg.rel_tol,
                       cfg.abs_tol, cfg.max_panels);
  if (!q.converged) {
    throw QuadratureFailure("inversion integral did not reach tolerance", z,
                            q.error / std::numbers::pi, q.panels);
  }
  double integral = q.value;
  if (dist.kind() == TermKind::Uniform && omega_max < 2.0 * scale * std::exp(-cfg.log_cutoff / n)) {
    integral += detail::uniform_remainder(spec, az, omega_max, 0).real();
  }

  DensityPoint out;
  out.z = z;
  out.value = integral / std::numbers::pi;
  out.error_estimate = q.error / std::numbers::pi;
  out.panels = q.panels;
  if (out.value < 0.0) {
    if (-out.value > cfg.abs_tol) {
      throw QuadratureFailure("inversion integral is negative beyond noise level", z,
                              out.error_estimate, q.panels);
    }
    out.value = 0.0;
  }
  if (out.value < 1e-300) {
    out.underflow = out.value != 0.0;
    out.value = 0.0;
  }
  return out;
}

inline double density_at(const SumSpec& spec, double z, const QuadratureConfig& cfg = {}) {
  return density_point(spec, z, cfg).value;
}

struct TailProbability {
  double value = 0.0;
  double error_estimate = 0.0;
  std::size_t panels = 0;
};

// P(Z > z) by the Gil-Pelaez inversion of the same characteristic function.
inline TailProbability tail_probability(const SumSpec& spec, double z,
                                        const QuadratureConfig& cfg = {}) {
  spec.validate();
  cfg.validate();
  if (z == 0.0) return {0.5, 0.0, 0};
  const double omega_max = truncation_omega(spec, cfg);
  const auto& dist = spec.distribution;
  const int n = spec.n_terms;
  const double scale = spec.scale;
  auto integrand = [&](double omega) {
    return g_power(charfun_g(dist, omega, scale), n) * std::sin(omega * z) / omega;
  };
  const QuadratureResult q =
      integrate_panels(integrand, 0.0, omega_max, detail::panel_width(spec, z), cfg.rel_tol,
                       cfg.abs_tol, cfg.max_panels);
  if (!q.converged) {
    throw QuadratureFailure("tail probability integral did not reach tolerance", z,
                            q.error / std::numbers::pi, q.panels);
  }
  double integral = q.value;
  if (dist.kind() == TermKind::Uniform && omega_max < 2.0 * scale * std::exp(-cfg.log_cutoff / n)) {
    integral += detail::uniform_remainder(spec, z, omega_max, 1).imag();
  }
  TailProbability out;
  out.value = std::clamp(0.5 - integral / std::numbers::pi, 0.0, 1.0);
  out.error_estimate = q.error / std::numbers::pi;
  out.panels = q.panels;
  return out;
}

struct DensityTable {
  SumSpec spec;
  QuadratureConfig config;
  std::vector<double> z_grid;
  std::vector<double> p_numeric;
  std::vector<double> p_gauss;
  std::optional<std::vector<double>> p_asymptote;
  std::optional<TailAsymptote> asymptote;
  std::vector<double> error_estimate;
  std::vector<bool> underflow;

  double max_error_estimate() const {
    double m = 0.0;
    for (double e : error_estimate) m = std::max(m, e);
    return m;
  }
};

// Evaluates every grid point independently; `threads` > 1 splits the grid
// into contiguous chunks. The output does not depend on the thread count.
inline DensityTable density_grid(const SumSpec& spec, const std::vector<double>& z_grid,
                                 const QuadratureConfig& cfg = {}, unsigned threads = 1) {
  spec.validate();
  cfg.validate();
  if (z_grid.empty()) throw InvalidArgument("z grid must not be empty");
  for (std::size_t i = 1; i < z_grid.size(); ++i) {
    if (!(z_grid[i] > z_grid[i - 1])) throw InvalidArgument("z grid must be strictly ascending");
  }

  const std::size_t count = z_grid.size();
  DensityTable table;
  table.spec = spec;
  table.config = cfg;
  table.z_grid = z_grid;
  table.p_numeric.assign(count, 0.0);
  table.p_gauss.assign(count, 0.0);
  table.error_estimate.assign(count, 0.0);
  std::vector<char> underflow(count, 0);
  std::vector<std::exception_ptr> failures(count);

  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      try {
        const DensityPoint p = density_point(spec, z_grid[i], cfg);
        table.p_numeric[i] = p.value;
        table.error_estimate[i] = p.error_estimate;
        underflow[i] = p.underflow ? 1 : 0;
      } catch (...) {
        failures[i] = std::current_exception();
      }
    }
  };

  const unsigned workers = std::max(1u, std::min<unsigned>(threads, count));
  if (workers == 1) {
    work(0, count);
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (count + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
      const std::size_t begin = w * chunk;
      const std::size_t end = std::min(count, begin + chunk);
      if (begin >= end) break;
      pool.emplace_back(work, begin, end);
    }
    for (auto& t : pool) t.join();
  }
  for (const auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }

  table.underflow.assign(underflow.begin(), underflow.end());
  for (std::size_t i = 0; i < count; ++i) table.p_gauss[i] = gaussian_density(z_grid[i]);
  table.asymptote = registered_asymptote(spec.distribution, spec.n_terms);
  if (table.asymptote) {
    std::vector<double> column(count);
    for (std::size_t i = 0; i < count; ++i) column[i] = table.asymptote->evaluate(z_grid[i]).value;
    table.p_asymptote = std::move(column);
  }
  return table;
}

struct TableCheck {
  double trapezoid_integral = 0.0;
  double max_asymmetry = 0.0;  // only meaningful when symmetric_grid
  bool symmetric_grid = false;
  bool half_line = false;  // grid starts at z = 0; the density is even
  double mass = 0.0;       // trapezoid integral, doubled on half-line grids
  double min_value = 0.0;
};

inline TableCheck check_table(const DensityTable& table) {
  TableCheck out;
  const auto& z = table.z_grid;
  const auto& p = table.p_numeric;
  CompensatedSum integral;
  for (std::size_t i = 1; i < z.size(); ++i) integral.add(0.5 * (z[i] - z[i - 1]) * (p[i] + p[i - 1]));
  out.trapezoid_integral = integral.value();
  out.half_line = !z.empty() && z.front() == 0.0;
  out.mass = out.half_line ? 2.0 * out.trapezoid_integral : out.trapezoid_integral;
  out.min_value = p.empty() ? 0.0 : *std::min_element(p.begin(), p.end());
  const std::size_t n = z.size();
  out.symmetric_grid = n > 0;
  for (std::size_t i = 0; i < n && out.symmetric_grid; ++i) {
    if (std::abs(z[i] + z[n - 1 - i]) > 1e-12 * std::max(1.0, std::abs(z[i]))) {
      out.symmetric_grid = false;
    }
  }
  if (out.symmetric_grid) {
    for (std::size_t i = 0; i < n; ++i) {
      out.max_asymmetry = std::max(out.max_asymmetry, std::abs(p[i] - p[n - 1 - i]));
    }
  }
  return out;
}

}  // namespace sumtails
