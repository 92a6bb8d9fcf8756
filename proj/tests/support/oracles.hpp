#pragma once

// Reference computations for the tests. Nothing here calls the library's
// quadrature or closed forms: integrals use a Gauss-Legendre rule built
// from scratch, oscillatory Fourier integrals are summed cycle by cycle and
// accelerated with Wynn's epsilon algorithm.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

namespace oracle {

// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
struct LegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  explicit LegendreRule(int n) : nodes(n), weights(n) {
    for (int i = 0; i < n; ++i) {
      double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
      double dp = 0.0;
      for (int iter = 0; iter < 100; ++iter) {
        double p0 = 1.0;
        double p1 = x;
        for (int k = 2; k <= n; ++k) {
          const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-16) break;
      }
      nodes[i] = x;
      weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
  }
};

inline const LegendreRule& rule32() {
  static const LegendreRule r(32);
  return r;
}

// Composite 32-point Gauss-Legendre over `pieces` equal subintervals.
inline double integrate(const std::function<double(double)>& f, double a, double b,
                        int pieces = 16) {
  const auto& r = rule32();
  const double h = (b - a) / pieces;
  long double sum = 0.0L;
  for (int k = 0; k < pieces; ++k) {
    const double mid = a + (k + 0.5) * h;
    for (std::size_t i = 0; i < r.nodes.size(); ++i) {
      sum += r.weights[i] * f(mid + 0.5 * h * r.nodes[i]);
    }
  }
  return static_cast<double>(sum * 0.5L * h);
}

// int_a^inf f through xi = a + (e^u - 1), u in [0, u_max], for densities
// with at least power-law decay.
inline double integrate_to_infinity(const std::function<double(double)>& f, double a,
                                    double u_max = 60.0, int pieces = 600) {
  auto mapped = [&](double u) {
    const double e = std::exp(u);
    return f(a + e - 1.0) * e;
  };
  return integrate(mapped, 0.0, u_max, pieces);
}

// Limit of a sequence of partial sums by Wynn's epsilon algorithm.
inline double wynn_epsilon(const std::vector<double>& partial) {
  const std::size_t n = partial.size();
  std::vector<double> prev(n + 1, 0.0);
  std::vector<double> cur(partial.begin(), partial.end());
  double best = partial.back();
  for (std::size_t k = 1; k < n; ++k) {
    std::vector<double> next(n - k);
    bool ok = true;
    for (std::size_t i = 0; i + k < n; ++i) {
      const double diff = cur[i + 1] - cur[i];
      if (diff == 0.0) {
        ok = false;
        break;
      }
      next[i] = prev[i + 1] + 1.0 / diff;
    }
    if (!ok) break;
    prev = std::move(cur);
    cur = std::move(next);
    if (k % 2 == 0 && !cur.empty()) best = cur.back();
  }
  return best;
}

// 2 int_0^inf cos(t xi) f(xi) dxi for an even density f, summed over half
// periods of the cosine and extrapolated.
inline double cosine_transform(const std::function<double(double)>& f, double t,
                               int cycles = 40) {
  if (t == 0.0) return 2.0 * integrate_to_infinity(f, 0.0);
  const double half_period = std::numbers::pi / t;
  auto g = [&](double x) { return f(x) * std::cos(t * x); };
  std::vector<double> partial;
  double sum = 0.0;
  for (int k = 0; k < cycles; ++k) {
    const double a = k * half_period;
    const double b = a + half_period;
    const int pieces = std::max(4, static_cast<int>(std::ceil(half_period / 0.25)));
    sum += integrate(g, a, b, std::min(pieces, 4000));
    partial.push_back(sum);
  }
  return 2.0 * wynn_epsilon(partial);
}

// Hand-rolled generator for property tests.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}
  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng_);
  }
  double log_uniform(double lo, double hi) { return std::exp(uniform(std::log(lo), std::log(hi))); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

// Kolmogorov-Smirnov statistic of a sample against a CDF.
inline double ks_statistic(std::vector<double> sample, const std::function<double(double)>& cdf) {
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  return d;
}

// Asymptotic 1% critical value of sqrt(n) D.
inline constexpr double kKsCritical1Percent = 1.6276;

}  // namespace oracle
