#pragma once

// Independent checks on the inversion: direct simulation of the sum,
// exceedance estimates, the Irwin-Hall density and a direct-domain
// iterated convolution.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <thread>
#include <vector>

#include "sumtails/charfun_inversion.hpp"
#include "sumtails/errors.hpp"
#include "sumtails/term_distributions.hpp"

namespace sumtails {

// SplitMix64 finalizer.
inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Seed of block b: splitmix64(master ^ splitmix64(b)).
inline constexpr std::uint64_t substream_seed(std::uint64_t master, std::uint64_t block) noexcept {
  return splitmix64(master ^ splitmix64(block));
}

inline constexpr std::size_t kSampleBlockSize = 1u << 14;

struct SampleBatch {
  SumSpec spec;
  std::uint64_t seed = 0;
  std::size_t count = 0;
  std::vector<double> values;  // normalized sums z
};

// Draws `count` normalized sums. Block b of kSampleBlockSize values uses its
// own mt19937_64 stream seeded with substream_seed(seed, b), so the values
// do not depend on `threads` (0 means hardware concurrency).
inline SampleBatch sample_sum(const SumSpec& spec, std::size_t count, std::uint64_t seed,
                              unsigned threads = 0) {
  spec.validate();
  if (count < 1) throw InvalidArgument("sample count must be >= 1");
  SampleBatch batch;
  batch.spec = spec;
  batch.seed = seed;
  batch.count = count;
  batch.values.resize(count);

  const FastQuantile inverse(spec.distribution);
  const std::size_t blocks = (count + kSampleBlockSize - 1) / kSampleBlockSize;
  const double inv_scale = 1.0 / spec.scale;
  const int n_terms = spec.n_terms;

  auto run_block = [&](std::size_t b) {
    std::mt19937_64 rng(substream_seed(seed, b));
    const std::size_t begin = b * kSampleBlockSize;
    const std::size_t end = std::min(count, begin + kSampleBlockSize);
    for (std::size_t i = begin; i < end; ++i) {
      double sum = 0.0;
      for (int n = 0; n < n_terms; ++n) sum += inverse(uniform_open01(rng));
      batch.values[i] = sum * inv_scale;
    }
  };

  unsigned workers = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, blocks));
  if (workers <= 1) {
    for (std::size_t b = 0; b < blocks; ++b) run_block(b);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t b = w; b < blocks; b += workers) run_block(b);
      });
    }
    for (auto& t : pool) t.join();
  }
  return batch;
}

struct TailEstimate {
  double z = 0.0;
  double estimate = 0.0;   // fraction of values > z
  double std_error = 0.0;  // sqrt(p (1 - p) / count)
  std::size_t exceedances = 0;
  std::size_t count = 0;
  bool low_statistics = false;  // fewer than 10 exceedances
};

inline TailEstimate empirical_tail(const SampleBatch& batch, double z) {
  if (batch.values.empty()) throw InvalidArgument("sample batch is empty");
  TailEstimate out;
  out.z = z;
  out.count = batch.values.size();
  out.exceedances = static_cast<std::size_t>(
      std::count_if(batch.values.begin(), batch.values.end(), [z](double v) { return v > z; }));
  out.estimate = static_cast<double>(out.exceedances) / static_cast<double>(out.count);
  out.std_error = std::sqrt(out.estimate * (1.0 - out.estimate) / static_cast<double>(out.count));
  out.low_statistics = out.exceedances < 10;
  return out;
}

// Density of x = xi_1 + ... + xi_N with xi uniform on [-1/2, 1/2]:
//   p(x) = 1/(N-1)! sum_{k <= y} (-1)^k C(N, k) (y - k)^(N-1),  y = x + N/2,
// evaluated on the nearer half of the support in long double.
inline double irwin_hall_density(int n_terms, double x) {
  if (n_terms < 1) throw InvalidArgument("n_terms must be >= 1");
  if (n_terms > 30) throw PrecisionGuard("Irwin-Hall closed form is limited to N <= 30");
  const long double n = n_terms;
  long double y = static_cast<long double>(x) + 0.5L * n;
  if (y <= 0.0L || y >= n) return 0.0;
  y = std::min(y, n - y);

  long double sum = 0.0L;
  long double comp = 0.0L;
  long double binom = 1.0L;
  const int k_max = static_cast<int>(std::floor(y));
  for (int k = 0; k <= k_max; ++k) {
    if (k > 0) binom = binom * (n_terms - k + 1) / k;
    long double term = binom * std::pow(y - k, static_cast<long double>(n_terms - 1));
    if (k % 2 == 1) term = -term;
    const long double t = sum + term;
    if (std::abs(sum) >= std::abs(term)) {
      comp += (sum - t) + term;
    } else {
      comp += (term - t) + sum;
    }
    sum = t;
  }
  long double fact = 1.0L;
  for (int k = 2; k < n_terms; ++k) fact *= k;
  return static_cast<double>((sum + comp) / fact);
}

// Density of the unnormalized sum on a uniform grid by iterating the
// trapezoid-discretized convolution with f. Grid nodes must be integer
// multiples of the step; for the uniform law 1/2 must be a multiple too,
// and each step integrates over the exact overlap of the two supports.
inline std::vector<double> convolution_oracle(const TermDistribution& dist, int n_terms,
                                              const std::vector<double>& x_grid) {
  if (n_terms < 1) throw InvalidArgument("n_terms must be >= 1");
  if (x_grid.size() < 3) throw InvalidArgument("convolution grid needs at least 3 points");
  const std::size_t m = x_grid.size();
  const double h = (x_grid.back() - x_grid.front()) / static_cast<double>(m - 1);
  if (!(h > 0.0)) throw InvalidArgument("convolution grid must be ascending");
  for (std::size_t i = 1; i < m; ++i) {
    if (std::abs((x_grid[i] - x_grid[i - 1]) - h) > 1e-9 * h) {
      throw InvalidArgument("convolution grid must be uniform");
    }
  }
  const double first = x_grid.front() / h;
  if (std::abs(first - std::round(first)) > 1e-6) {
    throw InvalidArgument("convolution grid must contain multiples of its step");
  }
  const long first_index = std::lround(first);
  const long last_index = first_index + static_cast<long>(m) - 1;
  const long half_width = std::max(std::abs(first_index), std::abs(last_index));

  // Lattice j = -half_width..half_width, stored at offset half_width.
  const long lattice = 2 * half_width + 1;
  const bool compact = dist.kind() == TermKind::Uniform;
  long reach = 0;  // support half-width of f in lattice steps (compact only)
  if (compact) {
    const double r = 0.5 / h;
    if (std::abs(r - std::round(r)) > 1e-6) {
      throw InvalidArgument("grid step must divide 1/2 for the uniform law");
    }
    reach = std::lround(r);
  } else {
    const double outside = 2.0 * tail_prob(dist, half_width * h);
    if (outside > 1e-8) throw GridTooNarrow("term mass outside the grid", outside);
  }

  std::vector<double> kernel(static_cast<std::size_t>(2 * lattice - 1));
  for (long d = -(lattice - 1); d <= lattice - 1; ++d) {
    kernel[static_cast<std::size_t>(d + lattice - 1)] = pdf(dist, d * h);
  }
  auto f_at = [&](long d) { return kernel[static_cast<std::size_t>(d + lattice - 1)]; };

  std::vector<double> current(static_cast<std::size_t>(lattice), 0.0);
  long support_lo = compact ? std::max(-reach, -half_width) : -half_width;
  long support_hi = compact ? std::min(reach, half_width) : half_width;
  for (long j = support_lo; j <= support_hi; ++j) {
    current[static_cast<std::size_t>(j + half_width)] = pdf(dist, j * h);
  }

  std::vector<double> next(current.size());
  for (int step = 1; step < n_terms; ++step) {
    std::fill(next.begin(), next.end(), 0.0);
    const long new_lo = compact ? std::max(support_lo - reach, -half_width) : -half_width;
    const long new_hi = compact ? std::min(support_hi + reach, half_width) : half_width;
    for (long i = new_lo; i <= new_hi; ++i) {
      long lo = support_lo;
      long hi = support_hi;
      if (compact) {
        lo = std::max(lo, i - reach);
        hi = std::min(hi, i + reach);
      }
      if (hi <= lo) continue;
      CompensatedSum acc;
      acc.add(0.5 * current[static_cast<std::size_t>(lo + half_width)] * f_at(i - lo));
      acc.add(0.5 * current[static_cast<std::size_t>(hi + half_width)] * f_at(i - hi));
      for (long j = lo + 1; j < hi; ++j) {
        acc.add(current[static_cast<std::size_t>(j + half_width)] * f_at(i - j));
      }
      next[static_cast<std::size_t>(i + half_width)] = h * acc.value();
    }
    current.swap(next);
    support_lo = new_lo;
    support_hi = new_hi;
  }

  if (n_terms > 1 || !compact) {
    CompensatedSum mass;
    for (long j = -half_width; j <= half_width; ++j) {
      const double w = (j == -half_width || j == half_width) ? 0.5 : 1.0;
      mass.add(w * h * current[static_cast<std::size_t>(j + half_width)]);
    }
    const double missing = std::abs(1.0 - mass.value());
    if (missing > 1e-8) throw GridTooNarrow("sum mass outside the grid", missing);
  }

  std::vector<double> out(m);
  for (std::size_t i = 0; i < m; ++i) {
    out[i] = current[static_cast<std::size_t>(first_index + static_cast<long>(i) + half_width)];
  }
  return out;
}

}  // namespace sumtails
