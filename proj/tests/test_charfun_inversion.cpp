#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "sumtails/charfun_inversion.hpp"
#include "sumtails/tail_asymptotics.hpp"
#include "sumtails/montecarlo_oracle.hpp"
#include "support/oracles.hpp"

using namespace sumtails;
using Catch::Approx;
using std::numbers::pi;

namespace {

std::vector<double> linspace(double lo, double hi, int points) {
  std::vector<double> z(points);
  for (int i = 0; i < points; ++i) z[i] = lo + (hi - lo) * i / (points - 1);
  return z;
}

}  // namespace

TEST_CASE("SumSpec normalization rule") {
  const auto u = SumSpec::normalized(TermDistribution::uniform(), 12);
  CHECK(u.scale == Approx(1.0).epsilon(1e-15));
  const auto levy = SumSpec::normalized(TermDistribution::power_family(1), 7);
  CHECK(levy.scale == 7.0);
  SumSpec bad = u;
  bad.scale = 2.0;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  bad = u;
  bad.n_terms = 0;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  CHECK_THROWS_AS(SumSpec::normalized(TermDistribution::sech(), 0), InvalidArgument);
}

TEST_CASE("QuadratureConfig validation") {
  QuadratureConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.rel_tol = 0.0;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg = {};
  cfg.log_cutoff = 1.0;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
}

TEST_CASE("g_power in log space") {
  CHECK(g_power(-0.5, 3) == Approx(-0.125).epsilon(1e-15));
  CHECK(g_power(-0.5, 4) == Approx(0.0625).epsilon(1e-15));
  CHECK(g_power(1.0, 1'000'000) == 1.0);
  CHECK(g_power(0.0, 5) == 0.0);
  const double tiny = g_power(0.99, 10'000);
  CHECK(tiny > 0.0);
  CHECK(tiny == Approx(2.2487e-44).epsilon(1e-4));
  CHECK(tiny == Approx(std::exp(10'000 * std::log(0.99))).epsilon(1e-12));
}

TEST_CASE("density examples") {
  for (int n : {1, 5, 50}) {
    CHECK(std::abs(density_at(SumSpec::normalized(TermDistribution::gauss(), n), 0.0) -
                   1.0 / std::sqrt(2.0 * pi)) < 1e-9);
  }
  CHECK(std::abs(density_at(SumSpec::normalized(TermDistribution::uniform(), 2), 0.0) -
                 std::sqrt(2.0 / 12.0)) < 1e-9);
  CHECK(std::abs(density_at(SumSpec::normalized(TermDistribution::power_family(1), 5), 1.0) -
                 1.0 / (2.0 * pi)) < 1e-9);
  CHECK(std::abs(density_at(SumSpec::normalized(TermDistribution::uniform(), 10), 6.0)) < 1e-10);
}

TEST_CASE("Gaussian terms reproduce the Gaussian density") {
  for (double sigma : {1.0, 0.3}) {
    for (int n : {1, 5, 50}) {
      const auto spec = SumSpec::normalized(TermDistribution::gauss(sigma), n);
      for (double z : linspace(-6.0, 6.0, 49)) {
        INFO("sigma " << sigma << " N " << n << " z " << z);
        CHECK(std::abs(density_at(spec, z) - gaussian_density(z)) < 1e-8);
      }
    }
  }
}

TEST_CASE("Cauchy terms are self-similar") {
  const auto dist = TermDistribution::power_family(1);
  for (double z : {0.0, 0.5, 1.0, 5.0, 30.0}) {
    std::vector<double> values;
    for (int n : {1, 3, 10, 100}) values.push_back(density_at(SumSpec::normalized(dist, n), z));
    for (double v : values) {
      CHECK(std::abs(v - levy_density(z)) < 1e-8);
      CHECK(std::abs(v - values.front()) < 1e-8);
    }
  }
}

TEST_CASE("uniform sums match Irwin-Hall across the support") {
  for (int n : {2, 5, 10}) {
    const auto spec = SumSpec::normalized(TermDistribution::uniform(), n);
    const double bound = uniform_support_bound(n);
    for (double z : linspace(-bound * 1.05, bound * 1.05, 85)) {
      const double exact = spec.scale * irwin_hall_density(n, spec.scale * z);
      INFO("N " << n << " z " << z);
      CHECK(std::abs(density_at(spec, z) - exact) < 1e-8);
    }
  }
}

TEST_CASE("a single term returns the scaled term density") {
  for (const auto& dist : {TermDistribution::sech(), TermDistribution::power_family(2),
                           TermDistribution::power_family(3)}) {
    const auto spec = SumSpec::normalized(dist, 1);
    for (double z : {0.0, 0.4, 1.3, 4.0}) {
      INFO(dist.name() << " z " << z);
      CHECK(std::abs(density_at(spec, z) - spec.scale * pdf(dist, spec.scale * z)) < 1e-9);
    }
  }
}

TEST_CASE("density is even in z") {
  oracle::Gen gen(9);
  for (int i = 0; i < 20; ++i) {
    const auto spec = SumSpec::normalized(TermDistribution::power_family(gen.integer(1, 4)),
                                          gen.integer(1, 60));
    const double z = gen.uniform(0.0, 8.0);
    CHECK(density_at(spec, z) == density_at(spec, -z));
  }
}

TEST_CASE("Gaussianization residual shrinks with N") {
  for (const auto& dist : {TermDistribution::uniform(), TermDistribution::power_family(2),
                           TermDistribution::power_family(3), TermDistribution::sech()}) {
    double prev = INFINITY;
    for (int n : {100, 10'000, 1'000'000}) {
      const double r = gaussianization_residual(dist, n, 1.0);
      INFO(dist.name() << " N " << n << " residual " << r);
      CHECK(r < prev);
      prev = r;
    }
  }
  CHECK(gaussianization_residual(TermDistribution::gauss(), 100, 1.0) < 1e-14);
}

// Relative deviation from the Gaussian core stays below 5% for |z| <= N^(1/4)/2
// when the fourth moment is finite. For l = 2 the fourth moment diverges, the
// centre correction decays only like ln N / N, and the window is z_G/2.
TEST_CASE("Gaussian core holds near the centre") {
  for (const auto& dist : {TermDistribution::uniform(), TermDistribution::power_family(3),
                           TermDistribution::sech()}) {
    for (int n : {100, 10'000}) {
      const auto spec = SumSpec::normalized(dist, n);
      const double window = 0.5 * std::pow(double(n), 0.25);
      for (double z : linspace(0.0, window, 11)) {
        INFO(dist.name() << " N " << n << " z " << z);
        CHECK(std::abs(density_at(spec, z) / gaussian_density(z) - 1.0) < 0.05);
      }
    }
  }
}

TEST_CASE("Gaussian core for l = 2 holds inside half the crossover") {
  const auto dist = TermDistribution::power_family(2);
  double prev = std::numeric_limits<double>::infinity();
  for (int n : {100, 10'000}) {
    const auto spec = SumSpec::normalized(dist, n);
    const double window = 0.5 * crossover_zg(4.0, n, CrossoverMode::Iterate);
    double worst = 0.0;
    for (double z : linspace(0.0, window, 11)) {
      worst = std::max(worst, std::abs(density_at(spec, z) / gaussian_density(z) - 1.0));
    }
    INFO("N " << n << " window " << window << " worst " << worst);
    CHECK(worst < prev);
    if (n >= 10'000) CHECK(worst < 0.05);
    prev = worst;
  }
}

TEST_CASE("density_grid examples") {
  SECTION("Gaussian spec") {
    const auto table = density_grid(SumSpec::normalized(TermDistribution::gauss(), 4), {-1.0, 0.0, 1.0});
    for (std::size_t i = 0; i < 3; ++i) {
      CHECK(std::abs(table.p_numeric[i] - table.p_gauss[i]) < 1e-9);
    }
    REQUIRE(table.asymptote.has_value());
    CHECK(table.asymptote->kind == AsymptoteKind::GaussianCore);
  }
  SECTION("uniform N=10 is symmetric and normalized") {
    const auto table =
        density_grid(SumSpec::normalized(TermDistribution::uniform(), 10), linspace(-6.0, 6.0, 1201));
    const TableCheck check = check_table(table);
    CHECK(check.symmetric_grid);
    CHECK(check.max_asymmetry < 1e-9);
    CHECK(std::abs(check.mass - 1.0) < 1e-6);
    CHECK(check.min_value >= -table.config.abs_tol);
    CHECK_FALSE(table.p_asymptote.has_value());
  }
  SECTION("power l=2, N=100 against the power tail") {
    const auto table =
        density_grid(SumSpec::normalized(TermDistribution::power_family(2), 100), {30.0, 40.0, 60.0});
    REQUIRE(table.p_asymptote.has_value());
    double prev_gap = INFINITY;
    for (std::size_t i = 0; i < 3; ++i) {
      const double ratio = table.p_numeric[i] / (*table.p_asymptote)[i];
      CHECK(ratio > 0.8);
      CHECK(ratio < 1.2);
      CHECK(std::abs(ratio - 1.0) < prev_gap);
      prev_gap = std::abs(ratio - 1.0);
    }
  }
  SECTION("grid must ascend") {
    CHECK_THROWS_AS(density_grid(SumSpec::normalized(TermDistribution::sech(), 3), {1.0, 1.0}),
                    InvalidArgument);
    CHECK_THROWS_AS(density_grid(SumSpec::normalized(TermDistribution::sech(), 3), {}),
                    InvalidArgument);
  }
}

TEST_CASE("density tables are normalized for every heavy and light tail") {
  struct Case {
    TermDistribution dist;
    int n;
    double zmax;
  };
  for (const auto& c : {Case{TermDistribution::sech(), 25, 14.0},
                        Case{TermDistribution::power_family(3), 30, 40.0},
                        Case{TermDistribution::gauss(), 3, 9.0}}) {
    const auto table = density_grid(SumSpec::normalized(c.dist, c.n), linspace(0.0, c.zmax, 1401));
    const TableCheck check = check_table(table);
    CHECK(check.half_line);
    INFO(c.dist.name() << " mass " << check.mass);
    CHECK(std::abs(check.mass - 1.0) < 1e-6);
  }
}

TEST_CASE("grid results do not depend on the thread count") {
  const auto spec = SumSpec::normalized(TermDistribution::power_family(2), 50);
  const auto grid = linspace(-10.0, 10.0, 41);
  const auto one = density_grid(spec, grid, {}, 1);
  const auto four = density_grid(spec, grid, {}, 4);
  CHECK(one.p_numeric == four.p_numeric);
  CHECK(one.error_estimate == four.error_estimate);
}

TEST_CASE("QuadratureFailure carries the offending z") {
  QuadratureConfig cfg;
  cfg.max_panels = 3;
  const auto spec = SumSpec::normalized(TermDistribution::power_family(2), 100);
  try {
    density_grid(spec, {0.0, 25.0}, cfg);
    FAIL("expected QuadratureFailure");
  } catch (const QuadratureFailure& e) {
    CHECK(e.z() == 0.0);
    CHECK(e.panels() > 0);
  }
}

TEST_CASE("deep tails are reported as zero, never negative") {
  const auto spec = SumSpec::normalized(TermDistribution::gauss(), 1);
  const DensityPoint p = density_point(spec, 45.0);
  CHECK(p.value == 0.0);
  const auto uniform = SumSpec::normalized(TermDistribution::uniform(), 3);
  CHECK(density_at(uniform, 2.5) >= 0.0);
}

TEST_CASE("truncation point sits where N ln|g| falls below the cutoff") {
  const QuadratureConfig cfg;
  for (const auto& dist : {TermDistribution::sech(), TermDistribution::gauss(),
                           TermDistribution::power_family(2)}) {
    const auto spec = SumSpec::normalized(dist, 40);
    const double omega = truncation_omega(spec, cfg);
    CHECK(spec.n_terms * std::log(charfun_envelope(dist, omega, spec.scale)) < cfg.log_cutoff);
  }
}

TEST_CASE("tail probability matches closed forms") {
  for (double z : {0.3, 1.0, 2.5, 5.0}) {
    const auto g = tail_probability(SumSpec::normalized(TermDistribution::gauss(), 7), z);
    CHECK(std::abs(g.value - 0.5 * std::erfc(z / std::numbers::sqrt2)) < 1e-10);
    const auto c = tail_probability(SumSpec::normalized(TermDistribution::power_family(1), 4), z);
    CHECK(std::abs(c.value - (0.5 - std::atan(z) / pi)) < 1e-10);
  }
  // Two uniform terms: triangle on [-sqrt 6, sqrt 6] in z.
  const auto u2 = SumSpec::normalized(TermDistribution::uniform(), 2);
  for (double z : {0.5, 1.5, 2.2}) {
    const double x = u2.scale * z;
    const double exact = 0.5 * (1.0 - x) * (1.0 - x);
    CHECK(std::abs(tail_probability(u2, z).value - exact) < 1e-10);
  }
}

TEST_CASE("tail probability integrates the density") {
  const auto spec = SumSpec::normalized(TermDistribution::power_family(2), 100);
  for (double z : {1.0, 4.0}) {
    // Tail of the density from z to 60 plus the power-tail remainder beyond.
    const double body = oracle::integrate([&](double t) { return density_at(spec, t); }, z, 60.0, 24);
    const double rest = power_tail(2, 100, 60.0) * 60.0 / 3.0;
    CHECK(tail_probability(spec, z).value == Approx(body + rest).epsilon(2e-5));
  }
}
