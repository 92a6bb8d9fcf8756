#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <numbers>

#include "sumtails/charfun_inversion.hpp"
#include "sumtails/tail_asymptotics.hpp"
#include "support/oracles.hpp"

using namespace sumtails;
using Catch::Approx;
using std::numbers::pi;

TEST_CASE("gaussian_density values") {
  CHECK(gaussian_density(0.0) == Approx(0.398942).margin(5e-7));
  CHECK(gaussian_density(1.0) == Approx(0.241971).margin(5e-7));
  CHECK(gaussian_density(5.0) == Approx(1.48672e-6).epsilon(1e-5));
  CHECK(log_gaussian_density(50.0) == Approx(-1250.0 - 0.5 * std::log(2.0 * pi)).epsilon(1e-15));
}

TEST_CASE("single_big_jump values") {
  const auto p2 = TermDistribution::power_family(2);
  const SingleJump j = single_big_jump(p2, 100, 30.0);
  CHECK(j.density == Approx(5.5575e-5).epsilon(1e-4));
  CHECK(j.density == Approx(100.0 * p2.amplitude() / (1.0 + std::pow(30.0, 4))).epsilon(1e-14));
  CHECK(j.valid);
  CHECK_FALSE(single_big_jump(p2, 100, 1.0).valid);
  CHECK(single_big_jump(TermDistribution::sech(), 1, 0.7).density == pdf(TermDistribution::sech(), 0.7));
  CHECK(single_big_jump(TermDistribution::uniform(), 10, 3.0).density == 0.0);
}

TEST_CASE("power_tail values") {
  CHECK(power_tail(2, 100, 30.0) == Approx(5.5575e-8).epsilon(1e-4));
  CHECK(power_tail(2, 10'000, 300.0) == Approx(5.5575e-13).epsilon(1e-4));
  CHECK_THROWS_AS(power_tail(1, 10, 3.0), DivergentVariance);
  // s N f(s z) with the 1 in 1 + xi^(2l) dropped equals the power tail.
  for (int l : {2, 3, 5}) {
    const auto dist = TermDistribution::power_family(l);
    const double s = dist.sigma() * 10.0;
    const double z = 30.0;
    const double dropped = s * 100 * dist.amplitude() / std::pow(s * z, 2 * l);
    CHECK(power_tail(l, 100, z) == Approx(dropped).epsilon(1e-13));
    CHECK(power_tail(l, 100, z) == Approx(single_big_jump_z(dist, 100, s, z)).epsilon(1e-5));
  }
  CHECK(std::exp(log_power_tail(2, 100, 1e100)) == 0.0);
  CHECK(log_power_tail(2, 100, 1e100) ==
        Approx(std::log(power_tail(2, 100, 1.0)) - 4.0 * std::log(1e100)));
}

TEST_CASE("sech_tail values") {
  CHECK(sech_tail(4, 10.0) == Approx(16.0 / 6.0 * 1e3 * std::exp(-10.0 * pi)).epsilon(1e-13));
  CHECK(sech_tail(4, 10.0) == Approx(6.06e-11).epsilon(2e-3));
  CHECK(sech_tail(1, 2.0) == Approx(std::exp(-pi)).epsilon(1e-14));
  const double p25 = sech_tail(25, 8.0);
  CHECK(std::isfinite(p25));
  CHECK(p25 > 0.0);
  // Log space stays finite where N^(N/2) overflows.
  const double logv = log_sech_tail(400, 30.0);
  const double expected = 200.0 * std::log(400.0) - std::lgamma(400.0) + 399.0 * std::log(30.0) -
                          pi * 30.0 * 20.0 / 2.0;
  CHECK(logv == Approx(expected).epsilon(1e-13));
}

TEST_CASE("the single-term sech tail matches the scaled density") {
  // N = 1: s f(s z) = (1/2) / cosh(pi z / 2) ~ exp(-pi z / 2).
  const auto dist = TermDistribution::sech();
  for (double z : {6.0, 10.0, 15.0}) {
    const double scaled = dist.sigma() * pdf(dist, dist.sigma() * z);
    CHECK(sech_tail(1, z) == Approx(scaled).epsilon(3.0 * std::exp(-pi * z)));
  }
}

TEST_CASE("levy_density values") {
  CHECK(levy_density(0.0) == Approx(0.318310).epsilon(1e-6));
  CHECK(levy_density(1.0) == Approx(0.159155).epsilon(1e-5));
  const double mass = 2.0 * oracle::integrate_to_infinity(levy_density, 0.0, 80.0, 2000);
  CHECK(mass == Approx(1.0).epsilon(1e-10));
}

TEST_CASE("uniform_support_bound values") {
  CHECK(uniform_support_bound(10) == Approx(5.47723).epsilon(1e-6));
  CHECK(uniform_support_bound(1) == Approx(1.73205).epsilon(1e-6));
  CHECK(uniform_support_bound(100) == Approx(17.3205).epsilon(1e-6));
}

TEST_CASE("HeavyTailModel") {
  const auto m = HeavyTailModel::from(TermDistribution::power_family(2));
  CHECK(m.exponent == 4.0);
  CHECK(m.amplitude == Approx(TermDistribution::power_family(2).amplitude()));
  CHECK(m.finite_variance());
  CHECK_FALSE(HeavyTailModel::from(TermDistribution::power_family(1)).finite_variance());
  CHECK(m.density(10.0) == Approx(m.amplitude * 1e-4));
  CHECK_THROWS_AS((HeavyTailModel{1.0, 1.0, 1.0}.validate()), InvalidArgument);
  CHECK_THROWS_AS((HeavyTailModel{-1.0, 3.0, 1.0}.validate()), InvalidArgument);
}

TEST_CASE("TailAsymptote validity thresholds") {
  const auto power = TailAsymptote::power(2, 100);
  CHECK(power.onset_z == Approx(10.0));
  CHECK_FALSE(power.evaluate(5.0).in_validity);
  CHECK(power.evaluate(40.0).in_validity);
  CHECK(power.evaluate(40.0).value == Approx(power_tail(2, 100, 40.0)));
  const auto sech = TailAsymptote::sech(25);
  CHECK(sech.onset_z == Approx(5.0));
  CHECK(sech.evaluate(8.0).value == Approx(sech_tail(25, 8.0)));
  CHECK(sech.evaluate(8.0).in_validity);
  const auto cutoff = TailAsymptote::hard_cutoff(10);
  CHECK(cutoff.evaluate(6.0).value == 0.0);
  CHECK(std::isnan(cutoff.evaluate(1.0).value));
  CHECK(TailAsymptote::levy().evaluate(1.0).value == Approx(levy_density(1.0)));
  CHECK_THROWS_AS(TailAsymptote::power(1, 10), DivergentVariance);
  CHECK_FALSE(registered_asymptote(TermDistribution::uniform(), 10).has_value());
  CHECK(registered_asymptote(TermDistribution::power_family(1), 10)->kind == AsymptoteKind::LevyExact);
}

TEST_CASE("dominance of the power tail over the Gaussian core") {
  for (double z : {40.0, 60.0, 80.0, 200.0}) {
    CHECK(power_tail(2, 100, z) > gaussian_density(z));
  }
}

// The sech tail is exponential, so it ends above the Gaussian core; it
// still sits far above the single-jump prediction.
TEST_CASE("sech tail ordering") {
  const auto dist = TermDistribution::sech();
  const double s = dist.sigma() * 5.0;
  for (double z : {8.0, 10.0, 15.0}) {
    CHECK(sech_tail(25, z) > single_big_jump_z(dist, 25, s, z));
    CHECK(sech_tail(25, z) > gaussian_density(z));
  }
  const auto spec = SumSpec::normalized(dist, 25);
  CHECK(density_at(spec, 8.0) > gaussian_density(8.0));
  CHECK(density_at(spec, 8.0) > single_big_jump_z(dist, 25, s, 8.0));
}

TEST_CASE("crossover iterate and solve") {
  const double ln4 = std::log(1e4);
  const double ln2 = std::log(1e2);
  CHECK(crossover_zg(4.0, 10'000, CrossoverMode::Iterate) ==
        Approx(std::sqrt(ln4 + 4.0 * std::log(ln4))).epsilon(1e-15));
  CHECK(crossover_zg(4.0, 100, CrossoverMode::Iterate) ==
        Approx(std::sqrt(ln2 + 4.0 * std::log(ln2))).epsilon(1e-15));
  // Four-decimal references: 4 ln(9.2103) = 8.8812, so the root is 4.25343.
  CHECK(crossover_zg(4.0, 10'000, CrossoverMode::Iterate) == Approx(4.2534).margin(5e-5));
  CHECK(crossover_zg(4.0, 100, CrossoverMode::Iterate) == Approx(3.2732).margin(5e-5));
  const double iterate = crossover_zg(4.0, 10'000, CrossoverMode::Iterate);
  const double root = crossover_zg(4.0, 10'000, CrossoverMode::Solve);
  CHECK(std::abs(root / iterate - 1.0) < 0.15);
  const auto dist = TermDistribution::power_family(2);
  CHECK(std::abs(gaussian_density(root) - single_big_jump_z(dist, 10'000, 100.0, root)) < 1e-8);
  // Larger m pushes the crossover out.
  CHECK(crossover_zg(6.0, 10'000, CrossoverMode::Solve) > root);
  CHECK(crossover_zg(6.0, 10'000, CrossoverMode::Iterate) > iterate);
}

TEST_CASE("crossover errors") {
  CHECK_THROWS_AS(crossover_zg(3.0, 100, CrossoverMode::Iterate), InvalidArgument);
  CHECK_THROWS_AS(crossover_zg(5.0, 100, CrossoverMode::Solve), InvalidArgument);
  CHECK_THROWS_AS(crossover_zg(4.0, 2, CrossoverMode::Solve), NoCrossover);
  CHECK_THROWS_AS(crossover_zg(4.0, 2, CrossoverMode::Iterate), InvalidArgument);
}

TEST_CASE("series on the imaginary axis") {
  const auto zero = series_g_imag(3, 1.0, 0.0);
  CHECK(zero.value == std::complex<double>(1.0, 0.0));
  const auto l1 = series_g_imag(1, 2.0, 0.6).value;
  CHECK(l1.real() == Approx(std::cos(0.3)).epsilon(1e-14));
  CHECK(l1.imag() == Approx(std::sin(0.3)).epsilon(1e-14));
  CHECK(l1.real() == Approx(0.955336).epsilon(1e-6));
  CHECK(l1.imag() == Approx(0.295520).epsilon(1e-5));
  for (int l : {1, 2, 3, 4}) {
    for (double t : {0.01, 0.05, 0.1}) {
      const auto series = series_g_imag(l, 3.0, 3.0 * t);
      CHECK_FALSE(series.convergence_warning);
      CHECK(std::abs(series.value - pole_sum_at_imaginary(l, 3.0, 3.0 * t)) < 1e-10);
    }
  }
  CHECK(series_g_imag(2, 1.0, 30.0, 3, 3).convergence_warning);
}

TEST_CASE("leading imaginary part of g^N") {
  CHECK(im_gN_leading(2, 100, 1.0, 0.01) == Approx(2.3570e-5).epsilon(1e-4));
  CHECK(im_gN_leading(1, 3, 1.0, 0.1) == Approx(0.3).epsilon(1e-14));
  // Accuracy of N s_1 is governed by r^(N-1) ~ exp(N (w''/s)^2 / 2).
  const double exact = std::pow(series_g_imag(2, 1.0, 0.01).value, 100).imag();
  CHECK(im_gN_leading(2, 100, 1.0, 0.01) == Approx(exact).epsilon(0.01));
}
