#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

#include "sumtails/errors.hpp"

namespace sumtails {

// ln(n!) through log-gamma; exact table for small n keeps the common
// cases free of lgamma rounding.
inline double log_factorial(int n) {
  if (n < 0) throw InvalidArgument("log_factorial of a negative integer");
  if (n < 21) {
    double f = 1.0;
    for (int k = 2; k <= n; ++k) f *= k;
    return std::log(f);
  }
  return std::lgamma(static_cast<double>(n) + 1.0);
}

inline double factorial(int n) {
  if (n >= 0 && n < 21) {
    double f = 1.0;
    for (int k = 2; k <= n; ++k) f *= k;
    return f;
  }
  return std::exp(log_factorial(n));
}

// Generalized exponential integral E_n(x) = int_1^inf exp(-x t) t^-n dt for
// complex x with Re x >= 0 (x != 0 when n == 1). Series for |x| <= 1,
// modified Lentz continued fraction otherwise.
inline std::complex<double> expint_en(int n, std::complex<double> x) {
  using cd = std::complex<double>;
  if (n < 1) throw InvalidArgument("expint_en requires n >= 1");
  if (x.real() < 0.0) throw InvalidArgument("expint_en requires Re x >= 0");
  constexpr double eps = std::numeric_limits<double>::epsilon();
  constexpr int max_iter = 100000;

  if (x == cd(0.0, 0.0)) {
    if (n == 1) throw InvalidArgument("E_1(0) is infinite");
    return cd(1.0 / (n - 1), 0.0);
  }

  if (std::abs(x) > 1.0) {
    constexpr double tiny = 1e-300;
    cd b = x + static_cast<double>(n);
    cd c = 1.0 / tiny;
    cd d = 1.0 / b;
    cd h = d;
    for (int i = 1; i <= max_iter; ++i) {
      const double an = -static_cast<double>(i) * (n - 1 + i);
      b += 2.0;
      d = 1.0 / (an * d + b);
      c = b + an / c;
      const cd del = c * d;
      h *= del;
      if (std::abs(del - 1.0) < eps) return h * std::exp(-x);
    }
    throw Error("expint_en: continued fraction did not converge");
  }

  const int nm1 = n - 1;
  cd ans = (nm1 != 0) ? cd(1.0 / nm1, 0.0) : -std::log(x) - std::numbers::egamma;
  cd fact(1.0, 0.0);
  for (int i = 1; i <= max_iter; ++i) {
    fact *= -x / static_cast<double>(i);
    cd del;
    if (i != nm1) {
      del = -fact / static_cast<double>(i - nm1);
    } else {
      double psi = -std::numbers::egamma;
      for (int ii = 1; ii <= nm1; ++ii) psi += 1.0 / ii;
      del = fact * (-std::log(x) + psi);
    }
    ans += del;
    if (std::abs(del) < std::abs(ans) * eps) return ans;
  }
  throw Error("expint_en: series did not converge");
}

// int_lower^inf exp(i beta w) w^-n dw for lower > 0, n >= 1 (n >= 2 when
// beta == 0).
inline std::complex<double> oscillatory_power_tail(int n, double beta,
                                                   double lower) {
  if (!(lower > 0.0)) throw InvalidArgument("lower limit must be positive");
  const double scale = std::pow(lower, 1.0 - n);
  return scale * expint_en(n, std::complex<double>(0.0, -beta * lower));
}

}  // namespace sumtails
