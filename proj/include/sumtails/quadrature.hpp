#pragma once

// Gauss-Kronrod panel quadrature.
//
// The interval is first cut into panels of a caller-chosen width (for the
// inversion integral: half a period of the cosine), each panel is
// integrated with the 7/15-point Gauss-Kronrod pair, and the panel with
// the largest error estimate is bisected until the summed estimate meets
// max(rel_tol * |I|, abs_tol).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <queue>
#include <vector>

#include "sumtails/errors.hpp"

namespace sumtails {

// Neumaier compensated accumulator.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

struct PanelEstimate {
  double a = 0.0;
  double b = 0.0;
  double value = 0.0;
  double error = 0.0;
  double abs_value = 0.0;  // integral of |f|
};

namespace detail {

inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

}  // namespace detail

// One 15-point Kronrod panel with the QUADPACK error heuristic.
template <class F>
PanelEstimate gauss_kronrod15(F&& f, double a, double b) {
  using detail::kGaussWeights;
  using detail::kKronrodNodes;
  using detail::kKronrodWeights;

  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);

  const double fc = f(center);
  double res_gauss = fc * kGaussWeights[3];
  double res_kronrod = fc * kKronrodWeights[7];
  double res_abs = std::abs(res_kronrod);

  std::array<double, 7> f1{};
  std::array<double, 7> f2{};
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kKronrodNodes[j];
    f1[j] = f(center - dx);
    f2[j] = f(center + dx);
    const double pair = f1[j] + f2[j];
    res_kronrod += kKronrodWeights[j] * pair;
    res_abs += kKronrodWeights[j] * (std::abs(f1[j]) + std::abs(f2[j]));
    if (j % 2 == 1) res_gauss += kGaussWeights[j / 2] * pair;
  }

  const double mean = 0.5 * res_kronrod;
  double res_asc = kKronrodWeights[7] * std::abs(fc - mean);
  for (int j = 0; j < 7; ++j) {
    res_asc += kKronrodWeights[j] *
               (std::abs(f1[j] - mean) + std::abs(f2[j] - mean));
  }

  PanelEstimate out;
  out.a = a;
  out.b = b;
  out.value = res_kronrod * half;
  out.abs_value = res_abs * std::abs(half);
  res_asc *= std::abs(half);
  double err = std::abs((res_kronrod - res_gauss) * half);
  if (res_asc != 0.0 && err != 0.0) {
    err = res_asc * std::min(1.0, std::pow(200.0 * err / res_asc, 1.5));
  }
  out.error = err;
  return out;
}

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  double abs_value = 0.0;
  std::size_t panels = 0;
  bool converged = false;
};

// Integrates f over [a, b] starting from panels no wider than `width`.
// On hitting max_panels the best available estimate is returned with
// converged = false; the caller decides whether that is fatal.
template <class F>
QuadratureResult integrate_panels(F&& f, double a, double b, double width,
                                  double rel_tol, double abs_tol,
                                  std::size_t max_panels) {
  QuadratureResult result;
  if (!(b > a)) {
    result.converged = true;
    return result;
  }
  if (!(width > 0.0)) throw InvalidArgument("panel width must be positive");

  const auto initial =
      static_cast<std::size_t>(std::ceil((b - a) / width - 1e-12));
  const std::size_t count = std::max<std::size_t>(initial, 1);
  if (count > max_panels) {
    result.panels = count;
    return result;
  }

  std::vector<PanelEstimate> panels;
  panels.reserve(count * 2);
  const double step = (b - a) / static_cast<double>(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double lo = a + step * static_cast<double>(i);
    const double hi = (i + 1 == count) ? b : a + step * static_cast<double>(i + 1);
    panels.push_back(gauss_kronrod15(f, lo, hi));
  }

  auto by_error = [&panels](std::size_t lhs, std::size_t rhs) {
    return panels[lhs].error < panels[rhs].error;
  };
  std::priority_queue<std::size_t, std::vector<std::size_t>, decltype(by_error)>
      worst(by_error);
  double total = 0.0;
  double total_err = 0.0;
  for (std::size_t i = 0; i < panels.size(); ++i) {
    worst.push(i);
    total += panels[i].value;
    total_err += panels[i].error;
  }

  auto target = [&] { return std::max(rel_tol * std::abs(total), abs_tol); };

  while (total_err > target() && panels.size() < max_panels) {
    const std::size_t idx = worst.top();
    worst.pop();
    const PanelEstimate old = panels[idx];
    const double mid = 0.5 * (old.a + old.b);
    if (!(mid > old.a && mid < old.b)) {
      // Panel can no longer be split in double precision.
      break;
    }
    PanelEstimate left = gauss_kronrod15(f, old.a, mid);
    PanelEstimate right = gauss_kronrod15(f, mid, old.b);
    total += left.value + right.value - old.value;
    total_err += left.error + right.error - old.error;
    panels[idx] = left;
    panels.push_back(right);
    worst.push(idx);
    worst.push(panels.size() - 1);
  }

  // Re-sum in interval order so the result does not depend on the
  // refinement history.
  std::sort(panels.begin(), panels.end(),
            [](const PanelEstimate& l, const PanelEstimate& r) { return l.a < r.a; });
  CompensatedSum sum;
  CompensatedSum err;
  CompensatedSum abs_sum;
  for (const auto& p : panels) {
    sum.add(p.value);
    err.add(p.error);
    abs_sum.add(p.abs_value);
  }
  result.value = sum.value();
  result.error = err.value();
  result.abs_value = abs_sum.value();
  result.panels = panels.size();
  result.converged =
      result.error <= std::max(rel_tol * std::abs(result.value), abs_tol);
  return result;
}

template <class F>
QuadratureResult integrate(F&& f, double a, double b, double rel_tol = 1e-12,
                           double abs_tol = 1e-14,
                           std::size_t max_panels = 100000) {
  return integrate_panels(std::forward<F>(f), a, b, b - a, rel_tol, abs_tol,
                          max_panels);
}

// Integral over [a, inf) through x = a + t / (1 - t).
template <class F>
QuadratureResult integrate_to_infinity(F&& f, double a, double rel_tol = 1e-12,
                                       double abs_tol = 1e-14,
                                       std::size_t max_panels = 100000) {
  auto mapped = [&f, a](double t) {
    const double one_minus = 1.0 - t;
    if (one_minus <= 0.0) return 0.0;
    const double x = a + t / one_minus;
    return f(x) / (one_minus * one_minus);
  };
  return integrate_panels(mapped, 0.0, 1.0, 0.125, rel_tol, abs_tol,
                          max_panels);
}

}  // namespace sumtails
