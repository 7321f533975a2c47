#pragma once

// Globally adaptive Gauss-Kronrod (7/15) quadrature on finite intervals.
//
// Panels are bisected in order of decreasing error estimate until the summed
// estimate meets the tolerance. The per-panel estimate is |K15 - G7|, i.e. the
// error of the embedded Gauss rule, which is conservative for the returned
// Kronrod value. Known discontinuities or kinks can be passed as breakpoints.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <queue>
#include <span>
#include <string>
#include <vector>

#include "stieltjes/error.hpp"

namespace stieltjes::quad {

struct Options {
  double abs_tol = 1e-10;
  double rel_tol = 0.0;
  std::size_t max_panels = 4000;
};

struct Result {
  double value = 0.0;
  double error = 0.0;
  std::size_t evaluations = 0;
};

namespace detail {

inline constexpr double kKronrodNodes[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

inline constexpr double kKronrodWeights[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5, 7).
inline constexpr double kGaussWeights[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a;
  double b;
  double value;
  double error;
  bool operator<(const Panel& other) const { return error < other.error; }
};

template <class F>
Panel gauss_kronrod_15(F& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double kronrod = kKronrodWeights[7] * fc;
  double gauss = kGaussWeights[3] * fc;
  double resabs = std::abs(kronrod);
  for (int i = 0; i < 7; ++i) {
    const double dx = half * kKronrodNodes[i];
    const double f1 = f(center - dx);
    const double f2 = f(center + dx);
    kronrod += kKronrodWeights[i] * (f1 + f2);
    resabs += kKronrodWeights[i] * (std::abs(f1) + std::abs(f2));
    if (i % 2 == 1) gauss += kGaussWeights[i / 2] * (f1 + f2);
  }
  kronrod *= half;
  gauss *= half;
  resabs *= std::abs(half);
  const double roundoff = 50.0 * std::numeric_limits<double>::epsilon() * resabs;
  return {a, b, kronrod, std::max(std::abs(kronrod - gauss), roundoff)};
}

}  // namespace detail

/// Integrates f over [a, b]. Breakpoints strictly inside (a, b) seed the
/// initial panel split. Throws QuadratureNonConvergence when the panel budget
/// is exhausted or the integrand is not finite.
template <class F>
Result integrate(F&& f, double a, double b, const Options& options = {},
                 std::span<const double> breakpoints = {}) {
  Result result;
  if (!(b > a)) return result;

  std::vector<double> edges{a};
  for (double p : breakpoints) {
    if (p > a && p < b) edges.push_back(p);
  }
  edges.push_back(b);
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  std::priority_queue<detail::Panel> queue;
  double total = 0.0;
  double total_error = 0.0;
  double frozen_value = 0.0;  // panels too narrow to bisect further
  double frozen_error = 0.0;
  std::size_t panels = 0;

  auto push = [&](const detail::Panel& panel) {
    if (!std::isfinite(panel.value)) {
      throw Error(ErrorCode::QuadratureNonConvergence,
                  "integrand is not finite near x=" + std::to_string(panel.a));
    }
    result.evaluations += 15;
    ++panels;
    total += panel.value;
    total_error += panel.error;
    queue.push(panel);
  };

  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    push(detail::gauss_kronrod_15(f, edges[i], edges[i + 1]));
  }

  std::size_t since_resum = 0;
  while (!queue.empty()) {
    const double target = std::max(options.abs_tol, options.rel_tol * std::abs(total));
    if (total_error + frozen_error <= target) break;
    if (panels >= options.max_panels) {
      throw Error(ErrorCode::QuadratureNonConvergence,
                  "panel budget exhausted with error estimate " +
                      std::to_string(total_error + frozen_error) + " > " +
                      std::to_string(target));
    }
    const detail::Panel worst = queue.top();
    queue.pop();
    total -= worst.value;
    total_error -= worst.error;
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      frozen_error += worst.error;
      frozen_value += worst.value;
      total += worst.value;
      continue;
    }
    --panels;
    push(detail::gauss_kronrod_15(f, worst.a, mid));
    push(detail::gauss_kronrod_15(f, mid, worst.b));

    // Re-sum now and then so the running totals do not drift.
    if (++since_resum == 64) {
      since_resum = 0;
      auto copy = queue;
      double t = 0.0;
      double e = 0.0;
      while (!copy.empty()) {
        t += copy.top().value;
        e += copy.top().error;
        copy.pop();
      }
      total = t + frozen_value;
      total_error = e;
    }
  }

  if (frozen_error > std::max(options.abs_tol, options.rel_tol * std::abs(total))) {
    throw Error(ErrorCode::QuadratureNonConvergence,
                "error concentrated in panels below floating-point resolution");
  }
  result.value = total;
  result.error = total_error + frozen_error;
  return result;
}

}  // namespace stieltjes::quad
