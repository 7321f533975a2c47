#pragma once

// Reference values computed without the library's own machinery: Boost's
// Gauss-Kronrod for integrals and textbook closed forms.

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <boost/numeric/odeint.hpp>

namespace oracle {

template <class F>
double integrate(F f, double a, double b, double tol = 1e-13) {
  if (!(b > a)) return 0.0;
  double err = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 12, tol, &err);
}

template <class F>
double integrate_2d(F f, double ax, double bx, double ay, double by, double tol = 1e-12) {
  return integrate([&](double x) { return integrate([&](double y) { return f(x, y); }, ay, by, tol); },
                   ax, bx, tol);
}

// One-sided stable law with transform exp(-sqrt(s)).
inline double stable_half_density(double x) {
  return std::exp(-1.0 / (4.0 * x)) / (2.0 * std::sqrt(std::numbers::pi) * std::pow(x, 1.5));
}

inline double stable_half_cdf(double x) { return boost::math::erfc(1.0 / (2.0 * std::sqrt(x))); }

inline double moran_downton_density(double r, double x, double y) {
  return std::exp(-(x + y) / (1.0 - r)) / (1.0 - r) *
         boost::math::cyl_bessel_i(0, 2.0 * std::sqrt(r * x * y) / (1.0 - r));
}

inline double freund_density(double a, double ap, double b, double bp, double x, double y) {
  if (x > y) return ap * b * std::exp(-(a + b - ap) * y - ap * x);
  return a * bp * std::exp(-(a + b - bp) * x - bp * y);
}

inline std::vector<double> uniform_points(std::mt19937_64& rng, std::size_t n, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> out(n);
  for (auto& v : out) v = u(rng);
  return out;
}

// Q_n(x) from the integral recursion Q_n(x) = (l_n - q) x^l_n int_x^1 Q_{n-1}(t) t^(-1-l_n) dt.
// In u = -ln x each level is g_n' = (l_n - q) g_{n-1} - l_n g_n with g_n(0) = 0,
// started from g_0 = e^(-q u); the chain is integrated with an adaptive RK45.
inline double muntz_recursion(double q, const std::vector<double>& lambdas, double x) {
  using State = std::vector<double>;
  const std::size_t n = lambdas.size();
  State g(n + 1, 0.0);
  g[0] = 1.0;
  const double u_end = -std::log(x);
  if (u_end == 0.0) return n == 0 ? 1.0 : 0.0;
  auto rhs = [&](const State& y, State& dy, double) {
    dy[0] = -q * y[0];
    for (std::size_t k = 1; k <= n; ++k) dy[k] = (lambdas[k - 1] - q) * y[k - 1] - lambdas[k - 1] * y[k];
  };
  namespace ode = boost::numeric::odeint;
  auto stepper = ode::make_controlled(1e-14, 1e-13, ode::runge_kutta_dopri5<State>());
  ode::integrate_adaptive(stepper, rhs, g, 0.0, u_end, 1e-4);
  return g[n];
}

}  // namespace oracle
