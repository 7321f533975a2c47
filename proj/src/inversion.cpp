#include "stieltjes/inversion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <variant>

#include "stieltjes/error.hpp"

namespace stieltjes {

namespace {

using Part = std::function<Real(int k, const Real& s)>;

Real sign_power(int k) { return Real(k % 2 == 0 ? 1.0 : -1.0, 64); }

// (q)_k = q (q+1) ... (q+k-1)
Real rising(double q, int k, unsigned bits) {
  Real out(1.0, bits);
  for (int i = 0; i < k; ++i) out *= Real(q, bits) + static_cast<double>(i);
  return out;
}

unsigned working_bits(unsigned base, int k) {
  return std::max<unsigned>(base, 64u + 8u * static_cast<unsigned>(std::max(k, 0)));
}

void check_point(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) throw Error(ErrorCode::InvalidArgument, "x must be positive");
}

Certified eval_certified(const TransformOracle& oracle, const Real& s) {
  Real v = oracle.eval(s);
  Real err = oracle.eval_rel_error > 0.0 ? abs(v) * oracle.eval_rel_error : abs(v) * unit_roundoff(s.bits()) * 4.0;
  return {std::move(v), std::move(err)};
}

// sum_j (-1)^j C(k,j) L(s + (k/2 - j) h) / h^k, plus the rounding bound.
Certified central_difference(const TransformOracle& oracle, int k, const Real& s, const Real& h, double unit) {
  const unsigned bits = s.bits();
  Real sum(bits);
  Real magnitude(bits);
  Real binom(1.0, bits);
  for (int j = 0; j <= k; ++j) {
    const Real point = s + h * (0.5 * k - j);
    const Real f = oracle.eval(point);
    if (!f.is_finite()) throw Error(ErrorCode::PrecisionExhausted, "transform is not finite on the stencil");
    const Real term = binom * f;
    if (j % 2 == 0) sum += term;
    else sum -= term;
    magnitude += abs(term);
    binom = binom * static_cast<double>(k - j) / static_cast<double>(j + 1);
  }
  const Real hk = pow(h, static_cast<long>(k));
  return {sum / hk, magnitude * unit / hk};
}

Certified synthesize(const TransformOracle& oracle, int k, const Real& s_in) {
  if (!oracle.eval) throw Error(ErrorCode::DerivativeUnavailable, "oracle has no evaluator");
  if (k < 0) throw Error(ErrorCode::InvalidArgument, "derivative order must be nonnegative");
  if (k > kMaxSynthesisOrder) {
    throw Error(ErrorCode::DerivativeUnavailable,
                "order " + std::to_string(k) + " exceeds the synthesis cap of " +
                    std::to_string(kMaxSynthesisOrder));
  }
  const unsigned bits = working_bits(std::max(oracle.precision_bits, s_in.bits()), k);
  Real s(bits);
  mpfr_set(s.raw(), s_in.raw(), MPFR_RNDN);
  if (k == 0) return eval_certified(oracle, s);

  const double unit = std::max(oracle.eval_rel_error, (k + 4.0) * unit_roundoff(bits).to_double());
  const double exponent = -static_cast<double>(bits) / (2.0 * k + 2.0);
  const Real h = s * std::pow(2.0, exponent);
  const auto d1 = central_difference(oracle, k, s, h, unit);
  const auto d2 = central_difference(oracle, k, s, h / 2.0, unit);
  const auto d3 = central_difference(oracle, k, s, h / 4.0, unit);
  const Real r1 = (4.0 * d2.value - d1.value) / 3.0;
  const Real r2 = (4.0 * d3.value - d2.value) / 3.0;
  Real error = abs(r2 - r1) + (4.0 * d3.error + d2.error) / 3.0;
  if (!r2.is_finite() || !error.is_finite() || error > abs(r2) * 0.1) {
    throw Error(ErrorCode::PrecisionExhausted,
                "derivative of order " + std::to_string(k) + " at s = " + s.to_string(8) +
                    " has error " + error.to_string(3) + " against value " + r2.to_string(3));
  }
  return {r2, std::move(error)};
}

// Shared body of the two Feller sums: sum_{k <= K} (-1)^k u^k / k! L^(k)(u).
InversionResult feller_sum(const TransformOracle& oracle, double u, long last, unsigned bits) {
  InversionResult out;
  out.precision_bits = bits;
  const Real point(u, bits);
  Real coef(1.0, bits);
  Real sum(bits);
  Real error(bits);
  for (long k = 0; k <= last; ++k) {
    if (k > 0) coef = coef * u / static_cast<double>(k);
    const auto d = derivative(oracle, static_cast<int>(k), point);
    const Real term = coef * d.value * sign_power(static_cast<int>(k));
    sum += term;
    error += coef * d.error + abs(term) * unit_roundoff(bits) * (k + 4.0);
  }
  out.raw = sum.to_double();
  out.error = error.to_double();
  out.terms = static_cast<int>(last + 1);
  if (out.error > std::abs(out.raw) && out.error > 0.0) {
    throw Error(ErrorCode::PrecisionExhausted, "Feller sum error exceeds its value");
  }
  out.value = std::clamp(out.raw, 0.0, 1.0);
  return out;
}

}  // namespace

TransformOracle make_oracle(const Distribution1D& dist, unsigned precision_bits) {
  if (!dist.has_closed_form()) throw Error(ErrorCode::NoClosedForm, "law has no closed-form transform");
  std::vector<Part> parts;  // k-th derivative of each weighted part; k = 0 is the value
  bool closed_derivs = true;
  double eval_rel_error = 0.0;
  for (const auto& a : dist.atoms()) {
    parts.push_back([loc = a.location, m = a.mass](int k, const Real& s) {
      const unsigned b = s.bits();
      Real v = exp(-(s * loc)) * m;
      if (k > 0) v *= pow(Real(-loc, b), static_cast<long>(k));
      return v;
    });
  }
  for (const auto& c : dist.components()) {
    const double w = c.weight;
    if (const auto* e = std::get_if<Exponential>(&c.law)) {
      parts.push_back([w, rate = e->rate](int k, const Real& s) {
        const Real base = s + rate;
        return factorial(k, s.bits()) * sign_power(k) * w * rate / pow(base, static_cast<long>(k + 1));
      });
    } else if (const auto* g = std::get_if<GammaLaw>(&c.law)) {
      parts.push_back([w, rate = g->rate, shape = g->shape](int k, const Real& s) {
        const Real base = s + rate;
        const Real ratio = pow(Real(rate, s.bits()) / base, shape);
        return rising(shape, k, s.bits()) * sign_power(k) * ratio * w / pow(base, static_cast<long>(k));
      });
    } else if (const auto* p = std::get_if<PositiveStable>(&c.law)) {
      closed_derivs = false;
      parts.push_back([w, alpha = p->alpha](int, const Real& s) { return exp(-pow(s, alpha)) * w; });
    } else {
      const auto& only = std::get<CdfOnly>(c.law);
      closed_derivs = false;
      eval_rel_error = std::max(eval_rel_error, 8.0 * std::numeric_limits<double>::epsilon());
      parts.push_back([w, f = only.transform](int, const Real& s) {
        return Real(f(s.to_double()) * w, s.bits());
      });
    }
  }
  TransformOracle oracle;
  oracle.precision_bits = precision_bits;
  oracle.eval_rel_error = eval_rel_error;
  oracle.eval = [parts](const Real& s) {
    Real sum(s.bits());
    for (const auto& p : parts) sum += p(0, s);
    return sum;
  };
  if (closed_derivs) {
    oracle.max_k = std::numeric_limits<int>::max();
    oracle.deriv = [parts](int k, const Real& s) {
      Real sum(s.bits());
      for (const auto& p : parts) sum += p(k, s);
      return sum;
    };
  }
  return oracle;
}

Certified synthesize_derivative(const TransformOracle& oracle, int k, double s) {
  check_point(s);
  return synthesize(oracle, k, Real(s, working_bits(oracle.precision_bits, k)));
}

Certified derivative(const TransformOracle& oracle, int k, const Real& s) {
  if (k < 0) throw Error(ErrorCode::InvalidArgument, "derivative order must be nonnegative");
  if (oracle.deriv && k <= oracle.max_k) {
    Real v = oracle.deriv(k, s);
    Real err = abs(v) * unit_roundoff(s.bits()) * (4.0 * k + 16.0);
    return {std::move(v), std::move(err)};
  }
  if (k == 0 && oracle.eval) return eval_certified(oracle, s);
  if (k > kMaxSynthesisOrder || !oracle.eval) {
    throw Error(ErrorCode::DerivativeUnavailable,
                "no closed derivative of order " + std::to_string(k) + " and synthesis stops at " +
                    std::to_string(kMaxSynthesisOrder));
  }
  return synthesize(oracle, k, s);
}

InversionResult post_widder_density(const TransformOracle& oracle, double x, int n) {
  check_point(x);
  if (n < 0) throw Error(ErrorCode::InvalidArgument, "n must be nonnegative");
  const unsigned bits = working_bits(oracle.precision_bits, n);
  const Real u = Real(static_cast<double>(n == 0 ? 1 : n), bits) / x;
  const auto d = derivative(oracle, n, u);
  const Real scale = pow(u, static_cast<long>(n + 1)) / factorial(n, bits);
  const Real value = scale * d.value * sign_power(n);
  const Real error = scale * d.error + abs(value) * unit_roundoff(bits) * (2.0 * n + 8.0);
  InversionResult out;
  out.value = out.raw = value.to_double();
  out.error = error.to_double();
  out.precision_bits = bits;
  out.terms = 1;
  if (out.error > std::abs(out.value) && out.error > 0.0) {
    throw Error(ErrorCode::PrecisionExhausted, "Post-Widder error exceeds the approximant");
  }
  return out;
}

InversionResult feller_cdf(const TransformOracle& oracle, double x, int n) {
  check_point(x);
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "n must be at least 1");
  const double nx = static_cast<double>(n) * x;
  if (nx > 1e6) throw Error(ErrorCode::InvalidArgument, "n * x is too large");
  const long last = static_cast<long>(std::floor(nx));
  return feller_sum(oracle, static_cast<double>(n), last,
                    working_bits(oracle.precision_bits, static_cast<int>(last)));
}

InversionResult feller_cdf_scaled(const TransformOracle& oracle, double x, int n) {
  check_point(x);
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "n must be at least 1");
  return feller_sum(oracle, n / x, n, working_bits(oracle.precision_bits, n));
}

WatsonReport watson_check(std::span<const double> derivs_at_zero, double s, int n_max,
                          std::optional<double> reference) {
  check_point(s);
  if (n_max < 0) throw Error(ErrorCode::InvalidArgument, "N must be nonnegative");
  WatsonReport out;
  out.s = s;
  out.small_s = s <= 1.0;
  const int last = std::min<int>(n_max, static_cast<int>(derivs_at_zero.size()) - 1);
  double sum = 0.0;
  double first = 0.0;
  double term = 0.0;
  for (int m = 0; m <= last; ++m) {
    term = derivs_at_zero[m] / std::pow(s, m + 1);
    if (first == 0.0) first = std::abs(term);
    sum += term;
    out.partial_sums.push_back(sum);
    if (reference) out.residuals.push_back(std::abs(sum - *reference));
  }
  out.terms_decreasing = last < 1 || std::abs(term) < first;
  return out;
}

}  // namespace stieltjes
