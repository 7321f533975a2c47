#include "gamma_mixture.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <boost/math/special_functions/gamma.hpp>

#include "stieltjes/error.hpp"

namespace stieltjes::detail {

namespace {

constexpr double kTailTarget = 1e-17;
constexpr double kTailReject = 1e-10;
constexpr std::size_t kBivariateMaxTerms = 20000;

// Negative-binomial type weights w_n = (1-c)^q Gamma(q+n) / (Gamma(q) n!) c^n.
// Returns log weights up to the first N whose geometric tail bound is small.
struct SeriesCut {
  std::vector<double> log_weights;
  double tail = 0.0;
};

SeriesCut negative_binomial_cut(double c, double q, std::size_t n_max, const std::string& what) {
  SeriesCut cut;
  if (c == 0.0) {
    cut.log_weights = {0.0};
    return cut;
  }
  const double log_c = std::log(c);
  double lw = q * std::log1p(-c);
  for (std::size_t n = 0;; ++n) {
    cut.log_weights.push_back(lw);
    const double next = lw + log_c + std::log(q + n) - std::log(n + 1.0);
    const double rho = c * std::max(1.0, (q + n + 1.0) / (n + 2.0));
    const double tail = rho < 1.0 ? std::exp(next) / (1.0 - rho) : 1.0;
    if (tail <= kTailTarget || n == n_max) {
      cut.tail = tail;
      break;
    }
    lw = next;
  }
  if (cut.tail > kTailReject) {
    throw Error(ErrorCode::ParameterOutOfRange,
                what + ": series tail bound " + std::to_string(cut.tail) + " exceeds 1e-10 after " +
                    std::to_string(n_max) + " terms");
  }
  return cut;
}

thread_local std::vector<double> scratch_p[3];
thread_local std::vector<double> scratch_q[3];

}  // namespace

GammaLadder::GammaLadder(double a, std::size_t n) : shape(a), size(n) {
  inv.resize(size);
  log_denom.resize(size);
  for (std::size_t k = 0; k < size; ++k) {
    inv[k] = 1.0 / (a + k + 1.0);
    log_denom[k] = std::log(a + k + 1.0);
  }
}

void GammaLadder::evaluate(double x, std::vector<double>& p, std::vector<double>& q) const {
  p.assign(size, 0.0);
  q.assign(size, 1.0);
  if (!(x > 0.0)) return;
  if (std::isinf(x)) {
    std::fill(p.begin(), p.end(), 1.0);
    std::fill(q.begin(), q.end(), 0.0);
    return;
  }
  q[0] = boost::math::gamma_q(shape, x);
  p[size - 1] = boost::math::gamma_p(shape + static_cast<double>(size - 1), x);
  if (size == 1) return;
  // t_k = x^(a+k) e^-x / Gamma(a+k+1) = P(a+k) - P(a+k+1)
  const double log_x = std::log(x);
  double log_t = shape * log_x - x - boost::math::lgamma(shape + 1.0);
  double t = 0.0;
  bool linear = log_t > -700.0;
  if (linear) t = std::exp(log_t);
  std::vector<double>& steps = p;  // reuse p as storage for t_k before the downward pass
  const double top = p[size - 1];
  for (std::size_t k = 0; k + 1 < size; ++k) {
    steps[k] = linear ? t : (log_t > -745.0 ? std::exp(log_t) : 0.0);
    if (linear) {
      t *= x * inv[k];
    } else {
      log_t += log_x - log_denom[k];
      if (log_t > -700.0) {
        linear = true;
        t = std::exp(log_t);
      }
    }
  }
  for (std::size_t k = 0; k + 1 < size; ++k) q[k + 1] = std::min(1.0, q[k] + steps[k]);
  p[size - 1] = top;
  for (std::size_t k = size - 1; k-- > 0;) p[k] = std::min(1.0, p[k + 1] + steps[k]);
}

GammaMixture::GammaMixture(std::size_t dim, std::vector<double> shapes, double rate,
                           std::size_t ladder_size, std::vector<MixtureTerm> terms, double tail)
    : dim_(dim), rate_(rate), terms_(std::move(terms)), tail_(tail) {
  for (double a : shapes) ladders_.emplace_back(a, ladder_size);
}

double GammaMixture::sum(std::span<const double> x, bool upper) const {
  for (std::size_t i = 0; i < dim_; ++i) {
    const double arg = std::isinf(x[i]) ? x[i] : rate_ * x[i];
    ladders_[i].evaluate(arg, scratch_p[i], scratch_q[i]);
  }
  const std::vector<double>* v[3];
  for (std::size_t i = 0; i < dim_; ++i) v[i] = upper ? &scratch_q[i] : &scratch_p[i];
  double total = 0.0;
  for (const auto& term : terms_) {
    double prod = term.weight;
    for (std::size_t i = 0; i < dim_; ++i) prod *= (*v[i])[term.index[i]];
    total += prod;
  }
  return std::clamp(total, 0.0, 1.0);
}

double GammaMixture::cdf(std::span<const double> x) const { return sum(x, false); }

double GammaMixture::survival(std::span<const double> x) const { return sum(x, true); }

GammaMixture make_moran_downton(double r) {
  if (!(r >= 0.0 && r < 1.0)) {
    throw Error(ErrorCode::ParameterOutOfRange, "moran-downton: r must lie in [0,1)");
  }
  // (1-r) r^n is the negative-binomial family with q = 1.
  const auto cut = negative_binomial_cut(r, 1.0, kBivariateMaxTerms, "moran-downton");
  std::vector<MixtureTerm> terms;
  for (std::size_t n = 0; n < cut.log_weights.size(); ++n) {
    terms.push_back({std::exp(cut.log_weights[n]), {n, n, 0}});
  }
  return GammaMixture(2, {1.0, 1.0}, 1.0 / (1.0 - r), cut.log_weights.size(), std::move(terms),
                      cut.tail);
}

GammaMixture make_bivariate_gamma(double r, double q) {
  if (!(r >= 0.0 && r < 1.0)) {
    throw Error(ErrorCode::ParameterOutOfRange, "bivariate-gamma: r must lie in [0,1)");
  }
  if (!(q > 0.0) || !std::isfinite(q)) {
    throw Error(ErrorCode::ParameterOutOfRange, "bivariate-gamma: q must be > 0");
  }
  const auto cut = negative_binomial_cut(r, q, kBivariateMaxTerms, "bivariate-gamma");
  std::vector<MixtureTerm> terms;
  for (std::size_t n = 0; n < cut.log_weights.size(); ++n) {
    terms.push_back({std::exp(cut.log_weights[n]), {n, n, 0}});
  }
  return GammaMixture(2, {q, q}, 1.0, cut.log_weights.size(), std::move(terms), cut.tail);
}

GammaMixture make_trivariate_gamma(double alpha, double a, double b, std::size_t n_max) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw Error(ErrorCode::ParameterOutOfRange, "trivariate-gamma: alpha must be > 0");
  }
  if (!(a > 0.0) || !(b > 0.0)) {
    throw Error(ErrorCode::ParameterOutOfRange, "trivariate-gamma: a and b must be > 0");
  }
  const double c = a * a + b * b;
  if (!(c < 1.0)) {
    throw Error(ErrorCode::ParameterOutOfRange, "trivariate-gamma: a^2 + b^2 must be < 1");
  }
  const auto cut = negative_binomial_cut(c, alpha, n_max, "trivariate-gamma");
  const double log_p = std::log(a * a / c);
  const double log_1p = std::log(b * b / c);
  std::vector<MixtureTerm> terms;
  for (std::size_t n = 0; n < cut.log_weights.size(); ++n) {
    for (std::size_t l = 0; l <= n; ++l) {
      const double log_binom = boost::math::lgamma(n + 1.0) - boost::math::lgamma(l + 1.0) -
                               boost::math::lgamma(n - l + 1.0);
      const double lw = cut.log_weights[n] + log_binom + l * log_p + (n - l) * log_1p;
      if (lw < -740.0) continue;
      terms.push_back({std::exp(lw), {l, n, n - l}});
    }
  }
  return GammaMixture(3, {alpha, alpha, alpha}, 1.0, cut.log_weights.size(), std::move(terms),
                      cut.tail);
}

}  // namespace stieltjes::detail
