#include "stieltjes/muntz.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "stieltjes/error.hpp"

namespace stieltjes {

namespace {

bool is_integer(double v) { return std::floor(v) == v && std::abs(v) < 9e15; }

// Evaluates Q_n with preallocated MPFR scratch; exponent ladders with integer
// steps are stepped by multiplication instead of exp/log.
class Evaluator {
 public:
  explicit Evaluator(const MuntzApproximant& a)
      : a_(a), bits_(a.precision_bits), x_(bits_), sum_(bits_), power_(bits_), step_(bits_), tmp_(bits_) {
    integral_ = !a.lambdas.empty() && is_integer(a.lambdas.front());
    for (std::size_t k = 1; k < a.lambdas.size() && integral_; ++k) {
      integral_ = is_integer(a.lambdas[k] - a.lambdas[k - 1]);
    }
  }

  double operator()(double x) {
    if (x == 0.0) return 0.0;
    mpfr_set_d(x_.raw(), x, MPFR_RNDN);
    mpfr_set_d(tmp_.raw(), a_.q, MPFR_RNDN);
    mpfr_pow(sum_.raw(), x_.raw(), tmp_.raw(), MPFR_RNDN);
    const auto& lam = a_.lambdas;
    if (lam.empty()) return sum_.to_double();
    if (integral_) {
      mpfr_pow_ui(power_.raw(), x_.raw(), static_cast<unsigned long>(lam[0]), MPFR_RNDN);
      for (std::size_t k = 0; k < lam.size(); ++k) {
        if (k > 0) {
          const auto gap = static_cast<unsigned long>(lam[k] - lam[k - 1]);
          if (gap == 1) {
            mpfr_mul(power_.raw(), power_.raw(), x_.raw(), MPFR_RNDN);
          } else {
            mpfr_pow_ui(step_.raw(), x_.raw(), gap, MPFR_RNDN);
            mpfr_mul(power_.raw(), power_.raw(), step_.raw(), MPFR_RNDN);
          }
        }
        mpfr_mul(tmp_.raw(), a_.coeffs[k].raw(), power_.raw(), MPFR_RNDN);
        mpfr_sub(sum_.raw(), sum_.raw(), tmp_.raw(), MPFR_RNDN);
      }
    } else {
      mpfr_log(step_.raw(), x_.raw(), MPFR_RNDN);
      for (std::size_t k = 0; k < lam.size(); ++k) {
        mpfr_mul_d(power_.raw(), step_.raw(), lam[k], MPFR_RNDN);
        mpfr_exp(power_.raw(), power_.raw(), MPFR_RNDN);
        mpfr_mul(tmp_.raw(), a_.coeffs[k].raw(), power_.raw(), MPFR_RNDN);
        mpfr_sub(sum_.raw(), sum_.raw(), tmp_.raw(), MPFR_RNDN);
      }
    }
    return sum_.to_double();
  }

 private:
  const MuntzApproximant& a_;
  unsigned bits_;
  bool integral_ = false;
  Real x_, sum_, power_, step_, tmp_;
};

void check_lambdas(std::span<const double> lambdas) {
  for (std::size_t k = 0; k < lambdas.size(); ++k) {
    if (!(lambdas[k] > 0.0) || !std::isfinite(lambdas[k])) {
      throw Error(ErrorCode::InvalidArgument, "exponents must be finite and positive");
    }
    if (k > 0 && !(lambdas[k] > lambdas[k - 1])) {
      throw Error(ErrorCode::InvalidArgument, "exponents must be strictly increasing");
    }
  }
}

}  // namespace

std::string_view to_string(SequenceKind kind) {
  switch (kind) {
    case SequenceKind::Primes: return "primes";
    case SequenceKind::Integers: return "integers";
    case SequenceKind::Custom: return "custom";
  }
  return "unknown";
}

MuntzSequence MuntzSequence::primes() { return MuntzSequence(SequenceKind::Primes); }
MuntzSequence MuntzSequence::integers() { return MuntzSequence(SequenceKind::Integers); }

MuntzSequence MuntzSequence::custom(std::vector<double> values) {
  if (values.empty()) throw Error(ErrorCode::InvalidArgument, "custom sequence is empty");
  check_lambdas(values);
  return MuntzSequence(SequenceKind::Custom, std::move(values));
}

std::vector<double> MuntzSequence::prefix(std::size_t n) const {
  switch (kind_) {
    case SequenceKind::Primes: return first_primes(n);
    case SequenceKind::Integers: {
      std::vector<double> out(n);
      for (std::size_t k = 0; k < n; ++k) out[k] = static_cast<double>(k + 1);
      return out;
    }
    case SequenceKind::Custom:
      if (n > values_.size()) {
        throw Error(ErrorCode::InvalidArgument, "custom sequence has only " + std::to_string(values_.size()) +
                                                    " terms, " + std::to_string(n) + " requested");
      }
      return {values_.begin(), values_.begin() + static_cast<std::ptrdiff_t>(n)};
  }
  return {};
}

std::size_t MuntzSequence::available() const {
  return kind_ == SequenceKind::Custom ? values_.size() : std::numeric_limits<std::size_t>::max();
}

std::vector<double> first_primes(std::size_t n) {
  if (n == 0) return {};
  if (n > 50'000'000) throw Error(ErrorCode::InvalidArgument, "too many primes requested");
  const double ln = std::log(static_cast<double>(n));
  const std::size_t limit = n < 6 ? 15 : static_cast<std::size_t>(n * (ln + std::log(ln))) + 3;
  std::vector<bool> composite(limit + 1, false);
  std::vector<double> out;
  out.reserve(n);
  for (std::size_t i = 2; i <= limit && out.size() < n; ++i) {
    if (composite[i]) continue;
    out.push_back(static_cast<double>(i));
    for (std::size_t j = i * i; j <= limit; j += i) composite[j] = true;
  }
  return out;
}

DivergenceCertificate divergence_certificate(const MuntzSequence& seq, std::size_t prefix_len) {
  DivergenceCertificate c;
  c.kind = seq.kind();
  c.prefix_len = prefix_len;
  for (double v : seq.prefix(prefix_len)) c.partial_sum += 1.0 / v;
  switch (seq.kind()) {
    case SequenceKind::Primes:
      c.certified_divergent = true;
      c.statement = "certified divergent: the sum of prime reciprocals diverges (p_j ~ j ln j)";
      break;
    case SequenceKind::Integers:
      c.certified_divergent = true;
      c.statement = "certified divergent: harmonic series";
      break;
    case SequenceKind::Custom:
      c.certified_divergent = false;
      c.statement = "not certifiable: divergence of sum 1/lambda_k cannot be decided from a finite prefix";
      break;
  }
  return c;
}

MuntzApproximant golitschek_coeffs(double q, std::span<const double> lambdas, std::size_t n) {
  if (!(q > 0.0) || !std::isfinite(q)) throw Error(ErrorCode::InvalidArgument, "q must be positive");
  if (n > lambdas.size()) {
    throw Error(ErrorCode::InvalidArgument,
                "need " + std::to_string(n) + " exponents, got " + std::to_string(lambdas.size()));
  }
  const auto lam = lambdas.first(n);
  check_lambdas(lam);
  for (double l : lam) {
    if (l == q) throw Error(ErrorCode::QCollidesWithLambda, "q = " + std::to_string(q) + " is one of the exponents");
  }

  MuntzApproximant out;
  out.q = q;
  out.lambdas.assign(lam.begin(), lam.end());
  for (double l : lam) out.bound *= std::abs(1.0 - q / l);

  // size the precision from the largest |a_{k,n}| in its product form; the
  // rounding of each 1 - sum diagonal entry is amplified by up to that much again
  double log2_max = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != k) acc += std::log2(std::abs(lam[j] - q)) - std::log2(std::abs(lam[j] - lam[k]));
    }
    log2_max = std::max(log2_max, acc);
  }
  const unsigned bits = std::max(128u, 2u * static_cast<unsigned>(std::ceil(log2_max)) + 96u);
  out.precision_bits = bits;

  std::vector<Real> a;
  a.reserve(n);
  for (std::size_t m = 0; m < n; ++m) {
    const Real lm(lam[m], bits);
    const Real top = lm - q;
    Real sum(bits);
    for (std::size_t k = 0; k < m; ++k) {
      a[k] = a[k] * top / (lm - lam[k]);
      sum += a[k];
    }
    if (m + 1 < n) {
      a.push_back(1.0 - sum);
      continue;
    }
    Real last(1.0, bits);
    for (std::size_t j = 0; j < m; ++j) last = last * (Real(lam[j], bits) - q) / (Real(lam[j], bits) - lam[m]);
    out.relation_residual = abs(last - (1.0 - sum)).to_double();
    a.push_back(std::move(last));
  }
  out.coeffs = std::move(a);
  return out;
}

double qn_eval(const MuntzApproximant& approx, double x) {
  if (!(x >= 0.0 && x <= 1.0)) throw Error(ErrorCode::InvalidArgument, "x must lie in [0, 1]");
  Evaluator eval(approx);
  return eval(x);
}

SupNorm sup_norm_estimate(const MuntzApproximant& approx, std::size_t grid_size) {
  if (grid_size < 100) throw Error(ErrorCode::InvalidArgument, "grid_size must be at least 100");
  if (approx.n() == 0) return {1.0, 1.0};
  Evaluator eval(approx);
  const std::size_t m = std::max(grid_size, 10 * approx.n());
  std::vector<double> xs(m);
  std::vector<double> fs(m);
  for (std::size_t i = 0; i < m; ++i) {
    xs[i] = 0.5 * (1.0 - std::cos(std::numbers::pi * static_cast<double>(i) / static_cast<double>(m - 1)));
    fs[i] = std::abs(eval(xs[i]));
  }
  std::vector<std::size_t> peaks;
  for (std::size_t i = 0; i < m; ++i) {
    const bool left = i == 0 || fs[i] >= fs[i - 1];
    const bool right = i + 1 == m || fs[i] >= fs[i + 1];
    if (left && right) peaks.push_back(i);
  }
  std::sort(peaks.begin(), peaks.end(), [&](std::size_t a, std::size_t b) { return fs[a] > fs[b]; });
  if (peaks.size() > 3) peaks.resize(3);

  SupNorm best{fs[peaks.front()], xs[peaks.front()]};
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  for (std::size_t i : peaks) {
    double lo = xs[i == 0 ? 0 : i - 1];
    double hi = xs[i + 1 == m ? m - 1 : i + 1];
    double c = hi - ratio * (hi - lo);
    double d = lo + ratio * (hi - lo);
    double fc = std::abs(eval(c));
    double fd = std::abs(eval(d));
    for (int it = 0; it < 60 && hi - lo > 1e-15; ++it) {
      if (fc >= fd) {
        hi = d;
        d = c;
        fd = fc;
        c = hi - ratio * (hi - lo);
        fc = std::abs(eval(c));
      } else {
        lo = c;
        c = d;
        fc = fd;
        d = lo + ratio * (hi - lo);
        fd = std::abs(eval(d));
      }
    }
    for (auto [x, f] : {std::pair{c, fc}, std::pair{d, fd}}) {
      if (f > best.sup) best = {f, x};
    }
  }
  return best;
}

}  // namespace stieltjes
