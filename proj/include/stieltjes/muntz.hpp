#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "stieltjes/real.hpp"

namespace stieltjes {

enum class SequenceKind { Primes, Integers, Custom };

std::string_view to_string(SequenceKind kind);

/// Strictly increasing positive exponents. Primes and integers are generated
/// on demand; custom sequences are a fixed list.
class MuntzSequence {
 public:
  static MuntzSequence primes();
  static MuntzSequence integers();
  /// Throws InvalidArgument unless values are finite, positive, strictly increasing.
  static MuntzSequence custom(std::vector<double> values);

  SequenceKind kind() const { return kind_; }
  /// First n terms. Custom sequences throw InvalidArgument past their length.
  std::vector<double> prefix(std::size_t n) const;
  /// Number of terms available (unbounded kinds report SIZE_MAX).
  std::size_t available() const;

 private:
  explicit MuntzSequence(SequenceKind kind, std::vector<double> values = {})
      : kind_(kind), values_(std::move(values)) {}
  SequenceKind kind_;
  std::vector<double> values_;
};

/// The first n primes as doubles.
std::vector<double> first_primes(std::size_t n);

struct DivergenceCertificate {
  SequenceKind kind = SequenceKind::Custom;
  std::size_t prefix_len = 0;
  double partial_sum = 0.0;  // sum of 1/lambda_k over the prefix
  bool certified_divergent = false;
  std::string statement;
};

DivergenceCertificate divergence_certificate(const MuntzSequence& seq, std::size_t prefix_len);

struct MuntzApproximant {
  double q = 0.0;
  std::vector<double> lambdas;
  std::vector<Real> coeffs;  // a_{1,n} .. a_{n,n}
  double bound = 1.0;  // prod |1 - q / lambda_k|
  unsigned precision_bits = 0;
  double relation_residual = 0.0;  // |a_{n,n} - (1 - sum_{k<n} a_{k,n})|
  std::size_t n() const { return lambdas.size(); }
};

/// Coefficients of Q_n(x) = x^q - sum a_{k,n} x^lambda_k. The first n - 1
/// follow the recursion a_{k,n} = a_{k,n-1} (lambda_n - q) / (lambda_n - lambda_k);
/// a_{n,n} comes from its product form so the sum relation is an independent
/// check. Throws QCollidesWithLambda or InvalidArgument.
MuntzApproximant golitschek_coeffs(double q, std::span<const double> lambdas, std::size_t n);

/// Q_n(x) for x in [0, 1].
double qn_eval(const MuntzApproximant& approx, double x);

struct SupNorm {
  double sup = 0.0;
  double argmax = 0.0;
};

/// max |Q_n| over a Chebyshev grid of max(grid_size, 10 n) points, then a
/// golden-section polish around the best local maxima. grid_size >= 100.
SupNorm sup_norm_estimate(const MuntzApproximant& approx, std::size_t grid_size = 100);

}  // namespace stieltjes
