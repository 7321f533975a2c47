#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "stieltjes/distribution1d.hpp"
#include "stieltjes/real.hpp"

namespace stieltjes {

/// A transform s -> L(s) with optional closed-form derivatives. Both callables
/// work at the precision of their argument.
struct TransformOracle {
  std::function<Real(const Real& s)> eval;
  std::function<Real(int k, const Real& s)> deriv;  // empty when none
  int max_k = 0;  // largest order served by deriv
  unsigned precision_bits = 128;
  double eval_rel_error = 0.0;  // accuracy of eval when coarser than working precision
};

inline constexpr int kMaxSynthesisOrder = 12;

/// Oracle for the Laplace-Stieltjes transform of a law with a closed form.
/// Closed derivatives are attached when every part has them (atoms,
/// exponential, gamma). Throws NoClosedForm.
TransformOracle make_oracle(const Distribution1D& dist, unsigned precision_bits = 128);

struct Certified {
  Real value;
  Real error;  // absolute bound
};

/// k-th derivative from eval alone: central differences with Richardson
/// extrapolation at precision max(precision_bits, 64 + 8k). Throws
/// PrecisionExhausted when the error exceeds 10% of the value.
Certified synthesize_derivative(const TransformOracle& oracle, int k, double s);

/// Closed-form derivative when available, else synthesized.
/// DerivativeUnavailable past both limits.
Certified derivative(const TransformOracle& oracle, int k, const Real& s);

struct InversionResult {
  double value = 0.0;
  double raw = 0.0;  // before clamping
  double error = 0.0;  // certified arithmetic error
  unsigned precision_bits = 0;
  int terms = 0;
};

/// ((-1)^n / n!) (n/x)^(n+1) L^(n)(n/x). Feed it the transform of a density.
InversionResult post_widder_density(const TransformOracle& oracle, double x, int n);

/// sum over k <= n x of (-1)^k n^k / k! L^(k)(n), clamped to [0, 1].
InversionResult feller_cdf(const TransformOracle& oracle, double x, int n);

/// sum over k <= n of (-1)^k / k! (n/x)^k L^(k)(n/x), clamped to [0, 1].
InversionResult feller_cdf_scaled(const TransformOracle& oracle, double x, int n);

struct WatsonReport {
  double s = 0.0;
  std::vector<double> partial_sums;  // index n: sum of f^(m)(0) / s^(m+1), m <= n
  std::vector<double> residuals;  // against the reference, when given
  bool small_s = false;  // s <= 1: the expansion need not converge
  bool terms_decreasing = true;  // last term smaller than the first nonzero one
};

WatsonReport watson_check(std::span<const double> derivs_at_zero, double s, int n_max,
                          std::optional<double> reference = std::nullopt);

}  // namespace stieltjes
