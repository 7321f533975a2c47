#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "stieltjes/distribution1d.hpp"

namespace stieltjes {

namespace detail {
class GammaMixture;
}

struct ProductLaw {
  std::vector<Distribution1D> factors;
};

// Survival exp(-lambda1 x - lambda2 y - lambda12 max(x, y)).
struct MarshallOlkin {
  double lambda1 = 1.0;
  double lambda2 = 1.0;
  double lambda12 = 1.0;
};

// Initial failure rates alpha (X) and beta (Y); after the first failure the
// survivor switches to alpha_prime or beta_prime.
struct Freund {
  double alpha = 1.0;
  double alpha_prime = 1.0;
  double beta = 1.0;
  double beta_prime = 1.0;
};

struct MoranDownton {
  double r = 0.0;
};

// Bivariate lack-of-memory law. singular_mass is the probability of X = Y.
struct BlmSpec {
  Distribution1D f;
  Distribution1D g;
  double theta = 1.0;
  double singular_mass = 0.0;
};

struct BivariateGamma {
  double r = 0.0;
  double q = 1.0;
};

struct TrivariateGamma {
  double alpha = 1.0;
  double a = 0.5;
  double b = 0.5;
};

using JointKind = std::variant<ProductLaw, MarshallOlkin, Freund, MoranDownton, BlmSpec,
                               BivariateGamma, TrivariateGamma>;

struct ClosedFormValue {
  double value = 0.0;
  double error = 0.0;
};

/// Validates F, G and theta and derives the diagonal mass
/// p = (f(0) + g(0)) / theta - 1, which must lie in [0, 1].
BlmSpec make_blm_spec(Distribution1D f, Distribution1D g, double theta);

/// Piecewise BLM survival; coordinates are clamped at 0 and may be +inf.
double blm_survival(const BlmSpec& spec, double x, double y);

class JointDist {
 public:
  explicit JointDist(JointKind kind);

  std::size_t dim() const { return dim_; }
  const JointKind& kind() const { return kind_; }
  std::string kind_name() const;

  /// Joint CDF. Coordinates equal to +inf marginalize that axis.
  double cdf(std::span<const double> x) const;
  /// Joint survival from the kind's own formula.
  double survival(std::span<const double> x) const;
  /// CDF of the sub-vector on the given (ascending) axes.
  double marginal_cdf(std::span<const std::size_t> axes, std::span<const double> x) const;

  bool has_closed_form() const;
  /// E[exp(-s.X)]; s_i = 0 yields the transform of the remaining margin.
  std::optional<ClosedFormValue> closed_form_ls(std::span<const double> s) const;

  /// Kinks and jumps of the CDF along `axis` given coordinates of the axes
  /// before it (NaN = not yet fixed, +inf = marginalized).
  std::vector<double> seams(std::size_t axis, std::span<const double> coords) const;

 private:
  JointKind kind_;
  std::size_t dim_ = 2;
  std::shared_ptr<const detail::GammaMixture> mixture_;
};

}  // namespace stieltjes
