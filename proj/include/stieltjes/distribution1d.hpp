#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace stieltjes {

struct Atom {
  double location = 0.0;
  double mass = 0.0;
};

struct Exponential {
  double rate = 1.0;
};

// Density lambda^q x^(q-1) e^(-lambda x) / Gamma(q).
struct GammaLaw {
  double rate = 1.0;
  double shape = 1.0;
};

// Transform exp(-s^alpha).
struct PositiveStable {
  double alpha = 0.5;
};

// A continuous law known only through its CDF (e.g. singular continuous).
// Has no density route; the transform, when given, is used as closed form.
struct CdfOnly {
  std::string name;
  std::function<double(double)> cdf;
  std::function<double(double)> transform;
  std::vector<double> breakpoints;
};

using Law = std::variant<Exponential, GammaLaw, PositiveStable, CdfOnly>;

struct Component {
  Law law;
  double weight = 1.0;
};

class Distribution1D {
 public:
  /// Atom masses and component weights must sum to 1 within 1e-12.
  Distribution1D(std::vector<Atom> atoms, std::vector<Component> components);

  static Distribution1D exponential(double rate);
  static Distribution1D gamma(double rate, double shape);
  static Distribution1D positive_stable(double alpha);
  static Distribution1D point_mass(double location);
  static Distribution1D from_cdf(CdfOnly law);
  static Distribution1D mixture(const std::vector<std::pair<double, Distribution1D>>& parts);

  const std::vector<Atom>& atoms() const { return atoms_; }
  const std::vector<Component>& components() const { return components_; }
  double ac_weight() const;

  double cdf(double x) const;
  double survival(double x) const;

  bool has_density() const;
  /// Density of the non-atomic part (weighted). Throws NoDensityRoute when a
  /// component has no density evaluator.
  double density(double x) const;
  /// Right limit F(eps)/eps as eps -> 0+; NaN when not known.
  double density_at_zero() const;

  bool has_closed_form() const;
  /// E[exp(-sX)] from catalog formulas; nullopt when some part lacks one.
  std::optional<double> closed_form_ls(double s) const;

  /// x with survival(x) <= 1e-4 when available without iteration.
  std::optional<double> tail_quantile() const;

  /// Points where the CDF jumps or has a known kink.
  std::vector<double> breakpoints() const;

 private:
  std::vector<Atom> atoms_;
  std::vector<Component> components_;
};

double law_cdf(const Law& law, double x);
double law_survival(const Law& law, double x);

}  // namespace stieltjes
