#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "stieltjes/catalog.hpp"

namespace stieltjes {

enum class Route { Direct, Carson, Survival, ClosedForm, Auto };

std::string_view to_string(Route route);
/// Accepts auto, direct, carson, survival, closed (or closed_form).
Route parse_route(std::string_view name);

struct TransformValue {
  double value = 0.0;
  double est_error = 0.0;
  Route route = Route::ClosedForm;
  std::size_t evaluations = 0;
};

struct TransformOptions {
  double tol = 1e-10;
  std::optional<double> truncation;  // overrides the per-axis cutoff
  std::size_t max_panels = 20000;
};

/// Atoms plus the integral of density * exp(-s x). Throws NoDensityRoute when
/// a continuous part has no density.
TransformValue ls_direct(const Distribution1D& dist, double s, const TransformOptions& opt = {});

/// (prod s_i) * integral of H(x) exp(-s.x) over the orthant.
TransformValue ls_carson(const Distribution1D& dist, double s, const TransformOptions& opt = {});
TransformValue ls_carson(const JointDist& dist, std::span<const double> s,
                         const TransformOptions& opt = {});

/// 1 - s * integral of survival(x) exp(-s x).
TransformValue ls_survival_route(const Distribution1D& dist, double s, const TransformOptions& opt = {});
/// st * double integral of the joint survival, minus 1, plus the marginal
/// transforms (computed on the Carson route).
TransformValue ls_survival_route(const JointDist& dist, double s, double t,
                                 const TransformOptions& opt = {});

/// Catalog formula. Throws NoClosedForm.
TransformValue closed_form_ls(const Distribution1D& dist, double s);
TransformValue closed_form_ls(const JointDist& dist, std::span<const double> s);

/// Route dispatch; Auto picks the closed form when there is one, else Carson.
TransformValue transform(const AnyDistribution& dist, std::span<const double> s, Route route,
                         const TransformOptions& opt = {});

struct IdentityReport {
  std::size_t dim = 1;
  double tol = 0.0;
  double reference = 0.0;  // closed form or direct route
  Route reference_route = Route::ClosedForm;
  double carson = 0.0;
  double identity_gap = 0.0;  // |reference - carson|
  bool expanded = false;  // survival-side expansion evaluated (dim <= 3)
  double lhs_reference = 0.0;  // E[prod(1 - exp(-s_i X_i))] from reference transforms
  double lhs_mixed = 0.0;  // same with Carson values for every proper margin
  double rhs_survival = 0.0;  // (prod s_i) * integral of the joint survival
  double rhs_carson = 0.0;  // inclusion-exclusion over Carson values of all margins
  double survival_gap = 0.0;  // |lhs_reference - rhs_survival|
  double margin_gap = 0.0;  // |lhs_reference - lhs_mixed|
  double expansion_gap = 0.0;  // |rhs_survival - rhs_carson|
  double est_error = 0.0;
  std::size_t evaluations = 0;
  bool pass = false;
};

IdentityReport verify_identity(const AnyDistribution& dist, std::span<const double> s, double tol);

}  // namespace stieltjes
