#include "stieltjes/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "stieltjes/error.hpp"
#include "stieltjes/quadrature.hpp"

namespace stieltjes {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kMaxDim = 4;

using Field = std::function<double(std::span<const double>)>;
using Seams = std::function<std::vector<double>(std::size_t, std::span<const double>)>;

void check_options(const TransformOptions& opt) {
  if (!(opt.tol > 0.0 && opt.tol <= 1e-2)) {
    throw Error(ErrorCode::InvalidArgument, "tol must lie in (0, 1e-2]");
  }
  if (opt.truncation && !(*opt.truncation > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "truncation must be positive");
  }
}

void check_s(std::span<const double> s) {
  for (double v : s) {
    if (!(v > 0.0) || !std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "s must be positive");
  }
}

// Cutoff with exp(-s T) <= tol / (4 d); never shorter than 20/s or the
// 0.9999 quantile when one is known.
double cutoff(double s, std::size_t d, const TransformOptions& opt, std::optional<double> quantile) {
  if (opt.truncation) return *opt.truncation;
  double t = std::max(20.0, std::log(4.0 * d / opt.tol)) / s;
  if (quantile && std::isfinite(*quantile)) t = std::max(t, *quantile);
  return t;
}

// (prod s_k) * integral over [0,T]^axes of field(x) exp(-sum s_k x_k); axes
// not listed stay at +inf. Nested adaptive quadrature, outermost = axes[0].
struct Carson {
  const Field& field;
  const Seams& seams;
  std::vector<std::size_t> axes;
  std::vector<double> s;
  std::vector<double> cut;
  std::vector<double> level_tol;
  std::vector<double> level_err;
  std::vector<double> x;
  std::size_t max_panels;
  std::size_t evaluations = 0;

  double level(std::size_t k) {
    if (k == axes.size()) {
      ++evaluations;
      return field(x);
    }
    const std::size_t axis = axes[k];
    const double sk = s[k];
    auto integrand = [&](double v) {
      x[axis] = v;
      return sk * std::exp(-sk * v) * level(k + 1);
    };
    x[axis] = std::numeric_limits<double>::quiet_NaN();
    auto bps = seams(axis, x);
    const auto r = quad::integrate(integrand, 0.0, cut[k], {level_tol[k], 0.0, max_panels}, bps);
    x[axis] = std::numeric_limits<double>::quiet_NaN();
    level_err[k] = std::max(level_err[k], r.error);
    return r.value;
  }
};

TransformValue carson_integral(const Field& field, const Seams& seams, std::size_t dim,
                               std::span<const std::size_t> axes, std::span<const double> s,
                               std::span<const std::optional<double>> quantiles,
                               const TransformOptions& opt) {
  const std::size_t d = axes.size();
  if (d > kMaxDim) throw Error(ErrorCode::DimensionTooLarge, "quadrature is capped at 4 dimensions");
  Carson c{field, seams, {axes.begin(), axes.end()}, {s.begin(), s.end()}, {}, {}, {},
           std::vector<double>(dim, kInf), opt.max_panels};
  double tail = 0.0;
  for (std::size_t k = 0; k < d; ++k) {
    c.cut.push_back(cutoff(s[k], d, opt, quantiles.empty() ? std::nullopt : quantiles[k]));
    tail += std::exp(-s[k] * c.cut.back());
  }
  // quadrature budget 3/4 tol, halved at each deeper level
  double budget = 0.75 * opt.tol;
  for (std::size_t k = 0; k < d; ++k) {
    budget *= 0.5;
    c.level_tol.push_back(budget);
  }
  c.level_err.assign(d, 0.0);
  for (std::size_t a : axes) c.x[a] = std::numeric_limits<double>::quiet_NaN();

  TransformValue out;
  out.value = c.level(0);
  out.est_error = tail;
  for (double e : c.level_err) out.est_error += e;
  out.evaluations = c.evaluations;
  out.route = Route::Carson;
  return out;
}

// Law breakpoints plus a dyadic ladder up to the cutoff, so a long range does
// not hide mass near the origin from the first panels.
std::vector<double> dyadic_seams(const Distribution1D& dist, double cut) {
  auto out = dist.breakpoints();
  for (double x = 0.125; x < cut; x *= 2.0) out.push_back(x);
  std::sort(out.begin(), out.end());
  return out;
}

Seams univariate_seams(const Distribution1D& dist, double cut) {
  return [bps = dyadic_seams(dist, cut)](std::size_t, std::span<const double>) { return bps; };
}

Seams joint_seams(const JointDist& dist) {
  return [&dist](std::size_t axis, std::span<const double> x) { return dist.seams(axis, x); };
}

std::vector<std::optional<double>> joint_quantiles(const JointDist& dist,
                                                   std::span<const std::size_t> axes) {
  std::vector<std::optional<double>> q(axes.size());
  if (const auto* p = std::get_if<ProductLaw>(&dist.kind())) {
    for (std::size_t k = 0; k < axes.size(); ++k) q[k] = p->factors[axes[k]].tail_quantile();
  }
  return q;
}

TransformValue joint_carson(const JointDist& dist, std::span<const std::size_t> axes,
                            std::span<const double> s, const TransformOptions& opt) {
  Field field = [&dist](std::span<const double> x) { return dist.cdf(x); };
  const auto q = joint_quantiles(dist, axes);
  return carson_integral(field, joint_seams(dist), dist.dim(), axes, s, q, opt);
}

TransformValue joint_survival_integral(const JointDist& dist, std::span<const double> s,
                                       const TransformOptions& opt) {
  Field field = [&dist](std::span<const double> x) { return dist.survival(x); };
  std::vector<std::size_t> axes(dist.dim());
  for (std::size_t i = 0; i < axes.size(); ++i) axes[i] = i;
  const auto q = joint_quantiles(dist, axes);
  return carson_integral(field, joint_seams(dist), dist.dim(), axes, s, q, opt);
}

std::vector<std::size_t> all_axes(std::size_t d) {
  std::vector<std::size_t> a(d);
  for (std::size_t i = 0; i < d; ++i) a[i] = i;
  return a;
}

}  // namespace

std::string_view to_string(Route route) {
  switch (route) {
    case Route::Direct: return "direct";
    case Route::Carson: return "carson";
    case Route::Survival: return "survival";
    case Route::ClosedForm: return "closed_form";
    case Route::Auto: return "auto";
  }
  return "unknown";
}

Route parse_route(std::string_view name) {
  if (name == "auto") return Route::Auto;
  if (name == "direct") return Route::Direct;
  if (name == "carson") return Route::Carson;
  if (name == "survival") return Route::Survival;
  if (name == "closed" || name == "closed_form") return Route::ClosedForm;
  throw Error(ErrorCode::InvalidArgument, "unknown route '" + std::string(name) + "'");
}

TransformValue ls_direct(const Distribution1D& dist, double s, const TransformOptions& opt) {
  check_options(opt);
  const double sv[1] = {s};
  check_s(sv);
  TransformValue out;
  out.route = Route::Direct;
  for (const auto& a : dist.atoms()) out.value += a.mass * std::exp(-s * a.location);
  if (dist.components().empty()) return out;
  if (!dist.has_density()) {
    throw Error(ErrorCode::NoDensityRoute,
                "continuous part has no density evaluator; use the carson route");
  }
  const double t = cutoff(s, 1, opt, dist.tail_quantile());
  auto integrand = [&](double x) { return dist.density(x) * std::exp(-s * x); };
  const auto bps = dyadic_seams(dist, t);
  const auto r = quad::integrate(integrand, 0.0, t, {0.75 * opt.tol, 0.0, opt.max_panels}, bps);
  out.value += r.value;
  out.est_error = r.error + dist.ac_weight() * std::exp(-s * t);
  out.evaluations = r.evaluations;
  return out;
}

TransformValue ls_carson(const Distribution1D& dist, double s, const TransformOptions& opt) {
  check_options(opt);
  const double sv[1] = {s};
  check_s(sv);
  Field field = [&dist](std::span<const double> x) { return dist.cdf(x[0]); };
  const std::size_t axes[1] = {0};
  const std::optional<double> q[1] = {dist.tail_quantile()};
  const double cut = cutoff(s, 1, opt, q[0]);
  return carson_integral(field, univariate_seams(dist, cut), 1, axes, sv, q, opt);
}

TransformValue ls_carson(const JointDist& dist, std::span<const double> s, const TransformOptions& opt) {
  check_options(opt);
  check_s(s);
  if (s.size() != dist.dim()) throw Error(ErrorCode::InvalidArgument, "need one s per dimension");
  return joint_carson(dist, all_axes(dist.dim()), s, opt);
}

TransformValue ls_survival_route(const Distribution1D& dist, double s, const TransformOptions& opt) {
  check_options(opt);
  const double sv[1] = {s};
  check_s(sv);
  Field field = [&dist](std::span<const double> x) { return dist.survival(x[0]); };
  const std::size_t axes[1] = {0};
  const std::optional<double> q[1] = {dist.tail_quantile()};
  const double cut = cutoff(s, 1, opt, q[0]);
  auto r = carson_integral(field, univariate_seams(dist, cut), 1, axes, sv, q, opt);
  r.value = 1.0 - r.value;
  r.route = Route::Survival;
  return r;
}

TransformValue ls_survival_route(const JointDist& dist, double s, double t, const TransformOptions& opt) {
  check_options(opt);
  if (dist.dim() != 2) throw Error(ErrorCode::InvalidArgument, "survival route needs a bivariate law");
  const double st[2] = {s, t};
  check_s(st);
  // split the budget between the three integrals
  TransformOptions part = opt;
  part.tol = opt.tol / 3.0;
  const auto joint = joint_survival_integral(dist, st, part);
  const std::size_t ax0[1] = {0};
  const std::size_t ax1[1] = {1};
  const auto f = joint_carson(dist, ax0, std::span<const double>(st, 1), part);
  const auto g = joint_carson(dist, ax1, std::span<const double>(st + 1, 1), part);
  TransformValue out;
  out.value = joint.value - 1.0 + f.value + g.value;
  out.est_error = joint.est_error + f.est_error + g.est_error;
  out.evaluations = joint.evaluations + f.evaluations + g.evaluations;
  out.route = Route::Survival;
  return out;
}

TransformValue closed_form_ls(const Distribution1D& dist, double s) {
  const double sv[1] = {s};
  check_s(sv);
  const auto v = dist.closed_form_ls(s);
  if (!v) throw Error(ErrorCode::NoClosedForm, "no closed-form transform for this law");
  return {*v, 0.0, Route::ClosedForm, 0};
}

TransformValue closed_form_ls(const JointDist& dist, std::span<const double> s) {
  check_s(s);
  if (s.size() != dist.dim()) throw Error(ErrorCode::InvalidArgument, "need one s per dimension");
  const auto v = dist.closed_form_ls(s);
  if (!v) throw Error(ErrorCode::NoClosedForm, "no closed-form transform for " + dist.kind_name());
  return {v->value, v->error, Route::ClosedForm, 0};
}

TransformValue transform(const AnyDistribution& dist, std::span<const double> s, Route route,
                         const TransformOptions& opt) {
  if (s.size() != dimension(dist)) {
    throw Error(ErrorCode::InvalidArgument, "expected " + std::to_string(dimension(dist)) +
                                                " transform arguments, got " + std::to_string(s.size()));
  }
  check_s(s);
  check_options(opt);
  if (const auto* one = std::get_if<Distribution1D>(&dist)) {
    switch (route) {
      case Route::Direct: return ls_direct(*one, s[0], opt);
      case Route::Carson: return ls_carson(*one, s[0], opt);
      case Route::Survival: return ls_survival_route(*one, s[0], opt);
      case Route::ClosedForm: return closed_form_ls(*one, s[0]);
      case Route::Auto:
        return one->has_closed_form() ? closed_form_ls(*one, s[0]) : ls_carson(*one, s[0], opt);
    }
  }
  const auto& joint = std::get<JointDist>(dist);
  switch (route) {
    case Route::Direct:
      throw Error(ErrorCode::NoDensityRoute, "the direct route is univariate only");
    case Route::Carson: return ls_carson(joint, s, opt);
    case Route::Survival:
      if (joint.dim() != 2) {
        throw Error(ErrorCode::InvalidArgument, "the survival route is implemented for dimension 2");
      }
      return ls_survival_route(joint, s[0], s[1], opt);
    case Route::ClosedForm: return closed_form_ls(joint, s);
    case Route::Auto:
      return joint.has_closed_form() ? closed_form_ls(joint, s) : ls_carson(joint, s, opt);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown route");
}

namespace {

struct Reference {
  double value;
  double error;
  Route route;
};

Reference univariate_reference(const Distribution1D& d, double s, const TransformOptions& opt) {
  if (const auto v = d.closed_form_ls(s)) return {*v, 0.0, Route::ClosedForm};
  const auto r = ls_direct(d, s, opt);
  return {r.value, r.est_error, Route::Direct};
}

// Reference transform of the margin on `axes` (all axes when full).
Reference joint_reference(const JointDist& j, std::span<const std::size_t> axes,
                          std::span<const double> s, const TransformOptions& opt) {
  std::vector<double> padded(j.dim(), 0.0);
  for (std::size_t k = 0; k < axes.size(); ++k) padded[axes[k]] = s[k];
  if (const auto v = j.closed_form_ls(padded)) return {v->value, v->error, Route::ClosedForm};
  if (const auto* p = std::get_if<ProductLaw>(&j.kind())) {
    Reference out{1.0, 0.0, Route::ClosedForm};
    for (std::size_t k = 0; k < axes.size(); ++k) {
      const auto r = univariate_reference(p->factors[axes[k]], s[k], opt);
      out.value *= r.value;
      out.error += r.error;
      if (r.route == Route::Direct) out.route = Route::Direct;
    }
    return out;
  }
  throw Error(ErrorCode::NoClosedForm, "verify_identity needs a reference transform for " + j.kind_name());
}

}  // namespace

IdentityReport verify_identity(const AnyDistribution& dist, std::span<const double> s, double tol) {
  TransformOptions opt;
  opt.tol = tol;
  check_options(opt);
  check_s(s);
  const std::size_t d = dimension(dist);
  if (s.size() != d) throw Error(ErrorCode::InvalidArgument, "need one s per dimension");
  TransformOptions q = opt;
  q.tol = tol / 10.0;

  IdentityReport rep;
  rep.dim = d;
  rep.tol = tol;

  if (const auto* one = std::get_if<Distribution1D>(&dist)) {
    const auto ref = univariate_reference(*one, s[0], q);
    const auto car = ls_carson(*one, s[0], q);
    const auto sur = ls_survival_route(*one, s[0], q);
    rep.reference = ref.value;
    rep.reference_route = ref.route;
    rep.carson = car.value;
    rep.expanded = true;
    rep.lhs_reference = 1.0 - ref.value;
    rep.lhs_mixed = rep.lhs_reference;
    rep.rhs_survival = 1.0 - sur.value;
    rep.rhs_carson = 1.0 - car.value;
    rep.est_error = ref.error + car.est_error + sur.est_error;
    rep.evaluations = car.evaluations + sur.evaluations;
  } else {
    const auto& j = std::get<JointDist>(dist);
    const auto axes = all_axes(d);
    const auto ref = joint_reference(j, axes, s, q);
    const auto car = joint_carson(j, axes, s, q);
    rep.reference = ref.value;
    rep.reference_route = ref.route;
    rep.carson = car.value;
    rep.est_error = ref.error + car.est_error;
    rep.evaluations = car.evaluations;
    rep.expanded = d <= 3;
    if (rep.expanded) {
      const double top_sign = (d % 2 == 0) ? 1.0 : -1.0;
      double lhs_ref = 1.0 + top_sign * ref.value;
      double lhs_mixed = 1.0 + top_sign * ref.value;
      double rhs_car = 1.0 + top_sign * car.value;
      for (unsigned mask = 1; mask + 1 < (1u << d); ++mask) {
        std::vector<std::size_t> sub;
        std::vector<double> ss;
        for (std::size_t i = 0; i < d; ++i) {
          if (mask & (1u << i)) {
            sub.push_back(i);
            ss.push_back(s[i]);
          }
        }
        const double sign = (sub.size() % 2 == 0) ? 1.0 : -1.0;
        const auto mref = joint_reference(j, sub, ss, q);
        const auto mcar = joint_carson(j, sub, ss, q);
        lhs_ref += sign * mref.value;
        lhs_mixed += sign * mcar.value;
        rhs_car += sign * mcar.value;
        rep.est_error += mref.error + mcar.est_error;
        rep.evaluations += mcar.evaluations;
      }
      const auto sur = joint_survival_integral(j, s, q);
      rep.lhs_reference = lhs_ref;
      rep.lhs_mixed = lhs_mixed;
      rep.rhs_survival = sur.value;
      rep.rhs_carson = rhs_car;
      rep.est_error += sur.est_error;
      rep.evaluations += sur.evaluations;
    }
  }
  rep.identity_gap = std::abs(rep.reference - rep.carson);
  rep.pass = rep.identity_gap <= tol;
  if (rep.expanded) {
    rep.survival_gap = std::abs(rep.lhs_reference - rep.rhs_survival);
    rep.margin_gap = std::abs(rep.lhs_reference - rep.lhs_mixed);
    rep.expansion_gap = std::abs(rep.rhs_survival - rep.rhs_carson);
    rep.pass = rep.pass && rep.survival_gap <= tol && rep.margin_gap <= tol && rep.expansion_gap <= tol;
  }
  return rep;
}

}  // namespace stieltjes
