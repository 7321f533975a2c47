#include "stieltjes/distribution1d.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/special_functions/gamma.hpp>

#include "stieltjes/error.hpp"
#include "stieltjes/quadrature.hpp"

namespace stieltjes {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// Zolotarev's function for the one-sided stable law with transform exp(-s^alpha).
double zolotarev_log_a(double alpha, double u) {
  const double beta = 1.0 - alpha;
  return (alpha / beta) * std::log(std::sin(alpha * u)) + std::log(std::sin(beta * u)) -
         std::log(std::sin(u)) / beta;
}

constexpr quad::Options kStableQuad{1e-15, 1e-13, 2000};

double stable_cdf(double alpha, double x, bool upper) {
  if (x <= 0.0) return upper ? 1.0 : 0.0;
  if (std::isinf(x)) return upper ? 0.0 : 1.0;
  const double log_c = -alpha / (1.0 - alpha) * std::log(x);
  auto integrand = [&](double u) {
    const double e = std::exp(zolotarev_log_a(alpha, u) + log_c);
    return upper ? -std::expm1(-e) : std::exp(-e);
  };
  const double v = quad::integrate(integrand, 0.0, std::numbers::pi, kStableQuad).value /
                   std::numbers::pi;
  return std::clamp(v, 0.0, 1.0);
}

double stable_pdf(double alpha, double x) {
  if (x <= 0.0 || std::isinf(x)) return 0.0;
  const double beta = 1.0 - alpha;
  const double log_c = -alpha / beta * std::log(x);
  auto integrand = [&](double u) {
    const double log_ac = zolotarev_log_a(alpha, u) + log_c;
    return std::exp(log_ac - std::exp(log_ac));
  };
  // c * integral of A exp(-A c) rewritten with log(A c) to keep it bounded
  const double integral =
      quad::integrate(integrand, 0.0, std::numbers::pi, kStableQuad).value / std::numbers::pi;
  return alpha / beta * integral / x;
}

void check_law(const Law& law) {
  std::visit(Overloaded{
                 [](const Exponential& e) {
                   if (!(e.rate > 0.0) || !std::isfinite(e.rate))
                     throw Error(ErrorCode::ParameterOutOfRange, "exponential: lambda must be > 0");
                 },
                 [](const GammaLaw& g) {
                   if (!(g.rate > 0.0) || !std::isfinite(g.rate))
                     throw Error(ErrorCode::ParameterOutOfRange, "gamma: lambda must be > 0");
                   if (!(g.shape > 0.0) || !std::isfinite(g.shape))
                     throw Error(ErrorCode::ParameterOutOfRange, "gamma: q must be > 0");
                 },
                 [](const PositiveStable& p) {
                   if (!(p.alpha > 0.0 && p.alpha < 1.0))
                     throw Error(ErrorCode::ParameterOutOfRange,
                                 "positive-stable: alpha must lie in (0,1)");
                 },
                 [](const CdfOnly& c) {
                   if (!c.cdf) throw Error(ErrorCode::InvalidArgument, "cdf-only law without a cdf");
                 },
             },
             law);
}

}  // namespace

double law_cdf(const Law& law, double x) {
  if (x < 0.0) return 0.0;
  return std::visit(Overloaded{
                        [&](const Exponential& e) { return -std::expm1(-e.rate * x); },
                        [&](const GammaLaw& g) {
                          return std::isinf(x) ? 1.0 : boost::math::gamma_p(g.shape, g.rate * x);
                        },
                        [&](const PositiveStable& p) { return stable_cdf(p.alpha, x, false); },
                        [&](const CdfOnly& c) { return std::isinf(x) ? 1.0 : c.cdf(x); },
                    },
                    law);
}

double law_survival(const Law& law, double x) {
  if (x < 0.0) return 1.0;
  return std::visit(Overloaded{
                        [&](const Exponential& e) { return std::exp(-e.rate * x); },
                        [&](const GammaLaw& g) {
                          return std::isinf(x) ? 0.0 : boost::math::gamma_q(g.shape, g.rate * x);
                        },
                        [&](const PositiveStable& p) { return stable_cdf(p.alpha, x, true); },
                        [&](const CdfOnly& c) { return std::isinf(x) ? 0.0 : 1.0 - c.cdf(x); },
                    },
                    law);
}

Distribution1D::Distribution1D(std::vector<Atom> atoms, std::vector<Component> components) {
  double total = 0.0;
  for (const auto& a : atoms) {
    if (!(a.location >= 0.0) || !std::isfinite(a.location))
      throw Error(ErrorCode::ParameterOutOfRange, "atom location must be finite and >= 0");
    if (!(a.mass > 0.0) || a.mass > 1.0 + 1e-12)
      throw Error(ErrorCode::ParameterOutOfRange, "atom mass must lie in (0,1]");
    total += a.mass;
  }
  for (const auto& c : components) {
    if (!(c.weight > 0.0) || c.weight > 1.0 + 1e-12)
      throw Error(ErrorCode::ParameterOutOfRange, "component weight must lie in (0,1]");
    check_law(c.law);
    total += c.weight;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw Error(ErrorCode::ParameterOutOfRange,
                "masses and weights must sum to 1 (got " + std::to_string(total) + ")");
  }
  std::sort(atoms.begin(), atoms.end(),
            [](const Atom& a, const Atom& b) { return a.location < b.location; });
  for (const auto& a : atoms) {
    if (!atoms_.empty() && atoms_.back().location == a.location) {
      atoms_.back().mass += a.mass;
    } else {
      atoms_.push_back(a);
    }
  }
  for (auto& a : atoms_) a.mass /= total;
  components_ = std::move(components);
  for (auto& c : components_) c.weight /= total;
}

Distribution1D Distribution1D::exponential(double rate) {
  return Distribution1D({}, {Component{Exponential{rate}, 1.0}});
}

Distribution1D Distribution1D::gamma(double rate, double shape) {
  return Distribution1D({}, {Component{GammaLaw{rate, shape}, 1.0}});
}

Distribution1D Distribution1D::positive_stable(double alpha) {
  return Distribution1D({}, {Component{PositiveStable{alpha}, 1.0}});
}

Distribution1D Distribution1D::point_mass(double location) {
  return Distribution1D({Atom{location, 1.0}}, {});
}

Distribution1D Distribution1D::from_cdf(CdfOnly law) {
  return Distribution1D({}, {Component{std::move(law), 1.0}});
}

Distribution1D Distribution1D::mixture(const std::vector<std::pair<double, Distribution1D>>& parts) {
  if (parts.empty()) throw Error(ErrorCode::InvalidArgument, "mixture needs at least one part");
  std::vector<Atom> atoms;
  std::vector<Component> components;
  for (const auto& [w, d] : parts) {
    if (!(w > 0.0)) throw Error(ErrorCode::ParameterOutOfRange, "mixture weight must be > 0");
    for (const auto& a : d.atoms()) atoms.push_back({a.location, w * a.mass});
    for (const auto& c : d.components()) components.push_back({c.law, w * c.weight});
  }
  return Distribution1D(std::move(atoms), std::move(components));
}

double Distribution1D::ac_weight() const {
  double w = 0.0;
  for (const auto& c : components_) w += c.weight;
  return w;
}

double Distribution1D::cdf(double x) const {
  if (std::isnan(x)) throw Error(ErrorCode::InvalidArgument, "cdf at NaN");
  if (x < 0.0) return 0.0;
  double v = 0.0;
  for (const auto& a : atoms_) {
    if (a.location <= x) v += a.mass;
  }
  for (const auto& c : components_) v += c.weight * law_cdf(c.law, x);
  return std::clamp(v, 0.0, 1.0);
}

double Distribution1D::survival(double x) const {
  if (std::isnan(x)) throw Error(ErrorCode::InvalidArgument, "survival at NaN");
  if (x < 0.0) return 1.0;
  double v = 0.0;
  for (const auto& a : atoms_) {
    if (a.location > x) v += a.mass;
  }
  for (const auto& c : components_) v += c.weight * law_survival(c.law, x);
  return std::clamp(v, 0.0, 1.0);
}

bool Distribution1D::has_density() const {
  return std::none_of(components_.begin(), components_.end(), [](const Component& c) {
    return std::holds_alternative<CdfOnly>(c.law);
  });
}

double Distribution1D::density(double x) const {
  if (!has_density()) {
    throw Error(ErrorCode::NoDensityRoute, "distribution has a continuous part without density");
  }
  if (x < 0.0) return 0.0;
  double v = 0.0;
  for (const auto& c : components_) {
    v += c.weight * std::visit(Overloaded{
                                   [&](const Exponential& e) { return e.rate * std::exp(-e.rate * x); },
                                   [&](const GammaLaw& g) {
                                     if (x == 0.0) {
                                       if (g.shape < 1.0) return kInf;
                                       return g.shape == 1.0 ? g.rate : 0.0;
                                     }
                                     return g.rate * boost::math::gamma_p_derivative(g.shape, g.rate * x);
                                   },
                                   [&](const PositiveStable& p) { return stable_pdf(p.alpha, x); },
                                   [&](const CdfOnly&) { return kNaN; },
                               },
                               c.law);
  }
  return v;
}

double Distribution1D::density_at_zero() const {
  for (const auto& a : atoms_) {
    if (a.location == 0.0) return kInf;
  }
  double v = 0.0;
  for (const auto& c : components_) {
    v += c.weight * std::visit(Overloaded{
                                   [](const Exponential& e) { return e.rate; },
                                   [](const GammaLaw& g) {
                                     if (g.shape < 1.0) return kInf;
                                     return g.shape == 1.0 ? g.rate : 0.0;
                                   },
                                   [](const PositiveStable&) { return 0.0; },
                                   [](const CdfOnly&) { return kNaN; },
                               },
                               c.law);
  }
  return v;
}

bool Distribution1D::has_closed_form() const {
  return std::all_of(components_.begin(), components_.end(), [](const Component& c) {
    const auto* only = std::get_if<CdfOnly>(&c.law);
    return only == nullptr || static_cast<bool>(only->transform);
  });
}

std::optional<double> Distribution1D::closed_form_ls(double s) const {
  if (!has_closed_form()) return std::nullopt;
  double v = 0.0;
  for (const auto& a : atoms_) v += a.mass * std::exp(-s * a.location);
  for (const auto& c : components_) {
    v += c.weight * std::visit(Overloaded{
                                   [&](const Exponential& e) { return e.rate / (e.rate + s); },
                                   [&](const GammaLaw& g) {
                                     return std::pow(g.rate / (g.rate + s), g.shape);
                                   },
                                   [&](const PositiveStable& p) { return std::exp(-std::pow(s, p.alpha)); },
                                   [&](const CdfOnly& o) { return o.transform(s); },
                               },
                               c.law);
  }
  return v;
}

std::optional<double> Distribution1D::tail_quantile() const {
  double q = 0.0;
  for (const auto& a : atoms_) q = std::max(q, a.location);
  for (const auto& c : components_) {
    const auto x = std::visit(Overloaded{
                                  [](const Exponential& e) -> std::optional<double> {
                                    return std::log(1e4) / e.rate;
                                  },
                                  [](const GammaLaw& g) -> std::optional<double> {
                                    return boost::math::gamma_q_inv(g.shape, 1e-4) / g.rate;
                                  },
                                  [](const PositiveStable&) -> std::optional<double> { return std::nullopt; },
                                  [](const CdfOnly&) -> std::optional<double> { return std::nullopt; },
                              },
                              c.law);
    if (!x) return std::nullopt;
    q = std::max(q, *x);
  }
  return q;
}

std::vector<double> Distribution1D::breakpoints() const {
  std::vector<double> out;
  for (const auto& a : atoms_) out.push_back(a.location);
  for (const auto& c : components_) {
    if (const auto* only = std::get_if<CdfOnly>(&c.law)) {
      out.insert(out.end(), only->breakpoints.begin(), only->breakpoints.end());
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace stieltjes
