#include "stieltjes/joint_dist.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/special_functions/gamma.hpp>

#include "gamma_mixture.hpp"
#include "stieltjes/error.hpp"

namespace stieltjes {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw Error(ErrorCode::ParameterOutOfRange, std::string(what) + " must be > 0");
  }
}

// (1 - exp(-g d)) / g, continuous at g = 0.
double phi(double g, double d) {
  if (g == 0.0) return d;
  return -std::expm1(-g * d) / g;
}

double clamp0(double v) { return v < 0.0 ? 0.0 : v; }

double mo_survival(const MarshallOlkin& m, double x, double y) {
  if (std::isinf(x) || std::isinf(y)) return 0.0;
  x = clamp0(x);
  y = clamp0(y);
  return std::exp(-m.lambda1 * x - m.lambda2 * y - m.lambda12 * std::max(x, y));
}

double freund_survival(const Freund& f, double x, double y) {
  if (std::isinf(x) || std::isinf(y)) return 0.0;
  x = clamp0(x);
  y = clamp0(y);
  const double total = f.alpha + f.beta;
  if (x >= y) {
    const double gamma = total - f.alpha_prime;
    const double d = x - y;
    const double tail =
        gamma >= 0.0 ? std::exp(-f.alpha_prime * x - gamma * y) * phi(gamma, d)
                     : std::exp(-total * x) * phi(-gamma, d);
    return std::exp(-total * x) + f.beta * tail;
  }
  const double delta = total - f.beta_prime;
  const double d = y - x;
  const double tail = delta >= 0.0 ? std::exp(-f.beta_prime * y - delta * x) * phi(delta, d)
                                   : std::exp(-total * y) * phi(-delta, d);
  return std::exp(-total * y) + f.alpha * tail;
}

// CDF from the survival function of a bivariate law via its margins.
template <class Survival>
double bivariate_cdf(Survival&& sbar, double x, double y) {
  if (x < 0.0 || y < 0.0) return 0.0;
  if (std::isinf(x) && std::isinf(y)) return 1.0;
  if (std::isinf(y)) return 1.0 - sbar(x, 0.0);
  if (std::isinf(x)) return 1.0 - sbar(0.0, y);
  const double v = 1.0 - sbar(x, 0.0) - sbar(0.0, y) + sbar(x, y);
  return std::clamp(v, 0.0, 1.0);
}

void append_shifted(std::vector<double>& out, const std::vector<double>& pts, double shift) {
  for (double p : pts) out.push_back(p + shift);
}

double trivariate_closed_form(const TrivariateGamma& t, std::size_t levels, double s1, double s2,
                              double s3) {
  const double c = t.a * t.a + t.b * t.b;
  const double a2 = t.a * t.a;
  const double b2 = t.b * t.b;
  const double lg_alpha = boost::math::lgamma(t.alpha);
  double sum = 0.0;
  for (std::size_t n = 0; n < levels; ++n) {
    const double level = boost::math::lgamma(n + t.alpha) - lg_alpha - boost::math::lgamma(n + 1.0);
    for (std::size_t l = 0; l <= n; ++l) {
      const double log_binom = boost::math::lgamma(n + 1.0) - boost::math::lgamma(l + 1.0) -
                               boost::math::lgamma(n - l + 1.0);
      double log_term = level + log_binom - l * std::log1p(s1) - n * std::log1p(s2) -
                        (n - l) * std::log1p(s3);
      if (l > 0) log_term += l * std::log(a2);
      if (n > l) log_term += (n - l) * std::log(b2);
      sum += std::exp(log_term);
    }
  }
  const double prefactor =
      std::pow((1.0 - c) / ((1.0 + s1) * (1.0 + s2) * (1.0 + s3)), t.alpha);
  return prefactor * sum;
}

}  // namespace

BlmSpec make_blm_spec(Distribution1D f, Distribution1D g, double theta) {
  require_positive(theta, "blm: theta");
  if (f.cdf(0.0) > 0.0 || g.cdf(0.0) > 0.0) {
    throw Error(ErrorCode::ParameterOutOfRange, "blm: F and G must put no mass at 0");
  }
  const double f0 = f.density_at_zero();
  const double g0 = g.density_at_zero();
  if (std::isnan(f0) || std::isnan(g0)) {
    throw Error(ErrorCode::ParameterOutOfRange, "blm: f(0) or g(0) is not available");
  }
  const double p = (f0 + g0) / theta - 1.0;
  if (!(p >= -1e-9 && p <= 1.0 + 1e-9)) {
    throw Error(ErrorCode::ParameterOutOfRange,
                "blm: singular mass p(theta) = (f(0)+g(0))/theta - 1 = " + std::to_string(p) +
                    " must lie in [0,1]");
  }
  return BlmSpec{std::move(f), std::move(g), theta, std::clamp(p, 0.0, 1.0)};
}

double blm_survival(const BlmSpec& spec, double x, double y) {
  if (std::isinf(x) || std::isinf(y)) return 0.0;
  x = clamp0(x);
  y = clamp0(y);
  if (x >= y) return std::exp(-spec.theta * y) * spec.f.survival(x - y);
  return std::exp(-spec.theta * x) * spec.g.survival(y - x);
}

JointDist::JointDist(JointKind kind) : kind_(std::move(kind)) {
  std::visit(Overloaded{
                 [&](const ProductLaw& p) {
                   if (p.factors.size() > 4) {
                     throw Error(ErrorCode::DimensionTooLarge, "product: at most 4 factors");
                   }
                   if (p.factors.size() < 2) {
                     throw Error(ErrorCode::ParameterOutOfRange, "product: needs at least 2 factors");
                   }
                   dim_ = p.factors.size();
                 },
                 [&](const MarshallOlkin& m) {
                   require_positive(m.lambda1, "marshall-olkin: lambda1");
                   require_positive(m.lambda2, "marshall-olkin: lambda2");
                   require_positive(m.lambda12, "marshall-olkin: lambda12");
                 },
                 [&](const Freund& f) {
                   require_positive(f.alpha, "freund: alpha");
                   require_positive(f.alpha_prime, "freund: alpha_prime");
                   require_positive(f.beta, "freund: beta");
                   require_positive(f.beta_prime, "freund: beta_prime");
                 },
                 [&](const MoranDownton& m) {
                   mixture_ = std::make_shared<detail::GammaMixture>(detail::make_moran_downton(m.r));
                 },
                 [&](const BlmSpec& b) {
                   // re-derive so hand-built specs get the same checks
                   auto checked = make_blm_spec(b.f, b.g, b.theta);
                   std::get<BlmSpec>(kind_).singular_mass = checked.singular_mass;
                 },
                 [&](const BivariateGamma& g) {
                   mixture_ = std::make_shared<detail::GammaMixture>(
                       detail::make_bivariate_gamma(g.r, g.q));
                 },
                 [&](const TrivariateGamma& t) {
                   mixture_ = std::make_shared<detail::GammaMixture>(
                       detail::make_trivariate_gamma(t.alpha, t.a, t.b));
                   dim_ = 3;
                 },
             },
             kind_);
}

std::string JointDist::kind_name() const {
  return std::visit(Overloaded{
                        [](const ProductLaw&) { return "product"; },
                        [](const MarshallOlkin&) { return "marshall-olkin"; },
                        [](const Freund&) { return "freund"; },
                        [](const MoranDownton&) { return "moran-downton"; },
                        [](const BlmSpec&) { return "blm"; },
                        [](const BivariateGamma&) { return "bivariate-gamma"; },
                        [](const TrivariateGamma&) { return "trivariate-gamma"; },
                    },
                    kind_);
}

double JointDist::cdf(std::span<const double> x) const {
  if (x.size() != dim_) throw Error(ErrorCode::InvalidArgument, "coordinate count != dim");
  for (double v : x) {
    if (std::isnan(v)) throw Error(ErrorCode::InvalidArgument, "cdf at NaN");
    if (v < 0.0) return 0.0;
  }
  return std::visit(
      Overloaded{
          [&](const ProductLaw& p) {
            double v = 1.0;
            for (std::size_t i = 0; i < dim_; ++i) v *= p.factors[i].cdf(x[i]);
            return v;
          },
          [&](const MarshallOlkin& m) {
            return bivariate_cdf([&](double a, double b) { return mo_survival(m, a, b); }, x[0], x[1]);
          },
          [&](const Freund& f) {
            return bivariate_cdf([&](double a, double b) { return freund_survival(f, a, b); }, x[0],
                                 x[1]);
          },
          [&](const BlmSpec& b) {
            if (std::isinf(x[0]) && std::isinf(x[1])) return 1.0;
            if (std::isinf(x[1])) return b.f.cdf(x[0]);
            if (std::isinf(x[0])) return b.g.cdf(x[1]);
            const double v = b.f.cdf(x[0]) - b.g.survival(x[1]) + blm_survival(b, x[0], x[1]);
            return std::clamp(v, 0.0, 1.0);
          },
          [&](const auto&) { return mixture_->cdf(x); },
      },
      kind_);
}

double JointDist::survival(std::span<const double> x) const {
  if (x.size() != dim_) throw Error(ErrorCode::InvalidArgument, "coordinate count != dim");
  for (double v : x) {
    if (std::isnan(v)) throw Error(ErrorCode::InvalidArgument, "survival at NaN");
  }
  return std::visit(Overloaded{
                        [&](const ProductLaw& p) {
                          double v = 1.0;
                          for (std::size_t i = 0; i < dim_; ++i) v *= p.factors[i].survival(x[i]);
                          return v;
                        },
                        [&](const MarshallOlkin& m) { return mo_survival(m, x[0], x[1]); },
                        [&](const Freund& f) { return freund_survival(f, x[0], x[1]); },
                        [&](const BlmSpec& b) { return blm_survival(b, x[0], x[1]); },
                        [&](const auto&) { return mixture_->survival(x); },
                    },
                    kind_);
}

double JointDist::marginal_cdf(std::span<const std::size_t> axes, std::span<const double> x) const {
  if (axes.size() != x.size()) throw Error(ErrorCode::InvalidArgument, "axes and coordinates differ in length");
  std::vector<double> full(dim_, kInf);
  for (std::size_t i = 0; i < axes.size(); ++i) {
    if (axes[i] >= dim_) {
      throw Error(ErrorCode::MissingMarginal, "no axis " + std::to_string(axes[i]) + " in a " +
                                                  std::to_string(dim_) + "-dimensional law");
    }
    full[axes[i]] = x[i];
  }
  return cdf(full);
}

bool JointDist::has_closed_form() const {
  return std::visit(Overloaded{
                        [](const ProductLaw& p) {
                          return std::all_of(p.factors.begin(), p.factors.end(),
                                             [](const Distribution1D& d) { return d.has_closed_form(); });
                        },
                        [](const BlmSpec& b) { return b.f.has_closed_form() && b.g.has_closed_form(); },
                        [](const auto&) { return true; },
                    },
                    kind_);
}

std::optional<ClosedFormValue> JointDist::closed_form_ls(std::span<const double> s) const {
  if (s.size() != dim_) throw Error(ErrorCode::InvalidArgument, "argument count != dim");
  if (!has_closed_form()) return std::nullopt;
  return std::visit(
      Overloaded{
          [&](const ProductLaw& p) {
            double v = 1.0;
            for (std::size_t i = 0; i < dim_; ++i) v *= *p.factors[i].closed_form_ls(s[i]);
            return ClosedFormValue{v, 0.0};
          },
          [&](const MarshallOlkin& m) {
            const double lam = m.lambda1 + m.lambda2 + m.lambda12;
            const double a = m.lambda1 + m.lambda12;
            const double b = m.lambda2 + m.lambda12;
            const double num = (lam + s[0] + s[1]) * a * b + s[0] * s[1] * m.lambda12;
            const double den = (lam + s[0] + s[1]) * (a + s[0]) * (b + s[1]);
            return ClosedFormValue{num / den, 0.0};
          },
          [&](const Freund& f) {
            const double v = (f.alpha_prime * f.beta / (f.alpha_prime + s[0]) +
                              f.alpha * f.beta_prime / (f.beta_prime + s[1])) /
                             (f.alpha + f.beta + s[0] + s[1]);
            return ClosedFormValue{v, 0.0};
          },
          [&](const MoranDownton& m) {
            return ClosedFormValue{1.0 / ((1.0 + s[0]) * (1.0 + s[1]) - m.r * s[0] * s[1]), 0.0};
          },
          [&](const BlmSpec& b) {
            const double th = b.theta;
            const double v = ((th + s[0]) * *b.f.closed_form_ls(s[0]) +
                              (th + s[1]) * *b.g.closed_form_ls(s[1]) - th) /
                             (th + s[0] + s[1]);
            return ClosedFormValue{v, 0.0};
          },
          [&](const BivariateGamma& g) {
            const double v =
                std::pow((1.0 - g.r) / (1.0 - g.r + s[0] + s[1] + s[0] * s[1]), g.q);
            return ClosedFormValue{v, 0.0};
          },
          [&](const TrivariateGamma& t) {
            return ClosedFormValue{trivariate_closed_form(t, mixture_->levels(), s[0], s[1], s[2]),
                                   mixture_->tail_bound()};
          },
      },
      kind_);
}

std::vector<double> JointDist::seams(std::size_t axis, std::span<const double> coords) const {
  std::vector<double> out;
  std::visit(Overloaded{
                 [&](const ProductLaw& p) { out = p.factors[axis].breakpoints(); },
                 [&](const MarshallOlkin&) {
                   if (axis == 1 && std::isfinite(coords[0])) out.push_back(coords[0]);
                 },
                 [&](const Freund&) {
                   if (axis == 1 && std::isfinite(coords[0])) out.push_back(coords[0]);
                 },
                 [&](const BlmSpec& b) {
                   const auto fb = b.f.breakpoints();
                   const auto gb = b.g.breakpoints();
                   if (axis == 0) {
                     out = fb;
                     return;
                   }
                   out = gb;
                   if (std::isfinite(coords[0])) {
                     const double x = coords[0];
                     out.push_back(x);
                     for (double a : fb) out.push_back(x - a);
                     append_shifted(out, gb, x);
                   }
                 },
                 [&](const auto&) {},
             },
             kind_);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace stieltjes
