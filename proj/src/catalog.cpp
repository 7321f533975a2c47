#include "stieltjes/catalog.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>

#include <boost/math/special_functions/gamma.hpp>

#include "stieltjes/error.hpp"

namespace stieltjes {

namespace {

class ParamReader {
 public:
  ParamReader(const std::string& kind, const Params& params) : kind_(kind), params_(params) {}

  double get(const std::string& key) {
    seen_.insert(key);
    auto it = params_.find(key);
    if (it == params_.end()) {
      throw Error(ErrorCode::ParameterOutOfRange, kind_ + ": missing parameter '" + key + "'");
    }
    if (!std::isfinite(it->second)) {
      throw Error(ErrorCode::ParameterOutOfRange, kind_ + ": parameter '" + key + "' must be finite");
    }
    return it->second;
  }

  void finish() const {
    for (const auto& [key, value] : params_) {
      if (!seen_.count(key)) {
        throw Error(ErrorCode::ParameterOutOfRange, kind_ + ": unknown parameter '" + key + "'");
      }
    }
  }

 private:
  std::string kind_;
  const Params& params_;
  std::set<std::string> seen_;
};

void expect_components(const std::string& kind, const std::vector<Distribution1D>& comps,
                       std::size_t lo, std::size_t hi) {
  if (comps.size() < lo || comps.size() > hi) {
    throw Error(ErrorCode::ParameterOutOfRange,
                kind + ": expects " + std::to_string(lo) +
                    (lo == hi ? "" : "-" + std::to_string(hi)) + " component laws, got " +
                    std::to_string(comps.size()));
  }
}

}  // namespace

std::size_t dimension(const AnyDistribution& dist) {
  if (const auto* j = std::get_if<JointDist>(&dist)) return j->dim();
  return 1;
}

const std::vector<CatalogEntry>& catalog_entries() {
  static const std::vector<CatalogEntry> entries = {
      {"exponential", {"lambda"}, "", "lambda > 0"},
      {"gamma", {"lambda", "q"}, "", "lambda > 0, q > 0"},
      {"positive-stable", {"alpha"}, "", "0 < alpha < 1"},
      {"point-mass", {"location"}, "", "location >= 0"},
      {"product", {}, "2-4 univariate laws", ""},
      {"marshall-olkin", {"lambda1", "lambda2", "lambda12"}, "", "all > 0"},
      {"freund", {"alpha", "alpha_prime", "beta", "beta_prime"}, "", "all > 0"},
      {"moran-downton", {"r"}, "", "0 <= r < 1"},
      {"blm", {"theta"}, "F, G", "theta > 0, 0 <= (f(0)+g(0))/theta - 1 <= 1"},
      {"bivariate-gamma", {"r", "q"}, "", "0 <= r < 1, q > 0"},
      {"trivariate-gamma", {"alpha", "a", "b"}, "", "alpha, a, b > 0, a^2 + b^2 < 1"},
  };
  return entries;
}

AnyDistribution make_catalog(const std::string& name, const Params& params,
                             std::vector<Distribution1D> components) {
  ParamReader p(name, params);
  auto no_components = [&] { expect_components(name, components, 0, 0); };

  if (name == "exponential") {
    no_components();
    const double lambda = p.get("lambda");
    p.finish();
    return Distribution1D::exponential(lambda);
  }
  if (name == "gamma") {
    no_components();
    const double lambda = p.get("lambda");
    const double q = p.get("q");
    p.finish();
    return Distribution1D::gamma(lambda, q);
  }
  if (name == "positive-stable") {
    no_components();
    const double alpha = p.get("alpha");
    p.finish();
    return Distribution1D::positive_stable(alpha);
  }
  if (name == "point-mass") {
    no_components();
    const double loc = p.get("location");
    p.finish();
    return Distribution1D::point_mass(loc);
  }
  if (name == "product") {
    p.finish();
    expect_components(name, components, 2, 4);
    return JointDist(ProductLaw{std::move(components)});
  }
  if (name == "marshall-olkin") {
    no_components();
    MarshallOlkin m{p.get("lambda1"), p.get("lambda2"), p.get("lambda12")};
    p.finish();
    return JointDist(m);
  }
  if (name == "freund") {
    no_components();
    Freund f{p.get("alpha"), p.get("alpha_prime"), p.get("beta"), p.get("beta_prime")};
    p.finish();
    return JointDist(f);
  }
  if (name == "moran-downton") {
    no_components();
    MoranDownton m{p.get("r")};
    p.finish();
    return JointDist(m);
  }
  if (name == "blm") {
    const double theta = p.get("theta");
    p.finish();
    expect_components(name, components, 2, 2);
    return JointDist(make_blm_spec(components[0], components[1], theta));
  }
  if (name == "bivariate-gamma") {
    no_components();
    BivariateGamma g{p.get("r"), p.get("q")};
    p.finish();
    return JointDist(g);
  }
  if (name == "trivariate-gamma") {
    no_components();
    TrivariateGamma t{p.get("alpha"), p.get("a"), p.get("b")};
    p.finish();
    return JointDist(t);
  }
  throw Error(ErrorCode::UnknownCatalogName, "unknown catalog name '" + name + "'");
}

StableSeries positive_stable_density(double alpha, double x, int terms) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw Error(ErrorCode::ParameterOutOfRange, "positive-stable: alpha must lie in (0,1)");
  }
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw Error(ErrorCode::InvalidArgument, "positive-stable density needs finite x > 0");
  }
  if (terms < 1) throw Error(ErrorCode::InvalidArgument, "terms must be >= 1");

  const double log_x = std::log(x);
  // |term_k| <= envelope_k = Gamma(alpha k + 1) / k! * x^(-alpha k); the sine
  // factor is left out so exact zeros of sin(alpha k pi) do not fake convergence.
  auto log_envelope = [&](int k) {
    return boost::math::lgamma(alpha * k + 1.0) - boost::math::lgamma(k + 1.0) - alpha * k * log_x;
  };

  double sum = 0.0;
  double prev = -std::numeric_limits<double>::infinity();
  double last = prev;
  int used = 0;
  bool converged = false;
  for (int k = 1; k <= terms; ++k) {
    prev = last;
    last = log_envelope(k);
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    sum += sign * std::exp(last) * std::sin(alpha * k * std::numbers::pi);
    used = k;
    if (!std::isfinite(sum)) break;
    if (std::exp(last) < 1e-16 * std::abs(sum)) {
      converged = true;
      break;
    }
  }
  if (!std::isfinite(sum) || (!converged && used > 1 && last > prev)) {
    throw Error(ErrorCode::SeriesDiverged,
                "stable density series still growing after " + std::to_string(used) +
                    " terms at x=" + std::to_string(x));
  }
  StableSeries out;
  out.value = -sum / (std::numbers::pi * x);
  out.error_bound = std::exp(log_envelope(used + 1)) / (std::numbers::pi * x);
  out.terms_used = used;
  return out;
}

double inclusion_exclusion_survival(const JointDist& joint, std::span<const double> x) {
  const std::size_t d = joint.dim();
  if (x.size() != d) throw Error(ErrorCode::InvalidArgument, "coordinate count != dim");
  double total = 1.0;
  std::vector<std::size_t> axes;
  std::vector<double> coords;
  for (unsigned mask = 1; mask < (1u << d); ++mask) {
    axes.clear();
    coords.clear();
    for (std::size_t i = 0; i < d; ++i) {
      if (mask & (1u << i)) {
        axes.push_back(i);
        coords.push_back(x[i]);
      }
    }
    const double sign = (axes.size() % 2 == 1) ? -1.0 : 1.0;
    total += sign * joint.marginal_cdf(axes, coords);
  }
  return std::clamp(total, 0.0, 1.0);
}

}  // namespace stieltjes
