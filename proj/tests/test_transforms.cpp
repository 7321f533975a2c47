#include <array>
#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "stieltjes/catalog.hpp"
#include "stieltjes/error.hpp"
#include "stieltjes/transforms.hpp"

using namespace stieltjes;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an exception");
  return ErrorCode::InvalidArgument;
}

JointDist joint(const std::string& name, const Params& p, std::vector<Distribution1D> c = {}) {
  return std::get<JointDist>(make_catalog(name, p, std::move(c)));
}

TransformOptions with_tol(double tol) {
  TransformOptions o;
  o.tol = tol;
  return o;
}

double cantor_cdf(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  double out = 0.0;
  double scale = 0.5;
  for (int i = 0; i < 60; ++i) {
    x *= 3.0;
    const int digit = static_cast<int>(x);
    x -= digit;
    if (digit == 1) return out + scale;
    if (digit == 2) out += scale;
    scale *= 0.5;
  }
  return out;
}

double cantor_transform(double s) {
  double out = std::exp(-s / 2.0);  // symmetric about 1/2
  double p = 1.0;
  for (int k = 1; k < 60; ++k) p *= std::cosh(s / std::pow(3.0, k));
  return out * p;
}

Distribution1D cantor(bool with_transform = true) {
  CdfOnly law{"cantor", cantor_cdf, nullptr, {1.0 / 3.0, 2.0 / 3.0, 1.0}};
  if (with_transform) law.transform = cantor_transform;
  return Distribution1D::from_cdf(law);
}

// Closed form of the BLM transform with the margins' transforms plugged in.
double blm_formula(double theta, double lf, double lg, double s, double t) {
  return ((theta + s) * lf + (theta + t) * lg - theta) / (theta + s + t);
}

}  // namespace

TEST_CASE("route names") {
  CHECK(parse_route("closed") == Route::ClosedForm);
  CHECK(parse_route("closed_form") == Route::ClosedForm);
  CHECK(parse_route("auto") == Route::Auto);
  CHECK(to_string(Route::Carson) == "carson");
  CHECK(code_of([] { parse_route("bromwich"); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("ls_direct examples") {
  const auto e = ls_direct(Distribution1D::exponential(1), 2.0);
  CHECK(std::abs(e.value - 1.0 / 3.0) <= 1e-10);
  CHECK(e.est_error <= 1e-10);
  CHECK(e.route == Route::Direct);
  CHECK(ls_direct(Distribution1D::point_mass(0), 7.0).value == 1.0);
  CHECK(std::abs(ls_direct(Distribution1D::gamma(2, 3), 2.0).value - 0.125) <= 1e-10);
}

TEST_CASE("ls_carson examples") {
  const auto e = ls_carson(Distribution1D::exponential(1), 2.0);
  CHECK(std::abs(e.value - 1.0 / 3.0) <= 1e-8);
  CHECK(std::abs(e.value - ls_direct(Distribution1D::exponential(1), 2.0).value) <= 1e-8);
  const auto pm = ls_carson(Distribution1D::point_mass(0), 5.0);
  CHECK(std::abs(pm.value - 1.0) <= pm.est_error);
  CHECK(pm.est_error <= 1e-10);

  const auto blm = joint("blm", {{"theta", 4}}, {Distribution1D::exponential(2), Distribution1D::exponential(2)});
  const std::array<double, 2> s{2, 3};
  const auto v = ls_carson(blm, s);
  CHECK(std::abs(v.value - blm_formula(4, 2.0 / 4.0, 2.0 / 5.0, 2, 3)) <= 1e-6);
  CHECK(std::abs(v.value - 0.2) <= 1e-6);
}

TEST_CASE("ls_survival_route examples") {
  const auto prod = joint("product", {}, {Distribution1D::exponential(1), Distribution1D::exponential(1)});
  CHECK(std::abs(ls_survival_route(prod, 1, 1).value - 0.25) <= 1e-8);

  const auto mo = joint("marshall-olkin", {{"lambda1", 1}, {"lambda2", 1}, {"lambda12", 1}});
  const auto v = ls_survival_route(mo, 2, 3);
  // lambda = 3: [(lambda+s+t)(lambda1+lambda12)(lambda2+lambda12) + s t lambda12]
  //   / [(lambda+s+t)(lambda1+lambda12+s)(lambda2+lambda12+t)]
  const double expected = (8.0 * 2 * 2 + 6.0) / (8.0 * 4 * 5);
  CHECK(std::abs(v.value - expected) <= 1e-8);
  CHECK(v.route == Route::Survival);

  const auto exp1 = Distribution1D::exponential(1);
  const auto u = ls_survival_route(exp1, 1.0);
  CHECK(std::abs((1.0 - u.value) / 1.0 - 0.5) <= 1e-10);
}

TEST_CASE("closed_form_ls examples") {
  const std::array<double, 2> one{1, 1};
  CHECK(std::abs(closed_form_ls(joint("moran-downton", {{"r", 0}}), one).value - 0.25) <= 1e-15);
  const auto fr = joint("freund", {{"alpha", 1}, {"alpha_prime", 2}, {"beta", 1}, {"beta_prime", 2}});
  // the Freund transform at (1,1), from integrating its density directly
  auto f = [](double x, double y) { return std::exp(-x - y) * oracle::freund_density(1, 2, 1, 2, x, y); };
  const double oracle = oracle::integrate(
      [&](double x) {
        return oracle::integrate([&](double y) { return f(x, y); }, 0, x) +
               oracle::integrate([&](double y) { return f(x, y); }, x, 40);
      },
      0, 40);
  CHECK(std::abs(closed_form_ls(fr, one).value - oracle) <= 1e-10);
  CHECK(std::abs(closed_form_ls(fr, one).value - 1.0 / 3.0) <= 1e-14);
  const std::array<double, 2> st{2, 3};
  CHECK(std::abs(closed_form_ls(joint("bivariate-gamma", {{"r", 0}, {"q", 1}}), st).value - 1.0 / 12.0) <=
        1e-15);
  const auto cdf_only = cantor(false);
  CHECK(code_of([&] { closed_form_ls(cdf_only, 1.0); }) == ErrorCode::NoClosedForm);
}

TEST_CASE("verify_identity examples") {
  const std::array<double, 1> s1{1};
  const auto r1 = verify_identity(AnyDistribution{Distribution1D::exponential(1)}, s1, 1e-8);
  CHECK(r1.pass);
  CHECK(std::abs(r1.reference - 0.5) <= 1e-14);
  CHECK(std::abs(r1.carson - 0.5) <= 1e-8);
  CHECK(std::abs(r1.rhs_survival - 0.5) <= 1e-8);

  const AnyDistribution prod = joint(
      "product", {}, {Distribution1D::exponential(1), Distribution1D::exponential(1), Distribution1D::exponential(1)});
  const std::array<double, 3> s3{1, 1, 1};
  const auto r3 = verify_identity(prod, s3, 1e-6);
  CHECK(r3.pass);
  CHECK(r3.expanded);
  // E[prod (1 - exp(-X_i))] = (1/2)^3
  CHECK(std::abs(r3.lhs_reference - 0.125) <= 1e-12);

  const AnyDistribution mo = joint("marshall-olkin", {{"lambda1", 1}, {"lambda2", 1}, {"lambda12", 1}});
  const std::array<double, 2> s2{2, 3};
  const auto r2 = verify_identity(mo, s2, 1e-6);
  CHECK(r2.pass);
  CHECK(r2.identity_gap <= 1e-6);
  CHECK(r2.survival_gap <= 1e-6);
  CHECK(r2.expansion_gap <= 1e-6);
}

TEST_CASE("verify_identity covers singular and four-dimensional laws") {
  const AnyDistribution blm =
      joint("blm", {{"theta", 3.2}}, {Distribution1D::exponential(3), Distribution1D::exponential(1)});
  const std::array<double, 2> s2{0.7, 1.9};
  CHECK(verify_identity(blm, s2, 1e-6).pass);

  const AnyDistribution tri = joint("trivariate-gamma", {{"alpha", 1.5}, {"a", 0.4}, {"b", 0.3}});
  const std::array<double, 3> s3{1.0, 0.5, 2.0};
  const auto r = verify_identity(tri, s3, 1e-5);
  CHECK(r.pass);
  CHECK(r.expanded);

  const AnyDistribution four = joint("product", {},
                                     {Distribution1D::exponential(1), Distribution1D::exponential(2),
                                      Distribution1D::exponential(3), Distribution1D::point_mass(0.5)});
  const std::array<double, 4> s4{1, 1, 1, 1};
  const auto r4 = verify_identity(four, s4, 1e-4);
  CHECK(r4.pass);
  CHECK_FALSE(r4.expanded);
}

TEST_CASE("singular-continuous law goes through carson only") {
  const auto c = cantor();
  CHECK(code_of([&] { ls_direct(c, 1.0); }) == ErrorCode::NoDensityRoute);
  for (double s : {0.5, 1.0, 3.0}) {
    const auto v = ls_carson(c, s, with_tol(1e-7));
    CHECK(std::abs(v.value - cantor_transform(s)) <= 1e-6);
    const auto w = ls_survival_route(c, s, with_tol(1e-7));
    CHECK(std::abs(w.value - cantor_transform(s)) <= 1e-6);
  }
}

TEST_CASE("argument checks") {
  const auto e = Distribution1D::exponential(1);
  CHECK(code_of([&] { ls_carson(e, 0.0); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([&] { ls_carson(e, 1.0, with_tol(0.1)); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([&] { ls_carson(e, 1.0, with_tol(0.0)); }) == ErrorCode::InvalidArgument);
  const std::array<double, 2> two{1, 1};
  const AnyDistribution any_e = e;
  CHECK(code_of([&] { transform(any_e, two, Route::Auto); }) == ErrorCode::InvalidArgument);

  CHECK(code_of([&] { JointDist(ProductLaw{{e, e, e, e, e}}); }) == ErrorCode::DimensionTooLarge);
}

TEST_CASE("truncation override") {
  TransformOptions o;
  o.tol = 1e-6;
  o.truncation = 1.0;
  const auto v = ls_carson(Distribution1D::exponential(1), 1.0, o);
  // 1 * integral_0^1 (1 - e^-x) e^-x dx
  const double expected = oracle::integrate([](double x) { return -std::expm1(-x) * std::exp(-x); }, 0, 1);
  CHECK(std::abs(v.value - expected) <= 1e-9);
  CHECK(v.est_error >= std::exp(-1.0));
}

TEST_CASE("auto route") {
  const std::array<double, 2> s{1, 2};
  const AnyDistribution mo = joint("marshall-olkin", {{"lambda1", 1}, {"lambda2", 2}, {"lambda12", 1}});
  CHECK(transform(mo, s, Route::Auto).route == Route::ClosedForm);
  const std::array<double, 1> s1{1};
  const AnyDistribution c = cantor();
  CHECK(transform(c, s1, Route::Auto).route == Route::ClosedForm);
  const AnyDistribution m = Distribution1D::mixture({{0.5, Distribution1D::exponential(1)}, {0.5, cantor(false)}});
  const auto v = transform(m, s1, Route::Auto, with_tol(1e-7));
  CHECK(v.route == Route::Carson);
  CHECK(std::abs(v.value - 0.5 * (0.5 + cantor_transform(1))) <= 1e-6);
}

TEST_CASE("routes agree on random arguments") {
  std::mt19937_64 rng(11);
  std::vector<AnyDistribution> laws{
      Distribution1D::exponential(1),
      Distribution1D::gamma(2, 3),
      Distribution1D::gamma(0.7, 0.5),
      Distribution1D::positive_stable(0.5),
      Distribution1D::mixture({{0.3, Distribution1D::point_mass(0.5)}, {0.7, Distribution1D::exponential(1.5)}}),
      joint("marshall-olkin", {{"lambda1", 0.3}, {"lambda2", 2}, {"lambda12", 0.7}}),
      joint("freund", {{"alpha", 2}, {"alpha_prime", 0.5}, {"beta", 1}, {"beta_prime", 4}}),
      joint("moran-downton", {{"r", 0.6}}),
      joint("blm", {{"theta", 3}}, {Distribution1D::exponential(2), Distribution1D::exponential(2)}),
      joint("bivariate-gamma", {{"r", 0.5}, {"q", 2.5}}),
      joint("product", {}, {Distribution1D::exponential(1), Distribution1D::gamma(2, 3)}),
  };
  const auto opt = with_tol(1e-8);
  for (const auto& law : laws) {
    const std::size_t d = dimension(law);
    for (int trial = 0; trial < 20; ++trial) {
      const auto s = oracle::uniform_points(rng, d, 0.1, 10);
      std::vector<TransformValue> values;
      for (Route r : {Route::Direct, Route::Carson, Route::Survival, Route::ClosedForm}) {
        try {
          values.push_back(transform(law, s, r, opt));
        } catch (const Error& e) {
          REQUIRE((e.code() == ErrorCode::NoDensityRoute || e.code() == ErrorCode::NoClosedForm));
        }
      }
      REQUIRE(values.size() >= 2);
      for (const auto& v : values) CHECK(v.est_error <= opt.tol);
      for (std::size_t i = 0; i < values.size(); ++i) {
        for (std::size_t j = i + 1; j < values.size(); ++j) {
          const double allowed = 10.0 * (values[i].est_error + values[j].est_error);
          INFO("dim " << d << " s0 " << s[0] << " routes " << to_string(values[i].route) << "/"
                      << to_string(values[j].route));
          CHECK(std::abs(values[i].value - values[j].value) <= allowed);
        }
      }
    }
  }
}

TEST_CASE("trivariate routes agree") {
  std::mt19937_64 rng(5);
  const AnyDistribution tri = joint("trivariate-gamma", {{"alpha", 1}, {"a", 0.5}, {"b", 0.5}});
  const auto opt = with_tol(1e-6);
  for (int trial = 0; trial < 3; ++trial) {
    const auto s = oracle::uniform_points(rng, 3, 0.1, 10);
    const auto a = transform(tri, s, Route::ClosedForm, opt);
    const auto b = transform(tri, s, Route::Carson, opt);
    CHECK(std::abs(a.value - b.value) <= 10.0 * (a.est_error + b.est_error));
  }
}

TEST_CASE("complete monotonicity of univariate transforms") {
  const std::vector<Distribution1D> laws{
      Distribution1D::exponential(1), Distribution1D::gamma(2, 3), Distribution1D::positive_stable(0.5),
      Distribution1D::mixture({{0.3, Distribution1D::point_mass(0.5)}, {0.7, Distribution1D::exponential(1.5)}}),
      cantor()};
  for (const auto& law : laws) {
    const auto opt = with_tol(law.has_density() ? 1e-10 : 1e-7);
    std::vector<double> v;
    for (int i = 0; i <= 45; ++i) v.push_back(ls_carson(law, 0.5 + 0.1 * i, opt).value);
    for (int k = 0; k <= 3; ++k) {
      for (double d : v) CHECK(((k % 2 == 0) ? d : -d) >= -1e-8);
      std::vector<double> next;
      for (std::size_t i = 0; i + 1 < v.size(); ++i) next.push_back(v[i + 1] - v[i]);
      v = next;
    }
  }
}

TEST_CASE("transform tends to one at the origin and decreases in each coordinate") {
  const auto opt = with_tol(1e-6);
  for (const auto& law : {Distribution1D::exponential(1), Distribution1D::gamma(2, 3), Distribution1D::gamma(0.7, 0.5)}) {
    CHECK(std::abs(ls_direct(law, 1e-6, opt).value - 1.0) <= 1e-4);
    CHECK(std::abs(ls_carson(law, 1e-6, opt).value - 1.0) <= 1e-4);
  }
  const auto mo = joint("marshall-olkin", {{"lambda1", 1}, {"lambda2", 2}, {"lambda12", 1}});
  const std::array<double, 2> tiny{1e-6, 1e-6};
  CHECK(std::abs(ls_carson(mo, tiny, opt).value - 1.0) <= 1e-4);

  const auto md = joint("moran-downton", {{"r", 0.6}});
  double prev_row = 2.0;
  for (double s : {0.2, 0.5, 1.0, 2.0, 5.0}) {
    double prev = 2.0;
    for (double t : {0.2, 0.5, 1.0, 2.0, 5.0}) {
      const std::array<double, 2> st{s, t};
      const double v = ls_carson(md, st, opt).value;
      CHECK(v <= prev);
      prev = v;
    }
    const std::array<double, 2> st{s, 0.2};
    const double first = ls_carson(md, st, opt).value;
    CHECK(first <= prev_row);
    prev_row = first;
  }
}

TEST_CASE("exponential scaling") {
  const auto unit = Distribution1D::exponential(1);
  for (double lambda : {0.25, 2.0, 7.0}) {
    const auto e = Distribution1D::exponential(lambda);
    for (double s : {0.3, 1.0, 4.0}) {
      CHECK(std::abs(ls_carson(e, s).value - ls_carson(unit, s / lambda).value) <= 1e-9);
      CHECK(std::abs(ls_direct(e, s).value - ls_direct(unit, s / lambda).value) <= 1e-9);
    }
  }
}

TEST_CASE("value stays within the unit interval") {
  std::mt19937_64 rng(3);
  const auto md = joint("moran-downton", {{"r", 0.9}});
  for (int i = 0; i < 10; ++i) {
    const auto s = oracle::uniform_points(rng, 2, 0.1, 10);
    const auto v = ls_carson(md, s, with_tol(1e-8));
    CHECK(v.value >= -v.est_error);
    CHECK(v.value <= 1.0 + v.est_error);
  }
}
