#include <array>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "stieltjes/catalog.hpp"
#include "stieltjes/error.hpp"
#include "stieltjes/fingerprint.hpp"

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

double mo_formula(double l1, double l2, double l12, double s, double t) {
  const double l = l1 + l2 + l12;
  return ((l + s + t) * (l1 + l12) * (l2 + l12) + s * t * l12) / ((l + s + t) * (l1 + l12 + s) * (l2 + l12 + t));
}

const AnyDistribution kExp1 = Distribution1D::exponential(1);

}  // namespace

TEST_CASE("fingerprint examples") {
  const auto fp = compute_fingerprint(kExp1, MuntzSequence::primes(), 3);
  REQUIRE(fp.values.size() == 3);
  CHECK(std::abs(fp.values[0].value - 1.0 / 3.0) <= 1e-10);
  CHECK(std::abs(fp.values[1].value - 1.0 / 4.0) <= 1e-10);
  CHECK(std::abs(fp.values[2].value - 1.0 / 6.0) <= 1e-10);

  for (const auto& v : compute_fingerprint(AnyDistribution{Distribution1D::point_mass(0)}, MuntzSequence::integers(), 6).values) {
    CHECK(v.value == 1.0);
  }
  const AnyDistribution zero2 = joint("product", {}, {Distribution1D::point_mass(0), Distribution1D::point_mass(0)});
  for (const auto& v : compute_fingerprint(zero2, MuntzSequence::primes(), 4).values) CHECK(v.value == 1.0);

  const AnyDistribution mo = joint("marshall-olkin", {{"lambda1", 1}, {"lambda2", 1}, {"lambda12", 1}});
  const auto m = compute_fingerprint(mo, MuntzSequence::primes(), 2);
  CHECK(m.shape() == std::vector<std::size_t>{2, 2});
  const double p[2] = {2, 3};
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 2; ++j) {
      const std::array<std::size_t, 2> idx{i, j};
      CHECK(std::abs(m.values[m.offset(idx)].value - mo_formula(1, 1, 1, p[i], p[j])) <= 1e-14);
    }
  }
}

TEST_CASE("compare examples") {
  const auto a = compute_fingerprint(kExp1, MuntzSequence::primes(), 10);
  const auto self = compare(a, a, 1e-9);
  CHECK(self.verdict == Verdict::Indistinguishable);
  CHECK(self.statement.find("does not establish equality") != std::string::npos);

  const auto g = compute_fingerprint(AnyDistribution{Distribution1D::gamma(1, 1.001)}, MuntzSequence::primes(), 10);
  const auto c = compare(a, g, 1e-9);
  CHECK(c.verdict == Verdict::Distinct);
  double best = 0.0;
  std::size_t where = 0;
  const auto primes = first_primes(10);
  for (std::size_t i = 0; i < primes.size(); ++i) {
    const double x = 1.0 / (1.0 + primes[i]);
    const double d = std::abs(x - std::pow(x, 1.001));
    if (d > best) {
      best = d;
      where = i;
    }
  }
  CHECK(std::abs(c.max_delta - best) <= 1e-15);
  CHECK(c.argmax == std::vector<std::size_t>{where});
  MESSAGE("Exp(1) vs Gamma(1, 1.001): max delta " << c.max_delta << " at prime " << primes[where]);

  const AnyDistribution md = joint("moran-downton", {{"r", 0}});
  const AnyDistribution prod = joint("product", {}, {Distribution1D::exponential(1), Distribution1D::exponential(1)});
  const auto fm = compute_fingerprint(md, MuntzSequence::primes(), 6);
  const auto fp = compute_fingerprint(prod, MuntzSequence::primes(), 6);
  CHECK(compare(fm, fp, 1e-9).verdict == Verdict::Indistinguishable);
  CHECK(compare(fm, fp, 1e-9).max_delta <= 1e-9);

  const auto carson_md = compute_fingerprint(md, MuntzSequence::primes(), 2, Route::Carson, {1e-8, {}, 20000});
  const auto carson_prod = compute_fingerprint(prod, MuntzSequence::primes(), 2, Route::Carson, {1e-8, {}, 20000});
  CHECK(compare(carson_md, carson_prod, 1e-9).verdict == Verdict::Indistinguishable);

  const auto zero = compute_fingerprint(AnyDistribution{Distribution1D::point_mass(0)}, MuntzSequence::primes(), 8);
  CHECK(compare(zero, zero, 1e-9).verdict == Verdict::Indistinguishable);
}

TEST_CASE("grid errors") {
  const auto a = compute_fingerprint(kExp1, MuntzSequence::primes(), 3);
  const auto b = compute_fingerprint(kExp1, MuntzSequence::primes(), 4);
  const auto c = compute_fingerprint(kExp1, MuntzSequence::integers(), 3);
  CHECK(code_of([&] { compare(a, b, 1e-9); }) == ErrorCode::GridMismatch);
  CHECK(code_of([&] { compare(a, c, 1e-9); }) == ErrorCode::GridMismatch);
  const AnyDistribution mo = joint("marshall-olkin", {{"lambda1", 1}, {"lambda2", 1}, {"lambda12", 1}});
  const std::vector<MuntzSequence> one{MuntzSequence::primes()};
  const std::vector<std::size_t> len{3};
  CHECK(code_of([&] { compute_fingerprint(mo, one, len); }) == ErrorCode::GridDimensionMismatch);
  CHECK(code_of([&] { compute_fingerprint(kExp1, MuntzSequence::primes(), 0); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("fingerprints decrease along every axis") {
  std::vector<AnyDistribution> laws{
      kExp1, Distribution1D::gamma(2, 3), random_mixture(7, 1),
      joint("marshall-olkin", {{"lambda1", 0.3}, {"lambda2", 2}, {"lambda12", 0.7}}),
      joint("freund", {{"alpha", 1}, {"alpha_prime", 2}, {"beta", 1}, {"beta_prime", 2}}),
      joint("bivariate-gamma", {{"r", 0.5}, {"q", 2.5}}),
      joint("trivariate-gamma", {{"alpha", 1}, {"a", 0.5}, {"b", 0.5}})};
  for (const auto& law : laws) {
    const auto fp = compute_fingerprint(law, MuntzSequence::primes(), dimension(law) == 3 ? 3 : 6);
    const auto shape = fp.shape();
    for (std::size_t flat = 0; flat < fp.values.size(); ++flat) {
      std::vector<std::size_t> idx(fp.dim);
      std::size_t rest = flat;
      for (std::size_t i = fp.dim; i-- > 0;) {
        idx[i] = rest % shape[i];
        rest /= shape[i];
      }
      for (std::size_t axis = 0; axis < fp.dim; ++axis) {
        if (idx[axis] + 1 == shape[axis]) continue;
        auto next = idx;
        ++next[axis];
        CHECK(fp.values[fp.offset(next)].value < fp.values[flat].value - 1e-12);
      }
    }
  }
}

TEST_CASE("scale equivariance") {
  const auto primes = first_primes(12);
  for (double lambda : {0.5, 3.0, 11.0}) {
    std::vector<double> scaled;
    for (double p : primes) scaled.push_back(p / lambda);
    const auto a = compute_fingerprint(AnyDistribution{Distribution1D::exponential(lambda)}, MuntzSequence::primes(), 12,
                                       Route::Carson);
    const auto b = compute_fingerprint(kExp1, MuntzSequence::custom(scaled), 12, Route::Carson);
    for (std::size_t i = 0; i < primes.size(); ++i) CHECK(std::abs(a.values[i].value - b.values[i].value) <= 1e-10);
  }
}

TEST_CASE("comparison is symmetric and refines with the grid") {
  const std::vector<AnyDistribution> laws{kExp1, Distribution1D::gamma(1, 1.001), random_mixture(3, 4),
                                          random_mixture(3, 5), Distribution1D::point_mass(0.5)};
  for (std::size_t i = 0; i < laws.size(); ++i) {
    for (std::size_t j = 0; j < laws.size(); ++j) {
      double prev = 0.0;
      bool was_distinct = false;
      for (std::size_t len : {1u, 2u, 4u, 8u, 16u}) {
        const auto a = compute_fingerprint(laws[i], MuntzSequence::primes(), len);
        const auto b = compute_fingerprint(laws[j], MuntzSequence::primes(), len);
        const auto ab = compare(a, b, 1e-9);
        const auto ba = compare(b, a, 1e-9);
        CHECK(ab.verdict == ba.verdict);
        CHECK(ab.max_delta >= prev);
        if (was_distinct) CHECK(ab.verdict == Verdict::Distinct);
        prev = ab.max_delta;
        was_distinct = ab.verdict == Verdict::Distinct;
        if (i == j) CHECK(ab.verdict == Verdict::Indistinguishable);
      }
    }
  }
}

TEST_CASE("total variation") {
  CHECK(std::abs(total_variation(Distribution1D::exponential(1), Distribution1D::exponential(2)) - 0.25) <= 1e-9);
  CHECK(total_variation(Distribution1D::point_mass(0), Distribution1D::point_mass(1)) == 1.0);
  const auto m = Distribution1D::mixture({{0.5, Distribution1D::point_mass(1)}, {0.5, Distribution1D::exponential(1)}});
  CHECK(std::abs(total_variation(m, Distribution1D::exponential(1)) - 0.5) <= 1e-9);
  CHECK(total_variation(m, m) <= 1e-12);
}

TEST_CASE("collision experiment") {
  const auto r = collision_experiment(42, 100, MuntzSequence::primes(), 8, 1e-9);
  CHECK(r.trials == 100);
  CHECK(r.false_merges == 0);
  CHECK(r.false_splits == 0);
  CHECK(r.equal_pairs == 50);
  CHECK(r.unequal_pairs + r.skipped_pairs == 50);
  CHECK(r.skipped_pairs == 0);
  CHECK(r.min_total_variation >= 0.01);
  CHECK(r.min_separation_margin > 0.0);
  MESSAGE("seed 42: min separation margin " << r.min_separation_margin << ", max equal-pair delta "
                                            << r.max_equal_delta);

  const auto again = collision_experiment(42, 100, MuntzSequence::primes(), 8, 1e-9);
  CHECK(to_json(again) == to_json(r));

  const auto empty = collision_experiment(42, 0, MuntzSequence::primes(), 8, 1e-9);
  CHECK(empty.trials == 0);
  CHECK(empty.equal_pairs + empty.unequal_pairs == 0);
}

TEST_CASE("random mixtures follow the generator design") {
  for (std::uint64_t stream = 0; stream < 200; ++stream) {
    const auto d = random_mixture(9, stream);
    CHECK(d.atoms().size() + d.components().size() >= 1);
    CHECK(d.atoms().size() + d.components().size() <= 4);
    for (const auto& a : d.atoms()) {
      CHECK((a.location == 0.0 || a.location == 0.5 || a.location == 1.0 || a.location == 2.0));
    }
    for (const auto& c : d.components()) {
      const double rate = std::holds_alternative<Exponential>(c.law) ? std::get<Exponential>(c.law).rate
                                                                     : std::get<GammaLaw>(c.law).rate;
      CHECK(rate >= 0.1);
      CHECK(rate <= 10.0);
    }
  }
  CHECK(to_json(compute_fingerprint(AnyDistribution{random_mixture(9, 3)}, MuntzSequence::primes(), 5)) ==
        to_json(compute_fingerprint(AnyDistribution{random_mixture(9, 3)}, MuntzSequence::primes(), 5)));
}

TEST_CASE("fingerprint JSON layout") {
  const auto fp = compute_fingerprint(kExp1, MuntzSequence::primes(), 3);
  const auto j = to_json(fp);
  std::vector<std::string> keys;
  for (const auto& [k, v] : j.items()) keys.push_back(k);
  CHECK(keys == std::vector<std::string>{"dim", "shape", "grids", "route", "tol", "values", "est_errors"});
  CHECK(j["grids"][0]["kind"] == "primes");
  CHECK(j["values"].size() == 3);
  CHECK(j["route"] == "closed_form");
}
