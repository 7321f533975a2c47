#include <cmath>
#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "stieltjes/cli.hpp"
#include "stieltjes/error.hpp"
#include "stieltjes/spec_json.hpp"

using namespace stieltjes;

namespace {

struct Outcome {
  int code = -1;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  ::unsetenv("STIELTJES_PRECISION_BITS");
  std::ostringstream out, err;
  Outcome r;
  r.code = cli::run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string golden(const std::string& name) {
  std::ifstream in(std::string(STIELTJES_TEST_DATA) + "/golden/" + name);
  REQUIRE_MESSAGE(in.good(), "missing golden file " << name);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

const std::string kExp1 = R"({"kind":"exponential","params":{"lambda":1}})";
const std::string kMO = R"({"kind":"marshall-olkin","params":{"lambda1":1,"lambda2":1,"lambda12":1}})";

struct GoldenCase {
  const char* file;
  std::vector<std::string> args;
};

const std::vector<GoldenCase>& golden_cases() {
  static const std::vector<GoldenCase> cases{
      {"transform_exp_carson.json", {"transform", "--spec", kExp1, "--s", "2", "--route", "carson"}},
      {"transform_mo_closed.csv", {"transform", "--spec", kMO, "--s", "2,3", "--format", "csv"}},
      {"fingerprint_exp_primes.json", {"fingerprint", "--spec", kExp1, "--grid", "primes", "--len", "3"}},
      {"fingerprint_mo.csv", {"fingerprint", "--spec", kMO, "--len", "2", "--format", "csv"}},
      {"invert_exp.json", {"invert", "--spec", kExp1, "--x", "1", "--n", "32"}},
      {"muntz_half.csv", {"muntz", "--q", "0.5", "--n", "10", "--format", "csv"}},
      {"compare_seed42.json", {"compare", "--seed", "42", "--trials", "20", "--len", "8", "--tol", "1e-9"}},
      {"catalog.json", {"catalog"}},
  };
  return cases;
}

}  // namespace

TEST_CASE("cli examples") {
  const auto t = run({"transform", "--spec", kExp1, "--s", "2", "--route", "carson"});
  REQUIRE(t.code == 0);
  const auto doc = nlohmann::json::parse(t.out);
  CHECK(std::abs(doc["value"].get<double>() - 1.0 / 3.0) <= 1e-10);
  CHECK(doc["est_error"].get<double>() <= 1e-10);
  CHECK(doc["route"] == "carson");

  const auto f = run({"fingerprint", "--spec", kExp1, "--grid", "primes", "--len", "3"});
  REQUIRE(f.code == 0);
  const auto values = nlohmann::json::parse(f.out)["values"].get<std::vector<double>>();
  REQUIRE(values.size() == 3);
  CHECK(std::abs(values[0] - 1.0 / 3.0) <= 1e-10);
  CHECK(std::abs(values[1] - 1.0 / 4.0) <= 1e-10);
  CHECK(std::abs(values[2] - 1.0 / 6.0) <= 1e-10);

  const auto bad = run({"transform", "--spec", kExp1, "--s", "-1"});
  CHECK(bad.code == 2);
  CHECK(bad.err.find("s must be positive") != std::string::npos);
  CHECK(bad.out.empty());
}

TEST_CASE("usage errors exit 2 and name the flag or JSON path") {
  struct Case {
    std::vector<std::string> args;
    std::string needle;
  };
  const std::vector<Case> cases{
      {{}, "subcommand"},
      {{"transform", "--spec", kExp1}, "--s"},
      {{"transform", "--spec", kExp1, "--s", "abc"}, "--s"},
      {{"transform", "--spec", kExp1, "--s", "1,2"}, "--s"},
      {{"transform", "--spec", kExp1, "--s", "1", "--tol", "0.5"}, "--tol"},
      {{"transform", "--spec", kExp1, "--s", "1", "--route", "sideways"}, "--route"},
      {{"transform", "--spec", kExp1, "--s", "1", "--format", "xml"}, "--format"},
      {{"transform", "--spec", kExp1, "--s", "1", "--bogus"}, "--bogus"},
      {{"transform", "--spec", R"({"kind":"exponential","params":{"lambda":1},"extra":2})", "--s", "1"}, "$.extra"},
      {{"transform", "--spec", R"({"kind":"exponential","params":{"lambda":1,"lamda":2}})", "--s", "1"}, "lamda"},
      {{"transform", "--spec", R"({"kind":"mixture","mixture":[{"weight":1,"spec":{"kind":"nope"}}]})", "--s", "1"},
       "$.mixture[0].spec"},
      {{"transform", "--spec", "/no/such/file.json", "--s", "1"}, "--spec"},
      {{"fingerprint", "--spec", kExp1, "--grid", "squares"}, "--grid"},
      {{"fingerprint", "--spec", kExp1, "--grid", "file:/no/such/grid"}, "--grid"},
      {{"invert", "--spec", kMO, "--x", "1"}, "univariate"},
      {{"invert", "--spec", kExp1, "--x", "-2"}, "--x"},
      {{"muntz", "--q", "0.5"}, "--n"},
      {{"compare", "--spec", kExp1}, "two"},
  };
  for (const auto& c : cases) {
    const auto r = run(c.args);
    INFO("args: " << (c.args.empty() ? std::string("(none)") : c.args.front()) << " expecting " << c.needle);
    CHECK(r.code == 2);
    CHECK(r.err.find(c.needle) != std::string::npos);
  }
}

TEST_CASE("numerical failures exit 3 with a diagnostic document") {
  const auto r = run({"invert", "--spec", R"({"kind":"positive-stable","params":{"alpha":0.5}})", "--x", "1",
                      "--n", "20", "--method", "post-widder"});
  CHECK(r.code == 3);
  const auto doc = nlohmann::json::parse(r.out);
  CHECK(doc["command"] == "invert");
  CHECK(doc["error"] == "DerivativeUnavailable");
  CHECK_FALSE(doc["message"].get<std::string>().empty());
}

TEST_CASE("precision default comes from the environment") {
  ::setenv("STIELTJES_PRECISION_BITS", "300", 1);
  std::ostringstream out, err;
  const std::vector<std::string> args{"invert", "--spec", kExp1, "--x", "1", "--n", "4", "--method", "feller"};
  CHECK(cli::run(args, out, err) == 0);
  CHECK(nlohmann::json::parse(out.str())["cdf"]["precision_bits"] == 300);

  ::setenv("STIELTJES_PRECISION_BITS", "lots", 1);
  std::ostringstream out2, err2;
  CHECK(cli::run(args, out2, err2) == 2);
  CHECK(err2.str().find("STIELTJES_PRECISION_BITS") != std::string::npos);
  ::unsetenv("STIELTJES_PRECISION_BITS");

  const auto flag = run({"invert", "--spec", kExp1, "--x", "1", "--n", "4", "--method", "feller", "--precision-bits",
                         "256"});
  CHECK(nlohmann::json::parse(flag.out)["cdf"]["precision_bits"] == 256);
}

TEST_CASE("csv output keeps 17 significant digits") {
  const auto r = run({"fingerprint", "--spec", kExp1, "--len", "1", "--format", "csv"});
  REQUIRE(r.code == 0);
  CHECK(r.out == "i1,s1,value,est_error\n0,2,0.33333333333333331,0\n");
  const auto m = run({"muntz", "--n", "3", "--format", "csv"});
  CHECK(m.out.rfind("n,bound,sampled_sup\n1,0.5,0.25\n2,0.375,", 0) == 0);
}

TEST_CASE("custom grid files") {
  const std::string path = "stieltjes_test_grid.txt";
  {
    std::ofstream g(path);
    g << "1, 2\n4\n";
  }
  const auto r = run({"fingerprint", "--spec", kExp1, "--grid", "file:" + path, "--len", "3"});
  REQUIRE(r.code == 0);
  const auto doc = nlohmann::json::parse(r.out);
  CHECK(doc["grids"][0]["kind"] == "custom");
  const auto v = doc["values"].get<std::vector<double>>();
  CHECK(v == std::vector<double>{0.5, 1.0 / 3.0, 0.2});
  CHECK(run({"fingerprint", "--spec", kExp1, "--grid", "file:" + path, "--len", "4"}).code == 2);
  std::remove(path.c_str());
}

TEST_CASE("verify-identity reports pass and expansion") {
  const auto r = run({"verify-identity", "--spec", kMO, "--s", "1,2", "--tol", "1e-6"});
  REQUIRE(r.code == 0);
  const auto doc = nlohmann::json::parse(r.out);
  CHECK(doc["pass"] == true);
  CHECK(doc["identity_gap"].get<double>() <= 1e-6);
  CHECK(doc.contains("expansion"));
}

TEST_CASE("golden outputs are byte-identical") {
  for (const auto& c : golden_cases()) {
    INFO(c.file);
    const auto first = run(c.args);
    const auto second = run(c.args);
    CHECK(first.code == 0);
    CHECK(first.out == second.out);
    CHECK(first.out == golden(c.file));
  }
}

TEST_CASE("catalog specs survive a JSON round trip") {
  const std::vector<std::string> specs{
      kExp1,
      R"({"kind":"gamma","params":{"lambda":2,"q":3}})",
      R"({"kind":"positive-stable","params":{"alpha":0.5}})",
      R"({"kind":"point-mass","params":{"location":1.5}})",
      R"({"kind":"mixture","mixture":[{"weight":0.3,"spec":{"kind":"point-mass","params":{"location":0}}},
          {"weight":0.7,"spec":{"kind":"gamma","params":{"lambda":0.7,"q":2.5}}}]})",
      R"({"kind":"product","components":[{"kind":"exponential","params":{"lambda":1}},
          {"kind":"gamma","params":{"lambda":2,"q":3}},{"kind":"point-mass","params":{"location":0.5}}]})",
      kMO,
      R"({"kind":"freund","params":{"alpha":1,"alpha_prime":2,"beta":1,"beta_prime":2}})",
      R"({"kind":"moran-downton","params":{"r":0.4}})",
      R"({"kind":"blm","params":{"theta":4},"components":[{"kind":"exponential","params":{"lambda":2}},
          {"kind":"exponential","params":{"lambda":2}}]})",
      R"({"kind":"bivariate-gamma","params":{"r":0.5,"q":1.5}})",
      R"({"kind":"trivariate-gamma","params":{"alpha":1,"a":0.5,"b":0.5}})",
  };
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> coord(0.0, 6.0);
  for (const auto& text : specs) {
    INFO(text);
    const auto a = parse_spec_text(text);
    const auto dumped = to_json(a).dump();
    const auto b = parse_spec_text(dumped);
    CHECK(to_json(b).dump() == dumped);
    for (int i = 0; i < 100; ++i) {
      if (const auto* d = std::get_if<Distribution1D>(&a)) {
        const double x = coord(rng);
        CHECK(std::abs(d->cdf(x) - std::get<Distribution1D>(b).cdf(x)) <= 1e-14);
      } else {
        const auto& j = std::get<JointDist>(a);
        std::vector<double> x(j.dim());
        for (auto& v : x) v = coord(rng);
        CHECK(std::abs(j.cdf(x) - std::get<JointDist>(b).cdf(x)) <= 1e-14);
        CHECK(std::abs(j.survival(x) - std::get<JointDist>(b).survival(x)) <= 1e-14);
      }
    }
  }
}
