#include "stieltjes/cli.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "stieltjes/catalog.hpp"
#include "stieltjes/error.hpp"
#include "stieltjes/fingerprint.hpp"
#include "stieltjes/inversion.hpp"
#include "stieltjes/muntz.hpp"
#include "stieltjes/spec_json.hpp"
#include "stieltjes/transforms.hpp"

namespace stieltjes::cli {

namespace {

using nlohmann::ordered_json;

struct Usage : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Config {
  std::vector<std::string> specs;
  std::string s;
  std::string route = "auto";
  std::optional<double> tol;
  std::string grid;
  std::size_t len = 8;
  std::optional<long long> n;
  std::optional<double> x;
  std::optional<std::uint64_t> seed;
  std::size_t trials = 100;
  double q = 0.5;
  std::string method = "both";
  std::string format = "json";
  unsigned precision_bits = 128;
};

std::string read_file(const std::string& path, const std::string& flag) {
  std::ifstream in(path);
  if (!in) throw Usage(flag + ": cannot read file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

AnyDistribution load_spec(const std::string& arg) {
  const auto first = arg.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && arg[first] == '{') return parse_spec_text(arg);
  return parse_spec_text(read_file(arg, "--spec"));
}

double parse_number(std::string_view text, const std::string& flag) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  double v = 0.0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || end != text.data() + text.size() || text.empty()) {
    throw Usage(flag + ": '" + std::string(text) + "' is not a number");
  }
  return v;
}

std::vector<double> parse_list(const std::string& text, const std::string& flag) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find_first_of(",", start);
    const auto stop = comma == std::string::npos ? text.size() : comma;
    out.push_back(parse_number(std::string_view(text).substr(start, stop - start), flag));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

std::vector<double> parse_s(const Config& c, std::size_t dim) {
  if (c.s.empty()) throw Usage("--s is required");
  const auto s = parse_list(c.s, "--s");
  for (double v : s) {
    if (!(v > 0.0) || !std::isfinite(v)) throw Usage("--s: s must be positive");
  }
  if (s.size() != dim) {
    throw Usage("--s: law has dimension " + std::to_string(dim) + " but " + std::to_string(s.size()) +
                " values were given");
  }
  return s;
}

double checked_tol(const Config& c, double fallback) {
  const double tol = c.tol.value_or(fallback);
  if (!(tol > 0.0 && tol <= 1e-2)) throw Usage("--tol: must lie in (0, 1e-2]");
  return tol;
}

Route checked_route(const Config& c) {
  try {
    return parse_route(c.route);
  } catch (const Error& e) {
    throw Usage(std::string("--route: ") + e.what());
  }
}

MuntzSequence parse_grid(const std::string& text) {
  if (text == "primes") return MuntzSequence::primes();
  if (text == "integers") return MuntzSequence::integers();
  if (text.rfind("file:", 0) == 0) {
    std::string body = read_file(text.substr(5), "--grid");
    for (char& ch : body) {
      if (ch == ',' || ch == '\n' || ch == '\r' || ch == '\t') ch = ' ';
    }
    std::vector<double> values;
    std::istringstream in(body);
    std::string tok;
    while (in >> tok) values.push_back(parse_number(tok, "--grid"));
    try {
      return MuntzSequence::custom(std::move(values));
    } catch (const Error& e) {
      throw Usage(std::string("--grid: ") + e.what());
    }
  }
  throw Usage("--grid: expected primes, integers or file:PATH, got '" + text + "'");
}

const AnyDistribution& one_spec(const std::vector<AnyDistribution>& laws) {
  if (laws.size() != 1) throw Usage("--spec: expected exactly one spec");
  return laws.front();
}

std::string csv_number(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

class Csv {
 public:
  explicit Csv(std::ostream& out) : out_(out) {}
  template <class... T>
  void row(const T&... cells) {
    bool first = true;
    ((out_ << (first ? "" : ",") << cell(cells), first = false), ...);
    out_ << '\n';
  }

 private:
  static std::string cell(double v) { return csv_number(v); }
  static std::string cell(std::size_t v) { return std::to_string(v); }
  static std::string cell(int v) { return std::to_string(v); }
  static std::string cell(unsigned v) { return std::to_string(v); }
  static std::string cell(bool v) { return v ? "true" : "false"; }
  static std::string cell(const std::string& v) { return csv_quote(v); }
  static std::string cell(std::string_view v) { return csv_quote(std::string(v)); }
  static std::string cell(const char* v) { return csv_quote(v); }
  std::ostream& out_;
};

std::string join_header(const std::string& stem, std::size_t n) {
  std::string out;
  for (std::size_t i = 1; i <= n; ++i) out += (i > 1 ? "," : "") + stem + std::to_string(i);
  return out;
}

void emit(std::ostream& out, const ordered_json& doc) { out << doc.dump(2) << '\n'; }

ordered_json result_json(const InversionResult& r, const char* method) {
  return ordered_json{{"method", method},   {"value", r.value},
                      {"raw", r.raw},       {"error", r.error},
                      {"terms", r.terms},   {"precision_bits", r.precision_bits}};
}

// ---- subcommands

int cmd_transform(const Config& c, const std::vector<AnyDistribution>& laws, std::ostream& out) {
  const auto& law = one_spec(laws);
  const auto s = parse_s(c, dimension(law));
  const double tol = checked_tol(c, 1e-10);
  const auto v = transform(law, s, checked_route(c), {tol, {}, 20000});
  if (c.format == "csv") {
    out << join_header("s", s.size()) << ",route,value,est_error,evaluations\n";
    for (double x : s) out << csv_number(x) << ',';
    Csv(out).row(to_string(v.route), v.value, v.est_error, v.evaluations);
    return kExitOk;
  }
  emit(out, ordered_json{{"spec", to_json(law)},
                         {"s", s},
                         {"route", to_string(v.route)},
                         {"tol", tol},
                         {"value", v.value},
                         {"est_error", v.est_error},
                         {"evaluations", v.evaluations}});
  return kExitOk;
}

int cmd_invert(const Config& c, const std::vector<AnyDistribution>& laws, std::ostream& out) {
  const auto& any = one_spec(laws);
  const auto* law = std::get_if<Distribution1D>(&any);
  if (!law) throw Usage("--spec: invert needs a univariate law");
  if (!c.x || !(*c.x > 0.0) || !std::isfinite(*c.x)) throw Usage("--x: x must be positive");
  const long long n = c.n.value_or(32);
  if (n < 1 || n > 100000) throw Usage("--n: must lie in [1, 100000]");
  if (c.method != "both" && c.method != "post-widder" && c.method != "feller") {
    throw Usage("--method: expected post-widder, feller or both");
  }
  const auto oracle = make_oracle(*law, c.precision_bits);
  const int order = static_cast<int>(n);
  std::optional<InversionResult> density, cdf;
  if (c.method != "feller") density = post_widder_density(oracle, *c.x, order);
  if (c.method != "post-widder") cdf = feller_cdf(oracle, *c.x, order);
  if (c.format == "csv") {
    Csv csv(out);
    csv.row("method", "x", "n", "value", "raw", "error", "terms", "precision_bits");
    if (density) csv.row("post-widder", *c.x, order, density->value, density->raw, density->error, density->terms,
                         density->precision_bits);
    if (cdf) csv.row("feller", *c.x, order, cdf->value, cdf->raw, cdf->error, cdf->terms, cdf->precision_bits);
    return kExitOk;
  }
  ordered_json doc{{"spec", to_json(any)}, {"x", *c.x}, {"n", order}};
  if (density) doc["density"] = result_json(*density, "post-widder");
  if (cdf) doc["cdf"] = result_json(*cdf, "feller");
  emit(out, doc);
  return kExitOk;
}

int cmd_muntz(const Config& c, std::ostream& out) {
  if (!c.n || *c.n < 0 || *c.n > 2000) throw Usage("--n: must lie in [0, 2000]");
  if (!(c.q > 0.0) || !std::isfinite(c.q)) throw Usage("--q: q must be positive");
  const auto seq = parse_grid(c.grid.empty() ? "integers" : c.grid);
  const auto n = static_cast<std::size_t>(*c.n);
  if (n > seq.available()) throw Usage("--n: grid file has only " + std::to_string(seq.available()) + " exponents");
  const auto lambdas = seq.prefix(n);
  std::vector<std::pair<MuntzApproximant, SupNorm>> rows;
  for (std::size_t m = 1; m <= n; ++m) {
    auto a = golitschek_coeffs(c.q, lambdas, m);
    const auto sup = sup_norm_estimate(a);
    rows.emplace_back(std::move(a), sup);
  }
  if (c.format == "csv") {
    Csv csv(out);
    csv.row("n", "bound", "sampled_sup");
    for (const auto& [a, sup] : rows) csv.row(a.n(), a.bound, sup.sup);
    return kExitOk;
  }
  const auto cert = divergence_certificate(seq, n);
  ordered_json table = ordered_json::array();
  for (const auto& [a, sup] : rows) {
    table.push_back({{"n", a.n()},
                     {"bound", a.bound},
                     {"sampled_sup", sup.sup},
                     {"argmax", sup.argmax},
                     {"relation_residual", a.relation_residual},
                     {"precision_bits", a.precision_bits}});
  }
  emit(out, ordered_json{{"q", c.q},
                         {"grid", to_string(seq.kind())},
                         {"lambdas", lambdas},
                         {"certificate",
                          {{"partial_sum", cert.partial_sum},
                           {"certified_divergent", cert.certified_divergent},
                           {"statement", cert.statement}}},
                         {"rows", table}});
  return kExitOk;
}

Fingerprint fingerprint_of(const Config& c, const AnyDistribution& law, double tol) {
  if (c.len < 1) throw Usage("--len: must be at least 1");
  return compute_fingerprint(law, parse_grid(c.grid.empty() ? "primes" : c.grid), c.len, checked_route(c),
                             {tol, {}, 20000});
}

int cmd_fingerprint(const Config& c, const std::vector<AnyDistribution>& laws, std::ostream& out) {
  const auto& law = one_spec(laws);
  const auto fp = fingerprint_of(c, law, checked_tol(c, 1e-10));
  if (c.format == "csv") {
    out << join_header("i", fp.dim) << ',' << join_header("s", fp.dim) << ",value,est_error\n";
    const auto shape = fp.shape();
    std::vector<std::size_t> idx(fp.dim, 0);
    for (const auto& v : fp.values) {
      for (std::size_t i = 0; i < fp.dim; ++i) out << idx[i] << ',';
      for (std::size_t i = 0; i < fp.dim; ++i) out << csv_number(fp.grids[i][idx[i]]) << ',';
      Csv(out).row(v.value, v.est_error);
      for (std::size_t i = fp.dim; i-- > 0;) {
        if (++idx[i] < shape[i]) break;
        idx[i] = 0;
      }
    }
    return kExitOk;
  }
  ordered_json doc{{"spec", to_json(law)}};
  doc.update(to_json(fp));
  emit(out, doc);
  return kExitOk;
}

int cmd_compare(const Config& c, const std::vector<AnyDistribution>& laws, std::ostream& out) {
  const double tol = checked_tol(c, 1e-9);
  if (laws.empty()) {
    if (!c.seed) throw Usage("compare: give two --spec laws, or --seed for the collision experiment");
    if (c.len < 1) throw Usage("--len: must be at least 1");
    const auto r = collision_experiment(*c.seed, c.trials, parse_grid(c.grid.empty() ? "primes" : c.grid), c.len, tol);
    if (c.format == "csv") {
      Csv csv(out);
      csv.row("seed", "trials", "equal_pairs", "unequal_pairs", "skipped_pairs", "false_merges", "false_splits",
              "min_separation_margin", "max_equal_delta", "min_total_variation");
      out << r.seed << ',';
      csv.row(r.trials, r.equal_pairs, r.unequal_pairs, r.skipped_pairs, r.false_merges, r.false_splits,
              r.min_separation_margin, r.max_equal_delta, r.min_total_variation);
      return kExitOk;
    }
    ordered_json doc{{"grid", c.grid.empty() ? "primes" : c.grid}, {"len", c.len}, {"tol", tol}};
    doc.update(to_json(r));
    emit(out, doc);
    return kExitOk;
  }
  if (laws.size() != 2) throw Usage("--spec: compare needs exactly two specs");
  if (c.seed) throw Usage("--seed: only used by the collision experiment (no --spec)");
  const double transform_tol = std::min(1e-10, tol / 10.0);
  const auto a = fingerprint_of(c, laws[0], transform_tol);
  const auto b = fingerprint_of(c, laws[1], transform_tol);
  const auto cmp = compare(a, b, tol);
  if (c.format == "csv") {
    Csv csv(out);
    csv.row("verdict", "max_delta", "threshold", "margin");
    csv.row(to_string(cmp.verdict), cmp.max_delta, cmp.threshold, cmp.margin);
    return kExitOk;
  }
  ordered_json doc{{"grid", c.grid.empty() ? "primes" : c.grid}, {"len", c.len}, {"tol", tol}};
  doc.update(to_json(cmp));
  emit(out, doc);
  return kExitOk;
}

int cmd_verify(const Config& c, const std::vector<AnyDistribution>& laws, std::ostream& out) {
  const auto& law = one_spec(laws);
  const auto s = parse_s(c, dimension(law));
  const double tol = checked_tol(c, 1e-6);
  const auto r = verify_identity(law, s, tol);
  if (c.format == "csv") {
    Csv csv(out);
    csv.row("pass", "reference_route", "reference", "carson", "identity_gap", "survival_gap", "expansion_gap",
            "est_error");
    csv.row(r.pass, to_string(r.reference_route), r.reference, r.carson, r.identity_gap, r.survival_gap,
            r.expansion_gap, r.est_error);
  } else {
    ordered_json doc{{"spec", to_json(law)},
                     {"s", s},
                     {"tol", tol},
                     {"pass", r.pass},
                     {"reference_route", to_string(r.reference_route)},
                     {"reference", r.reference},
                     {"carson", r.carson},
                     {"identity_gap", r.identity_gap},
                     {"est_error", r.est_error},
                     {"evaluations", r.evaluations}};
    if (r.expanded) {
      doc["expansion"] = {{"lhs_reference", r.lhs_reference}, {"lhs_mixed", r.lhs_mixed},
                          {"rhs_survival", r.rhs_survival},   {"rhs_carson", r.rhs_carson},
                          {"survival_gap", r.survival_gap},   {"margin_gap", r.margin_gap},
                          {"expansion_gap", r.expansion_gap}};
    }
    emit(out, doc);
  }
  return r.pass ? kExitOk : kExitNumerical;
}

int cmd_catalog(const Config& c, std::ostream& out) {
  if (c.format == "csv") {
    Csv csv(out);
    csv.row("name", "params", "components", "constraints");
    for (const auto& e : catalog_entries()) {
      std::string params;
      for (const auto& p : e.params) params += (params.empty() ? "" : ";") + p;
      csv.row(e.name, params, e.components, e.constraints);
    }
    return kExitOk;
  }
  ordered_json doc = ordered_json::array();
  for (const auto& e : catalog_entries()) {
    doc.push_back({{"name", e.name}, {"params", e.params}, {"components", e.components}, {"constraints", e.constraints}});
  }
  emit(out, doc);
  return kExitOk;
}

}  // namespace

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  Config c;
  CLI::App app{"Laplace-Stieltjes transforms, inversion, Muntz approximants and fingerprints", "stieltjes"};
  app.require_subcommand(1);

  auto add_format = [&](CLI::App* sub) {
    sub->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
  };
  auto add_spec = [&](CLI::App* sub, bool many) {
    auto* opt = sub->add_option("--spec", c.specs, "Distribution spec: inline JSON or a file path");
    if (!many) opt->expected(1);
  };
  auto add_tol = [&](CLI::App* sub) { sub->add_option("--tol", c.tol, "Absolute tolerance in (0, 1e-2]"); };
  auto add_route = [&](CLI::App* sub) {
    sub->add_option("--route", c.route, "auto|direct|carson|survival|closed");
  };
  auto add_grid = [&](CLI::App* sub) {
    sub->add_option("--grid", c.grid, "primes|integers|file:PATH");
    sub->add_option("--len", c.len, "Grid prefix length per axis");
  };

  auto* transform_cmd = app.add_subcommand("transform", "Laplace-Stieltjes transform at one point");
  add_spec(transform_cmd, false);
  transform_cmd->add_option("--s", c.s, "Comma-separated positive arguments, one per coordinate");
  add_route(transform_cmd);
  add_tol(transform_cmd);
  add_format(transform_cmd);

  auto* invert_cmd = app.add_subcommand("invert", "Post-Widder density and Feller CDF from the transform");
  add_spec(invert_cmd, false);
  invert_cmd->add_option("--x", c.x, "Evaluation point");
  invert_cmd->add_option("--n", c.n, "Inversion order");
  invert_cmd->add_option("--method", c.method, "post-widder|feller|both");
  invert_cmd->add_option("--precision-bits", c.precision_bits, "Working precision (default $STIELTJES_PRECISION_BITS or 128)")
      ->check(CLI::Range(53u, 1u << 16));
  add_format(invert_cmd);

  auto* muntz_cmd = app.add_subcommand("muntz", "Constructive Muntz approximants of x^q");
  muntz_cmd->add_option("--n", c.n, "Largest approximant order");
  muntz_cmd->add_option("--q", c.q, "Target exponent");
  muntz_cmd->add_option("--grid", c.grid, "integers|primes|file:PATH");
  add_format(muntz_cmd);

  auto* fingerprint_cmd = app.add_subcommand("fingerprint", "Transform values on a Muntz grid");
  add_spec(fingerprint_cmd, false);
  add_grid(fingerprint_cmd);
  add_route(fingerprint_cmd);
  add_tol(fingerprint_cmd);
  add_format(fingerprint_cmd);

  auto* compare_cmd = app.add_subcommand("compare", "Compare two fingerprints, or run the collision experiment");
  add_spec(compare_cmd, true);
  add_grid(compare_cmd);
  add_route(compare_cmd);
  add_tol(compare_cmd);
  compare_cmd->add_option("--seed", c.seed, "Collision experiment seed");
  compare_cmd->add_option("--trials", c.trials, "Collision experiment trials");
  add_format(compare_cmd);

  auto* verify_cmd = app.add_subcommand("verify-identity", "Check the Laplace-Carson identity at one point");
  add_spec(verify_cmd, false);
  verify_cmd->add_option("--s", c.s, "Comma-separated positive arguments, one per coordinate");
  add_tol(verify_cmd);
  add_format(verify_cmd);

  auto* catalog_cmd = app.add_subcommand("catalog", "List the named laws");
  add_format(catalog_cmd);

  std::vector<std::string> argv(args.rbegin(), args.rend());
  std::string command;
  try {
    if (const char* env = std::getenv("STIELTJES_PRECISION_BITS"); env && *env) {
      const double bits = parse_number(env, "STIELTJES_PRECISION_BITS");
      if (!(bits >= 53 && bits <= 65536) || bits != std::floor(bits)) {
        throw Usage("STIELTJES_PRECISION_BITS: expected an integer in [53, 65536]");
      }
      c.precision_bits = static_cast<unsigned>(bits);
    }
    app.parse(argv);
    command = app.get_subcommands().front()->get_name();
    std::vector<AnyDistribution> laws;
    for (const auto& s : c.specs) laws.push_back(load_spec(s));
    if (laws.empty() && command != "muntz" && command != "catalog" && command != "compare") {
      throw Usage("--spec is required");
    }
    if (command == "transform") return cmd_transform(c, laws, out);
    if (command == "invert") return cmd_invert(c, laws, out);
    if (command == "muntz") return cmd_muntz(c, out);
    if (command == "fingerprint") return cmd_fingerprint(c, laws, out);
    if (command == "compare") return cmd_compare(c, laws, out);
    if (command == "verify-identity") return cmd_verify(c, laws, out);
    return cmd_catalog(c, out);
  } catch (const CLI::CallForHelp&) {
    const auto subs = app.get_subcommands();
    out << (subs.empty() ? app.help() : subs.front()->help());
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Usage& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    if (is_numerical_failure(e.code())) {
      emit(out, ordered_json{{"command", command}, {"error", to_string(e.code())}, {"message", e.what()}});
      return kExitNumerical;
    }
    err << "error: " << to_string(e.code()) << ": " << e.what() << '\n';
    return kExitUsage;
  }
}

}  // namespace stieltjes::cli
