#include "stieltjes/spec_json.hpp"

#include <set>

#include "stieltjes/error.hpp"

namespace stieltjes {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::SpecParse, path + ": " + what);
}

void check_fields(const json& doc, const std::string& path, const std::set<std::string>& allowed) {
  for (const auto& [key, value] : doc.items()) {
    if (!allowed.count(key)) fail(path + "." + key, "unknown field");
  }
}

Distribution1D as_univariate(AnyDistribution d, const std::string& path) {
  if (auto* one = std::get_if<Distribution1D>(&d)) return std::move(*one);
  fail(path, "expected a univariate law");
}

Distribution1D parse_mixture(const json& doc, const std::string& path) {
  const auto& parts = doc.at("mixture");
  const std::string mpath = path + ".mixture";
  if (!parts.is_array() || parts.empty()) fail(mpath, "must be a non-empty array");
  std::vector<std::pair<double, Distribution1D>> out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    const std::string ipath = mpath + "[" + std::to_string(i) + "]";
    const auto& part = parts[i];
    if (!part.is_object()) fail(ipath, "must be an object");
    check_fields(part, ipath, {"weight", "spec"});
    if (!part.contains("weight") || !part["weight"].is_number()) {
      fail(ipath + ".weight", "missing or not a number");
    }
    if (!part.contains("spec")) fail(ipath + ".spec", "missing");
    const double w = part["weight"].get<double>();
    out.emplace_back(w, as_univariate(parse_spec(part["spec"], ipath + ".spec"), ipath + ".spec"));
  }
  try {
    return Distribution1D::mixture(out);
  } catch (const Error& e) {
    throw Error(e.code(), mpath + ": " + e.what());
  }
}

ordered_json law_json(const Law& law) {
  return std::visit(
      Overloaded{
          [](const Exponential& e) {
            return ordered_json{{"kind", "exponential"}, {"params", {{"lambda", e.rate}}}};
          },
          [](const GammaLaw& g) {
            return ordered_json{{"kind", "gamma"}, {"params", {{"lambda", g.rate}, {"q", g.shape}}}};
          },
          [](const PositiveStable& p) {
            return ordered_json{{"kind", "positive-stable"}, {"params", {{"alpha", p.alpha}}}};
          },
          [](const CdfOnly& c) -> ordered_json {
            throw Error(ErrorCode::InvalidArgument, "law '" + c.name + "' has no JSON form");
          },
      },
      law);
}

ordered_json point_mass_json(double location) {
  return ordered_json{{"kind", "point-mass"}, {"params", {{"location", location}}}};
}

}  // namespace

AnyDistribution parse_spec(const json& doc, const std::string& path) {
  if (!doc.is_object()) fail(path, "spec must be a JSON object");
  check_fields(doc, path, {"kind", "params", "mixture", "components"});
  if (!doc.contains("kind") || !doc["kind"].is_string()) fail(path + ".kind", "missing or not a string");
  const std::string kind = doc["kind"].get<std::string>();

  if (kind == "mixture") {
    if (doc.contains("params") && !doc["params"].empty()) fail(path + ".params", "mixture takes no params");
    if (doc.contains("components")) fail(path + ".components", "mixture takes no components");
    if (!doc.contains("mixture")) fail(path + ".mixture", "missing");
    return parse_mixture(doc, path);
  }
  if (doc.contains("mixture")) fail(path + ".mixture", "only allowed with kind \"mixture\"");

  Params params;
  if (doc.contains("params")) {
    const auto& p = doc["params"];
    if (!p.is_object()) fail(path + ".params", "must be an object");
    for (const auto& [key, value] : p.items()) {
      if (!value.is_number()) fail(path + ".params." + key, "must be a number");
      params[key] = value.get<double>();
    }
  }
  std::vector<Distribution1D> components;
  if (doc.contains("components")) {
    const auto& c = doc["components"];
    if (!c.is_array()) fail(path + ".components", "must be an array");
    for (std::size_t i = 0; i < c.size(); ++i) {
      const std::string cpath = path + ".components[" + std::to_string(i) + "]";
      components.push_back(as_univariate(parse_spec(c[i], cpath), cpath));
    }
  }
  try {
    return make_catalog(kind, params, std::move(components));
  } catch (const Error& e) {
    const std::string where = e.code() == ErrorCode::UnknownCatalogName ? path + ".kind" : path;
    throw Error(e.code(), where + ": " + e.what());
  }
}

AnyDistribution parse_spec_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::SpecParse, std::string("$: invalid JSON: ") + e.what());
  }
  return parse_spec(doc);
}

ordered_json to_json(const Distribution1D& dist) {
  const auto& atoms = dist.atoms();
  const auto& comps = dist.components();
  if (atoms.size() == 1 && comps.empty()) return point_mass_json(atoms[0].location);
  if (atoms.empty() && comps.size() == 1) return law_json(comps[0].law);
  ordered_json parts = ordered_json::array();
  for (const auto& a : atoms) {
    parts.push_back(ordered_json{{"weight", a.mass}, {"spec", point_mass_json(a.location)}});
  }
  for (const auto& c : comps) {
    parts.push_back(ordered_json{{"weight", c.weight}, {"spec", law_json(c.law)}});
  }
  return ordered_json{{"kind", "mixture"}, {"mixture", parts}};
}

ordered_json to_json(const JointDist& dist) {
  ordered_json out{{"kind", dist.kind_name()}};
  std::visit(Overloaded{
                 [&](const ProductLaw& p) {
                   ordered_json comps = ordered_json::array();
                   for (const auto& f : p.factors) comps.push_back(to_json(f));
                   out["components"] = comps;
                 },
                 [&](const MarshallOlkin& m) {
                   out["params"] = {{"lambda1", m.lambda1}, {"lambda2", m.lambda2}, {"lambda12", m.lambda12}};
                 },
                 [&](const Freund& f) {
                   out["params"] = {{"alpha", f.alpha},
                                    {"alpha_prime", f.alpha_prime},
                                    {"beta", f.beta},
                                    {"beta_prime", f.beta_prime}};
                 },
                 [&](const MoranDownton& m) { out["params"] = {{"r", m.r}}; },
                 [&](const BlmSpec& b) {
                   out["params"] = {{"theta", b.theta}};
                   out["components"] = ordered_json::array({to_json(b.f), to_json(b.g)});
                 },
                 [&](const BivariateGamma& g) { out["params"] = {{"r", g.r}, {"q", g.q}}; },
                 [&](const TrivariateGamma& t) {
                   out["params"] = {{"alpha", t.alpha}, {"a", t.a}, {"b", t.b}};
                 },
             },
             dist.kind());
  return out;
}

ordered_json to_json(const AnyDistribution& dist) {
  return std::visit([](const auto& d) { return to_json(d); }, dist);
}

}  // namespace stieltjes
