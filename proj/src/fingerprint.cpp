#include "stieltjes/fingerprint.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <sstream>
#include <variant>

#include "stieltjes/error.hpp"
#include "stieltjes/quadrature.hpp"

namespace stieltjes {

namespace {

using Parts = std::vector<std::pair<double, Distribution1D>>;

constexpr double kAtomSites[] = {0.0, 0.5, 1.0, 2.0};

std::mt19937_64 stream_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

Distribution1D random_part(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> type(0, 2);
  std::uniform_int_distribution<int> site(0, 3);
  std::uniform_real_distribution<double> log_rate(std::log(0.1), std::log(10.0));
  std::uniform_real_distribution<double> shape(1.0, 5.0);
  switch (type(rng)) {
    case 0: return Distribution1D::point_mass(kAtomSites[site(rng)]);
    case 1: return Distribution1D::exponential(std::exp(log_rate(rng)));
    default: {
      const double rate = std::exp(log_rate(rng));
      return Distribution1D::gamma(rate, shape(rng));
    }
  }
}

Parts random_parts(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> count(1, 4);
  std::exponential_distribution<double> gamma1(1.0);
  const int n = count(rng);
  Parts parts;
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    const double w = gamma1(rng);
    total += w;
    parts.emplace_back(w, random_part(rng));
  }
  for (auto& p : parts) p.first /= total;
  return parts;
}

bool is_atom(const Distribution1D& d) { return d.components().empty(); }

// One structural change of the law: rescale a rate, move an atom, or shift
// weight into a new atom.
Parts perturb(const Parts& parts, std::mt19937_64& rng) {
  Parts out = parts;
  std::uniform_int_distribution<std::size_t> pick(0, out.size() - 1);
  std::uniform_int_distribution<int> mode(0, 2);
  std::uniform_int_distribution<int> site(0, 3);
  std::uniform_real_distribution<double> factor(1.1, 2.0);
  std::uniform_real_distribution<double> share(0.02, 0.2);
  auto& target = out[pick(rng)];
  const int m = mode(rng);
  if (m == 0 && !is_atom(target.second)) {
    const auto& law = target.second.components().front().law;
    const double f = (rng() & 1) ? factor(rng) : 1.0 / factor(rng);
    if (const auto* e = std::get_if<Exponential>(&law)) {
      target.second = Distribution1D::exponential(e->rate * f);
    } else {
      const auto& g = std::get<GammaLaw>(law);
      target.second = Distribution1D::gamma(g.rate * f, g.shape);
    }
  } else if (m == 1 && is_atom(target.second)) {
    const double loc = target.second.atoms().front().location;
    double next = loc;
    while (next == loc) next = kAtomSites[site(rng)];
    target.second = Distribution1D::point_mass(next);
  } else {
    const double moved = target.first * share(rng);
    target.first -= moved;
    out.emplace_back(moved, Distribution1D::point_mass(kAtomSites[site(rng)]));
  }
  return out;
}

double continuous_scale(const Distribution1D& d) {
  double t = 1.0;
  for (const auto& c : d.components()) {
    if (const auto* e = std::get_if<Exponential>(&c.law)) t = std::max(t, 45.0 / e->rate);
    if (const auto* g = std::get_if<GammaLaw>(&c.law)) {
      t = std::max(t, (g->shape + 45.0 + 10.0 * std::sqrt(g->shape)) / g->rate);
    }
  }
  return t;
}

void check_index(const Fingerprint& fp, std::span<const std::size_t> index) {
  if (index.size() != fp.dim) throw Error(ErrorCode::GridDimensionMismatch, "index rank differs from dimension");
  for (std::size_t i = 0; i < fp.dim; ++i) {
    if (index[i] >= fp.grids[i].size()) throw Error(ErrorCode::InvalidArgument, "index out of range");
  }
}

std::vector<std::size_t> unravel(const std::vector<std::size_t>& shape, std::size_t flat) {
  std::vector<std::size_t> idx(shape.size());
  for (std::size_t i = shape.size(); i-- > 0;) {
    idx[i] = flat % shape[i];
    flat /= shape[i];
  }
  return idx;
}

}  // namespace

std::vector<std::size_t> Fingerprint::shape() const {
  std::vector<std::size_t> out;
  for (const auto& g : grids) out.push_back(g.size());
  return out;
}

std::size_t Fingerprint::offset(std::span<const std::size_t> index) const {
  check_index(*this, index);
  std::size_t flat = 0;
  for (std::size_t i = 0; i < dim; ++i) flat = flat * grids[i].size() + index[i];
  return flat;
}

Fingerprint compute_fingerprint(const AnyDistribution& dist, std::span<const MuntzSequence> grids,
                                std::span<const std::size_t> lens, Route route, const TransformOptions& opt) {
  const std::size_t d = dimension(dist);
  if (grids.size() != d || lens.size() != d) {
    throw Error(ErrorCode::GridDimensionMismatch, "distribution has dimension " + std::to_string(d) + " but " +
                                                      std::to_string(grids.size()) + " grids were given");
  }
  Fingerprint fp;
  fp.dim = d;
  fp.route = route;
  fp.tol = opt.tol;
  std::size_t cells = 1;
  for (std::size_t i = 0; i < d; ++i) {
    if (lens[i] < 1) throw Error(ErrorCode::InvalidArgument, "prefix length must be at least 1");
    fp.kinds.push_back(grids[i].kind());
    fp.grids.push_back(grids[i].prefix(lens[i]));
    cells *= lens[i];
  }
  const auto shape = fp.shape();
  fp.values.reserve(cells);
  std::vector<double> s(d);
  for (std::size_t flat = 0; flat < cells; ++flat) {
    const auto idx = unravel(shape, flat);
    for (std::size_t i = 0; i < d; ++i) s[i] = fp.grids[i][idx[i]];
    fp.values.push_back(transform(dist, s, route, opt));
  }
  return fp;
}

Fingerprint compute_fingerprint(const AnyDistribution& dist, const MuntzSequence& grid, std::size_t len, Route route,
                                const TransformOptions& opt) {
  const std::size_t d = dimension(dist);
  const std::vector<MuntzSequence> grids(d, grid);
  const std::vector<std::size_t> lens(d, len);
  return compute_fingerprint(dist, grids, lens, route, opt);
}

std::string_view to_string(Verdict v) { return v == Verdict::Distinct ? "distinct" : "indistinguishable"; }

Comparison compare(const Fingerprint& a, const Fingerprint& b, double tol) {
  if (!(tol >= 0.0)) throw Error(ErrorCode::InvalidArgument, "tol must be nonnegative");
  if (a.dim != b.dim || a.grids != b.grids || a.values.size() != b.values.size()) {
    throw Error(ErrorCode::GridMismatch, "fingerprints were taken on different grids");
  }
  Comparison c;
  c.margin = -std::numeric_limits<double>::infinity();
  std::size_t best = 0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    const double delta = std::abs(a.values[i].value - b.values[i].value);
    const double threshold = tol + a.values[i].est_error + b.values[i].est_error;
    if (delta > c.max_delta || i == 0) {
      c.max_delta = delta;
      best = i;
    }
    c.margin = std::max(c.margin, delta - threshold);
  }
  if (!a.values.empty()) {
    c.argmax = unravel(a.shape(), best);
    c.threshold = tol + a.values[best].est_error + b.values[best].est_error;
  }
  c.verdict = c.margin > 0.0 ? Verdict::Distinct : Verdict::Indistinguishable;
  std::ostringstream msg;
  msg.precision(3);
  if (c.verdict == Verdict::Distinct) {
    msg << "distinct: transforms differ by " << c.max_delta << " beyond the allowed error";
  } else {
    msg << "indistinguishable at tolerance " << tol << " on this grid prefix (max delta " << c.max_delta
        << "); this does not establish equality of the laws";
  }
  c.statement = msg.str();
  return c;
}

Distribution1D random_mixture(std::uint64_t seed, std::uint64_t stream) {
  auto rng = stream_rng(seed, stream);
  return Distribution1D::mixture(random_parts(rng));
}

double total_variation(const Distribution1D& a, const Distribution1D& b) {
  std::map<double, double> atoms;
  for (const auto& x : a.atoms()) atoms[x.location] += x.mass;
  for (const auto& x : b.atoms()) atoms[x.location] -= x.mass;
  double tv = 0.0;
  for (const auto& [loc, diff] : atoms) tv += std::abs(diff);
  if (!a.components().empty() || !b.components().empty()) {
    const double t = std::max(continuous_scale(a), continuous_scale(b));
    std::vector<double> bps;
    for (double x = 0.125; x < t; x *= 2.0) bps.push_back(x);
    auto gap = [&](double x) {
      const double fa = a.components().empty() ? 0.0 : a.density(x);
      const double fb = b.components().empty() ? 0.0 : b.density(x);
      return std::abs(fa - fb);
    };
    tv += quad::integrate(gap, 0.0, t, {1e-10, 0.0, 20000}, bps).value;
  }
  return 0.5 * tv;
}

ExperimentReport collision_experiment(std::uint64_t seed, std::size_t trials, const MuntzSequence& grid,
                                      std::size_t len, double tol) {
  ExperimentReport r;
  r.seed = seed;
  r.trials = trials;
  r.min_separation_margin = std::numeric_limits<double>::infinity();
  r.min_total_variation = std::numeric_limits<double>::infinity();
  for (std::size_t trial = 0; trial < trials; ++trial) {
    auto rng = stream_rng(seed, trial);
    const Parts parts = random_parts(rng);
    const auto first = Distribution1D::mixture(parts);
    const auto fa = compute_fingerprint(AnyDistribution{first}, grid, len);
    if (trial % 2 == 0) {
      Parts shuffled = parts;
      std::shuffle(shuffled.begin(), shuffled.end(), rng);
      const auto fb = compute_fingerprint(AnyDistribution{Distribution1D::mixture(shuffled)}, grid, len);
      const auto c = compare(fa, fb, tol);
      ++r.equal_pairs;
      r.max_equal_delta = std::max(r.max_equal_delta, c.max_delta);
      if (c.verdict == Verdict::Distinct) {
        ++r.false_splits;
        r.failed_trials.push_back(trial);
      }
      continue;
    }
    Distribution1D second = first;
    double tv = 0.0;
    for (int attempt = 0; attempt < 50 && tv < 0.01; ++attempt) {
      second = Distribution1D::mixture(perturb(parts, rng));
      tv = total_variation(first, second);
    }
    if (tv < 0.01) {
      ++r.skipped_pairs;
      continue;
    }
    const auto fb = compute_fingerprint(AnyDistribution{second}, grid, len);
    const auto c = compare(fa, fb, tol);
    ++r.unequal_pairs;
    r.min_total_variation = std::min(r.min_total_variation, tv);
    r.min_separation_margin = std::min(r.min_separation_margin, c.margin);
    if (c.verdict == Verdict::Indistinguishable) {
      ++r.false_merges;
      r.failed_trials.push_back(trial);
    }
  }
  if (r.unequal_pairs == 0) {
    r.min_separation_margin = 0.0;
    r.min_total_variation = 0.0;
  }
  return r;
}

nlohmann::ordered_json to_json(const Fingerprint& fp) {
  nlohmann::ordered_json grids = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < fp.dim; ++i) {
    grids.push_back({{"kind", to_string(fp.kinds[i])}, {"values", fp.grids[i]}});
  }
  std::vector<double> values;
  std::vector<double> errors;
  for (const auto& v : fp.values) {
    values.push_back(v.value);
    errors.push_back(v.est_error);
  }
  std::string route = fp.values.empty() ? std::string(to_string(fp.route))
                                        : std::string(to_string(fp.values.front().route));
  return nlohmann::ordered_json{{"dim", fp.dim},   {"shape", fp.shape()},  {"grids", grids},
                                {"route", route},  {"tol", fp.tol},        {"values", values},
                                {"est_errors", errors}};
}

nlohmann::ordered_json to_json(const Comparison& c) {
  return nlohmann::ordered_json{{"verdict", to_string(c.verdict)}, {"max_delta", c.max_delta},
                                {"argmax", c.argmax},              {"threshold", c.threshold},
                                {"margin", c.margin},              {"statement", c.statement}};
}

nlohmann::ordered_json to_json(const ExperimentReport& r) {
  return nlohmann::ordered_json{{"seed", r.seed},
                                {"trials", r.trials},
                                {"equal_pairs", r.equal_pairs},
                                {"unequal_pairs", r.unequal_pairs},
                                {"skipped_pairs", r.skipped_pairs},
                                {"false_merges", r.false_merges},
                                {"false_splits", r.false_splits},
                                {"min_separation_margin", r.min_separation_margin},
                                {"max_equal_delta", r.max_equal_delta},
                                {"min_total_variation", r.min_total_variation},
                                {"failed_trials", r.failed_trials}};
}

}  // namespace stieltjes
