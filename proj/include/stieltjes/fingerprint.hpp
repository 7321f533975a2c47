#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "stieltjes/catalog.hpp"
#include "stieltjes/muntz.hpp"
#include "stieltjes/transforms.hpp"

namespace stieltjes {

struct Fingerprint {
  std::size_t dim = 0;
  std::vector<SequenceKind> kinds;  // per axis
  std::vector<std::vector<double>> grids;  // per-axis prefixes
  std::vector<TransformValue> values;  // row-major, last axis fastest
  Route route = Route::Auto;
  double tol = 0.0;

  std::vector<std::size_t> shape() const;
  /// Row-major position of a multi-index.
  std::size_t offset(std::span<const std::size_t> index) const;
};

/// Transform values on every combination of the per-axis grid prefixes.
/// Throws GridDimensionMismatch when the grid count differs from the dimension.
Fingerprint compute_fingerprint(const AnyDistribution& dist, std::span<const MuntzSequence> grids,
                                std::span<const std::size_t> lens, Route route = Route::Auto,
                                const TransformOptions& opt = {});

/// Same grid and prefix length on every axis.
Fingerprint compute_fingerprint(const AnyDistribution& dist, const MuntzSequence& grid, std::size_t len,
                                Route route = Route::Auto, const TransformOptions& opt = {});

enum class Verdict { Indistinguishable, Distinct };

std::string_view to_string(Verdict v);

struct Comparison {
  double max_delta = 0.0;
  std::vector<std::size_t> argmax;  // multi-index of max_delta
  double threshold = 0.0;  // tol + both est_errors at argmax
  double margin = 0.0;  // largest (|delta| - per-cell threshold) over the tensor
  Verdict verdict = Verdict::Indistinguishable;
  std::string statement;
};

/// Distinct as soon as one cell differs by more than tol plus both cells'
/// est_error. Throws GridMismatch unless grids and shapes are identical.
Comparison compare(const Fingerprint& a, const Fingerprint& b, double tol);

struct ExperimentReport {
  std::uint64_t seed = 0;
  std::size_t trials = 0;
  std::size_t equal_pairs = 0;
  std::size_t unequal_pairs = 0;
  std::size_t skipped_pairs = 0;  // no perturbation reached total variation 0.01
  std::size_t false_merges = 0;  // unequal laws judged indistinguishable
  std::size_t false_splits = 0;  // equal laws judged distinct
  double min_separation_margin = 0.0;  // smallest margin over unequal pairs
  double max_equal_delta = 0.0;  // largest max_delta over equal pairs
  double min_total_variation = 0.0;  // over unequal pairs
  std::vector<std::size_t> failed_trials;
};

/// Random finite mixtures of atoms (at 0, 0.5, 1, 2), exponential and gamma
/// parts. Even trials compare a law with a reshuffled copy of itself; odd
/// trials compare it with a perturbation at total variation >= 0.01.
ExperimentReport collision_experiment(std::uint64_t seed, std::size_t trials, const MuntzSequence& grid,
                                      std::size_t len, double tol);

/// The random law of one trial; exposed for tests.
Distribution1D random_mixture(std::uint64_t seed, std::uint64_t stream);

/// Total variation distance of two atom + exponential/gamma mixtures.
double total_variation(const Distribution1D& a, const Distribution1D& b);

nlohmann::ordered_json to_json(const Fingerprint& fp);
nlohmann::ordered_json to_json(const Comparison& c);
nlohmann::ordered_json to_json(const ExperimentReport& r);

}  // namespace stieltjes
