#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "stieltjes/distribution1d.hpp"
#include "stieltjes/joint_dist.hpp"

namespace stieltjes {

using AnyDistribution = std::variant<Distribution1D, JointDist>;
using Params = std::map<std::string, double>;

std::size_t dimension(const AnyDistribution& dist);

struct CatalogEntry {
  std::string name;
  std::vector<std::string> params;
  std::string components;  // "" when the kind takes no component laws
  std::string constraints;
};

const std::vector<CatalogEntry>& catalog_entries();

/// Builds a named law. `components` feeds "product" (2-4 factors) and "blm"
/// (exactly F and G). Throws UnknownCatalogName or ParameterOutOfRange.
AnyDistribution make_catalog(const std::string& name, const Params& params,
                             std::vector<Distribution1D> components = {});

struct StableSeries {
  double value = 0.0;
  double error_bound = 0.0;  // magnitude bound of the first omitted term
  int terms_used = 0;
};

/// Partial sum of the positive stable density series in powers of x^-alpha.
/// Throws SeriesDiverged when terms are still growing at the cutoff.
StableSeries positive_stable_density(double alpha, double x, int terms);

/// Joint survival from the CDF and all lower-order marginals by
/// inclusion-exclusion.
double inclusion_exclusion_survival(const JointDist& joint, std::span<const double> x);

}  // namespace stieltjes
