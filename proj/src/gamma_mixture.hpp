#pragma once

// Joint laws written as countable mixtures of products of Gamma laws:
//   H(x) = sum_j w_j prod_i P(shape_i + k_ij, rate * x_i)
// with P the regularized lower incomplete gamma function. Shapes along each
// axis run over a ladder a, a+1, ..., a+N so every evaluation needs only two
// special-function calls per axis plus a recurrence.

#include <cstddef>
#include <span>
#include <vector>

namespace stieltjes::detail {

struct GammaLadder {
  double shape = 1.0;  // a
  std::size_t size = 1;  // N + 1
  std::vector<double> inv;  // 1 / (a + k + 1)
  std::vector<double> log_denom;  // log(a + k + 1)

  GammaLadder() = default;
  GammaLadder(double a, std::size_t n);

  // Fills p[k] = P(a + k, x) and q[k] = Q(a + k, x) for k < size.
  void evaluate(double x, std::vector<double>& p, std::vector<double>& q) const;
};

struct MixtureTerm {
  double weight;
  std::size_t index[3];  // ladder position along each axis
};

class GammaMixture {
 public:
  GammaMixture(std::size_t dim, std::vector<double> shapes, double rate, std::size_t ladder_size,
               std::vector<MixtureTerm> terms, double tail);

  std::size_t dim() const { return dim_; }
  double tail_bound() const { return tail_; }
  std::size_t terms() const { return terms_.size(); }
  std::size_t levels() const { return ladders_.front().size; }

  // Coordinates may be +infinity (marginalized) or negative (CDF zero).
  double cdf(std::span<const double> x) const;
  double survival(std::span<const double> x) const;

 private:
  double sum(std::span<const double> x, bool upper) const;

  std::size_t dim_;
  double rate_;
  std::vector<GammaLadder> ladders_;
  std::vector<MixtureTerm> terms_;
  double tail_;
};

// Moran-Downton with unit exponential marginals, correlation r in [0,1).
GammaMixture make_moran_downton(double r);
// Kibble bivariate gamma with transform (1-r)^q / (1-r+s+t+st)^q.
GammaMixture make_bivariate_gamma(double r, double q);
// Trivariate gamma with parameters alpha, a, b; a^2 + b^2 < 1.
GammaMixture make_trivariate_gamma(double alpha, double a, double b, std::size_t n_max = 60);

}  // namespace stieltjes::detail
