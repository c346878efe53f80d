#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace icagg {

enum class CopulaKind { Independence, ClaytonBivariate, GaussBivariate, GaussMulti };

// Sample drawn from a copula: n rows in (0,1)^d, row-major, tie-free within
// every column, together with the seed that replays it.
struct CopulaSample {
  std::size_t n = 0;
  int d = 0;
  std::uint64_t seed = 0;
  std::vector<double> data;

  double at(std::size_t row, int col) const {
    return data[row * static_cast<std::size_t>(d) + static_cast<std::size_t>(col)];
  }
};

// Least-squares fit of log sup-density against log(1/eps).
struct GrowthFit {
  double log_c = 0.0;
  double exponent = 0.0;
  double r_squared = 1.0;
};

// Entropy-style integral of sqrt(log sup-density) controlling how fast the
// density may blow up near the boundary of the unit cube.
struct TailIntegralReport {
  double value = 0.0;       // quadrature over [eps_min, 1/2]
  double tail_bound = 0.0;  // extrapolated bound for (0, eps_min)
  GrowthFit growth;
  bool finite = false;
  double total() const { return value + tail_bound; }
};

class CopulaModel {
 public:
  static CopulaModel independence(int d);
  static CopulaModel clayton(double theta);
  static CopulaModel gauss(double rho);
  static CopulaModel gauss_multi(std::vector<std::vector<double>> corr);
  // "indep:d", "clayton:theta", "gauss:rho", "gaussmulti:matrix.csv"
  static CopulaModel parse(const std::string& config);

  CopulaKind kind() const { return kind_; }
  int dimension() const { return d_; }
  double theta() const;
  double rho() const;  // bivariate Gauss (incl. 2x2 matrix form)
  const std::vector<std::vector<double>>& correlation() const;
  std::string describe() const { return config_; }

  // Density at a strictly interior point of (0,1)^d; std::domain_error on
  // boundary points. log_density avoids overflow where the density is huge.
  double density(std::span<const double> u) const;
  double log_density(std::span<const double> u) const;

  // Location of the density maximum in the first coordinate for fixed u2
  // (clamped to 1). Defined for Clayton and for bivariate Gauss with
  // rho != 0; otherwise throws std::domain_error("no ridge").
  bool has_ridge() const;
  double ridge(double u2) const;

  // Supremum of the density over [eps, 1-eps]^2: coarse grid plus edge and
  // ridge sweeps, then two local refinement passes.
  double k_epsilon(double eps) const;
  double log_k_epsilon(double eps) const;

  GrowthFit fit_density_growth(const std::vector<double>& eps_list) const;
  // Integral of sqrt(log k_epsilon(eps^2)) over [1e-4, 1/2] plus a tail
  // bound extrapolated from the fitted polynomial growth of k_epsilon.
  TailIntegralReport entropy_integral() const;

 private:
  CopulaModel() = default;

  CopulaKind kind_ = CopulaKind::Independence;
  int d_ = 2;
  double theta_ = 0.0;
  double rho_ = 0.0;
  std::string config_;
  // GaussMulti internals
  std::vector<std::vector<double>> corr_;
  std::vector<std::vector<double>> chol_;  // lower-triangular factor
  double log_det_ = 0.0;
};

// Draws n rows; every column is strictly inside (0,1) and tie-free (tied
// values are nudged apart by single ulps, later rows move).
CopulaSample sample(const CopulaModel& model, std::size_t n, std::uint64_t seed);

}  // namespace icagg
