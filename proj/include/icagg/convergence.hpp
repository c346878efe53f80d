#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "icagg/copulas.hpp"
#include "icagg/margins.hpp"

namespace icagg {

enum class OracleKind {
  ClosedFormNormalSum,   // Gauss copula + normal margins
  ClosedFormGammaSum,    // independence + equal-rate exponential margins
  NumericConvolution,    // independence + arbitrary margins, quadrature
  NumericLayerIntegral,  // d=2, density-weighted cell sums over the layer
  HighNReference         // the pipeline itself at a large fixed n
};

struct OracleSpec {
  OracleKind kind = OracleKind::ClosedFormNormalSum;
  // NumericConvolution: points of the output grid (default 4097).
  // NumericLayerIntegral: cells per axis (default 2000).
  std::size_t grid = 0;
  std::size_t reference_n = 1000000;  // HighNReference only
};

// Reference CDF for the aggregate sum, as a plain callable.
struct OracleCdf {
  std::string name;
  std::function<double(double)> value;
};

// Validates compatibility (throwing OracleError before any simulation would
// run) and builds the reference.
OracleCdf oracle_cdf(const OracleSpec& spec, const CopulaModel& copula,
                     const std::vector<MarginModel>& margins,
                     std::uint64_t seed = 0x51CB8E57ULL);

// Cumulative distribution of a sum of `shape` independent Exp(rate) terms.
double erlang_cdf(int shape, double rate, double t);

enum class EstimatorKind {
  RankReorder,  // margins rearranged by the dependence sample's ranks
  DirectPlugin  // dependence sample pushed through margin ECDF quantiles
};

struct ExperimentConfig {
  ExperimentConfig(CopulaModel c, std::vector<MarginModel> m)
      : copula(std::move(c)), margins(std::move(m)) {}

  CopulaModel copula;
  std::vector<MarginModel> margins;
  std::vector<std::size_t> n_grid;
  std::size_t replications = 20;
  OracleSpec oracle;
  std::uint64_t seed = 1;
  EstimatorKind estimator = EstimatorKind::RankReorder;
  int threads = 1;
};

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 1.0;
};

struct ConvergenceReport {
  std::vector<std::size_t> n_grid;
  std::vector<std::vector<double>> sup_distances;  // [n index][replication]
  std::vector<double> medians;
  std::vector<double> q25;
  std::vector<double> q75;
  RateFit rate;
  std::string oracle_name;
  EstimatorKind estimator = EstimatorKind::RankReorder;
  std::uint64_t seed = 0;
};

// Draws fresh margin samples and a fresh dependence sample per replication,
// forms the aggregate-sum ECDF and measures its Kolmogorov distance to the
// oracle. Replication seeds derive from (seed, n, replication), so reports
// are identical across thread counts and reruns.
ConvergenceReport run_experiment(const ExperimentConfig& config);

// Least squares of log2(median distance) on log2(n); needs >= 3 grid points.
RateFit fit_rate(const std::vector<std::size_t>& n_grid,
                 const std::vector<double>& medians);
RateFit fit_rate(const ConvergenceReport& report);

}  // namespace icagg
