#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "icagg/copulas.hpp"
#include "icagg/margins.hpp"
#include "icagg/reorder.hpp"

namespace icagg {

// Row-wise aggregation map. Custom functions declare whether they are
// componentwise non-decreasing; the declaration is spot-checked on random
// ordered pairs the first time the function is applied to data.
class AggregationFunction {
 public:
  enum class Kind { Sum, Max, Custom };

  static AggregationFunction sum();
  static AggregationFunction max();
  static AggregationFunction custom(std::function<double(std::span<const double>)> f,
                                    bool declared_monotone,
                                    std::string name = "custom");

  Kind kind() const { return kind_; }
  bool declared_monotone() const { return declared_monotone_; }
  const std::string& name() const { return name_; }
  double operator()(std::span<const double> row) const;

 private:
  AggregationFunction(Kind k, bool monotone, std::string name)
      : kind_(k), declared_monotone_(monotone), name_(std::move(name)) {}
  Kind kind_;
  bool declared_monotone_;
  std::string name_;
  std::function<double(std::span<const double>)> fn_;
};

// ECDF of the row sums of a synthetic sample.
StepCdf sum_cdf(const SyntheticSample& s);

// ECDF of psi applied to every row. For custom psi declared monotone, a
// 1000-pair ordered spot check over the data's bounding box runs first and
// throws std::invalid_argument on a violation.
StepCdf aggregate_cdf(const SyntheticSample& s, const AggregationFunction& psi);

// Same sum distribution, computed through the dependence sample instead of
// the rank matrix: each copula row is pushed through the column ECDFs of the
// copula sample and then through the margin quantiles. Agrees with
// sum_cdf(iman_conover(...)) exactly, jump for jump.
StepCdf sum_cdf_from_copula_points(
    const CopulaSample& u, const std::vector<std::vector<double>>& margin_samples);

// ECDF of the joint empirical CDF evaluated at the sample's own rows
// (margin-free dependence diagnostic).
StepCdf kendall_cdf(const SyntheticSample& s);
// Rank-only variant; identical to kendall_cdf for tie-free margins.
StepCdf kendall_cdf_from_ranks(const RankMatrix& ranks);

struct RiskMeasures {
  double value_at_risk = 0.0;
  double expected_shortfall = 0.0;
};

// VaR is the step-CDF quantile; ES averages the worst ceil(n*(1-alpha))
// outcomes, so the cdf must be sample-backed.
std::map<double, RiskMeasures> risk_measures(const StepCdf& cdf,
                                             std::span<const double> levels);

// Aggregation tree: leaves name input samples, branches carry a copula whose
// dimension equals the child count plus an aggregation function (sum unless
// specified).
struct TreeNode {
  std::string leaf_id;  // set iff leaf
  std::optional<CopulaModel> copula;
  AggregationFunction psi = AggregationFunction::sum();
  std::vector<TreeNode> children;
  bool is_leaf() const { return children.empty(); }
};

// JSON shape: {"leaf":"id"} or
// {"copula":"gauss:0.5","psi":"sum","children":[...]}.
TreeNode parse_tree(const std::string& json_text);

struct TreeBranchResult {
  std::string path;
  SyntheticSample sample;
  StepCdf cdf;
};

struct TreeResult {
  std::vector<TreeBranchResult> branches;  // depth-first, root last
  const TreeBranchResult& root() const { return branches.back(); }
};

// Bottom-up evaluation: every branch reorders its children's columns (leaf
// samples or child aggregates) by its own copula sample and passes the psi
// column upward. Branch seeds derive from the root seed and the node path.
TreeResult tree_aggregate(const TreeNode& root,
                          const std::map<std::string, std::vector<double>>& leaves,
                          std::uint64_t seed);

}  // namespace icagg
