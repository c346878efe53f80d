#include "icagg/aggregate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "icagg/errors.hpp"
#include "icagg/rng.hpp"

namespace icagg {

namespace {

using nlohmann::json;

// Fenwick tree over compressed coordinates.
class BitCounter {
 public:
  explicit BitCounter(std::size_t n) : tree_(n + 1, 0) {}
  void add(std::size_t i) {
    for (++i; i < tree_.size(); i += i & (~i + 1)) ++tree_[i];
  }
  std::size_t prefix(std::size_t i) const {  // count of indices <= i
    std::size_t s = 0;
    for (++i; i > 0; i -= i & (~i + 1)) s += tree_[i];
    return s;
  }

 private:
  std::vector<std::size_t> tree_;
};

// For every row, the fraction of rows componentwise <= it (inclusive).
// Bivariate case runs in n log n; higher dimensions fall back to the
// quadratic scan.
template <typename ValueAt>
std::vector<double> dominated_fractions(std::size_t n, int d, ValueAt value) {
  std::vector<double> out(n);
  if (d == 2) {
    std::vector<double> ys(n);
    for (std::size_t i = 0; i < n; ++i) ys[i] = value(i, 1);
    std::vector<double> sorted_y = ys;
    std::sort(sorted_y.begin(), sorted_y.end());
    sorted_y.erase(std::unique(sorted_y.begin(), sorted_y.end()), sorted_y.end());
    auto y_index = [&](double y) {
      return static_cast<std::size_t>(
          std::lower_bound(sorted_y.begin(), sorted_y.end(), y) -
          sorted_y.begin());
    };
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return value(a, 0) < value(b, 0);
    });
    BitCounter bit(sorted_y.size());
    std::size_t i = 0;
    while (i < n) {
      // Rows sharing an x value see each other, so insert the whole group
      // before querying any of its members.
      std::size_t j = i;
      while (j < n && value(order[j], 0) == value(order[i], 0)) ++j;
      for (std::size_t k = i; k < j; ++k) bit.add(y_index(ys[order[k]]));
      for (std::size_t k = i; k < j; ++k) {
        out[order[k]] = static_cast<double>(bit.prefix(y_index(ys[order[k]]))) /
                        static_cast<double>(n);
      }
      i = j;
    }
    return out;
  }
  for (std::size_t a = 0; a < n; ++a) {
    std::size_t count = 0;
    for (std::size_t b = 0; b < n; ++b) {
      bool dom = true;
      for (int c = 0; c < d && dom; ++c) dom = value(b, c) <= value(a, c);
      count += dom;
    }
    out[a] = static_cast<double>(count) / static_cast<double>(n);
  }
  return out;
}

void spot_check_monotone(const AggregationFunction& psi,
                         const SyntheticSample& s) {
  std::vector<double> lo(static_cast<std::size_t>(s.d)),
      hi(static_cast<std::size_t>(s.d));
  for (int c = 0; c < s.d; ++c) {
    lo[static_cast<std::size_t>(c)] = s.margins[static_cast<std::size_t>(c)].values().front();
    hi[static_cast<std::size_t>(c)] = s.margins[static_cast<std::size_t>(c)].values().back();
  }
  Rng rng(0x5eedc0deULL);
  std::vector<double> a(lo.size()), b(lo.size());
  for (int trial = 0; trial < 1000; ++trial) {
    for (std::size_t c = 0; c < lo.size(); ++c) {
      const double span = hi[c] - lo[c];
      double x = lo[c] + span * rng.uniform01();
      double y = lo[c] + span * rng.uniform01();
      a[c] = std::min(x, y);
      b[c] = std::max(x, y);
    }
    if (psi(a) > psi(b)) {
      throw std::invalid_argument(
          "aggregation function declared monotone violates monotonicity");
    }
  }
}

AggregationFunction parse_psi(const std::string& name) {
  if (name == "sum") return AggregationFunction::sum();
  if (name == "max") return AggregationFunction::max();
  throw ConfigError("unknown aggregation function '" + name + "'");
}

TreeNode parse_tree_node(const json& j) {
  if (!j.is_object()) throw ConfigError("tree node must be a JSON object");
  TreeNode node;
  if (j.contains("leaf")) {
    if (!j["leaf"].is_string() || j.size() != 1) {
      throw ConfigError("leaf node must be exactly {\"leaf\": \"id\"}");
    }
    node.leaf_id = j["leaf"].get<std::string>();
    return node;
  }
  if (!j.contains("copula") || !j.contains("children")) {
    throw ConfigError("branch node needs 'copula' and 'children'");
  }
  node.copula = CopulaModel::parse(j["copula"].get<std::string>());
  if (j.contains("psi")) node.psi = parse_psi(j["psi"].get<std::string>());
  if (!j["children"].is_array() || j["children"].size() < 2) {
    throw ConfigError("branch node needs at least two children");
  }
  for (const auto& c : j["children"]) node.children.push_back(parse_tree_node(c));
  if (node.copula->dimension() != static_cast<int>(node.children.size())) {
    throw ConfigError("copula dimension " +
                      std::to_string(node.copula->dimension()) +
                      " does not match child count " +
                      std::to_string(node.children.size()));
  }
  return node;
}

std::vector<double> tree_eval(const TreeNode& node, const std::string& path,
                              const std::map<std::string, std::vector<double>>& leaves,
                              std::uint64_t root_seed, TreeResult& result) {
  if (node.is_leaf()) {
    auto it = leaves.find(node.leaf_id);
    if (it == leaves.end()) {
      throw ConfigError("no sample supplied for leaf '" + node.leaf_id + "'");
    }
    return it->second;
  }
  std::vector<std::vector<double>> cols;
  cols.reserve(node.children.size());
  for (std::size_t i = 0; i < node.children.size(); ++i) {
    cols.push_back(tree_eval(node.children[i], path + "." + std::to_string(i),
                             leaves, root_seed, result));
  }
  const std::size_t n = cols.front().size();
  for (const auto& c : cols) {
    if (c.size() != n) {
      throw DataError("leaf samples under '" + path + "' differ in length");
    }
  }
  CopulaSample u = sample(*node.copula, n, derive_seed(root_seed, path));
  SyntheticSample syn = iman_conover(cols, compute_ranks(u));
  StepCdf cdf = aggregate_cdf(syn, node.psi);
  std::vector<double> up(n);
  for (std::size_t r = 0; r < n; ++r) up[r] = node.psi(syn.row(r));
  result.branches.push_back(TreeBranchResult{path, std::move(syn), std::move(cdf)});
  return up;
}

}  // namespace

AggregationFunction AggregationFunction::sum() {
  return AggregationFunction(Kind::Sum, true, "sum");
}

AggregationFunction AggregationFunction::max() {
  return AggregationFunction(Kind::Max, true, "max");
}

AggregationFunction AggregationFunction::custom(
    std::function<double(std::span<const double>)> f, bool declared_monotone,
    std::string name) {
  AggregationFunction a(Kind::Custom, declared_monotone, std::move(name));
  a.fn_ = std::move(f);
  return a;
}

double AggregationFunction::operator()(std::span<const double> row) const {
  switch (kind_) {
    case Kind::Sum: {
      double s = 0.0;
      for (double v : row) s += v;
      return s;
    }
    case Kind::Max: {
      double m = row[0];
      for (double v : row) m = std::max(m, v);
      return m;
    }
    case Kind::Custom:
      return fn_(row);
  }
  return 0.0;
}

StepCdf sum_cdf(const SyntheticSample& s) {
  return aggregate_cdf(s, AggregationFunction::sum());
}

StepCdf aggregate_cdf(const SyntheticSample& s, const AggregationFunction& psi) {
  if (s.n == 0) throw std::invalid_argument("empty sample");
  if (psi.kind() == AggregationFunction::Kind::Custom && psi.declared_monotone()) {
    spot_check_monotone(psi, s);
  }
  std::vector<double> values(s.n);
  for (std::size_t r = 0; r < s.n; ++r) values[r] = psi(s.row(r));
  return StepCdf::from_sample(std::move(values));
}

StepCdf sum_cdf_from_copula_points(
    const CopulaSample& u,
    const std::vector<std::vector<double>>& margin_samples) {
  if (static_cast<int>(margin_samples.size()) != u.d) {
    throw std::invalid_argument("margin count does not match copula sample");
  }
  std::vector<EmpiricalDistribution> cop_cols;
  std::vector<EmpiricalDistribution> margins;
  for (int c = 0; c < u.d; ++c) {
    std::vector<double> col(u.n);
    for (std::size_t r = 0; r < u.n; ++r) col[r] = u.at(r, c);
    cop_cols.emplace_back(std::move(col));
    if (margin_samples[static_cast<std::size_t>(c)].size() != u.n) {
      throw std::invalid_argument("margin length does not match copula sample");
    }
    margins.emplace_back(margin_samples[static_cast<std::size_t>(c)]);
  }
  std::vector<double> sums(u.n);
  for (std::size_t r = 0; r < u.n; ++r) {
    double s = 0.0;
    for (int c = 0; c < u.d; ++c) {
      s += margins[static_cast<std::size_t>(c)].quantile(
          cop_cols[static_cast<std::size_t>(c)].cdf(u.at(r, c)));
    }
    sums[r] = s;
  }
  return StepCdf::from_sample(std::move(sums));
}

StepCdf kendall_cdf(const SyntheticSample& s) {
  if (s.n == 0) throw std::invalid_argument("empty sample");
  auto fr = dominated_fractions(
      s.n, s.d, [&](std::size_t r, int c) { return s.at(r, c); });
  return StepCdf::from_sample(std::move(fr));
}

StepCdf kendall_cdf_from_ranks(const RankMatrix& ranks) {
  if (ranks.n == 0) throw std::invalid_argument("empty rank matrix");
  auto fr = dominated_fractions(ranks.n, ranks.d, [&](std::size_t r, int c) {
    return static_cast<double>(ranks.at(r, c));
  });
  return StepCdf::from_sample(std::move(fr));
}

std::map<double, RiskMeasures> risk_measures(const StepCdf& cdf,
                                             std::span<const double> levels) {
  const std::size_t n = cdf.sample_size();
  if (n == 0) {
    throw std::invalid_argument(
        "risk measures need a sample-backed cdf (tail averages count outcomes)");
  }
  std::map<double, RiskMeasures> out;
  for (double alpha : levels) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
      throw std::domain_error("risk level must lie in (0,1)");
    }
    RiskMeasures rm;
    rm.value_at_risk = cdf.quantile(alpha);
    // ceil(n*(1-alpha)) expressed as n - floor(n*alpha); the small nudge
    // keeps exact decimal levels stable in floating point.
    std::size_t m = n - static_cast<std::size_t>(std::floor(
                            static_cast<double>(n) * alpha + 1e-9));
    if (m == 0) m = 1;
    double acc = 0.0;
    std::size_t taken = 0;
    const auto& jumps = cdf.jump_points();
    for (std::size_t i = jumps.size(); i-- > 0 && taken < m;) {
      const double mass = cdf.levels()[i] - cdf.level_before(i);
      auto count = static_cast<std::size_t>(
          std::llround(mass * static_cast<double>(n)));
      const std::size_t take = std::min(count, m - taken);
      acc += jumps[i] * static_cast<double>(take);
      taken += take;
    }
    rm.expected_shortfall = acc / static_cast<double>(taken);
    out[alpha] = rm;
  }
  return out;
}

TreeNode parse_tree(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("tree config is not valid JSON: ") + e.what());
  }
  return parse_tree_node(j);
}

TreeResult tree_aggregate(const TreeNode& root,
                          const std::map<std::string, std::vector<double>>& leaves,
                          std::uint64_t seed) {
  if (root.is_leaf()) {
    throw ConfigError("tree root must be a branch");
  }
  TreeResult result;
  tree_eval(root, "root", leaves, seed, result);
  return result;
}

}  // namespace icagg
