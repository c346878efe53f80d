#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

namespace icagg {

// Empirical distribution of a one-dimensional sample. Values are kept
// sorted; cdf is the right-continuous step function k/n and quantile is the
// left-continuous generalized inverse (the ceil(n*y)-th order statistic).
class EmpiricalDistribution {
 public:
  // Sorts the sample. Throws DataError on empty input or non-finite values.
  explicit EmpiricalDistribution(std::vector<double> sample);

  std::size_t size() const { return values_.size(); }
  const std::vector<double>& values() const { return values_; }

  double cdf(double t) const;
  // y in (0,1]; chosen as the smallest order statistic whose cdf level
  // reaches y, so the cdf/quantile pair satisfies the Galois inequalities
  // exactly in floating point. Throws std::domain_error outside (0,1].
  double quantile(double y) const;

 private:
  std::vector<double> values_;
};

EmpiricalDistribution ecdf_build(const std::vector<double>& sample);

enum class MarginKind { Normal, Exponential, Empirical };

// One marginal distribution: parametric (normal, exponential) or empirical.
class MarginModel {
 public:
  static MarginModel normal(double mean, double stddev);
  static MarginModel exponential(double rate);
  static MarginModel empirical(std::vector<double> sample);
  // Accepts "normal:mu,sigma" and "exp:rate". Throws ConfigError otherwise.
  static MarginModel parse(const std::string& config);

  MarginKind kind() const { return kind_; }
  double cdf(double t) const;
  // y in (0,1]; may return +inf at y == 1 for unbounded margins.
  double quantile(double y) const;
  bool has_density() const { return kind_ != MarginKind::Empirical; }
  double pdf(double t) const;  // normal/exponential only

  double param1() const { return p1_; }  // mean / rate
  double param2() const { return p2_; }  // stddev
  const EmpiricalDistribution& sample_distribution() const;
  std::string describe() const;

 private:
  MarginModel(MarginKind kind, double p1, double p2);
  MarginKind kind_;
  double p1_ = 0.0;
  double p2_ = 0.0;
  std::vector<EmpiricalDistribution> emp_;  // empty unless empirical
};

// Right-continuous step CDF given by its jump points and the cumulative
// levels reached there. When built from a sample the total count is kept so
// tail averages can be computed over individual outcomes.
class StepCdf {
 public:
  StepCdf(std::vector<double> jump_points, std::vector<double> levels,
          std::size_t sample_size = 0);
  static StepCdf from_sample(std::vector<double> values);
  // Weighted atoms (weights > 0 are kept, others dropped); levels are
  // normalized so the last one is exactly 1.
  static StepCdf from_weighted(std::vector<double> points,
                               std::vector<double> weights);

  double operator()(double t) const;
  // Smallest jump point whose level reaches y; y in (0,1].
  double quantile(double y) const;

  std::size_t jump_count() const { return jumps_.size(); }
  const std::vector<double>& jump_points() const { return jumps_; }
  const std::vector<double>& levels() const { return levels_; }
  double level_before(std::size_t i) const {
    return i == 0 ? 0.0 : levels_[i - 1];
  }
  // Number of sample points behind the cdf; 0 for weighted builds.
  std::size_t sample_size() const { return sample_size_; }

 private:
  std::vector<double> jumps_;
  std::vector<double> levels_;
  std::size_t sample_size_;
};

// Exact Kolmogorov distance between two step CDFs (merge walk over both jump
// sets, left limits included).
double sup_distance(const StepCdf& a, const StepCdf& b);

// Kolmogorov distance between a step CDF and a continuous non-decreasing
// reference; evaluating the reference at the jump points against the level
// and the previous level is exact in that case.
double sup_distance(const StepCdf& a, const std::function<double(double)>& b);

}  // namespace icagg
