#include "icagg/margins.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "icagg/errors.hpp"
#include "icagg/normal.hpp"

namespace icagg {

namespace {

void check_finite(const std::vector<double>& sample) {
  for (double v : sample) {
    if (!std::isfinite(v)) throw DataError("non-finite value in sample");
  }
}

}  // namespace

EmpiricalDistribution::EmpiricalDistribution(std::vector<double> sample)
    : values_(std::move(sample)) {
  if (values_.empty()) throw DataError("empty sample");
  check_finite(values_);
  std::sort(values_.begin(), values_.end());
}

double EmpiricalDistribution::cdf(double t) const {
  auto it = std::upper_bound(values_.begin(), values_.end(), t);
  return static_cast<double>(it - values_.begin()) /
         static_cast<double>(values_.size());
}

double EmpiricalDistribution::quantile(double y) const {
  if (!(y > 0.0 && y <= 1.0)) {
    throw std::domain_error("quantile level must lie in (0,1]");
  }
  // Smallest k with k/n >= y, compared through the same floating-point
  // division the cdf uses, so cdf(quantile(y)) >= y holds exactly.
  const std::size_t n = values_.size();
  std::size_t lo = 1, hi = n;
  while (lo < hi) {
    std::size_t mid = lo + (hi - lo) / 2;
    if (static_cast<double>(mid) / static_cast<double>(n) >= y) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return values_[lo - 1];
}

EmpiricalDistribution ecdf_build(const std::vector<double>& sample) {
  return EmpiricalDistribution(sample);
}

MarginModel::MarginModel(MarginKind kind, double p1, double p2)
    : kind_(kind), p1_(p1), p2_(p2) {}

MarginModel MarginModel::normal(double mean, double stddev) {
  if (!(stddev > 0.0) || !std::isfinite(mean) || !std::isfinite(stddev)) {
    throw ConfigError("normal margin requires finite mean and stddev > 0");
  }
  return MarginModel(MarginKind::Normal, mean, stddev);
}

MarginModel MarginModel::exponential(double rate) {
  if (!(rate > 0.0) || !std::isfinite(rate)) {
    throw ConfigError("exponential margin requires rate > 0");
  }
  return MarginModel(MarginKind::Exponential, rate, 0.0);
}

MarginModel MarginModel::empirical(std::vector<double> sample) {
  MarginModel m(MarginKind::Empirical, 0.0, 0.0);
  m.emp_.emplace_back(std::move(sample));
  return m;
}

MarginModel MarginModel::parse(const std::string& config) {
  auto colon = config.find(':');
  if (colon == std::string::npos) {
    throw ConfigError("margin config must look like 'normal:mu,sigma' or 'exp:rate', got '" +
                      config + "'");
  }
  const std::string name = config.substr(0, colon);
  const std::string args = config.substr(colon + 1);
  auto parse_num = [&](const std::string& s) {
    try {
      std::size_t pos = 0;
      double v = std::stod(s, &pos);
      if (pos != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw ConfigError("bad numeric argument '" + s + "' in margin config '" +
                        config + "'");
    }
  };
  if (name == "normal") {
    auto comma = args.find(',');
    if (comma == std::string::npos) {
      throw ConfigError("normal margin needs 'normal:mu,sigma', got '" + config + "'");
    }
    return normal(parse_num(args.substr(0, comma)),
                  parse_num(args.substr(comma + 1)));
  }
  if (name == "exp") {
    return exponential(parse_num(args));
  }
  throw ConfigError("unknown margin kind '" + name + "'");
}

double MarginModel::cdf(double t) const {
  switch (kind_) {
    case MarginKind::Normal:
      return normal_cdf((t - p1_) / p2_);
    case MarginKind::Exponential:
      return t <= 0.0 ? 0.0 : -std::expm1(-p1_ * t);
    case MarginKind::Empirical:
      return emp_[0].cdf(t);
  }
  return 0.0;
}

double MarginModel::quantile(double y) const {
  if (!(y > 0.0 && y <= 1.0)) {
    throw std::domain_error("quantile level must lie in (0,1]");
  }
  switch (kind_) {
    case MarginKind::Normal:
      return p1_ + p2_ * normal_quantile(y);
    case MarginKind::Exponential:
      return y == 1.0 ? std::numeric_limits<double>::infinity()
                      : -std::log1p(-y) / p1_;
    case MarginKind::Empirical:
      return emp_[0].quantile(y);
  }
  return 0.0;
}

double MarginModel::pdf(double t) const {
  switch (kind_) {
    case MarginKind::Normal:
      return normal_pdf((t - p1_) / p2_) / p2_;
    case MarginKind::Exponential:
      return t < 0.0 ? 0.0 : p1_ * std::exp(-p1_ * t);
    case MarginKind::Empirical:
      throw std::domain_error("empirical margin has no density");
  }
  return 0.0;
}

const EmpiricalDistribution& MarginModel::sample_distribution() const {
  if (kind_ != MarginKind::Empirical) {
    throw std::domain_error("not an empirical margin");
  }
  return emp_[0];
}

std::string MarginModel::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case MarginKind::Normal:
      os << "normal:" << p1_ << "," << p2_;
      break;
    case MarginKind::Exponential:
      os << "exp:" << p1_;
      break;
    case MarginKind::Empirical:
      os << "empirical(n=" << emp_[0].size() << ")";
      break;
  }
  return os.str();
}

StepCdf::StepCdf(std::vector<double> jump_points, std::vector<double> levels,
                 std::size_t sample_size)
    : jumps_(std::move(jump_points)),
      levels_(std::move(levels)),
      sample_size_(sample_size) {
  if (jumps_.empty() || jumps_.size() != levels_.size()) {
    throw std::invalid_argument("step cdf needs matching non-empty jump/level lists");
  }
  for (std::size_t i = 0; i < jumps_.size(); ++i) {
    if (!std::isfinite(jumps_[i])) {
      throw std::invalid_argument("non-finite jump point");
    }
    if (i > 0 && !(jumps_[i] > jumps_[i - 1])) {
      throw std::invalid_argument("jump points must be strictly increasing");
    }
    if (!(levels_[i] > level_before(i)) || levels_[i] > 1.0) {
      throw std::invalid_argument("levels must be strictly increasing and end at 1");
    }
  }
  if (levels_.back() != 1.0) {
    throw std::invalid_argument("last level must equal 1");
  }
}

StepCdf StepCdf::from_sample(std::vector<double> values) {
  if (values.empty()) throw DataError("empty sample");
  check_finite(values);
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  std::vector<double> jumps, levels;
  jumps.reserve(n);
  levels.reserve(n);
  std::size_t seen = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && values[j] == values[i]) ++j;
    seen += j - i;
    jumps.push_back(values[i]);
    levels.push_back(static_cast<double>(seen) / static_cast<double>(n));
    i = j;
  }
  return StepCdf(std::move(jumps), std::move(levels), n);
}

StepCdf StepCdf::from_weighted(std::vector<double> points,
                               std::vector<double> weights) {
  if (points.size() != weights.size() || points.empty()) {
    throw std::invalid_argument("weighted cdf needs matching non-empty lists");
  }
  std::vector<std::size_t> order(points.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return points[a] < points[b]; });

  std::vector<double> jumps, cum;
  jumps.reserve(points.size());
  cum.reserve(points.size());
  double total = 0.0;
  for (std::size_t k : order) {
    const double w = weights[k];
    if (!(w >= 0.0) || !std::isfinite(w) || !std::isfinite(points[k])) {
      throw std::invalid_argument("weights must be finite and non-negative");
    }
    if (w == 0.0) continue;
    total += w;
    if (!jumps.empty() && jumps.back() == points[k]) {
      cum.back() = total;
    } else {
      jumps.push_back(points[k]);
      cum.push_back(total);
    }
  }
  if (jumps.empty()) throw std::invalid_argument("all weights are zero");
  // Normalize; drop sub-ulp increments that would break strict monotonicity
  // and stop at the first level that rounds up to 1.
  std::vector<double> jumps2, cum2;
  jumps2.reserve(jumps.size());
  cum2.reserve(jumps.size());
  for (std::size_t i = 0; i < jumps.size(); ++i) {
    const double level = cum[i] / total;
    if (level > (cum2.empty() ? 0.0 : cum2.back())) {
      jumps2.push_back(jumps[i]);
      cum2.push_back(level);
      if (level >= 1.0) break;
    }
  }
  cum2.back() = 1.0;
  return StepCdf(std::move(jumps2), std::move(cum2), 0);
}

double StepCdf::operator()(double t) const {
  auto it = std::upper_bound(jumps_.begin(), jumps_.end(), t);
  if (it == jumps_.begin()) return 0.0;
  return levels_[static_cast<std::size_t>(it - jumps_.begin()) - 1];
}

double StepCdf::quantile(double y) const {
  if (!(y > 0.0 && y <= 1.0)) {
    throw std::domain_error("quantile level must lie in (0,1]");
  }
  auto it = std::lower_bound(levels_.begin(), levels_.end(), y);
  if (it == levels_.end()) return jumps_.back();
  return jumps_[static_cast<std::size_t>(it - levels_.begin())];
}

double sup_distance(const StepCdf& a, const StepCdf& b) {
  const auto& ja = a.jump_points();
  const auto& jb = b.jump_points();
  double la = 0.0, lb = 0.0, best = 0.0;
  std::size_t i = 0, j = 0;
  while (i < ja.size() || j < jb.size()) {
    // Left limit just before the next event is covered by the current
    // levels; then apply every jump located at that event point.
    best = std::max(best, std::abs(la - lb));
    double x;
    if (j == jb.size() || (i < ja.size() && ja[i] <= jb[j])) {
      x = ja[i];
    } else {
      x = jb[j];
    }
    if (i < ja.size() && ja[i] == x) la = a.levels()[i++];
    if (j < jb.size() && jb[j] == x) lb = b.levels()[j++];
    best = std::max(best, std::abs(la - lb));
  }
  return best;
}

double sup_distance(const StepCdf& a, const std::function<double(double)>& b) {
  double best = 0.0;
  const auto& jumps = a.jump_points();
  for (std::size_t i = 0; i < jumps.size(); ++i) {
    const double bv = b(jumps[i]);
    best = std::max(best, std::abs(bv - a.levels()[i]));
    best = std::max(best, std::abs(bv - a.level_before(i)));
  }
  return best;
}

}  // namespace icagg
