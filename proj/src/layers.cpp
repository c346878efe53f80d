#include "icagg/layers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "icagg/errors.hpp"
#include "icagg/io.hpp"
#include "icagg/rng.hpp"

namespace icagg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kQuantileClip = 1e-6;

double support_lo(const MarginModel& m) {
  return m.kind() == MarginKind::Exponential ? 0.0 : -kInf;
}

double support_hi(const MarginModel&) { return kInf; }

double segment_distance_sq(double px, double py, double ax, double ay,
                           double bx, double by) {
  const double dx = bx - ax, dy = by - ay;
  const double len2 = dx * dx + dy * dy;
  double t = 0.0;
  if (len2 > 0.0) {
    t = std::clamp(((px - ax) * dx + (py - ay) * dy) / len2, 0.0, 1.0);
  }
  const double ex = px - (ax + t * dx), ey = py - (ay + t * dy);
  return ex * ex + ey * ey;
}

}  // namespace

bool layer_membership(const LowerLayerSpec& spec, std::span<const double> v) {
  if (spec.margins.size() < 2) {
    throw std::invalid_argument("layer needs at least two margins");
  }
  if (v.size() != spec.margins.size()) {
    throw std::invalid_argument("point dimension does not match layer margins");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!(v[i] > 0.0 && v[i] < 1.0)) {
      throw std::domain_error("layer membership requires interior points");
    }
    sum += spec.margins[i].quantile(v[i]);
  }
  return sum <= spec.threshold;
}

BoundaryCurve::BoundaryCurve(std::vector<double> xs, std::vector<double> ys)
    : xs_(std::move(xs)), ys_(std::move(ys)) {
  if (xs_.size() != ys_.size() || xs_.size() < 2) {
    throw std::invalid_argument("curve needs at least two vertices");
  }
  for (std::size_t i = 1; i < xs_.size(); ++i) {
    if (xs_[i] < xs_[i - 1] || ys_[i] > ys_[i - 1]) {
      throw std::invalid_argument("curve coordinates must be monotone");
    }
    const double dx = xs_[i] - xs_[i - 1], dy = ys_[i] - ys_[i - 1];
    max_chord_ = std::max(max_chord_, std::sqrt(dx * dx + dy * dy));
  }
}

// Scans only segments whose x-range meets [px-cap, px+cap] and whose y-range
// meets [py-cap, py+cap]; everything else is farther than cap in one
// coordinate alone. Both index windows are contiguous by monotonicity.
double BoundaryCurve::scan_window(double px, double py, double cap,
                                  bool early_exit) const {
  const std::size_t m = xs_.size();
  const double cap2 = cap * cap;

  auto first_x = std::lower_bound(xs_.begin(), xs_.end(), px - cap);
  std::size_t kx_lo =
      first_x == xs_.begin()
          ? 0
          : static_cast<std::size_t>(first_x - xs_.begin()) - 1;
  auto past_x = std::upper_bound(xs_.begin(), xs_.end(), px + cap);
  if (past_x == xs_.begin()) return kInf;
  std::size_t kx_hi = static_cast<std::size_t>(past_x - xs_.begin()) - 1;
  kx_hi = std::min(kx_hi, m - 2);

  // ys_ is non-increasing: reversed comparisons.
  auto first_y = std::lower_bound(ys_.begin(), ys_.end(), py + cap,
                                  [](double a, double b) { return a > b; });
  std::size_t ky_lo =
      first_y == ys_.begin()
          ? 0
          : static_cast<std::size_t>(first_y - ys_.begin()) - 1;
  auto past_y = std::upper_bound(ys_.begin(), ys_.end(), py - cap,
                                 [](double a, double b) { return a > b; });
  if (past_y == ys_.begin()) return kInf;
  std::size_t ky_hi = static_cast<std::size_t>(past_y - ys_.begin()) - 1;
  ky_hi = std::min(ky_hi, m - 2);

  const std::size_t lo = std::max(kx_lo, ky_lo);
  const std::size_t hi = std::min(kx_hi, ky_hi);
  double best = kInf;
  for (std::size_t k = lo; k <= hi && k < m - 1; ++k) {
    const double d2 = segment_distance_sq(px, py, xs_[k], ys_[k], xs_[k + 1],
                                          ys_[k + 1]);
    best = std::min(best, d2);
    if (early_exit && best <= cap2) return std::sqrt(best);
  }
  return std::sqrt(best);
}

double BoundaryCurve::distance(double px, double py) const {
  const std::size_t m = xs_.size();
  // Seed the search with segments nearest in each coordinate alone.
  double cap = kInf;
  auto probe = [&](std::size_t k) {
    if (k >= m - 1) return;
    cap = std::min(cap, std::sqrt(segment_distance_sq(
                            px, py, xs_[k], ys_[k], xs_[k + 1], ys_[k + 1])));
  };
  auto ix = std::lower_bound(xs_.begin(), xs_.end(), px) - xs_.begin();
  auto iy = std::lower_bound(ys_.begin(), ys_.end(), py,
                             [](double a, double b) { return a > b; }) -
            ys_.begin();
  for (long off = -2; off <= 2; ++off) {
    if (ix + off >= 0) probe(static_cast<std::size_t>(ix + off));
    if (iy + off >= 0) probe(static_cast<std::size_t>(iy + off));
  }
  const double exact = scan_window(px, py, cap, false);
  return std::min(cap, exact);
}

bool BoundaryCurve::within(double px, double py, double delta) const {
  return scan_window(px, py, delta, true) <= delta;
}

BoundaryCurve boundary_curve(const LowerLayerSpec& spec,
                             std::size_t resolution) {
  if (spec.margins.size() != 2) {
    throw std::invalid_argument("boundary curves are defined for two margins");
  }
  for (const auto& m : spec.margins) {
    if (!m.has_density()) {
      throw std::invalid_argument("boundary curves require continuous margins");
    }
  }
  if (resolution < 2) throw std::invalid_argument("resolution must be >= 2");
  const MarginModel& m1 = spec.margins[0];
  const MarginModel& m2 = spec.margins[1];
  const double t = spec.threshold;
  const double eps = kQuantileClip;

  // Keep s inside both supports (where the parameterization actually moves),
  // then clip what remains at the eps quantile levels.
  double s_lo = std::max(support_lo(m1), t - support_hi(m2));
  double s_hi = std::min(support_hi(m1), t - support_lo(m2));
  s_lo = std::max(s_lo, std::min(m1.quantile(eps), t - m2.quantile(1.0 - eps)));
  s_hi = std::min(s_hi, std::max(m1.quantile(1.0 - eps), t - m2.quantile(eps)));
  if (!(s_lo < s_hi)) {
    throw std::domain_error(
        "layer boundary does not intersect the open unit square");
  }

  std::vector<double> xs, ys;
  xs.reserve(resolution + 1);
  ys.reserve(resolution + 1);
  for (std::size_t k = 0; k <= resolution; ++k) {
    const double s =
        s_lo + (s_hi - s_lo) * static_cast<double>(k) /
                   static_cast<double>(resolution);
    double x = m1.cdf(s);
    double y = m2.cdf(t - s);
    // cdf evaluations are monotone in exact arithmetic; enforce it against
    // floating-point wobble so the window search stays valid.
    if (!xs.empty()) {
      x = std::max(x, xs.back());
      y = std::min(y, ys.back());
    }
    xs.push_back(x);
    ys.push_back(y);
  }
  return BoundaryCurve(std::move(xs), std::move(ys));
}

double distance_to_boundary(const BoundaryCurve& curve,
                            std::span<const double> u) {
  if (u.size() != 2) {
    throw std::invalid_argument("distance queries are two-dimensional");
  }
  return curve.distance(u[0], u[1]);
}

McEstimate volume_u_delta(const BoundaryCurve& curve, double delta,
                          std::size_t n_mc, std::uint64_t seed) {
  if (!(delta > 0.0)) throw std::invalid_argument("delta must be positive");
  if (n_mc == 0) throw std::invalid_argument("n_mc must be positive");
  Rng rng(seed);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < n_mc; ++i) {
    const double x = rng.uniform01();
    const double y = rng.uniform01();
    hits += curve.within(x, y, delta);
  }
  McEstimate e;
  e.estimate = static_cast<double>(hits) / static_cast<double>(n_mc);
  e.std_error = std::sqrt(e.estimate * (1.0 - e.estimate) /
                          static_cast<double>(n_mc));
  return e;
}

McEstimate copula_mass_u_delta(const CopulaModel& copula,
                               const BoundaryCurve& curve, double delta,
                               std::size_t n_mc, std::uint64_t seed) {
  if (copula.dimension() != 2) {
    throw std::invalid_argument("copula mass queries are two-dimensional");
  }
  if (!(delta > 0.0)) throw std::invalid_argument("delta must be positive");
  CopulaSample s = sample(copula, n_mc, seed);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < n_mc; ++i) {
    hits += curve.within(s.at(i, 0), s.at(i, 1), delta);
  }
  McEstimate e;
  e.estimate = static_cast<double>(hits) / static_cast<double>(n_mc);
  e.std_error = std::sqrt(e.estimate * (1.0 - e.estimate) /
                          static_cast<double>(n_mc));
  return e;
}

void write_csv(const BoundaryCurve& curve, std::ostream& out) {
  out << "u1,u2\n";
  for (std::size_t i = 0; i < curve.xs().size(); ++i) {
    out << format_double(curve.xs()[i]) << "," << format_double(curve.ys()[i])
        << "\n";
  }
}

}  // namespace icagg
