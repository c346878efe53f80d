#pragma once

#include <cstdint>
#include <ostream>
#include <span>
#include <vector>

#include "icagg/copulas.hpp"
#include "icagg/margins.hpp"

namespace icagg {

// Lower layer in the unit cube: points v with sum_i quantile_i(v_i) <= t.
// Membership is defined for strictly interior points only.
struct LowerLayerSpec {
  std::vector<MarginModel> margins;
  double threshold = 0.0;
};

bool layer_membership(const LowerLayerSpec& spec, std::span<const double> v);

// Polyline approximation of the layer's upper boundary for d=2 continuous
// margins: s -> (F1(s), F2(t-s)). The first coordinate never decreases and
// the second never increases along the curve. Point-to-curve distances
// overestimate the true curve distance by at most half the longest chord.
class BoundaryCurve {
 public:
  BoundaryCurve(std::vector<double> xs, std::vector<double> ys);

  const std::vector<double>& xs() const { return xs_; }
  const std::vector<double>& ys() const { return ys_; }
  std::size_t segment_count() const { return xs_.size() - 1; }
  double max_chord() const { return max_chord_; }

  // Exact minimal distance to the polyline.
  double distance(double px, double py) const;
  // Certified indicator for distance <= delta; both coordinate windows are
  // pruned through the curve's monotonicity before any segment is touched.
  bool within(double px, double py, double delta) const;

 private:
  double scan_window(double px, double py, double cap, bool early_exit) const;
  std::vector<double> xs_;  // non-decreasing
  std::vector<double> ys_;  // non-increasing
  double max_chord_ = 0.0;
};

// Builds the boundary polyline. The parameter range keeps both coordinates
// inside their margins' supports and is clipped at quantile levels
// [1e-6, 1-1e-6]. Throws std::domain_error when the layer has no boundary
// inside the open square (threshold outside the reachable sum range).
BoundaryCurve boundary_curve(const LowerLayerSpec& spec,
                             std::size_t resolution = 10000);

double distance_to_boundary(const BoundaryCurve& curve,
                            std::span<const double> u);

struct McEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
};

// Lebesgue volume of the delta-neighborhood of the curve, by uniform Monte
// Carlo on the unit square.
McEstimate volume_u_delta(const BoundaryCurve& curve, double delta,
                          std::size_t n_mc, std::uint64_t seed);

// Copula mass of the same neighborhood, by sampling the copula.
McEstimate copula_mass_u_delta(const CopulaModel& copula,
                               const BoundaryCurve& curve, double delta,
                               std::size_t n_mc, std::uint64_t seed);

// CSV with header "u1,u2".
void write_csv(const BoundaryCurve& curve, std::ostream& out);

}  // namespace icagg
