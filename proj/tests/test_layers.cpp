#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "icagg/copulas.hpp"
#include "icagg/errors.hpp"
#include "icagg/layers.hpp"
#include "icagg/margins.hpp"
#include "icagg/normal.hpp"
#include "icagg/rng.hpp"

using namespace icagg;

namespace {

std::vector<MarginModel> std_normals() {
  return {MarginModel::normal(0.0, 1.0), MarginModel::normal(0.0, 1.0)};
}

// Point-to-segment distance, written independently of the library's
// window-pruned version.
double brute_distance(const BoundaryCurve& c, double px, double py) {
  double best = 1e300;
  for (std::size_t i = 0; i + 1 < c.xs().size(); ++i) {
    const double ax = c.xs()[i], ay = c.ys()[i];
    const double bx = c.xs()[i + 1], by = c.ys()[i + 1];
    const double vx = bx - ax, vy = by - ay;
    const double len2 = vx * vx + vy * vy;
    double t = len2 > 0.0 ? ((px - ax) * vx + (py - ay) * vy) / len2 : 0.0;
    t = std::min(1.0, std::max(0.0, t));
    const double dx = px - (ax + t * vx), dy = py - (ay + t * vy);
    best = std::min(best, std::sqrt(dx * dx + dy * dy));
  }
  return best;
}

}  // namespace

TEST_CASE("standard normal layer at zero is the lower triangle") {
  const LowerLayerSpec spec{std_normals(), 0.0};
  CHECK(layer_membership(spec, std::vector<double>{0.3, 0.6}));
  CHECK(!layer_membership(spec, std::vector<double>{0.6, 0.5}));
  // The interior membership set is exactly {u1 + u2 <= 1}.
  for (int i = 1; i < 40; ++i) {
    for (int j = 1; j < 40; ++j) {
      const double u1 = i / 40.0, u2 = j / 40.0;
      if (std::abs(u1 + u2 - 1.0) < 1e-12) continue;
      CHECK(layer_membership(spec, std::vector<double>{u1, u2}) ==
            (u1 + u2 < 1.0));
    }
  }
}

TEST_CASE("huge thresholds contain every interior point") {
  const LowerLayerSpec spec{std_normals(), 1e12};
  Rng rng(1);
  for (int i = 0; i < 100; ++i) {
    CHECK(layer_membership(
        spec, std::vector<double>{rng.uniform01(), rng.uniform01()}));
  }
}

TEST_CASE("exponential layer membership through quantiles") {
  const LowerLayerSpec spec{
      {MarginModel::exponential(1.0), MarginModel::exponential(1.0)}, 2.0};
  const double v[2] = {1.0 - std::exp(-0.5), 1.0 - std::exp(-1.0)};
  CHECK(layer_membership(spec, v));  // 0.5 + 1.0 <= 2
  const double w[2] = {1.0 - std::exp(-1.5), 1.0 - std::exp(-1.0)};
  CHECK(!layer_membership(spec, w));  // 1.5 + 1.0 > 2
}

TEST_CASE("membership requires interior points and matching dimension") {
  const LowerLayerSpec spec{std_normals(), 0.0};
  CHECK_THROWS_AS(layer_membership(spec, std::vector<double>{0.0, 0.5}),
                  std::domain_error);
  CHECK_THROWS_AS(layer_membership(spec, std::vector<double>{0.5, 1.0}),
                  std::domain_error);
  CHECK_THROWS_AS(layer_membership(spec, std::vector<double>{0.5}),
                  std::invalid_argument);
  LowerLayerSpec tiny{{MarginModel::normal(0.0, 1.0)}, 0.0};
  CHECK_THROWS_AS(layer_membership(tiny, std::vector<double>{0.5}),
                  std::invalid_argument);
}

TEST_CASE("membership works beyond two dimensions") {
  const LowerLayerSpec spec{{MarginModel::exponential(1.0),
                             MarginModel::exponential(1.0),
                             MarginModel::exponential(1.0)},
                            3.0};
  CHECK(layer_membership(spec, std::vector<double>{0.5, 0.5, 0.5}));
  CHECK(!layer_membership(spec, std::vector<double>{0.9, 0.9, 0.9}));
}

TEST_CASE("layers are lower sets") {
  const LowerLayerSpec spec{
      {MarginModel::exponential(0.8), MarginModel::normal(1.0, 2.0)}, 2.5};
  Rng rng(2);
  int inside = 0;
  for (int i = 0; i < 1000; ++i) {
    double u[2] = {rng.uniform01(), rng.uniform01()};
    if (!layer_membership(spec, u)) continue;
    ++inside;
    const double v[2] = {u[0] * rng.uniform01(), u[1] * rng.uniform01()};
    if (v[0] <= 0.0 || v[1] <= 0.0) continue;
    CHECK(layer_membership(spec, v));
  }
  CHECK(inside > 100);  // the check above must actually exercise pairs
}

TEST_CASE("standard normal boundary at zero is the anti-diagonal") {
  const auto curve = boundary_curve({std_normals(), 0.0}, 2000);
  for (std::size_t i = 0; i < curve.xs().size(); ++i) {
    CHECK(std::abs(curve.xs()[i] + curve.ys()[i] - 1.0) < 1e-12);
  }
}

TEST_CASE("boundary curves are monotone polylines") {
  const std::vector<MarginModel> margins{MarginModel::normal(0.0, 1.0),
                                         MarginModel::normal(0.0, 0.5)};
  for (double t : {-2.0, 0.0, 2.0}) {
    const auto curve = boundary_curve({margins, t}, 5000);
    for (std::size_t i = 1; i < curve.xs().size(); ++i) {
      CHECK(curve.xs()[i] >= curve.xs()[i - 1]);
      CHECK(curve.ys()[i] <= curve.ys()[i - 1]);
    }
  }
}

TEST_CASE("boundary curves nest as the threshold grows") {
  const std::vector<MarginModel> margins{MarginModel::normal(0.0, 1.0),
                                         MarginModel::normal(0.0, 0.5)};
  const auto lo = boundary_curve({margins, -2.0}, 4000);
  const auto hi = boundary_curve({margins, 2.0}, 4000);
  // At equal first coordinates, the larger threshold allows more of the
  // second margin: interpolate hi's second coordinate at lo's vertices.
  for (std::size_t i = 0; i < lo.xs().size(); i += 37) {
    const double x = lo.xs()[i];
    const auto it = std::lower_bound(hi.xs().begin(), hi.xs().end(), x);
    if (it == hi.xs().begin() || it == hi.xs().end()) continue;
    const std::size_t k = static_cast<std::size_t>(it - hi.xs().begin());
    const double w =
        (x - hi.xs()[k - 1]) / (hi.xs()[k] - hi.xs()[k - 1]);
    const double y_hi = hi.ys()[k - 1] + w * (hi.ys()[k] - hi.ys()[k - 1]);
    CHECK(y_hi >= lo.ys()[i] - 1e-9);
  }
}

TEST_CASE("exponential boundary endpoints touch the axes") {
  const auto curve = boundary_curve(
      {{MarginModel::exponential(1.0), MarginModel::exponential(0.7)}, 1.0},
      10000);
  CHECK(std::abs(curve.xs().front() - 0.0) <= 2e-6);
  CHECK(std::abs(curve.ys().front() - (1.0 - std::exp(-0.7))) <= 2e-6);
  CHECK(std::abs(curve.xs().back() - (1.0 - std::exp(-1.0))) <= 2e-6);
  CHECK(std::abs(curve.ys().back() - 0.0) <= 2e-6);
}

TEST_CASE("boundary curve validation") {
  CHECK_THROWS_AS(boundary_curve({std_normals(), 0.0}, 1), std::invalid_argument);
  CHECK_THROWS_AS(
      boundary_curve({{MarginModel::normal(0.0, 1.0)}, 0.0}, 100),
      std::invalid_argument);
  CHECK_THROWS_AS(
      boundary_curve({{MarginModel::empirical({1.0, 2.0}),
                       MarginModel::normal(0.0, 1.0)},
                      0.0},
                     100),
      std::invalid_argument);
  // Exponential sums cannot reach negative thresholds.
  CHECK_THROWS_AS(
      boundary_curve({{MarginModel::exponential(1.0),
                       MarginModel::exponential(1.0)},
                      -1.0},
                     100),
      std::domain_error);
}

TEST_CASE("distance to the anti-diagonal boundary") {
  const auto curve = boundary_curve({std_normals(), 0.0}, 20000);
  CHECK(curve.distance(0.5, 0.5) < 1e-9);
  CHECK(curve.distance(0.6, 0.6) ==
        doctest::Approx(0.2 / std::sqrt(2.0)).epsilon(1e-4));
  CHECK(distance_to_boundary(curve, std::vector<double>{0.6, 0.6}) ==
        doctest::Approx(0.2 / std::sqrt(2.0)).epsilon(1e-4));

  // Points sampled on the analytic curve sit within half a chord.
  const std::vector<MarginModel> margins = std_normals();
  for (double s : {-2.0, -0.5, 0.0, 1.0, 2.5}) {
    const double on[2] = {normal_cdf(s), normal_cdf(-s)};
    CHECK(curve.distance(on[0], on[1]) <= curve.max_chord() / 2.0 + 1e-12);
  }
}

TEST_CASE("window-pruned distances equal brute force") {
  const auto curve = boundary_curve(
      {{MarginModel::exponential(1.0), MarginModel::normal(0.5, 1.5)}, 1.5},
      3000);
  Rng rng(3);
  for (int i = 0; i < 300; ++i) {
    const double px = rng.uniform01(), py = rng.uniform01();
    const double fast = curve.distance(px, py);
    const double slow = brute_distance(curve, px, py);
    CHECK(fast == doctest::Approx(slow).epsilon(1e-12));
    const double delta = 0.05 + 0.2 * rng.uniform01();
    if (std::abs(slow - delta) > 1e-9) {
      CHECK(curve.within(px, py, delta) == (slow <= delta));
    }
  }
}

TEST_CASE("a diameter-sized neighborhood covers the square") {
  const auto curve = boundary_curve({std_normals(), 0.0}, 1000);
  const auto est = volume_u_delta(curve, 1.5, 20000, 4);
  CHECK(est.estimate == 1.0);
  CHECK(est.std_error == 0.0);
}

TEST_CASE("neighborhood volume of the anti-diagonal matches the strip area") {
  const auto curve = boundary_curve({std_normals(), 0.0}, 20000);
  const double delta = 0.05;
  // Band |u1+u2-1| <= delta*sqrt(2) clipped to the square: 2*sqrt(2)*delta
  // - 2*delta^2; the end caps add nothing inside the square.
  const double exact = 2.0 * std::sqrt(2.0) * delta - 2.0 * delta * delta;
  const auto est = volume_u_delta(curve, delta, 200000, 5);
  CHECK(std::abs(est.estimate - exact) <= 4.0 * est.std_error);
  CHECK(est.std_error > 0.0);
}

TEST_CASE("neighborhood volume obeys the linear-in-delta bound") {
  const std::vector<LowerLayerSpec> specs = {
      {std_normals(), 0.0},
      {std_normals(), -1.0},
      {{MarginModel::exponential(1.0), MarginModel::exponential(0.7)}, 1.0}};
  for (const auto& spec : specs) {
    const auto curve = boundary_curve(spec, 10000);
    for (double delta : {0.1, 0.01}) {
      const auto est = volume_u_delta(curve, delta, 100000, 6);
      CHECK(est.estimate <= 2.0 * 2.0 * delta + 4.0 * est.std_error);
    }
  }
}

TEST_CASE("independence copula mass equals volume") {
  const auto curve = boundary_curve({std_normals(), 0.5}, 10000);
  const double delta = 0.07;
  const auto vol = volume_u_delta(curve, delta, 150000, 7);
  const auto mass = copula_mass_u_delta(CopulaModel::independence(2), curve,
                                        delta, 150000, 8);
  CHECK(std::abs(vol.estimate - mass.estimate) <=
        4.0 * (vol.std_error + mass.std_error));
}

TEST_CASE("clayton neighborhood mass stays linear in delta") {
  const auto model = CopulaModel::clayton(1.0);
  const auto curve = boundary_curve({std_normals(), 0.0}, 10000);
  for (double delta : {0.1, 0.03}) {
    const auto mass = copula_mass_u_delta(model, curve, delta, 100000, 9);
    CHECK(mass.estimate / delta <= 10.0);
  }
}

TEST_CASE("layer probability reproduces the closed-form sum distribution") {
  // Mass of the layer under the copula equals the sum CDF at the threshold.
  const auto model = CopulaModel::gauss(0.5);
  const LowerLayerSpec spec{std_normals(), 1.0};
  const std::size_t n = 100000;
  const auto s = sample(model, n, 10);
  std::size_t count = 0;
  for (std::size_t r = 0; r < n; ++r) {
    const double u[2] = {s.at(r, 0), s.at(r, 1)};
    count += layer_membership(spec, u);
  }
  const double p = static_cast<double>(count) / static_cast<double>(n);
  // Sum is normal with variance 2 + 2*0.5 = 3.
  const double want = normal_cdf(1.0 / std::sqrt(3.0));
  const double se = std::sqrt(want * (1.0 - want) / static_cast<double>(n));
  CHECK(std::abs(p - want) <= 4.0 * se);
}

TEST_CASE("higher resolution tightens the polyline") {
  const LowerLayerSpec spec{std_normals(), 0.7};
  const auto coarse = boundary_curve(spec, 500);
  const auto fine = boundary_curve(spec, 50000);
  CHECK(fine.max_chord() < coarse.max_chord());
  CHECK(fine.segment_count() > coarse.segment_count());
}

TEST_CASE("curve csv export") {
  BoundaryCurve curve({0.0, 0.5, 1.0}, {1.0, 0.5, 0.0});
  std::ostringstream out;
  write_csv(curve, out);
  CHECK(out.str() == "u1,u2\n0,1\n0.5,0.5\n1,0\n");
}
