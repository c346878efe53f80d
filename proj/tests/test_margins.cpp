#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "icagg/errors.hpp"
#include "icagg/margins.hpp"
#include "icagg/normal.hpp"
#include "icagg/rng.hpp"

using namespace icagg;

namespace {

// Counting definition of the ECDF, used as the oracle for the step version.
double count_cdf(const std::vector<double>& sample, double t) {
  std::size_t c = 0;
  for (double v : sample) c += v <= t;
  return static_cast<double>(c) / static_cast<double>(sample.size());
}

template <typename F>
std::string thrown_message(F&& f) {
  try {
    f();
  } catch (const std::exception& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("ecdf matches the counting definition") {
  EmpiricalDistribution e({1.0, 2.0, 3.0});
  CHECK(e.cdf(2.0) == 2.0 / 3.0);
  CHECK(e.cdf(2.0) == count_cdf({1, 2, 3}, 2.0));

  EmpiricalDistribution single({5.0});
  CHECK(single.cdf(4.9) == 0.0);
  CHECK(single.cdf(5.0) == 1.0);

  // Ties: both tied points count.
  std::vector<double> tied{2.0, 2.0, 3.0};
  EmpiricalDistribution t(tied);
  CHECK(t.cdf(2.0) == count_cdf(tied, 2.0));
  CHECK(t.cdf(2.0) == 2.0 / 3.0);
}

TEST_CASE("ecdf agrees with counting on random data") {
  Rng rng(101);
  std::vector<double> sample(257);
  for (auto& v : sample) v = rng.normal();
  sample[11] = sample[200];  // inject a tie
  EmpiricalDistribution e(sample);
  for (int i = 0; i < 200; ++i) {
    const double t = 3.0 * rng.normal();
    CHECK(e.cdf(t) == count_cdf(sample, t));
  }
}

TEST_CASE("ecdf input validation") {
  CHECK_THROWS_AS(EmpiricalDistribution({}), DataError);
  CHECK(thrown_message([] { EmpiricalDistribution e{std::vector<double>{}}; })
            .find("empty sample") != std::string::npos);
  CHECK_THROWS_AS(
      EmpiricalDistribution({1.0, std::numeric_limits<double>::quiet_NaN()}),
      DataError);
  CHECK(thrown_message([] {
          EmpiricalDistribution e{
              std::vector<double>{std::numeric_limits<double>::infinity()}};
        }).find("non-finite") != std::string::npos);
}

TEST_CASE("ecdf is invariant under input order") {
  std::vector<double> sorted{-1.0, 0.0, 0.5, 2.0, 2.0, 7.0};
  std::vector<double> shuffled{2.0, 0.5, 7.0, -1.0, 2.0, 0.0};
  EmpiricalDistribution a(sorted), b(shuffled);
  CHECK(a.values() == b.values());
}

TEST_CASE("empirical quantile is the ceil(ny)-th order statistic") {
  EmpiricalDistribution e({1.0, 2.0, 3.0});
  CHECK(e.quantile(0.5) == 2.0);  // ceil(1.5) = 2nd
  CHECK(e.quantile(1.0 / 3.0) == 1.0);
  CHECK(e.quantile(1.0) == 3.0);
  CHECK(e.quantile(1e-12) == 1.0);
  CHECK_THROWS_AS(e.quantile(0.0), std::domain_error);
  CHECK_THROWS_AS(e.quantile(1.0000001), std::domain_error);
  CHECK_THROWS_AS(e.quantile(-0.5), std::domain_error);
}

TEST_CASE("parametric quantiles invert the cdf") {
  MarginModel n01 = MarginModel::normal(0.0, 1.0);
  CHECK(n01.quantile(0.5) == 0.0);

  // Exponential inversion: 1 - exp(-t) = y at t = -log(1-y).
  MarginModel e1 = MarginModel::exponential(1.0);
  const double y = 1.0 - std::exp(-1.0);
  CHECK(e1.quantile(y) == doctest::Approx(1.0).epsilon(1e-12));
  for (double p : {0.01, 0.3, 0.77, 0.999}) {
    CHECK(e1.quantile(p) == doctest::Approx(-std::log(1.0 - p)).epsilon(1e-13));
    CHECK(e1.cdf(e1.quantile(p)) == doctest::Approx(p).epsilon(1e-13));
    CHECK(n01.cdf(n01.quantile(p)) == doctest::Approx(p).epsilon(1e-10));
  }

  // y = 1 has no finite preimage for unbounded margins.
  CHECK(std::isinf(n01.quantile(1.0)));
  CHECK(std::isinf(e1.quantile(1.0)));
  CHECK_THROWS_AS(n01.quantile(0.0), std::domain_error);
}

TEST_CASE("quantile and cdf form a Galois pair on empirical data") {
  Rng rng(77);
  std::vector<double> sample(100);
  for (auto& v : sample) v = std::floor(rng.normal() * 4.0) / 4.0;  // ties
  EmpiricalDistribution e(sample);
  for (int i = 1; i <= 1000; ++i) {
    const double y = static_cast<double>(i) / 1000.0;
    CHECK(e.cdf(e.quantile(y)) >= y);
  }
  for (double t : sample) {
    if (e.cdf(t) > 0.0) CHECK(e.quantile(e.cdf(t)) <= t);
  }
}

TEST_CASE("step cdf construction and evaluation") {
  StepCdf s = StepCdf::from_sample({3.0, 1.0, 2.0, 2.0});
  CHECK(s.jump_count() == 3);
  CHECK(s.sample_size() == 4);
  CHECK(s(0.9) == 0.0);
  CHECK(s(1.0) == 0.25);
  CHECK(s(2.0) == 0.75);
  CHECK(s(2.5) == 0.75);
  CHECK(s(3.0) == 1.0);
  CHECK(s.levels().back() == 1.0);
  CHECK(s.quantile(0.75) == 2.0);
  CHECK(s.quantile(0.76) == 3.0);
  CHECK(s.quantile(1e-9) == 1.0);
}

TEST_CASE("weighted step cdf normalizes and merges atoms") {
  StepCdf s = StepCdf::from_weighted({2.0, 1.0, 2.0, 5.0}, {1.0, 1.0, 1.0, 1.0});
  CHECK(s.jump_count() == 3);
  CHECK(s(1.0) == doctest::Approx(0.25));
  CHECK(s(2.0) == doctest::Approx(0.75));
  CHECK(s.levels().back() == 1.0);
  CHECK(s.sample_size() == 0);

  // Zero-weight atoms vanish.
  StepCdf z = StepCdf::from_weighted({1.0, 2.0, 3.0}, {0.5, 0.0, 0.5});
  CHECK(z.jump_count() == 2);
  CHECK(z(2.9) == doctest::Approx(0.5));
}

TEST_CASE("sup distance between step cdfs") {
  StepCdf a = StepCdf::from_sample({0.25, 0.75});
  CHECK(sup_distance(a, a) == 0.0);

  StepCdf zero = StepCdf::from_sample({0.0});
  StepCdf one = StepCdf::from_sample({1.0});
  CHECK(sup_distance(zero, one) == 1.0);

  // Left limits matter: {0, 0.5} vs {0.25, 0.5} differ most just below 0.25.
  StepCdf b = StepCdf::from_sample({0.0, 0.5});
  StepCdf c = StepCdf::from_sample({0.25, 0.5});
  CHECK(sup_distance(b, c) == 0.5);
}

TEST_CASE("sup distance to a continuous reference") {
  // ECDF of {0.25, 0.75} vs uniform: candidates at the jumps and their left
  // limits give |0.5-0.25|, |0-0.25|, |1-0.75|, |0.5-0.75|, all 0.25.
  StepCdf a = StepCdf::from_sample({0.25, 0.75});
  auto uniform = [](double t) { return std::min(1.0, std::max(0.0, t)); };
  CHECK(sup_distance(a, uniform) == 0.25);
}

TEST_CASE("sup distance is a metric on step cdfs") {
  Rng rng(5);
  auto random_cdf = [&rng]() {
    std::vector<double> v(1 + static_cast<std::size_t>(rng.uniform01() * 20));
    for (auto& x : v) x = rng.normal();
    return StepCdf::from_sample(std::move(v));
  };
  for (int rep = 0; rep < 50; ++rep) {
    StepCdf a = random_cdf(), b = random_cdf(), c = random_cdf();
    const double ab = sup_distance(a, b);
    const double ba = sup_distance(b, a);
    const double bc = sup_distance(b, c);
    const double ac = sup_distance(a, c);
    CHECK(ab == ba);
    CHECK(ac <= ab + bc + 1e-15);
    CHECK(ab >= 0.0);
  }
}

TEST_CASE("sup distance against the margin's own cdf shrinks") {
  // DKW-style sanity: ECDF of n exact quantile draws is close to the model.
  Rng rng(9);
  MarginModel m = MarginModel::exponential(0.5);
  std::vector<double> draws(4000);
  for (auto& v : draws) v = m.quantile(rng.uniform01());
  StepCdf e = StepCdf::from_sample(std::move(draws));
  const double d =
      sup_distance(e, [&m](double t) { return m.cdf(t); });
  CHECK(d < 2.0 * 1.36 / std::sqrt(4000.0));
}

TEST_CASE("margin model parsing") {
  MarginModel n = MarginModel::parse("normal:1.5,2");
  CHECK(n.kind() == MarginKind::Normal);
  CHECK(n.param1() == 1.5);
  CHECK(n.param2() == 2.0);
  CHECK(n.describe() == "normal:1.5,2");

  MarginModel e = MarginModel::parse("exp:0.7");
  CHECK(e.kind() == MarginKind::Exponential);
  CHECK(e.param1() == 0.7);

  CHECK_THROWS_AS(MarginModel::parse("normal:0"), ConfigError);
  CHECK_THROWS_AS(MarginModel::parse("normal:0,-1"), ConfigError);
  CHECK_THROWS_AS(MarginModel::parse("exp:0"), ConfigError);
  CHECK_THROWS_AS(MarginModel::parse("exp:-2"), ConfigError);
  CHECK_THROWS_AS(MarginModel::parse("lognormal:1,1"), ConfigError);
  CHECK_THROWS_AS(MarginModel::parse("normal:a,b"), ConfigError);
  CHECK_THROWS_AS(MarginModel::parse(""), ConfigError);
}

TEST_CASE("margin model densities") {
  MarginModel n = MarginModel::normal(0.0, 1.0);
  CHECK(n.pdf(0.0) == doctest::Approx(1.0 / std::sqrt(2.0 * M_PI)).epsilon(1e-12));
  MarginModel e = MarginModel::exponential(2.0);
  CHECK(e.pdf(1.0) == doctest::Approx(2.0 * std::exp(-2.0)).epsilon(1e-12));
  CHECK(e.pdf(-0.5) == 0.0);
  MarginModel emp = MarginModel::empirical({1.0, 2.0});
  CHECK(!emp.has_density());
  CHECK_THROWS_AS(emp.pdf(1.0), std::domain_error);
}

TEST_CASE("normal cdf and quantile round trip") {
  CHECK(normal_cdf(0.0) == 0.5);
  CHECK(normal_cdf(1.0) == doctest::Approx(0.8413447460685429).epsilon(1e-12));
  CHECK(normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-10));
  for (double p : {1e-9, 1e-4, 0.2, 0.5, 0.9, 1.0 - 1e-7}) {
    CHECK(normal_cdf(normal_quantile(p)) == doctest::Approx(p).epsilon(1e-10));
  }
}
