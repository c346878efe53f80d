#include "icagg/convergence.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <thread>

#include "icagg/aggregate.hpp"
#include "icagg/errors.hpp"
#include "icagg/normal.hpp"
#include "icagg/reorder.hpp"
#include "icagg/rng.hpp"

namespace icagg {

namespace {

bool is_gauss(const CopulaModel& c) {
  return c.kind() == CopulaKind::GaussBivariate ||
         c.kind() == CopulaKind::GaussMulti;
}

double pair_correlation(const CopulaModel& c, int i, int j) {
  if (c.kind() == CopulaKind::GaussBivariate) return c.rho();
  return c.correlation()[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
}

// Monotone piecewise-linear table with 0/1 tails.
struct InterpCdf {
  std::vector<double> xs;
  std::vector<double> ys;
  double operator()(double t) const {
    if (t <= xs.front()) return ys.front() * (t == xs.front());
    if (t >= xs.back()) return t == xs.back() ? ys.back() : 1.0;
    auto it = std::upper_bound(xs.begin(), xs.end(), t);
    const std::size_t i = static_cast<std::size_t>(it - xs.begin());
    const double w = (t - xs[i - 1]) / (xs[i] - xs[i - 1]);
    return ys[i - 1] + w * (ys[i] - ys[i - 1]);
  }
};

OracleCdf normal_sum_oracle(const CopulaModel& copula,
                            const std::vector<MarginModel>& margins) {
  if (!is_gauss(copula)) {
    throw OracleError("closed-form normal sum requires a gauss copula");
  }
  double mean = 0.0, var = 0.0;
  for (const auto& m : margins) {
    if (m.kind() != MarginKind::Normal) {
      throw OracleError("closed-form normal sum requires normal margins");
    }
    mean += m.param1();
  }
  const int d = copula.dimension();
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      const double r = i == j ? 1.0 : pair_correlation(copula, i, j);
      var += r * margins[static_cast<std::size_t>(i)].param2() *
             margins[static_cast<std::size_t>(j)].param2();
    }
  }
  const double sd = std::sqrt(var);
  return OracleCdf{"normal-sum",
                   [mean, sd](double t) { return normal_cdf((t - mean) / sd); }};
}

OracleCdf gamma_sum_oracle(const CopulaModel& copula,
                           const std::vector<MarginModel>& margins) {
  if (copula.kind() != CopulaKind::Independence) {
    throw OracleError("closed-form gamma sum requires the independence copula");
  }
  const double rate = margins.front().param1();
  for (const auto& m : margins) {
    if (m.kind() != MarginKind::Exponential ||
        std::abs(m.param1() - rate) > 1e-12 * rate) {
      throw OracleError(
          "closed-form gamma sum requires equal-rate exponential margins");
    }
  }
  const int shape = static_cast<int>(margins.size());
  return OracleCdf{"gamma-sum",
                   [shape, rate](double t) { return erlang_cdf(shape, rate, t); }};
}

OracleCdf convolution_oracle(const CopulaModel& copula,
                             const std::vector<MarginModel>& margins,
                             std::size_t grid) {
  if (copula.kind() != CopulaKind::Independence) {
    throw OracleError("numeric convolution requires the independence copula");
  }
  const std::size_t m = grid ? grid : 4097;
  const double tail = 1e-9;
  double lo = 0.0, hi = 0.0;
  for (const auto& marg : margins) {
    lo += marg.quantile(tail);
    hi += marg.quantile(1.0 - tail);
  }
  auto table = std::make_shared<InterpCdf>();
  table->xs.resize(m);
  table->ys.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    table->xs[i] = lo + (hi - lo) * static_cast<double>(i) /
                            static_cast<double>(m - 1);
    table->ys[i] = margins.front().cdf(table->xs[i]);
  }
  for (std::size_t k = 1; k < margins.size(); ++k) {
    const MarginModel& marg = margins[k];
    std::vector<double> next(m, 0.0);
    const InterpCdf& prev = *table;
    if (marg.has_density()) {
      // Simpson panels over the margin's effective support.
      const std::size_t ns = 4096;  // even
      const double a = marg.quantile(tail), b = marg.quantile(1.0 - tail);
      const double h = (b - a) / static_cast<double>(ns);
      for (std::size_t i = 0; i < m; ++i) {
        const double t = table->xs[i];
        double acc = 0.0;
        for (std::size_t j = 0; j <= ns; ++j) {
          const double s = a + h * static_cast<double>(j);
          const double w = (j == 0 || j == ns) ? 1.0 : (j % 2 ? 4.0 : 2.0);
          acc += w * marg.pdf(s) * prev(t - s);
        }
        next[i] = acc * h / 3.0;
      }
    } else {
      const auto& atoms = marg.sample_distribution().values();
      for (std::size_t i = 0; i < m; ++i) {
        double acc = 0.0;
        for (double x : atoms) acc += prev(table->xs[i] - x);
        next[i] = acc / static_cast<double>(atoms.size());
      }
    }
    // Quadrature wobble must not break monotonicity of a CDF table.
    double run = 0.0;
    for (double& v : next) {
      run = std::min(1.0, std::max(run, v));
      v = run;
    }
    table->ys = std::move(next);
  }
  return OracleCdf{"convolution",
                   [table](double t) { return (*table)(t); }};
}

OracleCdf layer_integral_oracle(const CopulaModel& copula,
                                const std::vector<MarginModel>& margins,
                                std::size_t grid) {
  if (copula.dimension() != 2 || margins.size() != 2) {
    throw OracleError("layer integral oracle is two-dimensional");
  }
  const std::size_t m = grid ? grid : 2000;
  std::vector<double> a(m), b(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double u = (static_cast<double>(i) + 0.5) / static_cast<double>(m);
    a[i] = margins[0].quantile(u);
    b[i] = margins[1].quantile(u);
  }
  // Midpoint cell weights; the sub-cell boundary strips carry at most
  // 2*d/(2m) marginal mass, which renormalization spreads proportionally.
  std::vector<double> s(m * m), w(m * m);
  for (std::size_t i = 0; i < m; ++i) {
    const double u1 = (static_cast<double>(i) + 0.5) / static_cast<double>(m);
    for (std::size_t j = 0; j < m; ++j) {
      const double u2 = (static_cast<double>(j) + 0.5) / static_cast<double>(m);
      const double uu[2] = {u1, u2};
      s[i * m + j] = a[i] + b[j];
      w[i * m + j] = copula.density(std::span<const double>(uu, 2));
    }
  }
  std::vector<std::size_t> order(s.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t x, std::size_t y) { return s[x] < s[y]; });
  auto table = std::make_shared<InterpCdf>();
  table->xs.reserve(order.size());
  table->ys.reserve(order.size());
  double total = 0.0;
  for (std::size_t k : order) total += w[k];
  double run = 0.0;
  for (std::size_t k : order) {
    run += w[k];
    if (!table->xs.empty() && table->xs.back() == s[k]) {
      table->ys.back() = run / total;
    } else {
      table->xs.push_back(s[k]);
      table->ys.push_back(run / total);
    }
  }
  return OracleCdf{"layer-integral",
                   [table](double t) { return (*table)(t); }};
}

OracleCdf high_n_oracle(const CopulaModel& copula,
                        const std::vector<MarginModel>& margins,
                        std::size_t reference_n, std::uint64_t seed) {
  if (reference_n < 2) throw OracleError("reference n must be at least 2");
  Rng rng(derive_seed(seed, "reference-margins"));
  std::vector<std::vector<double>> draws(margins.size());
  for (std::size_t i = 0; i < margins.size(); ++i) {
    draws[i].resize(reference_n);
    for (auto& v : draws[i]) v = margins[i].quantile(rng.uniform01());
  }
  CopulaSample u = sample(copula, reference_n, derive_seed(seed, "reference-copula"));
  SyntheticSample syn = iman_conover(draws, compute_ranks(u));
  auto cdf = std::make_shared<StepCdf>(sum_cdf(syn));
  return OracleCdf{"high-n-reference",
                   [cdf](double t) { return (*cdf)(t); }};
}

double sorted_quantile(std::vector<double> v, double p) {
  std::sort(v.begin(), v.end());
  const double pos = p * static_cast<double>(v.size() - 1);
  const std::size_t i = static_cast<std::size_t>(pos);
  if (i + 1 >= v.size()) return v.back();
  const double w = pos - static_cast<double>(i);
  return v[i] * (1.0 - w) + v[i + 1] * w;
}

}  // namespace

double erlang_cdf(int shape, double rate, double t) {
  if (shape < 1 || !(rate > 0.0)) {
    throw std::invalid_argument("erlang needs shape >= 1 and rate > 0");
  }
  if (t <= 0.0) return 0.0;
  const double x = rate * t;
  double term = 1.0, sum = 1.0;
  for (int j = 1; j < shape; ++j) {
    term *= x / j;
    sum += term;
  }
  return 1.0 - std::exp(-x) * sum;
}

OracleCdf oracle_cdf(const OracleSpec& spec, const CopulaModel& copula,
                     const std::vector<MarginModel>& margins,
                     std::uint64_t seed) {
  if (margins.size() < 2) {
    throw OracleError("oracles describe sums of at least two margins");
  }
  if (static_cast<int>(margins.size()) != copula.dimension()) {
    throw OracleError("margin count does not match copula dimension");
  }
  switch (spec.kind) {
    case OracleKind::ClosedFormNormalSum:
      return normal_sum_oracle(copula, margins);
    case OracleKind::ClosedFormGammaSum:
      return gamma_sum_oracle(copula, margins);
    case OracleKind::NumericConvolution:
      return convolution_oracle(copula, margins, spec.grid);
    case OracleKind::NumericLayerIntegral:
      return layer_integral_oracle(copula, margins, spec.grid);
    case OracleKind::HighNReference:
      return high_n_oracle(copula, margins, spec.reference_n, seed);
  }
  throw OracleError("unknown oracle kind");
}

ConvergenceReport run_experiment(const ExperimentConfig& config) {
  if (config.n_grid.empty()) throw std::invalid_argument("empty n grid");
  for (std::size_t n : config.n_grid) {
    if (n < 2) throw std::invalid_argument("grid sizes must be at least 2");
  }
  if (config.replications < 1) {
    throw std::invalid_argument("need at least one replication");
  }
  // Oracle incompatibilities surface here, before any simulation runs.
  OracleCdf oracle = oracle_cdf(config.oracle, config.copula, config.margins,
                                config.seed);

  ConvergenceReport rep;
  rep.n_grid = config.n_grid;
  rep.oracle_name = oracle.name;
  rep.estimator = config.estimator;
  rep.seed = config.seed;
  rep.sup_distances.assign(config.n_grid.size(),
                           std::vector<double>(config.replications, 0.0));

  auto run_one = [&](std::size_t ni, std::size_t r) {
    const std::size_t n = config.n_grid[ni];
    const std::uint64_t task_seed =
        derive_seed(derive_seed(config.seed, static_cast<std::uint64_t>(n)),
                    static_cast<std::uint64_t>(r));
    Rng margin_rng(derive_seed(task_seed, "margins"));
    std::vector<std::vector<double>> draws(config.margins.size());
    for (std::size_t i = 0; i < config.margins.size(); ++i) {
      draws[i].resize(n);
      for (auto& v : draws[i]) {
        v = config.margins[i].quantile(margin_rng.uniform01());
      }
    }
    CopulaSample u = sample(config.copula, n, derive_seed(task_seed, "copula"));
    StepCdf est = [&] {
      if (config.estimator == EstimatorKind::RankReorder) {
        return sum_cdf(iman_conover(draws, compute_ranks(u)));
      }
      // Direct plug-in: empirical margin quantiles applied to the
      // dependence sample itself.
      std::vector<EmpiricalDistribution> eds;
      eds.reserve(draws.size());
      for (const auto& dcol : draws) eds.emplace_back(dcol);
      std::vector<double> sums(n, 0.0);
      for (std::size_t row = 0; row < n; ++row) {
        double sv = 0.0;
        for (int c = 0; c < u.d; ++c) {
          sv += eds[static_cast<std::size_t>(c)].quantile(u.at(row, c));
        }
        sums[row] = sv;
      }
      return StepCdf::from_sample(std::move(sums));
    }();
    rep.sup_distances[ni][r] = sup_distance(est, oracle.value);
  };

  struct Task {
    std::size_t ni, r;
  };
  std::vector<Task> tasks;
  for (std::size_t ni = 0; ni < config.n_grid.size(); ++ni) {
    for (std::size_t r = 0; r < config.replications; ++r) {
      tasks.push_back({ni, r});
    }
  }
  const int threads = std::max(1, config.threads);
  if (threads == 1) {
    for (const auto& t : tasks) run_one(t.ni, t.r);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int w = 0; w < threads; ++w) {
      pool.emplace_back([&] {
        for (;;) {
          const std::size_t i = next.fetch_add(1);
          if (i >= tasks.size()) return;
          run_one(tasks[i].ni, tasks[i].r);
        }
      });
    }
    for (auto& th : pool) th.join();
  }

  for (const auto& dist : rep.sup_distances) {
    rep.medians.push_back(sorted_quantile(dist, 0.5));
    rep.q25.push_back(sorted_quantile(dist, 0.25));
    rep.q75.push_back(sorted_quantile(dist, 0.75));
  }
  if (rep.n_grid.size() >= 3) rep.rate = fit_rate(rep.n_grid, rep.medians);
  return rep;
}

RateFit fit_rate(const std::vector<std::size_t>& n_grid,
                 const std::vector<double>& medians) {
  if (n_grid.size() < 3 || n_grid.size() != medians.size()) {
    throw std::invalid_argument("rate fit needs at least three grid points");
  }
  for (double m : medians) {
    if (!(m > 0.0) || !std::isfinite(m)) {
      throw std::invalid_argument("log-log fit needs positive finite medians");
    }
  }
  const double n = static_cast<double>(n_grid.size());
  std::vector<double> xs(n_grid.size()), ys(n_grid.size());
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    xs[i] = std::log2(static_cast<double>(n_grid[i]));
    ys[i] = std::log2(medians[i]);
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  RateFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  if (syy == 0.0) {
    fit.r_squared = 1.0;
  } else {
    double ss_res = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double pred = fit.intercept + fit.slope * xs[i];
      ss_res += (ys[i] - pred) * (ys[i] - pred);
    }
    fit.r_squared = 1.0 - ss_res / syy;
  }
  return fit;
}

RateFit fit_rate(const ConvergenceReport& report) {
  return fit_rate(report.n_grid, report.medians);
}

}  // namespace icagg
