// Command-line front end: ingest margin data, configure copulas and
// aggregation trees, run aggregation, boundary diagnostics, and convergence
// experiments. Every run writes a manifest next to its outputs and is fully
// reproducible from the seed.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "icagg/aggregate.hpp"
#include "icagg/convergence.hpp"
#include "icagg/copulas.hpp"
#include "icagg/errors.hpp"
#include "icagg/io.hpp"
#include "icagg/layers.hpp"
#include "icagg/margins.hpp"
#include "icagg/reorder.hpp"
#include "icagg/rng.hpp"
#include "icagg/version.hpp"

namespace {

using nlohmann::ordered_json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw icagg::DataError(path + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Margin spec: "normal:mu,sigma", "exp:rate", or "csv:path" (empirical).
icagg::MarginModel make_margin(const std::string& spec) {
  if (spec.rfind("csv:", 0) == 0) {
    return icagg::MarginModel::empirical(
        icagg::read_column_csv(spec.substr(4), true));
  }
  return icagg::MarginModel::parse(spec);
}

std::filesystem::path prepare_out(const std::string& out) {
  if (out.empty()) throw icagg::ConfigError("--out directory is required");
  std::filesystem::path dir(out);
  std::filesystem::create_directories(dir);
  return dir;
}

void write_json(const std::filesystem::path& path, const ordered_json& j) {
  icagg::write_text_file(path.string(), j.dump(2) + "\n");
}

void write_manifest(const std::filesystem::path& dir,
                    const std::string& subcommand, const ordered_json& config,
                    std::uint64_t seed) {
  write_json(dir / "manifest.json",
             ordered_json{{"subcommand", subcommand},
                          {"config", config},
                          {"seed", seed},
                          {"output_directory", dir.string()},
                          {"tool_version", icagg::kVersion}});
}

ordered_json risk_json(const std::map<double, icagg::RiskMeasures>& rm) {
  ordered_json arr = ordered_json::array();
  for (const auto& [level, m] : rm) {
    arr.push_back({{"level", level},
                   {"value_at_risk", m.value_at_risk},
                   {"expected_shortfall", m.expected_shortfall}});
  }
  return arr;
}

std::string cdf_csv(const icagg::StepCdf& cdf) {
  std::string out = "x,cdf\n";
  for (std::size_t i = 0; i < cdf.jump_count(); ++i) {
    out += icagg::format_double(cdf.jump_points()[i]);
    out += ',';
    out += icagg::format_double(cdf.levels()[i]);
    out += '\n';
  }
  return out;
}

std::vector<double> bootstrap(const std::vector<double>& src, std::size_t n,
                              icagg::Rng& rng) {
  std::vector<double> out(n);
  for (auto& v : out) {
    auto idx = static_cast<std::size_t>(rng.uniform01() *
                                        static_cast<double>(src.size()));
    if (idx >= src.size()) idx = src.size() - 1;
    v = src[idx];
  }
  return out;
}

std::string column_csv(const std::vector<double>& col) {
  std::string out = "x1\n";
  for (double v : col) {
    out += icagg::format_double(v);
    out += '\n';
  }
  return out;
}

// Kendall function of the independence copula in dimension d.
double independence_kendall(double t, int d) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double l = -std::log(t);
  double term = 1.0, sum = 1.0;
  for (int k = 1; k < d; ++k) {
    term *= l / k;
    sum += term;
  }
  return t * sum;
}

// ---------------------------------------------------------------------------
// aggregate

struct AggregateOpts {
  std::vector<std::string> margins;
  std::string copula;
  std::size_t n = 0;
  std::string psi = "sum";
  std::vector<double> levels{0.95, 0.99};
  std::uint64_t seed = 0;
  std::string out;
  bool resample = false;
};

void run_aggregate(const AggregateOpts& o) {
  std::vector<std::vector<double>> cols;
  cols.reserve(o.margins.size());
  for (const auto& p : o.margins) cols.push_back(icagg::read_column_csv(p, true));
  const auto d = static_cast<int>(cols.size());

  bool equal_rows = true;
  for (const auto& c : cols) equal_rows = equal_rows && c.size() == cols.front().size();
  std::size_t n = o.n;
  if (o.resample) {
    if (n == 0) throw icagg::ConfigError("--resample requires --n");
    for (std::size_t i = 0; i < cols.size(); ++i) {
      icagg::Rng rng(icagg::derive_seed(o.seed, "resample-" + std::to_string(i)));
      cols[i] = bootstrap(cols[i], n, rng);
    }
  } else {
    if (!equal_rows) {
      throw icagg::DataError(
          "margin files have different row counts; pass --resample");
    }
    if (n == 0) n = cols.front().size();
    if (n != cols.front().size()) {
      throw icagg::ConfigError(
          "--n differs from the input row count; pass --resample to bootstrap");
    }
  }

  const auto dir = prepare_out(o.out);
  std::optional<icagg::StepCdf> cdf;
  std::string synthetic_csv;
  std::string copula_desc = "none";
  if (d == 1) {
    if (!o.copula.empty()) {
      throw icagg::ConfigError("a copula needs at least two margins");
    }
    synthetic_csv = column_csv(cols.front());
    cdf = icagg::StepCdf::from_sample(cols.front());
  } else {
    if (o.copula.empty()) {
      throw icagg::ConfigError("--copula is required for more than one margin");
    }
    const auto model = icagg::CopulaModel::parse(o.copula);
    if (model.dimension() != d) {
      throw icagg::ConfigError("copula dimension " +
                               std::to_string(model.dimension()) +
                               " does not match " + std::to_string(d) +
                               " margins");
    }
    copula_desc = model.describe();
    const auto u = icagg::sample(model, n, icagg::derive_seed(o.seed, "copula"));
    const auto syn = icagg::iman_conover(cols, icagg::compute_ranks(u));
    const auto psi = o.psi == "max" ? icagg::AggregationFunction::max()
                                    : icagg::AggregationFunction::sum();
    cdf = icagg::aggregate_cdf(syn, psi);
    std::ostringstream ss;
    icagg::write_csv(syn, ss);
    synthetic_csv = ss.str();
  }

  const auto rm = icagg::risk_measures(*cdf, o.levels);
  icagg::write_text_file((dir / "synthetic.csv").string(), synthetic_csv);
  icagg::write_text_file((dir / "aggregate_cdf.csv").string(), cdf_csv(*cdf));
  write_json(dir / "report.json",
             ordered_json{{"dimension", d},
                          {"n", n},
                          {"copula", copula_desc},
                          {"psi", o.psi},
                          {"jump_count", cdf->jump_count()},
                          {"risk_measures", risk_json(rm)}});
  write_manifest(dir, "aggregate",
                 ordered_json{{"margins", o.margins},
                              {"copula", o.copula},
                              {"n", o.n},
                              {"psi", o.psi},
                              {"levels", o.levels},
                              {"resample", o.resample}},
                 o.seed);
}

// ---------------------------------------------------------------------------
// tree

struct TreeOpts {
  std::string config;
  std::vector<std::string> leaves;
  std::size_t n = 0;
  std::vector<double> levels{0.95, 0.99};
  std::uint64_t seed = 0;
  std::string out;
  bool resample = false;
};

void run_tree(const TreeOpts& o) {
  const auto root = icagg::parse_tree(read_file(o.config));
  std::map<std::string, std::vector<double>> leaves;
  for (const auto& spec : o.leaves) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == spec.size()) {
      throw icagg::ConfigError("--leaf expects id=path, got '" + spec + "'");
    }
    leaves[spec.substr(0, eq)] = icagg::read_column_csv(spec.substr(eq + 1), true);
  }
  if (o.resample) {
    if (o.n == 0) throw icagg::ConfigError("--resample requires --n");
    for (auto& [id, col] : leaves) {
      icagg::Rng rng(icagg::derive_seed(o.seed, "resample-" + id));
      col = bootstrap(col, o.n, rng);
    }
  }

  const auto result = icagg::tree_aggregate(root, leaves, o.seed);
  const auto dir = prepare_out(o.out);

  ordered_json branches = ordered_json::array();
  for (const auto& b : result.branches) {
    branches.push_back(
        {{"path", b.path},
         {"dimension", b.sample.d},
         {"jump_count", b.cdf.jump_count()},
         {"risk_measures", risk_json(icagg::risk_measures(b.cdf, o.levels))}});
  }
  const auto& root_res = result.root();
  std::ostringstream ss;
  icagg::write_csv(root_res.sample, ss);
  icagg::write_text_file((dir / "synthetic.csv").string(), ss.str());
  icagg::write_text_file((dir / "aggregate_cdf.csv").string(),
                         cdf_csv(root_res.cdf));
  write_json(dir / "report.json",
             ordered_json{{"n", root_res.sample.n},
                          {"branch_count", result.branches.size()},
                          {"branches", branches}});
  write_manifest(dir, "tree",
                 ordered_json{{"config", o.config},
                              {"leaves", o.leaves},
                              {"n", o.n},
                              {"levels", o.levels},
                              {"resample", o.resample}},
                 o.seed);
}

// ---------------------------------------------------------------------------
// diagnose

struct DiagnoseOpts {
  std::string copula;
  std::vector<double> eps{1e-2, 1e-3, 1e-4};
  bool entropy = false;
  std::vector<std::string> margins;
  std::vector<double> ts;
  std::vector<double> deltas;
  std::size_t n_mc = 100000;
  std::size_t resolution = 10000;
  std::uint64_t seed = 0;
  std::string out;
};

void run_diagnose(const DiagnoseOpts& o) {
  const auto model = icagg::CopulaModel::parse(o.copula);
  ordered_json report{{"copula", model.describe()},
                      {"dimension", model.dimension()}};

  const bool sup_ok = model.dimension() == 2 ||
                      model.kind() == icagg::CopulaKind::Independence;
  if (sup_ok) {
    ordered_json sup = ordered_json::array();
    for (double e : o.eps) {
      const double lk = model.log_k_epsilon(e);
      sup.push_back({{"eps", e}, {"log_value", lk}, {"value", std::exp(lk)}});
    }
    report["sup_density"] = sup;
    if (o.eps.size() >= 2) {
      const auto fit = model.fit_density_growth(o.eps);
      report["density_growth"] = {{"exponent", fit.exponent},
                                  {"log_c", fit.log_c},
                                  {"r_squared", fit.r_squared}};
    }
    if (o.entropy) {
      const auto ti = model.entropy_integral();
      report["entropy_integral"] = {{"value", ti.value},
                                    {"tail_bound", ti.tail_bound},
                                    {"total", ti.total()},
                                    {"finite", ti.finite},
                                    {"growth_exponent", ti.growth.exponent},
                                    {"growth_r_squared", ti.growth.r_squared}};
    }
  }

  const bool any_layer = !o.margins.empty() || !o.ts.empty() || !o.deltas.empty();
  if (any_layer) {
    if (o.margins.size() != 2 || o.ts.empty() || o.deltas.empty()) {
      throw icagg::ConfigError(
          "layer diagnostics need two --margin specs, --t, and --delta");
    }
    std::vector<icagg::MarginModel> margins;
    for (const auto& m : o.margins) margins.push_back(make_margin(m));
    ordered_json rows = ordered_json::array();
    for (double t : o.ts) {
      const auto curve =
          icagg::boundary_curve({margins, t}, o.resolution);
      for (double delta : o.deltas) {
        const std::string tag = icagg::format_double(t) + ":" +
                                icagg::format_double(delta);
        const auto vol = icagg::volume_u_delta(
            curve, delta, o.n_mc, icagg::derive_seed(o.seed, "volume:" + tag));
        const auto mass = icagg::copula_mass_u_delta(
            model, curve, delta, o.n_mc,
            icagg::derive_seed(o.seed, "mass:" + tag));
        rows.push_back({{"t", t},
                        {"delta", delta},
                        {"volume", vol.estimate},
                        {"volume_std_error", vol.std_error},
                        {"copula_mass", mass.estimate},
                        {"copula_mass_std_error", mass.std_error},
                        {"mass_over_delta", mass.estimate / delta}});
      }
    }
    report["layer_neighborhoods"] = rows;
  }

  const auto dir = prepare_out(o.out);
  write_json(dir / "report.json", report);
  write_manifest(dir, "diagnose",
                 ordered_json{{"copula", o.copula},
                              {"eps", o.eps},
                              {"entropy", o.entropy},
                              {"margins", o.margins},
                              {"t", o.ts},
                              {"delta", o.deltas},
                              {"n_mc", o.n_mc},
                              {"resolution", o.resolution}},
                 o.seed);
}

// ---------------------------------------------------------------------------
// converge

struct ConvergeOpts {
  std::string copula;
  std::vector<std::string> margins;
  std::vector<std::size_t> n_grid;
  std::size_t reps = 20;
  std::string oracle;
  std::size_t grid = 0;
  std::size_t reference_n = 1000000;
  std::string estimator = "rank-reorder";
  int threads = 1;
  std::uint64_t seed = 0;
  std::string out;
};

void run_converge(const ConvergeOpts& o) {
  std::vector<icagg::MarginModel> margins;
  for (const auto& m : o.margins) margins.push_back(make_margin(m));
  icagg::ExperimentConfig cfg(icagg::CopulaModel::parse(o.copula),
                              std::move(margins));
  cfg.n_grid = o.n_grid;
  cfg.replications = o.reps;
  if (o.oracle == "normal-sum") {
    cfg.oracle.kind = icagg::OracleKind::ClosedFormNormalSum;
  } else if (o.oracle == "gamma-sum") {
    cfg.oracle.kind = icagg::OracleKind::ClosedFormGammaSum;
  } else if (o.oracle == "convolution") {
    cfg.oracle.kind = icagg::OracleKind::NumericConvolution;
  } else if (o.oracle == "layer-integral") {
    cfg.oracle.kind = icagg::OracleKind::NumericLayerIntegral;
  } else {
    cfg.oracle.kind = icagg::OracleKind::HighNReference;
  }
  cfg.oracle.grid = o.grid;
  cfg.oracle.reference_n = o.reference_n;
  cfg.seed = o.seed;
  cfg.estimator = o.estimator == "direct" ? icagg::EstimatorKind::DirectPlugin
                                          : icagg::EstimatorKind::RankReorder;
  cfg.threads = o.threads;

  const auto rep = icagg::run_experiment(cfg);
  const auto dir = prepare_out(o.out);

  std::string med = "n,median,q25,q75\n";
  for (std::size_t i = 0; i < rep.n_grid.size(); ++i) {
    med += std::to_string(rep.n_grid[i]) + ',' +
           icagg::format_double(rep.medians[i]) + ',' +
           icagg::format_double(rep.q25[i]) + ',' +
           icagg::format_double(rep.q75[i]) + '\n';
  }
  icagg::write_text_file((dir / "medians.csv").string(), med);
  write_json(dir / "report.json",
             ordered_json{{"oracle", rep.oracle_name},
                          {"estimator", o.estimator},
                          {"seed", rep.seed},
                          {"replications", o.reps},
                          {"n_grid", rep.n_grid},
                          {"medians", rep.medians},
                          {"q25", rep.q25},
                          {"q75", rep.q75},
                          {"sup_distances", rep.sup_distances},
                          {"rate", ordered_json{{"slope", rep.rate.slope},
                                                {"intercept", rep.rate.intercept},
                                                {"r_squared", rep.rate.r_squared}}}});
  write_manifest(dir, "converge",
                 ordered_json{{"copula", o.copula},
                              {"margins", o.margins},
                              {"n", o.n_grid},
                              {"reps", o.reps},
                              {"oracle", o.oracle},
                              {"grid", o.grid},
                              {"reference_n", o.reference_n},
                              {"estimator", o.estimator},
                              {"threads", o.threads}},
                 o.seed);
}

// ---------------------------------------------------------------------------
// curves

struct CurvesOpts {
  std::vector<std::string> margins;
  std::vector<double> ts;
  std::size_t resolution = 10000;
  std::string out;
};

void run_curves(const CurvesOpts& o) {
  if (o.margins.size() != 2) {
    throw icagg::ConfigError("curves needs exactly two --margin specs");
  }
  std::vector<icagg::MarginModel> margins;
  for (const auto& m : o.margins) margins.push_back(make_margin(m));

  std::string csv = "t,u1,u2\n";
  for (double t : o.ts) {
    const auto curve = icagg::boundary_curve({margins, t}, o.resolution);
    const std::string prefix = icagg::format_double(t) + ",";
    for (std::size_t i = 0; i < curve.xs().size(); ++i) {
      csv += prefix + icagg::format_double(curve.xs()[i]) + ',' +
             icagg::format_double(curve.ys()[i]) + '\n';
    }
  }
  const auto dir = prepare_out(o.out);
  icagg::write_text_file((dir / "curves.csv").string(), csv);
  write_manifest(dir, "curves",
                 ordered_json{{"margins", o.margins},
                              {"t", o.ts},
                              {"resolution", o.resolution}},
                 0);
}

// ---------------------------------------------------------------------------
// kendall

struct KendallOpts {
  std::vector<std::string> margins;
  std::string copula;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  std::string out;
};

void run_kendall(const KendallOpts& o) {
  std::optional<icagg::RankMatrix> ranks;
  if (!o.copula.empty()) {
    if (o.n == 0) throw icagg::ConfigError("--copula needs --n draws");
    const auto model = icagg::CopulaModel::parse(o.copula);
    const auto u = icagg::sample(model, o.n, icagg::derive_seed(o.seed, "copula"));
    ranks = icagg::compute_ranks(u);
  } else {
    if (o.margins.size() < 2) {
      throw icagg::ConfigError("kendall needs --copula or at least two --margin files");
    }
    std::vector<std::vector<double>> cols;
    for (const auto& p : o.margins) cols.push_back(icagg::read_column_csv(p, true));
    for (const auto& c : cols) {
      if (c.size() != cols.front().size()) {
        throw icagg::DataError("margin files have different row counts");
      }
    }
    icagg::CopulaSample fake;
    fake.n = cols.front().size();
    fake.d = static_cast<int>(cols.size());
    fake.data.resize(fake.n * cols.size());
    for (std::size_t r = 0; r < fake.n; ++r) {
      for (std::size_t c = 0; c < cols.size(); ++c) {
        fake.data[r * cols.size() + c] = cols[c][r];
      }
    }
    try {
      ranks = icagg::compute_ranks(fake);
    } catch (const std::invalid_argument& e) {
      throw icagg::DataError(e.what());
    }
  }

  const auto cdf = icagg::kendall_cdf_from_ranks(*ranks);
  const int d = ranks->d;
  const double indep_dist = icagg::sup_distance(
      cdf, [d](double t) { return independence_kendall(t, d); });
  const double comono_dist = icagg::sup_distance(
      cdf, [](double t) { return std::min(1.0, std::max(0.0, t)); });

  const auto dir = prepare_out(o.out);
  std::string csv = "t,h\n";
  for (std::size_t i = 0; i < cdf.jump_count(); ++i) {
    csv += icagg::format_double(cdf.jump_points()[i]) + ',' +
           icagg::format_double(cdf.levels()[i]) + '\n';
  }
  icagg::write_text_file((dir / "kendall_cdf.csv").string(), csv);
  write_json(dir / "report.json",
             ordered_json{{"n", ranks->n},
                          {"dimension", d},
                          {"sup_distance_to_independence", indep_dist},
                          {"sup_distance_to_comonotone", comono_dist}});
  write_manifest(dir, "kendall",
                 ordered_json{{"margins", o.margins},
                              {"copula", o.copula},
                              {"n", o.n}},
                 o.seed);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rank-reordered risk aggregation with empirical margins"};
  app.set_version_flag("--version", icagg::kVersion);
  app.require_subcommand(1);

  AggregateOpts agg;
  auto* cagg = app.add_subcommand(
      "aggregate", "reorder margin samples by a copula and aggregate rows");
  cagg->add_option("--margin", agg.margins, "margin CSV file (one column, header)")
      ->required();
  cagg->add_option("--copula", agg.copula,
                   "indep:d | clayton:theta | gauss:rho | gaussmulti:file");
  cagg->add_option("--n", agg.n, "output rows (default: input row count)");
  cagg->add_option("--psi", agg.psi, "row aggregation")
      ->check(CLI::IsMember({"sum", "max"}));
  cagg->add_option("--levels", agg.levels, "risk measure levels")->delimiter(',');
  cagg->add_option("--seed", agg.seed, "random seed")->required();
  cagg->add_option("--out", agg.out, "output directory")->required();
  cagg->add_flag("--resample", agg.resample, "bootstrap margins to --n rows");
  cagg->callback([&] { run_aggregate(agg); });

  TreeOpts tree;
  auto* ctree = app.add_subcommand(
      "tree", "hierarchical aggregation over a copula tree");
  ctree->add_option("--config", tree.config, "tree JSON file")->required();
  ctree->add_option("--leaf", tree.leaves, "leaf data as id=path")->required();
  ctree->add_option("--n", tree.n, "bootstrap rows (with --resample)");
  ctree->add_option("--levels", tree.levels, "risk measure levels")->delimiter(',');
  ctree->add_option("--seed", tree.seed, "random seed")->required();
  ctree->add_option("--out", tree.out, "output directory")->required();
  ctree->add_flag("--resample", tree.resample, "bootstrap leaves to --n rows");
  ctree->callback([&] { run_tree(tree); });

  DiagnoseOpts diag;
  auto* cdiag = app.add_subcommand(
      "diagnose", "density sup growth and boundary neighborhood mass");
  cdiag->add_option("--copula", diag.copula, "copula config")->required();
  cdiag->add_option("--eps", diag.eps, "sup-density eps list")->delimiter(',');
  cdiag->add_flag("--entropy", diag.entropy, "compute the entropy-style integral");
  cdiag->add_option("--margin", diag.margins,
                    "margin spec (normal:mu,sigma | exp:rate | csv:path)");
  cdiag->add_option("--t", diag.ts, "layer thresholds")->delimiter(',');
  cdiag->add_option("--delta", diag.deltas, "neighborhood radii")->delimiter(',');
  cdiag->add_option("--n-mc", diag.n_mc, "Monte Carlo draws per estimate");
  cdiag->add_option("--resolution", diag.resolution, "boundary polyline segments");
  cdiag->add_option("--seed", diag.seed, "random seed")->required();
  cdiag->add_option("--out", diag.out, "output directory")->required();
  cdiag->callback([&] { run_diagnose(diag); });

  ConvergeOpts conv;
  auto* cconv = app.add_subcommand(
      "converge", "sup-distance of the estimated sum CDF to an oracle over n");
  cconv->add_option("--copula", conv.copula, "copula config")->required();
  cconv->add_option("--margin", conv.margins,
                    "margin spec (normal:mu,sigma | exp:rate | csv:path)")
      ->required();
  cconv->add_option("--n", conv.n_grid, "sample sizes")->required()->delimiter(',');
  cconv->add_option("--reps", conv.reps, "replications per n");
  cconv->add_option("--oracle", conv.oracle, "reference distribution")
      ->required()
      ->check(CLI::IsMember({"normal-sum", "gamma-sum", "convolution",
                             "layer-integral", "high-n"}));
  cconv->add_option("--grid", conv.grid, "oracle grid size override");
  cconv->add_option("--reference-n", conv.reference_n, "high-n oracle sample size");
  cconv->add_option("--estimator", conv.estimator, "estimator variant")
      ->check(CLI::IsMember({"rank-reorder", "direct"}));
  cconv->add_option("--threads", conv.threads, "worker threads");
  cconv->add_option("--seed", conv.seed, "random seed")->required();
  cconv->add_option("--out", conv.out, "output directory")->required();
  cconv->callback([&] { run_converge(conv); });

  CurvesOpts curves;
  auto* ccurves = app.add_subcommand(
      "curves", "layer boundary polylines in the unit square");
  ccurves->add_option("--margin", curves.margins,
                      "margin spec (normal:mu,sigma | exp:rate)")
      ->required();
  ccurves->add_option("--t", curves.ts, "layer thresholds")
      ->required()
      ->delimiter(',');
  ccurves->add_option("--resolution", curves.resolution, "polyline segments");
  ccurves->add_option("--out", curves.out, "output directory")->required();
  ccurves->callback([&] { run_curves(curves); });

  KendallOpts ken;
  auto* cken = app.add_subcommand(
      "kendall", "empirical Kendall function of a sample or copula");
  cken->add_option("--margin", ken.margins, "data CSV files (one column, header)");
  cken->add_option("--copula", ken.copula, "copula config to sample from");
  cken->add_option("--n", ken.n, "draws when sampling a copula");
  cken->add_option("--seed", ken.seed, "random seed")->required();
  cken->add_option("--out", ken.out, "output directory")->required();
  cken->callback([&] { run_kendall(ken); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const icagg::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const icagg::OracleError& e) {
    std::cerr << "oracle error: " << e.what() << '\n';
    return 4;
  } catch (const icagg::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
