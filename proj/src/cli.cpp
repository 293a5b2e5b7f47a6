#include "iam/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <json.hpp>
#include <map>
#include <numbers>

#include "iam/benchgen.hpp"
#include "iam/error.hpp"
#include "iam/metrics.hpp"
#include "iam/random.hpp"
#include "iam/scoring.hpp"
#include "iam/transforms.hpp"
#include "oracle_values.hpp"

namespace iam::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

void emit_error(std::ostream& err, std::string_view category, std::string_view code,
                std::string_view detail) {
  err << json{{"error", code}, {"category", category}, {"detail", detail}}.dump() << "\n";
}

void emit_warning(std::ostream& err, std::string_view code, const json& detail) {
  err << json{{"warning", code}, {"detail", detail}}.dump() << "\n";
}

void write_or_print(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty())
    out << text;
  else
    write_text_file(path, text);
}

// ---- bench ----

struct BenchArgs {
  std::uint64_t seed = 0;
  int seeds = 1;
  std::string out;
  std::string scenario = "binui";
  double unlearn_fraction = 0.1;
  int shadows = 1;
  int epochs = bench::TrainSpec{}.epochs;
  int checkpoints = bench::TrainSpec{}.checkpoint_count;
  double sigma = bench::SynthSpec{}.sigma;
  double learning_rate = bench::TrainSpec{}.learning_rate;
};

json diagnostics_json(const bench::BenchDiagnostics& d, bool checkpoints) {
  json j{{"original_train_accuracy", d.original_train_accuracy},
         {"original_test_accuracy", d.original_test_accuracy},
         {"warnings", d.warnings}};
  if (checkpoints) {
    j["post_train_epochs"] = d.post_train_epochs;
    j["accuracy_matched"] = d.accuracy_matched;
    j["post_train_accuracy"] = d.post_train_accuracy;
    j["post_test_accuracy"] = d.post_test_accuracy;
    j["checkpoint_mean_confidence"] = d.checkpoint_mean_confidence;
  } else {
    j["retrained_accuracy_on_unlearned"] = d.retrained_accuracy_on_unlearned;
    j["n_unlearned"] = d.unlearned_sources.size();
  }
  return j;
}

int run_bench(const BenchArgs& a, std::ostream& out, std::ostream& err) {
  if (a.scenario != "binui" && a.scenario != "scoreui")
    throw validation_error("invalid_scenario", a.scenario);
  if (a.seeds < 1) throw validation_error("invalid_seeds", "--seeds must be >= 1");
  bench::BenchConfig config;
  config.unlearn_fraction = a.unlearn_fraction;
  config.n_shadows = a.shadows;
  config.train.epochs = a.epochs;
  config.train.checkpoint_count = a.checkpoints;
  config.train.learning_rate = a.learning_rate;
  config.synth.sigma = a.sigma;
  config.validate();
  if (a.scenario == "scoreui" && a.checkpoints < 2)
    throw validation_error("invalid_checkpoints", "checkpoint scenarios need --checkpoints >= 2");

  const bool checkpoints = a.scenario == "scoreui";
  for (int i = 0; i < a.seeds; ++i) {
    const std::uint64_t seed = a.seed + static_cast<std::uint64_t>(i);
    const auto scenario = checkpoints ? bench::make_scoreui_scenario(seed, config)
                                      : bench::make_binui_scenario(seed, config);
    const fs::path dir = fs::path(a.out) / ("seed_" + std::to_string(seed));
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw io_error("unwritable_path", dir.string() + ": " + ec.message());
    save_scenario(scenario.manifest, scenario.matrix, dir / "manifest.json", dir / "matrix.csv");
    write_text_file(dir / "bench.json",
                    diagnostics_json(scenario.diagnostics, checkpoints).dump(1) + "\n");
    for (const auto& w : scenario.diagnostics.warnings)
      emit_warning(err, "post_training_unmatched", {{"seed", seed}, {"message", w}});
    out << dir.string() << "\n";
  }
  return kOk;
}

// ---- score ----

struct ScoreArgs {
  std::string manifest;
  std::string matrix;
  std::string out;
  std::string mode = "online";
  std::string estimator = "gumbel";
  int steps = kDefaultSteps;
  double eps1 = kDefaultEps1;
  double eps2 = kDefaultEps2;
  bool flip = false;
  double delta1 = kDefaultDelta1;
  double threshold_constant = kDefaultThresholdConstant;
  std::vector<double> fpr_targets = kDefaultFprTargets;
  unsigned threads = 1;
};

int run_score(const ScoreArgs& a, std::ostream& out, std::ostream& err) {
  IamConfig cfg;
  cfg.steps = a.steps;
  cfg.estimator = parse_estimator(a.estimator);
  cfg.mode = parse_mode(a.mode);
  cfg.transform.eps1 = a.eps1;
  cfg.transform.eps2 = a.eps2;
  cfg.transform.flip_input = a.flip;
  cfg.flip_output = a.flip;
  cfg.threads = a.threads;
  cfg.validate();
  for (double t : a.fpr_targets)
    if (!(t >= 0.0 && t <= 1.0)) throw validation_error("invalid_fpr_target", format_double(t));
  RiskThresholds probe{a.delta1, 0.0, a.threshold_constant};
  probe.validate();

  const Scenario scenario = load_scenario(a.manifest, a.matrix);
  if (scenario.clamped_cells > 0)
    emit_warning(err, "clamped_confidences", {{"cells", scenario.clamped_cells}});

  ScoreReport report = score_scenario(scenario.manifest, scenario.matrix, cfg);
  const auto thresholds = RiskThresholds::from_accuracy(scenario.manifest.test_accuracy, a.delta1,
                                                        a.threshold_constant);
  evaluate_report(report, thresholds, a.fpr_targets);
  write_or_print(a.out, format_report(report), out);
  return kOk;
}

// ---- eval ----

int run_eval(const std::vector<std::string>& paths, const std::string& out_path, std::ostream& out) {
  json rows = json::array();
  std::map<std::string, std::vector<double>> series;
  for (const auto& path : paths) {
    const ScoreReport report = load_report(path);
    json row{{"scenario_id", report.scenario_id},
             {"estimator", report.config.estimator},
             {"mode", report.config.mode}};
    if (report.metrics) {
      const auto& m = *report.metrics;
      auto add = [&](const std::string& key, double v) {
        row[key] = v;
        series[key].push_back(v);
      };
      if (m.auc) add("auc", *m.auc);
      if (m.spearman) add("spearman", *m.spearman);
      if (m.weighted_bce) add("weighted_bce", *m.weighted_bce);
      for (const auto& t : m.tpr_at_fpr) add("tpr_at_fpr_" + format_double(t.fpr), t.tpr);
    }
    if (report.risk) {
      row["n_under"] = report.risk->n_under;
      row["n_over"] = report.risk->n_over;
      series["retained_mean"].push_back(report.risk->retained.mean);
      series["unlearned_mean"].push_back(report.risk->unlearned.mean);
    }
    rows.push_back(std::move(row));
  }
  json summary = json::object();
  for (const auto& [key, values] : series) {
    const auto s = summarize(values);
    summary[key] = {{"count", s.count}, {"mean", s.mean}, {"std", s.std}};
  }
  write_or_print(out_path, json{{"reports", rows}, {"summary", summary}}.dump(1) + "\n", out);
  return kOk;
}

// ---- roc ----

int run_roc(const std::string& report_path, const std::string& out_path, std::ostream& out) {
  const ScoreReport report = load_report(report_path);
  std::vector<double> scores;
  std::vector<int> bits;
  for (const auto& e : report.entries) {
    if (!e.bit) continue;
    scores.push_back(e.score);
    bits.push_back(*e.bit);
  }
  if (scores.empty())
    throw validation_error("missing_ground_truth", "report has no entries with unlearn bits");
  write_or_print(out_path, format_roc_csv(roc_points(scores, bits)), out);
  return kOk;
}

// ---- selftest ----

bool close(double a, double b, double tol) { return std::abs(a - b) <= tol * std::max(1.0, std::abs(b)); }

int run_selftest(std::ostream& out) {
  std::vector<std::pair<std::string, bool>> checks;

  bool maps = true;
  for (const auto& pt : oracle::kTransformPoints) {
    maps = maps && close(gumbel_map(pt.p), pt.gumbel_map, 1e-12) && close(logit(pt.p), pt.logit, 1e-12);
    for (std::size_t k = 0; k < oracle::kEpsPairs.size(); ++k)
      maps = maps && close(bounded_gumbel_map(pt.p, oracle::kEpsPairs[k].eps1, oracle::kEpsPairs[k].eps2),
                           pt.bounded[k], 1e-12);
  }
  checks.emplace_back("transform_oracle", maps);

  bool bnd = true;
  for (const auto& e : oracle::kEpsPairs) {
    TransformConfig t;
    t.eps1 = e.eps1;
    t.eps2 = e.eps2;
    const auto b = bounds(t);
    bnd = bnd && close(b.lower, e.lower, 1e-12) && close(b.upper, e.upper, 1e-12);
    double prev = -std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 1000; ++i) {
      const double r = bounded_gumbel_map(i / 1000.0, t);
      bnd = bnd && r > prev && r >= b.lower - 1e-12 && r <= b.upper + 1e-12;
      prev = r;
    }
  }
  checks.emplace_back("bounded_range_and_monotonicity", bnd);

  // Gumbel CDF against inverse-CDF Monte Carlo draws.
  {
    const GumbelParams g = fit_gumbel(0.7, 0.25, kDefaultBetaFloor);
    const bool moments = close(g.location + kEulerGamma * g.scale, 0.7, 1e-12) &&
                         close(std::numbers::pi * std::numbers::pi * g.scale * g.scale / 6.0, 0.25, 1e-12);
    Rng rng(20240611);
    constexpr int n = 200000;
    std::vector<double> draws(n);
    for (auto& d : draws) d = g.location - g.scale * std::log(-std::log(rng.uniform_open()));
    std::sort(draws.begin(), draws.end());
    bool mc = true;
    for (double x : {-0.2, 0.3, 0.6, 1.0, 1.8}) {
      const double emp =
          static_cast<double>(std::upper_bound(draws.begin(), draws.end(), x) - draws.begin()) / n;
      const double f = gumbel_cdf(x, g);
      mc = mc && std::abs(emp - f) <= 4.0 * std::sqrt(f * (1 - f) / n) + 1e-9;
    }
    checks.emplace_back("gumbel_moments", moments);
    checks.emplace_back("gumbel_cdf_monte_carlo", mc);
  }

  checks.emplace_back("normal_cdf", close(standard_normal_cdf(1.959963984540054), 0.975, 1e-14) &&
                                        close(standard_normal_cdf(0.0), 0.5, 1e-15));

  bool ok = true;
  for (const auto& [name, pass] : checks) {
    out << json{{"check", name}, {"pass", pass}}.dump() << "\n";
    ok = ok && pass;
  }
  return ok ? kOk : kValidationError;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sample-level unlearning completeness auditing"};
  app.require_subcommand(1);

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "Generate synthetic benchmark scenarios");
  bench_cmd->add_option("--seed", bench.seed, "Base seed");
  bench_cmd->add_option("--seeds", bench.seeds, "Number of consecutive seeds");
  bench_cmd->add_option("--out", bench.out, "Output directory")->required();
  bench_cmd->add_option("--scenario", bench.scenario, "binui or scoreui");
  bench_cmd->add_option("--unlearn-fraction", bench.unlearn_fraction, "Fraction of training set to unlearn");
  bench_cmd->add_option("--shadows", bench.shadows, "Number of shadow OUT models");
  bench_cmd->add_option("--epochs", bench.epochs, "Training epochs per model");
  bench_cmd->add_option("--checkpoints", bench.checkpoints, "Checkpoint count K");
  bench_cmd->add_option("--sigma", bench.sigma, "Class noise standard deviation");
  bench_cmd->add_option("--learning-rate", bench.learning_rate, "SGD learning rate");

  ScoreArgs score;
  auto* score_cmd = app.add_subcommand("score", "Score a scenario");
  score_cmd->add_option("--manifest", score.manifest)->required();
  score_cmd->add_option("--matrix", score.matrix)->required();
  score_cmd->add_option("--out", score.out, "Report path (stdout if omitted)");
  score_cmd->add_option("--mode", score.mode, "online or offline");
  score_cmd->add_option("--estimator", score.estimator, "gumbel, gauss, bayes, ecdf, kde or loss");
  score_cmd->add_option("--steps", score.steps, "Interpolation steps");
  score_cmd->add_option("--eps1", score.eps1);
  score_cmd->add_option("--eps2", score.eps2);
  score_cmd->add_flag("--flip", score.flip, "Score 1 - p and report 1 - score");
  score_cmd->add_option("--delta1", score.delta1, "Under-unlearning threshold");
  score_cmd->add_option("--threshold-constant", score.threshold_constant, "C in delta2 = C - test accuracy");
  score_cmd->add_option("--fpr-targets", score.fpr_targets)->delimiter(',');
  score_cmd->add_option("--threads", score.threads, "Worker threads");

  std::vector<std::string> eval_reports;
  std::string eval_out;
  auto* eval_cmd = app.add_subcommand("eval", "Aggregate metrics over score reports");
  eval_cmd->add_option("reports", eval_reports, "Report files")->required();
  eval_cmd->add_option("--out", eval_out);

  std::string roc_report, roc_out;
  auto* roc_cmd = app.add_subcommand("roc", "Emit ROC points as CSV");
  roc_cmd->add_option("--report", roc_report)->required();
  roc_cmd->add_option("--out", roc_out);

  auto* selftest_cmd = app.add_subcommand("selftest", "Check numerics against reference values");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    emit_error(err, "validation", "invalid_arguments", e.what());
    return kValidationError;
  }

  try {
    if (bench_cmd->parsed()) return run_bench(bench, out, err);
    if (score_cmd->parsed()) return run_score(score, out, err);
    if (eval_cmd->parsed()) return run_eval(eval_reports, eval_out, out);
    if (roc_cmd->parsed()) return run_roc(roc_report, roc_out, out);
    if (selftest_cmd->parsed()) return run_selftest(out);
  } catch (const Error& e) {
    const bool io = e.category() == ErrorCategory::Io;
    emit_error(err, io ? "io" : "validation", e.code(), e.detail());
    return io ? kIoError : kValidationError;
  } catch (const std::exception& e) {
    emit_error(err, "validation", "internal", e.what());
    return kValidationError;
  }
  return kValidationError;
}

}  // namespace iam::cli
