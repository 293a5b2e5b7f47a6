#include "iam/scoring.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "iam/error.hpp"
#include "iam/parallel.hpp"
#include "iam/stats.hpp"

namespace iam {

std::string_view to_string(Mode mode) { return mode == Mode::Online ? "online" : "offline"; }

Mode parse_mode(std::string_view text) {
  if (text == "online") return Mode::Online;
  if (text == "offline") return Mode::Offline;
  throw validation_error("invalid_mode", std::string(text));
}

void IamConfig::validate() const {
  if (steps < 2) throw validation_error("invalid_steps", "steps must be >= 2, got " + std::to_string(steps));
  if (!(beta_floor > 0.0)) throw validation_error("invalid_beta_floor", "beta_floor must be > 0");
  if (threads < 1) throw validation_error("invalid_threads", "threads must be >= 1");
  effective_transform(*this).validate();
}

TransformConfig effective_transform(const IamConfig& cfg) {
  TransformConfig t = cfg.transform;
  switch (cfg.estimator) {
    case EstimatorKind::Gauss: t.kind = TransformKind::Logit; break;
    case EstimatorKind::Bayes: t.kind = TransformKind::Confidence; break;
    case EstimatorKind::Loss: t.kind = TransformKind::IdentityLoss; break;
    default: break;
  }
  return t;
}

double out_weight(int level, int steps) {
  return static_cast<double>(steps - level) / static_cast<double>(steps - 1);
}

std::vector<double> interpolate(double r_out, double r_in, int steps) {
  if (steps < 2) throw validation_error("invalid_steps", "steps must be >= 2, got " + std::to_string(steps));
  std::vector<double> out(static_cast<std::size_t>(steps));
  const double denom = static_cast<double>(steps - 1);
  for (int i = 1; i <= steps; ++i) {
    const double a = static_cast<double>(steps - i) / denom;
    const double b = static_cast<double>(i - 1) / denom;
    out[static_cast<std::size_t>(i - 1)] = a * r_out + b * r_in;
  }
  return out;
}

LevelStats level_stats(std::span<const double> r_out, double r_in, const IamConfig& cfg,
                       std::optional<double> cross_example_var) {
  if (r_out.empty()) throw validation_error("insufficient_shadows", "at least one shadow response required");
  if (r_out.size() == 1 && !cross_example_var)
    throw validation_error("missing_cross_example_var", "a single shadow needs a cross-example variance");
  const int m = cfg.steps;
  if (m < 2) throw validation_error("invalid_steps", "steps must be >= 2");

  const auto levels = static_cast<std::size_t>(m - 1);
  LevelStats stats;
  stats.mean.resize(levels);
  stats.variance.resize(levels);
  stats.samples.assign(levels, std::vector<double>(r_out.size()));

  for (std::size_t j = 0; j < r_out.size(); ++j) {
    const auto trajectory = interpolate(r_out[j], r_in, m);
    for (std::size_t i = 0; i < levels; ++i) stats.samples[i][j] = trajectory[i];
  }
  for (std::size_t i = 0; i < levels; ++i) {
    stats.mean[i] = mean(stats.samples[i]);
    if (r_out.size() >= 2) {
      stats.variance[i] = sample_variance(stats.samples[i]);
    } else {
      const double a = out_weight(static_cast<int>(i) + 1, m);
      stats.variance[i] = *cross_example_var * a * a;
    }
  }
  return stats;
}

GumbelParams fit_gumbel(double mean, double variance, double beta_floor) {
  const double beta =
      std::max(std::sqrt(6.0 * std::max(variance, 0.0)) / std::numbers::pi, beta_floor);
  return {mean - kEulerGamma * beta, beta};
}

double gumbel_cdf(double x, const GumbelParams& params) {
  return std::exp(-std::exp(-(x - params.location) / params.scale));
}

double aggregate_levels(std::span<const double> q) {
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    const double w = static_cast<double>(i + 1);
    num += w * q[i];
    den += w;
  }
  return den > 0.0 ? num / den : 0.0;
}

std::vector<double> level_probabilities(const LevelStats& stats, double r_target,
                                        const IamConfig& cfg) {
  std::vector<double> q(stats.levels());
  for (std::size_t i = 0; i < stats.levels(); ++i) {
    const double mu = stats.mean[i];
    const double var = stats.variance[i];
    switch (cfg.estimator) {
      case EstimatorKind::Gumbel:
        q[i] = gumbel_cdf(r_target, fit_gumbel(mu, var, cfg.beta_floor));
        break;
      case EstimatorKind::Gauss: q[i] = q_gauss(r_target, mu, var, cfg.beta_floor); break;
      case EstimatorKind::Bayes: q[i] = q_bayes_moments(r_target, mu, var, stats.samples[i]); break;
      case EstimatorKind::Ecdf: q[i] = q_ecdf(r_target, stats.samples[i]); break;
      case EstimatorKind::Kde: q[i] = q_kde(r_target, stats.samples[i]); break;
      case EstimatorKind::Loss:
        throw validation_error("invalid_estimator", "loss has no per-level distribution");
    }
  }
  return q;
}

namespace {

double finish_score(std::span<const double> q, const IamConfig& cfg) {
  const double s = aggregate_levels(q);
  return cfg.flip_output ? 1.0 - s : s;
}

void check_shadow_count(EstimatorKind estimator, std::size_t shadows) {
  const int need = min_shadow_models(estimator);
  if (static_cast<int>(shadows) < need)
    throw validation_error("insufficient_shadows",
                           "estimator " + std::string(to_string(estimator)) + " requires at least " +
                               std::to_string(need) + " shadow models, got " +
                               std::to_string(shadows));
}

}  // namespace

double score_example(std::span<const double> r_shadow, double r_in, double r_target,
                     const IamConfig& cfg, std::optional<double> cross_example_var) {
  check_shadow_count(cfg.estimator, r_shadow.size());
  const auto stats = level_stats(r_shadow, r_in, cfg, cross_example_var);
  return finish_score(level_probabilities(stats, r_target, cfg), cfg);
}

double proxy_fitting_signal(const ScenarioManifest& manifest, const TransformConfig& transform_cfg) {
  if (manifest.shadow_self_train.empty())
    throw validation_error("missing_field", "shadow_self_train");
  double total = 0.0;
  for (const auto& [id, confidences] : manifest.shadow_self_train) {
    double acc = 0.0;
    for (double p : confidences) acc += transform(clamp_confidence(p), transform_cfg);
    total += acc / static_cast<double>(confidences.size());
  }
  return total / static_cast<double>(manifest.shadow_self_train.size());
}

ScoreReport score_scenario(const ScenarioManifest& manifest, const ConfidenceMatrix& matrix,
                           const IamConfig& cfg) {
  cfg.validate();
  const TransformConfig tcfg = effective_transform(cfg);
  const bool flipped = tcfg.flip_input || cfg.flip_output;

  if (cfg.estimator == EstimatorKind::Loss) {
    ScoreReport report = score_loss(manifest, matrix, tcfg.flip_input);
    report.config.flip = flipped;
    return report;
  }

  const auto shadows = manifest.models_with_role(ModelRole::ShadowOut);
  check_shadow_count(cfg.estimator, shadows.size());
  if (shadows.empty()) throw validation_error("missing_role", "shadow_out");

  const ResponseMatrix responses = apply_transform(matrix, tcfg);
  std::vector<std::size_t> shadow_cols;
  for (const auto* s : shadows) shadow_cols.push_back(*responses.column_index(s->id));

  std::optional<std::size_t> original_col;
  std::optional<double> offline_in;
  if (cfg.mode == Mode::Online) {
    const auto* original = manifest.model_with_role(ModelRole::Original);
    if (original == nullptr) throw validation_error("missing_role", "original");
    original_col = *responses.column_index(original->id);
  } else {
    offline_in = proxy_fitting_signal(manifest, tcfg);
  }

  // Sequential pass: cross-example variance of level-1 (shadow) responses.
  std::optional<double> cross_var;
  if (shadow_cols.size() == 1) {
    std::vector<double> level_one(responses.rows());
    for (std::size_t r = 0; r < responses.rows(); ++r) level_one[r] = responses.at(r, shadow_cols[0]);
    cross_var = population_variance(level_one);
  }

  const auto targets = scoring_targets(manifest);
  std::vector<std::size_t> target_cols;
  for (const auto& t : targets) target_cols.push_back(*responses.column_index(t.model_id));

  const std::size_t n = responses.rows();
  std::vector<double> scores(n * targets.size());
  parallel_for(n, cfg.threads, [&](std::size_t r) {
    std::vector<double> r_out(shadow_cols.size());
    for (std::size_t j = 0; j < shadow_cols.size(); ++j) r_out[j] = responses.at(r, shadow_cols[j]);
    const double r_in = original_col ? responses.at(r, *original_col) : *offline_in;
    const auto stats = level_stats(r_out, r_in, cfg, cross_var);
    for (std::size_t t = 0; t < targets.size(); ++t) {
      const auto q = level_probabilities(stats, responses.at(r, target_cols[t]), cfg);
      scores[r * targets.size() + t] = finish_score(q, cfg);
    }
  });

  ScoreReport report;
  report.scenario_id = manifest.scenario_id;
  report.config = {std::string(to_string(cfg.estimator)),
                   std::string(to_string(cfg.mode)),
                   std::string(to_string(tcfg.kind)),
                   cfg.steps,
                   tcfg.eps1,
                   tcfg.eps2,
                   flipped};
  report.entries.reserve(scores.size());
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t t = 0; t < targets.size(); ++t)
      report.entries.push_back(make_entry(manifest, targets[t], r, scores[r * targets.size() + t]));
  sort_entries(report);
  return report;
}

}  // namespace iam
