#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "iam/data_model.hpp"
#include "iam/estimators.hpp"
#include "iam/transforms.hpp"

namespace iam {

inline constexpr double kEulerGamma = 0.57721566490153286061;
inline constexpr int kDefaultSteps = 100;
inline constexpr double kDefaultBetaFloor = 1e-6;

enum class Mode { Online, Offline };

std::string_view to_string(Mode mode);
Mode parse_mode(std::string_view text);

struct IamConfig {
  int steps = kDefaultSteps;  // m, number of interpolation steps
  EstimatorKind estimator = EstimatorKind::Gumbel;
  Mode mode = Mode::Online;
  // Response map for the gumbel/ecdf/kde estimators. gauss always works on
  // logits and bayes on raw confidences; flip_input applies to all of them.
  TransformConfig transform;
  // Report 1 - score (second half of the double flip).
  bool flip_output = false;
  // Lower bound on fitted scale (gumbel) or std (gauss).
  double beta_floor = kDefaultBetaFloor;
  // Worker threads for the per-example phase; results do not depend on it.
  unsigned threads = 1;

  void validate() const;
};

// Transform actually used for the configured estimator.
TransformConfig effective_transform(const IamConfig& cfg);

struct GumbelParams {
  double location = 0.0;  // alpha
  double scale = 1.0;     // beta

  bool operator==(const GumbelParams&) const = default;
};

// r_i = (m-i)/(m-1) r_out + (i-1)/(m-1) r_in for i = 1..m.
std::vector<double> interpolate(double r_out, double r_in, int steps);

// Coefficient of the OUT response at level i (1-based).
double out_weight(int level, int steps);

// Levels 1..m-1; level m (identical across trajectories) is never stored.
struct LevelStats {
  std::vector<double> mean;
  std::vector<double> variance;
  // samples[i] holds the K interpolated responses at level i+1.
  std::vector<std::vector<double>> samples;

  std::size_t levels() const { return mean.size(); }
};

// With K >= 2 shadows the level moments are the sample mean/variance across
// the K trajectories. With K = 1 the level variance is cross_example_var
// scaled by out_weight(i)^2.
LevelStats level_stats(std::span<const double> r_out, double r_in, const IamConfig& cfg,
                       std::optional<double> cross_example_var = std::nullopt);

// Method of moments: beta = max(sqrt(6 var) / pi, floor), alpha = mean - gamma beta.
GumbelParams fit_gumbel(double mean, double variance, double beta_floor);
double gumbel_cdf(double x, const GumbelParams& params);

// sum_i i q_i / sum_i i over levels i = 1..m-1.
double aggregate_levels(std::span<const double> q);

// Per-level q_i = Pr[r_target > X_i] for the configured estimator.
std::vector<double> level_probabilities(const LevelStats& stats, double r_target,
                                        const IamConfig& cfg);

// Score of one example, already in the estimator's response space.
double score_example(std::span<const double> r_shadow, double r_in, double r_target,
                     const IamConfig& cfg, std::optional<double> cross_example_var = std::nullopt);

// Offline IN substitute: mean over shadows of their mean self-train response.
double proxy_fitting_signal(const ScenarioManifest& manifest, const TransformConfig& transform);

// Full pipeline over every scoring target of the scenario. Returns entries
// and config echo; metrics and risk are filled by evaluate_report().
ScoreReport score_scenario(const ScenarioManifest& manifest, const ConfidenceMatrix& matrix,
                           const IamConfig& cfg);

}  // namespace iam
