#include "iam/estimators.hpp"

#include <algorithm>
#include <boost/math/special_functions/beta.hpp>
#include <cmath>
#include <string>
#include <vector>

#include "iam/error.hpp"
#include "iam/stats.hpp"
#include "iam/transforms.hpp"

namespace iam {

std::string_view to_string(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::Gumbel: return "gumbel";
    case EstimatorKind::Gauss: return "gauss";
    case EstimatorKind::Bayes: return "bayes";
    case EstimatorKind::Ecdf: return "ecdf";
    case EstimatorKind::Kde: return "kde";
    case EstimatorKind::Loss: return "loss";
  }
  return "unknown";
}

EstimatorKind parse_estimator(std::string_view text) {
  if (text == "gumbel") return EstimatorKind::Gumbel;
  if (text == "gauss") return EstimatorKind::Gauss;
  if (text == "bayes") return EstimatorKind::Bayes;
  if (text == "ecdf") return EstimatorKind::Ecdf;
  if (text == "kde") return EstimatorKind::Kde;
  if (text == "loss") return EstimatorKind::Loss;
  throw validation_error("invalid_estimator", std::string(text));
}

int min_shadow_models(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::Ecdf:
    case EstimatorKind::Kde: return 2;
    case EstimatorKind::Loss: return 0;
    default: return 1;
  }
}

double standard_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double q_gauss(double x, double mean, double variance, double sigma_floor) {
  const double sigma = std::max(std::sqrt(std::max(variance, 0.0)), sigma_floor);
  return standard_normal_cdf((x - mean) / sigma);
}

double midrank_ecdf(double x, std::span<const double> samples) {
  if (samples.empty()) throw validation_error("insufficient_samples", "ecdf needs samples");
  double below = 0.0;
  for (double s : samples) {
    if (s < x)
      below += 1.0;
    else if (s == x)
      below += 0.5;
  }
  return below / static_cast<double>(samples.size());
}

double q_ecdf(double x, std::span<const double> samples) {
  if (samples.size() < 2)
    throw validation_error("insufficient_samples",
                           "ecdf needs at least 2 samples, got " + std::to_string(samples.size()));
  return midrank_ecdf(x, samples);
}

double q_bayes_moments(double p, double mean, double variance, std::span<const double> fallback) {
  const double spread = mean * (1.0 - mean);
  if (!(mean > 0.0 && mean < 1.0) || !(variance > 0.0) || variance >= spread)
    return midrank_ecdf(p, fallback);
  const double common = spread / variance - 1.0;
  const double a = mean * common;
  const double b = (1.0 - mean) * common;
  const double x = std::clamp(p, 0.0, 1.0);
  try {
    return boost::math::ibeta(a, b, x);
  } catch (const std::exception&) {
    return midrank_ecdf(p, fallback);
  }
}

double q_bayes(double p, std::span<const double> samples) {
  if (samples.size() < 2)
    throw validation_error("insufficient_samples",
                           "bayes needs at least 2 samples, got " + std::to_string(samples.size()));
  return q_bayes_moments(p, iam::mean(samples), sample_variance(samples), samples);
}

double silverman_bandwidth(std::span<const double> samples) {
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double sd = std::sqrt(sample_variance(samples));
  const double iqr = sorted_quantile(sorted, 0.75) - sorted_quantile(sorted, 0.25);
  const double spread = iqr > 0.0 ? std::min(sd, iqr / 1.34) : sd;
  return 0.9 * spread * std::pow(static_cast<double>(samples.size()), -0.2);
}

double q_kde(double x, std::span<const double> samples) {
  if (samples.size() < 2)
    throw validation_error("insufficient_samples",
                           "kde needs at least 2 samples, got " + std::to_string(samples.size()));
  const double h = silverman_bandwidth(samples);
  if (!(h > 0.0)) return midrank_ecdf(x, samples);
  double acc = 0.0;
  for (double s : samples) acc += standard_normal_cdf((x - s) / h);
  return acc / static_cast<double>(samples.size());
}

ScoreReport score_loss(const ScenarioManifest& manifest, const ConfidenceMatrix& matrix,
                       bool flip_input) {
  TransformConfig loss_cfg;
  loss_cfg.kind = TransformKind::IdentityLoss;
  loss_cfg.flip_input = flip_input;

  ScoreReport report;
  report.scenario_id = manifest.scenario_id;
  report.config = {"loss", "none", std::string(to_string(TransformKind::IdentityLoss)), 0,
                   0.0,    0.0,    flip_input};

  std::vector<double> raw;
  for (const auto& target : scoring_targets(manifest)) {
    const auto col = matrix.column(target.model_id);
    for (std::size_t r = 0; r < col.size(); ++r) {
      raw.push_back(transform(col[r], loss_cfg));
      report.entries.push_back(make_entry(manifest, target, r, 0.0));
    }
  }
  const auto ranks = average_ranks(raw);
  const double n = static_cast<double>(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i)
    report.entries[i].score = n > 1.0 ? (ranks[i] - 1.0) / (n - 1.0) : 0.5;
  sort_entries(report);
  return report;
}

}  // namespace iam
