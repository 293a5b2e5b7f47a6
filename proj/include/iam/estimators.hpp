#pragma once

#include <span>
#include <string_view>

#include "iam/data_model.hpp"

namespace iam {

// Per-level distribution families that can back q_i = Pr[r_target > X].
enum class EstimatorKind { Gumbel, Gauss, Bayes, Ecdf, Kde, Loss };

std::string_view to_string(EstimatorKind kind);
EstimatorKind parse_estimator(std::string_view text);

// Smallest number of shadow models the estimator can work with.
int min_shadow_models(EstimatorKind kind);

// Normal CDF at x with mean `mean` and std max(sqrt(variance), sigma_floor).
double q_gauss(double x, double mean, double variance, double sigma_floor);

// Beta distribution fitted by the method of moments to `samples`, evaluated
// as the regularized incomplete beta I_p(a, b). Falls back to the mid-rank
// ECDF of the samples when the moment fit is infeasible.
double q_bayes(double p, std::span<const double> samples);
// Same, with moments supplied by the caller (e.g. a cross-example variance
// proxy); `fallback` is only consulted when the fit is infeasible.
double q_bayes_moments(double p, double mean, double variance, std::span<const double> fallback);

// (#{s < x} + 0.5 #{s == x}) / n. Requires at least two samples.
double q_ecdf(double x, std::span<const double> samples);

// Gaussian-kernel CDF estimate with Silverman's bandwidth. Requires at least
// two samples; falls back to the ECDF when the samples have no spread.
double q_kde(double x, std::span<const double> samples);
double silverman_bandwidth(std::span<const double> samples);

// Mid-rank ECDF without the sample-count precondition; used as the fallback
// path inside other estimators.
double midrank_ecdf(double x, std::span<const double> samples);

double standard_normal_cdf(double z);

// Loss baseline: the unlearned/checkpoint model's log-confidence, rank
// normalized to [0, 1] over every scored entry (average ranks for ties).
ScoreReport score_loss(const ScenarioManifest& manifest, const ConfidenceMatrix& matrix,
                       bool flip_input = false);

}  // namespace iam
