#pragma once

#include <span>
#include <vector>

#include "iam/data_model.hpp"

namespace iam {

// ROC convention used throughout: score >= tau predicts "member" (b = 1),
// tied scores share one threshold.
struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;

  bool operator==(const RocPoint&) const = default;
};

// Mann-Whitney U / (n1 n0), ties counted as one half.
double auc(std::span<const double> scores, std::span<const int> bits);

// For each target FPR: the best TPR reachable at a threshold whose FPR does
// not exceed the target.
std::vector<TprAtFpr> tpr_at_fpr(std::span<const double> scores, std::span<const int> bits,
                                 std::span<const double> fpr_targets);

// Staircase from (0,0) to (1,1), one point per distinct threshold.
std::vector<RocPoint> roc_points(std::span<const double> scores, std::span<const int> bits);
std::string format_roc_csv(std::span<const RocPoint> points);

// Pearson correlation of average ranks.
double spearman(std::span<const double> x, std::span<const double> y);

inline constexpr double kBceClamp = 1e-12;

// Class-balanced BCE with positives weighted by n0 / n1.
double weighted_bce(std::span<const double> scores, std::span<const int> bits,
                    double clamp = kBceClamp);

inline constexpr double kDefaultDelta1 = 0.1;
inline constexpr double kDefaultThresholdConstant = 1.5;

struct RiskThresholds {
  double delta1 = kDefaultDelta1;  // under-unlearning if b = 0 and score > delta1
  double delta2 = 1.0;             // over-unlearning if b = 1 and score < delta2
  double threshold_constant = kDefaultThresholdConstant;

  // delta2 = clamp(C - test_accuracy, 0, 1).
  static RiskThresholds from_accuracy(double test_accuracy, double delta1 = kDefaultDelta1,
                                      double threshold_constant = kDefaultThresholdConstant);
  void validate() const;
};

struct RiskFlags {
  std::vector<bool> under;
  std::vector<bool> over;
  GroupSummary retained;   // b = 1
  GroupSummary unlearned;  // b = 0
};

RiskFlags classify_risks(std::span<const double> scores, std::span<const int> bits,
                         const RiskThresholds& thresholds);

// Mean and sample standard deviation (zero for fewer than two values).
GroupSummary summarize(std::span<const double> values);

inline const std::vector<double> kDefaultFprTargets = {1e-4, 0.0};

// Fills metrics/risk blocks and per-entry flags from the entries' own ground
// truth. Entries with a bit feed AUC/TPR/BCE/risk; entries with a truth value
// feed Spearman. Blocks whose ground truth is absent stay empty.
void evaluate_report(ScoreReport& report, const RiskThresholds& thresholds,
                     std::span<const double> fpr_targets);

}  // namespace iam
