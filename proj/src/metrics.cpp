#include "iam/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "iam/error.hpp"
#include "iam/stats.hpp"

namespace iam {

namespace {

struct ClassCounts {
  std::size_t positives = 0;
  std::size_t negatives = 0;
};

ClassCounts check_binary(std::span<const double> scores, std::span<const int> bits,
                         bool need_both) {
  if (scores.size() != bits.size())
    throw validation_error("dimension_mismatch", "scores and bits differ in length");
  ClassCounts c;
  for (int b : bits) {
    if (b == 1)
      ++c.positives;
    else if (b == 0)
      ++c.negatives;
    else
      throw validation_error("invalid_bit", std::to_string(b));
  }
  if (need_both && (c.positives == 0 || c.negatives == 0))
    throw validation_error("single_class", "both b = 0 and b = 1 examples are required");
  return c;
}

}  // namespace

double auc(std::span<const double> scores, std::span<const int> bits) {
  const auto counts = check_binary(scores, bits, true);
  const auto ranks = average_ranks(scores);
  double rank_sum = 0.0;
  for (std::size_t i = 0; i < ranks.size(); ++i)
    if (bits[i] == 1) rank_sum += ranks[i];
  const double n1 = static_cast<double>(counts.positives);
  const double n0 = static_cast<double>(counts.negatives);
  const double u = rank_sum - n1 * (n1 + 1.0) / 2.0;
  return u / (n1 * n0);
}

std::vector<RocPoint> roc_points(std::span<const double> scores, std::span<const int> bits) {
  const auto counts = check_binary(scores, bits, true);
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  std::vector<RocPoint> points{{0.0, 0.0}};
  std::size_t tp = 0, fp = 0;
  std::size_t i = 0;
  while (i < order.size()) {
    const double tau = scores[order[i]];
    while (i < order.size() && scores[order[i]] == tau) {
      (bits[order[i]] == 1 ? tp : fp) += 1;
      ++i;
    }
    points.push_back({static_cast<double>(fp) / static_cast<double>(counts.negatives),
                      static_cast<double>(tp) / static_cast<double>(counts.positives)});
  }
  return points;
}

std::vector<TprAtFpr> tpr_at_fpr(std::span<const double> scores, std::span<const int> bits,
                                 std::span<const double> fpr_targets) {
  const auto points = roc_points(scores, bits);
  std::vector<TprAtFpr> out;
  for (double target : fpr_targets) {
    if (!(target >= 0.0 && target <= 1.0))
      throw validation_error("invalid_fpr_target", format_double(target));
    double best = 0.0;
    for (const auto& p : points)
      if (p.fpr <= target) best = std::max(best, p.tpr);
    out.push_back({target, best});
  }
  return out;
}

std::string format_roc_csv(std::span<const RocPoint> points) {
  std::string out = "fpr,tpr\n";
  for (const auto& p : points) out += format_double(p.fpr) + "," + format_double(p.tpr) + "\n";
  return out;
}

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw validation_error("dimension_mismatch", "spearman inputs differ in length");
  if (x.size() < 2) throw validation_error("insufficient_samples", "spearman needs at least 2 pairs");
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  const double mx = mean(rx);
  const double my = mean(ry);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) throw validation_error("zero_variance", "spearman input is constant");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double weighted_bce(std::span<const double> scores, std::span<const int> bits, double clamp) {
  const auto counts = check_binary(scores, bits, false);
  if (scores.empty()) throw validation_error("insufficient_samples", "weighted_bce needs samples");
  const double w = counts.positives > 0 ? static_cast<double>(counts.negatives) /
                                              static_cast<double>(counts.positives)
                                        : 1.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const double s = std::clamp(scores[i], clamp, 1.0 - clamp);
    acc += bits[i] == 1 ? w * std::log(s) : std::log1p(-s);
  }
  return -acc / static_cast<double>(scores.size());
}

RiskThresholds RiskThresholds::from_accuracy(double test_accuracy, double delta1,
                                             double threshold_constant) {
  RiskThresholds t;
  t.delta1 = delta1;
  t.threshold_constant = threshold_constant;
  t.delta2 = std::clamp(threshold_constant - test_accuracy, 0.0, 1.0);
  return t;
}

void RiskThresholds::validate() const {
  if (!(delta1 >= 0.0 && delta1 <= 1.0)) throw validation_error("invalid_delta1", format_double(delta1));
  if (!(delta2 >= 0.0 && delta2 <= 1.0)) throw validation_error("invalid_delta2", format_double(delta2));
}

GroupSummary summarize(std::span<const double> values) {
  GroupSummary g;
  g.count = values.size();
  g.mean = mean(values);
  g.std = std::sqrt(sample_variance(values));
  return g;
}

RiskFlags classify_risks(std::span<const double> scores, std::span<const int> bits,
                         const RiskThresholds& thresholds) {
  thresholds.validate();
  check_binary(scores, bits, false);
  RiskFlags flags;
  flags.under.resize(scores.size());
  flags.over.resize(scores.size());
  std::vector<double> retained, unlearned;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (bits[i] == 0) {
      flags.under[i] = scores[i] > thresholds.delta1;
      unlearned.push_back(scores[i]);
    } else {
      flags.over[i] = scores[i] < thresholds.delta2;
      retained.push_back(scores[i]);
    }
  }
  flags.retained = summarize(retained);
  flags.unlearned = summarize(unlearned);
  return flags;
}

void evaluate_report(ScoreReport& report, const RiskThresholds& thresholds,
                     std::span<const double> fpr_targets) {
  std::vector<std::size_t> bit_idx, truth_idx;
  for (std::size_t i = 0; i < report.entries.size(); ++i) {
    if (report.entries[i].bit) bit_idx.push_back(i);
    if (report.entries[i].truth) truth_idx.push_back(i);
  }

  MetricsBlock metrics;
  bool any_metric = false;
  if (!bit_idx.empty()) {
    std::vector<double> scores;
    std::vector<int> bits;
    for (auto i : bit_idx) {
      scores.push_back(report.entries[i].score);
      bits.push_back(*report.entries[i].bit);
    }
    const auto counts = check_binary(scores, bits, false);
    if (counts.positives > 0 && counts.negatives > 0) {
      metrics.auc = auc(scores, bits);
      metrics.tpr_at_fpr = tpr_at_fpr(scores, bits, fpr_targets);
    }
    metrics.weighted_bce = weighted_bce(scores, bits);
    any_metric = true;

    const auto flags = classify_risks(scores, bits, thresholds);
    RiskBlock risk;
    risk.delta1 = thresholds.delta1;
    risk.delta2 = thresholds.delta2;
    risk.threshold_constant = thresholds.threshold_constant;
    risk.retained = flags.retained;
    risk.unlearned = flags.unlearned;
    for (std::size_t k = 0; k < bit_idx.size(); ++k) {
      auto& e = report.entries[bit_idx[k]];
      if (bits[k] == 0) {
        e.under_unlearning = flags.under[k];
        risk.n_under += flags.under[k] ? 1 : 0;
      } else {
        e.over_unlearning = flags.over[k];
        risk.n_over += flags.over[k] ? 1 : 0;
      }
    }
    report.risk = risk;
  } else {
    report.risk.reset();
  }

  if (truth_idx.size() >= 2) {
    std::vector<double> scores, truth;
    for (auto i : truth_idx) {
      scores.push_back(report.entries[i].score);
      truth.push_back(*report.entries[i].truth);
    }
    const bool constant_scores = std::all_of(scores.begin(), scores.end(), [&](double s) { return s == scores[0]; });
    const bool constant_truth = std::all_of(truth.begin(), truth.end(), [&](double s) { return s == truth[0]; });
    if (!constant_scores && !constant_truth) {
      metrics.spearman = spearman(scores, truth);
      any_metric = true;
    }
  }

  if (any_metric)
    report.metrics = std::move(metrics);
  else
    report.metrics.reset();
}

}  // namespace iam
