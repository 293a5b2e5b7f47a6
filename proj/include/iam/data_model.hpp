#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace iam {

// Confidences are clamped into [kConfidenceFloor, 1 - kConfidenceFloor] on
// ingestion so that every downstream transform sees an open-interval value.
inline constexpr double kConfidenceFloor = 1e-12;

enum class ModelRole { Original, Unlearned, ShadowOut, Checkpoint };

std::string_view to_string(ModelRole role);
ModelRole parse_model_role(std::string_view text);

struct ModelEntry {
  std::string id;
  ModelRole role = ModelRole::ShadowOut;
  std::optional<int> checkpoint_index;  // only for ModelRole::Checkpoint

  bool operator==(const ModelEntry&) const = default;
};

// Describes one audit scenario: the queried examples, which model plays which
// role, and whatever ground truth is available.
struct ScenarioManifest {
  std::string scenario_id;
  std::vector<std::string> example_ids;
  std::vector<int> labels;
  // 0 = unlearning requested, 1 = retained.
  std::vector<std::uint8_t> unlearn_bits;
  std::optional<std::vector<double>> ground_truth_scores;
  std::vector<ModelEntry> models;
  // K in the checkpoint score rule s = k / K.
  std::optional<int> checkpoint_count;
  // Confidences each shadow assigns to its own training data, keyed by
  // shadow model id. Feeds the offline proxy fitting signal.
  std::map<std::string, std::vector<double>> shadow_self_train;
  double test_accuracy = 0.0;
  double train_accuracy = 0.0;

  std::size_t n_examples() const { return example_ids.size(); }

  const ModelEntry* find_model(std::string_view id) const;
  const ModelEntry* model_with_role(ModelRole role) const;
  std::vector<const ModelEntry*> models_with_role(ModelRole role) const;

  bool operator==(const ScenarioManifest&) const = default;
};

// Row-major (example x model) matrix of true-label confidences.
class ConfidenceMatrix {
 public:
  ConfidenceMatrix() = default;
  ConfidenceMatrix(std::vector<std::string> example_ids, std::vector<std::string> model_ids);
  ConfidenceMatrix(std::vector<std::string> example_ids, std::vector<std::string> model_ids,
                   std::vector<double> values);

  std::size_t rows() const { return example_ids_.size(); }
  std::size_t cols() const { return model_ids_.size(); }
  const std::vector<std::string>& example_ids() const { return example_ids_; }
  const std::vector<std::string>& model_ids() const { return model_ids_; }

  double at(std::size_t row, std::size_t col) const { return values_[row * cols() + col]; }
  double& at(std::size_t row, std::size_t col) { return values_[row * cols() + col]; }

  std::optional<std::size_t> column_index(std::string_view model_id) const;
  std::vector<double> column(std::string_view model_id) const;
  void set_column(std::string_view model_id, std::span<const double> values);

  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  bool operator==(const ConfidenceMatrix&) const = default;

 private:
  std::vector<std::string> example_ids_;
  std::vector<std::string> model_ids_;
  std::vector<double> values_;
};

struct Scenario {
  ScenarioManifest manifest;
  ConfidenceMatrix matrix;
  // Number of cells pulled into [kConfidenceFloor, 1 - kConfidenceFloor].
  std::size_t clamped_cells = 0;
};

double clamp_confidence(double p);

// Checks every manifest/matrix invariant and throws iam::Error on violation.
// Reorders matrix rows to manifest order and columns to manifest model order.
void validate_scenario(const ScenarioManifest& manifest, ConfidenceMatrix& matrix);

Scenario load_scenario(const std::filesystem::path& manifest_path,
                       const std::filesystem::path& matrix_path);
void save_scenario(const ScenarioManifest& manifest, const ConfidenceMatrix& matrix,
                   const std::filesystem::path& manifest_path,
                   const std::filesystem::path& matrix_path);

// String-level codecs, used by the file functions above.
ScenarioManifest parse_manifest(std::string_view json_text);
std::string format_manifest(const ScenarioManifest& manifest);
ConfidenceMatrix parse_matrix_csv(std::string_view csv_text);
std::string format_matrix_csv(const ConfidenceMatrix& matrix);

// Shortest decimal string that parses back to the same double.
std::string format_double(double value);

// ---------------------------------------------------------------------------
// Score reports

struct ScoreEntry {
  std::string example_id;
  std::string target_id;  // model whose responses were scored
  double score = 0.0;
  std::optional<int> bit;       // unlearn bit, present for the unlearned target
  std::optional<double> truth;  // ground-truth membership score when known
  std::optional<bool> under_unlearning;
  std::optional<bool> over_unlearning;

  bool operator==(const ScoreEntry&) const = default;
};

struct GroupSummary {
  std::size_t count = 0;
  double mean = 0.0;
  double std = 0.0;

  bool operator==(const GroupSummary&) const = default;
};

struct TprAtFpr {
  double fpr = 0.0;
  double tpr = 0.0;

  bool operator==(const TprAtFpr&) const = default;
};

struct MetricsBlock {
  std::optional<double> auc;
  std::vector<TprAtFpr> tpr_at_fpr;
  std::optional<double> weighted_bce;
  std::optional<double> spearman;

  bool operator==(const MetricsBlock&) const = default;
};

struct RiskBlock {
  double delta1 = 0.0;
  double delta2 = 0.0;
  double threshold_constant = 0.0;
  GroupSummary retained;
  GroupSummary unlearned;
  std::size_t n_under = 0;
  std::size_t n_over = 0;

  bool operator==(const RiskBlock&) const = default;
};

struct ReportConfig {
  std::string estimator;
  std::string mode;
  std::string transform;
  int steps = 0;
  double eps1 = 0.0;
  double eps2 = 0.0;
  bool flip = false;

  bool operator==(const ReportConfig&) const = default;
};

struct ScoreReport {
  std::string scenario_id;
  ReportConfig config;
  std::vector<ScoreEntry> entries;  // sorted by (example_id, target_id)
  std::optional<MetricsBlock> metrics;
  std::optional<RiskBlock> risk;

  bool operator==(const ScoreReport&) const = default;
};

void sort_entries(ScoreReport& report);

// A model column whose responses get scored: the unlearned model (carrying
// the manifest's bits and optional ground truth) and every checkpoint
// (carrying s = k / K for all examples).
struct ScoringTarget {
  std::string model_id;
  bool is_unlearned = false;
  std::optional<double> checkpoint_truth;
};

std::vector<ScoringTarget> scoring_targets(const ScenarioManifest& manifest);
ScoreEntry make_entry(const ScenarioManifest& manifest, const ScoringTarget& target,
                      std::size_t row, double score);

std::string format_report(const ScoreReport& report);
ScoreReport parse_report(std::string_view json_text);
void save_report(const ScoreReport& report, const std::filesystem::path& path);
ScoreReport load_report(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace iam
