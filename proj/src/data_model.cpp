#include "iam/data_model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>

#include "iam/error.hpp"
#include "json.hpp"

namespace iam {

using nlohmann::json;

std::string_view to_string(ModelRole role) {
  switch (role) {
    case ModelRole::Original: return "original";
    case ModelRole::Unlearned: return "unlearned";
    case ModelRole::ShadowOut: return "shadow_out";
    case ModelRole::Checkpoint: return "checkpoint";
  }
  return "unknown";
}

ModelRole parse_model_role(std::string_view text) {
  if (text == "original") return ModelRole::Original;
  if (text == "unlearned") return ModelRole::Unlearned;
  if (text == "shadow_out") return ModelRole::ShadowOut;
  if (text == "checkpoint") return ModelRole::Checkpoint;
  throw validation_error("invalid_role", std::string(text));
}

const ModelEntry* ScenarioManifest::find_model(std::string_view id) const {
  for (const auto& m : models)
    if (m.id == id) return &m;
  return nullptr;
}

const ModelEntry* ScenarioManifest::model_with_role(ModelRole role) const {
  for (const auto& m : models)
    if (m.role == role) return &m;
  return nullptr;
}

std::vector<const ModelEntry*> ScenarioManifest::models_with_role(ModelRole role) const {
  std::vector<const ModelEntry*> out;
  for (const auto& m : models)
    if (m.role == role) out.push_back(&m);
  return out;
}

// ---------------------------------------------------------------------------
// ConfidenceMatrix

ConfidenceMatrix::ConfidenceMatrix(std::vector<std::string> example_ids,
                                   std::vector<std::string> model_ids)
    : example_ids_(std::move(example_ids)),
      model_ids_(std::move(model_ids)),
      values_(example_ids_.size() * model_ids_.size(), 0.0) {}

ConfidenceMatrix::ConfidenceMatrix(std::vector<std::string> example_ids,
                                   std::vector<std::string> model_ids, std::vector<double> values)
    : example_ids_(std::move(example_ids)),
      model_ids_(std::move(model_ids)),
      values_(std::move(values)) {
  if (values_.size() != example_ids_.size() * model_ids_.size())
    throw validation_error("dimension_mismatch",
                           "expected " + std::to_string(example_ids_.size() * model_ids_.size()) +
                               " cells, got " + std::to_string(values_.size()));
}

std::optional<std::size_t> ConfidenceMatrix::column_index(std::string_view model_id) const {
  auto it = std::find(model_ids_.begin(), model_ids_.end(), model_id);
  if (it == model_ids_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - model_ids_.begin());
}

std::vector<double> ConfidenceMatrix::column(std::string_view model_id) const {
  auto col = column_index(model_id);
  if (!col) throw validation_error("missing_model", std::string(model_id));
  std::vector<double> out(rows());
  for (std::size_t r = 0; r < rows(); ++r) out[r] = at(r, *col);
  return out;
}

void ConfidenceMatrix::set_column(std::string_view model_id, std::span<const double> values) {
  auto col = column_index(model_id);
  if (!col) throw validation_error("missing_model", std::string(model_id));
  if (values.size() != rows())
    throw validation_error("dimension_mismatch", "column " + std::string(model_id));
  for (std::size_t r = 0; r < rows(); ++r) at(r, *col) = values[r];
}

double clamp_confidence(double p) {
  return std::clamp(p, kConfidenceFloor, 1.0 - kConfidenceFloor);
}

// ---------------------------------------------------------------------------
// Validation

namespace {

std::size_t clamp_and_check(ConfidenceMatrix& matrix) {
  std::size_t clamped = 0;
  for (std::size_t r = 0; r < matrix.rows(); ++r) {
    for (std::size_t c = 0; c < matrix.cols(); ++c) {
      double& v = matrix.at(r, c);
      const std::string where = matrix.example_ids()[r] + "/" + matrix.model_ids()[c];
      if (!std::isfinite(v)) throw validation_error("non_finite_cell", where);
      if (v < 0.0 || v > 1.0) throw validation_error("confidence_out_of_range", where);
      const double clamped_v = clamp_confidence(v);
      if (clamped_v != v) {
        v = clamped_v;
        ++clamped;
      }
    }
  }
  return clamped;
}

void check_unit_interval(double v, const std::string& field) {
  if (!std::isfinite(v) || v < 0.0 || v > 1.0) throw validation_error("out_of_range", field);
}

}  // namespace

void validate_scenario(const ScenarioManifest& manifest, ConfidenceMatrix& matrix) {
  const std::size_t n = manifest.n_examples();
  if (n == 0) throw validation_error("empty_scenario", "example_ids");
  if (manifest.labels.size() != n)
    throw validation_error("dimension_mismatch", "labels has " +
                                                     std::to_string(manifest.labels.size()) +
                                                     " entries, expected " + std::to_string(n));
  if (manifest.unlearn_bits.size() != n)
    throw validation_error("dimension_mismatch", "unlearn_bits has " +
                                                     std::to_string(manifest.unlearn_bits.size()) +
                                                     " entries, expected " + std::to_string(n));
  for (auto b : manifest.unlearn_bits)
    if (b > 1) throw validation_error("invalid_bit", "unlearn_bits");
  for (int label : manifest.labels)
    if (label < 0) throw validation_error("invalid_label", "labels");
  if (manifest.ground_truth_scores) {
    if (manifest.ground_truth_scores->size() != n)
      throw validation_error("dimension_mismatch", "ground_truth_scores");
    for (double s : *manifest.ground_truth_scores) check_unit_interval(s, "ground_truth_scores");
  }
  check_unit_interval(manifest.test_accuracy, "test_accuracy");
  check_unit_interval(manifest.train_accuracy, "train_accuracy");

  std::set<std::string> seen_examples;
  for (const auto& id : manifest.example_ids)
    if (!seen_examples.insert(id).second) throw validation_error("duplicate_example", id);

  std::set<std::string> seen_models;
  std::set<int> checkpoint_indices;
  int originals = 0, unlearned = 0, checkpoints = 0;
  for (const auto& m : manifest.models) {
    if (!seen_models.insert(m.id).second) throw validation_error("duplicate_model", m.id);
    switch (m.role) {
      case ModelRole::Original: ++originals; break;
      case ModelRole::Unlearned: ++unlearned; break;
      case ModelRole::ShadowOut: break;
      case ModelRole::Checkpoint: {
        ++checkpoints;
        if (!m.checkpoint_index) throw validation_error("missing_checkpoint_index", m.id);
        if (!manifest.checkpoint_count || *manifest.checkpoint_count < 1)
          throw validation_error("missing_field", "checkpoint_count");
        const int k = *m.checkpoint_index;
        if (k < 0 || k > *manifest.checkpoint_count)
          throw validation_error("invalid_checkpoint_index", m.id);
        if (!checkpoint_indices.insert(k).second)
          throw validation_error("duplicate_checkpoint_index", m.id);
        break;
      }
    }
    if (m.role != ModelRole::Checkpoint && m.checkpoint_index)
      throw validation_error("unexpected_checkpoint_index", m.id);
  }
  if (originals > 1) throw validation_error("duplicate_role", "original");
  if (unlearned > 1) throw validation_error("duplicate_role", "unlearned");
  if (unlearned == 0 && checkpoints == 0)
    throw validation_error("missing_role", "unlearned or checkpoint");

  for (const auto& [id, values] : manifest.shadow_self_train) {
    const auto* m = manifest.find_model(id);
    if (m == nullptr || m->role != ModelRole::ShadowOut)
      throw validation_error("invalid_shadow_self_train", id);
    if (values.empty()) throw validation_error("empty_shadow_self_train", id);
    for (double v : values)
      if (!std::isfinite(v) || v < 0.0 || v > 1.0)
        throw validation_error("invalid_shadow_self_train", id);
  }

  // Column set must equal the manifest model set.
  for (const auto& m : manifest.models)
    if (!matrix.column_index(m.id)) throw validation_error("missing_model", m.id);
  for (const auto& id : matrix.model_ids())
    if (!manifest.find_model(id)) throw validation_error("unknown_model", id);
  if (matrix.rows() != n)
    throw validation_error("dimension_mismatch", "matrix has " + std::to_string(matrix.rows()) +
                                                     " rows, expected " + std::to_string(n));

  std::unordered_map<std::string, std::size_t> row_of;
  for (std::size_t r = 0; r < matrix.rows(); ++r)
    if (!row_of.emplace(matrix.example_ids()[r], r).second)
      throw validation_error("duplicate_example", matrix.example_ids()[r]);
  for (const auto& id : manifest.example_ids)
    if (!row_of.count(id)) throw validation_error("missing_example", id);

  // Canonical layout: manifest row order, manifest column order.
  std::vector<std::string> model_ids;
  for (const auto& m : manifest.models) model_ids.push_back(m.id);
  if (model_ids != matrix.model_ids() || manifest.example_ids != matrix.example_ids()) {
    ConfidenceMatrix reordered(manifest.example_ids, model_ids);
    for (std::size_t r = 0; r < n; ++r) {
      const std::size_t src_row = row_of.at(manifest.example_ids[r]);
      for (std::size_t c = 0; c < model_ids.size(); ++c)
        reordered.at(r, c) = matrix.at(src_row, *matrix.column_index(model_ids[c]));
    }
    matrix = std::move(reordered);
  }
}

// ---------------------------------------------------------------------------
// Text codecs

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) throw validation_error("format_error", "double");
  return std::string(buf, ptr);
}

namespace {

template <typename T>
T require(const json& j, const char* key) {
  if (!j.contains(key)) throw validation_error("missing_field", key);
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw validation_error("invalid_field", key);
  }
}

template <typename T>
std::optional<T> optional_field(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw validation_error("invalid_field", key);
  }
}

json parse_json(std::string_view text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw validation_error("malformed_json", std::string(what) + ": " + e.what());
  }
}

double parse_double(std::string_view cell, const std::string& where) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec == std::errc::result_out_of_range)
    throw validation_error("non_finite_cell", where);
  if (ec != std::errc() || ptr != cell.data() + cell.size()) {
    // from_chars rejects "nan"/"inf" spellings with a sign; classify them.
    std::string lower(cell);
    std::transform(lower.begin(), lower.end(), lower.begin(), ::tolower);
    if (lower.find("nan") != std::string::npos || lower.find("inf") != std::string::npos)
      throw validation_error("non_finite_cell", where);
    throw validation_error("malformed_cell", where);
  }
  return v;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

}  // namespace

ScenarioManifest parse_manifest(std::string_view json_text) {
  const json j = parse_json(json_text, "manifest");
  if (!j.is_object()) throw validation_error("malformed_json", "manifest must be an object");

  ScenarioManifest m;
  m.scenario_id = require<std::string>(j, "scenario_id");
  m.example_ids = require<std::vector<std::string>>(j, "example_ids");
  m.labels = require<std::vector<int>>(j, "labels");
  for (int b : require<std::vector<int>>(j, "unlearn_bits")) {
    if (b != 0 && b != 1) throw validation_error("invalid_bit", "unlearn_bits");
    m.unlearn_bits.push_back(static_cast<std::uint8_t>(b));
  }
  if (auto n = optional_field<std::size_t>(j, "n_examples"); n && *n != m.example_ids.size())
    throw validation_error("dimension_mismatch", "n_examples");
  m.ground_truth_scores = optional_field<std::vector<double>>(j, "ground_truth_scores");
  m.checkpoint_count = optional_field<int>(j, "checkpoint_count");
  m.test_accuracy = optional_field<double>(j, "test_accuracy").value_or(0.0);
  m.train_accuracy = optional_field<double>(j, "train_accuracy").value_or(0.0);

  if (!j.contains("models") || !j.at("models").is_array())
    throw validation_error("missing_field", "models");
  for (const auto& entry : j.at("models")) {
    ModelEntry model;
    model.id = require<std::string>(entry, "id");
    model.role = parse_model_role(require<std::string>(entry, "role"));
    model.checkpoint_index = optional_field<int>(entry, "checkpoint_index");
    m.models.push_back(std::move(model));
  }

  if (j.contains("shadow_self_train")) {
    const auto& sst = j.at("shadow_self_train");
    if (!sst.is_object()) throw validation_error("invalid_field", "shadow_self_train");
    for (const auto& [id, value] : sst.items()) {
      // A bare number is accepted as a single summary confidence.
      if (value.is_number()) {
        m.shadow_self_train[id] = {value.get<double>()};
      } else if (value.is_array()) {
        try {
          m.shadow_self_train[id] = value.get<std::vector<double>>();
        } catch (const json::exception&) {
          throw validation_error("invalid_field", "shadow_self_train." + id);
        }
      } else {
        throw validation_error("invalid_field", "shadow_self_train." + id);
      }
    }
  }
  return m;
}

std::string format_manifest(const ScenarioManifest& m) {
  json j;
  j["scenario_id"] = m.scenario_id;
  j["n_examples"] = m.n_examples();
  j["example_ids"] = m.example_ids;
  j["labels"] = m.labels;
  std::vector<int> bits(m.unlearn_bits.begin(), m.unlearn_bits.end());
  j["unlearn_bits"] = bits;
  if (m.ground_truth_scores) j["ground_truth_scores"] = *m.ground_truth_scores;
  if (m.checkpoint_count) j["checkpoint_count"] = *m.checkpoint_count;
  j["test_accuracy"] = m.test_accuracy;
  j["train_accuracy"] = m.train_accuracy;
  json models = json::array();
  for (const auto& model : m.models) {
    json e;
    e["id"] = model.id;
    e["role"] = std::string(to_string(model.role));
    if (model.checkpoint_index) e["checkpoint_index"] = *model.checkpoint_index;
    models.push_back(std::move(e));
  }
  j["models"] = std::move(models);
  if (!m.shadow_self_train.empty()) {
    json sst = json::object();
    for (const auto& [id, values] : m.shadow_self_train) sst[id] = values;
    j["shadow_self_train"] = std::move(sst);
  }
  return j.dump(1) + "\n";
}

ConfidenceMatrix parse_matrix_csv(std::string_view text) {
  std::vector<std::string_view> lines;
  for (auto line : split(text, '\n')) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty()) lines.push_back(line);
  }
  if (lines.empty()) throw validation_error("malformed_csv", "missing header row");

  auto header = split(lines.front(), ',');
  if (header.size() < 2) throw validation_error("malformed_csv", "header needs example_id plus models");
  std::vector<std::string> model_ids(header.begin() + 1, header.end());

  std::vector<std::string> example_ids;
  std::vector<double> values;
  values.reserve((lines.size() - 1) * model_ids.size());
  for (std::size_t li = 1; li < lines.size(); ++li) {
    auto cells = split(lines[li], ',');
    if (cells.size() != header.size())
      throw validation_error("dimension_mismatch",
                             "row " + std::to_string(li) + " has " + std::to_string(cells.size()) +
                                 " cells, expected " + std::to_string(header.size()));
    example_ids.emplace_back(cells[0]);
    for (std::size_t c = 1; c < cells.size(); ++c)
      values.push_back(parse_double(cells[c], example_ids.back() + "/" + model_ids[c - 1]));
  }
  return ConfidenceMatrix(std::move(example_ids), std::move(model_ids), std::move(values));
}

std::string format_matrix_csv(const ConfidenceMatrix& matrix) {
  std::string out = "example_id";
  for (const auto& id : matrix.model_ids()) out += "," + id;
  out += "\n";
  for (std::size_t r = 0; r < matrix.rows(); ++r) {
    out += matrix.example_ids()[r];
    for (std::size_t c = 0; c < matrix.cols(); ++c) {
      out += ",";
      out += format_double(matrix.at(r, c));
    }
    out += "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Files

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("unreadable_file", path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw io_error("unwritable_path", path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw io_error("write_failed", path.string());
}

Scenario load_scenario(const std::filesystem::path& manifest_path,
                       const std::filesystem::path& matrix_path) {
  Scenario s;
  s.manifest = parse_manifest(read_text_file(manifest_path));
  s.matrix = parse_matrix_csv(read_text_file(matrix_path));
  validate_scenario(s.manifest, s.matrix);
  s.clamped_cells = clamp_and_check(s.matrix);
  return s;
}

void save_scenario(const ScenarioManifest& manifest, const ConfidenceMatrix& matrix,
                   const std::filesystem::path& manifest_path,
                   const std::filesystem::path& matrix_path) {
  write_text_file(manifest_path, format_manifest(manifest));
  write_text_file(matrix_path, format_matrix_csv(matrix));
}

// ---------------------------------------------------------------------------
// Reports

void sort_entries(ScoreReport& report) {
  std::stable_sort(report.entries.begin(), report.entries.end(),
                   [](const ScoreEntry& a, const ScoreEntry& b) {
                     return std::tie(a.example_id, a.target_id) <
                            std::tie(b.example_id, b.target_id);
                   });
}

std::vector<ScoringTarget> scoring_targets(const ScenarioManifest& manifest) {
  std::vector<ScoringTarget> targets;
  for (const auto& m : manifest.models) {
    if (m.role == ModelRole::Unlearned) {
      targets.push_back({m.id, true, std::nullopt});
    } else if (m.role == ModelRole::Checkpoint) {
      const double k = *m.checkpoint_index;
      targets.push_back({m.id, false, k / *manifest.checkpoint_count});
    }
  }
  return targets;
}

ScoreEntry make_entry(const ScenarioManifest& manifest, const ScoringTarget& target,
                      std::size_t row, double score) {
  ScoreEntry e;
  e.example_id = manifest.example_ids[row];
  e.target_id = target.model_id;
  e.score = score;
  if (target.is_unlearned) {
    e.bit = manifest.unlearn_bits[row];
    if (manifest.ground_truth_scores) e.truth = (*manifest.ground_truth_scores)[row];
  } else {
    e.truth = target.checkpoint_truth;
  }
  return e;
}

namespace {

json group_to_json(const GroupSummary& g) {
  return json{{"count", g.count}, {"mean", g.mean}, {"std", g.std}};
}

GroupSummary group_from_json(const json& j) {
  return {require<std::size_t>(j, "count"), require<double>(j, "mean"), require<double>(j, "std")};
}

}  // namespace

std::string format_report(const ScoreReport& report) {
  json j;
  j["scenario_id"] = report.scenario_id;
  j["config"] = {{"estimator", report.config.estimator}, {"mode", report.config.mode},
                 {"transform", report.config.transform}, {"steps", report.config.steps},
                 {"eps1", report.config.eps1},           {"eps2", report.config.eps2},
                 {"flip", report.config.flip}};
  json entries = json::array();
  for (const auto& e : report.entries) {
    json je{{"example_id", e.example_id}, {"target", e.target_id}, {"score", e.score}};
    if (e.bit) je["bit"] = *e.bit;
    if (e.truth) je["truth"] = *e.truth;
    if (e.under_unlearning) je["under_unlearning"] = *e.under_unlearning;
    if (e.over_unlearning) je["over_unlearning"] = *e.over_unlearning;
    entries.push_back(std::move(je));
  }
  j["entries"] = std::move(entries);
  if (report.metrics) {
    json jm = json::object();
    const auto& m = *report.metrics;
    if (m.auc) jm["auc"] = *m.auc;
    if (m.weighted_bce) jm["weighted_bce"] = *m.weighted_bce;
    if (m.spearman) jm["spearman"] = *m.spearman;
    if (!m.tpr_at_fpr.empty()) {
      json arr = json::array();
      for (const auto& t : m.tpr_at_fpr) arr.push_back({{"fpr", t.fpr}, {"tpr", t.tpr}});
      jm["tpr_at_fpr"] = std::move(arr);
    }
    j["metrics"] = std::move(jm);
  }
  if (report.risk) {
    const auto& r = *report.risk;
    j["risk"] = {{"delta1", r.delta1},
                 {"delta2", r.delta2},
                 {"threshold_constant", r.threshold_constant},
                 {"retained", group_to_json(r.retained)},
                 {"unlearned", group_to_json(r.unlearned)},
                 {"n_under", r.n_under},
                 {"n_over", r.n_over}};
  }
  // nlohmann's object type is a std::map, so keys come out sorted and doubles
  // use the shortest round-trip representation.
  return j.dump(1) + "\n";
}

ScoreReport parse_report(std::string_view json_text) {
  const json j = parse_json(json_text, "report");
  ScoreReport r;
  r.scenario_id = require<std::string>(j, "scenario_id");
  if (!j.contains("config")) throw validation_error("missing_field", "config");
  const auto& c = j.at("config");
  r.config.estimator = require<std::string>(c, "estimator");
  r.config.mode = require<std::string>(c, "mode");
  r.config.transform = require<std::string>(c, "transform");
  r.config.steps = require<int>(c, "steps");
  r.config.eps1 = require<double>(c, "eps1");
  r.config.eps2 = require<double>(c, "eps2");
  r.config.flip = require<bool>(c, "flip");
  if (!j.contains("entries") || !j.at("entries").is_array())
    throw validation_error("missing_field", "entries");
  for (const auto& je : j.at("entries")) {
    ScoreEntry e;
    e.example_id = require<std::string>(je, "example_id");
    e.target_id = require<std::string>(je, "target");
    e.score = require<double>(je, "score");
    e.bit = optional_field<int>(je, "bit");
    e.truth = optional_field<double>(je, "truth");
    e.under_unlearning = optional_field<bool>(je, "under_unlearning");
    e.over_unlearning = optional_field<bool>(je, "over_unlearning");
    r.entries.push_back(std::move(e));
  }
  if (j.contains("metrics")) {
    const auto& jm = j.at("metrics");
    MetricsBlock m;
    m.auc = optional_field<double>(jm, "auc");
    m.weighted_bce = optional_field<double>(jm, "weighted_bce");
    m.spearman = optional_field<double>(jm, "spearman");
    if (jm.contains("tpr_at_fpr"))
      for (const auto& t : jm.at("tpr_at_fpr"))
        m.tpr_at_fpr.push_back({require<double>(t, "fpr"), require<double>(t, "tpr")});
    r.metrics = std::move(m);
  }
  if (j.contains("risk")) {
    const auto& jr = j.at("risk");
    RiskBlock rb;
    rb.delta1 = require<double>(jr, "delta1");
    rb.delta2 = require<double>(jr, "delta2");
    rb.threshold_constant = require<double>(jr, "threshold_constant");
    rb.retained = group_from_json(jr.at("retained"));
    rb.unlearned = group_from_json(jr.at("unlearned"));
    rb.n_under = require<std::size_t>(jr, "n_under");
    rb.n_over = require<std::size_t>(jr, "n_over");
    r.risk = rb;
  }
  return r;
}

void save_report(const ScoreReport& report, const std::filesystem::path& path) {
  write_text_file(path, format_report(report));
}

ScoreReport load_report(const std::filesystem::path& path) {
  return parse_report(read_text_file(path));
}

}  // namespace iam
