#include "iam/benchgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "iam/error.hpp"
#include "iam/random.hpp"
#include "iam/stats.hpp"

namespace iam::bench {

namespace {

// Sub-seed streams. Keeping them fixed keeps every model reproducible from the
// scenario seed alone.
enum Stream : std::uint64_t {
  kMeans = 0,
  kTrainSplit = 1,
  kShadowSplit = 2,
  kTestSplit = 3,
  kOriginal = 10,
  kUnlearnPick = 11,
  kShadowBase = 20,
  kPostBase = 100,
  kPostShuffle = 101,
};

Dataset sample_split(const Eigen::MatrixXd& means, int n, double sigma, std::uint64_t seed) {
  Rng rng(seed);
  const auto dim = means.cols();
  Dataset d;
  d.features.resize(n, dim);
  d.labels.resize(static_cast<std::size_t>(n));
  d.source_index.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const int label = static_cast<int>(rng.index(static_cast<std::size_t>(means.rows())));
    d.labels[static_cast<std::size_t>(i)] = label;
    d.source_index[static_cast<std::size_t>(i)] = static_cast<std::size_t>(i);
    for (Eigen::Index j = 0; j < dim; ++j) d.features(i, j) = means(label, j) + sigma * rng.normal();
  }
  return d;
}

std::vector<double> clamped(std::vector<double> values) {
  for (double& v : values) v = clamp_confidence(v);
  return values;
}

std::vector<std::string> example_ids(std::size_t n) {
  std::vector<std::string> ids;
  ids.reserve(n);
  for (std::size_t i = 0; i < n; ++i) ids.push_back(example_id(i));
  return ids;
}

struct ShadowSet {
  std::vector<TrainedModel> models;
  std::vector<std::string> ids;
};

ShadowSet train_shadows(const SynthData& data, const BenchConfig& config, std::uint64_t seed) {
  ShadowSet out;
  for (int j = 0; j < config.n_shadows; ++j) {
    TrainSpec ts = config.train;
    ts.seed = derive_seed(seed, kShadowBase + static_cast<std::uint64_t>(j));
    out.models.push_back(train_mlp(data.shadow, data.test, ts));
    out.ids.push_back("shadow_" + std::to_string(j));
  }
  return out;
}

void add_shadow_columns(const ShadowSet& shadows, const SynthData& data, ScenarioManifest& manifest,
                        std::vector<std::pair<std::string, std::vector<double>>>& columns) {
  for (std::size_t j = 0; j < shadows.models.size(); ++j) {
    manifest.models.push_back({shadows.ids[j], ModelRole::ShadowOut, std::nullopt});
    columns.emplace_back(shadows.ids[j],
                         clamped(shadows.models[j].model.true_label_confidence(data.train)));
    manifest.shadow_self_train[shadows.ids[j]] =
        clamped(shadows.models[j].model.true_label_confidence(data.shadow));
  }
}

ConfidenceMatrix assemble(const ScenarioManifest& manifest,
                          const std::vector<std::pair<std::string, std::vector<double>>>& columns) {
  std::vector<std::string> model_ids;
  for (const auto& [id, _] : columns) model_ids.push_back(id);
  ConfidenceMatrix matrix(manifest.example_ids, model_ids);
  for (const auto& [id, values] : columns) matrix.set_column(id, values);
  return matrix;
}

}  // namespace

std::string example_id(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "ex_%05zu", index);
  return buf;
}

void SynthSpec::validate() const {
  if (n_classes < 2) throw validation_error("invalid_synth_spec", "n_classes must be >= 2");
  if (dim < 1) throw validation_error("invalid_synth_spec", "dim must be >= 1");
  if (n_train < 2 || n_shadow < 1 || n_test < 1)
    throw validation_error("invalid_synth_spec", "split sizes must be positive");
  if (!(sigma >= 0.0)) throw validation_error("invalid_synth_spec", "sigma must be >= 0");
}

void TrainSpec::validate() const {
  if (epochs < 0) throw validation_error("invalid_train_spec", "epochs must be >= 0");
  if (!(learning_rate > 0.0)) throw validation_error("invalid_train_spec", "learning_rate must be > 0");
  if (batch_size < 1) throw validation_error("invalid_train_spec", "batch_size must be >= 1");
  for (int h : hidden)
    if (h < 1) throw validation_error("invalid_train_spec", "hidden sizes must be >= 1");
  if (checkpoint_count < 1) throw validation_error("invalid_train_spec", "checkpoint_count must be >= 1");
}

void BenchConfig::validate() const {
  synth.validate();
  train.validate();
  if (!(unlearn_fraction > 0.0 && unlearn_fraction < 1.0))
    throw validation_error("invalid_unlearn_fraction", "must lie in (0, 1)");
  if (n_shadows < 1) throw validation_error("invalid_shadows", "n_shadows must be >= 1");
  if (post_train_budget < 1) throw validation_error("invalid_budget", "post_train_budget must be >= 1");
}

SynthData gen_data(const SynthSpec& spec) {
  spec.validate();
  Rng rng(derive_seed(spec.seed, kMeans));
  Eigen::MatrixXd means(spec.n_classes, spec.dim);
  for (int c = 0; c < spec.n_classes; ++c) {
    for (int j = 0; j < spec.dim; ++j) means(c, j) = rng.normal();
    means.row(c).normalize();
  }
  return {sample_split(means, spec.n_train, spec.sigma, derive_seed(spec.seed, kTrainSplit)),
          sample_split(means, spec.n_shadow, spec.sigma, derive_seed(spec.seed, kShadowSplit)),
          sample_split(means, spec.n_test, spec.sigma, derive_seed(spec.seed, kTestSplit))};
}

TrainedModel train_mlp(const Dataset& train, const Dataset& test, const TrainSpec& spec,
                       TrainLog* log) {
  spec.validate();
  Rng init(derive_seed(spec.seed, 0));
  TrainedModel out;
  const int n_classes = 1 + std::max(*std::max_element(train.labels.begin(), train.labels.end()),
                                     test.labels.empty() ? 0 : *std::max_element(test.labels.begin(), test.labels.end()));
  out.model = Mlp(static_cast<int>(train.features.cols()), spec.hidden, n_classes, init);
  SgdTrainer trainer(out.model, train, spec.learning_rate, spec.batch_size,
                     derive_seed(spec.seed, 1), log);
  trainer.run_epochs(spec.epochs);
  out.train_accuracy = out.model.accuracy(train);
  out.test_accuracy = out.model.accuracy(test);
  return out;
}

BenchScenario make_binui_scenario(std::uint64_t seed, const BenchConfig& config) {
  config.validate();
  SynthSpec synth = config.synth;
  synth.seed = seed;
  const SynthData data = gen_data(synth);
  const std::size_t n = data.train.size();

  TrainSpec base = config.train;
  base.seed = derive_seed(seed, kOriginal);
  const TrainedModel original = train_mlp(data.train, data.test, base);

  const auto n_unlearn = static_cast<std::size_t>(
      std::ceil(config.unlearn_fraction * static_cast<double>(n) - 1e-9));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng picker(derive_seed(seed, kUnlearnPick));
  picker.shuffle(order);
  std::vector<std::size_t> unlearn(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_unlearn));
  std::vector<std::size_t> keep(order.begin() + static_cast<std::ptrdiff_t>(n_unlearn), order.end());
  std::sort(unlearn.begin(), unlearn.end());
  std::sort(keep.begin(), keep.end());

  BenchScenario out;
  auto& diag = out.diagnostics;
  const Dataset retained = data.train.subset(keep);
  // Exact unlearning: identical procedure and seed, minus the unlearn set.
  const TrainedModel retrained = train_mlp(retained, data.test, base, &diag.retrain_log);
  const ShadowSet shadows = train_shadows(data, config, seed);

  diag.original_train_accuracy = original.train_accuracy;
  diag.original_test_accuracy = original.test_accuracy;
  diag.retrained_accuracy_on_unlearned = retrained.model.accuracy(data.train.subset(unlearn));
  diag.unlearned_sources = unlearn;

  auto& m = out.manifest;
  m.scenario_id = "binui_seed_" + std::to_string(seed);
  m.example_ids = example_ids(n);
  m.labels = data.train.labels;
  m.unlearn_bits.assign(n, 1);
  for (auto i : unlearn) m.unlearn_bits[i] = 0;
  m.test_accuracy = original.test_accuracy;
  m.train_accuracy = original.train_accuracy;
  m.models = {{"original", ModelRole::Original, std::nullopt},
              {"unlearned", ModelRole::Unlearned, std::nullopt}};

  std::vector<std::pair<std::string, std::vector<double>>> columns;
  columns.emplace_back("original", clamped(original.model.true_label_confidence(data.train)));
  columns.emplace_back("unlearned", clamped(retrained.model.true_label_confidence(data.train)));
  add_shadow_columns(shadows, data, m, columns);
  out.matrix = assemble(m, columns);
  return out;
}

BenchScenario make_scoreui_scenario(std::uint64_t seed, const BenchConfig& config) {
  config.validate();
  SynthSpec synth = config.synth;
  synth.seed = seed;
  const SynthData data = gen_data(synth);
  const std::size_t n = data.train.size();
  const int K = config.train.checkpoint_count;

  TrainSpec base = config.train;
  base.seed = derive_seed(seed, kOriginal);
  const TrainedModel original = train_mlp(data.train, data.test, base);
  const ShadowSet shadows = train_shadows(data, config, seed);

  // Checkpoint 0: a fresh shadow OUT model, distinct from the scoring shadows.
  TrainSpec post_spec = config.train;
  post_spec.seed = derive_seed(seed, kPostBase);
  const TrainedModel start = train_mlp(data.shadow, data.test, post_spec);

  BenchScenario out;
  auto& diag = out.diagnostics;
  diag.original_train_accuracy = original.train_accuracy;
  diag.original_test_accuracy = original.test_accuracy;

  // Pass 1: find how many post-training epochs on the original training set
  // it takes to match the original model's train and test accuracy.
  const std::uint64_t shuffle_seed = derive_seed(seed, kPostShuffle);
  const int budget = std::max(1, config.post_train_budget * std::max(config.train.epochs, 1));
  {
    Mlp probe = start.model;
    SgdTrainer trainer(probe, data.train, config.train.learning_rate, config.train.batch_size,
                       shuffle_seed);
    int best_epoch = budget;
    double best_gap = std::numeric_limits<double>::infinity();
    bool matched = false;
    for (int e = 1; e <= budget; ++e) {
      trainer.run_epochs(1);
      const double train_gap = std::abs(probe.accuracy(data.train) - original.train_accuracy);
      const double test_gap = std::abs(probe.accuracy(data.test) - original.test_accuracy);
      const double gap = std::max(train_gap, test_gap);
      if (gap < best_gap) {
        best_gap = gap;
        best_epoch = e;
      }
      if (train_gap <= config.accuracy_tolerance && test_gap <= config.accuracy_tolerance) {
        best_epoch = e;
        matched = true;
        break;
      }
    }
    diag.post_train_epochs = best_epoch;
    diag.accuracy_matched = matched;
    if (!matched)
      diag.warnings.push_back("post-training did not match original accuracy within " +
                              format_double(config.accuracy_tolerance) + " after " +
                              std::to_string(budget) + " epochs; using best epoch " +
                              std::to_string(best_epoch));
  }

  // Pass 2: replay the same trajectory and keep K equally spaced checkpoints.
  std::vector<std::pair<std::string, std::vector<double>>> columns;
  columns.emplace_back("original", clamped(original.model.true_label_confidence(data.train)));

  auto& m = out.manifest;
  m.scenario_id = "scoreui_seed_" + std::to_string(seed);
  m.example_ids = example_ids(n);
  m.labels = data.train.labels;
  m.unlearn_bits.assign(n, 1);
  m.test_accuracy = original.test_accuracy;
  m.train_accuracy = original.train_accuracy;
  m.checkpoint_count = K;
  m.models = {{"original", ModelRole::Original, std::nullopt}};
  add_shadow_columns(shadows, data, m, columns);

  auto checkpoint_id = [](int k) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "ckpt_%02d", k);
    return std::string(buf);
  };
  auto record = [&](int k, const Mlp& model) {
    auto conf = clamped(model.true_label_confidence(data.train));
    diag.checkpoint_mean_confidence.push_back(mean(conf));
    if (k == 0) return;  // the starting OUT model is not a scoring target
    m.models.push_back({checkpoint_id(k), ModelRole::Checkpoint, k});
    columns.emplace_back(checkpoint_id(k), std::move(conf));
  };

  Mlp post = start.model;
  record(0, post);
  SgdTrainer trainer(post, data.train, config.train.learning_rate, config.train.batch_size,
                     shuffle_seed);
  const std::size_t total_steps =
      static_cast<std::size_t>(diag.post_train_epochs) * trainer.steps_per_epoch();
  std::size_t done = 0;
  for (int k = 1; k <= K; ++k) {
    const auto target = static_cast<std::size_t>(
        std::llround(static_cast<double>(k) * static_cast<double>(total_steps) / K));
    trainer.run_steps(target - done);
    done = target;
    record(k, post);
  }
  diag.post_train_accuracy = post.accuracy(data.train);
  diag.post_test_accuracy = post.accuracy(data.test);

  out.matrix = assemble(m, columns);
  return out;
}

}  // namespace iam::bench
