#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "iam/data_model.hpp"
#include "iam/mlp.hpp"

namespace iam::bench {

// Class-conditional isotropic Gaussians around random unit-norm means.
struct SynthSpec {
  int n_classes = 5;
  int dim = 20;
  int n_train = 2000;
  int n_shadow = 2000;
  int n_test = 1000;
  double sigma = 0.46;
  std::uint64_t seed = 0;

  void validate() const;
};

struct SynthData {
  Dataset train;
  Dataset shadow;
  Dataset test;
};

SynthData gen_data(const SynthSpec& spec);

struct TrainSpec {
  std::vector<int> hidden = {64, 32};
  int epochs = 150;
  double learning_rate = 0.3;
  int batch_size = 32;
  std::uint64_t seed = 0;
  int checkpoint_count = 20;  // K

  void validate() const;
};

struct TrainedModel {
  Mlp model;
  double train_accuracy = 0.0;
  double test_accuracy = 0.0;
};

// Trains from a fresh initialisation drawn from spec.seed.
TrainedModel train_mlp(const Dataset& train, const Dataset& test, const TrainSpec& spec,
                       TrainLog* log = nullptr);

struct BenchConfig {
  SynthSpec synth;
  TrainSpec train;
  double unlearn_fraction = 0.1;
  int n_shadows = 1;
  // Post-training budget for checkpoint scenarios, in multiples of train.epochs.
  int post_train_budget = 10;
  // Accuracy-matching tolerance for checkpoint post-training (fraction).
  double accuracy_tolerance = 0.02;

  void validate() const;
};

// Side information that is not part of the emitted scenario files.
struct BenchDiagnostics {
  double original_train_accuracy = 0.0;
  double original_test_accuracy = 0.0;
  // Binary scenario only.
  double retrained_accuracy_on_unlearned = 0.0;
  std::vector<std::size_t> unlearned_sources;
  TrainLog retrain_log;
  // Checkpoint scenario only.
  int post_train_epochs = 0;
  bool accuracy_matched = true;
  double post_train_accuracy = 0.0;
  double post_test_accuracy = 0.0;
  std::vector<double> checkpoint_mean_confidence;  // k = 0..K
  std::vector<std::string> warnings;
};

struct BenchScenario {
  ScenarioManifest manifest;
  ConfidenceMatrix matrix;
  BenchDiagnostics diagnostics;
};

// Exact-unlearning scenario: original model, exact retrain without the
// unlearn set, and shadow OUT models on a disjoint split.
BenchScenario make_binui_scenario(std::uint64_t seed, const BenchConfig& config = {});

// Checkpoint scenario: a shadow OUT model post-trained on the original
// training set; checkpoint k of K carries membership score k / K.
BenchScenario make_scoreui_scenario(std::uint64_t seed, const BenchConfig& config = {});

std::string example_id(std::size_t index);

}  // namespace iam::bench
