#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <vector>

#include "iam/random.hpp"

namespace iam::bench {

struct Dataset {
  Eigen::MatrixXd features;  // one row per example
  std::vector<int> labels;
  // Index of each row in the split it was drawn from; survives subsetting so
  // training logs can be audited against the original split.
  std::vector<std::size_t> source_index;

  std::size_t size() const { return labels.size(); }
  Dataset subset(std::span<const std::size_t> rows) const;
};

// Fully connected ReLU network with a softmax output layer.
class Mlp {
 public:
  Mlp() = default;
  Mlp(int input_dim, const std::vector<int>& hidden, int n_classes, Rng& rng);

  // Row-wise class probabilities.
  Eigen::MatrixXd predict_proba(const Eigen::MatrixXd& x) const;

  // Softmax probability of each row's true label.
  std::vector<double> true_label_confidence(const Dataset& data) const;
  double accuracy(const Dataset& data) const;

  // One minibatch SGD step on mean softmax cross-entropy.
  void sgd_step(const Eigen::MatrixXd& x, std::span<const int> labels, double learning_rate);

  std::size_t layers() const { return weights_.size(); }

 private:
  std::vector<Eigen::MatrixXd> weights_;  // (fan_in x fan_out)
  std::vector<Eigen::RowVectorXd> biases_;
};

// Records which source examples each minibatch contained.
struct TrainLog {
  std::vector<std::size_t> seen_sources;
};

// Plain minibatch SGD over shuffled epochs. Keeps its own shuffling state so
// training can be resumed step by step.
class SgdTrainer {
 public:
  SgdTrainer(Mlp& model, const Dataset& data, double learning_rate, int batch_size,
             std::uint64_t seed, TrainLog* log = nullptr);

  std::size_t steps_per_epoch() const;
  void run_steps(std::size_t steps);
  void run_epochs(int epochs) { run_steps(static_cast<std::size_t>(epochs) * steps_per_epoch()); }

 private:
  void reshuffle();

  Mlp& model_;
  const Dataset& data_;
  double learning_rate_;
  std::size_t batch_size_;
  Rng rng_;
  TrainLog* log_;
  std::vector<std::size_t> order_;
  std::size_t cursor_ = 0;
};

}  // namespace iam::bench
