#include "iam/mlp.hpp"

#include <algorithm>
#include <cmath>

namespace iam::bench {

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
  Dataset out;
  out.features.resize(static_cast<Eigen::Index>(rows.size()), features.cols());
  out.labels.reserve(rows.size());
  out.source_index.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.features.row(static_cast<Eigen::Index>(i)) = features.row(static_cast<Eigen::Index>(rows[i]));
    out.labels.push_back(labels[rows[i]]);
    out.source_index.push_back(source_index[rows[i]]);
  }
  return out;
}

Mlp::Mlp(int input_dim, const std::vector<int>& hidden, int n_classes, Rng& rng) {
  std::vector<int> sizes{input_dim};
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(n_classes);
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    // He initialisation for the ReLU layers.
    const double scale = std::sqrt(2.0 / sizes[l]);
    Eigen::MatrixXd w(sizes[l], sizes[l + 1]);
    for (Eigen::Index i = 0; i < w.rows(); ++i)
      for (Eigen::Index j = 0; j < w.cols(); ++j) w(i, j) = scale * rng.normal();
    weights_.push_back(std::move(w));
    biases_.push_back(Eigen::RowVectorXd::Zero(sizes[l + 1]));
  }
}

namespace {

void softmax_rows(Eigen::MatrixXd& z) {
  for (Eigen::Index r = 0; r < z.rows(); ++r) {
    const double mx = z.row(r).maxCoeff();
    z.row(r) = (z.row(r).array() - mx).exp().matrix();
    z.row(r) /= z.row(r).sum();
  }
}

}  // namespace

Eigen::MatrixXd Mlp::predict_proba(const Eigen::MatrixXd& x) const {
  Eigen::MatrixXd a = x;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    Eigen::MatrixXd z = (a * weights_[l]).rowwise() + biases_[l];
    if (l + 1 < weights_.size())
      a = z.cwiseMax(0.0);
    else
      a = std::move(z);
  }
  softmax_rows(a);
  return a;
}

std::vector<double> Mlp::true_label_confidence(const Dataset& data) const {
  const auto probs = predict_proba(data.features);
  std::vector<double> out(data.size());
  for (std::size_t i = 0; i < data.size(); ++i)
    out[i] = probs(static_cast<Eigen::Index>(i), data.labels[i]);
  return out;
}

double Mlp::accuracy(const Dataset& data) const {
  if (data.size() == 0) return 0.0;
  const auto probs = predict_proba(data.features);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    Eigen::Index best = 0;
    probs.row(static_cast<Eigen::Index>(i)).maxCoeff(&best);
    if (best == data.labels[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

void Mlp::sgd_step(const Eigen::MatrixXd& x, std::span<const int> labels, double learning_rate) {
  const std::size_t n_layers = weights_.size();
  std::vector<Eigen::MatrixXd> acts{x};
  std::vector<Eigen::MatrixXd> pre;
  for (std::size_t l = 0; l < n_layers; ++l) {
    pre.push_back((acts.back() * weights_[l]).rowwise() + biases_[l]);
    if (l + 1 < n_layers) acts.push_back(pre.back().cwiseMax(0.0));
  }
  Eigen::MatrixXd delta = pre.back();
  softmax_rows(delta);
  const double inv_batch = 1.0 / static_cast<double>(x.rows());
  for (Eigen::Index r = 0; r < delta.rows(); ++r) delta(r, labels[static_cast<std::size_t>(r)]) -= 1.0;
  delta *= inv_batch;

  for (std::size_t l = n_layers; l-- > 0;) {
    const Eigen::MatrixXd grad_w = acts[l].transpose() * delta;
    const Eigen::RowVectorXd grad_b = delta.colwise().sum();
    if (l > 0) {
      Eigen::MatrixXd back = delta * weights_[l].transpose();
      delta = back.cwiseProduct((pre[l - 1].array() > 0.0).cast<double>().matrix());
    }
    weights_[l] -= learning_rate * grad_w;
    biases_[l] -= learning_rate * grad_b;
  }
}

SgdTrainer::SgdTrainer(Mlp& model, const Dataset& data, double learning_rate, int batch_size,
                       std::uint64_t seed, TrainLog* log)
    : model_(model),
      data_(data),
      learning_rate_(learning_rate),
      batch_size_(static_cast<std::size_t>(std::max(batch_size, 1))),
      rng_(seed),
      log_(log),
      order_(data.size()) {
  for (std::size_t i = 0; i < order_.size(); ++i) order_[i] = i;
  reshuffle();
}

std::size_t SgdTrainer::steps_per_epoch() const {
  return (data_.size() + batch_size_ - 1) / batch_size_;
}

void SgdTrainer::reshuffle() {
  rng_.shuffle(order_);
  cursor_ = 0;
}

void SgdTrainer::run_steps(std::size_t steps) {
  if (data_.size() == 0) return;
  Eigen::MatrixXd batch;
  std::vector<int> labels;
  for (std::size_t s = 0; s < steps; ++s) {
    if (cursor_ >= order_.size()) reshuffle();
    const std::size_t end = std::min(order_.size(), cursor_ + batch_size_);
    const auto rows = static_cast<Eigen::Index>(end - cursor_);
    batch.resize(rows, data_.features.cols());
    labels.resize(static_cast<std::size_t>(rows));
    for (Eigen::Index r = 0; r < rows; ++r) {
      const std::size_t idx = order_[cursor_ + static_cast<std::size_t>(r)];
      batch.row(r) = data_.features.row(static_cast<Eigen::Index>(idx));
      labels[static_cast<std::size_t>(r)] = data_.labels[idx];
      if (log_ != nullptr) log_->seen_sources.push_back(data_.source_index[idx]);
    }
    model_.sgd_step(batch, labels, learning_rate_);
    cursor_ = end;
  }
}

}  // namespace iam::bench
