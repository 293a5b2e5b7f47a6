#pragma once

#include <atomic>
#include <filesystem>
#include <string>
#include <unistd.h>

#include "iam/data_model.hpp"

namespace iam::testing {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("iam_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

// 4 examples, original + unlearned + one shadow, b = (1, 1, 0, 0).
inline Scenario tiny_scenario() {
  Scenario s;
  auto& m = s.manifest;
  m.scenario_id = "tiny";
  m.example_ids = {"e0", "e1", "e2", "e3"};
  m.labels = {0, 1, 2, 1};
  m.unlearn_bits = {1, 1, 0, 0};
  m.models = {{"orig", ModelRole::Original, std::nullopt},
              {"unl", ModelRole::Unlearned, std::nullopt},
              {"sh", ModelRole::ShadowOut, std::nullopt}};
  m.shadow_self_train["sh"] = {0.99, 0.97, 0.995};
  m.test_accuracy = 0.8;
  m.train_accuracy = 1.0;
  s.matrix = ConfidenceMatrix(m.example_ids, {"orig", "unl", "sh"},
                              {0.99, 0.95, 0.6,   //
                               0.98, 0.90, 0.7,   //
                               0.97, 0.40, 0.5,   //
                               0.96, 0.30, 0.2});
  return s;
}

// Copy of `m` with one more model column appended.
inline ConfidenceMatrix with_column(const ConfidenceMatrix& m, const std::string& id,
                                    const std::vector<double>& column) {
  auto ids = m.model_ids();
  ids.push_back(id);
  ConfidenceMatrix out(m.example_ids(), ids);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) out.at(r, c) = m.at(r, c);
    out.at(r, m.cols()) = column[r];
  }
  return out;
}

}  // namespace iam::testing
