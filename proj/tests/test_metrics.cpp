#include <doctest.h>

#include <cmath>
#include <functional>
#include <numeric>

#include "iam/error.hpp"
#include "iam/metrics.hpp"
#include "iam/random.hpp"
#include "oracles.hpp"

using namespace iam;
using namespace iam::testing;

namespace {

struct Fixture {
  std::vector<double> scores;
  std::vector<int> bits;
};

// Scores on a coarse grid so ties are common.
Fixture random_fixture(Rng& rng, std::size_t n) {
  Fixture f;
  do {
    f.scores.clear();
    f.bits.clear();
    for (std::size_t i = 0; i < n; ++i) {
      f.scores.push_back(static_cast<double>(rng.index(8)) / 8.0 + (rng.index(3) == 0 ? rng.uniform() : 0.0));
      f.bits.push_back(static_cast<int>(rng.index(2)));
    }
  } while (std::count(f.bits.begin(), f.bits.end(), 1) == 0 ||
           std::count(f.bits.begin(), f.bits.end(), 0) == 0);
  return f;
}

const Fixture kEight{{0.9, 0.8, 0.8, 0.7, 0.6, 0.6, 0.3, 0.1}, {1, 1, 0, 1, 0, 1, 0, 0}};

}  // namespace

TEST_SUITE("metrics") {
  TEST_CASE("auc examples") {
    CHECK(auc(std::vector<double>{0.9, 0.8, 0.2, 0.1}, std::vector<int>{1, 1, 0, 0}) == 1.0);
    CHECK(auc(std::vector<double>{0.9, 0.8, 0.8, 0.1}, std::vector<int>{1, 1, 0, 0}) == 0.875);
    CHECK_THROWS_AS(auc(std::vector<double>{0.1, 0.2}, std::vector<int>{1, 1}), Error);
  }

  TEST_CASE("auc of uninformative scores is near one half") {
    Rng rng(21);
    std::vector<double> s(10000);
    std::vector<int> b(10000);
    for (std::size_t i = 0; i < s.size(); ++i) {
      b[i] = static_cast<int>(i % 2);
      s[i] = rng.uniform();
    }
    CHECK(std::abs(auc(s, b) - 0.5) < 0.02);
  }

  TEST_CASE("auc invariant under increasing transforms and equal to the ROC area") {
    Rng rng(22);
    for (int t = 0; t < 100; ++t) {
      const auto f = random_fixture(rng, 2 + rng.index(31));
      std::vector<double> warped;
      for (double s : f.scores) warped.push_back(std::exp(3 * s) - 7);
      CHECK(auc(warped, f.bits) == auc(f.scores, f.bits));
      std::vector<std::pair<double, double>> pts;
      for (const auto& p : roc_points(f.scores, f.bits)) pts.emplace_back(p.fpr, p.tpr);
      CHECK(std::abs(trapezoid_area(pts) - auc(f.scores, f.bits)) < 1e-12);
    }
  }

  TEST_CASE("metrics match brute-force oracles on random fixtures") {
    Rng rng(23);
    const std::vector<double> targets{0.0, 1e-4, 0.1, 0.25, 0.5, 1.0};
    for (int t = 0; t < 100; ++t) {
      const auto f = random_fixture(rng, 2 + rng.index(31));
      CHECK(std::abs(auc(f.scores, f.bits) - brute_auc(f.scores, f.bits)) <= 1e-12);
      const auto got = tpr_at_fpr(f.scores, f.bits, targets);
      for (std::size_t k = 0; k < targets.size(); ++k)
        CHECK(std::abs(got[k].tpr - sweep_tpr_at(f.scores, f.bits, targets[k])) <= 1e-12);
      CHECK(std::abs(weighted_bce(f.scores, f.bits) - brute_weighted_bce(f.scores, f.bits, 1e-12)) <= 1e-12);
      std::vector<double> other;
      for (std::size_t i = 0; i < f.scores.size(); ++i) other.push_back(static_cast<double>(rng.index(5)));
      if (std::adjacent_find(other.begin(), other.end(), std::not_equal_to<>()) != other.end() &&
          std::adjacent_find(f.scores.begin(), f.scores.end(), std::not_equal_to<>()) != f.scores.end())
        CHECK(std::abs(spearman(f.scores, other) - brute_spearman(f.scores, other)) <= 1e-12);
    }
  }

  TEST_CASE("tpr at fpr examples") {
    const std::vector<double> targets{1e-4, 0.0};
    const auto perfect = tpr_at_fpr(std::vector<double>{0.9, 0.8, 0.2, 0.1}, std::vector<int>{1, 1, 0, 0}, targets);
    CHECK(perfect[0].tpr == 1.0);
    CHECK(perfect[1].tpr == 1.0);
    const auto flat = tpr_at_fpr(std::vector<double>{0.5, 0.5, 0.5, 0.5}, std::vector<int>{1, 0, 1, 0}, targets);
    CHECK(flat[0].tpr == 0.0);
    CHECK(flat[1].tpr == 0.0);
    const std::vector<double> sweep_targets{0.0, 0.25, 0.5, 0.75};
    const auto eight = tpr_at_fpr(kEight.scores, kEight.bits, sweep_targets);
    // Thresholds 0.9, 0.8, 0.7, 0.6 give (0, 1/4), (1/4, 1/2), (1/4, 3/4), (1/2, 1).
    CHECK(eight[0].tpr == 0.25);
    CHECK(eight[1].tpr == 0.75);
    CHECK(eight[2].tpr == 1.0);
    for (std::size_t k = 0; k < sweep_targets.size(); ++k)
      CHECK(eight[k].tpr == sweep_tpr_at(kEight.scores, kEight.bits, sweep_targets[k]));
  }

  TEST_CASE("roc points") {
    const auto perfect = roc_points(std::vector<double>{0.9, 0.8, 0.2, 0.1}, std::vector<int>{1, 1, 0, 0});
    REQUIRE(perfect.size() == 5);
    CHECK(perfect[2] == RocPoint{0.0, 1.0});
    CHECK(perfect.back() == RocPoint{1.0, 1.0});
    const auto flat = roc_points(std::vector<double>{0.3, 0.3, 0.3}, std::vector<int>{1, 0, 1});
    REQUIRE(flat.size() == 2);
    CHECK(flat[0] == RocPoint{0.0, 0.0});
    CHECK(flat[1] == RocPoint{1.0, 1.0});
    const auto pts = roc_points(kEight.scores, kEight.bits);
    const auto oracle = sweep_roc(kEight.scores, kEight.bits);
    REQUIRE(pts.size() == oracle.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
      CHECK(pts[i].fpr == oracle[i].first);
      CHECK(pts[i].tpr == oracle[i].second);
    }
    CHECK(format_roc_csv(perfect).rfind("fpr,tpr\n0,0\n", 0) == 0);
  }

  TEST_CASE("spearman examples and properties") {
    const std::vector<double> x{1, 2, 3, 4, 5};
    CHECK(spearman(x, std::vector<double>{2, 1, 4, 3, 5}) == doctest::Approx(0.8).epsilon(1e-14));
    CHECK(spearman(x, std::vector<double>{1, 8, 27, 64, 125}) == 1.0);
    CHECK(spearman(x, std::vector<double>{5, 4, 3, 2, 1}) == -1.0);
    CHECK(spearman(x, x) == 1.0);
    CHECK_THROWS_AS(spearman(x, std::vector<double>{1, 1, 1, 1, 1}), Error);

    Rng rng(24);
    std::vector<double> a(20), b(20);
    for (auto& v : a) v = static_cast<double>(rng.index(6));
    for (auto& v : b) v = rng.uniform();
    CHECK(spearman(a, b) == doctest::Approx(spearman(b, a)).epsilon(1e-14));
    std::vector<std::size_t> perm(20);
    std::iota(perm.begin(), perm.end(), 0);
    rng.shuffle(perm);
    std::vector<double> pa, pb;
    for (auto i : perm) {
      pa.push_back(a[i]);
      pb.push_back(b[i]);
    }
    CHECK(spearman(pa, pb) == doctest::Approx(spearman(a, b)).epsilon(1e-14));
  }

  TEST_CASE("weighted bce examples") {
    CHECK(weighted_bce(std::vector<double>{1.0, 0.0}, std::vector<int>{1, 0}) < 1e-11);
    CHECK(weighted_bce(std::vector<double>{0.5, 0.5, 0.5, 0.5}, std::vector<int>{1, 0, 1, 0}) ==
          doctest::Approx(std::log(2.0)).epsilon(1e-14));
    const double want = -(2 * std::log(0.9) + std::log(0.8) + std::log(0.6)) / 3;
    CHECK(weighted_bce(std::vector<double>{0.9, 0.2, 0.4}, std::vector<int>{1, 0, 0}) ==
          doctest::Approx(want).epsilon(1e-14));
  }

  TEST_CASE("risk classification") {
    RiskThresholds t{0.1, 0.78, 1.5};
    auto flags = classify_risks(std::vector<double>{0.91, 0.84}, std::vector<int>{0, 1}, t);
    CHECK(flags.under[0]);
    CHECK_FALSE(flags.over[1]);
    flags = classify_risks(std::vector<double>{0.1, 0.78}, std::vector<int>{0, 1}, t);
    CHECK_FALSE(flags.under[0]);
    CHECK_FALSE(flags.over[1]);

    // delta1 = 0, delta2 = 1 flags every imperfect score.
    const std::vector<double> s{0.0, 0.2, 1.0, 0.7, 1.0};
    const std::vector<int> b{0, 0, 0, 1, 1};
    flags = classify_risks(s, b, RiskThresholds{0.0, 1.0, 1.5});
    CHECK(flags.under == std::vector<bool>{false, true, true, false, false});
    CHECK(flags.over == std::vector<bool>{false, false, false, true, false});
    CHECK(flags.unlearned.count == 3);
    CHECK(flags.unlearned.mean == doctest::Approx(0.4));
    CHECK(flags.unlearned.std == doctest::Approx(std::sqrt((0.16 + 0.04 + 0.36) / 2)));

    CHECK(RiskThresholds::from_accuracy(0.72).delta2 == doctest::Approx(0.78));
    CHECK(RiskThresholds::from_accuracy(0.2).delta2 == 1.0);
    CHECK_THROWS_AS(classify_risks(s, b, RiskThresholds{1.5, 0.5, 1.5}), Error);
  }

  TEST_CASE("evaluate_report fills only the blocks it has ground truth for") {
    ScoreReport r;
    r.entries = {{"a", "u", 0.9, 1, std::nullopt, {}, {}},
                 {"b", "u", 0.2, 0, std::nullopt, {}, {}},
                 {"c", "u", 0.4, 1, std::nullopt, {}, {}}};
    evaluate_report(r, RiskThresholds{0.1, 0.5, 1.5}, kDefaultFprTargets);
    REQUIRE(r.metrics);
    CHECK(r.metrics->auc == 1.0);
    CHECK_FALSE(r.metrics->spearman);
    REQUIRE(r.risk);
    CHECK(r.risk->n_under == 1);
    CHECK(r.risk->n_over == 1);
    CHECK(r.entries[2].over_unlearning == true);
    CHECK_FALSE(r.entries[1].over_unlearning.has_value());

    ScoreReport ckpt;
    ckpt.entries = {{"a", "c1", 0.1, std::nullopt, 0.5, {}, {}},
                    {"a", "c2", 0.7, std::nullopt, 1.0, {}, {}},
                    {"b", "c1", 0.3, std::nullopt, 0.5, {}, {}}};
    evaluate_report(ckpt, RiskThresholds{}, kDefaultFprTargets);
    REQUIRE(ckpt.metrics);
    CHECK(ckpt.metrics->spearman == doctest::Approx(brute_spearman({0.1, 0.7, 0.3}, {0.5, 1.0, 0.5})));
    CHECK_FALSE(ckpt.risk);

    ScoreReport bare;
    bare.entries = {{"a", "u", 0.5, std::nullopt, std::nullopt, {}, {}}};
    evaluate_report(bare, RiskThresholds{}, kDefaultFprTargets);
    CHECK_FALSE(bare.metrics);
  }
}
