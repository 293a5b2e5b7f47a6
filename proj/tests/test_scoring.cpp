#include <doctest.h>

#include <cmath>
#include <functional>
#include <numbers>

#include "fixtures.hpp"
#include "iam/error.hpp"
#include "iam/random.hpp"
#include "iam/scoring.hpp"

using namespace iam;

namespace {

IamConfig config(EstimatorKind estimator, int steps = 100) {
  IamConfig c;
  c.estimator = estimator;
  c.steps = steps;
  return c;
}

std::string error_code(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code() + ":" + e.detail();
  }
  return "";
}

}  // namespace

TEST_SUITE("scoring") {
  TEST_CASE("interpolation endpoints and spacing") {
    const auto r = interpolate(2.0, 6.0, 5);
    CHECK(r == std::vector<double>{2.0, 3.0, 4.0, 5.0, 6.0});
    CHECK(interpolate(-1.0, 3.0, 2) == std::vector<double>{-1.0, 3.0});
    CHECK_THROWS_AS(interpolate(0.0, 1.0, 1), Error);
    CHECK(out_weight(1, 5) == 1.0);
    CHECK(out_weight(5, 5) == 0.0);
  }

  TEST_CASE("level moments with two shadows and with one") {
    const std::vector<double> two{0.0, 2.0};
    const auto s = level_stats(two, 4.0, config(EstimatorKind::Gumbel, 3));
    REQUIRE(s.levels() == 2);
    CHECK(s.mean == std::vector<double>{1.0, 2.5});
    CHECK(s.variance == std::vector<double>{2.0, 0.5});
    CHECK(s.samples[1] == std::vector<double>{2.0, 3.0});

    const std::vector<double> one{1.0};
    const auto t = level_stats(one, 4.0, config(EstimatorKind::Gumbel, 3), 0.8);
    CHECK(t.variance == std::vector<double>{0.8, 0.2});
    CHECK(t.mean == std::vector<double>{1.0, 2.5});
    CHECK(error_code([&] { level_stats(one, 4.0, config(EstimatorKind::Gumbel, 3)); })
              .rfind("missing_cross_example_var", 0) == 0);
  }

  TEST_CASE("gumbel fit and cdf") {
    const double var = std::numbers::pi * std::numbers::pi / 6;
    const auto g = fit_gumbel(kEulerGamma, var, 1e-6);
    CHECK(g.scale == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(std::abs(g.location) < 1e-15);
    CHECK(gumbel_cdf(0.0, {0.0, 1.0}) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
    CHECK(fit_gumbel(3.0, 0.0, 1e-6).scale == 1e-6);
    const GumbelParams p{1.5, 0.3};
    CHECK(gumbel_cdf(p.location - 50 * p.scale, p) == 0.0);
    CHECK(gumbel_cdf(p.location + 50 * p.scale, p) == doctest::Approx(1.0).epsilon(1e-15));
  }

  TEST_CASE("score extremes and aggregation weights") {
    const std::vector<double> shadows{-1.0, -0.8, -1.2};
    auto cfg = config(EstimatorKind::Gumbel);
    CHECK(score_example(shadows, 1.0, 100.0, cfg) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(score_example(shadows, 1.0, -100.0, cfg) < 1e-12);
    CHECK(aggregate_levels(std::vector<double>{0.2, 0.8}) == doctest::Approx(0.6).epsilon(1e-15));
    CHECK(aggregate_levels(std::vector<double>{0.25, 0.5, 1.0}) == doctest::Approx(4.25 / 6).epsilon(1e-15));
  }

  TEST_CASE("two steps reduce to a single fit on the shadow responses") {
    Rng rng(41);
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<double> shadows(2 + rng.index(6));
      for (auto& v : shadows) v = 4 * rng.uniform() - 2;
      const double target = 4 * rng.uniform() - 2;
      const double r_in = 4 * rng.uniform() - 2;
      double m = 0;
      for (double v : shadows) m += v / shadows.size();
      double ss = 0;
      for (double v : shadows) ss += (v - m) * (v - m);
      const double beta = std::max(std::sqrt(6 * ss / (shadows.size() - 1)) / std::numbers::pi, 1e-6);
      const double direct = std::exp(-std::exp(-(target - (m - 0.5772156649015329 * beta)) / beta));
      CHECK(score_example(shadows, r_in, target, config(EstimatorKind::Gumbel, 2)) ==
            doctest::Approx(direct).epsilon(1e-12));
    }
  }

  TEST_CASE("scores are probabilities and nondecreasing in the target") {
    Rng rng(42);
    for (auto est : {EstimatorKind::Gumbel, EstimatorKind::Gauss, EstimatorKind::Ecdf, EstimatorKind::Kde}) {
      for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> shadows(2 + rng.index(4));
        for (auto& v : shadows) v = 6 * rng.uniform() - 3;
        double a = 6 * rng.uniform() - 3, b = 6 * rng.uniform() - 3;
        if (a > b) std::swap(a, b);
        const auto cfg = config(est, 2 + static_cast<int>(rng.index(60)));
        const double r_in = 6 * rng.uniform() - 3;
        const double sa = score_example(shadows, r_in, a, cfg);
        const double sb = score_example(shadows, r_in, b, cfg);
        CHECK(sa >= 0.0);
        CHECK(sb <= 1.0);
        CHECK(sa <= sb + 1e-15);
      }
    }
  }

  TEST_CASE("double flip restores the unflipped score for symmetric maps") {
    auto s = testing::tiny_scenario();
    s.manifest.models.push_back({"sh2", ModelRole::ShadowOut, std::nullopt});
    s.manifest.shadow_self_train["sh2"] = {0.75, 0.875};
    s.matrix = testing::with_column(s.matrix, "sh2", {0.5, 0.625, 0.25, 0.375});
    for (auto est : {EstimatorKind::Ecdf, EstimatorKind::Gauss}) {
      auto plain = config(est, 9);
      plain.transform.kind = TransformKind::Logit;
      auto flipped = plain;
      flipped.transform.flip_input = true;
      flipped.flip_output = true;
      const auto a = score_scenario(s.manifest, s.matrix, plain);
      const auto b = score_scenario(s.manifest, s.matrix, flipped);
      for (std::size_t i = 0; i < a.entries.size(); ++i)
        CHECK(b.entries[i].score == doctest::Approx(a.entries[i].score).epsilon(1e-12));
      CHECK(b.config.flip);
    }
  }

  TEST_CASE("online needs the original model, offline needs self-train confidences") {
    auto s = testing::tiny_scenario();
    auto offline = config(EstimatorKind::Gumbel);
    offline.mode = Mode::Offline;
    CHECK_NOTHROW(score_scenario(s.manifest, s.matrix, offline));
    s.manifest.shadow_self_train.clear();
    CHECK(error_code([&] { score_scenario(s.manifest, s.matrix, offline); }) ==
          "missing_field:shadow_self_train");

    auto no_orig = testing::tiny_scenario();
    no_orig.manifest.models.erase(no_orig.manifest.models.begin());
    ConfidenceMatrix m(no_orig.manifest.example_ids, {"unl", "sh"});
    for (std::size_t r = 0; r < 4; ++r) {
      m.at(r, 0) = s.matrix.at(r, 1);
      m.at(r, 1) = s.matrix.at(r, 2);
    }
    CHECK(error_code([&] { score_scenario(no_orig.manifest, m, config(EstimatorKind::Gumbel)); }) ==
          "missing_role:original");
  }

  TEST_CASE("estimators that need several shadows say so") {
    const auto s = testing::tiny_scenario();
    CHECK(error_code([&] { score_scenario(s.manifest, s.matrix, config(EstimatorKind::Ecdf)); }) ==
          "insufficient_shadows:estimator ecdf requires at least 2 shadow models, got 1");
    auto bad = config(EstimatorKind::Gumbel, 1);
    CHECK(error_code([&] { score_scenario(s.manifest, s.matrix, bad); }).rfind("invalid_steps", 0) == 0);
    bad = config(EstimatorKind::Gumbel);
    bad.threads = 0;
    CHECK(error_code([&] { score_scenario(s.manifest, s.matrix, bad); }).rfind("invalid_threads", 0) == 0);
  }

  TEST_CASE("thread count does not change the report") {
    Rng rng(43);
    Scenario s;
    const std::size_t n = 257;
    for (std::size_t i = 0; i < n; ++i) {
      s.manifest.example_ids.push_back("x" + std::to_string(i));
      s.manifest.labels.push_back(0);
      s.manifest.unlearn_bits.push_back(static_cast<std::uint8_t>(i % 3 == 0));
    }
    s.manifest.scenario_id = "threads";
    s.manifest.models = {{"o", ModelRole::Original, std::nullopt},
                         {"u", ModelRole::Unlearned, std::nullopt},
                         {"a", ModelRole::ShadowOut, std::nullopt},
                         {"b", ModelRole::ShadowOut, std::nullopt}};
    std::vector<double> v(n * 4);
    for (auto& x : v) x = 0.01 + 0.98 * rng.uniform();
    s.matrix = ConfidenceMatrix(s.manifest.example_ids, {"o", "u", "a", "b"}, v);
    for (auto est : {EstimatorKind::Gumbel, EstimatorKind::Kde, EstimatorKind::Bayes}) {
      auto one = config(est);
      auto four = one;
      four.threads = 4;
      CHECK(score_scenario(s.manifest, s.matrix, one) == score_scenario(s.manifest, s.matrix, four));
    }
  }

  TEST_CASE("identical target columns give indistinguishable groups") {
    auto s = testing::tiny_scenario();
    s.matrix.set_column("unl", std::vector<double>{0.8, 0.8, 0.8, 0.8});
    s.matrix.set_column("orig", std::vector<double>{0.99, 0.99, 0.99, 0.99});
    s.matrix.set_column("sh", std::vector<double>{0.6, 0.6, 0.6, 0.6});
    s.manifest.models.push_back({"sh2", ModelRole::ShadowOut, std::nullopt});
    s.matrix = testing::with_column(s.matrix, "sh2", {0.5, 0.5, 0.5, 0.5});
    const auto r = score_scenario(s.manifest, s.matrix, config(EstimatorKind::Gumbel));
    for (const auto& e : r.entries) CHECK(e.score == r.entries[0].score);
  }

  TEST_CASE("offline in-response is the mean of per-shadow self-train means") {
    auto s = testing::tiny_scenario();
    s.manifest.shadow_self_train["sh2"] = {0.9};
    TransformConfig t;
    t.kind = TransformKind::GumbelMap;
    const double want = (((gumbel_map(0.99) + gumbel_map(0.97) + gumbel_map(0.995)) / 3) + gumbel_map(0.9)) / 2;
    CHECK(proxy_fitting_signal(s.manifest, t) == doctest::Approx(want).epsilon(1e-14));
  }

  TEST_CASE("config echo") {
    const auto s = testing::tiny_scenario();
    auto cfg = config(EstimatorKind::Gauss, 7);
    cfg.mode = Mode::Offline;
    const auto r = score_scenario(s.manifest, s.matrix, cfg);
    CHECK(r.config.estimator == "gauss");
    CHECK(r.config.mode == "offline");
    CHECK(r.config.transform == "logit");
    CHECK(r.config.steps == 7);
    CHECK_FALSE(r.config.flip);
    CHECK(r.scenario_id == s.manifest.scenario_id);
    CHECK(r.entries.size() == 4);
  }
}
