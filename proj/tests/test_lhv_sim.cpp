#include "doctest.h"

#include "esr/error.hpp"
#include "esr/lhv_sim.hpp"
#include "support/generators.hpp"
#include "support/random_models.hpp"

#include <cmath>
#include <numbers>

using namespace esr;
using esr::testing::Rng;
using esr::testing::random_model;
using esr::testing::random_setting;

namespace {

const Direction kZ(0, 0, 1);
const Direction kX(1, 0, 0);

MicrostateModel constant_model() {
  return MicrostateModel(
      "constant", [](const HiddenVariable&, const Direction&) { return 1; },
      [](const HiddenVariable&, const Direction&) { return true; },
      [](const HiddenVariable&, const Direction&) { return 1; },
      [](const HiddenVariable&, const Direction&) { return true; });
}

MicrostateModel blind_model() {
  return MicrostateModel(
      "blind", [](const HiddenVariable&, const Direction&) { return 1; },
      [](const HiddenVariable&, const Direction&) { return false; },
      [](const HiddenVariable&, const Direction&) { return 1; },
      [](const HiddenVariable&, const Direction&) { return true; });
}

}  // namespace

TEST_CASE("mixture probabilities") {
  SUBCASE("examples") {
    const auto m = mixture_probabilities({{0.3, 0.7}, {1, 1}, {1, 0}});
    CHECK(m.p_t == doctest::Approx(0.3));
    CHECK(m.p_d == doctest::Approx(1.0));
    CHECK(m.p_cond == doctest::Approx(0.3));
    const auto n = mixture_probabilities({{0.5, 0.5}, {0.4, 0.8}, {1, 0}});
    CHECK(n.p_t == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(n.p_d == doctest::Approx(0.6).epsilon(1e-15));
    CHECK(n.p_cond == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(mixture_probabilities({{1.0}, {0.0}, {1}}), UndefinedConditional);
    CHECK_THROWS_AS(mixture_probabilities({{0.5, 0.6}, {1, 1}, {1, 0}}), ValidationError);
    CHECK_THROWS_AS(mixture_probabilities({{1.0}, {1.0}, {2}}), ValidationError);
    CHECK_THROWS_AS(mixture_probabilities({{1.0}, {1.5}, {1}}), ValidationError);
  }
  SUBCASE("p_t = p_d p_cond") {
    Rng rng(21);
    for (int k = 0; k < 500; ++k) {
      const int n = 1 + static_cast<int>(rng() % 6);
      MicrostateEnsemble e;
      double sum = 0.0;
      for (int i = 0; i < n; ++i) {
        e.weights.push_back(testing::uniform(rng, 0.01, 1.0));
        sum += e.weights.back();
        e.micro_detect.push_back(testing::uniform(rng, 0.01, 1.0));
        e.micro_possess.push_back(static_cast<int>(rng() % 2));
      }
      for (double& w : e.weights) w /= sum;
      const auto m = mixture_probabilities(e);
      CHECK(std::abs(m.p_d * m.p_cond - m.p_t) <= 4e-16 * std::max(1e-300, m.p_t));
      CHECK(m.p_t <= m.p_d + 1e-15);
    }
  }
}

TEST_CASE("microscopic observable expectation") {
  CHECK(micro_observable_expectation({{0.5, 0.5}, {{1, 0}, {0, 1}}}, {1, -1}) == 0.0);
  CHECK(micro_observable_expectation({{0.3, 0.7}, {{1, 0}, {0, 1}}}, {1, -1}) ==
        doctest::Approx(-0.4).epsilon(1e-15));
  CHECK_THROWS_AS(micro_observable_expectation({{0.5, 0.5}, {{1, 1}, {0, 1}}}, {1, -1}),
                  ValidationError);
  CHECK_THROWS_AS(micro_observable_expectation({{0.5, 0.5}, {{1, 0}, {0, 0}}}, {1, -1}),
                  ValidationError);
}

TEST_CASE("hidden variable sampler") {
  const auto top = hidden_variable_from_uniforms(0.0, 0.3, 0.1, 0.2);
  CHECK(top.lambda.z() == doctest::Approx(1.0));
  const auto equator = hidden_variable_from_uniforms(0.5, 0.0, 0.1, 0.2);
  CHECK(equator.lambda.x() == doctest::Approx(1.0));
  CHECK(equator.u_a == 0.1);
  CHECK(equator.u_b == 0.2);
  const auto quarter = hidden_variable_from_uniforms(0.5, 0.25, 0.0, 0.0);
  CHECK(quarter.lambda.y() == doctest::Approx(1.0));
}

TEST_CASE("reference model responses") {
  const auto gg = gisin_gisin_model();
  const HiddenVariable h{kZ, 0.99, 0.5};
  CHECK(gg.respond_a(h, kZ) == 1);
  CHECK(gg.respond_b(h, kZ) == -1);
  CHECK(gg.respond_a(h, kX) == 0);
  CHECK(gg.possessed_a(h, kX) == 1);  // sign(0) = +1
  CHECK(gg.respond_b(h, kX) == -1);
  const HiddenVariable tilted{Direction::normalized(1, 0, 1), 0.7, 0.5};
  CHECK(gg.respond_a(tilted, kZ) == 1);  // 0.7 < 0.7071
  CHECK(gg.respond_a(HiddenVariable{tilted.lambda, 0.71, 0.5}, kZ) == 0);
  CHECK(model_by_name("sign-sign").name() == "sign-sign");
  CHECK_THROWS_AS(model_by_name("bohm"), ValidationError);
}

TEST_CASE("locality: A's outcomes do not depend on b") {
  Rng rng(22);
  const auto gg = gisin_gisin_model();
  const Direction a = testing::random_direction(rng);
  std::vector<SettingPair> settings;
  for (int k = 0; k < 5; ++k) settings.emplace_back(a, testing::random_direction(rng));
  const auto summary = run_experiment(gg, settings, 50000, 5);
  for (std::size_t s = 1; s < settings.size(); ++s) {
    for (std::size_t i = 0; i < 3; ++i) {
      std::uint64_t row0 = 0, row_s = 0;
      for (std::size_t j = 0; j < 3; ++j) {
        row0 += summary.settings[0].registered[i][j];
        row_s += summary.settings[s].registered[i][j];
      }
      CHECK(row0 == row_s);
    }
  }
}

TEST_CASE("experiment tallies") {
  const auto gg = gisin_gisin_model();
  const std::vector<SettingPair> settings = {{kZ, kZ}, {kZ, kX}};
  SUBCASE("tallies sum to n_trials") {
    const auto summary = run_experiment(gg, settings, 100003, 1);
    CHECK(summary.n_trials == 100003);
    for (const auto& t : summary.settings) {
      std::uint64_t reg = 0, pos = 0;
      for (const auto& row : t.registered)
        for (auto c : row) reg += c;
      for (const auto& row : t.possessed)
        for (auto c : row) pos += c;
      CHECK(reg == 100003);
      CHECK(pos == 100003);
    }
  }
  SUBCASE("same seed, any worker count, identical summary") {
    const auto one = run_experiment(gg, settings, 300000, 42, 1);
    CHECK(one == run_experiment(gg, settings, 300000, 42, 1));
    CHECK(one == run_experiment(gg, settings, 300000, 42, 3));
    CHECK(one == run_experiment(gg, settings, 300000, 42, 16));
    CHECK_FALSE(one == run_experiment(gg, settings, 300000, 43, 1));
  }
  SUBCASE("chunks merge in any order") {
    const std::uint64_t n = 5 * kChunkTrials + 17;
    const auto whole = run_experiment(gg, settings, n, 9);
    auto left = run_chunks(gg, settings, n, 9, 0, 2);
    const auto right = run_chunks(gg, settings, n, 9, 2, 6);
    auto reversed = right;
    reversed.merge(left);
    CHECK(left.merge(right) == whole);
    CHECK(reversed == whole);
  }
  SUBCASE("constant model") {
    const auto stats = setting_statistics(run_experiment(constant_model(), settings, 1000, 3).settings[1], 1000);
    CHECK(stats.micro_correlation.value == 1.0);
    CHECK(stats.conditional_correlation.value == 1.0);
    CHECK(stats.detection_a.value == 1.0);
    CHECK(stats.detection_b.value == 1.0);
  }
  SUBCASE("a = b: conditional correlation is -1") {
    const auto stats = setting_statistics(run_experiment(gg, {{kZ, kZ}}, 1000000, 7).settings[0], 1000000);
    CHECK(stats.conditional_correlation.value >= -1.0);
    CHECK(stats.conditional_correlation.value <= -0.995);
    CHECK(stats.detection_b.value == 1.0);
    CHECK(std::abs(stats.detection_a.value - 0.5) < 3 * stats.detection_a.std_error + 1e-12);
  }
  SUBCASE("no double detections leave conditional fields undefined") {
    const auto stats = setting_statistics(run_experiment(blind_model(), settings, 100, 1).settings[0], 100);
    CHECK(stats.n_detected_both == 0);
    CHECK(std::isnan(stats.conditional_correlation.value));
    CHECK(std::isnan(stats.detected_pp.value));
    CHECK(stats.micro_correlation.value == 0.0);
  }
  SUBCASE("invalid trial count") {
    CHECK_THROWS_AS(run_experiment(gg, settings, 0, 1), ValidationError);
  }
}

TEST_CASE("reference model reproduces singlet conditionals") {
  Rng rng(23);
  const auto gg = gisin_gisin_model();
  for (int k = 0; k < 5; ++k) {
    const Direction a = testing::random_direction(rng);
    const Direction b = testing::random_direction(rng);
    const auto stats = setting_statistics(run_experiment(gg, {{a, b}}, 200000, 100 + k).settings[0], 200000);
    CHECK(std::abs(stats.conditional_correlation.value + a.dot(b)) <=
          3 * stats.conditional_correlation.std_error);
  }
}

TEST_CASE("micro correlations") {
  const auto gg = gisin_gisin_model();
  const auto same = estimate_micro_correlation(gg, kZ, kZ, 1000000, 1);
  CHECK(std::abs(same.value + 0.5) < 0.005);
  const auto perp = estimate_micro_correlation(gg, kZ, kX, 1000000, 2);
  CHECK(std::abs(perp.value) < 0.005);

  // Against the factored sequential form with detection 0.5 on A and 1 on B.
  const Direction b = Direction::in_plane(std::numbers::pi / 3);
  DetectionModel det;
  det.set(DetectionModel::kAny, "A", 0.5).set(DetectionModel::kAny, "B", 1.0);
  const double quantum = generalized_correlation(
      singlet_state(), GeneralizedObservable(spin_observable(kZ, Subsystem::first, "A")),
      GeneralizedObservable(spin_observable(b, Subsystem::second, "B")), det);
  const auto mc = estimate_micro_correlation(gg, kZ, b, 1000000, 3, 4);
  CHECK(std::abs(mc.value - quantum) <= 3 * mc.std_error);
}

TEST_CASE("micro CHSH") {
  const auto t = ChshSetting::tsirelson();
  const auto gg = micro_chsh(gisin_gisin_model(), t, 1000000, 4);
  CHECK(std::abs(gg.value - std::numbers::sqrt2) < 0.01);
  const auto ss = micro_chsh(sign_sign_model(), t, 1000000, 5);
  CHECK(std::abs(ss.value - 2.0) < 0.01);
  CHECK(ss.value <= 2.0);

  SUBCASE("random local models stay below 2") {
    Rng rng(24);
    for (int m = 0; m < 10; ++m) {
      const auto model = random_model(rng);
      for (int s = 0; s < 5; ++s) {
        const auto est = micro_chsh(model, random_setting(rng), 20000, 1000 * m + s);
        CHECK(est.value <= 2.0 + 4 * est.std_error);
      }
    }
  }
}

TEST_CASE("CHSH statistics at the Tsirelson setting") {
  const auto summary =
      run_experiment(gisin_gisin_model(), chsh_setting_pairs(ChshSetting::tsirelson()), 1000000, 7, 4);
  const auto stats = chsh_statistics(summary);
  CHECK(std::abs(stats.micro_chsh.value - std::numbers::sqrt2) <= 4 * stats.micro_chsh.std_error);
  CHECK(std::abs(stats.conditional_chsh.value - 2 * std::numbers::sqrt2) <=
        4 * stats.conditional_chsh.std_error);
  CHECK(std::abs(stats.detection[0].value - 0.5) <= 3 * stats.detection[0].std_error);
  CHECK(stats.detection[2].value == 1.0);
  CHECK(stats.detection[3].value == 1.0);
}

TEST_CASE("fair sampling diagnostic") {
  const auto gg = gisin_gisin_model();
  SUBCASE("45 degrees is not a fair sample") {
    const auto r = fair_sampling_check(gg, kZ, Direction::in_plane(std::numbers::pi / 4), 1000000, 8);
    CHECK(std::abs(r.all_sample_freq - 0.125) < 0.005);
    CHECK(std::abs(r.detected_freq - (1 - std::cos(std::numbers::pi / 4)) / 4) < 0.005);
    CHECK(r.divergence > 0.04);
    CHECK(r.divergence > 4 * r.std_error);
  }
  SUBCASE("90 degrees") {
    const auto r = fair_sampling_check(gg, kZ, kX, 1000000, 9);
    CHECK(r.divergence < 4 * r.std_error + 1e-12);
    CHECK(std::abs(r.all_sample_freq - 0.25) < 0.005);
  }
  SUBCASE("always-detect model is a fair sample") {
    const auto r = fair_sampling_check(sign_sign_model(), kZ, Direction::in_plane(0.4), 100000, 10);
    CHECK(r.divergence == 0.0);
  }
  SUBCASE("no detections") {
    CHECK_THROWS_AS(fair_sampling_check(blind_model(), kZ, kZ, 1000, 11), UndefinedConditional);
  }
}

TEST_CASE("conditional violation implies an unfair sample") {
  Rng rng(25);
  std::vector<std::pair<MicrostateModel, ChshSetting>> cases;
  cases.emplace_back(gisin_gisin_model(), ChshSetting::tsirelson());
  for (int k = 0; k < 20; ++k) cases.emplace_back(random_model(rng), random_setting(rng));
  int violations = 0;
  for (std::size_t c = 0; c < cases.size(); ++c) {
    const auto& [model, setting] = cases[c];
    const auto stats =
        chsh_statistics(run_experiment(model, chsh_setting_pairs(setting), 200000, 500 + c));
    if (!(stats.conditional_chsh.value > 2.0 + 4 * stats.conditional_chsh.std_error)) continue;
    ++violations;
    bool unfair = false;
    for (const auto& s : stats.per_setting) {
      unfair = unfair || s.divergence.value > 4 * s.divergence.std_error;
    }
    CHECK(unfair);
  }
  CHECK(violations >= 1);
}
