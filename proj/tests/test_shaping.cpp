#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "armlab/rng.hpp"
#include "armlab/shaping.hpp"

using namespace armlab;

namespace {

RolloutGroup make_group(const std::vector<ReasoningFormat>& formats,
                        const std::vector<int>& rewards,
                        Difficulty d = Difficulty::Medium) {
  RolloutGroup g;
  g.difficulty = d;
  for (size_t i = 0; i < formats.size(); ++i) {
    Rollout r;
    r.format = formats[i];
    r.reward = rewards[i];
    g.rollouts.push_back(r);
  }
  return g;
}

constexpr auto D = ReasoningFormat::DirectAnswer;
constexpr auto S = ReasoningFormat::ShortCoT;
constexpr auto C = ReasoningFormat::Code;
constexpr auto L = ReasoningFormat::LongCoT;

}  // namespace

TEST_CASE("format_counts") {
  const auto g = make_group({L, L, L, L, S, S, C, D}, {1, 1, 1, 1, 1, 1, 1, 1});
  const auto counts = format_counts(g);
  CHECK(counts[format_index(L)] == 4);
  CHECK(counts[format_index(S)] == 2);
  CHECK(counts[format_index(C)] == 1);
  CHECK(counts[format_index(D)] == 1);
  CHECK(std::accumulate(counts.begin(), counts.end(), 0) == 8);

  const auto all_long = make_group(std::vector<ReasoningFormat>(8, L),
                                   std::vector<int>(8, 0));
  CHECK(format_counts(all_long)[format_index(L)] == 8);

  const auto pair = make_group({D, S}, {0, 1});
  CHECK(format_counts(pair)[format_index(D)] == 1);
  CHECK(format_counts(pair)[format_index(S)] == 1);
}

TEST_CASE("decay_factor boundary values") {
  CHECK(decay_factor(2, 8, {0, 100}) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(decay_factor(2, 8, {100, 100}) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(decay_factor(2, 8, {50, 100}) == doctest::Approx(0.625).epsilon(1e-14));
  CHECK_THROWS_AS(decay_factor(0, 8, {0, 100}), std::invalid_argument);
  CHECK_THROWS_AS(decay_factor(9, 8, {0, 100}), std::invalid_argument);
  CHECK_THROWS_AS(ShapingSchedule(101, 100), std::invalid_argument);
  CHECK_THROWS_AS(ShapingSchedule(-1, 100), std::invalid_argument);
  CHECK_THROWS_AS(ShapingSchedule(0, 0), std::invalid_argument);
}

TEST_CASE("diversity_scale boundaries and degenerate F=G") {
  CHECK(diversity_scale(2, 8, {0, 100}) == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(diversity_scale(2, 8, {100, 100}) == doctest::Approx(1.0).epsilon(1e-14));
  for (int t : {0, 13, 50, 100})
    CHECK(diversity_scale(8, 8, {t, 100}) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("alpha identities and monotonicity over the full (F,G) range") {
  for (int G = 2; G <= 64; ++G) {
    for (int F = 1; F <= G; ++F) {
      for (int64_t T : {int64_t{1}, int64_t{10}, int64_t{1000}}) {
        const double a0 = diversity_scale(F, G, {0, T});
        const double aT = diversity_scale(F, G, {T, T});
        CHECK(std::abs(a0 - static_cast<double>(G) / F) < 1e-12);
        CHECK(std::abs(aT - 1.0) < 1e-12);
      }
      // nonincreasing decay on a t-grid
      double prev = decay_factor(F, G, {0, 100});
      for (int t = 1; t <= 100; ++t) {
        const double cur = decay_factor(F, G, {t, 100});
        CHECK(cur <= prev + 1e-15);
        prev = cur;
      }
    }
  }
}

TEST_CASE("alpha ordering: rarer formats get weakly larger scale") {
  RngStream rng(5);
  for (int iter = 0; iter < 500; ++iter) {
    const int G = 2 + static_cast<int>(rng.uniform_int(63));
    const int F1 = 1 + static_cast<int>(rng.uniform_int(G));
    const int F2 = 1 + static_cast<int>(rng.uniform_int(G));
    const int64_t T = 1 + static_cast<int64_t>(rng.uniform_int(1000));
    const int64_t t = static_cast<int64_t>(rng.uniform_int(T));  // t < T
    const ShapingSchedule sched{t, T};
    if (F1 < F2)
      CHECK(diversity_scale(F1, G, sched) >= diversity_scale(F2, G, sched) - 1e-12);
  }
}

TEST_CASE("shape_rewards: the worked example at t=0") {
  const auto g = make_group({L, L, L, L, S, S, C, D}, {1, 1, 1, 0, 1, 0, 1, 1});
  const auto ada = shape_rewards(g, {0, 100}, ShapingMode::AdaGrpo);
  // Scales recomputed independently: alpha = G/F at t=0, so L->2, S->4, C,D->8.
  const std::vector<double> expected = {2, 2, 2, 0, 4, 0, 8, 8};
  REQUIRE(ada.size() == expected.size());
  for (size_t i = 0; i < ada.size(); ++i)
    CHECK(ada[i] == doctest::Approx(expected[i]).epsilon(1e-12));

  const auto grpo = shape_rewards(g, {0, 100}, ShapingMode::Grpo);
  const std::vector<double> raw = {1, 1, 1, 0, 1, 0, 1, 1};
  for (size_t i = 0; i < grpo.size(); ++i) CHECK(grpo[i] == raw[i]);
}

TEST_CASE("shape_rewards: zero rewards stay zero") {
  const auto g = make_group({L, S, C, D, L, S, C, D}, std::vector<int>(8, 0));
  for (auto mode : {ShapingMode::AdaGrpo, ShapingMode::Grpo}) {
    const auto shaped = shape_rewards(g, {3, 10}, mode);
    for (double v : shaped) CHECK(v == 0.0);
  }
}

TEST_CASE("shape_rewards: grpo and ada coincide at t=T and when F=G") {
  RngStream rng(6);
  for (int iter = 0; iter < 200; ++iter) {
    const int G = 2 + static_cast<int>(rng.uniform_int(15));
    std::vector<ReasoningFormat> formats;
    std::vector<int> rewards;
    const bool single_format = iter % 2 == 0;
    const auto shared = static_cast<ReasoningFormat>(rng.uniform_int(4));
    for (int i = 0; i < G; ++i) {
      formats.push_back(single_format
                            ? shared
                            : static_cast<ReasoningFormat>(rng.uniform_int(4)));
      rewards.push_back(static_cast<int>(rng.uniform_int(2)));
    }
    const auto g = make_group(formats, rewards);
    const int64_t T = 1 + static_cast<int64_t>(rng.uniform_int(400));
    const ShapingSchedule sched = single_format
                                      ? ShapingSchedule{static_cast<int64_t>(rng.uniform_int(T + 1)), T}
                                      : ShapingSchedule{T, T};
    const auto ada = shape_rewards(g, sched, ShapingMode::AdaGrpo);
    const auto grpo = shape_rewards(g, sched, ShapingMode::Grpo);
    for (size_t i = 0; i < ada.size(); ++i)
      CHECK(ada[i] == doctest::Approx(grpo[i]).epsilon(1e-12));
  }
}

TEST_CASE("group_advantages: worked examples") {
  const auto a = group_advantages({2, 0});
  CHECK(a[0] == doctest::Approx(1.0));
  CHECK(a[1] == doctest::Approx(-1.0));

  const auto zeros = group_advantages({1, 1, 1, 1});
  for (double v : zeros) CHECK(v == 0.0);

  // Independent mean/std for the shaped example vector.
  const std::vector<double> shaped = {2, 2, 2, 0, 4, 0, 8, 8};
  double mean = 0;
  for (double v : shaped) mean += v;
  mean /= shaped.size();
  double var = 0;
  for (double v : shaped) var += (v - mean) * (v - mean);
  var /= shaped.size();
  const double sd = std::sqrt(var);
  const auto adv = group_advantages(shaped);
  for (size_t i = 0; i < shaped.size(); ++i)
    CHECK(adv[i] == doctest::Approx((shaped[i] - mean) / sd).epsilon(1e-12));

  CHECK_THROWS_AS(group_advantages({1.0}), std::invalid_argument);
  CHECK_THROWS_AS(group_advantages({}), std::invalid_argument);
}

TEST_CASE("group_advantages: standardization and order preservation") {
  RngStream rng(7);
  for (int iter = 0; iter < 1000; ++iter) {
    const size_t n = 2 + rng.uniform_int(63);
    std::vector<double> shaped(n);
    const bool all_equal = iter % 10 == 0;
    const double fill = rng.uniform_real(0, 8);
    for (auto& v : shaped)
      v = all_equal ? fill : rng.uniform_real(0, 8);

    const auto adv = group_advantages(shaped);
    double mean = 0;
    for (double v : adv) mean += v;
    mean /= n;
    CHECK(std::abs(mean) < 1e-12);

    if (all_equal) {
      for (double v : adv) CHECK(v == 0.0);
      continue;
    }
    double var = 0;
    for (double v : adv) var += (v - mean) * (v - mean);
    var /= n;
    CHECK(std::abs(std::sqrt(var) - 1.0) < 1e-9);

    // strictly increasing affine map: ordering by shaped == ordering by adv
    for (size_t i = 1; i < n; ++i) {
      if (shaped[i - 1] < shaped[i]) CHECK(adv[i - 1] < adv[i]);
      if (shaped[i - 1] > shaped[i]) CHECK(adv[i - 1] > adv[i]);
    }
  }
}
