#include <doctest.h>

#include <cmath>
#include <map>

#include "armlab/env.hpp"

using namespace armlab;

TEST_CASE("default config carries the calibrated tables") {
  const EnvConfig c = default_config();
  validate(c);
  CHECK(c.accuracy[1][0] == doctest::Approx(0.35));   // medium, direct
  CHECK(c.accuracy[2][0] == doctest::Approx(0.00));   // hard, direct
  CHECK(c.accuracy[0][3] == doctest::Approx(0.86));   // easy, long_cot
  CHECK(c.token_mean[2][3] == doctest::Approx(4130)); // hard, long_cot
  CHECK(c.token_mean[0][0] == doctest::Approx(10));   // easy, direct
  CHECK(c.token_mean[1][1] == doctest::Approx(231));  // medium, short_cot
  CHECK(c.difficulty_mix[0] == doctest::Approx(0.4));
  CHECK(c.difficulty_mix[1] == doctest::Approx(0.5));
  CHECK(c.difficulty_mix[2] == doctest::Approx(0.1));
  CHECK(c.token_jitter == doctest::Approx(0.1));
  CHECK(c.answer_space >= 2);
}

TEST_CASE("validate rejects malformed configs") {
  EnvConfig c = default_config();
  c.accuracy[0][0] = 1.5;
  CHECK_THROWS_AS(validate(c), std::invalid_argument);
  c = default_config();
  c.difficulty_mix = {0.5, 0.5, 0.5};
  CHECK_THROWS_AS(validate(c), std::invalid_argument);
  c = default_config();
  c.token_mean[1][1] = 0.0;
  CHECK_THROWS_AS(validate(c), std::invalid_argument);
  c = default_config();
  c.answer_space = 1;
  CHECK_THROWS_AS(validate(c), std::invalid_argument);
}

TEST_CASE("answer symbols round-trip") {
  CHECK(answer_symbol(0) == "A");
  CHECK(answer_symbol(25) == "Z");
  CHECK(answer_symbol(26) == "AA");
  CHECK(answer_symbol(27) == "AB");
  for (int i = 0; i < 1000; ++i) CHECK(answer_symbol_index(answer_symbol(i)) == i);
}

TEST_CASE("sample_task: degenerate mixtures and determinism") {
  EnvConfig c = default_config();

  SUBCASE("all-easy mixture") {
    c.difficulty_mix = {1, 0, 0};
    RngStream rng(3);
    for (int i = 0; i < 200; ++i)
      CHECK(sample_task(c, rng).difficulty == Difficulty::Easy);
  }
  SUBCASE("all-hard mixture") {
    c.difficulty_mix = {0, 0, 1};
    RngStream rng(3);
    for (int i = 0; i < 200; ++i)
      CHECK(sample_task(c, rng).difficulty == Difficulty::Hard);
  }
  SUBCASE("same seed, same stream") {
    RngStream a(11), b(11);
    bool any_distinct = false;
    for (int i = 0; i < 50; ++i) {
      const TaskInstance ta = sample_task(c, a);
      const TaskInstance tb = sample_task(c, b);
      CHECK(ta.task_id == tb.task_id);
      CHECK(ta.difficulty == tb.difficulty);
      CHECK(ta.ground_truth == tb.ground_truth);
      if (i > 0 && ta.ground_truth != "A") any_distinct = true;
    }
    CHECK(any_distinct);
  }
}

TEST_CASE("rollout_once: degenerate accuracies and jitter") {
  EnvConfig c = default_config();
  TaskInstance task{1, Difficulty::Medium, "C"};

  SUBCASE("accuracy 1 means always correct") {
    c.accuracy[1][3] = 1.0;
    RngStream rng(5);
    for (int i = 0; i < 200; ++i) {
      const Rollout r = rollout_once(task, ReasoningFormat::LongCoT, c, rng);
      CHECK(r.reward == 1);
      CHECK(r.answer == "C");
    }
  }
  SUBCASE("accuracy 0 means always wrong") {
    c.accuracy[1][0] = 0.0;
    RngStream rng(5);
    for (int i = 0; i < 200; ++i) {
      const Rollout r = rollout_once(task, ReasoningFormat::DirectAnswer, c, rng);
      CHECK(r.reward == 0);
      CHECK(r.answer != "C");
    }
  }
  SUBCASE("zero jitter pins the token count") {
    c.token_jitter = 0.0;
    RngStream rng(5);
    for (int i = 0; i < 50; ++i) {
      const Rollout r = rollout_once(task, ReasoningFormat::ShortCoT, c, rng);
      CHECK(r.token_count == 231);
    }
  }
  SUBCASE("jitter bounds") {
    RngStream rng(5);
    for (int i = 0; i < 500; ++i) {
      const Rollout r = rollout_once(task, ReasoningFormat::Code, c, rng);
      CHECK(r.token_count >= std::llround(343 * 0.9));
      CHECK(r.token_count <= std::llround(343 * 1.1));
    }
  }
}

TEST_CASE("rollout correctness rate matches the accuracy table") {
  const EnvConfig c = default_config();
  const TaskInstance task{1, Difficulty::Medium, "B"};
  RngStream rng(21);
  const int n = 100000;
  int correct = 0;
  for (int i = 0; i < n; ++i)
    correct += rollout_once(task, ReasoningFormat::ShortCoT, c, rng).reward;
  const double p = 0.73;
  const double se = std::sqrt(p * (1 - p) / n);
  CHECK(std::abs(static_cast<double>(correct) / n - p) < 3 * se);
}

TEST_CASE("oracle: closed-form identities") {
  const EnvConfig c = default_config();

  SUBCASE("single format, grpo: expectation is the accuracy") {
    const std::array<double, 4> probs = {0, 0, 0, 1};
    for (auto d : kAllDifficulties) {
      const double e = expected_shaped_reward_oracle(c, probs, d, 8, {40, 100},
                                                     ShapingMode::Grpo);
      CHECK(e == doctest::Approx(c.accuracy[difficulty_index(d)][3]).epsilon(1e-12));
    }
  }
  SUBCASE("two equal-accuracy formats, grpo: linearity") {
    EnvConfig eq = c;
    eq.accuracy[0][0] = 0.6;
    eq.accuracy[0][2] = 0.6;
    const std::array<double, 4> probs = {0.5, 0, 0.5, 0};
    const double e = expected_shaped_reward_oracle(eq, probs, Difficulty::Easy, 6,
                                                   {10, 100}, ShapingMode::Grpo);
    CHECK(e == doctest::Approx(0.6).epsilon(1e-12));
  }
  SUBCASE("G=2 ada at t=0: hand enumeration over the 16 outcome tuples") {
    // Policy uniform over {ShortCoT, LongCoT}; alpha at t=0 is 2 for a
    // format appearing once, 1 when both rollouts share it.
    const std::array<double, 4> probs = {0, 0.5, 0, 0.5};
    const double aS = c.accuracy[1][1], aL = c.accuracy[1][3];
    double expected = 0.0;
    const double fmts[2] = {aS, aL};
    for (int f0 = 0; f0 < 2; ++f0) {
      for (int f1 = 0; f1 < 2; ++f1) {
        const double alpha = (f0 == f1) ? 1.0 : 2.0;
        for (int c0 = 0; c0 < 2; ++c0) {
          for (int c1 = 0; c1 < 2; ++c1) {
            const double p = 0.25 * (c0 ? fmts[f0] : 1 - fmts[f0]) *
                             (c1 ? fmts[f1] : 1 - fmts[f1]);
            expected += p * alpha * (c0 + c1) / 2.0;
          }
        }
      }
    }
    const double e = expected_shaped_reward_oracle(c, probs, Difficulty::Medium, 2,
                                                   {0, 100}, ShapingMode::AdaGrpo);
    CHECK(e == doctest::Approx(expected).epsilon(1e-12));
  }
  SUBCASE("size cap and input validation") {
    const std::array<double, 4> probs = {0.25, 0.25, 0.25, 0.25};
    CHECK_THROWS_AS(expected_shaped_reward_oracle(c, probs, Difficulty::Easy, 9,
                                                  {0, 10}, ShapingMode::Grpo),
                    std::invalid_argument);
    const std::array<double, 4> bad = {0.5, 0.5, 0.5, 0.5};
    CHECK_THROWS_AS(expected_shaped_reward_oracle(c, bad, Difficulty::Easy, 4,
                                                  {0, 10}, ShapingMode::Grpo),
                    std::invalid_argument);
  }
}

TEST_CASE("oracle vs Monte Carlo on one mixed setting") {
  const EnvConfig c = default_config();
  const std::array<double, 4> probs = {0.1, 0.4, 0.2, 0.3};
  const ShapingSchedule sched{25, 100};
  const double oracle = expected_shaped_reward_oracle(c, probs, Difficulty::Medium, 5,
                                                      sched, ShapingMode::AdaGrpo);
  RngStream rng(31);
  const int n_groups = 20000;
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < n_groups; ++i) {
    RolloutGroup g;
    g.difficulty = Difficulty::Medium;
    for (int k = 0; k < 5; ++k) {
      Rollout r;
      r.format = static_cast<ReasoningFormat>(rng.categorical(probs));
      r.reward = rng.bernoulli(c.accuracy[1][format_index(r.format)]) ? 1 : 0;
      g.rollouts.push_back(r);
    }
    const auto shaped = shape_rewards(g, sched, ShapingMode::AdaGrpo);
    double mean = 0.0;
    for (double v : shaped) mean += v;
    mean /= shaped.size();
    sum += mean;
    sumsq += mean * mean;
  }
  const double mc = sum / n_groups;
  const double var = sumsq / n_groups - mc * mc;
  const double se = std::sqrt(var / n_groups);
  CHECK(std::abs(mc - oracle) < 3 * se);
}
