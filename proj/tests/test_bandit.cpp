#include <doctest.h>

#include <cmath>

#include "icol/bandit.hpp"
#include "icol/errors.hpp"

using namespace icol;

TEST_CASE("bandit parameter validation and defaults") {
  CHECK(BanditParams{0.05, 0.2}.is_valid(2));
  CHECK_FALSE(BanditParams{0.06, 0.2}.is_valid(2));
  CHECK_FALSE(BanditParams{0.01, 0.5}.is_valid(2));
  CHECK_FALSE(BanditParams{0.0, 0.2}.is_valid(2));
  CHECK_THROWS_AS(BanditParams({0.2, 0.2}).validate(3), ParameterError);

  const auto d = BanditParams::horizon_defaults(10, 2000);
  const double lk = std::log(10.0);
  CHECK(d.eta == doctest::Approx(std::pow(lk / (4 * std::sqrt(10.0) * 2000), 2.0 / 3.0)));
  CHECK(d.gamma == doctest::Approx(std::cbrt(10 * lk / (4 * 2000))));
  CHECK(d.is_valid(10));
}

TEST_CASE("clamping short horizons") {
  const auto nominal = BanditParams::horizon_defaults(2, 1);
  CHECK_FALSE(nominal.is_valid(2));
  const auto c = clamp_bandit_params(nominal, 2);
  CHECK(c.clamped);
  CHECK(c.params.is_valid(2));
  CHECK_FALSE(c.note.empty());
  const auto ok = clamp_bandit_params({0.05, 0.2}, 2);
  CHECK_FALSE(ok.clamped);
  CHECK(ok.params.eta == 0.05);
}

TEST_CASE("wsu_ux_update examples") {
  const WeightVector half = WeightVector::uniform(2);
  const BanditParams params{0.05, 0.2};
  auto step = wsu_ux_update(half, params, 0, 0.0);
  CHECK(step.next == half);
  for (double x : step.round.estimated_losses) CHECK(x == 0.0);

  step = wsu_ux_update(half, params, 0, 0.5);
  CHECK(step.round.pi_tilde[0] == 0.5);
  CHECK(step.round.estimated_losses[0] == 1.0);
  CHECK(step.round.estimated_losses[1] == 0.0);
  CHECK(std::abs(step.next[0] - 0.4875) < 1e-15);
  CHECK(std::abs(step.next[1] - 0.5125) < 1e-15);

  // Uniform pi, full loss: pi_tilde_I = 1/K so the multiplier is 1 - eta K (1 - pi_I).
  const std::size_t k = 50;
  const BanditParams edge{0.2 / (2.0 * k), 0.2};
  step = wsu_ux_update(WeightVector::uniform(k), edge, 7, 1.0);
  const double multiplier = step.next[7] * k;
  const double expect = 1.0 - edge.eta * k * (1.0 - 1.0 / k);
  CHECK(std::abs(multiplier - expect) < 1e-12);
  CHECK(multiplier >= 0.5);
  for (std::size_t i = 0; i < k; ++i) {
    if (i != 7) CHECK(step.next[i] >= 1.0 / k);
  }
  CHECK_THROWS_AS(wsu_ux_update(half, {0.3, 0.2}, 0, 0.5), ParameterError);
}

TEST_CASE("WSU-UX keeps pi valid over random steps") {
  RngStream rng(41, 0);
  for (int n = 0; n < 10000; ++n) {
    const std::size_t k = 2 + rng.uniform_index(20);
    const double gamma = 0.01 + 0.48 * rng.uniform();
    const double eta = gamma / (2.0 * k) * (1.0 - rng.uniform());
    std::vector<double> raw(k);
    for (auto& x : raw) x = rng.uniform() + 1e-9;
    const WeightVector pi = WeightVector::normalized(raw);
    const std::size_t chosen = rng.uniform_index(k);
    const double loss = n % 5 == 0 ? 1.0 : rng.uniform();
    const auto step = wsu_ux_update(pi, {eta, gamma}, chosen, loss);
    CHECK(is_valid_simplex(step.next.values()));
    CHECK(step.round.estimated_losses[chosen] <= k / gamma + 1e-9);
    for (std::size_t i = 0; i < k; ++i) CHECK(step.round.pi_tilde[i] >= gamma / k - 1e-15);
  }
}

TEST_CASE("exp3_step examples") {
  const std::vector<double> w = {1.0, 1.0};
  CHECK(exp3_step(w, 0, 0.0, 0.1) == w);
  const auto next = exp3_step(w, 0, 0.5, 0.1);
  CHECK(next[0] == doctest::Approx(std::exp(-0.1)).epsilon(1e-15));
  CHECK(next[1] == 1.0);
}

TEST_CASE("estimator moments") {
  auto m = estimator_moments_check(WeightVector::uniform(3), std::vector<double>{0, 0, 0});
  for (double x : m.mean) CHECK(x == 0.0);
  m = estimator_moments_check(WeightVector({0.5, 0.5}), std::vector<double>{0.5, 1.0});
  CHECK(m.mean[0] == 0.5);
  CHECK(m.mean[1] == 1.0);
  CHECK(m.second_moment[0] == 0.5);
  CHECK(m.second_moment[1] == 2.0);
  m = estimator_moments_check(WeightVector::uniform(4), std::vector<double>{1, 1, 1, 1});
  for (double x : m.second_moment) CHECK(std::abs(x - 4.0) < 1e-12);
}

TEST_CASE("the learner sees exactly one loss per round") {
  const std::size_t k = 5;
  WsuUxLearner learner(k, BanditParams::horizon_defaults(k, 500), RngStream(3, 3));
  for (int t = 0; t < 100; ++t) {
    int calls = 0;
    const auto round = learner.step([&](std::size_t i) {
      ++calls;
      return i == 0 ? 0.1 : 0.6;
    });
    CHECK(calls == 1);
    CHECK(round.chosen < k);
  }
  CHECK(learner.weights()[0] > 0.2);
}

TEST_CASE("run_bandit on a constant panel has zero regret") {
  ForecastPanel panel(3, std::vector<double>(30, 0.4), std::vector<Outcome>(10, Outcome::kZero));
  for (BanditAlgorithm a : {BanditAlgorithm::kWsuUx, BanditAlgorithm::kExp3}) {
    const auto run = run_bandit(panel, a, {}, RngStream(1, 0));
    for (double r : run.trace.regret) CHECK(std::abs(r) < 1e-12);
  }
  const auto doubled = bandit_doubling_wrapper(panel, LossFunction::quadratic(), RngStream(1, 0));
  for (double r : doubled.run.trace.regret) CHECK(std::abs(r) < 1e-12);
}

TEST_CASE("bandit doubling wrapper schedule and clamping") {
  ForecastPanel one(2, {0.2, 0.9}, {Outcome::kOne});
  const auto single = bandit_doubling_wrapper(one, LossFunction::quadratic(), RngStream(2, 0));
  REQUIRE(single.phases.size() == 1);
  CHECK(single.phases[0].clamped);
  CHECK(single.phases[0].params.is_valid(2));
  CHECK_FALSE(single.run.trace.metadata.notes.empty());

  ForecastPanel ten(2, std::vector<double>(20, 0.3), std::vector<Outcome>(10, Outcome::kOne));
  const auto run = bandit_doubling_wrapper(ten, LossFunction::quadratic(), RngStream(2, 0));
  REQUIRE(run.phases.size() == 5);
  CHECK(run.phases[1].phase.first_round == 1);
  CHECK(run.phases[2].phase.first_round == 2);
  CHECK(run.phases[3].phase.first_round == 4);
  CHECK(run.phases[4].phase.first_round == 8);
  CHECK(run.run.weights[4] == WeightVector::uniform(2));
}

TEST_CASE("default EXP3 step size") {
  CHECK(default_exp3_eta(10, 1000) == doctest::Approx(std::sqrt(2 * std::log(10.0) / 10000)));
  CHECK(default_exp3_eta(1, 1000) == 1.0);
}
