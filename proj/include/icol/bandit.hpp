#pragma once

// Partial-information learners: WSU-UX (WSU on importance-weighted loss
// estimates with uniform exploration) and the EXP3 baseline.

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "icol/core.hpp"
#include "icol/full_info.hpp"

namespace icol {

enum class BanditAlgorithm { kWsuUx, kExp3 };

std::string_view to_string(BanditAlgorithm algorithm);
BanditAlgorithm parse_bandit_algorithm(std::string_view name);

// Upper bound applied to gamma when short horizons force clamping.
inline constexpr double kMaxClampedGamma = 0.49;

struct BanditParams {
  double eta = 0.0;
  double gamma = 0.0;

  // 0 < eta, gamma < 1/2 and eta K / gamma <= 1/2.
  void validate(std::size_t num_experts) const;
  bool is_valid(std::size_t num_experts) const;

  // eta = (ln K / (4 sqrt(K) T))^(2/3), gamma = (K ln K / (4 T))^(1/3).
  static BanditParams horizon_defaults(std::size_t num_experts, std::size_t horizon);
};

struct ClampedParams {
  BanditParams params;
  bool clamped = false;
  std::string note;
};

// Returns `nominal` untouched when valid. Otherwise raises gamma to at least
// 2 eta K (capped at kMaxClampedGamma) and, if that is still not enough,
// lowers eta to gamma / (2K).
ClampedParams clamp_bandit_params(const BanditParams& nominal, std::size_t num_experts);

struct BanditRound {
  std::size_t chosen;
  WeightVector pi;
  WeightVector pi_tilde;
  std::vector<double> estimated_losses;
  double observed_loss;
};

// pi~ = (1 - gamma) pi + gamma / K.
WeightVector exploration_mix(const WeightVector& pi, double gamma);

struct WsuUxUpdate {
  BanditRound round;
  WeightVector next;
};

// One WSU-UX update for a known choice I_t and its observed loss.
WsuUxUpdate wsu_ux_update(const WeightVector& pi, const BanditParams& params,
                          std::size_t chosen, double observed_loss);

// Chosen expert's weight times exp(-eta l / pi_chosen); others unchanged.
std::vector<double> exp3_step(std::span<const double> weights, std::size_t chosen,
                              double observed_loss, double eta);

struct MomentCheck {
  std::vector<double> mean;
  std::vector<double> second_moment;
};

// Exact E[l^_i] and E[l^_i^2] over I_t ~ pi~ by summing the K choices.
MomentCheck estimator_moments_check(const WeightVector& pi_tilde,
                                    std::span<const double> losses);

// Reveals l_{i,t} for the single expert the learner picked.
using LossReveal = std::function<double(std::size_t expert)>;

class BanditLearner {
 public:
  BanditLearner(std::size_t num_experts, RngStream rng);
  virtual ~BanditLearner() = default;

  BanditLearner(const BanditLearner&) = delete;
  BanditLearner& operator=(const BanditLearner&) = delete;

  virtual BanditAlgorithm algorithm() const = 0;
  virtual const WeightVector& weights() const = 0;
  // Distribution I_t is drawn from.
  virtual WeightVector sampling_distribution() const = 0;
  virtual BanditRound step_with(std::size_t chosen, double observed_loss) = 0;

  // Draws I_t, asks `reveal` for that one loss and updates.
  BanditRound step(const LossReveal& reveal);

  std::size_t num_experts() const noexcept { return num_experts_; }

 protected:
  RngStream& rng() noexcept { return rng_; }

 private:
  std::size_t num_experts_;
  RngStream rng_;
};

class WsuUxLearner final : public BanditLearner {
 public:
  WsuUxLearner(std::size_t num_experts, BanditParams params, RngStream rng);

  BanditAlgorithm algorithm() const override { return BanditAlgorithm::kWsuUx; }
  const WeightVector& weights() const override { return pi_; }
  WeightVector sampling_distribution() const override;
  BanditRound step_with(std::size_t chosen, double observed_loss) override;

  const BanditParams& params() const noexcept { return params_; }
  void restart(const BanditParams& params);

 private:
  BanditParams params_;
  WeightVector pi_;
};

class Exp3Learner final : public BanditLearner {
 public:
  Exp3Learner(std::size_t num_experts, double eta, RngStream rng);

  BanditAlgorithm algorithm() const override { return BanditAlgorithm::kExp3; }
  const WeightVector& weights() const override { return pi_; }
  WeightVector sampling_distribution() const override { return pi_; }
  BanditRound step_with(std::size_t chosen, double observed_loss) override;

  double eta() const noexcept { return eta_; }
  const std::vector<double>& raw_weights() const noexcept { return raw_; }

 private:
  double eta_;
  std::vector<double> raw_;
  WeightVector pi_;
};

// sqrt(2 ln K / (T K)); K = 1 falls back to 1.
double default_exp3_eta(std::size_t num_experts, std::size_t horizon);

struct BanditRunParams {
  // WSU-UX: defaults to the horizon-tuned parameters (clamped if needed).
  std::optional<BanditParams> wsu_ux;
  // EXP3: defaults to default_exp3_eta.
  std::optional<double> exp3_eta;
  LossFunction loss = LossFunction::quadratic();
};

struct BanditRun {
  RegretTrace trace;
  std::vector<WeightVector> weights;
  std::vector<WeightVector> sampling;
  std::vector<std::size_t> chosen;
  std::vector<double> learner_losses;
};

BanditRun run_bandit(const ForecastPanel& panel, BanditAlgorithm algorithm,
                     const BanditRunParams& params, RngStream rng);

struct BanditPhaseRecord {
  DoublingPhase phase;
  BanditParams nominal;
  BanditParams params;
  bool clamped;
};

struct BanditDoublingRun {
  BanditRun run;
  std::vector<BanditPhaseRecord> phases;
};

// WSU-UX restarted at each doubling phase with parameters tuned for n.
BanditDoublingRun bandit_doubling_wrapper(const ForecastPanel& panel, const LossFunction& loss,
                                          RngStream rng);

}  // namespace icol
