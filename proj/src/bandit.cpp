#include "icol/bandit.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <sstream>

#include "icol/errors.hpp"

namespace icol {

std::string_view to_string(BanditAlgorithm algorithm) {
  return algorithm == BanditAlgorithm::kWsuUx ? "WSU-UX" : "EXP3";
}

BanditAlgorithm parse_bandit_algorithm(std::string_view name) {
  std::string n(name);
  std::transform(n.begin(), n.end(), n.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  n.erase(std::remove(n.begin(), n.end(), '-'), n.end());
  n.erase(std::remove(n.begin(), n.end(), '_'), n.end());
  if (n == "wsuux") return BanditAlgorithm::kWsuUx;
  if (n == "exp3") return BanditAlgorithm::kExp3;
  throw ParameterError("unknown bandit algorithm '" + std::string(name) + "'");
}

// -- Parameters ---------------------------------------------------------------

bool BanditParams::is_valid(std::size_t num_experts) const {
  return eta > 0.0 && eta < 0.5 && gamma > 0.0 && gamma < 0.5 &&
         eta * static_cast<double>(num_experts) / gamma <= 0.5;
}

void BanditParams::validate(std::size_t num_experts) const {
  if (num_experts == 0) throw ParameterError("bandit learner needs at least one expert");
  if (!is_valid(num_experts)) {
    std::ostringstream os;
    os << "bandit parameters need 0 < eta, gamma < 1/2 and eta*K/gamma <= 1/2; got eta="
       << eta << ", gamma=" << gamma << ", K=" << num_experts;
    throw ParameterError(os.str());
  }
}

BanditParams BanditParams::horizon_defaults(std::size_t num_experts, std::size_t horizon) {
  if (num_experts == 0 || horizon == 0) throw ParameterError("horizon_defaults needs K, T >= 1");
  const double k = static_cast<double>(num_experts);
  const double t = static_cast<double>(horizon);
  const double log_k = std::log(k);
  return {std::pow(log_k / (4.0 * std::sqrt(k) * t), 2.0 / 3.0),
          std::cbrt(k * log_k / (4.0 * t))};
}

ClampedParams clamp_bandit_params(const BanditParams& nominal, std::size_t num_experts) {
  if (num_experts == 0) throw ParameterError("bandit learner needs at least one expert");
  if (nominal.is_valid(num_experts)) return {nominal, false, {}};
  const double k = static_cast<double>(num_experts);
  double gamma = nominal.gamma > 0.0 ? nominal.gamma : kMaxClampedGamma;
  if (nominal.eta > 0.0) gamma = std::max(gamma, 2.0 * nominal.eta * k);
  gamma = std::min(gamma, kMaxClampedGamma);
  double eta = nominal.eta;
  if (!(eta > 0.0) || eta * k / gamma > 0.5) eta = gamma / (2.0 * k);
  std::ostringstream os;
  os << "bandit parameters clamped from (eta=" << nominal.eta << ", gamma=" << nominal.gamma
     << ") to (eta=" << eta << ", gamma=" << gamma << ")";
  return {{eta, gamma}, true, os.str()};
}

// -- Update rules -------------------------------------------------------------

WeightVector exploration_mix(const WeightVector& pi, double gamma) {
  const double uniform = gamma / static_cast<double>(pi.size());
  std::vector<double> mixed(pi.size());
  for (std::size_t i = 0; i < mixed.size(); ++i) mixed[i] = (1.0 - gamma) * pi[i] + uniform;
  return WeightVector(std::move(mixed));
}

namespace {

void check_observed(std::size_t chosen, std::size_t k, double observed_loss) {
  if (chosen >= k) {
    throw IndexError("chosen expert " + std::to_string(chosen) + " out of range");
  }
  if (!(observed_loss >= 0.0 && observed_loss <= 1.0)) {
    throw ParameterError("observed loss outside [0,1]: " + std::to_string(observed_loss));
  }
}

}  // namespace

WsuUxUpdate wsu_ux_update(const WeightVector& pi, const BanditParams& params,
                          std::size_t chosen, double observed_loss) {
  const std::size_t k = pi.size();
  params.validate(k);
  check_observed(chosen, k, observed_loss);
  WeightVector pi_tilde = exploration_mix(pi, params.gamma);
  assert(pi_tilde[chosen] >= 1e-15);
  std::vector<double> estimated(k, 0.0);
  estimated[chosen] = observed_loss / pi_tilde[chosen];
  const double average = pi[chosen] * estimated[chosen];
  std::vector<double> next(k);
  for (std::size_t i = 0; i < k; ++i) {
    next[i] = pi[i] * (1.0 - params.eta * (estimated[i] - average));
  }
  return {BanditRound{chosen, pi, std::move(pi_tilde), std::move(estimated), observed_loss},
          WeightVector(std::move(next))};
}

std::vector<double> exp3_step(std::span<const double> weights, std::size_t chosen,
                              double observed_loss, double eta) {
  check_observed(chosen, weights.size(), observed_loss);
  if (!(eta > 0.0) || !std::isfinite(eta)) {
    throw ParameterError("EXP3 step size must be positive");
  }
  double total = 0.0;
  for (double w : weights) {
    if (!(w > 0.0)) throw ParameterError("EXP3 weights must be positive");
    total += w;
  }
  const double chosen_prob = weights[chosen] / total;
  std::vector<double> next(weights.begin(), weights.end());
  next[chosen] *= std::exp(-eta * observed_loss / chosen_prob);
  return next;
}

MomentCheck estimator_moments_check(const WeightVector& pi_tilde,
                                    std::span<const double> losses) {
  const std::size_t k = pi_tilde.size();
  if (losses.size() != k) {
    throw DimensionError("estimator_moments_check: " + std::to_string(losses.size()) +
                         " losses for " + std::to_string(k) + " experts");
  }
  MomentCheck out{std::vector<double>(k, 0.0), std::vector<double>(k, 0.0)};
  for (std::size_t j = 0; j < k; ++j) {
    if (pi_tilde[j] <= 0.0) continue;
    // When I_t = j only expert j has a non-zero estimate.
    const double estimate = losses[j] / pi_tilde[j];
    out.mean[j] += pi_tilde[j] * estimate;
    out.second_moment[j] += pi_tilde[j] * estimate * estimate;
  }
  return out;
}

// -- Learners -----------------------------------------------------------------

BanditLearner::BanditLearner(std::size_t num_experts, RngStream rng)
    : num_experts_(num_experts), rng_(std::move(rng)) {
  if (num_experts_ == 0) throw ParameterError("bandit learner needs at least one expert");
}

BanditRound BanditLearner::step(const LossReveal& reveal) {
  const WeightVector dist = sampling_distribution();
  const std::size_t chosen = rng_.categorical(dist.values());
  return step_with(chosen, reveal(chosen));
}

WsuUxLearner::WsuUxLearner(std::size_t num_experts, BanditParams params, RngStream rng)
    : BanditLearner(num_experts, std::move(rng)),
      params_(params),
      pi_(WeightVector::uniform(num_experts)) {
  params_.validate(num_experts);
}

WeightVector WsuUxLearner::sampling_distribution() const {
  return exploration_mix(pi_, params_.gamma);
}

BanditRound WsuUxLearner::step_with(std::size_t chosen, double observed_loss) {
  WsuUxUpdate update = wsu_ux_update(pi_, params_, chosen, observed_loss);
  pi_ = std::move(update.next);
  return std::move(update.round);
}

void WsuUxLearner::restart(const BanditParams& params) {
  params.validate(num_experts());
  params_ = params;
  pi_ = WeightVector::uniform(num_experts());
}

Exp3Learner::Exp3Learner(std::size_t num_experts, double eta, RngStream rng)
    : BanditLearner(num_experts, std::move(rng)),
      eta_(eta),
      raw_(num_experts, 1.0),
      pi_(WeightVector::uniform(num_experts)) {
  if (!(eta > 0.0) || !std::isfinite(eta)) throw ParameterError("EXP3 step size must be positive");
}

BanditRound Exp3Learner::step_with(std::size_t chosen, double observed_loss) {
  BanditRound round{chosen, pi_, pi_, std::vector<double>(num_experts(), 0.0), observed_loss};
  check_observed(chosen, num_experts(), observed_loss);
  round.estimated_losses[chosen] = observed_loss / pi_[chosen];
  raw_ = exp3_step(raw_, chosen, observed_loss, eta_);
  const double top = *std::max_element(raw_.begin(), raw_.end());
  for (double& w : raw_) w = std::max(w / top, 1e-300);
  pi_ = WeightVector::normalized(raw_);
  return round;
}

double default_exp3_eta(std::size_t num_experts, std::size_t horizon) {
  if (num_experts == 0 || horizon == 0) throw ParameterError("default_exp3_eta needs K, T >= 1");
  if (num_experts == 1) return 1.0;
  const double k = static_cast<double>(num_experts);
  return std::sqrt(2.0 * std::log(k) / (static_cast<double>(horizon) * k));
}

// -- Runs ---------------------------------------------------------------------

namespace {

BanditRun run_rounds(BanditLearner& learner, const ForecastPanel& panel,
                     const LossFunction& loss,
                     const std::function<void(std::size_t)>& before_round) {
  if (panel.num_experts() != learner.num_experts()) {
    throw DimensionError("bandit learner has " + std::to_string(learner.num_experts()) +
                         " experts, panel has " + std::to_string(panel.num_experts()));
  }
  BanditRun run;
  const std::size_t horizon = panel.horizon();
  run.weights.reserve(horizon);
  run.sampling.reserve(horizon);
  run.chosen.reserve(horizon);
  run.learner_losses.reserve(horizon);
  for (std::size_t t = 0; t < horizon; ++t) {
    if (before_round) before_round(t);
    run.weights.push_back(learner.weights());
    run.sampling.push_back(learner.sampling_distribution());
    // The learner sees one entry of the loss row and nothing else.
    const LossReveal reveal = [&panel, &loss, t](std::size_t i) {
      return loss(panel.report(t, i), panel.outcome(t));
    };
    const BanditRound round = learner.step(reveal);
    run.chosen.push_back(round.chosen);
    run.learner_losses.push_back(round.observed_loss);
  }
  run.trace = cumulative_regret(run.learner_losses, panel, loss);
  run.trace.metadata.algorithm = std::string(to_string(learner.algorithm()));
  run.trace.metadata.mode = "bandit";
  return run;
}

}  // namespace

BanditRun run_bandit(const ForecastPanel& panel, BanditAlgorithm algorithm,
                     const BanditRunParams& params, RngStream rng) {
  const std::size_t k = panel.num_experts();
  const std::uint64_t seed = rng.seed();
  const std::uint64_t stream = rng.stream_id();
  if (algorithm == BanditAlgorithm::kWsuUx) {
    ClampedParams chosen{};
    if (params.wsu_ux) {
      params.wsu_ux->validate(k);
      chosen.params = *params.wsu_ux;
    } else {
      chosen = clamp_bandit_params(BanditParams::horizon_defaults(k, panel.horizon()), k);
    }
    WsuUxLearner learner(k, chosen.params, std::move(rng));
    BanditRun run = run_rounds(learner, panel, params.loss, nullptr);
    run.trace.metadata.params["eta"] = chosen.params.eta;
    run.trace.metadata.params["gamma"] = chosen.params.gamma;
    if (chosen.clamped) run.trace.metadata.notes.push_back(chosen.note);
    run.trace.metadata.seed = seed;
    run.trace.metadata.stream = stream;
    return run;
  }
  const double eta = params.exp3_eta.value_or(default_exp3_eta(k, panel.horizon()));
  Exp3Learner learner(k, eta, std::move(rng));
  BanditRun run = run_rounds(learner, panel, params.loss, nullptr);
  run.trace.metadata.params["eta"] = eta;
  run.trace.metadata.seed = seed;
  run.trace.metadata.stream = stream;
  return run;
}

BanditDoublingRun bandit_doubling_wrapper(const ForecastPanel& panel, const LossFunction& loss,
                                          RngStream rng) {
  const std::size_t k = panel.num_experts();
  const auto schedule = doubling_schedule(panel.horizon());
  BanditDoublingRun out;
  auto params_for = [k](std::size_t n) {
    const BanditParams nominal = BanditParams::horizon_defaults(k, n);
    const ClampedParams clamped = clamp_bandit_params(nominal, k);
    return BanditPhaseRecord{{}, nominal, clamped.params, clamped.clamped};
  };
  BanditPhaseRecord first = params_for(schedule.front().horizon_estimate);
  WsuUxLearner learner(k, first.params, std::move(rng));
  std::size_t next = 0;
  out.run = run_rounds(learner, panel, loss, [&](std::size_t t) {
    if (next < schedule.size() && schedule[next].first_round == t) {
      BanditPhaseRecord record = params_for(schedule[next].horizon_estimate);
      record.phase = schedule[next++];
      learner.restart(record.params);
      out.phases.push_back(record);
    }
  });
  auto& meta = out.run.trace.metadata;
  meta.params["phases"] = static_cast<double>(out.phases.size());
  for (const auto& p : out.phases) {
    if (p.clamped) {
      std::ostringstream os;
      os << "phase n=" << p.phase.horizon_estimate << ": parameters clamped to (eta="
         << p.params.eta << ", gamma=" << p.params.gamma << ")";
      meta.notes.push_back(os.str());
    }
  }
  return out;
}

}  // namespace icol
