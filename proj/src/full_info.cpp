#include "icol/full_info.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

#include "icol/errors.hpp"
#include "icol/wagering.hpp"

namespace icol {

std::string_view to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::kWsu: return "WSU";
    case Algorithm::kMwu: return "MWU";
    case Algorithm::kHedge: return "Hedge";
    case Algorithm::kElfX: return "ELF-X";
    case Algorithm::kElf: return "ELF";
  }
  return "?";
}

std::string_view to_string(PredictionMode mode) {
  return mode == PredictionMode::kSelectOne ? "select-one" : "aggregate";
}

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  out.erase(std::remove(out.begin(), out.end(), '-'), out.end());
  out.erase(std::remove(out.begin(), out.end(), '_'), out.end());
  return out;
}

void check_losses(std::span<const double> losses, std::size_t k, const char* op) {
  if (losses.size() != k) {
    throw DimensionError(std::string(op) + ": " + std::to_string(losses.size()) +
                         " losses for " + std::to_string(k) + " experts");
  }
  for (double l : losses) {
    if (!(l >= 0.0 && l <= 1.0)) {
      throw ParameterError(std::string(op) + ": loss outside [0,1]: " + std::to_string(l));
    }
  }
}

void check_wsu_eta(double eta) {
  if (!(eta > 0.0 && eta <= kMaxWsuEta)) {
    throw ParameterError("WSU step size must lie in (0, 0.5], got " + std::to_string(eta));
  }
}

}  // namespace

Algorithm parse_algorithm(std::string_view name) {
  const std::string n = lower(name);
  if (n == "wsu") return Algorithm::kWsu;
  if (n == "mwu") return Algorithm::kMwu;
  if (n == "hedge") return Algorithm::kHedge;
  if (n == "elfx") return Algorithm::kElfX;
  if (n == "elf") return Algorithm::kElf;
  throw ParameterError("unknown full-information algorithm '" + std::string(name) + "'");
}

PredictionMode parse_mode(std::string_view name) {
  const std::string n = lower(name);
  if (n == "selectone" || n == "select" || n == "single") return PredictionMode::kSelectOne;
  if (n == "aggregate" || n == "aggr") return PredictionMode::kAggregate;
  throw ParameterError("unknown prediction mode '" + std::string(name) + "'");
}

// -- Update rules -------------------------------------------------------------

WeightVector wsu_update(const WeightVector& pi, std::span<const double> losses, double eta) {
  check_wsu_eta(eta);
  check_losses(losses, pi.size(), "wsu_update");
  const double average = pi.dot(losses);
  std::vector<double> next(pi.size());
  for (std::size_t i = 0; i < next.size(); ++i) {
    next[i] = pi[i] * (1.0 - eta * (losses[i] - average));
  }
  return WeightVector(std::move(next));
}

WeightVector wsu_update_wagering_form(const WeightVector& pi, std::span<const double> losses,
                                      double eta) {
  check_wsu_eta(eta);
  check_losses(losses, pi.size(), "wsu_update_wagering_form");
  const std::vector<double> payoffs = wswm_payoffs_from_losses(pi, losses);
  std::vector<double> next(pi.size());
  for (std::size_t i = 0; i < next.size(); ++i) {
    next[i] = eta * payoffs[i] + (1.0 - eta) * pi[i];
  }
  return WeightVector(std::move(next));
}

std::vector<double> mwu_update(std::span<const double> weights, std::span<const double> losses,
                               double eta) {
  if (!(eta > 0.0 && eta < 1.0)) {
    throw ParameterError("MWU step size must lie in (0,1), got " + std::to_string(eta));
  }
  check_losses(losses, weights.size(), "mwu_update");
  std::vector<double> next(weights.size());
  for (std::size_t i = 0; i < next.size(); ++i) {
    if (!(weights[i] > 0.0)) throw ParameterError("MWU weights must be positive");
    next[i] = weights[i] * (1.0 - eta * losses[i]);
  }
  return next;
}

std::vector<double> hedge_update(std::span<const double> weights,
                                 std::span<const double> losses, double eta) {
  if (!(eta > 0.0) || !std::isfinite(eta)) {
    throw ParameterError("Hedge step size must be positive, got " + std::to_string(eta));
  }
  check_losses(losses, weights.size(), "hedge_update");
  std::vector<double> next(weights.size());
  for (std::size_t i = 0; i < next.size(); ++i) {
    if (!(weights[i] > 0.0)) throw ParameterError("Hedge weights must be positive");
    next[i] = weights[i] * std::exp(-eta * losses[i]);
  }
  return next;
}

WeightVector elfx_round_winner_probs(std::span<const double> losses) {
  const std::size_t k = losses.size();
  if (k == 0) throw ParameterError("elfx_round_winner_probs: no experts");
  check_losses(losses, k, "elfx_round_winner_probs");
  double total = 0.0;
  for (double l : losses) total += l;
  const double inv_k = 1.0 / static_cast<double>(k);
  std::vector<double> probs(k);
  for (std::size_t i = 0; i < k; ++i) probs[i] = inv_k * (1.0 - losses[i] + inv_k * total);
  return WeightVector(std::move(probs));
}

WeightVector elf_round_winner_probs(std::span<const double> losses) {
  const std::size_t k = losses.size();
  if (k < 2) throw ParameterError("ELF needs at least two experts");
  check_losses(losses, k, "elf_round_winner_probs");
  double total = 0.0;
  for (double l : losses) total += l;
  const double inv_k = 1.0 / static_cast<double>(k);
  const double inv_others = 1.0 / static_cast<double>(k - 1);
  std::vector<double> probs(k);
  for (std::size_t i = 0; i < k; ++i) {
    probs[i] = inv_k * (1.0 - losses[i] + inv_others * (total - losses[i]));
  }
  return WeightVector(std::move(probs));
}

// -- Selection distribution ---------------------------------------------------

namespace {

// Adds `mass` split uniformly over the experts holding the maximum count.
void credit_leaders(std::span<const std::uint32_t> counts, double mass,
                    std::vector<double>& out) {
  std::uint32_t best = 0;
  std::size_t ties = 0;
  for (std::uint32_t c : counts) {
    if (c > best) {
      best = c;
      ties = 1;
    } else if (c == best) {
      ++ties;
    }
  }
  const double share = mass / static_cast<double>(ties);
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] == best) out[i] += share;
  }
}

void enumerate_sequences(std::span<const WeightVector> winner_probs, std::size_t round,
                         double mass, std::vector<std::uint32_t>& counts,
                         std::vector<double>& out) {
  if (round == winner_probs.size()) {
    credit_leaders(counts, mass, out);
    return;
  }
  const WeightVector& probs = winner_probs[round];
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] <= 0.0) continue;
    ++counts[i];
    enumerate_sequences(winner_probs, round + 1, mass * probs[i], counts, out);
    --counts[i];
  }
}

double sequence_count(std::size_t k, std::size_t rounds) {
  double n = 1.0;
  for (std::size_t t = 0; t < rounds && n <= kMaxExactSequences; ++t) n *= static_cast<double>(k);
  return n;
}

std::vector<double> cumulative_of(const WeightVector& probs) {
  std::vector<double> cum(probs.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    cum[i] = acc;
  }
  return cum;
}

}  // namespace

WeightVector selection_distribution(std::span<const WeightVector> winner_probs,
                                    const SelectionMode& mode, RngStream& rng) {
  if (winner_probs.empty()) {
    throw ParameterError("selection_distribution needs the expert count; use the "
                         "uniform distribution for an empty history");
  }
  const std::size_t k = winner_probs.front().size();
  for (const auto& row : winner_probs) {
    if (row.size() != k) throw DimensionError("winner rows disagree on the expert count");
  }
  if (k == 1) return WeightVector::uniform(1);

  std::vector<double> out(k, 0.0);
  if (mode.kind == SelectionMode::Kind::kExact) {
    if (sequence_count(k, winner_probs.size()) > kMaxExactSequences) {
      throw SizeError("exact selection distribution would enumerate " + std::to_string(k) +
                      "^" + std::to_string(winner_probs.size()) + " > 2^20 sequences");
    }
    std::vector<std::uint32_t> counts(k, 0);
    enumerate_sequences(winner_probs, 0, 1.0, counts, out);
    return WeightVector::normalized(out);
  }

  if (mode.num_samples == 0) throw ParameterError("sampling mode needs num_samples > 0");
  std::vector<std::vector<double>> cumulative;
  cumulative.reserve(winner_probs.size());
  for (const auto& row : winner_probs) cumulative.push_back(cumulative_of(row));
  std::vector<std::uint32_t> counts(k);
  for (std::size_t s = 0; s < mode.num_samples; ++s) {
    std::fill(counts.begin(), counts.end(), 0);
    for (const auto& cum : cumulative) ++counts[sample_cumulative(cum, rng.uniform())];
    credit_leaders(counts, 1.0, out);
  }
  return WeightVector::normalized(out);
}

WeightVector elfx_selection_distribution(std::span<const std::vector<double>> loss_rows,
                                         const SelectionMode& mode, RngStream& rng) {
  if (loss_rows.empty()) {
    throw ParameterError("elfx_selection_distribution: empty history has no expert count; "
                         "use WeightVector::uniform(K)");
  }
  std::vector<WeightVector> probs;
  probs.reserve(loss_rows.size());
  for (const auto& row : loss_rows) probs.push_back(elfx_round_winner_probs(row));
  return selection_distribution(probs, mode, rng);
}

// -- Learner base -------------------------------------------------------------

FullInfoLearner::FullInfoLearner(std::size_t num_experts, double eta, LossFunction loss,
                                 RngStream rng)
    : num_experts_(num_experts), eta_(eta), loss_(std::move(loss)), rng_(std::move(rng)) {
  if (num_experts_ == 0) throw ParameterError("learner needs at least one expert");
}

void FullInfoLearner::observe_reports(std::span<const double> reports) {
  if (reports.size() != num_experts_) {
    throw DimensionError("observe_reports: " + std::to_string(reports.size()) +
                         " reports for " + std::to_string(num_experts_) + " experts");
  }
  reports_.assign(reports.begin(), reports.end());
  prediction_.reset();
  selection_.reset();
}

double FullInfoLearner::predict(PredictionMode mode) {
  if (reports_.empty()) throw ParameterError("predict called before observe_reports");
  if (mode == PredictionMode::kSelectOne) {
    const std::size_t i = select_expert();
    selection_ = i;
    prediction_ = reports_[i];
  } else {
    prediction_ = std::clamp(weights().dot(reports_), 0.0, 1.0);
  }
  return *prediction_;
}

double FullInfoLearner::observe_outcome(Outcome outcome) {
  if (!prediction_) throw ParameterError("observe_outcome called before predict");
  losses_.resize(num_experts_);
  for (std::size_t i = 0; i < num_experts_; ++i) losses_[i] = loss_(reports_[i], outcome);
  const double learner_loss = loss_(*prediction_, outcome);
  update(losses_);
  ++round_;
  reports_.clear();
  prediction_.reset();
  return learner_loss;
}

std::size_t FullInfoLearner::select_expert() { return rng_.categorical(weights().values()); }

// -- Concrete learners --------------------------------------------------------

namespace {

class WsuLearner final : public FullInfoLearner {
 public:
  WsuLearner(std::size_t k, double eta, LossFunction loss, RngStream rng)
      : FullInfoLearner(k, eta, std::move(loss), std::move(rng)), pi_(WeightVector::uniform(k)) {
    check_wsu_eta(eta);
  }

  Algorithm algorithm() const override { return Algorithm::kWsu; }
  const WeightVector& weights() const override { return pi_; }

  void restart(double eta) override {
    check_wsu_eta(eta);
    set_eta(eta);
    pi_ = WeightVector::uniform(num_experts());
    reset_round();
  }

 protected:
  void update(std::span<const double> losses) override { pi_ = wsu_update(pi_, losses, eta()); }

 private:
  WeightVector pi_;
};

// MWU and Hedge keep unnormalized weights, rescaled by their maximum after
// each step so long runs never underflow; pi is unaffected by the rescale.
class MultiplicativeLearner final : public FullInfoLearner {
 public:
  MultiplicativeLearner(Algorithm algorithm, std::size_t k, double eta, LossFunction loss,
                        RngStream rng)
      : FullInfoLearner(k, eta, std::move(loss), std::move(rng)),
        algorithm_(algorithm),
        raw_(k, 1.0),
        pi_(WeightVector::uniform(k)) {
    check_eta(eta);
  }

  Algorithm algorithm() const override { return algorithm_; }
  const WeightVector& weights() const override { return pi_; }
  const std::vector<double>& raw_weights() const { return raw_; }

  void restart(double eta) override {
    check_eta(eta);
    set_eta(eta);
    std::fill(raw_.begin(), raw_.end(), 1.0);
    pi_ = WeightVector::uniform(num_experts());
    reset_round();
  }

 protected:
  void update(std::span<const double> losses) override {
    raw_ = algorithm_ == Algorithm::kMwu ? mwu_update(raw_, losses, eta())
                                         : hedge_update(raw_, losses, eta());
    const double top = *std::max_element(raw_.begin(), raw_.end());
    for (double& w : raw_) w /= top;
    // Deep underflow of a hopeless expert is floored so weights stay positive.
    for (double& w : raw_) w = std::max(w, 1e-300);
    pi_ = WeightVector::normalized(raw_);
  }

 private:
  void check_eta(double eta) const {
    if (algorithm_ == Algorithm::kMwu && !(eta > 0.0 && eta < 1.0)) {
      throw ParameterError("MWU step size must lie in (0,1), got " + std::to_string(eta));
    }
    if (algorithm_ == Algorithm::kHedge && !(eta > 0.0 && std::isfinite(eta))) {
      throw ParameterError("Hedge step size must be positive, got " + std::to_string(eta));
    }
  }

  Algorithm algorithm_;
  std::vector<double> raw_;
  WeightVector pi_;
};

// ELF-X / ELF. pi_t is the law of "expert with the most round wins" over the
// independent per-round winner lotteries of rounds 1..t-1.
//
// Sampled mode keeps a pool of independent winner-count vectors that is
// extended by one lottery draw per sample each round, so each round costs
// O(samples) rather than O(samples * t); every round's estimate is still an
// average over independent full sequences. Select-one draws a fresh
// sequence over the stored history each round.
class ElfLearner final : public FullInfoLearner {
 public:
  ElfLearner(Algorithm variant, std::size_t k, LossFunction loss, SelectionMode selection,
             RngStream rng)
      : FullInfoLearner(k, 0.0, std::move(loss), std::move(rng)),
        variant_(variant),
        selection_(selection),
        pi_(WeightVector::uniform(k)) {
    if (variant_ == Algorithm::kElf && k < 2) throw ParameterError("ELF needs at least two experts");
    if (selection_.kind == SelectionMode::Kind::kSampled && selection_.num_samples == 0) {
      throw ParameterError("sampling mode needs num_samples > 0");
    }
    reset_pool();
  }

  Algorithm algorithm() const override { return variant_; }
  const WeightVector& weights() const override { return pi_; }

  void restart(double) override {
    probs_.clear();
    cumulative_.clear();
    pi_ = WeightVector::uniform(num_experts());
    reset_pool();
    reset_round();
  }

 protected:
  std::size_t select_expert() override {
    const std::size_t k = num_experts();
    if (cumulative_.empty()) return rng().uniform_index(k);
    std::vector<std::uint32_t> counts(k, 0);
    for (const auto& cum : cumulative_) ++counts[sample_cumulative(cum, rng().uniform())];
    const std::uint32_t best = *std::max_element(counts.begin(), counts.end());
    std::vector<std::size_t> leaders;
    for (std::size_t i = 0; i < k; ++i) {
      if (counts[i] == best) leaders.push_back(i);
    }
    return leaders[rng().uniform_index(leaders.size())];
  }

  void update(std::span<const double> losses) override {
    WeightVector probs = variant_ == Algorithm::kElfX ? elfx_round_winner_probs(losses)
                                                      : elf_round_winner_probs(losses);
    cumulative_.push_back(cumulative_of(probs));
    probs_.push_back(std::move(probs));
    if (selection_.kind == SelectionMode::Kind::kExact) {
      pi_ = selection_distribution(probs_, selection_, rng());
    } else {
      extend_pool(cumulative_.back());
    }
  }

 private:
  void reset_pool() {
    if (selection_.kind != SelectionMode::Kind::kSampled) return;
    const std::size_t k = num_experts();
    const std::size_t s = selection_.num_samples;
    counts_.assign(s * k, 0);
    best_.assign(s, 0);
    leaders_.assign(s, {});
    for (auto& l : leaders_) {
      l.clear();
      for (std::size_t i = 0; i < k; ++i) l.push_back(static_cast<std::uint32_t>(i));
    }
  }

  void extend_pool(std::span<const double> cum) {
    const std::size_t k = num_experts();
    std::vector<double> credit(k, 0.0);
    for (std::size_t s = 0; s < best_.size(); ++s) {
      const std::size_t w = sample_cumulative(cum, rng().uniform());
      const std::uint32_t c = ++counts_[s * k + w];
      auto& leaders = leaders_[s];
      if (c > best_[s]) {
        best_[s] = c;
        leaders.clear();
        leaders.push_back(static_cast<std::uint32_t>(w));
      } else if (c == best_[s]) {
        leaders.push_back(static_cast<std::uint32_t>(w));
      }
      const double share = 1.0 / static_cast<double>(leaders.size());
      for (std::uint32_t i : leaders) credit[i] += share;
    }
    pi_ = WeightVector::normalized(credit);
  }

  Algorithm variant_;
  SelectionMode selection_;
  WeightVector pi_;
  std::vector<WeightVector> probs_;
  std::vector<std::vector<double>> cumulative_;
  std::vector<std::uint32_t> counts_;
  std::vector<std::uint32_t> best_;
  std::vector<std::vector<std::uint32_t>> leaders_;
};

}  // namespace

std::unique_ptr<FullInfoLearner> make_full_info_learner(Algorithm algorithm,
                                                        std::size_t num_experts,
                                                        const LearnerOptions& options,
                                                        RngStream rng) {
  switch (algorithm) {
    case Algorithm::kWsu:
      return std::make_unique<WsuLearner>(num_experts, options.eta, options.loss, std::move(rng));
    case Algorithm::kMwu:
    case Algorithm::kHedge:
      return std::make_unique<MultiplicativeLearner>(algorithm, num_experts, options.eta,
                                                     options.loss, std::move(rng));
    case Algorithm::kElfX:
    case Algorithm::kElf:
      return std::make_unique<ElfLearner>(algorithm, num_experts, options.loss,
                                          options.selection, std::move(rng));
  }
  throw ParameterError("unknown algorithm");
}

TunedEta tuned_eta(std::size_t num_experts, std::size_t horizon) {
  if (num_experts == 0 || horizon == 0) throw ParameterError("tuned_eta needs K, T >= 1");
  const double nominal =
      std::sqrt(std::log(static_cast<double>(num_experts)) / static_cast<double>(horizon));
  if (num_experts == 1) return {nominal, kMaxWsuEta, true};
  if (nominal > kMaxWsuEta) return {nominal, kMaxWsuEta, true};
  return {nominal, nominal, false};
}

double default_eta(Algorithm algorithm, PredictionMode mode, std::size_t num_experts,
                   std::size_t horizon) {
  if (algorithm == Algorithm::kHedge && mode == PredictionMode::kAggregate) return 1.0;
  if (algorithm == Algorithm::kElfX || algorithm == Algorithm::kElf) return 0.0;
  return tuned_eta(num_experts, horizon).eta;
}

// -- Runs ---------------------------------------------------------------------

namespace {

struct RoundHook {
  virtual ~RoundHook() = default;
  virtual void before_round(std::size_t /*t*/) {}
};

FullInfoRun run_rounds(FullInfoLearner& learner, const ForecastPanel& panel,
                       PredictionMode mode, RoundHook& hook) {
  if (panel.num_experts() != learner.num_experts()) {
    throw DimensionError("learner has " + std::to_string(learner.num_experts()) +
                         " experts, panel has " + std::to_string(panel.num_experts()));
  }
  FullInfoRun run;
  const std::size_t horizon = panel.horizon();
  run.weights.reserve(horizon);
  run.learner_losses.reserve(horizon);
  run.expected_losses.reserve(horizon);
  for (std::size_t t = 0; t < horizon; ++t) {
    hook.before_round(t);
    learner.observe_reports(panel.reports_at(t));
    run.weights.push_back(learner.weights());
    learner.predict(mode);
    const double loss = learner.observe_outcome(panel.outcome(t));
    run.learner_losses.push_back(loss);
    run.expected_losses.push_back(mode == PredictionMode::kSelectOne
                                      ? run.weights.back().dot(learner.last_losses())
                                      : loss);
  }
  run.trace = cumulative_regret(run.learner_losses, panel, learner.loss());
  auto& meta = run.trace.metadata;
  meta.algorithm = std::string(to_string(learner.algorithm()));
  meta.mode = std::string(to_string(mode));
  return run;
}

}  // namespace

FullInfoRun run_learner(FullInfoLearner& learner, const ForecastPanel& panel,
                        PredictionMode mode) {
  RoundHook none;
  FullInfoRun run = run_rounds(learner, panel, mode, none);
  if (learner.algorithm() != Algorithm::kElfX && learner.algorithm() != Algorithm::kElf) {
    run.trace.metadata.params["eta"] = learner.eta();
  }
  return run;
}

FullInfoRun run_full_info(const ForecastPanel& panel, Algorithm algorithm,
                          PredictionMode mode, const FullInfoParams& params, RngStream rng) {
  const std::uint64_t seed = rng.seed();
  const std::uint64_t stream = rng.stream_id();
  LearnerOptions options;
  options.loss = params.loss;
  options.selection = params.selection;
  options.eta = params.eta.value_or(
      default_eta(algorithm, mode, panel.num_experts(), panel.horizon()));
  auto learner = make_full_info_learner(algorithm, panel.num_experts(), options, std::move(rng));
  FullInfoRun run = run_learner(*learner, panel, mode);
  auto& meta = run.trace.metadata;
  meta.seed = seed;
  meta.stream = stream;
  if (algorithm == Algorithm::kElfX || algorithm == Algorithm::kElf) {
    meta.params["num_samples"] = params.selection.kind == SelectionMode::Kind::kExact
                                     ? 0.0
                                     : static_cast<double>(params.selection.num_samples);
  } else if (!params.eta && algorithm != Algorithm::kHedge) {
    const TunedEta tuned = tuned_eta(panel.num_experts(), panel.horizon());
    if (tuned.clamped) {
      meta.notes.push_back("eta clamped from " + std::to_string(tuned.nominal) + " to " +
                           std::to_string(tuned.eta));
    }
  }
  return run;
}

// -- Doubling trick -----------------------------------------------------------

std::vector<DoublingPhase> doubling_schedule(std::size_t horizon) {
  std::vector<DoublingPhase> phases;
  std::size_t n = 1;
  std::size_t first = 0;
  while (first < horizon) {
    const std::size_t last = std::min(n, horizon) - 1;
    phases.push_back({n, first, last});
    first = n;
    n *= 2;
  }
  return phases;
}

DoublingRun doubling_wrapper(FullInfoLearner& learner,
                             const std::function<TunedEta(std::size_t)>& eta_for,
                             const ForecastPanel& panel, PredictionMode mode) {
  struct PhaseHook final : RoundHook {
    PhaseHook(FullInfoLearner& l, const std::function<TunedEta(std::size_t)>& f,
              std::vector<DoublingPhase> s)
        : learner(l), eta_for(f), schedule(std::move(s)) {}

    void before_round(std::size_t t) override {
      if (next < schedule.size() && schedule[next].first_round == t) {
        const DoublingPhase& phase = schedule[next++];
        const TunedEta eta = eta_for(phase.horizon_estimate);
        learner.restart(eta.eta);
        records.push_back({phase, eta.nominal, eta.eta, eta.clamped});
      }
    }

    FullInfoLearner& learner;
    const std::function<TunedEta(std::size_t)>& eta_for;
    std::vector<DoublingPhase> schedule;
    std::size_t next = 0;
    std::vector<PhaseRecord> records;
  };

  PhaseHook hook(learner, eta_for, doubling_schedule(panel.horizon()));
  DoublingRun out;
  out.run = run_rounds(learner, panel, mode, hook);
  out.phases = std::move(hook.records);
  out.run.trace.metadata.params["phases"] = static_cast<double>(out.phases.size());
  for (const auto& p : out.phases) {
    if (p.clamped) {
      out.run.trace.metadata.notes.push_back(
          "phase n=" + std::to_string(p.phase.horizon_estimate) + ": eta clamped from " +
          std::to_string(p.nominal_eta) + " to " + std::to_string(p.eta));
    }
  }
  return out;
}

}  // namespace icol
