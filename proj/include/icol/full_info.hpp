#pragma once

// Full-information learners: WSU, MWU, Hedge, ELF-X and ELF, each usable in
// select-one or aggregate prediction mode, plus the doubling-trick wrapper.

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "icol/core.hpp"

namespace icol {

enum class Algorithm { kWsu, kMwu, kHedge, kElfX, kElf };
enum class PredictionMode { kSelectOne, kAggregate };

std::string_view to_string(Algorithm algorithm);
std::string_view to_string(PredictionMode mode);
Algorithm parse_algorithm(std::string_view name);
PredictionMode parse_mode(std::string_view name);

inline constexpr double kMaxWsuEta = 0.5;
inline constexpr std::size_t kDefaultSelectionSamples = 10000;
inline constexpr double kMaxExactSequences = 1 << 20;

// -- Update rules -------------------------------------------------------------

// pi_i (1 - eta (l_i - <pi, l>)), eta in (0, 0.5].
WeightVector wsu_update(const WeightVector& pi, std::span<const double> losses, double eta);
// The same update composed as eta * WSWM(pi, l) + (1 - eta) pi.
WeightVector wsu_update_wagering_form(const WeightVector& pi, std::span<const double> losses,
                                      double eta);

// w_i (1 - eta l_i), eta in (0,1).
std::vector<double> mwu_update(std::span<const double> weights, std::span<const double> losses,
                               double eta);
// w_i exp(-eta l_i), eta > 0.
std::vector<double> hedge_update(std::span<const double> weights,
                                 std::span<const double> losses, double eta);

// Per-round winner lottery (1/K)(1 - l_i + (1/K) sum_j l_j).
WeightVector elfx_round_winner_probs(std::span<const double> losses);
// Per-round winner lottery (1/K)(1 - l_i + (1/(K-1)) sum_{j != i} l_j); K >= 2.
WeightVector elf_round_winner_probs(std::span<const double> losses);

// -- ELF-style selection distribution -----------------------------------------

struct SelectionMode {
  enum class Kind { kExact, kSampled };
  Kind kind = Kind::kSampled;
  std::size_t num_samples = kDefaultSelectionSamples;

  static SelectionMode exact() { return {Kind::kExact, 0}; }
  static SelectionMode sampled(std::size_t n = kDefaultSelectionSamples) {
    return {Kind::kSampled, n};
  }
};

// Probability that each expert wins the most rounds (ties split uniformly)
// when round tau's winner is drawn independently from winner_probs[tau].
// Exact mode enumerates all K^t winner sequences and refuses more than 2^20.
WeightVector selection_distribution(std::span<const WeightVector> winner_probs,
                                    const SelectionMode& mode, RngStream& rng);

WeightVector elfx_selection_distribution(std::span<const std::vector<double>> loss_rows,
                                         const SelectionMode& mode, RngStream& rng);

// -- Learners -----------------------------------------------------------------

// Step-wise protocol shared by every full-information learner:
//   observe_reports -> predict -> observe_outcome (which updates).
class FullInfoLearner {
 public:
  FullInfoLearner(std::size_t num_experts, double eta, LossFunction loss, RngStream rng);
  virtual ~FullInfoLearner() = default;

  FullInfoLearner(const FullInfoLearner&) = delete;
  FullInfoLearner& operator=(const FullInfoLearner&) = delete;

  virtual Algorithm algorithm() const = 0;
  // pi_t, the distribution used for the current round.
  virtual const WeightVector& weights() const = 0;
  // Reset to the uniform distribution with a new step size.
  virtual void restart(double eta) = 0;

  std::size_t num_experts() const noexcept { return num_experts_; }
  double eta() const noexcept { return eta_; }
  std::size_t round() const noexcept { return round_; }
  const LossFunction& loss() const noexcept { return loss_; }

  void observe_reports(std::span<const double> reports);
  // Learner prediction for the round; select-one mode draws an expert.
  double predict(PredictionMode mode);
  std::optional<std::size_t> last_selection() const noexcept { return selection_; }
  // Scores the prediction, updates the weights and returns the learner loss.
  double observe_outcome(Outcome outcome);
  // Loss row of the most recently completed round.
  const std::vector<double>& last_losses() const noexcept { return losses_; }

 protected:
  virtual std::size_t select_expert();
  virtual void update(std::span<const double> losses) = 0;

  RngStream& rng() noexcept { return rng_; }
  void set_eta(double eta) { eta_ = eta; }
  void reset_round() noexcept { round_ = 0; }

 private:
  std::size_t num_experts_;
  double eta_;
  LossFunction loss_;
  RngStream rng_;
  std::size_t round_ = 0;
  std::vector<double> reports_;
  std::vector<double> losses_;
  std::optional<double> prediction_;
  std::optional<std::size_t> selection_;
};

struct LearnerOptions {
  // Step size; ignored by ELF-X and ELF.
  double eta = 0.1;
  LossFunction loss = LossFunction::quadratic();
  SelectionMode selection = SelectionMode::sampled();
};

std::unique_ptr<FullInfoLearner> make_full_info_learner(Algorithm algorithm,
                                                        std::size_t num_experts,
                                                        const LearnerOptions& options,
                                                        RngStream rng);

struct TunedEta {
  double nominal;
  double eta;
  bool clamped;
};

// sqrt(ln K / horizon), clamped into (0, 0.5]. K = 1 gets 0.5 (the update
// is the identity then).
TunedEta tuned_eta(std::size_t num_experts, std::size_t horizon);

// Step size used when none is supplied: the tuned value for WSU/MWU/Hedge,
// except Hedge in aggregate mode which uses the exp-concave setting 1.
double default_eta(Algorithm algorithm, PredictionMode mode, std::size_t num_experts,
                   std::size_t horizon);

struct FullInfoParams {
  std::optional<double> eta;
  LossFunction loss = LossFunction::quadratic();
  SelectionMode selection = SelectionMode::sampled();
};

struct FullInfoRun {
  RegretTrace trace;
  // pi_t for every round.
  std::vector<WeightVector> weights;
  std::vector<double> learner_losses;
  // <pi_t, l_t>: the select-one loss in expectation over the draw.
  std::vector<double> expected_losses;
};

FullInfoRun run_full_info(const ForecastPanel& panel, Algorithm algorithm,
                          PredictionMode mode, const FullInfoParams& params, RngStream rng);

// Runs an already-constructed learner over a panel.
FullInfoRun run_learner(FullInfoLearner& learner, const ForecastPanel& panel,
                        PredictionMode mode);

// -- Doubling trick -----------------------------------------------------------

struct DoublingPhase {
  std::size_t horizon_estimate;  // n
  std::size_t first_round;       // 0-based, inclusive
  std::size_t last_round;        // 0-based, inclusive (truncated at T)
};

// Phases covering rounds (n/2, n] for n = 1, 2, 4, ... up to horizon T.
std::vector<DoublingPhase> doubling_schedule(std::size_t horizon);

struct PhaseRecord {
  DoublingPhase phase;
  double nominal_eta;
  double eta;
  bool clamped;
};

struct DoublingRun {
  FullInfoRun run;
  std::vector<PhaseRecord> phases;
};

// Restarts `learner` at each phase boundary with eta_for(n).
DoublingRun doubling_wrapper(FullInfoLearner& learner,
                             const std::function<TunedEta(std::size_t)>& eta_for,
                             const ForecastPanel& panel, PredictionMode mode);

}  // namespace icol
