#pragma once

// Experiment orchestration: expert-group sampling, benchmark runs over forecast
// panels, Monte Carlo simulation and aggregation of regret traces into
// mean / 20th / 80th percentile bands.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "icol/bandit.hpp"
#include "icol/core.hpp"
#include "icol/full_info.hpp"

namespace icol {

// One learner configuration, written "NAME[:MODE]", e.g. "WSU:select-one",
// "Hedge:aggregate", "WSU-UX", "EXP3".
struct AlgorithmSpec {
  enum class Family { kFullInfo, kBandit };

  Family family = Family::kFullInfo;
  Algorithm full_info = Algorithm::kWsu;
  BanditAlgorithm bandit = BanditAlgorithm::kWsuUx;
  PredictionMode mode = PredictionMode::kSelectOne;
  std::optional<double> eta;
  std::optional<BanditParams> bandit_params;

  static AlgorithmSpec parse(std::string_view text);
  std::string label() const;
};

std::vector<AlgorithmSpec> parse_algorithm_list(std::string_view comma_separated);

struct RunOptions {
  LossFunction loss = LossFunction::quadratic();
  SelectionMode selection = SelectionMode::sampled();
};

struct AlgorithmRun {
  RegretTrace trace;
  // Rounds whose recorded pi_t (or sampling distribution) failed validation.
  std::size_t invalid_rounds = 0;
};

AlgorithmRun run_algorithm(const AlgorithmSpec& spec, const ForecastPanel& panel,
                           const RunOptions& options, RngStream rng);

// `num_groups` independent samples of `group_size` expert columns without
// replacement. Group g draws from rng.derive(g).
std::vector<ForecastPanel> sample_expert_groups(const ForecastPanel& panel,
                                                std::size_t group_size, std::size_t num_groups,
                                                const RngStream& rng);

// Linear interpolation between order statistics of sorted data.
double percentile_sorted(std::span<const double> sorted, double q);

struct EnsembleMetadata {
  std::string label;
  std::string algorithm;
  std::string mode;
  std::map<std::string, double> params;
  std::uint64_t seed = 0;
  std::size_t num_experts = 0;
  std::size_t horizon = 0;
  std::size_t num_traces = 0;
  std::size_t invalid_rounds = 0;
  std::vector<std::string> notes;

  friend bool operator==(const EnsembleMetadata&, const EnsembleMetadata&) = default;
};

// Per-round regret statistics over a set of traces.
struct TraceEnsemble {
  EnsembleMetadata metadata;
  std::vector<double> mean;
  std::vector<double> p20;
  std::vector<double> p80;
  // Regret curve of every trace, in cell order.
  std::vector<std::vector<double>> per_trace;

  std::size_t rounds() const noexcept { return mean.size(); }
  bool empty() const noexcept { return mean.empty(); }

  friend bool operator==(const TraceEnsemble&, const TraceEnsemble&) = default;
};

// Traces must share one horizon. Notes and parameters are taken from the
// first trace; distinct notes from later traces are appended.
TraceEnsemble aggregate_traces(std::string label, std::span<const AlgorithmRun> runs,
                               std::uint64_t seed);

// Runs f(0) .. f(n - 1) on up to `threads` workers (0 = hardware). Callers
// write results by index, so the outcome does not depend on scheduling.
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& f);

struct BenchmarkOptions {
  std::size_t repetitions = 1;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  RunOptions run;
};

// Every (group, repetition) cell feeds all algorithms the same panel; each
// algorithm draws from its own stream RngStream(seed, 0).derive(g, r, a).
std::vector<TraceEnsemble> run_benchmark(std::span<const ForecastPanel> panels,
                                         std::span<const AlgorithmSpec> algorithms,
                                         const BenchmarkOptions& options);

struct BeliefGroup {
  double low = 0.0;
  double high = 1.0;
};

struct SimulationSpec {
  std::size_t num_experts = 50;
  std::size_t horizon = 2500;
  std::size_t repetitions = 50;
  // Bernoulli rate for rounds t <= horizon / 2 (1-based) and after.
  double early_rate = 0.4;
  double late_rate = 0.6;
  // Beliefs for group members are drawn iid from Unif[low, high] every round.
  std::vector<BeliefGroup> groups = {{0.0, 0.7}, {0.3, 1.0}, {0.0, 1.0}};
  std::uint64_t seed = 0;

  void validate() const;
  // Group of each expert slot before the per-repetition shuffle; groups get
  // floor(K / G) experts and the last one takes the remainder.
  std::vector<std::size_t> group_sizes() const;
};

// One repetition's panel: random partition of experts into groups, truthful
// reports, piecewise Bernoulli outcomes.
ForecastPanel simulate_panel(const SimulationSpec& spec, RngStream rng);

struct MonteCarloOptions {
  std::size_t threads = 1;
  RunOptions run;
};

// Repetition r uses the panel from RngStream(seed, 1).derive(r) and algorithm a
// draws from RngStream(seed, 2).derive(r, a).
std::vector<TraceEnsemble> run_monte_carlo(const SimulationSpec& spec,
                                           std::span<const AlgorithmSpec> algorithms,
                                           const MonteCarloOptions& options);

}  // namespace icol
