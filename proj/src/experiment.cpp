#include "icol/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "icol/errors.hpp"

namespace icol {

// -- Algorithm specs ----------------------------------------------------------

AlgorithmSpec AlgorithmSpec::parse(std::string_view text) {
  const auto colon = text.find(':');
  const std::string_view name = text.substr(0, colon);
  const std::string_view mode =
      colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);
  AlgorithmSpec spec;
  try {
    spec.bandit = parse_bandit_algorithm(name);
    spec.family = Family::kBandit;
    if (!mode.empty()) {
      throw ParameterError("bandit algorithm '" + std::string(name) + "' takes no mode");
    }
    return spec;
  } catch (const ParameterError&) {
    if (spec.family == Family::kBandit) throw;
  }
  spec.full_info = parse_algorithm(name);
  spec.mode = mode.empty() ? PredictionMode::kSelectOne : parse_mode(mode);
  return spec;
}

std::string AlgorithmSpec::label() const {
  if (family == Family::kBandit) return std::string(to_string(bandit));
  return std::string(to_string(full_info)) + ":" + std::string(to_string(mode));
}

std::vector<AlgorithmSpec> parse_algorithm_list(std::string_view text) {
  std::vector<AlgorithmSpec> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto end = std::min(text.find(',', start), text.size());
    std::string_view item = text.substr(start, end - start);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    if (!item.empty()) out.push_back(AlgorithmSpec::parse(item));
    start = end + 1;
  }
  if (out.empty()) throw ParameterError("empty algorithm list");
  return out;
}

AlgorithmRun run_algorithm(const AlgorithmSpec& spec, const ForecastPanel& panel,
                           const RunOptions& options, RngStream rng) {
  AlgorithmRun out;
  if (spec.family == AlgorithmSpec::Family::kFullInfo) {
    FullInfoParams params;
    params.eta = spec.eta;
    params.loss = options.loss;
    params.selection = options.selection;
    FullInfoRun run = run_full_info(panel, spec.full_info, spec.mode, params, std::move(rng));
    for (const auto& pi : run.weights) {
      if (!is_valid_simplex(pi.values())) ++out.invalid_rounds;
    }
    out.trace = std::move(run.trace);
  } else {
    BanditRunParams params;
    params.loss = options.loss;
    if (spec.bandit == BanditAlgorithm::kWsuUx) {
      params.wsu_ux = spec.bandit_params;
    } else {
      params.exp3_eta = spec.eta;
    }
    BanditRun run = run_bandit(panel, spec.bandit, params, std::move(rng));
    for (std::size_t t = 0; t < run.weights.size(); ++t) {
      if (!is_valid_simplex(run.weights[t].values()) ||
          !is_valid_simplex(run.sampling[t].values())) {
        ++out.invalid_rounds;
      }
    }
    out.trace = std::move(run.trace);
  }
  out.trace.metadata.num_experts = panel.num_experts();
  out.trace.metadata.horizon = panel.horizon();
  return out;
}

// -- Groups and aggregation ---------------------------------------------------

std::vector<ForecastPanel> sample_expert_groups(const ForecastPanel& panel,
                                                std::size_t group_size, std::size_t num_groups,
                                                const RngStream& rng) {
  if (group_size == 0 || group_size > panel.num_experts()) {
    throw ParameterError("group size " + std::to_string(group_size) + " not in [1, " +
                         std::to_string(panel.num_experts()) + "]");
  }
  std::vector<ForecastPanel> groups;
  groups.reserve(num_groups);
  for (std::size_t g = 0; g < num_groups; ++g) {
    RngStream stream = rng.derive(g);
    std::vector<std::size_t> columns(panel.num_experts());
    for (std::size_t i = 0; i < columns.size(); ++i) columns[i] = i;
    for (std::size_t i = 0; i < group_size; ++i) {
      const std::size_t j = i + stream.uniform_index(columns.size() - i);
      std::swap(columns[i], columns[j]);
    }
    columns.resize(group_size);
    groups.push_back(panel.select_experts(columns));
  }
  return groups;
}

double percentile_sorted(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw ParameterError("percentile of an empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw ParameterError("percentile level outside [0,1]");
  const double h = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

TraceEnsemble aggregate_traces(std::string label, std::span<const AlgorithmRun> runs,
                               std::uint64_t seed) {
  if (runs.empty()) throw ParameterError("cannot aggregate zero traces for " + label);
  const std::size_t horizon = runs.front().trace.rounds();
  TraceEnsemble ensemble;
  auto& meta = ensemble.metadata;
  const TraceMetadata& first = runs.front().trace.metadata;
  meta.label = std::move(label);
  meta.algorithm = first.algorithm;
  meta.mode = first.mode;
  meta.params = first.params;
  meta.seed = seed;
  meta.num_experts = first.num_experts;
  meta.horizon = horizon;
  meta.num_traces = runs.size();
  for (const auto& run : runs) {
    if (run.trace.rounds() != horizon) {
      throw DimensionError("traces in one ensemble must share a horizon");
    }
    meta.invalid_rounds += run.invalid_rounds;
    for (const auto& note : run.trace.metadata.notes) {
      if (std::find(meta.notes.begin(), meta.notes.end(), note) == meta.notes.end()) {
        meta.notes.push_back(note);
      }
    }
    ensemble.per_trace.push_back(run.trace.regret);
  }

  ensemble.mean.resize(horizon);
  ensemble.p20.resize(horizon);
  ensemble.p80.resize(horizon);
  std::vector<double> column(runs.size());
  for (std::size_t t = 0; t < horizon; ++t) {
    double sum = 0.0;
    for (std::size_t k = 0; k < runs.size(); ++k) {
      column[k] = runs[k].trace.regret[t];
      sum += column[k];
    }
    ensemble.mean[t] = sum / static_cast<double>(runs.size());
    std::sort(column.begin(), column.end());
    ensemble.p20[t] = percentile_sorted(column, 0.2);
    ensemble.p80[t] = percentile_sorted(column, 0.8);
  }
  return ensemble;
}

void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& f) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, n);
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> workers;
  for (std::size_t w = 0; w < threads; ++w) {
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          f(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next = n;
        }
      }
    });
  }
  for (auto& w : workers) w.join();
  if (failure) std::rethrow_exception(failure);
}

namespace {

std::vector<TraceEnsemble> collect(std::span<const AlgorithmSpec> algorithms,
                                   const std::vector<std::vector<AlgorithmRun>>& runs,
                                   std::uint64_t seed) {
  std::vector<TraceEnsemble> out;
  for (std::size_t a = 0; a < algorithms.size(); ++a) {
    out.push_back(aggregate_traces(algorithms[a].label(), runs[a], seed));
  }
  return out;
}

}  // namespace

std::vector<TraceEnsemble> run_benchmark(std::span<const ForecastPanel> panels,
                                         std::span<const AlgorithmSpec> algorithms,
                                         const BenchmarkOptions& options) {
  if (panels.empty()) throw ParameterError("benchmark needs at least one panel");
  if (algorithms.empty()) throw ParameterError("benchmark needs at least one algorithm");
  if (options.repetitions == 0) throw ParameterError("repetitions must be positive");
  const std::size_t cells = panels.size() * options.repetitions;
  std::vector<std::vector<AlgorithmRun>> runs(algorithms.size(), std::vector<AlgorithmRun>(cells));
  const RngStream base(options.seed, 0);
  parallel_for(cells, options.threads, [&](std::size_t cell) {
    const std::size_t g = cell / options.repetitions;
    const std::size_t r = cell % options.repetitions;
    for (std::size_t a = 0; a < algorithms.size(); ++a) {
      runs[a][cell] = run_algorithm(algorithms[a], panels[g], options.run, base.derive(g, r, a));
    }
  });
  return collect(algorithms, runs, options.seed);
}

// -- Monte Carlo --------------------------------------------------------------

void SimulationSpec::validate() const {
  if (num_experts == 0) throw ParameterError("num_experts must be positive");
  if (horizon == 0) throw ParameterError("horizon must be positive");
  if (repetitions == 0) throw ParameterError("repetitions must be positive");
  static_cast<void>(Probability(early_rate));
  static_cast<void>(Probability(late_rate));
  if (groups.empty()) throw ParameterError("at least one belief group is required");
  if (groups.size() > num_experts) {
    throw ParameterError("more belief groups than experts");
  }
  for (const auto& g : groups) {
    static_cast<void>(Probability(g.low));
    static_cast<void>(Probability(g.high));
    if (g.low > g.high) throw ParameterError("belief group has low > high");
  }
}

std::vector<std::size_t> SimulationSpec::group_sizes() const {
  std::vector<std::size_t> sizes(groups.size(), num_experts / groups.size());
  sizes.back() += num_experts % groups.size();
  return sizes;
}

ForecastPanel simulate_panel(const SimulationSpec& spec, RngStream rng) {
  spec.validate();
  const std::size_t k = spec.num_experts;
  std::vector<std::size_t> group_of;
  group_of.reserve(k);
  const auto sizes = spec.group_sizes();
  for (std::size_t g = 0; g < sizes.size(); ++g) group_of.insert(group_of.end(), sizes[g], g);
  for (std::size_t i = k; i > 1; --i) std::swap(group_of[i - 1], group_of[rng.uniform_index(i)]);

  std::vector<double> reports(k * spec.horizon);
  std::vector<Outcome> outcomes(spec.horizon);
  for (std::size_t t = 0; t < spec.horizon; ++t) {
    const double rate = 2 * (t + 1) <= spec.horizon ? spec.early_rate : spec.late_rate;
    outcomes[t] = rng.bernoulli(rate) ? Outcome::kOne : Outcome::kZero;
    for (std::size_t i = 0; i < k; ++i) {
      const BeliefGroup& g = spec.groups[group_of[i]];
      reports[t * k + i] = g.low == g.high ? g.low : rng.uniform(g.low, g.high);
    }
  }
  return ForecastPanel(k, std::move(reports), std::move(outcomes));
}

std::vector<TraceEnsemble> run_monte_carlo(const SimulationSpec& spec,
                                           std::span<const AlgorithmSpec> algorithms,
                                           const MonteCarloOptions& options) {
  spec.validate();
  if (algorithms.empty()) throw ParameterError("simulation needs at least one algorithm");
  std::vector<std::vector<AlgorithmRun>> runs(algorithms.size(),
                                              std::vector<AlgorithmRun>(spec.repetitions));
  const RngStream panels(spec.seed, 1);
  const RngStream learners(spec.seed, 2);
  parallel_for(spec.repetitions, options.threads, [&](std::size_t r) {
    const ForecastPanel panel = simulate_panel(spec, panels.derive(r));
    for (std::size_t a = 0; a < algorithms.size(); ++a) {
      runs[a][r] = run_algorithm(algorithms[a], panel, options.run, learners.derive(r, a));
    }
  });
  return collect(algorithms, runs, spec.seed);
}

}  // namespace icol
