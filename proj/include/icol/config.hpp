#pragma once

// JSON experiment configuration. Keys match the C++ field names:
//
//   {
//     "num_experts": 12, "horizon": 600, "repetitions": 20,
//     "early_rate": 0.4, "late_rate": 0.6,
//     "groups": [{"low": 0.0, "high": 0.7}, {"low": 0.3, "high": 1.0}, {"low": 0.0, "high": 1.0}],
//     "seed": 7,
//     "algorithms": ["WSU:select-one", "MWU:aggregate", "WSU-UX"],
//     "eta": 0.05, "gamma": 0.2,
//     "loss": "quadratic", "num_samples": 10000, "threads": 1,
//     "group_size": 5, "num_groups": 10
//   }
//
// Every key is optional. "eta" applies to the full-information learners and
// EXP3; "eta" together with "gamma" fixes the WSU-UX parameters.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "icol/experiment.hpp"

namespace icol {

struct ExperimentConfig {
  SimulationSpec simulation;
  std::vector<std::string> algorithms;
  std::optional<double> eta;
  std::optional<double> gamma;
  std::string loss = "quadratic";
  std::optional<std::size_t> num_samples;
  std::size_t threads = 1;
  std::size_t repetitions = 1;
  std::size_t group_size = 0;
  std::size_t num_groups = 1;

  // Algorithm specs with eta / gamma overrides applied.
  std::vector<AlgorithmSpec> algorithm_specs() const;
  RunOptions run_options() const;
};

ExperimentConfig parse_experiment_config(const std::string& text,
                                         const std::string& source = "<config>");
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

}  // namespace icol
