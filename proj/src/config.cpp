#include "icol/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "icol/errors.hpp"

namespace icol {

namespace {

using nlohmann::json;

const std::set<std::string> kKnownKeys = {
    "num_experts", "horizon",   "repetitions", "early_rate", "late_rate",
    "groups",      "seed",      "algorithms",  "eta",        "gamma",
    "loss",        "num_samples", "threads",   "group_size", "num_groups"};

template <typename T>
void read(const json& doc, const char* key, T& into) {
  if (doc.contains(key)) into = doc.at(key).get<T>();
}

template <typename T>
void read(const json& doc, const char* key, std::optional<T>& into) {
  if (doc.contains(key)) into = doc.at(key).get<T>();
}

}  // namespace

std::vector<AlgorithmSpec> ExperimentConfig::algorithm_specs() const {
  std::vector<AlgorithmSpec> specs;
  for (const auto& name : algorithms) specs.push_back(AlgorithmSpec::parse(name));
  for (auto& spec : specs) {
    if (spec.family == AlgorithmSpec::Family::kBandit &&
        spec.bandit == BanditAlgorithm::kWsuUx) {
      if (eta.has_value() != gamma.has_value()) {
        throw ParameterError("WSU-UX needs both eta and gamma, or neither");
      }
      if (eta) spec.bandit_params = BanditParams{*eta, *gamma};
    } else if (!(spec.family == AlgorithmSpec::Family::kFullInfo &&
                 (spec.full_info == Algorithm::kElfX || spec.full_info == Algorithm::kElf))) {
      spec.eta = eta;
    }
  }
  return specs;
}

RunOptions ExperimentConfig::run_options() const {
  RunOptions options;
  options.loss = LossFunction::from_name(loss);
  if (num_samples) {
    options.selection = *num_samples == 0 ? SelectionMode::exact() : SelectionMode::sampled(*num_samples);
  }
  return options;
}

ExperimentConfig parse_experiment_config(const std::string& text, const std::string& source) {
  ExperimentConfig config;
  config.algorithms = {"WSU:select-one", "MWU:select-one", "WSU:aggregate", "MWU:aggregate"};
  try {
    const json doc = json::parse(text);
    if (!doc.is_object()) throw ParameterError(source + ": top level must be an object");
    for (const auto& [key, value] : doc.items()) {
      if (!kKnownKeys.count(key)) throw ParameterError(source + ": unknown key '" + key + "'");
    }
    SimulationSpec& sim = config.simulation;
    read(doc, "num_experts", sim.num_experts);
    read(doc, "horizon", sim.horizon);
    read(doc, "repetitions", sim.repetitions);
    read(doc, "early_rate", sim.early_rate);
    read(doc, "late_rate", sim.late_rate);
    read(doc, "seed", sim.seed);
    if (doc.contains("groups")) {
      sim.groups.clear();
      for (const auto& g : doc.at("groups")) {
        sim.groups.push_back({g.at("low").get<double>(), g.at("high").get<double>()});
      }
    }
    read(doc, "algorithms", config.algorithms);
    read(doc, "eta", config.eta);
    read(doc, "gamma", config.gamma);
    read(doc, "loss", config.loss);
    read(doc, "num_samples", config.num_samples);
    read(doc, "threads", config.threads);
    config.repetitions = sim.repetitions;
    read(doc, "group_size", config.group_size);
    read(doc, "num_groups", config.num_groups);
  } catch (const json::exception& ex) {
    throw ParameterError(source + ": " + ex.what());
  }
  return config;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_experiment_config(buf.str(), path.string());
}

}  // namespace icol
