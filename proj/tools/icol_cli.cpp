// icol: command-line front end.
//
//   icol ingest   raw CSV -> normalized complete panel
//   icol simulate Monte Carlo spec -> ensembles
//   icol bench    panel + algorithms -> ensembles
//   icol audit    built-in scenarios or a context file -> audit table
//   icol plot     ensemble JSON files -> SVG
//
// Exit codes: 0 ok, 2 invalid arguments or parameters, 3 data errors, 4 I/O.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "icol/audit.hpp"
#include "icol/config.hpp"
#include "icol/errors.hpp"
#include "icol/experiment.hpp"
#include "icol/output.hpp"
#include "icol/panel_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string default_output_dir() {
  const char* env = std::getenv("ICOL_OUTPUT_DIR");
  return env && *env ? env : ".";
}

struct OutputFlags {
  std::string out_dir = default_output_dir();
  std::vector<std::string> formats = {"csv", "json", "svg"};
  bool per_trace = false;
  std::string title;
};

void add_output_flags(CLI::App* app, OutputFlags& flags) {
  app->add_option("-o,--out-dir", flags.out_dir,
                  "Output directory (default $ICOL_OUTPUT_DIR or .)");
  app->add_option("--format", flags.formats, "Any of csv, json, svg")->delimiter(',');
  app->add_flag("--per-trace", flags.per_trace, "Include every trace in the JSON output");
  app->add_option("--title", flags.title, "SVG title");
}

void emit(const std::vector<icol::TraceEnsemble>& ensembles, const OutputFlags& flags,
          const std::string& default_title) {
  std::error_code ec;
  fs::create_directories(flags.out_dir, ec);
  if (ec) throw icol::IoError("cannot create " + flags.out_dir + ": " + ec.message());
  const fs::path dir(flags.out_dir);
  for (const auto& name : flags.formats) {
    switch (icol::parse_output_format(name)) {
      case icol::OutputFormat::kCsv:
        icol::write_csv_file(ensembles, dir / "regret.csv");
        std::cout << "wrote " << (dir / "regret.csv").string() << '\n';
        break;
      case icol::OutputFormat::kJson:
        for (const auto& e : ensembles) {
          const fs::path path = dir / (icol::file_stem(e.metadata.label) + ".json");
          icol::write_json_file(e, path, flags.per_trace);
          std::cout << "wrote " << path.string() << '\n';
        }
        break;
      case icol::OutputFormat::kSvg: {
        icol::SvgOptions svg;
        svg.title = flags.title.empty() ? default_title : flags.title;
        icol::write_svg_file(ensembles, dir / "regret.svg", svg);
        std::cout << "wrote " << (dir / "regret.svg").string() << '\n';
        break;
      }
    }
  }
}

void print_summary(const std::vector<icol::TraceEnsemble>& ensembles) {
  std::printf("%-20s %8s %6s %14s %14s %14s\n", "algorithm", "traces", "T", "final mean",
              "final p20", "final p80");
  for (const auto& e : ensembles) {
    const std::size_t last = e.rounds() - 1;
    std::printf("%-20s %8zu %6zu %14.6f %14.6f %14.6f\n", e.metadata.label.c_str(),
                e.metadata.num_traces, e.rounds(), e.mean[last], e.p20[last], e.p80[last]);
    if (e.metadata.invalid_rounds > 0) {
      std::printf("  warning: %zu rounds with invalid weights\n", e.metadata.invalid_rounds);
    }
    for (const auto& note : e.metadata.notes) std::printf("  note: %s\n", note.c_str());
  }
}

// -- audit context files --------------------------------------------------------

std::unique_ptr<icol::AuditModel> model_from_json(const json& doc, std::size_t k) {
  const std::string algorithm = doc.at("algorithm").get<std::string>();
  std::vector<double> weights = doc.value("weights", std::vector<double>(k, 1.0 / k));
  const double eta = doc.value("eta", 0.1);
  std::string key;
  for (char c : algorithm) {
    if (c != '-' && c != '_') key += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  if (key == "wsu") return icol::wsu_audit_model(icol::WeightVector(weights), eta);
  if (key == "mwu") return icol::mwu_audit_model(weights, eta);
  if (key == "hedge") return icol::hedge_audit_model(weights, eta);
  if (key == "wsuux") {
    return icol::wsu_ux_audit_model(icol::WeightVector(weights),
                                    {eta, doc.at("gamma").get<double>()});
  }
  if (key == "elfx") {
    return icol::elfx_audit_model(
        k, doc.value("prior_losses", std::vector<std::vector<double>>{}));
  }
  if (key == "gd") return icol::gradient_descent_audit_model(icol::WeightVector(weights), eta);
  throw icol::ParameterError("unknown audit algorithm '" + algorithm + "'");
}

icol::NamedAudit audit_from_file(const fs::path& path, const icol::AuditConfig& config) {
  std::ifstream in(path);
  if (!in) throw icol::IoError("cannot open audit context " + path.string());
  try {
    const json doc = json::parse(in);
    icol::AuditContext context;
    context.expert = doc.value("expert", std::size_t{0});
    context.beliefs = doc.at("beliefs").get<std::vector<double>>();
    context.reports = doc.at("reports").get<std::vector<std::vector<double>>>();
    if (context.reports.empty()) throw icol::ParameterError("audit context has no reports");
    const auto model = model_from_json(doc, context.reports.front().size());
    const bool forward = doc.value("forward", context.depth() > 1);
    icol::NamedAudit out;
    out.name = doc.value("name", path.stem().string());
    out.description = model->name() + " context from " + path.string();
    out.report = forward ? icol::forward_audit(*model, context, config)
                         : icol::myopic_audit(*model, context, config);
    return out;
  } catch (const json::exception& ex) {
    throw icol::ParameterError(path.string() + ": " + ex.what());
  }
}

std::string join_reports(const std::vector<double>& v) {
  std::ostringstream os;
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  return os.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Incentive-compatible online learning: simulations, benchmarks and audits"};
  app.require_subcommand(1);

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Convert a forecast CSV into the normalized panel");
  std::string ingest_in, ingest_out;
  icol::ColumnMap columns;
  ingest->add_option("input", ingest_in, "Input CSV")->required();
  ingest->add_option("-o,--output", ingest_out, "Normalized output CSV")->required();
  ingest->add_option("--event-col", columns.event_id, "Column holding the event id");
  ingest->add_option("--expert-col", columns.expert_id, "Column holding the expert id");
  ingest->add_option("--report-col", columns.report, "Column holding the forecast");
  ingest->add_option("--outcome-col", columns.outcome, "Column holding the 0/1 outcome");
  ingest->add_flag("--percent", columns.percent_reports, "Forecasts are percentages");
  ingest->add_flag("--complement", columns.complement_reports,
                   "Forecasts are for outcome 0");

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo simulation");
  std::string sim_config;
  std::optional<std::size_t> sim_k, sim_t, sim_reps, sim_threads, sim_samples;
  std::optional<std::uint64_t> sim_seed;
  std::optional<std::string> sim_algos;
  OutputFlags sim_out;
  simulate->add_option("-c,--config", sim_config, "JSON config file");
  simulate->add_option("--num-experts", sim_k);
  simulate->add_option("--horizon", sim_t);
  simulate->add_option("--repetitions", sim_reps);
  simulate->add_option("--seed", sim_seed);
  simulate->add_option("--algorithms", sim_algos, "Comma-separated, e.g. WSU:select-one,WSU-UX");
  simulate->add_option("--threads", sim_threads);
  simulate->add_option("--num-samples", sim_samples, "ELF selection samples (0 = exact)");
  add_output_flags(simulate, sim_out);

  // bench
  auto* bench = app.add_subcommand("bench", "Benchmark algorithms on a normalized panel");
  std::string bench_panel, bench_config;
  std::optional<std::size_t> bench_group, bench_groups, bench_reps, bench_threads, bench_samples;
  std::optional<std::uint64_t> bench_seed;
  std::optional<std::string> bench_algos;
  OutputFlags bench_out;
  bench->add_option("panel", bench_panel, "Normalized panel CSV")->required();
  bench->add_option("-c,--config", bench_config, "JSON config file");
  bench->add_option("--group-size", bench_group, "Experts per sampled group (default all)");
  bench->add_option("--num-groups", bench_groups);
  bench->add_option("--repetitions", bench_reps);
  bench->add_option("--seed", bench_seed);
  bench->add_option("--algorithms", bench_algos);
  bench->add_option("--threads", bench_threads);
  bench->add_option("--num-samples", bench_samples, "ELF selection samples (0 = exact)");
  add_output_flags(bench, bench_out);

  // audit
  auto* audit = app.add_subcommand("audit", "Incentive audit of built-in or user contexts");
  std::vector<std::string> audit_contexts;
  std::string audit_json;
  icol::AuditConfig audit_config;
  audit->add_option("--context", audit_contexts, "JSON context file(s); default: built-ins");
  audit->add_option("--report-grid", audit_config.report_grid_size);
  audit->add_option("--belief-grid", audit_config.belief_grid_size);
  audit->add_option("--joint-grid", audit_config.joint_grid_size);
  audit->add_option("--tolerance", audit_config.tolerance);
  audit->add_option("--max-depth", audit_config.horizon_depth);
  audit->add_option("--json", audit_json, "Also write the table as JSON");

  // plot
  auto* plot = app.add_subcommand("plot", "Render ensemble JSON files as an SVG");
  std::vector<std::string> plot_inputs;
  std::string plot_output = "regret.svg";
  icol::SvgOptions plot_svg;
  plot->add_option("inputs", plot_inputs, "Ensemble JSON files")->required();
  plot->add_option("-o,--output", plot_output);
  plot->add_option("--width", plot_svg.width);
  plot->add_option("--height", plot_svg.height);
  plot->add_option("--title", plot_svg.title);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*ingest) {
      std::ifstream in(ingest_in);
      if (!in) throw icol::IoError("cannot open " + ingest_in);
      std::stringstream normalized;
      icol::import_upstream(in, normalized, columns, ingest_in);
      const icol::IngestResult result = icol::ingest_panel(normalized, ingest_in);
      icol::write_panel_csv(result.panel, fs::path(ingest_out), result.event_ids);
      std::cout << "rows " << result.report.rows << ", events " << result.report.events
                << ", experts " << result.report.experts_seen << ", kept "
                << result.panel.num_experts() << ", dropped "
                << result.report.dropped_experts.size() << '\n';
      for (const auto& id : result.report.dropped_experts) std::cout << "  dropped " << id << '\n';
      std::cout << "wrote " << ingest_out << '\n';
    } else if (*simulate) {
      icol::ExperimentConfig config = sim_config.empty()
                                          ? icol::parse_experiment_config("{}")
                                          : icol::load_experiment_config(sim_config);
      if (sim_k) config.simulation.num_experts = *sim_k;
      if (sim_t) config.simulation.horizon = *sim_t;
      if (sim_reps) config.simulation.repetitions = *sim_reps;
      if (sim_seed) config.simulation.seed = *sim_seed;
      if (sim_threads) config.threads = *sim_threads;
      if (sim_samples) config.num_samples = *sim_samples;
      std::vector<icol::AlgorithmSpec> specs;
      if (sim_algos) {
        config.algorithms.clear();
        for (const auto& s : icol::parse_algorithm_list(*sim_algos)) {
          config.algorithms.push_back(s.label());
        }
      }
      specs = config.algorithm_specs();
      icol::MonteCarloOptions options;
      options.threads = config.threads;
      options.run = config.run_options();
      const auto ensembles = icol::run_monte_carlo(config.simulation, specs, options);
      print_summary(ensembles);
      emit(ensembles, sim_out, "Monte Carlo regret");
    } else if (*bench) {
      icol::ExperimentConfig config = bench_config.empty()
                                          ? icol::parse_experiment_config("{}")
                                          : icol::load_experiment_config(bench_config);
      if (bench_group) config.group_size = *bench_group;
      if (bench_groups) config.num_groups = *bench_groups;
      if (bench_reps) config.repetitions = *bench_reps;
      if (bench_seed) config.simulation.seed = *bench_seed;
      if (bench_threads) config.threads = *bench_threads;
      if (bench_samples) config.num_samples = *bench_samples;
      if (bench_algos) {
        config.algorithms.clear();
        for (const auto& s : icol::parse_algorithm_list(*bench_algos)) {
          config.algorithms.push_back(s.label());
        }
      }
      const icol::IngestResult panel = icol::ingest_panel(fs::path(bench_panel));
      const std::size_t group =
          config.group_size == 0 ? panel.panel.num_experts() : config.group_size;
      const auto groups = icol::sample_expert_groups(
          panel.panel, group, config.num_groups, icol::RngStream(config.simulation.seed, 3));
      icol::BenchmarkOptions options;
      options.repetitions = config.repetitions;
      options.seed = config.simulation.seed;
      options.threads = config.threads;
      options.run = config.run_options();
      const auto specs = config.algorithm_specs();
      const auto ensembles = icol::run_benchmark(groups, specs, options);
      print_summary(ensembles);
      emit(ensembles, bench_out, "Benchmark regret");
    } else if (*audit) {
      audit_config.validate();
      std::vector<icol::NamedAudit> results;
      if (audit_contexts.empty()) {
        results = icol::builtin_audits(audit_config);
      } else {
        for (const auto& path : audit_contexts) results.push_back(audit_from_file(path, audit_config));
      }
      std::printf("%-18s %-12s %14s %14s %-16s %12s\n", "name", "verdict", "truthful",
                  "best", "best reports", "gap");
      json table = json::array();
      for (const auto& r : results) {
        const auto& rep = r.report;
        std::printf("%-18s %-12s %14.10f %14.10f %-16s %12.4e\n", r.name.c_str(),
                    std::string(icol::to_string(rep.verdict)).c_str(), rep.truthful_value,
                    rep.best_deviation_value, join_reports(rep.best_deviation_reports).c_str(),
                    rep.gap);
        table.push_back({{"name", r.name},
                         {"description", r.description},
                         {"verdict", icol::to_string(rep.verdict)},
                         {"truthful_value", rep.truthful_value},
                         {"best_deviation_value", rep.best_deviation_value},
                         {"best_deviation_reports", rep.best_deviation_reports},
                         {"gap", rep.gap}});
      }
      if (!audit_json.empty()) {
        std::ofstream out(audit_json);
        if (!out) throw icol::IoError("cannot write " + audit_json);
        out << table.dump(1) << '\n';
      }
    } else if (*plot) {
      std::vector<icol::TraceEnsemble> ensembles;
      for (const auto& path : plot_inputs) ensembles.push_back(icol::read_json_file(path));
      icol::write_svg_file(ensembles, plot_output, plot_svg);
      std::cout << "wrote " << plot_output << '\n';
    }
  } catch (const icol::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return icol::exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
