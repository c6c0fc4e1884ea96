#pragma once

// Ensemble serialization: long-format CSV, JSON (round-trips exactly) and a
// self-contained SVG regret plot.

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>

#include "icol/experiment.hpp"

namespace icol {

enum class OutputFormat { kCsv, kJson, kSvg };

OutputFormat parse_output_format(std::string_view name);

// Header "algorithm,t,statistic,value"; one row per (ensemble, round,
// statistic) with statistics mean, p20, p80 and t starting at 1.
void write_csv(std::span<const TraceEnsemble> ensembles, std::ostream& out);

// {metadata, rounds: [{t, mean, p20, p80, per_trace?}]}
std::string to_json(const TraceEnsemble& ensemble, bool include_per_trace = false);
TraceEnsemble from_json(const std::string& text);

struct SvgOptions {
  int width = 800;
  int height = 500;
  std::string title = "Regret";
};

// Mean regret per ensemble with a shaded p20-p80 band and a legend.
std::string render_svg(std::span<const TraceEnsemble> ensembles, const SvgOptions& options = {});

// File helpers. Each refuses an empty ensemble (nothing is written) and
// reports I/O failures with the path.
void write_csv_file(std::span<const TraceEnsemble> ensembles, const std::filesystem::path& path);
void write_json_file(const TraceEnsemble& ensemble, const std::filesystem::path& path,
                     bool include_per_trace = false);
TraceEnsemble read_json_file(const std::filesystem::path& path);
void write_svg_file(std::span<const TraceEnsemble> ensembles, const std::filesystem::path& path,
                    const SvgOptions& options = {});

// File-system friendly form of an ensemble label ("WSU:select-one" ->
// "wsu_select-one").
std::string file_stem(const std::string& label);

}  // namespace icol
