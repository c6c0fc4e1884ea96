#include "icol/output.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "icol/errors.hpp"

namespace icol {

namespace {

using nlohmann::json;

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string coord(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

void require_rounds(const TraceEnsemble& e) {
  if (e.empty()) {
    throw ParameterError("ensemble '" + e.metadata.label + "' is empty; nothing to write");
  }
  if (e.p20.size() != e.rounds() || e.p80.size() != e.rounds()) {
    throw DimensionError("ensemble '" + e.metadata.label + "' has ragged statistics");
  }
}

void require_nonempty(std::span<const TraceEnsemble> ensembles) {
  if (ensembles.empty()) throw ParameterError("no ensembles to write");
  for (const auto& e : ensembles) require_rounds(e);
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError("write failed for " + path.string());
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

double nice_step(double range, int target_ticks) {
  const double raw = range / target_ticks;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double f = raw / mag;
  const double nice = f < 1.5 ? 1.0 : f < 3.0 ? 2.0 : f < 7.0 ? 5.0 : 10.0;
  return nice * mag;
}

std::string tick_label(double v, double step) {
  char buf[32];
  const int decimals = step >= 1.0 ? 0 : static_cast<int>(std::ceil(-std::log10(step)));
  std::snprintf(buf, sizeof buf, "%.*f", decimals, std::abs(v) < step * 1e-9 ? 0.0 : v);
  return buf;
}

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

}  // namespace

OutputFormat parse_output_format(std::string_view name) {
  std::string n(name);
  std::transform(n.begin(), n.end(), n.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (n == "csv") return OutputFormat::kCsv;
  if (n == "json") return OutputFormat::kJson;
  if (n == "svg") return OutputFormat::kSvg;
  throw ParameterError("unknown output format '" + std::string(name) + "'");
}

void write_csv(std::span<const TraceEnsemble> ensembles, std::ostream& out) {
  require_nonempty(ensembles);
  out << "algorithm,t,statistic,value\n";
  for (const auto& e : ensembles) {
    const std::string& label = e.metadata.label;
    for (std::size_t t = 0; t < e.rounds(); ++t) {
      out << label << ',' << t + 1 << ",mean," << num(e.mean[t]) << '\n';
      out << label << ',' << t + 1 << ",p20," << num(e.p20[t]) << '\n';
      out << label << ',' << t + 1 << ",p80," << num(e.p80[t]) << '\n';
    }
  }
}

std::string to_json(const TraceEnsemble& e, bool include_per_trace) {
  require_rounds(e);
  const auto& m = e.metadata;
  json meta = {{"label", m.label},
               {"algorithm", m.algorithm},
               {"mode", m.mode},
               {"params", m.params},
               {"seed", m.seed},
               {"num_experts", m.num_experts},
               {"horizon", m.horizon},
               {"num_traces", m.num_traces},
               {"invalid_rounds", m.invalid_rounds},
               {"notes", m.notes}};
  json rounds = json::array();
  for (std::size_t t = 0; t < e.rounds(); ++t) {
    json row = {{"t", t + 1}, {"mean", e.mean[t]}, {"p20", e.p20[t]}, {"p80", e.p80[t]}};
    if (include_per_trace) {
      json values = json::array();
      for (const auto& trace : e.per_trace) values.push_back(trace.at(t));
      row["per_trace"] = std::move(values);
    }
    rounds.push_back(std::move(row));
  }
  return json{{"metadata", std::move(meta)}, {"rounds", std::move(rounds)}}.dump(1) + "\n";
}

TraceEnsemble from_json(const std::string& text) {
  TraceEnsemble e;
  try {
    const json doc = json::parse(text);
    const json& meta = doc.at("metadata");
    auto& m = e.metadata;
    m.label = meta.at("label").get<std::string>();
    m.algorithm = meta.at("algorithm").get<std::string>();
    m.mode = meta.at("mode").get<std::string>();
    m.params = meta.at("params").get<std::map<std::string, double>>();
    m.seed = meta.at("seed").get<std::uint64_t>();
    m.num_experts = meta.at("num_experts").get<std::size_t>();
    m.horizon = meta.at("horizon").get<std::size_t>();
    m.num_traces = meta.at("num_traces").get<std::size_t>();
    m.invalid_rounds = meta.value("invalid_rounds", std::size_t{0});
    m.notes = meta.value("notes", std::vector<std::string>{});
    const json& rounds = doc.at("rounds");
    for (std::size_t t = 0; t < rounds.size(); ++t) {
      const json& row = rounds[t];
      if (row.at("t").get<std::size_t>() != t + 1) {
        throw ParseError("ensemble JSON rounds are not consecutive from t=1");
      }
      e.mean.push_back(row.at("mean").get<double>());
      e.p20.push_back(row.at("p20").get<double>());
      e.p80.push_back(row.at("p80").get<double>());
      if (row.contains("per_trace")) {
        const auto values = row["per_trace"].get<std::vector<double>>();
        if (t == 0) e.per_trace.assign(values.size(), {});
        if (values.size() != e.per_trace.size()) {
          throw ParseError("ensemble JSON per_trace width changes at t=" + std::to_string(t + 1));
        }
        for (std::size_t k = 0; k < values.size(); ++k) e.per_trace[k].push_back(values[k]);
      }
    }
  } catch (const json::exception& ex) {
    throw ParseError(std::string("malformed ensemble JSON: ") + ex.what());
  }
  return e;
}

std::string render_svg(std::span<const TraceEnsemble> ensembles, const SvgOptions& options) {
  require_nonempty(ensembles);
  if (options.width < 200 || options.height < 150) {
    throw ParameterError("SVG must be at least 200x150");
  }
  const double w = options.width;
  const double h = options.height;
  const double left = 70, right = 20, top = 40, bottom = 50;
  const double pw = w - left - right;
  const double ph = h - top - bottom;

  std::size_t t_max = 1;
  double y_lo = 0.0, y_hi = 0.0;
  for (const auto& e : ensembles) {
    t_max = std::max(t_max, e.rounds());
    for (std::size_t t = 0; t < e.rounds(); ++t) {
      y_lo = std::min({y_lo, e.p20[t], e.mean[t]});
      y_hi = std::max({y_hi, e.p80[t], e.mean[t]});
    }
  }
  if (y_hi - y_lo < 1e-12) {
    y_lo -= 1.0;
    y_hi += 1.0;
  }
  const double y_step = nice_step(y_hi - y_lo, 6);
  y_lo = std::floor(y_lo / y_step) * y_step;
  y_hi = std::ceil(y_hi / y_step) * y_step;
  const double x_step = t_max <= 1 ? 1.0 : std::max(1.0, nice_step(static_cast<double>(t_max), 8));

  auto px = [&](double t) {
    return left + (t_max <= 1 ? 0.5 * pw : (t - 1.0) / static_cast<double>(t_max - 1) * pw);
  };
  auto py = [&](double v) { return top + (y_hi - v) / (y_hi - y_lo) * ph; };

  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << options.width << "\" height=\""
    << options.height << "\" viewBox=\"0 0 " << options.width << ' ' << options.height
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<text x=\"" << coord(w / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">"
    << xml_escape(options.title) << "</text>\n";

  s << "<g stroke=\"#dddddd\" stroke-width=\"1\">\n";
  for (double v = y_lo; v <= y_hi + y_step * 1e-9; v += y_step) {
    s << "<line x1=\"" << coord(left) << "\" y1=\"" << coord(py(v)) << "\" x2=\""
      << coord(left + pw) << "\" y2=\"" << coord(py(v)) << "\"/>\n";
  }
  s << "</g>\n<g fill=\"#333333\">\n";
  for (double v = y_lo; v <= y_hi + y_step * 1e-9; v += y_step) {
    s << "<text x=\"" << coord(left - 6) << "\" y=\"" << coord(py(v) + 4)
      << "\" text-anchor=\"end\">" << tick_label(v, y_step) << "</text>\n";
  }
  for (double t = x_step; t <= static_cast<double>(t_max) + 1e-9; t += x_step) {
    s << "<text x=\"" << coord(px(t)) << "\" y=\"" << coord(top + ph + 18)
      << "\" text-anchor=\"middle\">" << tick_label(t, x_step) << "</text>\n";
  }
  s << "</g>\n";
  s << "<rect x=\"" << coord(left) << "\" y=\"" << coord(top) << "\" width=\"" << coord(pw)
    << "\" height=\"" << coord(ph) << "\" fill=\"none\" stroke=\"#333333\"/>\n";
  s << "<text x=\"" << coord(left + pw / 2) << "\" y=\"" << coord(h - 10)
    << "\" text-anchor=\"middle\">round</text>\n";
  s << "<text x=\"16\" y=\"" << coord(top + ph / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
    << coord(top + ph / 2) << ")\">regret</text>\n";

  for (std::size_t k = 0; k < ensembles.size(); ++k) {
    const auto& e = ensembles[k];
    const char* color = kPalette[k % std::size(kPalette)];
    s << "<polygon fill=\"" << color << "\" fill-opacity=\"0.18\" stroke=\"none\" points=\"";
    for (std::size_t t = 0; t < e.rounds(); ++t) {
      s << coord(px(static_cast<double>(t + 1))) << ',' << coord(py(e.p80[t])) << ' ';
    }
    for (std::size_t t = e.rounds(); t-- > 0;) {
      s << coord(px(static_cast<double>(t + 1))) << ',' << coord(py(e.p20[t])) << ' ';
    }
    s << "\"/>\n";
    s << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t t = 0; t < e.rounds(); ++t) {
      s << coord(px(static_cast<double>(t + 1))) << ',' << coord(py(e.mean[t]))
        << (t + 1 < e.rounds() ? " " : "");
    }
    s << "\"/>\n";
  }

  const double lx = left + 12;
  double ly = top + 14;
  for (std::size_t k = 0; k < ensembles.size(); ++k) {
    const char* color = kPalette[k % std::size(kPalette)];
    s << "<rect x=\"" << coord(lx) << "\" y=\"" << coord(ly - 9) << "\" width=\"14\" height=\"10\" fill=\""
      << color << "\" fill-opacity=\"0.5\" stroke=\"" << color << "\"/>\n";
    s << "<text x=\"" << coord(lx + 20) << "\" y=\"" << coord(ly) << "\">"
      << xml_escape(ensembles[k].metadata.label) << "</text>\n";
    ly += 16;
  }
  s << "</svg>\n";
  return s.str();
}

void write_csv_file(std::span<const TraceEnsemble> ensembles, const std::filesystem::path& path) {
  require_nonempty(ensembles);
  std::ofstream out = open_out(path);
  write_csv(ensembles, out);
  finish(out, path);
}

void write_json_file(const TraceEnsemble& ensemble, const std::filesystem::path& path,
                     bool include_per_trace) {
  const std::string text = to_json(ensemble, include_per_trace);
  std::ofstream out = open_out(path);
  out << text;
  finish(out, path);
}

TraceEnsemble read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return from_json(buf.str());
  } catch (const ParseError& ex) {
    throw ParseError(path.string() + ": " + ex.what());
  }
}

void write_svg_file(std::span<const TraceEnsemble> ensembles, const std::filesystem::path& path,
                    const SvgOptions& options) {
  const std::string text = render_svg(ensembles, options);
  std::ofstream out = open_out(path);
  out << text;
  finish(out, path);
}

std::string file_stem(const std::string& label) {
  std::string out;
  for (char c : label) {
    const auto u = static_cast<unsigned char>(c);
    out += std::isalnum(u) || c == '-' ? static_cast<char>(std::tolower(u)) : '_';
  }
  return out;
}

}  // namespace icol
