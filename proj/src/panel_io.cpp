#include "icol/panel_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <unordered_map>

#include "icol/errors.hpp"

namespace icol {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string where(const std::string& source, std::size_t line) {
  return source + ":" + std::to_string(line) + ": ";
}

std::optional<double> parse_double(const std::string& text) {
  const std::string s = trim(text);
  if (s.empty()) return std::nullopt;
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string quote_if_needed(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          current += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        current += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(current));
      current.clear();
    } else if (c != '\r') {
      current += c;
    }
  }
  fields.push_back(std::move(current));
  return fields;
}

IngestResult ingest_panel(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw ParseError(where(source, 1) + "empty input, missing header");
  ++line_no;
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  {
    const auto header = split_csv_line(line);
    const std::vector<std::string> expected = {"event_id", "expert_id", "report", "outcome"};
    bool ok = header.size() == expected.size();
    for (std::size_t c = 0; ok && c < header.size(); ++c) ok = trim(header[c]) == expected[c];
    if (!ok) {
      throw ParseError(where(source, 1) + "header must be '" + kPanelHeader + "', got '" +
                       line + "'");
    }
  }

  std::vector<std::string> event_ids;
  std::unordered_map<std::string, std::size_t> event_index;
  std::vector<Outcome> outcomes;
  std::vector<std::string> expert_ids;
  std::unordered_map<std::string, std::size_t> expert_index;
  // (event, expert) -> report
  std::map<std::pair<std::size_t, std::size_t>, double> cells;
  IngestReport report;

  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 4) {
      throw ParseError(where(source, line_no) + "expected 4 fields, found " +
                       std::to_string(fields.size()));
    }
    const std::string event = trim(fields[0]);
    const std::string expert = trim(fields[1]);
    if (event.empty() || expert.empty()) {
      throw ParseError(where(source, line_no) + "event_id and expert_id must be non-empty");
    }
    const auto value = parse_double(fields[2]);
    if (!value || *value < 0.0 || *value > 1.0) {
      throw ParseError(where(source, line_no) + "report '" + trim(fields[2]) +
                       "' is not a number in [0,1]");
    }
    const std::string outcome_text = trim(fields[3]);
    if (outcome_text != "0" && outcome_text != "1") {
      throw ParseError(where(source, line_no) + "outcome '" + outcome_text + "' is not 0 or 1");
    }
    const Outcome outcome = outcome_text == "1" ? Outcome::kOne : Outcome::kZero;

    auto [ev_it, new_event] = event_index.emplace(event, event_ids.size());
    if (new_event) {
      event_ids.push_back(event);
      outcomes.push_back(outcome);
    } else if (outcomes[ev_it->second] != outcome) {
      throw IntegrityError(where(source, line_no) + "event '" + event +
                           "' has conflicting outcomes");
    }
    auto [ex_it, new_expert] = expert_index.emplace(expert, expert_ids.size());
    if (new_expert) expert_ids.push_back(expert);
    if (!cells.emplace(std::pair{ev_it->second, ex_it->second}, *value).second) {
      throw IntegrityError(where(source, line_no) + "duplicate report by '" + expert +
                           "' for event '" + event + "'");
    }
    ++report.rows;
  }
  report.events = event_ids.size();
  report.experts_seen = expert_ids.size();

  std::vector<std::size_t> kept;
  for (std::size_t e = 0; e < expert_ids.size(); ++e) {
    bool complete = true;
    for (std::size_t t = 0; complete && t < event_ids.size(); ++t) {
      complete = cells.count({t, e}) > 0;
    }
    if (complete) {
      kept.push_back(e);
    } else {
      report.dropped_experts.push_back(expert_ids[e]);
    }
  }
  if (kept.empty() || event_ids.empty()) {
    throw EmptyPanelError(source + ": no expert reported on every event (" +
                          std::to_string(expert_ids.size()) + " experts, " +
                          std::to_string(event_ids.size()) + " events)");
  }

  std::vector<double> reports;
  reports.reserve(kept.size() * event_ids.size());
  for (std::size_t t = 0; t < event_ids.size(); ++t) {
    for (std::size_t e : kept) reports.push_back(cells.at({t, e}));
  }
  std::vector<std::string> ids;
  for (std::size_t e : kept) ids.push_back(expert_ids[e]);
  return {ForecastPanel(kept.size(), std::move(reports), std::move(outcomes), std::move(ids)),
          std::move(report), std::move(event_ids)};
}

IngestResult ingest_panel(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open panel file " + path.string());
  return ingest_panel(in, path.string());
}

void write_panel_csv(const ForecastPanel& panel, std::ostream& out,
                     const std::vector<std::string>& event_ids) {
  if (!event_ids.empty() && event_ids.size() != panel.horizon()) {
    throw DimensionError("event id count does not match the panel horizon");
  }
  out << kPanelHeader << '\n';
  for (std::size_t t = 0; t < panel.horizon(); ++t) {
    const std::string event = event_ids.empty() ? "event" + std::to_string(t) : event_ids[t];
    const int r = panel.outcome(t) == Outcome::kOne ? 1 : 0;
    for (std::size_t i = 0; i < panel.num_experts(); ++i) {
      out << quote_if_needed(event) << ',' << quote_if_needed(panel.expert_ids()[i]) << ','
          << format_double(panel.report(t, i)) << ',' << r << '\n';
    }
  }
}

void write_panel_csv(const ForecastPanel& panel, const std::filesystem::path& path,
                     const std::vector<std::string>& event_ids) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write panel file " + path.string());
  write_panel_csv(panel, out, event_ids);
  if (!out) throw IoError("write failed for " + path.string());
}

std::size_t import_upstream(std::istream& in, std::ostream& out, const ColumnMap& columns,
                            const std::string& source) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError(where(source, 1) + "empty input, missing header");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  const auto header = split_csv_line(line);
  auto column = [&](const std::string& name) {
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (trim(header[c]) == name) return c;
    }
    throw ParseError(where(source, 1) + "no column named '" + name + "'");
  };
  const std::size_t event_col = column(columns.event_id);
  const std::size_t expert_col = column(columns.expert_id);
  const std::size_t report_col = column(columns.report);
  const std::size_t outcome_col = column(columns.outcome);

  out << kPanelHeader << '\n';
  std::size_t line_no = 1;
  std::size_t written = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      throw ParseError(where(source, line_no) + "expected " + std::to_string(header.size()) +
                       " fields, found " + std::to_string(fields.size()));
    }
    auto value = parse_double(fields[report_col]);
    if (!value) {
      throw ParseError(where(source, line_no) + "report '" + fields[report_col] +
                       "' is not a number");
    }
    if (columns.percent_reports) *value /= 100.0;
    if (columns.complement_reports) *value = 1.0 - *value;
    if (*value < 0.0 || *value > 1.0) {
      throw ParseError(where(source, line_no) + "report maps outside [0,1]");
    }
    const auto outcome = parse_double(fields[outcome_col]);
    if (!outcome || (*outcome != 0.0 && *outcome != 1.0)) {
      throw ParseError(where(source, line_no) + "outcome '" + fields[outcome_col] +
                       "' is not 0 or 1");
    }
    out << quote_if_needed(trim(fields[event_col])) << ','
        << quote_if_needed(trim(fields[expert_col])) << ',' << format_double(*value) << ','
        << (*outcome == 1.0 ? 1 : 0) << '\n';
    ++written;
  }
  return written;
}

}  // namespace icol
