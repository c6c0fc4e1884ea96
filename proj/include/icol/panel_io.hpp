#pragma once

// Normalized forecast-panel CSV (event_id,expert_id,report,outcome) and a
// column-mapping importer for other layouts.

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "icol/core.hpp"

namespace icol {

inline constexpr const char* kPanelHeader = "event_id,expert_id,report,outcome";

struct IngestReport {
  std::size_t rows = 0;
  std::size_t events = 0;
  std::size_t experts_seen = 0;
  std::vector<std::string> dropped_experts;
};

struct IngestResult {
  ForecastPanel panel;
  IngestReport report;
  // One per panel round.
  std::vector<std::string> event_ids;
};

// Events keep their order of first appearance; experts missing any event are
// dropped. `source` names the input in error messages.
IngestResult ingest_panel(std::istream& in, const std::string& source = "<stream>");
IngestResult ingest_panel(const std::filesystem::path& path);

void write_panel_csv(const ForecastPanel& panel, std::ostream& out,
                     const std::vector<std::string>& event_ids = {});
void write_panel_csv(const ForecastPanel& panel, const std::filesystem::path& path,
                     const std::vector<std::string>& event_ids = {});

// Which upstream columns hold the normalized fields.
struct ColumnMap {
  std::string event_id = "event_id";
  std::string expert_id = "expert_id";
  std::string report = "report";
  std::string outcome = "outcome";
  // Reports given in percent (0-100).
  bool percent_reports = false;
  // Reports are the probability of outcome 0 and are flipped.
  bool complement_reports = false;
};

// Rewrites an arbitrary header-first CSV into the normalized schema. Returns
// the number of rows written.
std::size_t import_upstream(std::istream& in, std::ostream& out, const ColumnMap& columns,
                            const std::string& source = "<stream>");

// Splits one CSV record; double-quoted fields may contain commas and "".
std::vector<std::string> split_csv_line(const std::string& line);

}  // namespace icol
