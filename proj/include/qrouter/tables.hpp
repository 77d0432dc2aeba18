#pragma once

// CSV tables: measured routing and fidelity summaries, fringe scans and raw
// coincidence counts. Lines starting with '#' are comments; the first other
// line is the header. Columns are looked up by name.

#include <filesystem>
#include <istream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qrouter/analysis.hpp"

namespace qrouter {

/// Malformed input. The message carries the source name and line number.
class TableError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CsvTable {
 public:
  struct Row {
    int line = 0;
    std::vector<std::string> cells;
  };

  static CsvTable parse(std::istream& in, const std::string& source);
  static CsvTable load(const std::filesystem::path& path);

  const std::string& source() const { return source_; }
  const std::vector<std::string>& header() const { return header_; }
  const std::vector<Row>& rows() const { return rows_; }
  bool has_column(const std::string& name) const { return index_of(name).has_value(); }

  /// Throws TableError naming the missing column.
  std::size_t require_column(const std::string& name) const;
  const std::string& text(const Row& row, const std::string& column) const;
  double number(const Row& row, const std::string& column) const;

 private:
  std::optional<std::size_t> index_of(const std::string& name) const;
  [[noreturn]] void fail(int line, const std::string& what) const;

  std::string source_;
  std::vector<std::string> header_;
  std::vector<Row> rows_;
};

struct RoutingRow {
  std::string signal_state;
  std::string control_setting;
  Estimate p2;
  Estimate p2_corrected;
};

struct FidelityRow {
  std::string signal_state;
  std::string control_setting;
  Estimate f;
  Estimate f_corrected;
};

struct FringeRow {
  double phase_rad = 0.0;
  double counts = 0.0;
  double error = 0.0;
};

enum class CountProjection { none, parallel, orthogonal };

/// One line of a coincidence-count table.
struct CountRow {
  std::string signal_state;
  std::string control_setting;
  CountProjection projection = CountProjection::none;
  CountRecord record;
};

std::vector<RoutingRow> read_routing_table(const CsvTable& t);
std::vector<FidelityRow> read_fidelity_table(const CsvTable& t);
std::vector<FringeRow> read_fringe_table(const CsvTable& t);
/// Columns signal_state, control_setting, cc1, cc2, acc1, acc2, duration_s;
/// optional projection (none | parallel | orthogonal) and regime.
std::vector<CountRow> read_count_table(const CsvTable& t);

/// Pairs OFF/ON rows per state, in first-seen state order.
std::vector<ContrastEntry> contrast_entries(const std::vector<RoutingRow>& rows, bool corrected);

}  // namespace qrouter
