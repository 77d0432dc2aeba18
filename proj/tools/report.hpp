#pragma once

// Named result tables rendered as CSV or JSON.

#include <cstdint>
#include <deque>
#include <string>
#include <variant>
#include <vector>

namespace qrouter::cli {

using Cell = std::variant<std::string, double, std::int64_t, bool>;

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add(std::vector<Cell> row);
};

struct Report {
  std::deque<Table> tables;
  /// Free-form lines: leading "# " comments in CSV, a "notes" array in JSON.
  std::vector<std::string> notes;

  /// Existing table of that name, or a new one with these columns.
  Table& table(const std::string& name, std::vector<std::string> columns);
};

enum class OutputFormat { csv, json };

struct RenderOptions {
  OutputFormat format = OutputFormat::json;
  /// Otherwise numbers carry 6 significant digits.
  bool full_precision = false;
};

OutputFormat parse_format(const std::string& s);

/// CSV: one block per table, each preceded by "# <name>" when there is more
/// than one. JSON: an object mapping table names to arrays of row objects.
std::string render(const Report& report, const RenderOptions& options);

std::string format_number(double v, bool full_precision);

}  // namespace qrouter::cli
