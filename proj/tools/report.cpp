#include "report.hpp"

#include <cmath>
#include <stdexcept>

#include <fmt/format.h>
#include <json.hpp>

namespace qrouter::cli {

void Table::add(std::vector<Cell> row) {
  if (row.size() != columns.size()) throw std::logic_error("row width does not match table '" + name + "'");
  rows.push_back(std::move(row));
}

Table& Report::table(const std::string& name, std::vector<std::string> columns) {
  for (auto& t : tables) {
    if (t.name == name) return t;
  }
  tables.push_back({name, std::move(columns), {}});
  return tables.back();
}

OutputFormat parse_format(const std::string& s) {
  if (s == "csv") return OutputFormat::csv;
  if (s == "json") return OutputFormat::json;
  throw std::invalid_argument("unknown format '" + s + "' (csv or json)");
}

std::string format_number(double v, bool full_precision) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";  // also folds -0
  return full_precision ? fmt::format("{:.17g}", v) : fmt::format("{:.6g}", v);
}

namespace {

std::string csv_cell(const Cell& c, bool full) {
  return std::visit(
      [full](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::string>) {
          if (v.find_first_of(",\"\n") == std::string::npos) return v;
          std::string q = "\"";
          for (char ch : v) {
            if (ch == '"') q += '"';
            q += ch;
          }
          return q + "\"";
        } else if constexpr (std::is_same_v<T, double>) {
          return format_number(v, full);
        } else if constexpr (std::is_same_v<T, bool>) {
          return v ? "true" : "false";
        } else {
          return std::to_string(v);
        }
      },
      c);
}

nlohmann::ordered_json json_cell(const Cell& c, bool full) {
  return std::visit(
      [full](const auto& v) -> nlohmann::ordered_json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, double>) {
          // JSON has no inf/nan; keep them readable as strings.
          if (!std::isfinite(v)) return format_number(v, full);
          return std::stod(format_number(v, full));
        } else {
          return v;
        }
      },
      c);
}

}  // namespace

std::string render(const Report& report, const RenderOptions& options) {
  const bool full = options.full_precision;
  if (options.format == OutputFormat::json) {
    nlohmann::ordered_json doc = nlohmann::ordered_json::object();
    for (const auto& t : report.tables) {
      auto rows = nlohmann::ordered_json::array();
      for (const auto& r : t.rows) {
        nlohmann::ordered_json obj = nlohmann::ordered_json::object();
        for (std::size_t i = 0; i < r.size(); ++i) obj[t.columns[i]] = json_cell(r[i], full);
        rows.push_back(std::move(obj));
      }
      doc[t.name] = std::move(rows);
    }
    if (!report.notes.empty()) doc["notes"] = report.notes;
    return doc.dump(2) + "\n";
  }
  std::string out;
  for (const auto& n : report.notes) out += "# " + n + "\n";
  const bool headed = report.tables.size() > 1;
  for (std::size_t k = 0; k < report.tables.size(); ++k) {
    const auto& t = report.tables[k];
    if (k > 0) out += "\n";
    if (headed) out += "# " + t.name + "\n";
    for (std::size_t i = 0; i < t.columns.size(); ++i) out += (i ? "," : "") + t.columns[i];
    out += "\n";
    for (const auto& r : t.rows) {
      for (std::size_t i = 0; i < r.size(); ++i) out += (i ? "," : "") + csv_cell(r[i], full);
      out += "\n";
    }
  }
  return out;
}

}  // namespace qrouter::cli
