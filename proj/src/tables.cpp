#include "qrouter/tables.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace qrouter {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

CsvTable CsvTable::parse(std::istream& in, const std::string& source) {
  CsvTable t;
  t.source_ = source;
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    const std::string s = trim(line);
    if (s.empty() || s.front() == '#') continue;
    auto cells = split(s);
    if (t.header_.empty()) {
      t.header_ = std::move(cells);
      for (std::size_t i = 0; i < t.header_.size(); ++i) {
        for (std::size_t j = 0; j < i; ++j) {
          if (t.header_[i] == t.header_[j]) t.fail(n, "duplicate column '" + t.header_[i] + "'");
        }
      }
      continue;
    }
    if (cells.size() != t.header_.size()) {
      t.fail(n, "expected " + std::to_string(t.header_.size()) + " fields, found " + std::to_string(cells.size()));
    }
    t.rows_.push_back({n, std::move(cells)});
  }
  if (t.header_.empty()) t.fail(n, "no header line");
  return t;
}

CsvTable CsvTable::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw TableError(path.string() + ": cannot open");
  return parse(in, path.string());
}

std::optional<std::size_t> CsvTable::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < header_.size(); ++i) {
    if (header_[i] == name) return i;
  }
  return std::nullopt;
}

void CsvTable::fail(int line, const std::string& what) const {
  throw TableError(source_ + ":" + std::to_string(line) + ": " + what);
}

std::size_t CsvTable::require_column(const std::string& name) const {
  auto i = index_of(name);
  if (!i) throw TableError(source_ + ": missing column '" + name + "'");
  return *i;
}

const std::string& CsvTable::text(const Row& row, const std::string& column) const {
  const std::string& s = row.cells[require_column(column)];
  if (s.empty()) fail(row.line, "empty field '" + column + "'");
  return s;
}

double CsvTable::number(const Row& row, const std::string& column) const {
  const std::string& s = text(row, column);
  double v = 0.0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size() || !std::isfinite(v)) {
    fail(row.line, "field '" + column + "' is not a number: '" + s + "'");
  }
  return v;
}

std::vector<RoutingRow> read_routing_table(const CsvTable& t) {
  std::vector<RoutingRow> out;
  for (const auto& r : t.rows()) {
    out.push_back({t.text(r, "signal_state"), t.text(r, "control_setting"),
                   {t.number(r, "p2"), t.number(r, "sigma_p2")},
                   {t.number(r, "p2_corrected"), t.number(r, "sigma_p2_corrected")}});
  }
  return out;
}

std::vector<FidelityRow> read_fidelity_table(const CsvTable& t) {
  std::vector<FidelityRow> out;
  for (const auto& r : t.rows()) {
    out.push_back({t.text(r, "signal_state"), t.text(r, "control_setting"),
                   {t.number(r, "f"), t.number(r, "sigma_f")},
                   {t.number(r, "f_corrected"), t.number(r, "sigma_f_corrected")}});
  }
  return out;
}

std::vector<FringeRow> read_fringe_table(const CsvTable& t) {
  std::vector<FringeRow> out;
  for (const auto& r : t.rows()) {
    out.push_back({t.number(r, "phase_rad"), t.number(r, "rel_counts"), t.number(r, "error")});
  }
  return out;
}

std::vector<CountRow> read_count_table(const CsvTable& t) {
  std::vector<CountRow> out;
  auto count = [&](const CsvTable::Row& r, const std::string& col) {
    const double v = t.number(r, col);
    if (v < 0.0 || v != std::floor(v)) {
      throw TableError(t.source() + ":" + std::to_string(r.line) + ": '" + col + "' must be a non-negative integer");
    }
    return static_cast<std::uint64_t>(v);
  };
  auto nonneg = [&](const CsvTable::Row& r, const std::string& col) {
    const double v = t.number(r, col);
    if (v < 0.0) throw TableError(t.source() + ":" + std::to_string(r.line) + ": '" + col + "' must be >= 0");
    return v;
  };
  for (const auto& r : t.rows()) {
    CountRow row;
    row.signal_state = t.text(r, "signal_state");
    row.control_setting = t.text(r, "control_setting");
    if (t.has_column("projection")) {
      const std::string& p = t.text(r, "projection");
      if (p == "none") {
        row.projection = CountProjection::none;
      } else if (p == "parallel") {
        row.projection = CountProjection::parallel;
      } else if (p == "orthogonal") {
        row.projection = CountProjection::orthogonal;
      } else {
        throw TableError(t.source() + ":" + std::to_string(r.line) + ": unknown projection '" + p + "'");
      }
    }
    if (t.has_column("regime")) {
      try {
        row.record.regime = parse_count_regime(t.text(r, "regime"));
      } catch (const std::invalid_argument& e) {
        throw TableError(t.source() + ":" + std::to_string(r.line) + ": " + e.what());
      }
    }
    row.record.cc1 = count(r, "cc1");
    row.record.cc2 = count(r, "cc2");
    row.record.accidental_cc1 = nonneg(r, "acc1");
    row.record.accidental_cc2 = nonneg(r, "acc2");
    row.record.duration_s = nonneg(r, "duration_s");
    out.push_back(std::move(row));
  }
  return out;
}

std::vector<ContrastEntry> contrast_entries(const std::vector<RoutingRow>& rows, bool corrected) {
  std::vector<std::string> order;
  std::map<std::string, std::pair<std::optional<Estimate>, std::optional<Estimate>>> by_state;
  for (const auto& r : rows) {
    auto [it, inserted] = by_state.try_emplace(r.signal_state);
    if (inserted) order.push_back(r.signal_state);
    const Estimate e = corrected ? r.p2_corrected : r.p2;
    if (r.control_setting == "OFF") {
      it->second.first = e;
    } else if (r.control_setting == "ON") {
      it->second.second = e;
    }
  }
  std::vector<ContrastEntry> out;
  for (const auto& s : order) {
    const auto& [off, on] = by_state[s];
    if (!off || !on) throw TableError("state '" + s + "' needs both OFF and ON rows for a contrast");
    out.push_back({s, *off, *on});
  }
  return out;
}

}  // namespace qrouter
