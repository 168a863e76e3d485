#pragma once

// Result tables, deterministic number formatting and the run manifest.

#include <cstddef>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace floquetlab::cli {

// Empty cells are std::monostate.
using Cell = std::variant<std::monostate, std::int64_t, double, std::string>;

// Shortest representation that round-trips, '.' separator, independent of
// the global locale. Non-finite values print as nan, inf, -inf.
std::string format_number(double v);
std::string format_cell(const Cell& c);

struct Table {
  std::string name;  // file stem, e.g. "bscan"
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add_row(std::vector<Cell> row);
  std::string to_csv() const;
  // {"columns": [...], "rows": [[...], ...]} with the same number text.
  std::string to_json() const;
};

struct Artifact {
  std::string filename;
  std::string content;
};

std::string sha256_hex(const std::string& bytes);

// Writes the artifacts plus manifest.json into `dir` (created if needed).
// Returns the manifest text.
std::string write_run(const std::string& dir, const std::vector<Artifact>& artifacts,
                      const std::string& config_text, double wall_clock_seconds);

}  // namespace floquetlab::cli
