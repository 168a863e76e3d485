#pragma once

// Flat key = value run configuration shared by every subcommand.
//
//   # comment
//   subcommand = bscan
//   gamma = 0.75
//   ladder = pow2:10:16

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace floquetlab::cli {

struct RunConfig {
  std::string subcommand;
  std::map<std::string, std::string> params;
  std::uint64_t seed = 0;
  std::string format = "csv";  // csv | json
  std::string out_dir = ".";

  // Canonical text: reserved keys first, then params in key order. Threads
  // are not part of the config since they never change the output.
  std::string to_text() const;
  static RunConfig parse(const std::string& text);
  static RunConfig load(const std::string& path);

  // "key=value" from the command line; replaces any file value.
  void set(const std::string& assignment);

  bool has(const std::string& key) const { return params.count(key) != 0; }
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  std::size_t get_size(const std::string& key, std::size_t fallback) const;
  std::vector<double> get_doubles(const std::string& key, const std::vector<double>& fallback) const;

  // Integer ladders: "a,b,c", "pow2:lo:hi" (2^lo..2^hi) or
  // "decades:lo:hi:k" (k points per decade from 10^lo to 10^hi, rounded).
  std::vector<std::size_t> get_ladder(const std::string& key, const std::string& fallback) const;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

std::vector<std::size_t> parse_ladder(const std::string& text);

}  // namespace floquetlab::cli
