#include "floquetlab/cli/run_config.hpp"

#include <algorithm>
#include <charconv>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "floquetlab/error.hpp"

namespace floquetlab::cli {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  return out;
}

bool valid_key(const std::string& key) {
  return !key.empty() && std::all_of(key.begin(), key.end(), [](unsigned char c) {
    return std::isalnum(c) || c == '_' || c == '.';
  });
}

double to_double(const std::string& key, const std::string& text) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v))
    throw ConfigError("config: '" + key + "' expects a finite number, got '" + text + "'");
  return v;
}

long long to_integer(const std::string& what, const std::string& text) {
  long long v = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end)
    throw ConfigError("config: '" + what + "' expects an integer, got '" + text + "'");
  return v;
}

std::size_t to_size(const std::string& what, const std::string& text) {
  const long long v = to_integer(what, text);
  if (v < 0) throw ConfigError("config: '" + what + "' must be non-negative");
  return static_cast<std::size_t>(v);
}

}  // namespace

std::string RunConfig::to_text() const {
  std::ostringstream os;
  os << "subcommand = " << subcommand << '\n';
  os << "seed = " << seed << '\n';
  os << "format = " << format << '\n';
  os << "out = " << out_dir << '\n';
  for (const auto& [k, v] : params) os << k << " = " << v << '\n';
  return os.str();
}

void RunConfig::set(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("config: expected key = value, got '" + assignment + "'");
  const std::string key = trim(assignment.substr(0, eq));
  const std::string value = trim(assignment.substr(eq + 1));
  if (!valid_key(key)) throw ConfigError("config: invalid key '" + key + "'");
  if (key == "subcommand") {
    subcommand = value;
  } else if (key == "seed") {
    const long long s = to_integer("seed", value);
    if (s < 0) throw ConfigError("config: seed must be non-negative");
    seed = static_cast<std::uint64_t>(s);
  } else if (key == "format") {
    if (value != "csv" && value != "json") throw ConfigError("config: format must be csv or json");
    format = value;
  } else if (key == "out") {
    if (value.empty()) throw ConfigError("config: empty output directory");
    out_dir = value;
  } else {
    if (value.empty()) throw ConfigError("config: empty value for '" + key + "'");
    params[key] = value;
  }
}

RunConfig RunConfig::parse(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    try {
      cfg.set(line);
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return cfg;
}

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::string RunConfig::get_string(const std::string& key, const std::string& fallback) const {
  const auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

double RunConfig::get_double(const std::string& key, double fallback) const {
  const auto it = params.find(key);
  return it == params.end() ? fallback : to_double(key, it->second);
}

std::size_t RunConfig::get_size(const std::string& key, std::size_t fallback) const {
  const auto it = params.find(key);
  return it == params.end() ? fallback : to_size(key, it->second);
}

std::vector<double> RunConfig::get_doubles(const std::string& key,
                                           const std::vector<double>& fallback) const {
  const auto it = params.find(key);
  if (it == params.end()) return fallback;
  std::vector<double> out;
  for (const auto& item : split(it->second, ',')) out.push_back(to_double(key, item));
  return out;
}

std::vector<std::size_t> RunConfig::get_ladder(const std::string& key,
                                               const std::string& fallback) const {
  try {
    return parse_ladder(get_string(key, fallback));
  } catch (const ConfigError& e) {
    throw ConfigError("config: '" + key + "': " + e.what());
  }
}

std::vector<std::size_t> parse_ladder(const std::string& text) {
  std::vector<std::size_t> out;
  const auto parts = split(text, ':');
  if (parts.size() == 3 && parts[0] == "pow2") {
    const std::size_t lo = to_size("pow2", parts[1]), hi = to_size("pow2", parts[2]);
    if (hi > 40 || lo > hi) throw ConfigError("pow2 ladder needs lo <= hi <= 40");
    for (std::size_t e = lo; e <= hi; ++e) out.push_back(std::size_t{1} << e);
  } else if (parts.size() == 4 && parts[0] == "decades") {
    const std::size_t lo = to_size("decades", parts[1]), hi = to_size("decades", parts[2]);
    const std::size_t per = to_size("decades", parts[3]);
    if (hi > 12 || lo > hi || per < 1) throw ConfigError("decades ladder needs lo <= hi <= 12 and k >= 1");
    for (std::size_t i = 0; i <= (hi - lo) * per; ++i) {
      const double e = static_cast<double>(lo) + static_cast<double>(i) / static_cast<double>(per);
      const auto n = static_cast<std::size_t>(std::llround(std::pow(10.0, e)));
      if (out.empty() || n > out.back()) out.push_back(n);
    }
  } else if (parts.size() == 1) {
    for (const auto& item : split(text, ',')) {
      if (item.empty()) continue;
      out.push_back(to_size("ladder", item));
    }
  } else {
    throw ConfigError("unrecognised ladder '" + text + "'");
  }
  if (out.empty()) throw ConfigError("empty N ladder");
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i] < 1) throw ConfigError("ladder entries must be >= 1");
    if (i > 0 && out[i] <= out[i - 1]) throw ConfigError("ladder must be strictly increasing");
  }
  return out;
}

}  // namespace floquetlab::cli
