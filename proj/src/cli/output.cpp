#include "floquetlab/cli/output.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include "floquetlab/error.hpp"

#ifndef FLOQUETLAB_VERSION
#define FLOQUETLAB_VERSION "unknown"
#endif

namespace floquetlab::cli {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc()) throw NumericError("format_number: conversion failed");
  return std::string(buf.data(), ptr);
}

std::string format_cell(const Cell& c) {
  struct Visitor {
    std::string operator()(std::monostate) const { return {}; }
    std::string operator()(std::int64_t v) const { return std::to_string(v); }
    std::string operator()(double v) const { return format_number(v); }
    std::string operator()(const std::string& s) const { return s; }
  };
  return std::visit(Visitor{}, c);
}

void Table::add_row(std::vector<Cell> row) {
  if (row.size() != columns.size())
    throw ContractError("table " + name + ": row width differs from header");
  rows.push_back(std::move(row));
}

std::string Table::to_csv() const {
  std::string out;
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (i) out += ',';
    out += columns[i];
  }
  out += '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      const std::string text = format_cell(row[i]);
      if (text.find_first_of(",\"\n") != std::string::npos) {
        out += '"';
        for (char ch : text) {
          if (ch == '"') out += '"';
          out += ch;
        }
        out += '"';
      } else {
        out += text;
      }
    }
    out += '\n';
  }
  return out;
}

std::string Table::to_json() const {
  std::string out = "{\"columns\":[";
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (i) out += ',';
    out += nlohmann::json(columns[i]).dump();
  }
  out += "],\"rows\":[";
  for (std::size_t r = 0; r < rows.size(); ++r) {
    out += r ? ",\n[" : "\n[";
    for (std::size_t i = 0; i < rows[r].size(); ++i) {
      if (i) out += ',';
      const Cell& c = rows[r][i];
      if (std::holds_alternative<std::monostate>(c)) {
        out += "null";
      } else if (const auto* s = std::get_if<std::string>(&c)) {
        out += nlohmann::json(*s).dump();
      } else if (const auto* d = std::get_if<double>(&c); d && !std::isfinite(*d)) {
        out += "null";
      } else {
        out += format_cell(c);
      }
    }
    out += ']';
  }
  out += "]}\n";
  return out;
}

std::string sha256_hex(const std::string& bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md.data(), &len, EVP_sha256(), nullptr) != 1)
    throw NumericError("sha256: digest failed");
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i)
    os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  return os.str();
}

std::string write_run(const std::string& dir, const std::vector<Artifact>& artifacts,
                      const std::string& config_text, double wall_clock_seconds) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory '" + dir + "': " + ec.message());

  nlohmann::ordered_json manifest;
  manifest["tool"] = "floquetlab";
  manifest["version"] = FLOQUETLAB_VERSION;
  manifest["config"] = config_text;
  manifest["wall_clock_seconds"] = wall_clock_seconds;
  manifest["files"] = nlohmann::json::array();
  for (const auto& a : artifacts) {
    const fs::path path = fs::path(dir) / a.filename;
    std::ofstream out(path, std::ios::binary);
    out << a.content;
    if (!out) throw ConfigError("cannot write '" + path.string() + "'");
    manifest["files"].push_back(
        {{"name", a.filename}, {"bytes", a.content.size()}, {"sha256", sha256_hex(a.content)}});
  }
  const std::string text = manifest.dump(2) + "\n";
  std::ofstream out(fs::path(dir) / "manifest.json", std::ios::binary);
  out << text;
  if (!out) throw ConfigError("cannot write manifest.json");
  return text;
}

}  // namespace floquetlab::cli
