#pragma once

// CSV emission and run manifests.

#include "densitylab/core.hpp"

#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

namespace densitylab {

class IoError : public Error {
 public:
  using Error::Error;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add(std::vector<std::string> row) { rows.push_back(std::move(row)); }
};

/// Fixed-precision rendering so repeated runs are byte-identical.
inline std::string format_float(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10f", v);
  return buf;
}

inline void write_csv(const CsvTable& t, std::ostream& out) {
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out << ',';
      out << cells[i];
    }
    out << '\n';
  };
  line(t.header);
  for (const auto& r : t.rows) line(r);
}

/// Header row first, LF line endings, rows in the given order.
inline void emit_csv(const CsvTable& t, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  write_csv(t, out);
  out.flush();
  if (!out) throw IoError("write to '" + path + "' failed");
}

/// FNV-1a, 64-bit.
inline std::string digest_hex(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline std::string utc_timestamp() {
  auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct RunManifest {
  std::string command_line;
  std::string config_digest;
  std::vector<std::uint64_t> seeds;
  std::vector<std::uint64_t> horizons;
  std::string started;
  std::string finished;
  std::vector<std::string> outputs;
  std::string tool_version;

  nlohmann::json to_json() const {
    return {{"command_line", command_line}, {"config_digest", config_digest},
            {"seeds", seeds},               {"horizons", horizons},
            {"started", started},           {"finished", finished},
            {"outputs", outputs},           {"tool_version", tool_version}};
  }

  void write(const std::string& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open manifest '" + path + "'");
    out << to_json().dump(2) << '\n';
    if (!out) throw IoError("write to manifest '" + path + "' failed");
  }
};

}  // namespace densitylab
