#pragma once

// Report emission: every scoring job writes a JSON report stamped with the
// toolkit version and the config hash, plus CSV tables whose layout is the
// stable contract. All output is byte-deterministic.

#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "videval/config.hpp"

namespace videval {

inline constexpr const char* kToolkitVersion = "0.1.0";

// Runtime knobs that cannot influence any emitted number. They are excluded
// from the report's config hash so that reruns at a different parallelism or
// into a different directory stay byte-identical.
inline JobConfig scoring_config(const JobConfig& config) {
  JobConfig scoring = config;
  scoring.values.erase("out");
  scoring.values.erase("jobs");
  return scoring;
}

inline nlohmann::ordered_json make_report(const JobConfig& config, const std::string& job) {
  nlohmann::ordered_json doc;
  doc["toolkit_version"] = kToolkitVersion;
  doc["job"] = job;
  doc["config_hash"] = scoring_config(config).hash();
  return doc;
}

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::create_directories(path.parent_path().empty() ? "." : path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

inline void write_json_report(const std::filesystem::path& path,
                              const nlohmann::ordered_json& doc) {
  write_text_file(path, doc.dump(2) + "\n");
}

// Minimal CSV: fields are ids and fixed-precision numbers by construction, so
// no quoting is needed; a field containing a comma or quote is a caller bug.
inline void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
                      const std::vector<std::vector<std::string>>& rows) {
  std::string content;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) content += ',';
    content += header[i];
  }
  content += '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) content += ',';
      content += row[i];
    }
    content += '\n';
  }
  write_text_file(path, content);
}

}  // namespace videval
