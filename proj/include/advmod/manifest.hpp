#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace advmod {

inline constexpr const char* kToolVersion = "1.0.0";

std::uint64_t fnv1a64(const void* bytes, std::size_t len);
std::uint64_t fnv1a64_file(const std::filesystem::path& path);
std::string hex64(std::uint64_t value);
std::string iso8601_utc_now();

/**
 * Record of one command run: the resolved parameters, wall-clock bounds,
 * and a digest inventory of every file the run wrote (the manifest itself
 * excluded). Lets a rerun be checked for bit-identical outputs.
 */
struct RunManifest {
  std::string command;
  std::string parameters_json;  // JSON object text
  std::string started_at;
  std::vector<std::string> output_files;  // paths relative to the run dir
};

/// Digests each listed output under `dir`, stamps the finish time, and
/// writes `dir`/manifest.json.
void write_manifest(const RunManifest& manifest,
                    const std::filesystem::path& dir);

}  // namespace advmod
