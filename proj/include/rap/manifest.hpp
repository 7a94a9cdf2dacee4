#pragma once

#include <filesystem>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

namespace rap {

inline constexpr const char* kToolVersion = "0.1.0";

/// Reproducibility record written next to every CLI run's outputs. A rerun
/// with the same snapshot reproduces the outputs bit-exactly (duration
/// excluded).
struct RunManifest {
  std::string subcommand;
  nlohmann::json config;   // resolved settings, seeds included
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  double duration_ms = 0.0;
};

void write_manifest(const std::filesystem::path& out_dir, const RunManifest& manifest);

}  // namespace rap
