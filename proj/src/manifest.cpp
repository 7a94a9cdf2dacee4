#include "rap/manifest.hpp"

#include <fstream>

#include "rap/errors.hpp"

namespace rap {

void write_manifest(const std::filesystem::path& out_dir, const RunManifest& manifest) {
  nlohmann::json doc;
  doc["tool"] = "rap";
  doc["version"] = kToolVersion;
  doc["subcommand"] = manifest.subcommand;
  doc["config"] = manifest.config;
  doc["inputs"] = manifest.inputs;
  doc["outputs"] = manifest.outputs;
  doc["duration_ms"] = manifest.duration_ms;
  const auto path = out_dir / "manifest.json";
  std::ofstream out(path);
  if (!out) throw io_error("cannot open for writing: " + path.string());
  out << doc.dump(2) << "\n";
}

}  // namespace rap
