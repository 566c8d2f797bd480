#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace ragcheck::manifest {

// Writes <out_dir>/manifest.json describing a run: the command line, the
// effective configuration, a sha256 per input file and the tool version.
// Timestamps live only here so report payloads stay byte-reproducible.
void write_run_manifest(const std::filesystem::path& out_dir,
                        const std::vector<std::string>& argv, const nlohmann::json& config,
                        const std::vector<std::filesystem::path>& inputs);

} // namespace ragcheck::manifest
