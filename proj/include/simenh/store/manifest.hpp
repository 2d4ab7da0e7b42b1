#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace simenh::store {

// Record of one pipeline run: what produced it, where every artifact lives
// (paths relative to the run directory), and summary measurements.
struct RunManifest {
    std::string run_id;
    std::string config_hash;
    std::map<std::string, std::uint64_t> seeds;
    std::map<std::string, std::string> artifacts;
    std::map<std::string, double> measurements;
    std::vector<std::string> completed_stages;
};

// Writes run_dir/manifest.json. Every artifact path must already exist under
// run_dir; the manifest is only written once the run it describes is real.
void write_manifest(const RunManifest& manifest, const std::filesystem::path& run_dir);
RunManifest read_manifest(const std::filesystem::path& run_dir);
bool manifest_exists(const std::filesystem::path& run_dir);

}  // namespace simenh::store
