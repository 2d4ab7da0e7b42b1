#include "simenh/store/manifest.hpp"

#include <fstream>

#include <json.hpp>

#include "simenh/common/error.hpp"

namespace simenh::store {

namespace {
constexpr const char* kManifestName = "manifest.json";
}

void write_manifest(const RunManifest& manifest, const std::filesystem::path& run_dir) {
    if (manifest.run_id.empty()) throw ValidationError("manifest: run_id must not be empty");
    for (const auto& [name, rel_path] : manifest.artifacts) {
        const std::filesystem::path full = run_dir / rel_path;
        if (!std::filesystem::exists(full))
            throw IoError("manifest: artifact '" + name + "' is missing: " + full.string());
    }

    nlohmann::json doc;
    doc["run_id"] = manifest.run_id;
    doc["config_hash"] = manifest.config_hash;
    doc["seeds"] = manifest.seeds;
    doc["artifacts"] = manifest.artifacts;
    doc["measurements"] = manifest.measurements;
    doc["completed_stages"] = manifest.completed_stages;

    const std::filesystem::path path = run_dir / kManifestName;
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot open manifest for writing: " + path.string());
    out << doc.dump(2) << '\n';
    if (!out) throw IoError("failed writing manifest: " + path.string());
}

RunManifest read_manifest(const std::filesystem::path& run_dir) {
    const std::filesystem::path path = run_dir / kManifestName;
    std::ifstream in(path);
    if (!in) throw IoError("cannot open manifest: " + path.string());
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw IoError("manifest " + path.string() + ": " + e.what());
    }
    try {
        RunManifest manifest;
        manifest.run_id = doc.at("run_id").get<std::string>();
        manifest.config_hash = doc.at("config_hash").get<std::string>();
        manifest.seeds = doc.at("seeds").get<std::map<std::string, std::uint64_t>>();
        manifest.artifacts = doc.at("artifacts").get<std::map<std::string, std::string>>();
        manifest.measurements = doc.at("measurements").get<std::map<std::string, double>>();
        manifest.completed_stages = doc.at("completed_stages").get<std::vector<std::string>>();
        return manifest;
    } catch (const nlohmann::json::exception& e) {
        throw IoError("manifest " + path.string() + ": " + e.what());
    }
}

bool manifest_exists(const std::filesystem::path& run_dir) {
    return std::filesystem::exists(run_dir / kManifestName);
}

}  // namespace simenh::store
