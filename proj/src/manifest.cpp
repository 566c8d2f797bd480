#include "ragcheck/manifest.hpp"

#include <chrono>
#include <fstream>

#include "ragcheck/errors.hpp"
#include "ragcheck/sha256.hpp"

namespace ragcheck::manifest {
namespace {

std::string iso8601_now() {
    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string file_sha256(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw OperationError("cannot hash input file: " + path.string());
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return sha256_hex(content);
}

} // namespace

void write_run_manifest(const std::filesystem::path& out_dir,
                        const std::vector<std::string>& argv, const nlohmann::json& config,
                        const std::vector<std::filesystem::path>& inputs) {
    nlohmann::json doc;
    doc["tool"] = "ragcheck";
    doc["version"] = RAGCHECK_VERSION;
    doc["command"] = argv;
    doc["config"] = config;
    nlohmann::json hashes = nlohmann::json::object();
    for (const auto& input : inputs)
        hashes[input.string()] = "sha256:" + file_sha256(input);
    doc["inputs"] = std::move(hashes);
    doc["created_at"] = iso8601_now();

    std::filesystem::create_directories(out_dir);
    std::ofstream out(out_dir / "manifest.json");
    if (!out)
        throw OperationError("cannot write manifest: " + (out_dir / "manifest.json").string());
    out << doc.dump(2) << "\n";
}

} // namespace ragcheck::manifest
