#pragma once

#include <nlohmann/json.hpp>

#include <filesystem>
#include <mutex>
#include <string>
#include <vector>

namespace ikgate::cli {

/// Stage bookkeeping for one output directory. A stage is complete when the
/// manifest holds its fingerprint and every listed artifact still exists.
class RunManifest {
public:
    RunManifest(std::filesystem::path path, std::string tool_version);

    void set_config_hash(const std::string& hash);
    bool is_complete(const std::string& stage, const std::string& fingerprint) const;
    void record(const std::string& stage, const std::string& fingerprint,
                const std::vector<std::filesystem::path>& artifacts);
    void save() const;

    const nlohmann::ordered_json& data() const { return data_; }

private:
    std::filesystem::path path_;
    std::filesystem::path root_;
    nlohmann::ordered_json data_;
    mutable std::mutex mutex_;
};

/// SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

}  // namespace ikgate::cli
