#include "ikgate/cli/manifest.hpp"

#include "ikgate/error.hpp"
#include "ikgate/hashing.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace ikgate::cli {

using nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {
std::string utc_now() {
    auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::ostringstream s;
    s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return s.str();
}
}  // namespace

std::string sha256_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read " + path.string());
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return sha256_hex(bytes);
}

RunManifest::RunManifest(fs::path path, std::string tool_version)
    : path_(std::move(path)), root_(path_.parent_path()) {
    if (fs::exists(path_)) {
        std::ifstream in(path_, std::ios::binary);
        try {
            data_ = ordered_json::parse(in);
        } catch (const ordered_json::parse_error&) {
            data_ = ordered_json::object();  // unreadable manifest: start over
        }
    }
    if (!data_.is_object()) data_ = ordered_json::object();
    data_["tool_version"] = tool_version;
    if (!data_.contains("stages")) data_["stages"] = ordered_json::object();
    if (!data_.contains("created_at")) data_["created_at"] = utc_now();
}

void RunManifest::set_config_hash(const std::string& hash) {
    std::lock_guard lock(mutex_);
    data_["config_hash"] = hash;
}

bool RunManifest::is_complete(const std::string& stage, const std::string& fingerprint) const {
    std::lock_guard lock(mutex_);
    const auto& stages = data_["stages"];
    if (!stages.contains(stage)) return false;
    const auto& entry = stages[stage];
    if (entry.value("fingerprint", "") != fingerprint || !entry.value("completed", false)) return false;
    for (const auto& a : entry["artifacts"]) {
        if (!fs::exists(root_ / a.get<std::string>())) return false;
    }
    return true;
}

void RunManifest::record(const std::string& stage, const std::string& fingerprint,
                         const std::vector<fs::path>& artifacts) {
    std::lock_guard lock(mutex_);
    ordered_json entry;
    entry["fingerprint"] = fingerprint;
    entry["completed"] = true;
    entry["artifacts"] = ordered_json::array();
    for (const auto& a : artifacts) entry["artifacts"].push_back(fs::relative(a, root_).generic_string());
    entry["completed_at"] = utc_now();
    data_["stages"][stage] = std::move(entry);
}

void RunManifest::save() const {
    std::lock_guard lock(mutex_);
    auto tmp = path_;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + tmp.string());
        out << data_.dump(2) << '\n';
    }
    fs::rename(tmp, path_);
}

}  // namespace ikgate::cli
