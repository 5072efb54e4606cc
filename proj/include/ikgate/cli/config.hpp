#pragma once

#include "ikgate/dataset_io.hpp"
#include "ikgate/inference_client.hpp"
#include "ikgate/latency_model.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace ikgate::cli {

struct DatasetConfig {
    std::string name;
    std::filesystem::path path;
    DatasetFormat format = DatasetFormat::Jsonl;
};

/// kind: "stub" (in-process toy model) or "http" (chat-completions endpoint).
struct BackendSpec {
    std::string kind = "stub";
    BackendConfig client;
    std::string api_key_env;
};

/// A calibrated-stub target; unset fields match any cell.
struct StubTarget {
    std::optional<int> prefix_tokens;
    std::optional<std::string> dataset;
    std::optional<std::size_t> train_size;  // 0 means the full trainset
    std::optional<std::string> teacher;
    double acc = 0.8;
    double auc = 0.85;
};

/// kind: "calibrated_stub", "remote_endpoint" or "chat_logprob_adapter".
struct ScorerSpec {
    std::string kind = "calibrated_stub";
    std::string url;
    BackendSpec chat;  // chat_logprob_adapter only
    std::vector<StubTarget> targets;
    std::size_t max_parallel = 4;
    int retry_limit = 3;
    std::chrono::milliseconds timeout{30000};
};

/// kind: "match", "recall" or "llm_judge".
struct TeacherSpec {
    std::string kind = "match";
    double cutoff = 0.5;
};

struct AblationSpec {
    std::vector<int> prefix_tokens{0, 4, 8, 16, 32, 64, 128};
    std::vector<std::size_t> subset_sizes;  // 0 means "all"
    std::vector<int> size_prefix_tokens{0, 32};
    std::vector<std::string> teachers{"match", "recall", "llm_judge"};
};

struct RunConfig {
    std::vector<DatasetConfig> datasets;  // the first one is the training source
    std::size_t validation_size = 0;
    std::uint64_t seed = 0;
    BackendSpec generator;
    BackendSpec judge;
    TeacherSpec teacher;
    ScorerSpec scorer;
    int max_tokens = 128;
    std::vector<int> prefix_tokens{0, 32};
    std::vector<std::size_t> subset_sizes;
    std::vector<double> sweep_grid;
    std::optional<StageCosts> latency;
    AblationSpec ablation;
    std::filesystem::path out_dir;
};

/// Parses a run configuration file. Relative paths resolve against the file's
/// directory. Throws ConfigError with the offending key.
RunConfig load_run_config(const std::filesystem::path& path);
RunConfig parse_run_config(const nlohmann::json& j, const std::filesystem::path& base_dir);

/// Throws ConfigError if any backend would need the network.
void require_offline_backends(const RunConfig& config);

}  // namespace ikgate::cli
