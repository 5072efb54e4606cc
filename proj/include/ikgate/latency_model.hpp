#pragma once

#include <nlohmann/json.hpp>

#include <filesystem>
#include <map>
#include <string>

namespace ikgate {

/// Per-question processing cost of each pipeline stage, in milliseconds.
/// Defaults: IK score 3.7, 32-token prefix 8.3, 128-token closed-book answer
/// 18.2, 128-token answer over 5 documents 78.4; retrieval and reranking are
/// not counted.
struct StageCosts {
    double ik_score_ms = 3.7;
    double prefix_gen_ms = 8.3;
    double norag_gen_ms = 18.2;
    double rag_gen_ms = 78.4;
    double retrieval_ms = 0.0;
    double rerank_ms = 0.0;

    /// Throws RangeError on a negative or non-finite cost.
    void validate() const;
    bool operator==(const StageCosts&) const = default;
};

struct PathCosts {
    double norag_path_ms = 0.0;
    double rag_path_ms = 0.0;
};

/// norag = ik + [prefix] + norag_gen; rag = ik + [prefix] + retrieval + rerank + rag_gen.
PathCosts path_costs(const StageCosts& costs, bool prefix_used);

/// Cost of answering every query with retrieval and no IK stages.
double always_rag_baseline_ms(const StageCosts& costs);

struct LatencyEstimate {
    double norag_path_ms = 0.0;
    double rag_path_ms = 0.0;
    double p_retrieve = 0.0;
    double expected_ms = 0.0;
    double baseline_always_rag_ms = 0.0;
    double savings_fraction = 0.0;  // 1 - expected / baseline; 0 when the baseline is 0
};

/// expected = (1 - p) * norag_path + p * rag_path. Throws RangeError for p outside [0,1].
LatencyEstimate expected_latency(const PathCosts& paths, double p_retrieve, double baseline_ms);
LatencyEstimate expected_latency(const StageCosts& costs, bool prefix_used, double p_retrieve);

StageCosts stage_costs_from_json(const nlohmann::json& j);
nlohmann::ordered_json to_json(const StageCosts& c);
nlohmann::ordered_json to_json(const LatencyEstimate& e);

/// Named presets. The built-in set has "a100_vllm" and "bm25_cohere_rerank".
std::map<std::string, StageCosts> builtin_latency_presets();
std::map<std::string, StageCosts> load_latency_presets(const std::filesystem::path& path);

}  // namespace ikgate
