#include "ikgate/latency_model.hpp"

#include "ikgate/error.hpp"
#include "ikgate_assets.hpp"

#include <cmath>
#include <fstream>

namespace ikgate {

using nlohmann::json;
using nlohmann::ordered_json;

void StageCosts::validate() const {
    for (double c : {ik_score_ms, prefix_gen_ms, norag_gen_ms, rag_gen_ms, retrieval_ms, rerank_ms}) {
        if (!std::isfinite(c) || c < 0.0) throw RangeError("stage costs must be finite and non-negative");
    }
}

PathCosts path_costs(const StageCosts& costs, bool prefix_used) {
    costs.validate();
    const double gate = costs.ik_score_ms + (prefix_used ? costs.prefix_gen_ms : 0.0);
    return {gate + costs.norag_gen_ms, gate + costs.retrieval_ms + costs.rerank_ms + costs.rag_gen_ms};
}

double always_rag_baseline_ms(const StageCosts& costs) {
    costs.validate();
    return costs.retrieval_ms + costs.rerank_ms + costs.rag_gen_ms;
}

LatencyEstimate expected_latency(const PathCosts& paths, double p_retrieve, double baseline_ms) {
    if (!(p_retrieve >= 0.0 && p_retrieve <= 1.0)) throw RangeError("p_retrieve must lie in [0,1]");
    LatencyEstimate e;
    e.norag_path_ms = paths.norag_path_ms;
    e.rag_path_ms = paths.rag_path_ms;
    e.p_retrieve = p_retrieve;
    e.expected_ms = (1.0 - p_retrieve) * paths.norag_path_ms + p_retrieve * paths.rag_path_ms;
    e.baseline_always_rag_ms = baseline_ms;
    e.savings_fraction = baseline_ms > 0.0 ? 1.0 - e.expected_ms / baseline_ms : 0.0;
    return e;
}

LatencyEstimate expected_latency(const StageCosts& costs, bool prefix_used, double p_retrieve) {
    return expected_latency(path_costs(costs, prefix_used), p_retrieve, always_rag_baseline_ms(costs));
}

StageCosts stage_costs_from_json(const json& j) {
    StageCosts c;
    c.ik_score_ms = j.value("ik_score_ms", c.ik_score_ms);
    c.prefix_gen_ms = j.value("prefix_gen_ms", c.prefix_gen_ms);
    c.norag_gen_ms = j.value("norag_gen_ms", c.norag_gen_ms);
    c.rag_gen_ms = j.value("rag_gen_ms", c.rag_gen_ms);
    c.retrieval_ms = j.value("retrieval_ms", c.retrieval_ms);
    c.rerank_ms = j.value("rerank_ms", c.rerank_ms);
    c.validate();
    return c;
}

ordered_json to_json(const StageCosts& c) {
    ordered_json j;
    j["ik_score_ms"] = c.ik_score_ms;
    j["prefix_gen_ms"] = c.prefix_gen_ms;
    j["norag_gen_ms"] = c.norag_gen_ms;
    j["rag_gen_ms"] = c.rag_gen_ms;
    j["retrieval_ms"] = c.retrieval_ms;
    j["rerank_ms"] = c.rerank_ms;
    return j;
}

ordered_json to_json(const LatencyEstimate& e) {
    ordered_json j;
    j["norag_path_ms"] = e.norag_path_ms;
    j["rag_path_ms"] = e.rag_path_ms;
    j["p_retrieve"] = e.p_retrieve;
    j["expected_ms"] = e.expected_ms;
    j["baseline_always_rag_ms"] = e.baseline_always_rag_ms;
    j["savings_fraction"] = e.savings_fraction;
    return j;
}

namespace {
std::map<std::string, StageCosts> presets_from(const json& j) {
    std::map<std::string, StageCosts> out;
    for (auto it = j.begin(); it != j.end(); ++it) out[it.key()] = stage_costs_from_json(it.value());
    return out;
}
}  // namespace

std::map<std::string, StageCosts> builtin_latency_presets() {
    static const auto presets = presets_from(json::parse(assets::kLatencyPresets));
    return presets;
}

std::map<std::string, StageCosts> load_latency_presets(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open latency presets " + path.string());
    try {
        return presets_from(json::parse(in));
    } catch (const json::exception& e) {
        throw ConfigError("bad latency presets " + path.string() + ": " + e.what());
    }
}

}  // namespace ikgate
