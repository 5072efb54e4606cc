#pragma once

#include "ikgate/latency_model.hpp"
#include "ikgate/router_eval.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace ikgate {

/// One row of the evaluation table: IK accuracy/AUC, the two endpoint
/// qualities, the 0.5 operating point and the best point of the sweep.
struct EvalReport {
    std::string name;
    int prefix_tokens = 0;
    std::size_t n = 0;
    double acc = 0.0;
    std::optional<double> auc;  // empty when the labels hold one class
    double norag = 0.0;
    double rag = 0.0;
    SweepRow at_0p5;
    SweepRow best;
    SweepReport sweep;
    std::optional<LatencyEstimate> latency_at_0p5;
    std::optional<LatencyEstimate> latency_at_best;
};

/// `scores`, `labels` and `routing` must be aligned by query id.
EvalReport build_eval_report(std::string name, int prefix_tokens, const std::vector<IKScore>& scores,
                             const std::vector<LabeledQuery>& labels, const std::vector<RoutingInput>& routing,
                             const std::vector<double>& grid, const std::optional<StageCosts>& costs = {});

nlohmann::ordered_json to_json(const EvalReport& r);

/// Columns shared by the evaluation and ablation tables.
std::string eval_csv_header();
std::string eval_csv_fields(const EvalReport& r);

/// theta,mean_quality,retrieval_fraction,n
void write_sweep_csv(std::ostream& out, const SweepReport& sweep);
/// Quality against retrieval percentage, one line per sweep row.
void write_curve_csv(std::ostream& out, const SweepReport& sweep);
void write_histogram_csv(std::ostream& out, const IKHistogram& h);
nlohmann::ordered_json to_json(const IKHistogram& h);

/// Static SVG charts for offline viewing.
std::string render_curve_svg(const SweepReport& sweep, const std::string& title);
std::string render_histogram_svg(const IKHistogram& h, const std::string& title);

void write_text_file(const std::filesystem::path& path, const std::string& content);

}  // namespace ikgate
