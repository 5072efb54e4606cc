#pragma once

#include "ikgate/cli/config.hpp"
#include "ikgate/cli/manifest.hpp"
#include "ikgate/dataset_io.hpp"
#include "ikgate/inference_client.hpp"
#include "ikgate/report.hpp"
#include "ikgate/teacher.hpp"

#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace ikgate::cli {

/// Every item of a batch failed; the backend is treated as unreachable.
class BackendUnreachable : public Error {
public:
    using Error::Error;
};

enum class AblationAxis { PrefixLength, TrainsetSize, Teacher };

std::string to_string(AblationAxis axis);
AblationAxis ablation_axis_from_string(const std::string& s);

/// One evaluation cell: which dataset is scored, with which prefix length, by
/// a scorer trained on how many records labelled by which teacher.
struct Cell {
    std::size_t dataset = 0;
    int prefix_tokens = 0;
    std::size_t train_size = 0;  // 0: the full trainset
    std::string teacher;
};

struct CellResult {
    Cell cell;
    std::string slug;
    std::optional<EvalReport> report;  // empty when the cell could not be evaluated
};

/// Runs the stages against one output directory. Stage outputs live in
/// <out>/artifacts named by stage and fingerprint; reports in <out>/reports.
class Pipeline {
public:
    Pipeline(RunConfig config, std::filesystem::path out_dir, std::string tool_version,
             std::string config_hash = {});
    ~Pipeline();

    /// Full trainsets for every configured prefix length plus nested subsets.
    std::vector<std::filesystem::path> build_trainsets();
    /// Scores for the evaluation cells (every dataset x prefix length).
    std::vector<std::filesystem::path> score();
    /// Writes per-cell reports plus eval_table.csv and eval_report.json.
    std::vector<CellResult> evaluate();
    /// Writes ablation-<axis>.csv and returns its path.
    std::filesystem::path ablate(AblationAxis axis);

    /// Itemized partial failures collected so far.
    const std::vector<std::string>& problems() const { return problems_; }
    const std::vector<std::string>& stages_run() const { return ran_; }
    const std::vector<std::string>& stages_skipped() const { return skipped_; }

    std::string cell_slug(const Cell& cell) const;

private:
    struct Artifact {
        std::filesystem::path path;
        std::string hash;
    };

    template <class Produce>
    Artifact run_stage(const std::string& key, const std::string& fingerprint, const std::string& ext,
                       Produce&& produce);

    const std::vector<QueryRecord>& records(std::size_t ds);
    std::vector<QueryRecord> eval_records(std::size_t ds);
    const DatasetSplit& split();
    Artifact split_artifact();
    Artifact generations(std::size_t ds, Mode mode);
    Artifact verdicts(std::size_t ds, Mode mode, const std::string& teacher);
    Artifact trainset(const std::string& teacher, int prefix_tokens, std::size_t size);
    Artifact scores(const Cell& cell);
    std::optional<EvalReport> evaluate_cell(const Cell& cell, const std::string& slug);

    std::unique_ptr<Teacher> make_teacher(const std::string& kind);
    std::shared_ptr<InferenceClient> generator();
    std::shared_ptr<InferenceClient> judge();
    std::string backend_fingerprint(const BackendSpec& spec) const;
    void problem(std::string message);

    RunConfig config_;
    std::filesystem::path out_;
    std::filesystem::path artifacts_;
    std::filesystem::path reports_;
    std::string tool_version_;
    RunManifest manifest_;

    std::map<std::size_t, std::vector<QueryRecord>> records_;
    std::map<std::size_t, std::string> dataset_hash_;
    std::optional<DatasetSplit> split_;
    std::shared_ptr<InferenceClient> generator_;
    std::shared_ptr<InferenceClient> judge_;

    std::map<std::string, Artifact> memo_;  // stages finished in this process
    std::vector<std::string> problems_;
    std::vector<std::string> ran_;
    std::vector<std::string> skipped_;
};

}  // namespace ikgate::cli
