#pragma once

#include "ikgate/dataset_io.hpp"
#include "ikgate/error.hpp"
#include "ikgate/inference_client.hpp"
#include "ikgate/tokenizer.hpp"

#include <array>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ikgate {

enum class Label { No, Yes };

std::string to_string(Label label);
Label label_from_string(std::string_view s);

struct TeacherVerdict {
    std::string query_id;
    std::string teacher_id;
    double raw_score = 0.0;  // in [0, 1]
    Label label = Label::No;

    bool operator==(const TeacherVerdict&) const = default;
};

/// Yes iff raw_score >= cutoff.
Label binarize(double raw_score, double cutoff);
TeacherVerdict make_verdict(std::string query_id, std::string teacher_id, double raw_score, double cutoff);

// --- string metrics ---------------------------------------------------------

/// Lowercase, drop ASCII punctuation, drop the articles a/an/the, collapse
/// whitespace. Non-ASCII bytes pass through unchanged.
std::string normalize_answer(std::string_view text);
std::vector<std::string> normalized_tokens(std::string_view text);

/// 1 iff some normalized gold occurs in the normalized answer on token
/// boundaries, else 0. Golds that normalize to nothing are ignored.
double match_metric(std::string_view answer, const std::vector<std::string>& golds);

/// Max over golds of the fraction of the gold's tokens found in the answer
/// (multiset intersection). Throws RangeError when every gold normalizes to
/// zero tokens.
double recall_metric(std::string_view answer, const std::vector<std::string>& golds);

// --- judge ------------------------------------------------------------------

struct JudgePrompt {
    std::string question;
    std::string candidate_answer;
    std::vector<std::string> gold_answers;
    std::string template_id = "judge-v1";

    std::string render() const;
};

/// First number in `reply` if it lies in [0, 1]; otherwise a leading
/// "yes"/"no"/"correct"/"incorrect" word maps to 1/0.
std::optional<double> parse_judge_score(std::string_view reply);

/// Asks the judge for a score; reprompts once on an unreadable reply, then
/// throws JudgeParseError. The judge replies are cached by the client.
TeacherVerdict judge_llm(const QueryRecord& query, const Generation& generation, InferenceClient& judge,
                         double cutoff, const std::string& teacher_id = "llm-judge");

/// One teacher per trainset.
class Teacher {
public:
    virtual ~Teacher() = default;
    virtual std::string id() const = 0;
    virtual double cutoff() const = 0;
    /// Raw score of `generation` against the gold answers of `query`.
    virtual TeacherVerdict judge(const QueryRecord& query, const Generation& generation) = 0;
    virtual std::size_t max_parallel() const { return 1; }
};

enum class StringMetric { Match, Recall };

class StringMetricTeacher final : public Teacher {
public:
    StringMetricTeacher(StringMetric metric, double cutoff = 0.5);
    std::string id() const override;
    double cutoff() const override { return cutoff_; }
    TeacherVerdict judge(const QueryRecord& query, const Generation& generation) override;
    std::size_t max_parallel() const override { return 8; }

private:
    StringMetric metric_;
    double cutoff_;
};

class LlmJudgeTeacher final : public Teacher {
public:
    LlmJudgeTeacher(std::shared_ptr<InferenceClient> judge, double cutoff = 0.5, std::string id = "llm-judge");
    std::string id() const override { return id_; }
    double cutoff() const override { return cutoff_; }
    TeacherVerdict judge(const QueryRecord& query, const Generation& generation) override;
    std::size_t max_parallel() const override { return judge_->config().max_parallel_requests; }

private:
    std::shared_ptr<InferenceClient> judge_;
    double cutoff_;
    std::string id_;
};

struct JudgeRun {
    std::vector<std::optional<TeacherVerdict>> verdicts;  // aligned with the input queries
    std::vector<std::string> flagged;                     // ids whose judge reply was unreadable
    std::vector<std::string> errors;                      // other per-item failures
};

/// Judges generations[i] against queries[i] through the teacher's bounded
/// concurrency. Unreadable judge replies are flagged, not fatal.
JudgeRun judge_all(Teacher& teacher, const std::vector<QueryRecord>& queries,
                   const std::vector<Generation>& generations);

void save_verdicts(const std::filesystem::path& path, const std::vector<TeacherVerdict>& verdicts);
std::vector<TeacherVerdict> load_verdicts(const std::filesystem::path& path);

// --- trainset export --------------------------------------------------------

inline constexpr std::array<int, 7> kAllowedPrefixTokens{0, 4, 8, 16, 32, 64, 128};
bool is_allowed_prefix(int prefix_tokens);

struct TrainRecord {
    std::string query_id;
    std::string question;
    std::string answer_prefix;
    int prefix_tokens = 0;
    Label label = Label::No;

    bool operator==(const TrainRecord&) const = default;
};

struct TrainsetMeta {
    std::string tokenizer;
    std::string teacher_id;
    double cutoff = 0.5;
    std::string source_dataset;
    int prefix_tokens = 0;
    std::string prompt_template = "scorer-v1";

    bool operator==(const TrainsetMeta&) const = default;
};

class TrainsetExportError : public Error {
public:
    explicit TrainsetExportError(std::vector<std::string> problems);
    const std::vector<std::string>& problems() const { return problems_; }

private:
    std::vector<std::string> problems_;
};

/// One record per query, in query order, with the first `prefix_tokens`
/// tokens of the closed-book answer. Generations and verdicts are matched by
/// query id; anything missing is reported in a single TrainsetExportError.
std::vector<TrainRecord> export_trainset(const std::vector<QueryRecord>& queries,
                                         const std::vector<Generation>& norag_generations,
                                         const std::vector<TeacherVerdict>& verdicts, int prefix_tokens,
                                         const Tokenizer& tokenizer);

/// Header line {"_meta": {...}} followed by one record per line.
void write_trainset(const std::filesystem::path& path, const TrainsetMeta& meta,
                    const std::vector<TrainRecord>& records);
std::pair<TrainsetMeta, std::vector<TrainRecord>> read_trainset(const std::filesystem::path& path);

}  // namespace ikgate
