#pragma once

#include "ikgate/dataset_io.hpp"
#include "ikgate/inference_client.hpp"
#include "ikgate/teacher.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

namespace ikgate {

struct IKScore {
    std::string query_id;
    double ik = 0.5;
    double yes_logit = 0.0;
    double no_logit = 0.0;
    int prefix_tokens = 0;

    bool operator==(const IKScore&) const = default;
};

/// Softmax over the Yes/No pair, evaluated as 1 / (1 + exp(no - yes)).
/// Throws RangeError for non-finite input.
double ik_from_logits(double yes_logit, double no_logit);

struct YesNoLogits {
    double yes = 0.0;
    double no = 0.0;
};

/// Per class, the max logprob over candidates whose trimmed, case-folded
/// text is "yes" / "no". Throws MissingClassError if a class is absent.
YesNoLogits extract_yes_no(const FirstTokenLogits& candidates);

struct ScoreInput {
    std::string query_id;
    std::string question;
    std::string answer_prefix;
};

class ScorerBackend {
public:
    virtual ~ScorerBackend() = default;
    virtual std::string kind() const = 0;
    virtual YesNoLogits logits(const ScoreInput& input) = 0;
    virtual std::size_t max_parallel() const { return 1; }
};

/// POST {base_url}/score {"question","answer_prefix"} -> {"yes_logit","no_logit"}.
class RemoteEndpointBackend final : public ScorerBackend {
public:
    RemoteEndpointBackend(std::string base_url, std::chrono::milliseconds timeout = std::chrono::seconds(30),
                          int retry_limit = 3, std::size_t max_parallel = 4);
    std::string kind() const override { return "remote_endpoint"; }
    YesNoLogits logits(const ScoreInput& input) override;
    std::size_t max_parallel() const override { return max_parallel_; }

private:
    std::string origin_;
    std::string path_prefix_;
    std::chrono::milliseconds timeout_;
    int retry_limit_;
    std::size_t max_parallel_;
};

/// Reads the Yes/No logits off the first-token top logprobs of a
/// chat-completion endpoint, prompted with the scorer template.
class ChatLogprobAdapter final : public ScorerBackend {
public:
    explicit ChatLogprobAdapter(std::shared_ptr<InferenceClient> client);
    std::string kind() const override { return "chat_logprob_adapter"; }
    YesNoLogits logits(const ScoreInput& input) override;
    std::size_t max_parallel() const override { return client_->config().max_parallel_requests; }

private:
    std::shared_ptr<InferenceClient> client_;
};

/// Deterministic stand-in for a trained classifier: logits are looked up by
/// query id. Thread-safe once programmed.
class CalibratedStub final : public ScorerBackend {
public:
    std::string kind() const override { return "calibrated_stub"; }
    YesNoLogits logits(const ScoreInput& input) override;
    std::size_t max_parallel() const override { return 8; }

    void set_logits(const std::string& query_id, double yes_logit, double no_logit);
    /// Programs logits (log ik, log(1 - ik)) for `query_id`.
    void set_ik(const std::string& query_id, double ik);
    std::size_t size() const { return table_.size(); }

private:
    std::map<std::string, YesNoLogits> table_;
};

/// Binormal construction: scores for the two classes are drawn from
/// unit-variance normals with mean gap sqrt(2) * Phi^-1(target_auc), then the
/// decision boundary is placed so the accuracy on `labels` is as close to
/// target_acc as the sample allows. Throws RangeError for targets outside
/// [0.5, 1) or single-class labels, InfeasibleTargetError when target_acc
/// is out of reach for target_auc at the given class balance.
std::shared_ptr<CalibratedStub> calibrated_stub(double target_acc, double target_auc,
                                                const std::vector<std::pair<std::string, Label>>& labels,
                                                std::uint64_t seed);

/// Largest accuracy an equal-variance binormal classifier with this AUC can
/// reach when a fraction `positive_rate` of the labels is Yes.
double binormal_max_accuracy(double target_auc, double positive_rate);

/// Composes the scorer prompt, fetches logits and caches the result per
/// (query id, prompt). Thread-safe.
class Scorer {
public:
    explicit Scorer(std::shared_ptr<ScorerBackend> backend);

    IKScore score_query(const QueryRecord& query, const std::string& answer_prefix, int prefix_tokens);
    IKScore score(const ScoreInput& input, int prefix_tokens);

    struct BatchScores {
        std::vector<std::optional<IKScore>> scores;
        std::vector<std::string> errors;
    };
    BatchScores score_all(const std::vector<ScoreInput>& inputs, int prefix_tokens);

    std::size_t backend_calls() const { return backend_calls_; }
    ScorerBackend& backend() { return *backend_; }

private:
    std::shared_ptr<ScorerBackend> backend_;
    std::mutex mutex_;
    std::map<std::pair<std::string, std::string>, IKScore> cache_;
    std::atomic<std::size_t> backend_calls_{0};
};

nlohmann::ordered_json to_json(const IKScore& s);
IKScore ik_score_from_json(const nlohmann::json& j);
void save_scores(const std::filesystem::path& path, const std::vector<IKScore>& scores);
std::vector<IKScore> load_scores(const std::filesystem::path& path);

}  // namespace ikgate
