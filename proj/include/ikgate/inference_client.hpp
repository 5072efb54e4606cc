#pragma once

#include "ikgate/dataset_io.hpp"
#include "ikgate/error.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <atomic>
#include <chrono>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace ikgate {

enum class Mode { NoRag, Rag };
enum class FinishReason { Stop, Length, Error };

std::string to_string(Mode mode);
Mode mode_from_string(std::string_view s);
std::string to_string(FinishReason reason);
FinishReason finish_reason_from_string(std::string_view s);

/// `mode` records whether context documents were attached to the prompt.
struct GenerationRequest {
    std::string query_id;
    Mode mode = Mode::NoRag;
    std::string prompt;
    int max_tokens = 128;
    std::vector<std::string> context_docs;
};

/// Renders the NORAG or RAG template for `query`. RAG documents come from the
/// record's "contexts" extra field.
GenerationRequest make_generation_request(const QueryRecord& query, Mode mode, int max_tokens);

struct Generation {
    std::string query_id;
    Mode mode = Mode::NoRag;
    std::string answer;
    int token_count = 0;
    std::string model_id;
    FinishReason finish_reason = FinishReason::Stop;

    bool operator==(const Generation&) const = default;
};

nlohmann::ordered_json to_json(const Generation& g);
Generation generation_from_json(const nlohmann::json& j);

struct TokenLogprob {
    std::string token;
    double logprob = 0.0;

    bool operator==(const TokenLogprob&) const = default;
};

/// Top-K candidates for the first generated position, sorted by descending
/// logprob, passed through as the endpoint reported them.
struct FirstTokenLogits {
    std::string query_id;
    std::vector<TokenLogprob> candidates;
    int k = 0;
};

struct BackendConfig {
    std::string base_url;
    std::string model_id = "stub";
    std::size_t max_parallel_requests = 4;
    int retry_limit = 3;
    std::chrono::milliseconds timeout{30000};
    std::chrono::milliseconds backoff_base{200};
    std::filesystem::path cache_dir;  // empty: in-memory cache only
    std::size_t context_window_tokens = 8192;
    int top_logprobs = 5;
    std::filesystem::path audit_log;  // empty: no audit log
};

/// Failure below the model: connection refused, timeout, 5xx. `retryable`
/// distinguishes transient failures from client errors.
class TransportError : public Error {
public:
    TransportError(const std::string& what, bool retryable, int status = 0)
        : Error(what), retryable_(retryable), status_(status) {}
    bool retryable() const { return retryable_; }
    int status() const { return status_; }

private:
    bool retryable_;
    int status_;
};

/// Carries one chat-completion request body and returns the response body.
class ChatTransport {
public:
    virtual ~ChatTransport() = default;
    virtual nlohmann::json post_chat(const nlohmann::json& body) = 0;
    virtual bool uses_network() const = 0;
};

/// Content-addressed response cache. Keys are hex digests; with a directory
/// each entry is one JSON file named by its key.
class ResponseCache {
public:
    explicit ResponseCache(std::filesystem::path dir = {});
    std::optional<std::string> get(const std::string& key) const;
    void put(const std::string& key, const std::string& value);
    const std::filesystem::path& dir() const { return dir_; }

private:
    std::filesystem::path dir_;
    mutable std::mutex mutex_;
    mutable std::unordered_map<std::string, std::string> memory_;
};

struct BatchItemError {
    std::size_t index = 0;
    std::string query_id;
    std::string message;
};

struct BatchResult {
    std::vector<std::optional<Generation>> results;  // input order
    std::vector<BatchItemError> failures;
    std::size_t succeeded() const { return results.size() - failures.size(); }
};

struct ClientStats {
    std::size_t transport_calls = 0;
    std::size_t cache_hits = 0;
    std::size_t cache_misses = 0;
};

/// Drives a chat-completion endpoint with greedy decoding, retries, a bounded
/// number of concurrent requests and a response cache. Thread-safe.
class InferenceClient {
public:
    InferenceClient(BackendConfig config, std::shared_ptr<ChatTransport> transport);

    Generation generate(const GenerationRequest& request);
    FirstTokenLogits first_token_logits(std::string_view prompt, std::string_view query_id = {});
    BatchResult batch_run(const std::vector<GenerationRequest>& requests);

    std::string cache_key(const GenerationRequest& request) const;
    ClientStats stats() const;
    const BackendConfig& config() const { return config_; }

private:
    nlohmann::json call_with_retries(const nlohmann::json& body, const std::string& query_id);
    void audit(const nlohmann::json& request, const nlohmann::json& response);
    std::mutex& key_mutex(const std::string& key);

    BackendConfig config_;
    std::shared_ptr<ChatTransport> transport_;
    ResponseCache cache_;
    std::array<std::mutex, 64> key_mutexes_;
    std::mutex audit_mutex_;
    std::atomic<std::size_t> transport_calls_{0};
    std::atomic<std::size_t> cache_hits_{0};
    std::atomic<std::size_t> cache_misses_{0};
};

/// Process-wide network policy. While offline, every network transport
/// throws OfflineViolation instead of connecting.
void set_offline(bool offline);
bool is_offline();
/// Number of network requests attempted by HTTP transports in this process.
std::size_t network_call_count();
void note_network_call();

/// OpenAI-style chat completions over HTTP: POST {base_url}/chat/completions.
class HttpChatTransport final : public ChatTransport {
public:
    HttpChatTransport(std::string base_url, std::chrono::milliseconds timeout, std::string api_key = {});
    nlohmann::json post_chat(const nlohmann::json& body) override;
    bool uses_network() const override { return true; }

private:
    std::string origin_;
    std::string path_prefix_;
    std::chrono::milliseconds timeout_;
    std::string api_key_;
};

/// Splits "http://host:port/v1" into ("http://host:port", "/v1").
std::pair<std::string, std::string> split_base_url(std::string_view base_url);

}  // namespace ikgate
