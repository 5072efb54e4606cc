#pragma once

#include "ikgate/dataset_io.hpp"
#include "ikgate/inference_client.hpp"

#include <atomic>
#include <chrono>
#include <functional>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

namespace ikgate {

struct StubReply {
    std::string content;
    /// Top candidates for the first position; empty means the stub reports no
    /// logprobs for this reply.
    std::vector<TokenLogprob> first_token_top;
};

/// Called with the text of the last user message.
using StubResponder = std::function<StubReply(const std::string& prompt)>;

/// In-process chat-completion endpoint speaking the same JSON schema as the
/// HTTP transport. Replies are cut to `max_tokens` whitespace tokens with
/// finish_reason "length". Instrumented for tests.
class StubChatTransport final : public ChatTransport {
public:
    explicit StubChatTransport(StubResponder responder, std::string model_id = "stub");

    nlohmann::json post_chat(const nlohmann::json& body) override;
    bool uses_network() const override { return false; }

    /// Largest top_logprobs the stub will honour.
    void set_max_top_logprobs(int k) { max_top_logprobs_ = k; }
    void set_latency(std::chrono::milliseconds latency) { latency_ = latency; }
    /// The next `n` calls fail with a retryable transport error.
    void fail_next(int n) { fail_next_ = n; }

    std::size_t calls() const { return calls_; }
    std::size_t max_in_flight() const { return max_in_flight_; }

private:
    StubResponder responder_;
    std::string model_id_;
    int max_top_logprobs_ = 20;
    std::chrono::milliseconds latency_{0};
    std::atomic<int> fail_next_{0};
    std::atomic<std::size_t> calls_{0};
    std::atomic<std::size_t> in_flight_{0};
    std::atomic<std::size_t> max_in_flight_{0};
};

/// Always answers `content`.
StubResponder fixed_responder(std::string content, std::vector<TokenLogprob> first_token_top = {});

/// Offline stand-in for the generator model over a toy dataset. Closed-book
/// prompts get the record's "toy_answer"; RAG prompts get an answer read off
/// the first document. Unknown questions get "I don't know."
StubResponder toy_generator_responder(const std::vector<QueryRecord>& records);

/// Offline judge: reads the judge prompt fields and replies "Score: 1" when
/// the candidate contains a reference answer after normalization (or covers
/// at least half of its tokens), else "Score: 0".
StubResponder toy_judge_responder();

}  // namespace ikgate
