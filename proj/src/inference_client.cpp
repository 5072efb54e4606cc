#include "ikgate/inference_client.hpp"

#include "ikgate/concurrency.hpp"
#include "ikgate/hashing.hpp"
#include "ikgate/prompts.hpp"
#include "ikgate/tokenizer.hpp"

#include <fstream>
#include <functional>
#include <thread>

namespace ikgate {

using nlohmann::json;
using nlohmann::ordered_json;

std::string to_string(Mode mode) { return mode == Mode::Rag ? "rag" : "norag"; }

Mode mode_from_string(std::string_view s) {
    if (s == "rag") return Mode::Rag;
    if (s == "norag") return Mode::NoRag;
    throw ParseError(0, "unknown mode '" + std::string(s) + "'");
}

std::string to_string(FinishReason reason) {
    switch (reason) {
        case FinishReason::Stop: return "stop";
        case FinishReason::Length: return "length";
        case FinishReason::Error: return "error";
    }
    return "error";
}

FinishReason finish_reason_from_string(std::string_view s) {
    if (s == "stop") return FinishReason::Stop;
    if (s == "length") return FinishReason::Length;
    return FinishReason::Error;
}

GenerationRequest make_generation_request(const QueryRecord& query, Mode mode, int max_tokens) {
    GenerationRequest req;
    req.query_id = query.id;
    req.mode = mode;
    req.max_tokens = max_tokens;
    if (mode == Mode::Rag) {
        if (query.extra.contains("contexts") && query.extra["contexts"].is_array()) {
            for (const auto& d : query.extra["contexts"]) {
                if (d.is_string()) req.context_docs.push_back(d.get<std::string>());
            }
        }
        if (req.context_docs.empty()) throw BackendError(query.id, "RAG request without context documents");
        req.prompt = render_rag_prompt(query.question, req.context_docs);
    } else {
        req.prompt = render_norag_prompt(query.question);
    }
    return req;
}

ordered_json to_json(const Generation& g) {
    ordered_json j;
    j["query_id"] = g.query_id;
    j["mode"] = to_string(g.mode);
    j["answer"] = g.answer;
    j["token_count"] = g.token_count;
    j["model_id"] = g.model_id;
    j["finish_reason"] = to_string(g.finish_reason);
    return j;
}

Generation generation_from_json(const json& j) {
    Generation g;
    g.query_id = j.at("query_id").get<std::string>();
    g.mode = mode_from_string(j.at("mode").get<std::string>());
    g.answer = j.at("answer").get<std::string>();
    g.token_count = j.at("token_count").get<int>();
    g.model_id = j.at("model_id").get<std::string>();
    g.finish_reason = finish_reason_from_string(j.at("finish_reason").get<std::string>());
    return g;
}

// ---------------------------------------------------------------------------
// ResponseCache

ResponseCache::ResponseCache(std::filesystem::path dir) : dir_(std::move(dir)) {
    if (!dir_.empty()) std::filesystem::create_directories(dir_);
}

std::optional<std::string> ResponseCache::get(const std::string& key) const {
    {
        std::lock_guard lock(mutex_);
        if (auto it = memory_.find(key); it != memory_.end()) return it->second;
    }
    if (dir_.empty()) return std::nullopt;
    std::ifstream in(dir_ / (key + ".json"), std::ios::binary);
    if (!in) return std::nullopt;
    std::string value((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    std::lock_guard lock(mutex_);
    memory_.emplace(key, value);
    return value;
}

void ResponseCache::put(const std::string& key, const std::string& value) {
    if (!dir_.empty()) {
        auto final_path = dir_ / (key + ".json");
        auto tmp = dir_ / (key + ".json.tmp" + std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id())));
        {
            std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
            if (!out) throw Error("cannot write cache entry " + tmp.string());
            out << value;
        }
        std::filesystem::rename(tmp, final_path);
    }
    std::lock_guard lock(mutex_);
    memory_[key] = value;
}

// ---------------------------------------------------------------------------
// InferenceClient

InferenceClient::InferenceClient(BackendConfig config, std::shared_ptr<ChatTransport> transport)
    : config_(std::move(config)), transport_(std::move(transport)), cache_(config_.cache_dir) {
    if (config_.max_parallel_requests < 1) throw ConfigError("max_parallel_requests must be >= 1");
    if (!transport_) throw ConfigError("inference client needs a transport");
}

std::mutex& InferenceClient::key_mutex(const std::string& key) {
    return key_mutexes_[std::hash<std::string>{}(key) % key_mutexes_.size()];
}

std::string InferenceClient::cache_key(const GenerationRequest& request) const {
    return FieldHasher{}.add("generate").add(config_.model_id).add(request.prompt).add(request.max_tokens).hex();
}

ClientStats InferenceClient::stats() const {
    return {transport_calls_.load(), cache_hits_.load(), cache_misses_.load()};
}

void InferenceClient::audit(const json& request, const json& response) {
    if (config_.audit_log.empty()) return;
    json line{{"request", request}, {"response", response}};
    std::lock_guard lock(audit_mutex_);
    std::ofstream out(config_.audit_log, std::ios::binary | std::ios::app);
    out << line.dump() << '\n';
}

json InferenceClient::call_with_retries(const json& body, const std::string& query_id) {
    std::string last_error;
    for (int attempt = 0; attempt <= config_.retry_limit; ++attempt) {
        try {
            ++transport_calls_;
            json response = transport_->post_chat(body);
            audit(body, response);
            return response;
        } catch (const TransportError& e) {
            if (!e.retryable()) {
                if (e.status() == 400 && std::string_view(e.what()).find("context_length") != std::string_view::npos)
                    throw PromptTooLongError(query_id, e.what());
                throw BackendError(query_id, e.what());
            }
            last_error = e.what();
            if (attempt < config_.retry_limit) std::this_thread::sleep_for(config_.backoff_base * (1 << attempt));
        }
    }
    throw BackendError(query_id, "giving up after " + std::to_string(config_.retry_limit + 1) +
                                     " attempts: " + last_error);
}

Generation InferenceClient::generate(const GenerationRequest& request) {
    if (request.max_tokens < 1) throw RangeError("max_tokens must be >= 1");
    if (request.mode == Mode::Rag && request.context_docs.empty())
        throw BackendError(request.query_id, "RAG request without context documents");
    const auto& tok = default_tokenizer();
    if (tok.count(request.prompt) + static_cast<std::size_t>(request.max_tokens) > config_.context_window_tokens) {
        throw PromptTooLongError(request.query_id, "prompt plus max_tokens exceeds the " +
                                                       std::to_string(config_.context_window_tokens) +
                                                       "-token context window");
    }

    const auto key = cache_key(request);
    std::lock_guard key_lock(key_mutex(key));
    if (auto hit = cache_.get(key)) {
        ++cache_hits_;
        auto g = generation_from_json(json::parse(*hit));
        g.query_id = request.query_id;
        g.mode = request.mode;
        return g;
    }
    ++cache_misses_;

    json body{{"model", config_.model_id},
              {"messages", json::array({json{{"role", "user"}, {"content", request.prompt}}})},
              {"max_tokens", request.max_tokens},
              {"temperature", 0}};
    json response = call_with_retries(body, request.query_id);

    Generation g;
    g.query_id = request.query_id;
    g.mode = request.mode;
    g.model_id = response.value("model", config_.model_id);
    try {
        const auto& choice = response.at("choices").at(0);
        const auto& content = choice.at("message").at("content");
        g.answer = content.is_string() ? content.get<std::string>() : std::string{};
        g.finish_reason = choice.contains("finish_reason") && choice["finish_reason"].is_string()
                              ? finish_reason_from_string(choice["finish_reason"].get<std::string>())
                              : FinishReason::Stop;
    } catch (const json::exception& e) {
        throw BackendError(request.query_id, std::string("malformed chat response: ") + e.what());
    }
    int counted = static_cast<int>(tok.count(g.answer));
    if (counted > request.max_tokens) {
        g.answer = tok.truncate(g.answer, request.max_tokens);
        g.finish_reason = FinishReason::Length;
        counted = request.max_tokens;
    }
    g.token_count = counted;
    if (response.contains("usage") && response["usage"].contains("completion_tokens")) {
        int reported = response["usage"]["completion_tokens"].get<int>();
        if (reported > 0 && reported <= request.max_tokens && counted > 0) g.token_count = reported;
    }
    cache_.put(key, to_json(g).dump());
    return g;
}

FirstTokenLogits InferenceClient::first_token_logits(std::string_view prompt, std::string_view query_id) {
    if (config_.top_logprobs < 2) throw CapabilityError("top_logprobs must be >= 2 to score Yes/No");
    const std::string qid(query_id);
    const auto key = FieldHasher{}.add("logits").add(config_.model_id).add(prompt).add(config_.top_logprobs).hex();

    auto parse = [&](const json& entry) {
        FirstTokenLogits out;
        out.query_id = qid;
        for (const auto& c : entry) out.candidates.push_back({c.at("token").get<std::string>(), c.at("logprob").get<double>()});
        out.k = static_cast<int>(out.candidates.size());
        return out;
    };

    std::lock_guard key_lock(key_mutex(key));
    if (auto hit = cache_.get(key)) {
        ++cache_hits_;
        return parse(json::parse(*hit));
    }
    ++cache_misses_;

    json body{{"model", config_.model_id},
              {"messages", json::array({json{{"role", "user"}, {"content", prompt}}})},
              {"max_tokens", 1},
              {"temperature", 0},
              {"logprobs", true},
              {"top_logprobs", config_.top_logprobs}};
    json response = call_with_retries(body, qid);
    json top;
    try {
        const auto& lp = response.at("choices").at(0).at("logprobs");
        if (lp.is_null()) throw CapabilityError("endpoint returned no logprobs");
        top = lp.at("content").at(0).at("top_logprobs");
    } catch (const json::exception&) {
        throw CapabilityError("endpoint does not report per-token top logprobs");
    }
    if (!top.is_array() || top.size() < 2) {
        throw CapabilityError("endpoint reported " + std::to_string(top.is_array() ? top.size() : 0) +
                              " top logprobs; at least 2 are needed");
    }
    auto out = parse(top);
    for (std::size_t i = 1; i < out.candidates.size(); ++i) {
        if (out.candidates[i].logprob > out.candidates[i - 1].logprob)
            throw BackendError(qid, "top logprobs are not sorted in descending order");
    }
    cache_.put(key, top.dump());
    return out;
}

BatchResult InferenceClient::batch_run(const std::vector<GenerationRequest>& requests) {
    BatchResult out;
    out.results.resize(requests.size());
    std::vector<std::optional<BatchItemError>> errors(requests.size());
    bounded_parallel_for(requests.size(), config_.max_parallel_requests, [&](std::size_t i) {
        try {
            out.results[i] = generate(requests[i]);
        } catch (const std::exception& e) {
            errors[i] = BatchItemError{i, requests[i].query_id, e.what()};
        }
    });
    for (auto& e : errors) {
        if (e) out.failures.push_back(std::move(*e));
    }
    return out;
}

}  // namespace ikgate
