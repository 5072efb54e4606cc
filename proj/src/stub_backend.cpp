#include "ikgate/stub_backend.hpp"

#include "ikgate/teacher.hpp"
#include "ikgate/tokenizer.hpp"

#include <algorithm>
#include <thread>

namespace ikgate {

using nlohmann::json;

StubChatTransport::StubChatTransport(StubResponder responder, std::string model_id)
    : responder_(std::move(responder)), model_id_(std::move(model_id)) {}

json StubChatTransport::post_chat(const json& body) {
    ++calls_;
    std::size_t now = ++in_flight_;
    std::size_t seen = max_in_flight_;
    while (now > seen && !max_in_flight_.compare_exchange_weak(seen, now)) {
    }
    struct Leave {
        std::atomic<std::size_t>& n;
        ~Leave() { --n; }
    } leave{in_flight_};

    if (latency_.count() > 0) std::this_thread::sleep_for(latency_);
    if (fail_next_ > 0 && fail_next_-- > 0) throw TransportError("stub: injected transport failure", true, 503);

    std::string prompt;
    const auto& messages = body.at("messages");
    for (auto it = messages.rbegin(); it != messages.rend(); ++it) {
        if (it->value("role", "") == "user") {
            prompt = it->at("content").get<std::string>();
            break;
        }
    }
    const int max_tokens = body.value("max_tokens", 128);
    StubReply reply = responder_(prompt);

    const auto& tok = default_tokenizer();
    std::string content = reply.content;
    std::string finish = "stop";
    if (tok.count(content) > static_cast<std::size_t>(max_tokens)) {
        content = tok.truncate(content, max_tokens);
        finish = "length";
    }
    const auto completion_tokens = tok.count(content);

    json choice{{"index", 0},
                {"message", {{"role", "assistant"}, {"content", content}}},
                {"finish_reason", finish},
                {"logprobs", nullptr}};
    if (body.value("logprobs", false) && !reply.first_token_top.empty()) {
        auto top = reply.first_token_top;
        std::stable_sort(top.begin(), top.end(), [](const auto& a, const auto& b) { return a.logprob > b.logprob; });
        const int wanted = std::min(body.value("top_logprobs", 0), max_top_logprobs_);
        if (static_cast<int>(top.size()) > wanted) top.resize(std::max(wanted, 0));
        json top_json = json::array();
        for (const auto& t : top) top_json.push_back({{"token", t.token}, {"logprob", t.logprob}});
        json first{{"token", top.empty() ? std::string{} : top.front().token},
                   {"logprob", top.empty() ? 0.0 : top.front().logprob},
                   {"top_logprobs", top_json}};
        choice["logprobs"] = {{"content", json::array({first})}};
    }
    return json{{"id", "stub-" + std::to_string(calls_.load())},
                {"object", "chat.completion"},
                {"model", model_id_},
                {"choices", json::array({choice})},
                {"usage",
                 {{"prompt_tokens", tok.count(prompt)},
                  {"completion_tokens", completion_tokens},
                  {"total_tokens", tok.count(prompt) + completion_tokens}}}};
}

StubResponder fixed_responder(std::string content, std::vector<TokenLogprob> first_token_top) {
    return [content = std::move(content), top = std::move(first_token_top)](const std::string&) {
        return StubReply{content, top};
    };
}

namespace {

std::string line_after(const std::string& text, std::string_view label) {
    auto pos = text.find(label);
    if (pos == std::string::npos) return {};
    pos += label.size();
    auto end = text.find('\n', pos);
    return text.substr(pos, end == std::string::npos ? std::string::npos : end - pos);
}

}  // namespace

StubResponder toy_generator_responder(const std::vector<QueryRecord>& records) {
    auto answers = std::make_shared<std::unordered_map<std::string, std::string>>();
    for (const auto& r : records) {
        if (r.extra.contains("toy_answer") && r.extra["toy_answer"].is_string())
            answers->emplace(r.question, r.extra["toy_answer"].get<std::string>());
    }
    return [answers](const std::string& prompt) {
        if (prompt.find("Document 1: ") != std::string::npos) {
            auto doc = line_after(prompt, "Document 1: ");
            auto stop = doc.find(" .");
            auto sentence = doc.substr(0, stop == std::string::npos ? doc.size() : stop + 2);
            return StubReply{"According to the documents , " + sentence, {}};
        }
        auto question = line_after(prompt, "Question: ");
        auto it = answers->find(question);
        return StubReply{it == answers->end() ? "I don't know." : it->second, {}};
    };
}

StubResponder toy_judge_responder() {
    return [](const std::string& prompt) {
        auto golds_line = line_after(prompt, "Reference answers: ");
        auto candidate = line_after(prompt, "Candidate answer: ");
        std::vector<std::string> golds;
        std::size_t start = 0;
        while (start <= golds_line.size()) {
            auto bar = golds_line.find(" | ", start);
            auto g = golds_line.substr(start, bar == std::string::npos ? std::string::npos : bar - start);
            if (!g.empty()) golds.push_back(g);
            if (bar == std::string::npos) break;
            start = bar + 3;
        }
        if (golds.empty()) return StubReply{"I cannot grade this.", {}};
        bool correct = match_metric(candidate, golds) == 1.0;
        if (!correct) {
            try {
                correct = recall_metric(candidate, golds) >= 0.5;
            } catch (const Error&) {
            }
        }
        return StubReply{correct ? "Score: 1" : "Score: 0", {}};
    };
}

}  // namespace ikgate
