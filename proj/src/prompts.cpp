#include "ikgate/prompts.hpp"

#include "ikgate/error.hpp"
#include "ikgate_assets.hpp"

namespace ikgate {

const PromptTemplate& norag_prompt_template() {
    static const PromptTemplate t{"norag-v1", assets::kNoragPromptV1};
    return t;
}

const PromptTemplate& rag_prompt_template() {
    static const PromptTemplate t{"rag-v1", assets::kRagPromptV1};
    return t;
}

const PromptTemplate& judge_prompt_template() {
    static const PromptTemplate t{"judge-v1", assets::kJudgePromptV1};
    return t;
}

const PromptTemplate& judge_reprompt_template() {
    static const PromptTemplate t{"judge-reprompt-v1", assets::kJudgeRepromptV1};
    return t;
}

const PromptTemplate& scorer_prompt_template() {
    static const PromptTemplate t{"scorer-v1", assets::kScorerPromptV1};
    return t;
}

std::string render_template(std::string_view text,
                            std::span<const std::pair<std::string_view, std::string_view>> values) {
    std::string out;
    out.reserve(text.size());
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto open = text.find('{', pos);
        if (open == std::string_view::npos) break;
        auto close = text.find('}', open);
        if (close == std::string_view::npos) break;
        auto key = text.substr(open + 1, close - open - 1);
        const std::string_view* value = nullptr;
        for (const auto& [k, v] : values) {
            if (k == key) value = &v;
        }
        out.append(text.substr(pos, open - pos));
        if (value) {
            out.append(*value);
        } else {
            out.append(text.substr(open, close - open + 1));
        }
        pos = close + 1;
    }
    out.append(text.substr(pos));
    return out;
}

std::string render_norag_prompt(std::string_view question) {
    const std::pair<std::string_view, std::string_view> values[] = {{"question", question}};
    return render_template(norag_prompt_template().text, values);
}

std::string render_rag_prompt(std::string_view question, std::span<const std::string> documents) {
    if (documents.empty()) throw RangeError("RAG prompt needs at least one document");
    std::string docs;
    for (std::size_t i = 0; i < documents.size(); ++i) {
        if (i) docs.push_back('\n');
        docs += "Document " + std::to_string(i + 1) + ": " + documents[i];
    }
    const std::pair<std::string_view, std::string_view> values[] = {{"question", question}, {"documents", docs}};
    return render_template(rag_prompt_template().text, values);
}

std::string render_scorer_prompt(std::string_view question, std::string_view answer_prefix) {
    const std::pair<std::string_view, std::string_view> values[] = {{"question", question},
                                                                    {"answer_prefix", answer_prefix}};
    return render_template(scorer_prompt_template().text, values);
}

}  // namespace ikgate
