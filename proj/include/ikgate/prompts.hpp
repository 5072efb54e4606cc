#pragma once

#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ikgate {

/// Versioned prompt templates. Placeholders are `{name}`; each appears once.
struct PromptTemplate {
    std::string id;
    std::string text;
};

const PromptTemplate& norag_prompt_template();
const PromptTemplate& rag_prompt_template();
const PromptTemplate& judge_prompt_template();
const PromptTemplate& judge_reprompt_template();
/// Classifier input: question, newline, answer prefix. Shared with the trainer.
const PromptTemplate& scorer_prompt_template();

/// Replaces every `{key}` by its value. Values are inserted verbatim and are
/// not re-scanned, so a value containing braces is safe.
std::string render_template(std::string_view text,
                            std::span<const std::pair<std::string_view, std::string_view>> values);

std::string render_norag_prompt(std::string_view question);
std::string render_rag_prompt(std::string_view question, std::span<const std::string> documents);
std::string render_scorer_prompt(std::string_view question, std::string_view answer_prefix);

}  // namespace ikgate
