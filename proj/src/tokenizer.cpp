#include "ikgate/tokenizer.hpp"

namespace ikgate {

namespace {
bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }
}  // namespace

std::size_t WhitespaceTokenizer::count(std::string_view text) const {
    std::size_t n = 0;
    bool in_token = false;
    for (char c : text) {
        if (is_space(c)) {
            in_token = false;
        } else if (!in_token) {
            in_token = true;
            ++n;
        }
    }
    return n;
}

std::string WhitespaceTokenizer::truncate(std::string_view text, std::size_t n) const {
    std::size_t begin = 0;
    while (begin < text.size() && is_space(text[begin])) ++begin;
    if (n == 0) return {};
    std::size_t seen = 0;
    std::size_t i = begin;
    while (i < text.size()) {
        while (i < text.size() && is_space(text[i])) ++i;
        if (i == text.size()) break;
        while (i < text.size() && !is_space(text[i])) ++i;
        if (++seen == n) break;
    }
    std::size_t end = i;
    while (end > begin && is_space(text[end - 1])) --end;
    return std::string(text.substr(begin, end - begin));
}

const Tokenizer& default_tokenizer() {
    static const WhitespaceTokenizer tok;
    return tok;
}

}  // namespace ikgate
