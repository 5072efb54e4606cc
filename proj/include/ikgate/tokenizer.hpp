#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace ikgate {

/// Token accounting used for answer prefixes and generation caps.
class Tokenizer {
public:
    virtual ~Tokenizer() = default;
    virtual std::string name() const = 0;
    virtual std::size_t count(std::string_view text) const = 0;
    /// First `n` tokens of `text` as a substring of the original text, so
    /// truncate(truncate(t, m), n) == truncate(t, min(m, n)).
    virtual std::string truncate(std::string_view text, std::size_t n) const = 0;
};

/// Tokens are maximal runs of non-whitespace. Leading whitespace is dropped;
/// the kept text ends at the last character of token `n`.
class WhitespaceTokenizer final : public Tokenizer {
public:
    std::string name() const override { return "whitespace"; }
    std::size_t count(std::string_view text) const override;
    std::string truncate(std::string_view text, std::size_t n) const override;
};

const Tokenizer& default_tokenizer();

}  // namespace ikgate
