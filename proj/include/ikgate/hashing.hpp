#pragma once

#include <string>
#include <string_view>

namespace ikgate {

/// Lowercase hex SHA-256 of `data`.
std::string sha256_hex(std::string_view data);

/// Hash of a sequence of fields; each field is length-prefixed so that
/// ("ab", "c") and ("a", "bc") never collide.
class FieldHasher {
public:
    FieldHasher& add(std::string_view field);
    FieldHasher& add(long long value);
    std::string hex() const;

private:
    std::string buffer_;
};

}  // namespace ikgate
