#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace bunow {

// Characters replaced by a space during normalization. ASCII punctuation
// minus the apostrophe, plus tab and newline.
inline constexpr std::string_view kFilterChars =
    "!\"#$%&()*+,-./:;<=>?@[\\]^_`{|}~\t\n";

bool is_filter_char(char c);

// Lowercases ASCII letters and replaces every filter character with a
// single space. Bytes outside ASCII pass through untouched, so UTF-8
// sequences survive intact. Idempotent.
std::string normalize(std::string_view text);

// Splits normalized text on runs of ASCII whitespace. Empty fragments are
// dropped; token order is preserved.
std::vector<std::string> tokenize(std::string_view text);

}  // namespace bunow
