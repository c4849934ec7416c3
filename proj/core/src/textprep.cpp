#include "bunow/textprep.hpp"

#include <array>

namespace bunow {

namespace {

struct FilterTable {
    std::array<bool, 256> is_filter{};
    constexpr FilterTable() {
        for (char c : kFilterChars) {
            is_filter[static_cast<unsigned char>(c)] = true;
        }
    }
};

constexpr FilterTable kTable{};

inline bool ascii_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\v' || c == '\f' || c == '\r';
}

}  // namespace

bool is_filter_char(char c) {
    return kTable.is_filter[static_cast<unsigned char>(c)];
}

std::string normalize(std::string_view text) {
    std::string out;
    out.resize(text.size());
    for (size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (kTable.is_filter[static_cast<unsigned char>(c)]) {
            out[i] = ' ';
        } else if (c >= 'A' && c <= 'Z') {
            out[i] = static_cast<char>(c - 'A' + 'a');
        } else {
            out[i] = c;
        }
    }
    return out;
}

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    size_t i = 0;
    const size_t n = text.size();
    while (i < n) {
        while (i < n && ascii_space(text[i])) ++i;
        size_t start = i;
        while (i < n && !ascii_space(text[i])) ++i;
        if (i > start) tokens.emplace_back(text.substr(start, i - start));
    }
    return tokens;
}

}  // namespace bunow
