#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace bunow {

// Fixed-width big-endian binary expansion of a word ID. bits[0] is the
// most significant bit; the all-zero vector is the padding/overflow code.
using BunowVector = std::vector<std::uint8_t>;

BunowVector encode_id(std::uint32_t id, int k);
std::uint32_t decode_vector(const BunowVector& v);

// Maps each distinct training word to a serial integer ID (first ID is 1;
// 0 is reserved for padding). After the training build the bit width k and
// the maximum document length are frozen; unseen words admitted at test
// time extend the map but never change k.
class Vocabulary {
public:
    Vocabulary() = default;

    static Vocabulary build(const std::vector<std::vector<std::string>>& corpus);

    std::optional<std::uint32_t> word_id(std::string_view word) const;

    // Inserts an unseen word with the next serial ID if it still fits in k
    // bits, returns nullopt on overflow (caller encodes an all-zero row).
    std::optional<std::uint32_t> admit_unseen(const std::string& word);

    std::uint32_t size() const { return next_id_ - 1; }
    int k() const { return k_; }
    std::uint32_t max_doc_len() const { return max_doc_len_; }
    bool frozen_k() const { return frozen_k_; }
    std::uint32_t next_id() const { return next_id_; }

    const std::vector<std::string>& words() const { return id_to_word_; }

    void save(const std::string& path) const;
    static Vocabulary load(const std::string& path);

private:
    struct StringHash {
        using is_transparent = void;
        size_t operator()(std::string_view sv) const {
            return std::hash<std::string_view>{}(sv);
        }
    };
    std::unordered_map<std::string, std::uint32_t, StringHash, std::equal_to<>> word_to_id_;
    std::vector<std::string> id_to_word_;  // index i holds the word with ID i+1
    std::uint32_t next_id_ = 1;
    int k_ = 0;
    std::uint32_t max_doc_len_ = 0;
    bool frozen_k_ = false;
};

}  // namespace bunow
