#include "bunow/vocab.hpp"

#include <algorithm>
#include <bit>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace bunow {

BunowVector encode_id(std::uint32_t id, int k) {
    if (k <= 0 || k > 32 || (k < 32 && id >= (std::uint64_t{1} << k))) {
        throw std::invalid_argument("ID exceeds bit width");
    }
    BunowVector bits(static_cast<size_t>(k));
    for (int i = 0; i < k; ++i) {
        bits[static_cast<size_t>(k - 1 - i)] = static_cast<std::uint8_t>((id >> i) & 1u);
    }
    return bits;
}

std::uint32_t decode_vector(const BunowVector& v) {
    std::uint32_t id = 0;
    for (std::uint8_t b : v) {
        if (b > 1) throw std::invalid_argument("invalid bit value");
        id = (id << 1) | b;
    }
    return id;
}

Vocabulary Vocabulary::build(const std::vector<std::vector<std::string>>& corpus) {
    if (corpus.empty()) throw std::invalid_argument("empty training corpus");

    Vocabulary vocab;
    for (const auto& doc : corpus) {
        for (const auto& word : doc) {
            auto [it, inserted] = vocab.word_to_id_.try_emplace(word, vocab.next_id_);
            if (inserted) {
                vocab.id_to_word_.push_back(word);
                ++vocab.next_id_;
            }
        }
        vocab.max_doc_len_ = std::max(vocab.max_doc_len_,
                                      static_cast<std::uint32_t>(doc.size()));
    }
    // Smallest k with 2^k > largest ID; equals ceil(log2(V + 1)).
    vocab.k_ = static_cast<int>(std::bit_width(std::uint32_t{vocab.size()}));
    vocab.frozen_k_ = true;
    return vocab;
}

std::optional<std::uint32_t> Vocabulary::word_id(std::string_view word) const {
    auto it = word_to_id_.find(word);
    if (it == word_to_id_.end()) return std::nullopt;
    return it->second;
}

std::optional<std::uint32_t> Vocabulary::admit_unseen(const std::string& word) {
    if (!frozen_k_) throw std::logic_error("vocabulary not built");
    if (word_to_id_.find(word) != word_to_id_.end()) throw std::invalid_argument("word already in vocabulary");
    if (next_id_ >= (std::uint64_t{1} << k_)) return std::nullopt;  // needs k+1 bits
    const std::uint32_t id = next_id_++;
    word_to_id_.emplace(word, id);
    id_to_word_.push_back(word);
    return id;
}

void Vocabulary::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open vocabulary file for writing: " + path);
    out << "bunow-vocab v1 k=" << k_ << " max_doc_len=" << max_doc_len_ << "\n";
    for (const auto& word : id_to_word_) out << word << "\n";
    if (!out) throw std::runtime_error("failed writing vocabulary file: " + path);
}

Vocabulary Vocabulary::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open vocabulary file: " + path);

    std::string header;
    if (!std::getline(in, header)) throw std::runtime_error("empty vocabulary file: " + path);

    Vocabulary vocab;
    int k = 0;
    std::uint32_t max_len = 0;
    {
        std::istringstream hs(header);
        std::string magic, version, kfield, lfield;
        hs >> magic >> version >> kfield >> lfield;
        if (magic != "bunow-vocab" || version != "v1" ||
            kfield.rfind("k=", 0) != 0 || lfield.rfind("max_doc_len=", 0) != 0) {
            throw std::runtime_error("bad vocabulary header: " + header);
        }
        k = std::stoi(kfield.substr(2));
        max_len = static_cast<std::uint32_t>(std::stoul(lfield.substr(12)));
    }

    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto [it, inserted] = vocab.word_to_id_.try_emplace(line, vocab.next_id_);
        if (!inserted) throw std::runtime_error("duplicate word in vocabulary file: " + line);
        vocab.id_to_word_.push_back(line);
        ++vocab.next_id_;
    }
    if (k < static_cast<int>(std::bit_width(std::uint32_t{vocab.size()}))) {
        throw std::runtime_error("vocabulary header k too small for word count");
    }
    vocab.k_ = k;
    vocab.max_doc_len_ = max_len;
    vocab.frozen_k_ = true;
    return vocab;
}

}  // namespace bunow
