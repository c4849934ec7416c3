#include "bunow/encoder.hpp"

#include <cstring>
#include <stdexcept>

namespace bunow {

namespace {

inline void write_bits(std::uint32_t id, int k, float* row) {
    for (int i = 0; i < k; ++i) {
        row[k - 1 - i] = static_cast<float>((id >> i) & 1u);
    }
}

}  // namespace

void encode_document_into(Vocabulary& vocab, const std::vector<std::string>& tokens,
                          bool allow_admit, float* out) {
    if (!vocab.frozen_k()) throw std::logic_error("vocabulary not built");
    const int k = vocab.k();
    const std::uint32_t max_len = vocab.max_doc_len();
    std::memset(out, 0, sizeof(float) * max_len * static_cast<std::uint32_t>(k));

    const size_t limit = std::min<size_t>(tokens.size(), max_len);
    for (size_t i = 0; i < limit; ++i) {
        std::uint32_t id = 0;
        if (auto found = vocab.word_id(tokens[i])) {
            id = *found;
        } else if (allow_admit) {
            if (auto admitted = vocab.admit_unseen(tokens[i])) id = *admitted;
            // overflow leaves the zero row
        }
        if (id != 0) write_bits(id, k, out + i * static_cast<size_t>(k));
    }
}

DocumentMatrix encode_document(Vocabulary& vocab, const std::vector<std::string>& tokens,
                               bool allow_admit) {
    DocumentMatrix m({static_cast<int>(vocab.max_doc_len()), vocab.k()});
    encode_document_into(vocab, tokens, allow_admit, m.data());
    return m;
}

Tensor encode_batch(Vocabulary& vocab, const std::vector<std::vector<std::string>>& docs,
                    bool allow_admit) {
    if (docs.empty()) throw std::invalid_argument("empty batch");
    const int len = static_cast<int>(vocab.max_doc_len());
    const int k = vocab.k();
    Tensor batch({static_cast<int>(docs.size()), 1, len, k});
    const size_t stride = static_cast<size_t>(len) * k;
    for (size_t i = 0; i < docs.size(); ++i) {
        encode_document_into(vocab, docs[i], allow_admit, batch.data() + i * stride);
    }
    return batch;
}

}  // namespace bunow
