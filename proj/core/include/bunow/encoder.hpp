#pragma once

#include <string>
#include <vector>

#include "bunow/tensor.hpp"
#include "bunow/vocab.hpp"

namespace bunow {

// max_doc_len x k matrix with entries in {0,1}. Row i is the bit pattern
// of token i's ID; rows past the last token stay zero (post padding) and
// tokens past max_doc_len are dropped.
using DocumentMatrix = Tensor;  // shape (max_doc_len, k)

// allow_admit routes unseen words through Vocabulary::admit_unseen (the
// test-time rule); with it off unseen words encode as zero rows and the
// call never mutates the vocabulary.
DocumentMatrix encode_document(Vocabulary& vocab, const std::vector<std::string>& tokens,
                               bool allow_admit);

// Stacks per-document matrices into a (batch, 1, max_doc_len, k) tensor.
Tensor encode_batch(Vocabulary& vocab, const std::vector<std::vector<std::string>>& docs,
                    bool allow_admit);

// Fills a caller-provided row-major (max_doc_len * k) buffer; shared by
// the two entry points above and by the training loop's batch assembly.
void encode_document_into(Vocabulary& vocab, const std::vector<std::string>& tokens,
                          bool allow_admit, float* out);

}  // namespace bunow
