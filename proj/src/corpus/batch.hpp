#pragma once

#include <cstdint>
#include <vector>

#include "core/tensor.hpp"
#include "corpus/squad.hpp"

namespace qagen::corpus {

struct IntMat {
  int rows = 0, cols = 0;
  std::vector<int> v;
  IntMat() = default;
  IntMat(int r, int c) : rows(r), cols(c), v(static_cast<size_t>(r) * c, 0) {}
  int& at(int r, int c) { return v[static_cast<size_t>(r) * cols + c]; }
  int at(int r, int c) const { return v[static_cast<size_t>(r) * cols + c]; }
};

struct Batch {
  IntMat context_ids;     // B x M_max, PAD-filled tails
  IntMat question_ids;    // B x N_max
  IntMat token_type_ids;  // B x M_max
  IntMat spans;           // B x 2, inclusive token indices
  Tensor context_mask;    // 1 on real positions
  Tensor question_mask;
  std::vector<int> example_indices;  // into the source example list
  int size() const { return context_ids.rows; }
};

// Shuffles with the seed, then chunks; every example appears exactly once.
std::vector<Batch> build_batches(const std::vector<TokenizedExample>& examples, int batch_size,
                                 uint64_t shuffle_seed);

}  // namespace qagen::corpus
