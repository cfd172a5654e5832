#include "corpus/batch.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <stdexcept>

namespace qagen::corpus {

std::vector<Batch> build_batches(const std::vector<TokenizedExample>& examples, int batch_size,
                                 uint64_t shuffle_seed) {
  if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
  std::vector<int> order(examples.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(shuffle_seed);
  std::shuffle(order.begin(), order.end(), rng);

  std::vector<Batch> out;
  for (size_t pos = 0; pos < order.size(); pos += batch_size) {
    size_t end = std::min(order.size(), pos + batch_size);
    int b = static_cast<int>(end - pos);
    int m_max = 0, n_max = 0;
    for (size_t k = pos; k < end; ++k) {
      const auto& ex = examples[order[k]];
      m_max = std::max(m_max, static_cast<int>(ex.context_ids.size()));
      n_max = std::max(n_max, static_cast<int>(ex.question_ids.size()));
    }
    Batch batch;
    batch.context_ids = IntMat(b, m_max);
    batch.question_ids = IntMat(b, n_max);
    batch.token_type_ids = IntMat(b, m_max);
    batch.spans = IntMat(b, 2);
    batch.context_mask = Tensor::zeros(b, m_max);
    batch.question_mask = Tensor::zeros(b, n_max);
    for (int r = 0; r < b; ++r) {
      const auto& ex = examples[order[pos + r]];
      batch.example_indices.push_back(order[pos + r]);
      for (size_t c = 0; c < ex.context_ids.size(); ++c) {
        batch.context_ids.at(r, static_cast<int>(c)) = ex.context_ids[c];
        batch.token_type_ids.at(r, static_cast<int>(c)) = ex.token_type_ids[c];
        batch.context_mask(r, static_cast<int>(c)) = 1.0;
      }
      for (size_t c = 0; c < ex.question_ids.size(); ++c) {
        batch.question_ids.at(r, static_cast<int>(c)) = ex.question_ids[c];
        batch.question_mask(r, static_cast<int>(c)) = 1.0;
      }
      batch.spans.at(r, 0) = ex.span_start;
      batch.spans.at(r, 1) = ex.span_end;
    }
    out.push_back(std::move(batch));
  }
  return out;
}

}  // namespace qagen::corpus
