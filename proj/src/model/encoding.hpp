#pragma once

#include <string>
#include <vector>

#include "core/graph.hpp"
#include "core/rng.hpp"
#include "model/dims.hpp"

namespace qagen::model {

// Word + token-type + position embedding tables under one name prefix.
// The tables are fixed during generator training (frozen by default).
class EmbeddingLayer {
 public:
  EmbeddingLayer(std::string prefix, int vocab_size, int d_emb, int max_positions)
      : prefix_(std::move(prefix)), vocab_size_(vocab_size), d_emb_(d_emb),
        max_positions_(max_positions) {}

  void init(ParameterStore& store, Rng& rng, bool frozen) const;

  // out[i] = word[ids[i]] + type[type_ids[i]] + pos[i]
  Var embed(Graph& g, const std::vector<int>& ids, const std::vector<int>& type_ids) const;

  std::string word_table() const { return prefix_ + ".word"; }
  int vocab_size() const { return vocab_size_; }
  int dim() const { return d_emb_; }

 private:
  std::string prefix_;
  int vocab_size_, d_emb_, max_positions_;
};

struct SequenceEncoding {
  Var states;   // T x 2*width, zero rows beyond the real length
  Var summary;  // [forward last, backward first] -> 1 x 2*width
};

// Single-layer bidirectional LSTM; both directions share the layout
// Wx[din,4w] Wh[w,4w] b[1,4w] with gate order i,f,o,g and forget bias 1.
class BiLstm {
 public:
  BiLstm(std::string prefix, int input_dim, int width)
      : prefix_(std::move(prefix)), input_dim_(input_dim), width_(width) {}

  void init(ParameterStore& store, Rng& rng) const;

  // mask: 1 x T with a contiguous prefix of ones; omitted means all real.
  SequenceEncoding encode(Graph& g, Var seq, const Tensor* mask = nullptr) const;

  // Ties both directions to the forward weights; test hook for the
  // reverse-input/reverse-states identity.
  void init_tied(ParameterStore& store, Rng& rng) const;

  int width() const { return width_; }

 private:
  std::string prefix_;
  int input_dim_, width_;
};

// One LSTM step; h and c are 1 x width rows.
struct LstmState {
  Var h, c;
};
LstmState lstm_step(Graph& g, Var x, LstmState prev, const std::string& prefix);

// Desk-scale contextual embedder: embedding -> linear projection -> stacked
// self-attention layers. Stands in for the paper's pretrained encoder behind
// the same call shape, so a stronger provider can replace it.
class ContextualEmbedder {
 public:
  ContextualEmbedder(std::string prefix, const EmbeddingLayer* emb, int d_ctx, int layers)
      : prefix_(std::move(prefix)), emb_(emb), d_ctx_(d_ctx), layers_(layers) {}

  void init(ParameterStore& store, Rng& rng, bool frozen) const;

  // M x d_ctx answer-aware contextual representations.
  Var encode(Graph& g, const std::vector<int>& ids, const std::vector<int>& type_ids,
             const Tensor* mask = nullptr) const;

  int dim() const { return d_ctx_; }

 private:
  std::string prefix_;
  const EmbeddingLayer* emb_;
  int d_ctx_, layers_;
};

int true_length(const Tensor& mask);

}  // namespace qagen::model
