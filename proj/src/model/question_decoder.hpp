#pragma once

#include <string>
#include <vector>

#include "core/graph.hpp"
#include "core/rng.hpp"
#include "corpus/vocab.hpp"
#include "model/encoding.hpp"

namespace qagen::model {

// scores = H Ws H^T (masked softmax over keys), att = scores*H,
// fused = tanh([H; att] Wf + bf), gate = sigmoid([H; att] Wg + bg),
// out = gate*fused + (1-gate)*H. Parameters live under `prefix`.
Var gated_self_attention(Graph& g, Var h, const Tensor* mask, const std::string& prefix);

// r = (d Wa) H^T, a = masked softmax(r), s = a H.
struct AttentionOut {
  Var attn;     // 1 x M
  Var context;  // 1 x d
};
AttentionOut attention_context(Graph& g, Var d, Var h_hat, const Tensor* mask,
                               const std::string& wa_param);

// Two-layer BiLSTM over the answer-aware contextual embedding, followed by
// gated self-attention.
class QGEncoder {
 public:
  QGEncoder(std::string prefix, const ModelDims& dims)
      : prefix_(std::move(prefix)), dims_(dims),
        l0_(prefix_ + ".l0", dims.d_ctx, dims.qg_enc_width),
        l1_(prefix_ + ".l1", 2 * dims.qg_enc_width, dims.qg_enc_width) {}

  void init(ParameterStore& store, Rng& rng) const;

  // M x d_x (d_x = decoder width).
  Var encode(Graph& g, Var e_ctx, const Tensor* mask = nullptr) const;

 private:
  std::string prefix_;
  ModelDims dims_;
  BiLstm l0_, l1_;
};

struct QGDecoderState {
  LstmState l0, l1;
};

struct QGStep {
  QGDecoderState state;
  Var attn;     // 1 x M simplex over unmasked positions
  Var context;  // s_j, 1 x d_x
  Var fused;    // d_hat_j, 1 x d_emb
  Var dist;     // final token distribution, 1 x V
  Var gate;     // 1 x 1 copy gate
};

// Two-layer LSTM decoder with bilinear attention over H-hat, a two-piece
// maxout readout tied to the frozen word embedding, and a maxout-pointer
// copy path (duplicate context tokens aggregate by max attention weight).
class QGDecoder {
 public:
  QGDecoder(std::string prefix, const ModelDims& dims, const EmbeddingLayer* emb)
      : prefix_(std::move(prefix)), dims_(dims), emb_(emb) {}

  void init(ParameterStore& store, Rng& rng) const;

  QGDecoderState init_state(Graph& g, Var z_x) const;

  QGStep step(Graph& g, QGDecoderState state, Var prev_token_emb, Var h_hat,
              const std::vector<int>& context_ids, const Tensor* mask = nullptr) const;

  // Merge in probability space: gate*copy + (1-gate)*vocab.
  static Var copy_merge(Graph& g, Var vocab_dist, Var attn, const std::vector<int>& context_ids,
                        Var gate, int vocab_size);

  struct TeacherForced {
    Var nll;                    // scalar sum over predicted tokens
    std::vector<Var> fused;     // d_hat per step (for the pair summary)
    int correct = 0, total = 0; // greedy-vs-gold token agreement
  };
  // question_ids must carry BOS first and EOS last.
  TeacherForced question_nll(Graph& g, const std::vector<int>& question_ids, Var z_x, Var h_hat,
                             const std::vector<int>& context_ids,
                             const Tensor* mask = nullptr) const;

  // Argmax decoding; stops on EOS or max_len. UNK is replaced by the best
  // copyable context token whenever one has probability mass.
  std::vector<int> greedy_decode(Graph& g, Var z_x, Var h_hat,
                                 const std::vector<int>& context_ids, int max_len,
                                 const Tensor* mask = nullptr) const;

  Var embed_token(Graph& g, int token_id) const;

  int dec_width() const { return dims_.qg_dec_width(); }

 private:
  std::string prefix_;
  ModelDims dims_;
  const EmbeddingLayer* emb_;
};

}  // namespace qagen::model
