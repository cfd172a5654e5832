#pragma once

#include <optional>
#include <string>
#include <utility>

#include "core/graph.hpp"
#include "core/rng.hpp"
#include "model/encoding.hpp"

namespace qagen::model {

struct SpanLogitVars {
  Var start;  // 1 x M
  Var end;    // 1 x M
};

// Span generator p(y|z_y,c): heuristic matching of contextual embeddings
// with the (projected) answer latent, a BiLSTM, and two linear span heads.
class AnswerDecoder {
 public:
  AnswerDecoder(std::string prefix, const ModelDims& dims)
      : prefix_(std::move(prefix)), dims_(dims),
        lstm_(prefix_ + ".lstm", 4 * dims.d_ctx, dims.enc_width) {}

  void init(ParameterStore& store, Rng& rng) const;

  // z_y (blocks x classes) flattened and projected into the embedding space.
  Var project_latent(Graph& g, Var z_y) const;

  // f_i = [e_i; z; |e_i - z|; e_i * z] for every context row e_i.
  static Var heuristic_match(Graph& g, Var e_ctx, Var z_row);

  struct Encoded {
    Var hidden;  // M x d_answer_hidden
    SpanLogitVars logits;
  };
  Encoded predict_span(Graph& g, Var matched, const Tensor* mask = nullptr) const;

  // -log p(y_s) - log p(y_e) under masked softmaxes of the two heads.
  static Var answer_nll(Graph& g, const SpanLogitVars& logits, std::pair<int, int> span,
                        const Tensor* mask = nullptr);

  int hidden_dim() const { return dims_.d_answer_hidden(); }

 private:
  std::string prefix_;
  ModelDims dims_;
  BiLstm lstm_;
};

// Highest start+end over {(s,e): s <= e, e-s < max_answer_len, unmasked};
// ties resolve to the lowest (s, then e). Empty when no pair is valid.
std::optional<std::pair<int, int>> decode_span(const Tensor& start_logits,
                                               const Tensor& end_logits, int max_answer_len,
                                               const Tensor* mask = nullptr);

}  // namespace qagen::model
