#include "model/answer_decoder.hpp"

#include <stdexcept>

namespace qagen::model {

void AnswerDecoder::init(ParameterStore& store, Rng& rng) const {
  store.add_glorot(prefix_ + ".zproj",
                   dims_.z_a_blocks * dims_.z_a_classes, dims_.d_ctx, rng);
  store.add(prefix_ + ".zproj_b", Tensor::zeros(1, dims_.d_ctx));
  lstm_.init(store, rng);
  store.add_glorot(prefix_ + ".start_w", dims_.d_answer_hidden(), 1, rng);
  store.add(prefix_ + ".start_b", Tensor::zeros(1, 1));
  store.add_glorot(prefix_ + ".end_w", dims_.d_answer_hidden(), 1, rng);
  store.add(prefix_ + ".end_b", Tensor::zeros(1, 1));
}

Var AnswerDecoder::project_latent(Graph& g, Var z_y) const {
  const Tensor& z = g.value(z_y);
  std::vector<Var> cols;
  cols.reserve(z.rows);
  for (int r = 0; r < z.rows; ++r) cols.push_back(g.row(z_y, r));
  Var flat = g.concat_cols(cols);  // 1 x blocks*classes
  return g.add_rowvec(g.matmul(flat, g.param(prefix_ + ".zproj")), g.param(prefix_ + ".zproj_b"));
}

Var AnswerDecoder::heuristic_match(Graph& g, Var e_ctx, Var z_row) {
  const Tensor& E = g.value(e_ctx);
  const Tensor& Z = g.value(z_row);
  if (Z.rows != 1 || Z.cols != E.cols)
    throw std::invalid_argument("heuristic_match dimension mismatch");
  // Broadcast z over the M rows.
  std::vector<Var> reps(E.rows, z_row);
  Var zmat = g.concat_rows(reps);
  Var diff = g.abs(g.sub(e_ctx, zmat));
  Var prod = g.cmul(e_ctx, zmat);
  return g.concat_cols({e_ctx, zmat, diff, prod});
}

AnswerDecoder::Encoded AnswerDecoder::predict_span(Graph& g, Var matched,
                                                   const Tensor* mask) const {
  SequenceEncoding enc = lstm_.encode(g, matched, mask);
  Var start = g.transpose(g.add_rowvec(g.matmul(enc.states, g.param(prefix_ + ".start_w")),
                                       g.param(prefix_ + ".start_b")));
  Var end = g.transpose(g.add_rowvec(g.matmul(enc.states, g.param(prefix_ + ".end_w")),
                                     g.param(prefix_ + ".end_b")));
  return {enc.states, {start, end}};
}

Var AnswerDecoder::answer_nll(Graph& g, const SpanLogitVars& logits, std::pair<int, int> span,
                              const Tensor* mask) {
  Var s = g.masked_nll(logits.start, span.first, mask);
  Var e = g.masked_nll(logits.end, span.second, mask);
  return g.add(s, e);
}

std::optional<std::pair<int, int>> decode_span(const Tensor& start_logits,
                                               const Tensor& end_logits, int max_answer_len,
                                               const Tensor* mask) {
  if (max_answer_len < 1) throw std::invalid_argument("max_answer_len must be >= 1");
  int m = start_logits.cols;
  std::optional<std::pair<int, int>> best;
  double best_score = 0.0;
  for (int s = 0; s < m; ++s) {
    if (mask && (*mask)(0, s) == 0.0) continue;
    for (int e = s; e < m && e - s < max_answer_len; ++e) {
      if (mask && (*mask)(0, e) == 0.0) break;
      double score = start_logits(0, s) + end_logits(0, e);
      if (!best || score > best_score) {
        best = {s, e};
        best_score = score;
      }
    }
  }
  return best;
}

}  // namespace qagen::model
