#include "model/question_decoder.hpp"

#include <stdexcept>

namespace qagen::model {

void QGEncoder::init(ParameterStore& store, Rng& rng) const {
  l0_.init(store, rng);
  l1_.init(store, rng);
  int dx = dims_.qg_dec_width();
  store.add_glorot(prefix_ + ".ws", dx, dx, rng);
  store.add_glorot(prefix_ + ".wf", 2 * dx, dx, rng);
  store.add(prefix_ + ".bf", Tensor::zeros(1, dx));
  store.add_glorot(prefix_ + ".wg", 2 * dx, dx, rng);
  store.add(prefix_ + ".bg", Tensor::zeros(1, dx));
}

Var gated_self_attention(Graph& g, Var h, const Tensor* mask, const std::string& prefix) {
  Var scores = g.matmul_nt(g.matmul(h, g.param(prefix + ".ws")), h);
  Var attn = g.softmax_rows(scores, mask);  // masked keys get zero weight
  Var mixed = g.matmul(attn, h);
  Var cat = g.concat_cols({h, mixed});
  Var fused = g.tanh(g.add_rowvec(g.matmul(cat, g.param(prefix + ".wf")),
                                  g.param(prefix + ".bf")));
  Var gate = g.sigmoid(g.add_rowvec(g.matmul(cat, g.param(prefix + ".wg")),
                                    g.param(prefix + ".bg")));
  Var ones = g.input(Tensor::filled(g.value(gate).rows, g.value(gate).cols, 1.0));
  return g.add(g.cmul(gate, fused), g.cmul(g.sub(ones, gate), h));
}

AttentionOut attention_context(Graph& g, Var d, Var h_hat, const Tensor* mask,
                               const std::string& wa_param) {
  Var r = g.matmul_nt(g.matmul(d, g.param(wa_param)), h_hat);  // 1 x M
  AttentionOut out;
  out.attn = g.softmax_rows(r, mask);
  out.context = g.matmul(out.attn, h_hat);
  return out;
}

Var QGEncoder::encode(Graph& g, Var e_ctx, const Tensor* mask) const {
  Var h = l0_.encode(g, e_ctx, mask).states;
  h = l1_.encode(g, h, mask).states;  // M x d_x
  return gated_self_attention(g, h, mask, prefix_);
}

void QGDecoder::init(ParameterStore& store, Rng& rng) const {
  int dx = dims_.qg_dec_width();
  for (int l = 0; l < 2; ++l) {
    std::string lp = prefix_ + ".init" + std::to_string(l);
    store.add_glorot(lp + ".w", dims_.z_q_dim, dx, rng);
    store.add(lp + ".b", Tensor::zeros(1, dx));
    std::string cell = prefix_ + ".cell" + std::to_string(l);
    store.add_glorot(cell + ".wx", l == 0 ? dims_.d_emb : dx, 4 * dx, rng);
    store.add_glorot(cell + ".wh", dx, 4 * dx, rng);
    Tensor b = Tensor::zeros(1, 4 * dx);
    for (int c = dx; c < 2 * dx; ++c) b(0, c) = 1.0;
    store.add(cell + ".b", std::move(b));
  }
  store.add_glorot(prefix_ + ".wa", dx, dx, rng);
  store.add_glorot(prefix_ + ".maxout1.w", 2 * dx, dims_.d_emb, rng);
  store.add(prefix_ + ".maxout1.b", Tensor::zeros(1, dims_.d_emb));
  store.add_glorot(prefix_ + ".maxout2.w", 2 * dx, dims_.d_emb, rng);
  store.add(prefix_ + ".maxout2.b", Tensor::zeros(1, dims_.d_emb));
  store.add_glorot(prefix_ + ".gate.w", 2 * dx, 1, rng);
  store.add(prefix_ + ".gate.b", Tensor::zeros(1, 1));
}

QGDecoderState QGDecoder::init_state(Graph& g, Var z_x) const {
  int dx = dims_.qg_dec_width();
  QGDecoderState st;
  Var zero = g.input(Tensor::zeros(1, dx));
  st.l0.h = g.add_rowvec(g.matmul(z_x, g.param(prefix_ + ".init0.w")),
                         g.param(prefix_ + ".init0.b"));
  st.l1.h = g.add_rowvec(g.matmul(z_x, g.param(prefix_ + ".init1.w")),
                         g.param(prefix_ + ".init1.b"));
  st.l0.c = zero;
  st.l1.c = zero;
  return st;
}

Var QGDecoder::embed_token(Graph& g, int token_id) const {
  return emb_->embed(g, {token_id}, {0});
}

Var QGDecoder::copy_merge(Graph& g, Var vocab_dist, Var attn,
                          const std::vector<int>& context_ids, Var gate, int vocab_size) {
  Var scores = g.copy_max_scores(attn, context_ids, vocab_size);
  Var copy_dist = g.mul_scalar(scores, g.reciprocal(g.sum_all(scores)));
  Var one_minus = g.add_const(g.scale(gate, -1.0), 1.0);
  return g.add(g.mul_scalar(copy_dist, gate), g.mul_scalar(vocab_dist, one_minus));
}

QGStep QGDecoder::step(Graph& g, QGDecoderState state, Var prev_token_emb, Var h_hat,
                       const std::vector<int>& context_ids, const Tensor* mask) const {
  QGStep out;
  out.state.l0 = lstm_step(g, prev_token_emb, state.l0, prefix_ + ".cell0");
  out.state.l1 = lstm_step(g, out.state.l0.h, state.l1, prefix_ + ".cell1");
  Var d = out.state.l1.h;  // 1 x d_x

  AttentionOut att = attention_context(g, d, h_hat, mask, prefix_ + ".wa");
  out.attn = att.attn;
  out.context = att.context;  // 1 x d_x

  Var cat = g.concat_cols({d, out.context});
  Var m1 = g.add_rowvec(g.matmul(cat, g.param(prefix_ + ".maxout1.w")),
                        g.param(prefix_ + ".maxout1.b"));
  Var m2 = g.add_rowvec(g.matmul(cat, g.param(prefix_ + ".maxout2.w")),
                        g.param(prefix_ + ".maxout2.b"));
  out.fused = g.emax(m1, m2);  // 1 x d_emb

  Var vocab_logits = g.matmul_nt(out.fused, g.param(emb_->word_table()));
  Var vocab_dist = g.softmax_rows(vocab_logits);
  out.gate = g.sigmoid(g.add_rowvec(g.matmul(cat, g.param(prefix_ + ".gate.w")),
                                    g.param(prefix_ + ".gate.b")));
  out.dist = copy_merge(g, vocab_dist, out.attn, context_ids, out.gate, emb_->vocab_size());
  return out;
}

QGDecoder::TeacherForced QGDecoder::question_nll(Graph& g, const std::vector<int>& question_ids,
                                                 Var z_x, Var h_hat,
                                                 const std::vector<int>& context_ids,
                                                 const Tensor* mask) const {
  if (question_ids.size() < 2 || question_ids.front() != corpus::Vocabulary::kBos ||
      question_ids.back() != corpus::Vocabulary::kEos)
    throw std::invalid_argument("question must be BOS ... EOS");
  TeacherForced tf;
  QGDecoderState st = init_state(g, z_x);
  std::vector<Var> step_losses;
  for (size_t j = 1; j < question_ids.size(); ++j) {
    Var prev = embed_token(g, question_ids[j - 1]);
    QGStep s = step(g, st, prev, h_hat, context_ids, mask);
    st = s.state;
    int target = question_ids[j];
    step_losses.push_back(g.scale(g.log_clamped(g.pick(s.dist, 0, target)), -1.0));
    tf.fused.push_back(s.fused);
    const Tensor& dist = g.value(s.dist);
    int best = 0;
    for (int c = 1; c < dist.cols; ++c)
      if (dist(0, c) > dist(0, best)) best = c;
    tf.correct += best == target ? 1 : 0;
    tf.total += 1;
  }
  Var total = step_losses[0];
  for (size_t k = 1; k < step_losses.size(); ++k) total = g.add(total, step_losses[k]);
  tf.nll = total;
  return tf;
}

std::vector<int> QGDecoder::greedy_decode(Graph& g, Var z_x, Var h_hat,
                                          const std::vector<int>& context_ids, int max_len,
                                          const Tensor* mask) const {
  std::vector<int> out;
  QGDecoderState st = init_state(g, z_x);
  int prev = corpus::Vocabulary::kBos;
  for (int j = 0; j < max_len; ++j) {
    QGStep s = step(g, st, embed_token(g, prev), h_hat, context_ids, mask);
    st = s.state;
    const Tensor& dist = g.value(s.dist);
    int best = corpus::Vocabulary::kUnk;
    for (int c = 0; c < dist.cols; ++c) {
      if (c == corpus::Vocabulary::kPad || c == corpus::Vocabulary::kBos) continue;
      if (dist(0, c) > dist(0, best)) best = c;
    }
    if (best == corpus::Vocabulary::kUnk) {
      // never emit UNK when some context token is copyable
      const Tensor& attn = g.value(s.attn);
      int pick = -1;
      double pick_w = 0.0;
      for (size_t m = 0; m < context_ids.size(); ++m) {
        if (context_ids[m] == corpus::Vocabulary::kUnk) continue;
        if (attn(0, static_cast<int>(m)) > pick_w) {
          pick_w = attn(0, static_cast<int>(m));
          pick = context_ids[m];
        }
      }
      if (pick >= 0) best = pick;
    }
    if (best == corpus::Vocabulary::kEos) break;
    out.push_back(best);
    prev = best;
  }
  return out;
}

}  // namespace qagen::model
