#include "model/encoding.hpp"

#include <cmath>
#include <stdexcept>

namespace qagen::model {

int true_length(const Tensor& mask) {
  int len = 0;
  for (int c = 0; c < mask.cols; ++c) {
    if (mask(0, c) != 0.0) {
      if (c != len) throw std::runtime_error("mask must be a contiguous prefix");
      ++len;
    }
  }
  return len;
}

void EmbeddingLayer::init(ParameterStore& store, Rng& rng, bool frozen) const {
  store.add(prefix_ + ".word", rng.normal_tensor(vocab_size_, d_emb_, 0.1), !frozen);
  store.add(prefix_ + ".type", rng.normal_tensor(2, d_emb_, 0.1), !frozen);
  store.add(prefix_ + ".pos", rng.normal_tensor(max_positions_, d_emb_, 0.1), !frozen);
}

Var EmbeddingLayer::embed(Graph& g, const std::vector<int>& ids,
                          const std::vector<int>& type_ids) const {
  if (ids.size() != type_ids.size()) throw std::invalid_argument("ids/type_ids length mismatch");
  if (ids.empty()) throw std::invalid_argument("cannot embed an empty sequence");
  if (static_cast<int>(ids.size()) > max_positions_)
    throw std::invalid_argument("sequence longer than the position table");
  std::vector<int> positions(ids.size());
  for (size_t i = 0; i < ids.size(); ++i) positions[i] = static_cast<int>(i);
  Var w = g.rows_lookup(prefix_ + ".word", ids);
  Var t = g.rows_lookup(prefix_ + ".type", type_ids);
  Var p = g.rows_lookup(prefix_ + ".pos", positions);
  return g.add(g.add(w, t), p);
}

void BiLstm::init(ParameterStore& store, Rng& rng) const {
  for (const char* dir : {".fwd", ".bwd"}) {
    store.add_glorot(prefix_ + dir + ".wx", input_dim_, 4 * width_, rng);
    store.add_glorot(prefix_ + dir + ".wh", width_, 4 * width_, rng);
    Tensor b = Tensor::zeros(1, 4 * width_);
    for (int c = width_; c < 2 * width_; ++c) b(0, c) = 1.0;  // forget gate
    store.add(prefix_ + dir + ".b", std::move(b));
  }
}

void BiLstm::init_tied(ParameterStore& store, Rng& rng) const {
  Tensor wx = rng.uniform_tensor(input_dim_, 4 * width_, -0.4, 0.4);
  Tensor wh = rng.uniform_tensor(width_, 4 * width_, -0.4, 0.4);
  Tensor b = Tensor::zeros(1, 4 * width_);
  for (const char* dir : {".fwd", ".bwd"}) {
    store.add(prefix_ + dir + ".wx", wx);
    store.add(prefix_ + dir + ".wh", wh);
    store.add(prefix_ + dir + ".b", b);
  }
}

LstmState lstm_step(Graph& g, Var x, LstmState prev, const std::string& prefix) {
  int w = g.value(prev.h).cols;
  Var gates = g.add_rowvec(
      g.add(g.matmul(x, g.param(prefix + ".wx")), g.matmul(prev.h, g.param(prefix + ".wh"))),
      g.param(prefix + ".b"));
  Var i = g.sigmoid(g.slice_cols(gates, 0, w));
  Var f = g.sigmoid(g.slice_cols(gates, w, w));
  Var o = g.sigmoid(g.slice_cols(gates, 2 * w, w));
  Var u = g.tanh(g.slice_cols(gates, 3 * w, w));
  Var c = g.add(g.cmul(f, prev.c), g.cmul(i, u));
  Var h = g.cmul(o, g.tanh(c));
  return {h, c};
}

SequenceEncoding BiLstm::encode(Graph& g, Var seq, const Tensor* mask) const {
  const Tensor& S = g.value(seq);
  int total = S.rows;
  if (total == 0) throw std::invalid_argument("cannot encode a zero-length sequence");
  int len = mask ? true_length(*mask) : total;
  if (len == 0) throw std::invalid_argument("mask excludes every position");
  if (mask && mask->cols != total) throw std::invalid_argument("mask length mismatch");

  Var zero = g.input(Tensor::zeros(1, width_));
  std::vector<Var> fwd(len), bwd(len);
  LstmState st{zero, zero};
  for (int t = 0; t < len; ++t) {
    st = lstm_step(g, g.row(seq, t), st, prefix_ + ".fwd");
    fwd[t] = st.h;
  }
  Var fwd_last = st.h;
  st = {zero, zero};
  for (int t = len - 1; t >= 0; --t) {
    st = lstm_step(g, g.row(seq, t), st, prefix_ + ".bwd");
    bwd[t] = st.h;
  }
  Var bwd_first = st.h;

  std::vector<Var> rows;
  rows.reserve(total);
  Var pad_row;
  for (int t = 0; t < total; ++t) {
    if (t < len) {
      rows.push_back(g.concat_cols({fwd[t], bwd[t]}));
    } else {
      if (!pad_row.valid()) pad_row = g.input(Tensor::zeros(1, 2 * width_));
      rows.push_back(pad_row);
    }
  }
  SequenceEncoding enc;
  enc.states = g.concat_rows(rows);
  enc.summary = g.concat_cols({fwd_last, bwd_first});
  return enc;
}

void ContextualEmbedder::init(ParameterStore& store, Rng& rng, bool frozen) const {
  store.add_glorot(prefix_ + ".proj", emb_->dim(), d_ctx_, rng, !frozen);
  for (int l = 0; l < layers_; ++l) {
    std::string lp = prefix_ + ".l" + std::to_string(l);
    store.add_glorot(lp + ".wq", d_ctx_, d_ctx_, rng, !frozen);
    store.add_glorot(lp + ".wk", d_ctx_, d_ctx_, rng, !frozen);
    store.add_glorot(lp + ".wv", d_ctx_, d_ctx_, rng, !frozen);
    store.add_glorot(lp + ".wo", d_ctx_, d_ctx_, rng, !frozen);
    store.add(lp + ".bo", Tensor::zeros(1, d_ctx_), !frozen);
  }
}

Var ContextualEmbedder::encode(Graph& g, const std::vector<int>& ids,
                               const std::vector<int>& type_ids, const Tensor* mask) const {
  Var x = g.matmul(emb_->embed(g, ids, type_ids), g.param(prefix_ + ".proj"));
  double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(d_ctx_));
  for (int l = 0; l < layers_; ++l) {
    std::string lp = prefix_ + ".l" + std::to_string(l);
    Var q = g.matmul(x, g.param(lp + ".wq"));
    Var k = g.matmul(x, g.param(lp + ".wk"));
    Var v = g.matmul(x, g.param(lp + ".wv"));
    Var scores = g.scale(g.matmul_nt(q, k), inv_sqrt);
    Var attn = g.softmax_rows(scores, mask);
    Var mixed = g.add(x, g.matmul(attn, v));
    x = g.tanh(g.add_rowvec(g.matmul(mixed, g.param(lp + ".wo")), g.param(lp + ".bo")));
  }
  return x;
}

}  // namespace qagen::model
