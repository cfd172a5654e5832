#include "qa/qa_model.hpp"

#include <cmath>

#include "corpus/batch.hpp"
#include "model/answer_decoder.hpp"

namespace qagen::qa {

QaModel::QaModel(int vocab_size, const QaConfig& config)
    : vocab_size_(vocab_size), config_(config) {}

void QaModel::init(ParameterStore& store, Rng& rng) const {
  store.add(prefix_ + ".word", rng.normal_tensor(vocab_size_, config_.d, 0.1));
  store.add(prefix_ + ".pos", rng.normal_tensor(config_.max_positions, config_.d, 0.1));
  for (int l = 0; l < config_.layers; ++l) {
    std::string lp = prefix_ + ".l" + std::to_string(l);
    store.add_glorot(lp + ".wq", config_.d, config_.d, rng);
    store.add_glorot(lp + ".wk", config_.d, config_.d, rng);
    store.add_glorot(lp + ".wv", config_.d, config_.d, rng);
    store.add_glorot(lp + ".wo", 2 * config_.d, config_.d, rng);
    store.add(lp + ".bo", Tensor::zeros(1, config_.d));
  }
  store.add_glorot(prefix_ + ".start_w", config_.d, 1, rng);
  store.add(prefix_ + ".start_b", Tensor::zeros(1, 1));
  store.add_glorot(prefix_ + ".end_w", config_.d, 1, rng);
  store.add(prefix_ + ".end_b", Tensor::zeros(1, 1));
}

QaModel::SpanVars QaModel::forward(Graph& g, const std::vector<int>& context_ids,
                                   const std::vector<int>& question_ids) const {
  auto embed = [&](const std::vector<int>& ids) {
    std::vector<int> positions(ids.size());
    for (size_t i = 0; i < ids.size(); ++i) positions[i] = static_cast<int>(i);
    return g.add(g.rows_lookup(prefix_ + ".word", ids), g.rows_lookup(prefix_ + ".pos", positions));
  };
  Var c = embed(context_ids);   // M x d
  Var q = embed(question_ids);  // N x d
  double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(config_.d));
  for (int l = 0; l < config_.layers; ++l) {
    std::string lp = prefix_ + ".l" + std::to_string(l);
    Var scores = g.scale(
        g.matmul_nt(g.matmul(c, g.param(lp + ".wq")), g.matmul(q, g.param(lp + ".wk"))),
        inv_sqrt);                       // M x N
    Var attn = g.softmax_rows(scores);   // context attends to question
    Var mixed = g.matmul(attn, g.matmul(q, g.param(lp + ".wv")));
    Var cat = g.concat_cols({c, mixed});
    Var update = g.tanh(g.add_rowvec(g.matmul(cat, g.param(lp + ".wo")), g.param(lp + ".bo")));
    c = g.add(c, update);  // residual keeps gradients alive when tanh saturates
  }
  Var start = g.transpose(g.add_rowvec(g.matmul(c, g.param(prefix_ + ".start_w")),
                                       g.param(prefix_ + ".start_b")));
  Var end = g.transpose(g.add_rowvec(g.matmul(c, g.param(prefix_ + ".end_w")),
                                     g.param(prefix_ + ".end_b")));
  return {start, end};
}

Var QaModel::span_nll(Graph& g, const corpus::TokenizedExample& ex) const {
  SpanVars sv = forward(g, ex.context_ids, ex.question_ids);
  Var s = g.masked_nll(sv.start, ex.span_start);
  Var e = g.masked_nll(sv.end, ex.span_end);
  return g.add(s, e);
}

void QaModel::train(ParameterStore& store, Adam& adam,
                    const std::vector<corpus::TokenizedExample>& examples) const {
  if (examples.empty()) throw std::runtime_error("empty QA training set");
  adam.set_lr(config_.learning_rate);
  for (int epoch = 0; epoch < config_.epochs; ++epoch) {
    auto batches = corpus::build_batches(examples, config_.batch_size,
                                         config_.seed + static_cast<uint64_t>(epoch));
    for (const auto& batch : batches) {
      store.zero_grads();
      Graph g(&store);
      Var loss;
      for (size_t i = 0; i < batch.example_indices.size(); ++i) {
        Var nll = span_nll(g, examples[batch.example_indices[i]]);
        loss = i == 0 ? nll : g.add(loss, nll);
      }
      loss = g.scale(loss, 1.0 / batch.example_indices.size());
      if (!std::isfinite(g.value(loss)(0, 0)))
        throw std::runtime_error("non-finite QA loss at epoch " + std::to_string(epoch));
      g.backward(loss);
      adam.step(store, config_.clip_norm);
    }
  }
}

std::optional<QaModel::Prediction> QaModel::predict(ParameterStore& store,
                                                    const std::vector<int>& context_ids,
                                                    const std::vector<int>& question_ids) const {
  Graph g(&store);
  SpanVars sv = forward(g, context_ids, question_ids);
  auto span = model::decode_span(g.value(sv.start), g.value(sv.end), config_.max_answer_len);
  if (!span) return std::nullopt;
  return Prediction{span->first, span->second};
}

}  // namespace qagen::qa
