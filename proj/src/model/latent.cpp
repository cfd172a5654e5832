#include "model/latent.hpp"

#include <cmath>
#include <stdexcept>

namespace qagen::model {

void MlpHead::init(ParameterStore& store, Rng& rng) const {
  store.add_glorot(prefix_ + ".w1", in_dim_, hidden_, rng);
  store.add(prefix_ + ".b1", Tensor::zeros(1, hidden_));
  store.add_glorot(prefix_ + ".w2", hidden_, out_dim_, rng);
  store.add(prefix_ + ".b2", Tensor::zeros(1, out_dim_));
}

Var MlpHead::forward(Graph& g, Var x) const {
  Var h = g.tanh(g.add_rowvec(g.matmul(x, g.param(prefix_ + ".w1")), g.param(prefix_ + ".b1")));
  return g.add_rowvec(g.matmul(h, g.param(prefix_ + ".w2")), g.param(prefix_ + ".b2"));
}

CategoricalVars CategoricalHead::forward(Graph& g, Var x) const {
  Var flat = head_.forward(g, x);  // 1 x blocks*classes
  std::vector<Var> rows;
  rows.reserve(blocks_);
  for (int b = 0; b < blocks_; ++b) rows.push_back(g.slice_cols(flat, b * classes_, classes_));
  return {g.concat_rows(rows)};
}

Var sample_gaussian(Graph& g, const GaussianVars& params, const Tensor& noise) {
  if (!g.value(params.mu).same_shape(noise))
    throw std::invalid_argument("gaussian noise shape mismatch");
  Var sigma = g.exp(g.scale(params.log_var, 0.5));
  return g.add(params.mu, g.cmul(sigma, g.input(noise)));
}

Tensor gumbel_from_uniform(const Tensor& uniform_noise) {
  Tensor out = uniform_noise;
  for (auto& v : out.data) {
    if (v <= 0.0 || v >= 1.0) throw std::invalid_argument("gumbel noise must lie in (0,1)");
    v = -std::log(-std::log(v));
  }
  return out;
}

Var sample_gumbel_softmax(Graph& g, const CategoricalVars& params, double tau,
                          const Tensor& uniform_noise) {
  if (tau <= 0.0) throw std::invalid_argument("gumbel-softmax temperature must be positive");
  const Tensor& logits = g.value(params.logits);
  if (!logits.same_shape(uniform_noise))
    throw std::invalid_argument("gumbel noise shape mismatch");
  Var noisy = g.add(params.logits, g.input(gumbel_from_uniform(uniform_noise)));
  return g.softmax_rows(g.scale(noisy, 1.0 / tau));
}

Var kl_gaussian(Graph& g, const GaussianVars& q, const GaussianVars& p) {
  // 0.5 * sum( lv_p - lv_q + (exp(lv_q) + (mu_q - mu_p)^2) * exp(-lv_p) - 1 )
  Var diff2 = g.square(g.sub(q.mu, p.mu));
  Var ratio = g.cmul(g.add(g.exp(q.log_var), diff2), g.exp(g.scale(p.log_var, -1.0)));
  Var inner = g.add_const(g.add(g.sub(p.log_var, q.log_var), ratio), -1.0);
  return g.scale(g.sum_all(inner), 0.5);
}

Var kl_categorical(Graph& g, const CategoricalVars& q, const CategoricalVars& p) {
  Var lq = g.log_softmax_rows(q.logits);
  Var lp = g.log_softmax_rows(p.logits);
  return g.sum_all(g.cmul(g.exp(lq), g.sub(lq, lp)));
}

std::vector<int> categorical_argmax_blocks(const Tensor& logits) {
  std::vector<int> out(logits.rows);
  for (int r = 0; r < logits.rows; ++r) {
    int best = 0;
    for (int c = 1; c < logits.cols; ++c)
      if (logits(r, c) > logits(r, best)) best = c;
    out[r] = best;
  }
  return out;
}

std::vector<int> categorical_sample_blocks(const Tensor& logits, Rng& rng) {
  std::vector<int> out(logits.rows);
  for (int r = 0; r < logits.rows; ++r) {
    double m = logits(r, 0);
    for (int c = 1; c < logits.cols; ++c) m = std::max(m, logits(r, c));
    double z = 0.0;
    std::vector<double> probs(logits.cols);
    for (int c = 0; c < logits.cols; ++c) {
      probs[c] = std::exp(logits(r, c) - m);
      z += probs[c];
    }
    double u = rng.uniform() * z;
    double acc = 0.0;
    int pick = logits.cols - 1;
    for (int c = 0; c < logits.cols; ++c) {
      acc += probs[c];
      if (u < acc) {
        pick = c;
        break;
      }
    }
    out[r] = pick;
  }
  return out;
}

Tensor one_hot_blocks(const std::vector<int>& choices, int classes) {
  Tensor t(static_cast<int>(choices.size()), classes);
  for (size_t r = 0; r < choices.size(); ++r) t(static_cast<int>(r), choices[r]) = 1.0;
  return t;
}

}  // namespace qagen::model
