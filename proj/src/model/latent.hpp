#pragma once

#include <string>

#include "core/graph.hpp"
#include "core/rng.hpp"
#include "model/dims.hpp"

namespace qagen::model {

struct GaussianVars {
  Var mu;       // 1 x dim
  Var log_var;  // 1 x dim, clamped to [-10, 10]
};

struct CategoricalVars {
  Var logits;  // blocks x classes
};

// Two-layer tanh MLP head under a name prefix.
class MlpHead {
 public:
  MlpHead(std::string prefix, int in_dim, int hidden, int out_dim)
      : prefix_(std::move(prefix)), in_dim_(in_dim), hidden_(hidden), out_dim_(out_dim) {}

  void init(ParameterStore& store, Rng& rng) const;
  Var forward(Graph& g, Var x) const;

  int out_dim() const { return out_dim_; }

 private:
  std::string prefix_;
  int in_dim_, hidden_, out_dim_;
};

// Gaussian parameter head: one MLP trunk, separate mu / log-var outputs.
class GaussianHead {
 public:
  GaussianHead(std::string prefix, int in_dim, int hidden, int z_dim)
      : mu_(prefix + ".mu", in_dim, hidden, z_dim),
        lv_(prefix + ".lv", in_dim, hidden, z_dim) {}

  void init(ParameterStore& store, Rng& rng) const {
    mu_.init(store, rng);
    lv_.init(store, rng);
  }
  GaussianVars forward(Graph& g, Var x) const {
    return {mu_.forward(g, x), g.clamp(lv_.forward(g, x), -10.0, 10.0)};
  }

 private:
  MlpHead mu_, lv_;
};

// Categorical parameter head producing blocks x classes logits.
class CategoricalHead {
 public:
  CategoricalHead(std::string prefix, int in_dim, int hidden, int blocks, int classes)
      : head_(prefix + ".pi", in_dim, hidden, blocks * classes), blocks_(blocks),
        classes_(classes) {}

  void init(ParameterStore& store, Rng& rng) const { head_.init(store, rng); }

  CategoricalVars forward(Graph& g, Var x) const;

 private:
  MlpHead head_;
  int blocks_, classes_;
};

// z = mu + exp(log_var/2) * noise; noise is a 1 x dim standard normal draw.
Var sample_gaussian(Graph& g, const GaussianVars& params, const Tensor& noise);

// Relaxed one-hot blocks: softmax((logits + gumbel(u)) / tau) per block row.
Var sample_gumbel_softmax(Graph& g, const CategoricalVars& params, double tau,
                          const Tensor& uniform_noise);

Var kl_gaussian(Graph& g, const GaussianVars& q, const GaussianVars& p);
Var kl_categorical(Graph& g, const CategoricalVars& q, const CategoricalVars& p);

// Plain-tensor helpers used at generation time.
Tensor gumbel_from_uniform(const Tensor& uniform_noise);
std::vector<int> categorical_argmax_blocks(const Tensor& logits);
std::vector<int> categorical_sample_blocks(const Tensor& logits, Rng& rng);
Tensor one_hot_blocks(const std::vector<int>& choices, int classes);

}  // namespace qagen::model
