#pragma once

#include <optional>
#include <string>
#include <vector>

#include "core/graph.hpp"
#include "core/rng.hpp"
#include "corpus/batch.hpp"
#include "corpus/squad.hpp"
#include "model/answer_decoder.hpp"
#include "model/dims.hpp"
#include "model/encoding.hpp"
#include "model/infomax.hpp"
#include "model/latent.hpp"
#include "model/question_decoder.hpp"

namespace qagen::model {

// Component switches for the ablation ladder. The answer latent requires
// the question latent (Baseline -> +Q-latent -> +A-latent -> +InfoMax).
struct TrainFlags {
  bool question_latent = true;
  bool answer_latent = true;
  bool infomax = true;
  double lambda = 1.0;
  double kl_weight = 0.1;
  double gumbel_tau = 1.0;

  void validate() const;
};

struct LossBreakdown {
  double question_nll = 0.0;  // >= 0, batch mean
  double answer_nll = 0.0;    // >= 0
  double kl_q = 0.0;          // >= 0
  double kl_a = 0.0;          // >= 0
  double l_info = 0.0;        // <= 0
  double total = 0.0;
  int question_tokens_correct = 0;
  int question_tokens_total = 0;
  int spans_correct = 0;
  int batch_size = 0;
};

// The full generator: hierarchical conditional VAE plus the InfoMax critic.
class InfoHcvae {
 public:
  InfoHcvae(const ModelDims& dims, int vocab_size);

  // Embedding layers (and the tied output matrix they provide) stay frozen
  // unless unfreeze_embeddings is set. Deterministic heads for disabled
  // components are only created when the flags need them.
  void init(ParameterStore& store, Rng& rng, const TrainFlags& flags,
            bool unfreeze_embeddings = false);

  struct ExampleLoss {
    Var question_nll, answer_nll, kl_q, kl_a;
    Var x_bar, y_bar;
    int q_correct = 0, q_total = 0;
    bool span_correct = false;
  };
  ExampleLoss forward_example(Graph& g, const corpus::TokenizedExample& ex,
                              const TrainFlags& flags, Rng& rng) const;

  // Scalar minimization objective: mean reconstruction + weighted KLs - lambda*L_info.
  Var batch_loss(Graph& g, const std::vector<const corpus::TokenizedExample*>& examples,
                 const TrainFlags& flags, Rng& rng, LossBreakdown* breakdown) const;

  // ---- pieces used by generation and evaluation ----
  Var prior_context_summary(Graph& g, const std::vector<int>& ctx_ids) const;
  GaussianVars question_prior(Graph& g, Var prior_summary) const;
  CategoricalVars answer_prior(Graph& g, Var prior_summary, Var z_x) const;
  GaussianVars question_posterior(Graph& g, const std::vector<int>& question_ids,
                                  const std::vector<int>& ctx_ids) const;
  CategoricalVars answer_posterior(Graph& g, Var z_x, const std::vector<int>& ctx_ids,
                                   const std::vector<int>& token_type_ids) const;

  // Deterministic stand-ins used when a latent is disabled.
  Var question_condition_det(Graph& g, Var prior_summary) const;
  Var answer_condition_det(Graph& g, Var prior_summary) const;

  struct SpanForward {
    Var hidden;  // M x d_answer_hidden
    SpanLogitVars logits;
  };
  // z_proj is the projected answer condition (latent or deterministic).
  SpanForward predict_answer(Graph& g, const std::vector<int>& ctx_ids, Var z_proj) const;

  Var project_answer_latent(Graph& g, Var z_y) const { return answer_dec_.project_latent(g, z_y); }

  Var qg_states(Graph& g, const std::vector<int>& ctx_ids,
                const std::vector<int>& token_type_ids) const;

  const EmbeddingLayer& embeddings() const { return emb_; }
  const QGDecoder& question_decoder() const { return qg_dec_; }
  const InfoMax& infomax() const { return infomax_; }
  const ModelDims& dims() const { return dims_; }

 private:
  ModelDims dims_;
  int vocab_size_;
  EmbeddingLayer emb_;
  ContextualEmbedder ctx_emb_;
  BiLstm prior_enc_;
  GaussianHead prior_q_;
  CategoricalHead prior_a_;
  BiLstm post_q_enc_, post_c_enc_, post_a_enc_;
  GaussianHead post_q_;
  CategoricalHead post_a_;
  AnswerDecoder answer_dec_;
  QGEncoder qg_enc_;
  QGDecoder qg_dec_;
  InfoMax infomax_;
  MlpHead det_q_, det_a_;
};

}  // namespace qagen::model
