#include "model/hcvae.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace qagen::model {

void TrainFlags::validate() const {
  if (answer_latent && !question_latent)
    throw std::invalid_argument("answer latent requires the question latent");
  if (lambda < 0.0) throw std::invalid_argument("lambda must be >= 0");
  if (kl_weight <= 0.0 || kl_weight > 1.0) throw std::invalid_argument("kl_weight must be in (0,1]");
  if (gumbel_tau <= 0.0) throw std::invalid_argument("gumbel temperature must be positive");
}

InfoHcvae::InfoHcvae(const ModelDims& dims, int vocab_size)
    : dims_(dims), vocab_size_(vocab_size),
      emb_("emb", vocab_size, dims.d_emb, dims.max_positions),
      ctx_emb_("ctx", &emb_, dims.d_ctx, dims.ctx_layers),
      prior_enc_("prior.enc", dims.d_emb, dims.enc_width),
      prior_q_("prior.q", 2 * dims.enc_width, 2 * dims.enc_width, dims.z_q_dim),
      prior_a_("prior.a", 2 * dims.enc_width + dims.z_q_dim, 2 * dims.enc_width,
               dims.z_a_blocks, dims.z_a_classes),
      post_q_enc_("post.qenc", dims.d_emb, dims.enc_width),
      post_c_enc_("post.cenc", dims.d_emb, dims.enc_width),
      post_a_enc_("post.aenc", dims.d_emb, dims.enc_width),
      post_q_("post.q", 4 * dims.enc_width, 2 * dims.enc_width, dims.z_q_dim),
      post_a_("post.a", 2 * dims.enc_width + dims.z_q_dim, 2 * dims.enc_width,
              dims.z_a_blocks, dims.z_a_classes),
      answer_dec_("adec", dims),
      qg_enc_("qenc", dims),
      qg_dec_("qdec", dims, &emb_),
      infomax_("mi", dims.d_emb, dims.d_answer_hidden()),
      det_q_("det.q", 2 * dims.enc_width, 2 * dims.enc_width, dims.z_q_dim),
      det_a_("det.a", 2 * dims.enc_width, 2 * dims.enc_width, dims.d_ctx) {}

void InfoHcvae::init(ParameterStore& store, Rng& rng, const TrainFlags& flags,
                     bool unfreeze_embeddings) {
  flags.validate();
  emb_.init(store, rng, /*frozen=*/!unfreeze_embeddings);
  ctx_emb_.init(store, rng, /*frozen=*/!unfreeze_embeddings);
  prior_enc_.init(store, rng);
  prior_q_.init(store, rng);
  prior_a_.init(store, rng);
  post_q_enc_.init(store, rng);
  post_c_enc_.init(store, rng);
  post_a_enc_.init(store, rng);
  post_q_.init(store, rng);
  post_a_.init(store, rng);
  answer_dec_.init(store, rng);
  qg_enc_.init(store, rng);
  qg_dec_.init(store, rng);
  infomax_.init(store, rng);
  if (!flags.question_latent) det_q_.init(store, rng);
  if (!flags.answer_latent) det_a_.init(store, rng);
}

Var InfoHcvae::prior_context_summary(Graph& g, const std::vector<int>& ctx_ids) const {
  std::vector<int> zeros(ctx_ids.size(), 0);
  return prior_enc_.encode(g, emb_.embed(g, ctx_ids, zeros)).summary;
}

GaussianVars InfoHcvae::question_prior(Graph& g, Var prior_summary) const {
  return prior_q_.forward(g, prior_summary);
}

CategoricalVars InfoHcvae::answer_prior(Graph& g, Var prior_summary, Var z_x) const {
  return prior_a_.forward(g, g.concat_cols({prior_summary, z_x}));
}

GaussianVars InfoHcvae::question_posterior(Graph& g, const std::vector<int>& question_ids,
                                           const std::vector<int>& ctx_ids) const {
  std::vector<int> qzeros(question_ids.size(), 0), czeros(ctx_ids.size(), 0);
  Var q_sum = post_q_enc_.encode(g, emb_.embed(g, question_ids, qzeros)).summary;
  Var c_sum = post_c_enc_.encode(g, emb_.embed(g, ctx_ids, czeros)).summary;
  return post_q_.forward(g, g.concat_cols({q_sum, c_sum}));
}

CategoricalVars InfoHcvae::answer_posterior(Graph& g, Var z_x, const std::vector<int>& ctx_ids,
                                            const std::vector<int>& token_type_ids) const {
  Var a_sum = post_a_enc_.encode(g, emb_.embed(g, ctx_ids, token_type_ids)).summary;
  return post_a_.forward(g, g.concat_cols({a_sum, z_x}));
}

Var InfoHcvae::question_condition_det(Graph& g, Var prior_summary) const {
  return det_q_.forward(g, prior_summary);
}

Var InfoHcvae::answer_condition_det(Graph& g, Var prior_summary) const {
  return det_a_.forward(g, prior_summary);
}

InfoHcvae::SpanForward InfoHcvae::predict_answer(Graph& g, const std::vector<int>& ctx_ids,
                                                 Var z_proj) const {
  std::vector<int> zeros(ctx_ids.size(), 0);
  Var e_ctx = ctx_emb_.encode(g, ctx_ids, zeros);
  Var matched = AnswerDecoder::heuristic_match(g, e_ctx, z_proj);
  auto enc = answer_dec_.predict_span(g, matched);
  return {enc.hidden, enc.logits};
}

Var InfoHcvae::qg_states(Graph& g, const std::vector<int>& ctx_ids,
                         const std::vector<int>& token_type_ids) const {
  Var e_ctx = ctx_emb_.encode(g, ctx_ids, token_type_ids);
  return qg_enc_.encode(g, e_ctx);
}

InfoHcvae::ExampleLoss InfoHcvae::forward_example(Graph& g, const corpus::TokenizedExample& ex,
                                                  const TrainFlags& flags, Rng& rng) const {
  ExampleLoss out;
  Var prior_sum = prior_context_summary(g, ex.context_ids);
  Var zero_scalar = g.input(Tensor::zeros(1, 1));

  // Question condition: posterior sample, or deterministic head.
  Var q_cond;
  if (flags.question_latent) {
    GaussianVars post = question_posterior(g, ex.question_ids, ex.context_ids);
    Tensor noise = rng.normal_tensor(1, dims_.z_q_dim);
    q_cond = sample_gaussian(g, post, noise);
    GaussianVars prior = question_prior(g, prior_sum);
    out.kl_q = kl_gaussian(g, post, prior);
  } else {
    q_cond = question_condition_det(g, prior_sum);
    out.kl_q = zero_scalar;
  }

  // Answer condition: gumbel-softmax posterior sample, or deterministic head.
  Var z_proj;
  if (flags.answer_latent) {
    CategoricalVars post = answer_posterior(g, q_cond, ex.context_ids, ex.token_type_ids);
    Tensor unoise(dims_.z_a_blocks, dims_.z_a_classes);
    for (auto& v : unoise.data) v = rng.uniform_open();
    Var z_y = sample_gumbel_softmax(g, post, flags.gumbel_tau, unoise);
    CategoricalVars prior = answer_prior(g, prior_sum, q_cond);
    out.kl_a = kl_categorical(g, post, prior);
    z_proj = answer_dec_.project_latent(g, z_y);
  } else {
    z_proj = answer_condition_det(g, prior_sum);
    out.kl_a = zero_scalar;
  }

  // Answer reconstruction.
  SpanForward span_fwd = predict_answer(g, ex.context_ids, z_proj);
  out.answer_nll = AnswerDecoder::answer_nll(g, span_fwd.logits,
                                             {ex.span_start, ex.span_end});
  auto decoded = decode_span(g.value(span_fwd.logits.start), g.value(span_fwd.logits.end),
                             static_cast<int>(ex.context_ids.size()));
  out.span_correct =
      decoded && decoded->first == ex.span_start && decoded->second == ex.span_end;

  // Question reconstruction (answer-aware via gold token types).
  Var h_hat = qg_states(g, ex.context_ids, ex.token_type_ids);
  auto tf = qg_dec_.question_nll(g, ex.question_ids, q_cond, h_hat, ex.context_ids);
  out.question_nll = tf.nll;
  out.q_correct = tf.correct;
  out.q_total = tf.total;

  out.x_bar = InfoMax::summarize_question(g, tf.fused);
  out.y_bar = InfoMax::summarize_answer(g, span_fwd.hidden, {ex.span_start, ex.span_end});
  return out;
}

Var InfoHcvae::batch_loss(Graph& g, const std::vector<const corpus::TokenizedExample*>& examples,
                          const TrainFlags& flags, Rng& rng, LossBreakdown* breakdown) const {
  flags.validate();
  if (examples.empty()) throw std::invalid_argument("empty batch");
  int b = static_cast<int>(examples.size());

  std::vector<Var> x_bars, y_bars;
  Var q_sum, a_sum, klq_sum, kla_sum;
  LossBreakdown bd;
  for (int i = 0; i < b; ++i) {
    ExampleLoss ex = forward_example(g, *examples[i], flags, rng);
    q_sum = i == 0 ? ex.question_nll : g.add(q_sum, ex.question_nll);
    a_sum = i == 0 ? ex.answer_nll : g.add(a_sum, ex.answer_nll);
    klq_sum = i == 0 ? ex.kl_q : g.add(klq_sum, ex.kl_q);
    kla_sum = i == 0 ? ex.kl_a : g.add(kla_sum, ex.kl_a);
    x_bars.push_back(ex.x_bar);
    y_bars.push_back(ex.y_bar);
    bd.question_tokens_correct += ex.q_correct;
    bd.question_tokens_total += ex.q_total;
    bd.spans_correct += ex.span_correct ? 1 : 0;
  }
  double inv_b = 1.0 / b;
  Var q_mean = g.scale(q_sum, inv_b);
  Var a_mean = g.scale(a_sum, inv_b);
  Var klq_mean = g.scale(klq_sum, inv_b);
  Var kla_mean = g.scale(kla_sum, inv_b);

  Var recon = g.add(g.add(q_mean, a_mean),
                    g.scale(g.add(klq_mean, kla_mean), flags.kl_weight));

  Var total = recon;
  Var l_info;
  bool info_used = flags.infomax && b >= 2;
  if (flags.infomax && b < 2)
    std::fprintf(stderr, "warning: batch of 1, InfoMax term skipped\n");
  if (info_used) {
    l_info = infomax_.jsd_mi_bound(g, x_bars, y_bars);
    total = g.add(total, g.scale(l_info, -flags.lambda));
  }

  bd.batch_size = b;
  bd.question_nll = g.value(q_mean)(0, 0);
  bd.answer_nll = g.value(a_mean)(0, 0);
  bd.kl_q = g.value(klq_mean)(0, 0);
  bd.kl_a = g.value(kla_mean)(0, 0);
  bd.l_info = info_used ? g.value(l_info)(0, 0) : 0.0;
  bd.total = g.value(total)(0, 0);
  if (breakdown) *breakdown = bd;
  return total;
}

}  // namespace qagen::model
