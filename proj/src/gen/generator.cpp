#include "gen/generator.hpp"

#include <fstream>

#include "corpus/tokenizer.hpp"
#include "json.hpp"
#include "model/answer_decoder.hpp"
#include "model/latent.hpp"

namespace qagen::gen {

using corpus::Vocabulary;

Generator::Generator(const model::InfoHcvae& hcvae, ParameterStore& store,
                     const corpus::Vocabulary& vocab, GenOptions options, std::string model_hash)
    : hcvae_(hcvae), store_(store), vocab_(vocab), options_(std::move(options)),
      model_hash_(std::move(model_hash)) {}

Generator::ContextTokens Generator::tokenize_context(const corpus::Context& context) const {
  corpus::Tokenized t = corpus::tokenize(context.text, vocab_);
  ContextTokens out;
  int m = std::min<int>(static_cast<int>(t.ids.size()), options_.max_context_len);
  out.ids.assign(t.ids.begin(), t.ids.begin() + m);
  out.offsets.assign(t.offsets.begin(), t.offsets.begin() + m);
  return out;
}

std::string Generator::decode_question(Graph& g, const ContextTokens& toks,
                                       std::pair<int, int> span, Var q_cond) const {
  auto types = corpus::make_token_type_ids(static_cast<int>(toks.ids.size()), span);
  Var h_hat = hcvae_.qg_states(g, toks.ids, types);
  auto ids = hcvae_.question_decoder().greedy_decode(g, q_cond, h_hat, toks.ids,
                                                     options_.max_question_len);
  if (ids.empty()) return "";
  return corpus::detokenize(ids, vocab_, {Vocabulary::kPad});
}

bool Generator::decode_pair(const ContextTokens& toks, const corpus::Context& context,
                            const Tensor& z_x, Rng& rng, uint64_t seed, bool sample_zy,
                            GeneratedPair* out) const {
  Graph g(&store_);
  Var prior_sum = hcvae_.prior_context_summary(g, toks.ids);

  Var q_cond;
  if (options_.flags.question_latent) {
    q_cond = g.input(z_x);
  } else {
    q_cond = hcvae_.question_condition_det(g, prior_sum);
  }

  Var z_proj;
  std::vector<int> choices;
  if (options_.flags.answer_latent) {
    model::CategoricalVars prior = hcvae_.answer_prior(g, prior_sum, q_cond);
    const Tensor& logits = g.value(prior.logits);
    choices = sample_zy ? model::categorical_sample_blocks(logits, rng)
                        : model::categorical_argmax_blocks(logits);
    Var z_y = g.input(model::one_hot_blocks(choices, hcvae_.dims().z_a_classes));
    z_proj = hcvae_.project_answer_latent(g, z_y);
  } else {
    z_proj = hcvae_.answer_condition_det(g, prior_sum);
  }

  auto span_fwd = hcvae_.predict_answer(g, toks.ids, z_proj);
  auto span = model::decode_span(g.value(span_fwd.logits.start), g.value(span_fwd.logits.end),
                                 options_.max_answer_len);
  if (!span) return false;

  std::string question = decode_question(g, toks, *span, q_cond);
  if (question.empty()) return false;

  out->context_id = context.id;
  out->question_text = question;
  out->answer_token_start = span->first;
  out->answer_token_end = span->second;
  out->answer_char_start = toks.offsets[span->first].begin;
  out->answer_char_end = toks.offsets[span->second].end;
  out->answer_text = context.text.substr(out->answer_char_start,
                                         out->answer_char_end - out->answer_char_start);
  if (options_.flags.question_latent)
    out->z_x.assign(z_x.data.begin(), z_x.data.end());
  out->z_y_argmax = choices;
  out->seed = seed;
  out->model_hash = model_hash_;
  return true;
}

std::vector<GeneratedPair> Generator::generate_qa(const corpus::Context& context, int k,
                                                  uint64_t seed, uint64_t context_stream,
                                                  GenStats* stats) const {
  std::vector<GeneratedPair> out;
  if (k <= 0) return out;
  ContextTokens toks = tokenize_context(context);
  if (toks.ids.empty()) return out;
  Rng rng(Rng::derive(seed, context_stream));

  Tensor mu, sigma;
  if (options_.flags.question_latent) {
    Graph g(&store_);
    model::GaussianVars prior =
        hcvae_.question_prior(g, hcvae_.prior_context_summary(g, toks.ids));
    mu = g.value(prior.mu);
    sigma = g.value(prior.log_var);
    for (auto& v : sigma.data) v = std::exp(0.5 * v);
  }

  for (int draw = 0; draw < k; ++draw) {
    Tensor z_x;
    if (options_.flags.question_latent) {
      z_x = Tensor(1, hcvae_.dims().z_q_dim);
      for (int c = 0; c < z_x.cols; ++c) z_x(0, c) = mu(0, c) + sigma(0, c) * rng.normal();
    }
    GeneratedPair pair;
    if (decode_pair(toks, context, z_x, rng, seed, options_.sample_zy, &pair)) {
      out.push_back(std::move(pair));
    } else if (stats) {
      ++stats->decode_failures;
    }
  }
  return out;
}

std::vector<std::string> Generator::one_to_many(const corpus::Context& context,
                                                std::pair<int, int> token_span, int k,
                                                uint64_t seed) const {
  if (!options_.flags.question_latent)
    throw std::invalid_argument("one-to-many sampling needs the question latent enabled");
  std::vector<std::string> out;
  if (k <= 0) return out;
  ContextTokens toks = tokenize_context(context);
  Rng rng(Rng::derive(seed, 0));

  Graph pg(&store_);
  model::GaussianVars prior =
      hcvae_.question_prior(pg, hcvae_.prior_context_summary(pg, toks.ids));
  Tensor mu = pg.value(prior.mu);
  Tensor sigma = pg.value(prior.log_var);
  for (auto& v : sigma.data) v = std::exp(0.5 * v);

  for (int draw = 0; draw < k; ++draw) {
    Tensor z_x(1, hcvae_.dims().z_q_dim);
    for (int c = 0; c < z_x.cols; ++c) z_x(0, c) = mu(0, c) + sigma(0, c) * rng.normal();
    Graph g(&store_);
    std::string q = decode_question(g, toks, token_span, g.input(z_x));
    if (!q.empty()) out.push_back(std::move(q));
  }
  return out;
}

std::string Generator::question_for_latent(const corpus::Context& context,
                                           std::pair<int, int> token_span,
                                           const Tensor& z_x) const {
  ContextTokens toks = tokenize_context(context);
  Graph g(&store_);
  return decode_question(g, toks, token_span, g.input(z_x));
}

Tensor Generator::posterior_mean_zx(const corpus::Context& context,
                                    const std::string& question_text) const {
  ContextTokens toks = tokenize_context(context);
  corpus::Tokenized q = corpus::tokenize(question_text, vocab_);
  std::vector<int> q_ids;
  q_ids.push_back(Vocabulary::kBos);
  q_ids.insert(q_ids.end(), q.ids.begin(), q.ids.end());
  q_ids.push_back(Vocabulary::kEos);
  Graph g(&store_);
  model::GaussianVars post = hcvae_.question_posterior(g, q_ids, toks.ids);
  return g.value(post.mu);
}

std::vector<GeneratedPair> Generator::interpolate(const corpus::QAPair& pair_a,
                                                  const corpus::QAPair& pair_b,
                                                  const corpus::Context& context, int steps,
                                                  uint64_t seed, GenStats* stats) const {
  if (!options_.flags.question_latent)
    throw std::invalid_argument("interpolation needs the question latent enabled");
  if (steps < 1) throw std::invalid_argument("steps must be >= 1");
  Tensor mu_a = posterior_mean_zx(context, pair_a.question_text);
  Tensor mu_b = posterior_mean_zx(context, pair_b.question_text);
  ContextTokens toks = tokenize_context(context);

  std::vector<GeneratedPair> out;
  for (int i = 0; i < steps; ++i) {
    double t = steps == 1 ? 0.0 : static_cast<double>(i) / (steps - 1);
    Tensor z_x(1, mu_a.cols);
    for (int c = 0; c < mu_a.cols; ++c) z_x(0, c) = (1.0 - t) * mu_a(0, c) + t * mu_b(0, c);

    // z_y is drawn (not argmaxed) at each interpolation step, seeded per step.
    Rng rng(Rng::derive(seed, static_cast<uint64_t>(i)));
    GeneratedPair pair;
    if (decode_pair(toks, context, z_x, rng, seed, /*sample_zy=*/true, &pair)) {
      out.push_back(std::move(pair));
    } else if (stats) {
      ++stats->decode_failures;
    }
  }
  return out;
}

void serialize_pairs(const std::vector<GeneratedPair>& pairs, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write pairs file: " + path);
  for (const auto& p : pairs) {
    nlohmann::json j{{"context_id", p.context_id},
                     {"question", p.question_text},
                     {"answer", p.answer_text},
                     {"answer_token_start", p.answer_token_start},
                     {"answer_token_end", p.answer_token_end},
                     {"answer_char_start", p.answer_char_start},
                     {"answer_char_end", p.answer_char_end},
                     {"z_x", p.z_x},
                     {"z_y_argmax", p.z_y_argmax},
                     {"seed", p.seed},
                     {"model_hash", p.model_hash}};
    os << j.dump() << "\n";
  }
  if (!os) throw std::runtime_error("write failed: " + path);
}

std::vector<GeneratedPair> load_pairs(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open pairs file: " + path);
  std::vector<GeneratedPair> out;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line);
    GeneratedPair p;
    p.context_id = j.at("context_id").get<std::string>();
    p.question_text = j.at("question").get<std::string>();
    p.answer_text = j.at("answer").get<std::string>();
    p.answer_token_start = j.at("answer_token_start").get<int>();
    p.answer_token_end = j.at("answer_token_end").get<int>();
    p.answer_char_start = j.at("answer_char_start").get<int>();
    p.answer_char_end = j.at("answer_char_end").get<int>();
    p.z_x = j.at("z_x").get<std::vector<double>>();
    p.z_y_argmax = j.at("z_y_argmax").get<std::vector<int>>();
    p.seed = j.at("seed").get<uint64_t>();
    p.model_hash = j.at("model_hash").get<std::string>();
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace qagen::gen
