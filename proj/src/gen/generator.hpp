#pragma once

#include <string>
#include <vector>

#include "corpus/squad.hpp"
#include "corpus/vocab.hpp"
#include "model/hcvae.hpp"

namespace qagen::gen {

struct GeneratedPair {
  std::string context_id;
  std::string question_text;
  std::string answer_text;
  int answer_token_start = 0, answer_token_end = 0;
  int answer_char_start = 0, answer_char_end = 0;  // [start, end)
  std::vector<double> z_x;
  std::vector<int> z_y_argmax;
  uint64_t seed = 0;
  std::string model_hash;
};

struct GenOptions {
  model::TrainFlags flags;  // which conditioning paths the checkpoint trained
  bool sample_zy = false;   // default: argmax one-hot per block
  int max_answer_len = 30;
  int max_question_len = 32;
  int max_context_len = 384;
};

struct GenStats {
  int decode_failures = 0;  // span decode or empty question, skipped
};

class Generator {
 public:
  Generator(const model::InfoHcvae& hcvae, ParameterStore& store,
            const corpus::Vocabulary& vocab, GenOptions options, std::string model_hash);

  // Figure-2 pipeline: k prior draws, each producing (answer span, question).
  // One RNG stream per (seed, context) keeps generation order-independent
  // across contexts, so this is safe to run context-parallel.
  std::vector<GeneratedPair> generate_qa(const corpus::Context& context, int k, uint64_t seed,
                                         uint64_t context_stream, GenStats* stats = nullptr) const;

  // One-to-many: fixed answer span, k fresh prior draws of the question
  // latent.
  std::vector<std::string> one_to_many(const corpus::Context& context,
                                       std::pair<int, int> token_span, int k,
                                       uint64_t seed) const;

  // Deterministic question for an explicit latent (z_x row vector).
  std::string question_for_latent(const corpus::Context& context, std::pair<int, int> token_span,
                                  const Tensor& z_x) const;

  // Posterior-mean endpoints, evenly spaced interpolation of z_x, answer
  // latent drawn from the prior at each step with a seeded stream.
  std::vector<GeneratedPair> interpolate(const corpus::QAPair& pair_a,
                                         const corpus::QAPair& pair_b,
                                         const corpus::Context& context, int steps,
                                         uint64_t seed, GenStats* stats = nullptr) const;

  Tensor posterior_mean_zx(const corpus::Context& context, const std::string& question_text) const;

 private:
  struct ContextTokens {
    std::vector<int> ids;
    std::vector<corpus::TokenSpan> offsets;
  };
  ContextTokens tokenize_context(const corpus::Context& context) const;

  // Returns false when span decoding or question decoding fails.
  bool decode_pair(const ContextTokens& toks, const corpus::Context& context, const Tensor& z_x,
                   Rng& rng, uint64_t seed, bool sample_zy, GeneratedPair* out) const;

  std::string decode_question(Graph& g, const ContextTokens& toks, std::pair<int, int> span,
                              Var q_cond) const;

  const model::InfoHcvae& hcvae_;
  ParameterStore& store_;
  const corpus::Vocabulary& vocab_;
  GenOptions options_;
  std::string model_hash_;
};

// JSONL, one pair per line, UTF-8; lossless round trip.
void serialize_pairs(const std::vector<GeneratedPair>& pairs, const std::string& path);
std::vector<GeneratedPair> load_pairs(const std::string& path);

}  // namespace qagen::gen
