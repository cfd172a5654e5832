#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "core/adam.hpp"
#include "core/graph.hpp"
#include "core/rng.hpp"
#include "corpus/squad.hpp"

namespace qagen::qa {

struct QaConfig {
  int d = 64;
  int layers = 2;  // cross-attention blocks
  int epochs = 2;
  double learning_rate = 1e-3;
  int batch_size = 32;
  uint64_t seed = 1;
  double clip_norm = 5.0;
  int max_answer_len = 30;
  int max_positions = 512;
};

// Small extractive reader used by the evaluation harness: shared embedder,
// stacked cross-attention from context to question, independent start/end
// heads. Anything matching train/predict below can stand in for it.
class QaModel {
 public:
  QaModel(int vocab_size, const QaConfig& config);

  void init(ParameterStore& store, Rng& rng) const;

  Var span_nll(Graph& g, const corpus::TokenizedExample& ex) const;

  // Adam over epochs*ceil(n/batch) steps; deterministic per config.seed.
  void train(ParameterStore& store, Adam& adam,
             const std::vector<corpus::TokenizedExample>& examples) const;

  struct Prediction {
    int span_start = 0, span_end = 0;
  };
  std::optional<Prediction> predict(ParameterStore& store, const std::vector<int>& context_ids,
                                    const std::vector<int>& question_ids) const;

  const QaConfig& config() const { return config_; }

 private:
  struct SpanVars {
    Var start, end;
  };
  SpanVars forward(Graph& g, const std::vector<int>& context_ids,
                   const std::vector<int>& question_ids) const;

  int vocab_size_;
  QaConfig config_;
  std::string prefix_ = "qa";
};

}  // namespace qagen::qa
