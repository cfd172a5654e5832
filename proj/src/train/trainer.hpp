#pragma once

#include <string>
#include <vector>

#include "core/adam.hpp"
#include "model/hcvae.hpp"

namespace qagen::train {

struct TrainConfig {
  model::TrainFlags flags;
  int batch_size = 32;
  double learning_rate = 1e-3;
  int epochs = 10;
  int max_steps = 0;  // 0 = run all epochs
  uint64_t seed = 0;
  double clip_norm = 5.0;
  double divergence_threshold = 1e6;
  std::string metrics_path;     // JSONL, one record per step; empty = off
  std::string checkpoint_path;  // written each epoch and at the end; empty = off
  std::string config_hash;
  std::string config_json;
  std::vector<std::string> vocab_tokens;
};

struct TrainResult {
  std::vector<model::LossBreakdown> steps;
  int64_t step_count = 0;
};

class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Single-threaded optimization loop; deterministic given the seed. Kernel
// level parallelism does not change results.
TrainResult train(const model::InfoHcvae& hcvae, ParameterStore& store, Adam& adam,
                  const std::vector<corpus::TokenizedExample>& examples,
                  const TrainConfig& config, Rng& rng);

}  // namespace qagen::train
