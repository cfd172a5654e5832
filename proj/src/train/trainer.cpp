#include "train/trainer.hpp"

#include <cmath>
#include <fstream>

#include "corpus/batch.hpp"
#include "json.hpp"
#include "train/checkpoint.hpp"

namespace qagen::train {

namespace {

bool any_nan(const model::LossBreakdown& bd) {
  return !std::isfinite(bd.question_nll) || !std::isfinite(bd.answer_nll) ||
         !std::isfinite(bd.kl_q) || !std::isfinite(bd.kl_a) || !std::isfinite(bd.l_info) ||
         !std::isfinite(bd.total);
}

void write_metrics_line(std::ofstream& os, int64_t step, const model::LossBreakdown& bd) {
  nlohmann::json j{{"step", step},
                   {"question_nll", bd.question_nll},
                   {"answer_nll", bd.answer_nll},
                   {"kl_q", bd.kl_q},
                   {"kl_a", bd.kl_a},
                   {"l_info", bd.l_info},
                   {"total", bd.total},
                   {"question_token_accuracy",
                    bd.question_tokens_total
                        ? static_cast<double>(bd.question_tokens_correct) / bd.question_tokens_total
                        : 0.0},
                   {"span_accuracy",
                    bd.batch_size ? static_cast<double>(bd.spans_correct) / bd.batch_size : 0.0}};
  os << j.dump() << "\n";
}

}  // namespace

TrainResult train(const model::InfoHcvae& hcvae, ParameterStore& store, Adam& adam,
                  const std::vector<corpus::TokenizedExample>& examples,
                  const TrainConfig& config, Rng& rng) {
  if (examples.empty()) throw TrainingError("empty training dataset");
  config.flags.validate();
  adam.set_lr(config.learning_rate);

  std::ofstream metrics;
  if (!config.metrics_path.empty()) {
    metrics.open(config.metrics_path);
    if (!metrics) throw TrainingError("cannot open metrics log: " + config.metrics_path);
  }

  auto save = [&](int64_t step) {
    if (config.checkpoint_path.empty()) return;
    CheckpointMeta meta;
    meta.step = step;
    meta.rng_state = rng.save_state();
    meta.config_hash = config.config_hash;
    meta.config_json = config.config_json;
    meta.vocab_tokens = config.vocab_tokens;
    save_checkpoint(config.checkpoint_path, store, adam, meta);
  };

  TrainResult result;
  int64_t step = adam.steps();
  bool done = false;
  for (int epoch = 0; epoch < config.epochs && !done; ++epoch) {
    auto batches =
        corpus::build_batches(examples, config.batch_size, config.seed + static_cast<uint64_t>(epoch));
    for (size_t bi = 0; bi < batches.size() && !done; ++bi) {
      std::vector<const corpus::TokenizedExample*> batch;
      for (int idx : batches[bi].example_indices) batch.push_back(&examples[idx]);

      store.zero_grads();
      Graph g(&store);
      model::LossBreakdown bd;
      Var loss = hcvae.batch_loss(g, batch, config.flags, rng, &bd);
      if (any_nan(bd))
        throw TrainingError("non-finite loss at epoch " + std::to_string(epoch) + " batch " +
                            std::to_string(bi));
      if (bd.total > config.divergence_threshold)
        throw TrainingError("training diverged at epoch " + std::to_string(epoch) + " batch " +
                            std::to_string(bi) + ": total=" + std::to_string(bd.total));
      g.backward(loss);
      adam.step(store, config.clip_norm);
      ++step;

      if (metrics.is_open()) write_metrics_line(metrics, step, bd);
      result.steps.push_back(bd);
      if (config.max_steps > 0 && step >= config.max_steps) done = true;
    }
    save(step);
  }
  save(step);
  result.step_count = step;
  return result;
}

}  // namespace qagen::train
