#pragma once

#include <string>
#include <vector>

#include "model/dims.hpp"
#include "model/hcvae.hpp"
#include "qa/qa_model.hpp"

namespace qagen::cli {

// Fully resolved settings: code defaults, overridden by the --config JSON
// file, overridden by command-line flags. Serialized next to every output.
struct RunConfig {
  std::string profile = "desk";
  uint64_t seed = 0;

  int vocab_size = 30000;
  int max_context_len = 384;
  int max_question_len = 32;

  int batch_size = 32;
  double learning_rate = 1e-3;
  int epochs = 10;
  int max_steps = 0;
  double lambda_info = 1.0;
  double kl_weight = 0.1;
  double gumbel_tau = 1.0;
  bool enable_question_latent = true;
  bool enable_answer_latent = true;
  bool enable_infomax = true;
  bool unfreeze_embeddings = false;
  double clip_norm = 5.0;

  int k = 10;
  bool sample_zy = false;
  int interpolate_steps = 3;
  int max_answer_len = 30;

  int qa_dim = 64;
  int qa_layers = 2;
  int qa_epochs = 2;
  double qa_learning_rate = 1e-3;
  // The published synthetic/human rates keep their 2:3 ratio, scaled for
  // the small stand-in reader.
  double qa_lr_synthetic = 4e-4;
  double qa_lr_human = 6e-4;
  double refine_threshold = 40.0;
  std::vector<double> sweep_grid = {20.0, 40.0, 60.0, 80.0};

  std::string data_path;
  std::string train_path;
  std::string test_path;
  std::string synthetic_path;
  std::string contexts_path;
  std::string checkpoint_path;
  std::string out_dir = "runs";
  std::string context_id;
  int pair_a = 0;
  int pair_b = 1;

  std::string to_json() const;
  void apply_json_text(const std::string& text);
  std::string hash() const;

  model::TrainFlags flags() const;
  model::ModelDims dims() const;
  qa::QaConfig qa_config() const;
};

// Existing path as-is; otherwise retried under $QAGEN_DATA_DIR.
std::string resolve_data_path(const std::string& path);

// <out_dir>/<name>.provenance.json with config, hashes, and output files.
void write_provenance(const RunConfig& config, const std::string& command,
                      const std::string& checkpoint_hash,
                      const std::vector<std::string>& outputs);

}  // namespace qagen::cli
