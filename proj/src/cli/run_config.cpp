#include "cli/run_config.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "json.hpp"

namespace qagen::cli {

using nlohmann::json;

std::string RunConfig::to_json() const {
  json j;
  j["profile"] = profile;
  j["seed"] = seed;
  j["vocab_size"] = vocab_size;
  j["max_context_len"] = max_context_len;
  j["max_question_len"] = max_question_len;
  j["batch_size"] = batch_size;
  j["learning_rate"] = learning_rate;
  j["epochs"] = epochs;
  j["max_steps"] = max_steps;
  j["lambda_info"] = lambda_info;
  j["kl_weight"] = kl_weight;
  j["gumbel_tau"] = gumbel_tau;
  j["enable_question_latent"] = enable_question_latent;
  j["enable_answer_latent"] = enable_answer_latent;
  j["enable_infomax"] = enable_infomax;
  j["unfreeze_embeddings"] = unfreeze_embeddings;
  j["clip_norm"] = clip_norm;
  j["k"] = k;
  j["sample_zy"] = sample_zy;
  j["interpolate_steps"] = interpolate_steps;
  j["max_answer_len"] = max_answer_len;
  j["qa_dim"] = qa_dim;
  j["qa_layers"] = qa_layers;
  j["qa_epochs"] = qa_epochs;
  j["qa_learning_rate"] = qa_learning_rate;
  j["qa_lr_synthetic"] = qa_lr_synthetic;
  j["qa_lr_human"] = qa_lr_human;
  j["refine_threshold"] = refine_threshold;
  j["sweep_grid"] = sweep_grid;
  j["data_path"] = data_path;
  j["train_path"] = train_path;
  j["test_path"] = test_path;
  j["synthetic_path"] = synthetic_path;
  j["contexts_path"] = contexts_path;
  j["checkpoint_path"] = checkpoint_path;
  j["out_dir"] = out_dir;
  j["context_id"] = context_id;
  j["pair_a"] = pair_a;
  j["pair_b"] = pair_b;
  return j.dump(2);
}

void RunConfig::apply_json_text(const std::string& text) {
  json j = json::parse(text);
  auto get = [&j](const char* key, auto& field) {
    if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
  };
  get("profile", profile);
  get("seed", seed);
  get("vocab_size", vocab_size);
  get("max_context_len", max_context_len);
  get("max_question_len", max_question_len);
  get("batch_size", batch_size);
  get("learning_rate", learning_rate);
  get("epochs", epochs);
  get("max_steps", max_steps);
  get("lambda_info", lambda_info);
  get("kl_weight", kl_weight);
  get("gumbel_tau", gumbel_tau);
  get("enable_question_latent", enable_question_latent);
  get("enable_answer_latent", enable_answer_latent);
  get("enable_infomax", enable_infomax);
  get("unfreeze_embeddings", unfreeze_embeddings);
  get("clip_norm", clip_norm);
  get("k", k);
  get("sample_zy", sample_zy);
  get("interpolate_steps", interpolate_steps);
  get("max_answer_len", max_answer_len);
  get("qa_dim", qa_dim);
  get("qa_layers", qa_layers);
  get("qa_epochs", qa_epochs);
  get("qa_learning_rate", qa_learning_rate);
  get("qa_lr_synthetic", qa_lr_synthetic);
  get("qa_lr_human", qa_lr_human);
  get("refine_threshold", refine_threshold);
  get("sweep_grid", sweep_grid);
  get("data_path", data_path);
  get("train_path", train_path);
  get("test_path", test_path);
  get("synthetic_path", synthetic_path);
  get("contexts_path", contexts_path);
  get("checkpoint_path", checkpoint_path);
  get("out_dir", out_dir);
  get("context_id", context_id);
  get("pair_a", pair_a);
  get("pair_b", pair_b);
}

std::string RunConfig::hash() const {
  std::string text = to_json();
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

model::TrainFlags RunConfig::flags() const {
  model::TrainFlags f;
  f.question_latent = enable_question_latent;
  f.answer_latent = enable_answer_latent;
  f.infomax = enable_infomax;
  f.lambda = lambda_info;
  f.kl_weight = kl_weight;
  f.gumbel_tau = gumbel_tau;
  return f;
}

model::ModelDims RunConfig::dims() const { return model::ModelDims::named(profile); }

qa::QaConfig RunConfig::qa_config() const {
  qa::QaConfig q;
  q.d = qa_dim;
  q.layers = qa_layers;
  q.epochs = qa_epochs;
  q.learning_rate = qa_learning_rate;
  q.batch_size = batch_size;
  q.seed = seed + 1;
  q.max_answer_len = max_answer_len;
  return q;
}

std::string resolve_data_path(const std::string& path) {
  namespace fs = std::filesystem;
  if (path.empty() || fs::exists(path)) return path;
  const char* base = std::getenv("QAGEN_DATA_DIR");
  if (base) {
    fs::path candidate = fs::path(base) / path;
    if (fs::exists(candidate)) return candidate.string();
  }
  return path;
}

void write_provenance(const RunConfig& config, const std::string& command,
                      const std::string& checkpoint_hash,
                      const std::vector<std::string>& outputs) {
  std::filesystem::create_directories(config.out_dir);
  json j;
  j["command"] = command;
  j["config"] = json::parse(config.to_json());
  j["config_hash"] = config.hash();
  j["seed"] = config.seed;
  j["checkpoint_hash"] = checkpoint_hash;
  j["outputs"] = outputs;
  std::ofstream os(std::filesystem::path(config.out_dir) / (command + ".provenance.json"));
  os << j.dump(2) << "\n";
}

}  // namespace qagen::cli
