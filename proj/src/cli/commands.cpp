#include "cli/commands.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>

#include "CLI11.hpp"
#include "cli/run_config.hpp"
#include "corpus/batch.hpp"
#include "eval/harness.hpp"
#include "gen/generator.hpp"
#include "json.hpp"
#include "train/checkpoint.hpp"
#include "train/trainer.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace qagen::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

corpus::CorpusLimits limits_of(const RunConfig& cfg) {
  corpus::CorpusLimits lim;
  lim.max_context_len = cfg.max_context_len;
  lim.max_question_len = cfg.max_question_len;
  lim.vocab_size = cfg.vocab_size;
  return lim;
}

corpus::SquadData load_data(const std::string& path) {
  return corpus::load_squad_json(resolve_data_path(path));
}

// Model + weights + vocabulary reconstructed from a checkpoint.
struct LoadedModel {
  RunConfig config;
  corpus::Vocabulary vocab;
  std::unique_ptr<model::InfoHcvae> hcvae;
  ParameterStore store;
  Adam adam;
  train::CheckpointMeta meta;
};

std::unique_ptr<LoadedModel> load_model(const std::string& path) {
  auto lm = std::make_unique<LoadedModel>();
  train::CheckpointMeta head = train::peek_checkpoint(path);
  if (head.config_json.empty())
    throw std::runtime_error("checkpoint sidecar missing: " + path + ".json");
  lm->config.apply_json_text(head.config_json);
  lm->vocab = corpus::Vocabulary::from_tokens(head.vocab_tokens);
  lm->hcvae = std::make_unique<model::InfoHcvae>(lm->config.dims(), lm->vocab.size());
  Rng rng(lm->config.seed);
  lm->hcvae->init(lm->store, rng, lm->config.flags(), lm->config.unfreeze_embeddings);
  lm->meta = train::load_checkpoint(path, lm->store, lm->adam);
  return lm;
}

corpus::SquadData pairs_to_squad(const std::vector<gen::GeneratedPair>& pairs,
                                 const corpus::SquadData& context_data) {
  corpus::SquadData out;
  for (const auto& [ctx, unused] : context_data) {
    std::vector<corpus::QAPair> qas;
    for (const auto& p : pairs) {
      if (p.context_id != ctx.id) continue;
      qas.push_back({p.question_text, p.answer_text, p.answer_char_start});
    }
    if (!qas.empty()) out.emplace_back(ctx, std::move(qas));
  }
  return out;
}

corpus::Vocabulary joint_vocabulary(const std::vector<const corpus::SquadData*>& datasets,
                                    int max_size) {
  corpus::SquadData merged;
  for (const auto* d : datasets)
    merged.insert(merged.end(), d->begin(), d->end());
  return corpus::build_vocabulary(merged, max_size);
}

eval::EvalSet make_eval_set(const corpus::SquadData& data, const corpus::Vocabulary& vocab,
                            const corpus::CorpusLimits& lim) {
  return eval::to_eval_set(corpus::prepare_corpus(data, vocab, lim));
}

std::string out_file(const RunConfig& cfg, const std::string& name) {
  fs::create_directories(cfg.out_dir);
  return (fs::path(cfg.out_dir) / name).string();
}

int cmd_train(RunConfig cfg) {
  corpus::SquadData data = load_data(cfg.data_path);
  corpus::Vocabulary vocab = corpus::build_vocabulary(data, cfg.vocab_size);
  corpus::PreparedCorpus prepared = corpus::prepare_corpus(data, vocab, limits_of(cfg));
  if (prepared.examples.empty()) throw std::runtime_error("no usable training examples");
  std::cout << "loaded " << prepared.examples.size() << " examples ("
            << prepared.stats.skipped_unalignable + prepared.stats.skipped_answer_mismatch +
                   prepared.stats.skipped_question_overflow +
                   prepared.stats.skipped_truncated_answer
            << " skipped), vocab " << vocab.size() << "\n";

  model::InfoHcvae hcvae(cfg.dims(), vocab.size());
  ParameterStore store;
  Rng rng(cfg.seed);
  hcvae.init(store, rng, cfg.flags(), cfg.unfreeze_embeddings);
  Adam adam(cfg.learning_rate);

  train::TrainConfig tc;
  tc.flags = cfg.flags();
  tc.batch_size = cfg.batch_size;
  tc.learning_rate = cfg.learning_rate;
  tc.epochs = cfg.epochs;
  tc.max_steps = cfg.max_steps;
  tc.seed = cfg.seed;
  tc.clip_norm = cfg.clip_norm;
  tc.metrics_path = out_file(cfg, "metrics.jsonl");
  tc.checkpoint_path = out_file(cfg, "model.ckpt");
  tc.config_hash = cfg.hash();
  tc.config_json = cfg.to_json();
  tc.vocab_tokens = vocab.save_tokens();

  train::TrainResult result = train::train(hcvae, store, adam, prepared.examples, tc, rng);
  const auto& last = result.steps.back();
  std::cout << "trained " << result.step_count << " steps, final total " << last.total
            << " (q_nll " << last.question_nll << ", a_nll " << last.answer_nll << ", kl_q "
            << last.kl_q << ", kl_a " << last.kl_a << ", l_info " << last.l_info << ")\n";
  write_provenance(cfg, "train", train::param_hash(store),
                   {tc.checkpoint_path, tc.metrics_path});
  return 0;
}

int cmd_generate(RunConfig cfg) {
  auto lm = load_model(resolve_data_path(cfg.checkpoint_path));
  corpus::SquadData data = load_data(cfg.data_path);

  gen::GenOptions opt;
  opt.flags = lm->config.flags();
  opt.sample_zy = cfg.sample_zy;
  opt.max_answer_len = cfg.max_answer_len;
  opt.max_question_len = cfg.max_question_len;
  opt.max_context_len = cfg.max_context_len;
  std::string model_hash = train::param_hash(lm->store);
  gen::Generator generator(*lm->hcvae, lm->store, lm->vocab, opt, model_hash);

  long n = static_cast<long>(data.size());
  std::vector<std::vector<gen::GeneratedPair>> per_context(n);
  std::vector<gen::GenStats> stats(n);
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < n; ++i)
    per_context[i] =
        generator.generate_qa(data[i].first, cfg.k, cfg.seed, static_cast<uint64_t>(i),
                              &stats[i]);

  std::vector<gen::GeneratedPair> pairs;
  int failures = 0;
  for (long i = 0; i < n; ++i) {
    pairs.insert(pairs.end(), per_context[i].begin(), per_context[i].end());
    failures += stats[i].decode_failures;
  }
  std::string out_path = out_file(cfg, "pairs.jsonl");
  gen::serialize_pairs(pairs, out_path);
  std::cout << "generated " << pairs.size() << " pairs from " << n << " contexts ("
            << failures << " decode failures skipped) -> " << out_path << "\n";
  write_provenance(cfg, "generate", model_hash, {out_path});
  return 0;
}

int cmd_interpolate(RunConfig cfg) {
  auto lm = load_model(resolve_data_path(cfg.checkpoint_path));
  corpus::SquadData data = load_data(cfg.data_path);

  const std::pair<corpus::Context, std::vector<corpus::QAPair>>* chosen = nullptr;
  for (const auto& entry : data) {
    if (!cfg.context_id.empty() && entry.first.id != cfg.context_id) continue;
    if (entry.second.size() >= 2) {
      chosen = &entry;
      break;
    }
  }
  if (!chosen) throw std::runtime_error("no context with two QA pairs to interpolate");
  if (cfg.pair_a >= static_cast<int>(chosen->second.size()) ||
      cfg.pair_b >= static_cast<int>(chosen->second.size()))
    throw std::runtime_error("pair index out of range for context " + chosen->first.id);

  gen::GenOptions opt;
  opt.flags = lm->config.flags();
  opt.max_answer_len = cfg.max_answer_len;
  opt.max_question_len = cfg.max_question_len;
  opt.max_context_len = cfg.max_context_len;
  std::string model_hash = train::param_hash(lm->store);
  gen::Generator generator(*lm->hcvae, lm->store, lm->vocab, opt, model_hash);

  auto pairs = generator.interpolate(chosen->second[cfg.pair_a], chosen->second[cfg.pair_b],
                                     chosen->first, cfg.interpolate_steps, cfg.seed);
  std::string out_path = out_file(cfg, "interpolation.jsonl");
  gen::serialize_pairs(pairs, out_path);
  std::cout << "interpolated " << pairs.size() << " steps on context " << chosen->first.id
            << " -> " << out_path << "\n";
  write_provenance(cfg, "interpolate", model_hash, {out_path});
  return 0;
}

int cmd_eval_qae(RunConfig cfg) {
  auto pairs = gen::load_pairs(resolve_data_path(cfg.synthetic_path));
  corpus::SquadData ctx_data = load_data(cfg.contexts_path);
  corpus::SquadData test_data = load_data(cfg.test_path);
  corpus::SquadData synth_squad = pairs_to_squad(pairs, ctx_data);
  corpus::Vocabulary vocab = joint_vocabulary({&synth_squad, &test_data}, cfg.vocab_size);
  eval::EvalSet synth = make_eval_set(synth_squad, vocab, limits_of(cfg));
  eval::EvalSet test = make_eval_set(test_data, vocab, limits_of(cfg));
  if (synth.examples.empty()) throw std::runtime_error("no usable synthetic pairs");

  eval::EvalReport report;
  report.qae = eval::qae(synth, test, cfg.qa_config());
  report.pairs_used = static_cast<int>(synth.examples.size());
  report.config_hash = cfg.hash();
  std::string ckpt_hash;
  if (!cfg.checkpoint_path.empty()) {
    auto lm = load_model(resolve_data_path(cfg.checkpoint_path));
    eval::EvalSet mi_set =
        make_eval_set(synth_squad, lm->vocab, limits_of(lm->config));
    report.mi_score = eval::estimate_mi(*lm->hcvae, lm->store, mi_set);
    ckpt_hash = train::param_hash(lm->store);
  }
  std::string out_path = out_file(cfg, "qae_report.json");
  std::ofstream(out_path) << eval::report_to_json(report) << "\n";
  std::cout << "QAE EM " << report.qae.em << " F1 " << report.qae.f1 << " over "
            << report.pairs_used << " synthetic pairs -> " << out_path << "\n";
  write_provenance(cfg, "eval-qae", ckpt_hash, {out_path});
  return 0;
}

int cmd_eval_rqae(RunConfig cfg) {
  auto pairs = gen::load_pairs(resolve_data_path(cfg.synthetic_path));
  corpus::SquadData ctx_data = load_data(cfg.contexts_path);
  corpus::SquadData train_data = load_data(cfg.train_path);
  corpus::SquadData synth_squad = pairs_to_squad(pairs, ctx_data);
  corpus::Vocabulary vocab = joint_vocabulary({&synth_squad, &train_data}, cfg.vocab_size);
  eval::EvalSet synth = make_eval_set(synth_squad, vocab, limits_of(cfg));
  eval::EvalSet train_set = make_eval_set(train_data, vocab, limits_of(cfg));
  if (synth.examples.empty()) throw std::runtime_error("no usable synthetic pairs");

  eval::EvalReport report;
  report.rqae = eval::rqae(train_set, synth, cfg.qa_config());
  report.pairs_used = static_cast<int>(synth.examples.size());
  report.config_hash = cfg.hash();
  std::string out_path = out_file(cfg, "rqae_report.json");
  std::ofstream(out_path) << eval::report_to_json(report) << "\n";
  std::cout << "R-QAE EM " << report.rqae.em << " F1 " << report.rqae.f1 << " over "
            << report.pairs_used << " synthetic pairs -> " << out_path << "\n";
  write_provenance(cfg, "eval-rqae", "", {out_path});
  return 0;
}

// Trains the reader on human data, then returns it for refinement.
struct TrainedQa {
  std::unique_ptr<qa::QaModel> model;
  ParameterStore store;
};

TrainedQa train_reader(const eval::EvalSet& train_set, const qa::QaConfig& config) {
  int vocab_size = 0;
  for (const auto& ex : train_set.examples) {
    for (int id : ex.context_ids) vocab_size = std::max(vocab_size, id + 1);
    for (int id : ex.question_ids) vocab_size = std::max(vocab_size, id + 1);
  }
  TrainedQa out;
  out.model = std::make_unique<qa::QaModel>(vocab_size + 1024, config);
  Rng rng(config.seed);
  out.model->init(out.store, rng);
  Adam adam(config.learning_rate);
  out.model->train(out.store, adam, train_set.examples);
  return out;
}

int cmd_refine(RunConfig cfg) {
  auto pairs = gen::load_pairs(resolve_data_path(cfg.synthetic_path));
  corpus::SquadData ctx_data = load_data(cfg.contexts_path);
  corpus::SquadData train_data = load_data(cfg.train_path);
  corpus::SquadData synth_squad = pairs_to_squad(pairs, ctx_data);
  corpus::Vocabulary vocab = joint_vocabulary({&synth_squad, &train_data, &ctx_data},
                                              cfg.vocab_size);
  eval::EvalSet train_set = make_eval_set(train_data, vocab, limits_of(cfg));
  TrainedQa reader = train_reader(train_set, cfg.qa_config());

  std::vector<corpus::Context> contexts;
  for (const auto& [ctx, unused] : ctx_data) contexts.push_back(ctx);
  eval::RefineResult result =
      eval::refine_pairs(pairs, contexts, vocab, *reader.model, reader.store,
                         cfg.refine_threshold, cfg.max_context_len);

  std::string out_path = out_file(cfg, "refined.jsonl");
  gen::serialize_pairs(result.pairs, out_path);
  json report{{"threshold", cfg.refine_threshold},
              {"pairs", result.pairs.size()},
              {"replaced", result.replaced},
              {"config_hash", cfg.hash()}};
  std::string report_path = out_file(cfg, "refine_report.json");
  std::ofstream(report_path) << report.dump(2) << "\n";
  std::cout << "refined " << result.pairs.size() << " pairs, replaced " << result.replaced
            << " answers below F1 " << cfg.refine_threshold << " -> " << out_path << "\n";
  write_provenance(cfg, "refine", "", {out_path, report_path});
  return 0;
}

int cmd_semi_sup(RunConfig cfg) {
  corpus::SquadData train_data = load_data(cfg.train_path);
  corpus::SquadData test_data = load_data(cfg.test_path);

  corpus::SquadData synth_squad;
  std::vector<gen::GeneratedPair> pairs;
  if (!cfg.synthetic_path.empty()) {
    pairs = gen::load_pairs(resolve_data_path(cfg.synthetic_path));
    corpus::SquadData ctx_data =
        cfg.contexts_path.empty() ? train_data : load_data(cfg.contexts_path);
    synth_squad = pairs_to_squad(pairs, ctx_data);
  }
  corpus::Vocabulary vocab = joint_vocabulary({&synth_squad, &train_data, &test_data},
                                              cfg.vocab_size);
  eval::EvalSet synth = make_eval_set(synth_squad, vocab, limits_of(cfg));
  eval::EvalSet train_set = make_eval_set(train_data, vocab, limits_of(cfg));
  eval::EvalSet test_set = make_eval_set(test_data, vocab, limits_of(cfg));

  eval::SemiSupReport report = eval::semi_supervised_train(
      synth, train_set, test_set, cfg.qa_config(), cfg.qa_lr_synthetic, cfg.qa_lr_human);

  json j{{"baseline", {{"em", report.baseline.em}, {"f1", report.baseline.f1}}},
         {"augmented", {{"em", report.augmented.em}, {"f1", report.augmented.f1}}},
         {"synthetic_pairs", synth.examples.size()},
         {"qa_config_hash", report.qa_config_hash},
         {"config_hash", cfg.hash()}};
  std::string out_path = out_file(cfg, "semi_sup_report.json");
  std::ofstream(out_path) << j.dump(2) << "\n";
  std::cout << "baseline EM " << report.baseline.em << " F1 " << report.baseline.f1
            << " | augmented EM " << report.augmented.em << " F1 " << report.augmented.f1
            << " -> " << out_path << "\n";
  write_provenance(cfg, "semi-sup", "", {out_path});
  return 0;
}

int cmd_sweep(RunConfig cfg) {
  auto pairs = gen::load_pairs(resolve_data_path(cfg.synthetic_path));
  corpus::SquadData ctx_data = load_data(cfg.contexts_path);
  corpus::SquadData train_data = load_data(cfg.train_path);
  corpus::SquadData test_data = load_data(cfg.test_path);
  corpus::SquadData synth_squad = pairs_to_squad(pairs, ctx_data);
  corpus::Vocabulary vocab =
      joint_vocabulary({&synth_squad, &train_data, &test_data, &ctx_data}, cfg.vocab_size);
  eval::EvalSet train_set = make_eval_set(train_data, vocab, limits_of(cfg));
  eval::EvalSet test_set = make_eval_set(test_data, vocab, limits_of(cfg));
  TrainedQa reader = train_reader(train_set, cfg.qa_config());

  std::vector<corpus::Context> contexts;
  for (const auto& [ctx, unused] : ctx_data) contexts.push_back(ctx);

  json rows = json::array();
  double best_em = -1.0, best_threshold = 0.0;
  for (double threshold : cfg.sweep_grid) {
    eval::RefineResult refined =
        eval::refine_pairs(pairs, contexts, vocab, *reader.model, reader.store, threshold,
                           cfg.max_context_len);
    corpus::SquadData refined_squad = pairs_to_squad(refined.pairs, ctx_data);
    eval::EvalSet synth = make_eval_set(refined_squad, vocab, limits_of(cfg));
    eval::SemiSupReport rep = eval::semi_supervised_train(
        synth, train_set, test_set, cfg.qa_config(), cfg.qa_lr_synthetic, cfg.qa_lr_human);
    rows.push_back({{"threshold", threshold},
                    {"replaced", refined.replaced},
                    {"em", rep.augmented.em},
                    {"f1", rep.augmented.f1}});
    std::cout << "threshold " << threshold << ": replaced " << refined.replaced << ", EM "
              << rep.augmented.em << ", F1 " << rep.augmented.f1 << "\n";
    if (rep.augmented.em > best_em) {  // ties keep the lower threshold
      best_em = rep.augmented.em;
      best_threshold = threshold;
    }
  }
  json j{{"rows", rows}, {"best_threshold", best_threshold}, {"config_hash", cfg.hash()}};
  std::string out_path = out_file(cfg, "sweep_report.json");
  std::ofstream(out_path) << j.dump(2) << "\n";
  std::cout << "best threshold " << best_threshold << " (EM " << best_em << ") -> " << out_path
            << "\n";
  write_provenance(cfg, "sweep-threshold", "", {out_path});
  return 0;
}

}  // namespace

int cli_main(std::vector<std::string> args) {
  RunConfig cfg;

  // defaults < config file < flags
  for (size_t i = 0; i + 1 < args.size(); ++i) {
    if (args[i] == "--config") {
      std::ifstream in(args[i + 1]);
      if (!in) {
        std::cerr << "error: cannot open config file " << args[i + 1] << "\n";
        return 1;
      }
      std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
      try {
        cfg.apply_json_text(text);
      } catch (const std::exception& e) {
        std::cerr << "error: bad config file: " << e.what() << "\n";
        return 1;
      }
    }
  }

  CLI::App app{"question-answer pair generator and evaluation harness"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "JSON config file merged under the flags");

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--seed", cfg.seed, "global random seed");
    sub->add_option("--out", cfg.out_dir, "output directory");
    sub->add_option("--profile", cfg.profile, "width profile: desk or paper");
    sub->add_option("--vocab-size", cfg.vocab_size, "vocabulary cap");
    sub->add_option("--max-context-len", cfg.max_context_len, "context token cap");
    sub->add_option("--max-question-len", cfg.max_question_len, "question token cap");
  };

  CLI::App* train = app.add_subcommand("train", "train the generator");
  add_common(train);
  train->add_option("--data", cfg.data_path, "SQuAD v1.1 JSON training file")->required();
  train->add_option("--epochs", cfg.epochs, "training epochs");
  train->add_option("--max-steps", cfg.max_steps, "stop after this many steps (0 = off)");
  train->add_option("--batch-size", cfg.batch_size, "examples per step");
  train->add_option("--lr", cfg.learning_rate, "Adam learning rate");
  train->add_option("--lambda", cfg.lambda_info, "InfoMax weight");
  train->add_option("--kl-weight", cfg.kl_weight, "KL down-weighting factor");
  train->add_option("--gumbel-tau", cfg.gumbel_tau, "gumbel-softmax temperature");
  train->add_flag("--question-latent,!--no-question-latent", cfg.enable_question_latent,
                  "toggle the question latent");
  train->add_flag("--answer-latent,!--no-answer-latent", cfg.enable_answer_latent,
                  "toggle the answer latent");
  train->add_flag("--infomax,!--no-infomax", cfg.enable_infomax, "toggle the InfoMax term");
  train->add_flag("--unfreeze-embeddings", cfg.unfreeze_embeddings,
                  "train the embedding tables too");

  CLI::App* generate = app.add_subcommand("generate", "sample QA pairs from contexts");
  add_common(generate);
  generate->add_option("--checkpoint", cfg.checkpoint_path, "trained model")->required();
  generate->add_option("--data", cfg.data_path, "SQuAD JSON supplying contexts")->required();
  generate->add_option("--k", cfg.k, "draws per context");
  generate->add_flag("--sample-zy", cfg.sample_zy, "draw z_y instead of per-block argmax");
  generate->add_option("--max-answer-len", cfg.max_answer_len, "answer span cap");

  CLI::App* interp = app.add_subcommand("interpolate", "walk the question latent space");
  add_common(interp);
  interp->add_option("--checkpoint", cfg.checkpoint_path, "trained model")->required();
  interp->add_option("--data", cfg.data_path, "SQuAD JSON with >= 2 QAs per context")->required();
  interp->add_option("--context-id", cfg.context_id, "context to use (default: first usable)");
  interp->add_option("--pair-a", cfg.pair_a, "index of the first QA pair");
  interp->add_option("--pair-b", cfg.pair_b, "index of the second QA pair");
  interp->add_option("--interpolate-steps", cfg.interpolate_steps, "points on [0,1]");

  CLI::App* eval_qae = app.add_subcommand("eval-qae", "train reader on synthetic, test on human");
  add_common(eval_qae);
  eval_qae->add_option("--synthetic", cfg.synthetic_path, "generated pairs JSONL")->required();
  eval_qae->add_option("--contexts", cfg.contexts_path, "SQuAD JSON the pairs refer to")
      ->required();
  eval_qae->add_option("--test", cfg.test_path, "human test SQuAD JSON")->required();
  eval_qae->add_option("--checkpoint", cfg.checkpoint_path,
                       "optional generator checkpoint for the MI score");
  eval_qae->add_option("--qa-epochs", cfg.qa_epochs, "reader epochs");

  CLI::App* eval_rqae = app.add_subcommand("eval-rqae", "train reader on human, test on synthetic");
  add_common(eval_rqae);
  eval_rqae->add_option("--synthetic", cfg.synthetic_path, "generated pairs JSONL")->required();
  eval_rqae->add_option("--contexts", cfg.contexts_path, "SQuAD JSON the pairs refer to")
      ->required();
  eval_rqae->add_option("--train", cfg.train_path, "human train SQuAD JSON")->required();
  eval_rqae->add_option("--qa-epochs", cfg.qa_epochs, "reader epochs");

  CLI::App* refine = app.add_subcommand("refine", "replace low-F1 answers with reader predictions");
  add_common(refine);
  refine->add_option("--synthetic", cfg.synthetic_path, "generated pairs JSONL")->required();
  refine->add_option("--contexts", cfg.contexts_path, "SQuAD JSON the pairs refer to")->required();
  refine->add_option("--train", cfg.train_path, "human train SQuAD JSON")->required();
  refine->add_option("--threshold", cfg.refine_threshold, "F1 replacement threshold");

  CLI::App* semi = app.add_subcommand("semi-sup", "pretrain on synthetic, fine-tune on human");
  add_common(semi);
  semi->add_option("--train", cfg.train_path, "human train SQuAD JSON")->required();
  semi->add_option("--test", cfg.test_path, "held-out SQuAD JSON")->required();
  semi->add_option("--synthetic", cfg.synthetic_path, "generated pairs JSONL (optional)");
  semi->add_option("--contexts", cfg.contexts_path, "contexts for the synthetic pairs");
  semi->add_option("--qa-epochs", cfg.qa_epochs, "epochs per phase");
  semi->add_option("--qa-lr-synthetic", cfg.qa_lr_synthetic, "pretraining learning rate");
  semi->add_option("--qa-lr-human", cfg.qa_lr_human, "fine-tuning learning rate");

  CLI::App* sweep = app.add_subcommand("sweep-threshold", "refinement threshold grid search");
  add_common(sweep);
  sweep->add_option("--synthetic", cfg.synthetic_path, "generated pairs JSONL")->required();
  sweep->add_option("--contexts", cfg.contexts_path, "SQuAD JSON the pairs refer to")->required();
  sweep->add_option("--train", cfg.train_path, "human train SQuAD JSON")->required();
  sweep->add_option("--test", cfg.test_path, "held-out SQuAD JSON")->required();
  sweep->add_option("--grid", cfg.sweep_grid, "thresholds to try");

  std::vector<const char*> argv;
  argv.push_back("qagen");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;  // help exits 0; any usage problem exits 2
  }

  try {
    if (train->parsed()) return cmd_train(cfg);
    if (generate->parsed()) return cmd_generate(cfg);
    if (interp->parsed()) return cmd_interpolate(cfg);
    if (eval_qae->parsed()) return cmd_eval_qae(cfg);
    if (eval_rqae->parsed()) return cmd_eval_rqae(cfg);
    if (refine->parsed()) return cmd_refine(cfg);
    if (semi->parsed()) return cmd_semi_sup(cfg);
    if (sweep->parsed()) return cmd_sweep(cfg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace qagen::cli
