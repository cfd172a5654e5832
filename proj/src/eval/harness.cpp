#include "eval/harness.hpp"

#include <map>

#include "corpus/tokenizer.hpp"
#include "json.hpp"
#include "model/latent.hpp"

namespace qagen::eval {

EvalSet to_eval_set(const corpus::PreparedCorpus& corpus) {
  return {corpus.contexts, corpus.examples};
}

namespace {

std::string prediction_text(const corpus::TokenizedExample& ex, const corpus::Context& ctx,
                            int span_start, int span_end) {
  int begin = ex.context_offsets[span_start].begin;
  int end = ex.context_offsets[span_end].end;
  return ctx.text.substr(begin, end - begin);
}

EmF1 mean_scores(const std::vector<double>& ems, const std::vector<double>& f1s) {
  EmF1 out;
  if (ems.empty()) return out;
  for (double v : ems) out.em += v;
  for (double v : f1s) out.f1 += v;
  out.em /= ems.size();
  out.f1 /= f1s.size();
  return out;
}

}  // namespace

EmF1 evaluate_trained(const qa::QaModel& model, ParameterStore& store, const EvalSet& test) {
  std::vector<double> ems(test.examples.size(), 0.0), f1s(test.examples.size(), 0.0);
#pragma omp parallel for schedule(static)
  for (long i = 0; i < static_cast<long>(test.examples.size()); ++i) {
    const auto& ex = test.examples[i];
    auto pred = model.predict(store, ex.context_ids, ex.question_ids);
    if (!pred) continue;
    std::string text = prediction_text(ex, test.contexts[ex.context_index], pred->span_start,
                                       pred->span_end);
    ems[i] = exact_match(text, ex.answer_text);
    f1s[i] = token_f1(text, ex.answer_text);
  }
  return mean_scores(ems, f1s);
}

EmF1 train_and_evaluate(const EvalSet& train, const EvalSet& test, const qa::QaConfig& config) {
  if (train.examples.empty() || test.examples.empty())
    throw std::invalid_argument("qa evaluation needs non-empty train and test sets");
  // vocab ids flow from the shared corpus vocabulary; size = max id + 1
  int vocab_size = 0;
  for (const auto& ex : train.examples)
    for (int id : ex.context_ids) vocab_size = std::max(vocab_size, id + 1);
  for (const auto& exs : {train.examples, test.examples})
    for (const auto& ex : exs) {
      for (int id : ex.context_ids) vocab_size = std::max(vocab_size, id + 1);
      for (int id : ex.question_ids) vocab_size = std::max(vocab_size, id + 1);
    }

  qa::QaModel model(vocab_size, config);
  ParameterStore store;
  Rng rng(config.seed);
  model.init(store, rng);
  Adam adam(config.learning_rate);
  model.train(store, adam, train.examples);
  return evaluate_trained(model, store, test);
}

EmF1 qae(const EvalSet& synthetic, const EvalSet& human_test, const qa::QaConfig& config) {
  return train_and_evaluate(synthetic, human_test, config);
}

EmF1 rqae(const EvalSet& human_train, const EvalSet& synthetic, const qa::QaConfig& config) {
  return train_and_evaluate(human_train, synthetic, config);
}

RefineResult refine_pairs(const std::vector<gen::GeneratedPair>& pairs,
                          const std::vector<corpus::Context>& contexts,
                          const corpus::Vocabulary& vocab, const qa::QaModel& qa_model,
                          ParameterStore& qa_store, double threshold, int max_context_len) {
  std::map<std::string, const corpus::Context*> by_id;
  for (const auto& c : contexts) by_id[c.id] = &c;

  RefineResult out;
  out.pairs = pairs;
  for (auto& pair : out.pairs) {
    auto it = by_id.find(pair.context_id);
    if (it == by_id.end()) continue;
    const corpus::Context& ctx = *it->second;

    corpus::Tokenized ctok = corpus::tokenize(ctx.text, vocab);
    int m = std::min<int>(static_cast<int>(ctok.ids.size()), max_context_len);
    ctok.ids.resize(m);
    ctok.offsets.resize(m);
    corpus::Tokenized qtok = corpus::tokenize(pair.question_text, vocab);
    std::vector<int> q_ids;
    q_ids.push_back(corpus::Vocabulary::kBos);
    q_ids.insert(q_ids.end(), qtok.ids.begin(), qtok.ids.end());
    q_ids.push_back(corpus::Vocabulary::kEos);

    auto pred = qa_model.predict(qa_store, ctok.ids, q_ids);
    if (!pred) continue;
    int begin = ctok.offsets[pred->span_start].begin;
    int end = ctok.offsets[pred->span_end].end;
    std::string pred_text = ctx.text.substr(begin, end - begin);

    if (token_f1(pair.answer_text, pred_text) < threshold) {
      pair.answer_text = pred_text;
      pair.answer_token_start = pred->span_start;
      pair.answer_token_end = pred->span_end;
      pair.answer_char_start = begin;
      pair.answer_char_end = end;
      ++out.replaced;
    }
  }
  return out;
}

SemiSupReport semi_supervised_train(const EvalSet& synthetic, const EvalSet& human_train,
                                    const EvalSet& test, const qa::QaConfig& config,
                                    double lr_synthetic, double lr_human) {
  if (human_train.examples.empty() || test.examples.empty())
    throw std::invalid_argument("semi-supervised training needs human train and test sets");

  SemiSupReport report;
  report.baseline = train_and_evaluate(human_train, test, config);

  int vocab_size = 0;
  for (const auto* set : {&synthetic, &human_train, &test})
    for (const auto& ex : set->examples) {
      for (int id : ex.context_ids) vocab_size = std::max(vocab_size, id + 1);
      for (int id : ex.question_ids) vocab_size = std::max(vocab_size, id + 1);
    }

  qa::QaModel model(vocab_size, config);
  ParameterStore store;
  Rng rng(config.seed);
  model.init(store, rng);
  Adam adam(config.learning_rate);
  if (!synthetic.examples.empty()) {
    adam.set_lr(lr_synthetic);
    qa::QaConfig pre = config;
    pre.learning_rate = lr_synthetic;
    qa::QaModel pre_model(vocab_size, pre);
    pre_model.train(store, adam, synthetic.examples);
  }
  adam.set_lr(lr_human);
  qa::QaConfig fin = config;
  fin.learning_rate = lr_human;
  qa::QaModel fin_model(vocab_size, fin);
  fin_model.train(store, adam, human_train.examples);
  report.augmented = evaluate_trained(model, store, test);

  nlohmann::json cfg{{"d", config.d},        {"layers", config.layers},
                     {"epochs", config.epochs}, {"batch_size", config.batch_size},
                     {"seed", config.seed},  {"lr_synthetic", lr_synthetic},
                     {"lr_human", lr_human}};
  report.qa_config_hash = std::to_string(std::hash<std::string>{}(cfg.dump()));
  return report;
}

double estimate_mi(const model::InfoHcvae& hcvae, ParameterStore& store, const EvalSet& pairs) {
  if (pairs.examples.empty()) return 0.0;
  long n = static_cast<long>(pairs.examples.size());
  std::vector<double> scores(n, 0.0);  // slot per pair keeps the sum order fixed
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i) {
    const auto& ex = pairs.examples[i];
    Graph g(&store);
    model::GaussianVars post = hcvae.question_posterior(g, ex.question_ids, ex.context_ids);
    Var z_x = post.mu;  // posterior mean, deterministic
    model::CategoricalVars apost =
        hcvae.answer_posterior(g, z_x, ex.context_ids, ex.token_type_ids);
    auto choices = model::categorical_argmax_blocks(g.value(apost.logits));
    Var z_y = g.input(model::one_hot_blocks(choices, hcvae.dims().z_a_classes));
    Var z_proj = hcvae.project_answer_latent(g, z_y);

    auto span_fwd = hcvae.predict_answer(g, ex.context_ids, z_proj);
    Var y_bar = model::InfoMax::summarize_answer(g, span_fwd.hidden,
                                                 {ex.span_start, ex.span_end});
    Var h_hat = hcvae.qg_states(g, ex.context_ids, ex.token_type_ids);
    auto tf = hcvae.question_decoder().question_nll(g, ex.question_ids, z_x, h_hat,
                                                    ex.context_ids);
    Var x_bar = model::InfoMax::summarize_question(g, tf.fused);
    scores[i] = g.value(hcvae.infomax().score(g, x_bar, y_bar))(0, 0);
  }
  double acc = 0.0;
  for (double s : scores) acc += s;
  return acc / static_cast<double>(n);
}

std::string report_to_json(const EvalReport& report) {
  nlohmann::json j{{"qae", {{"em", report.qae.em}, {"f1", report.qae.f1}}},
                   {"rqae", {{"em", report.rqae.em}, {"f1", report.rqae.f1}}},
                   {"mi_score", report.mi_score},
                   {"pairs_used", report.pairs_used},
                   {"pairs_replaced", report.pairs_replaced},
                   {"config_hash", report.config_hash}};
  return j.dump(2);
}

}  // namespace qagen::eval
