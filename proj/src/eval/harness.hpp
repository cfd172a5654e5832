#pragma once

#include <string>
#include <vector>

#include "corpus/squad.hpp"
#include "eval/metrics.hpp"
#include "gen/generator.hpp"
#include "model/hcvae.hpp"
#include "qa/qa_model.hpp"

namespace qagen::eval {

// Context list + tokenized examples, the unit every harness op consumes.
struct EvalSet {
  std::vector<corpus::Context> contexts;
  std::vector<corpus::TokenizedExample> examples;
};

EvalSet to_eval_set(const corpus::PreparedCorpus& corpus);

// Trains a fresh QA model on `train` and scores it on `test`. Prediction
// text comes from the test context characters under the predicted span.
EmF1 train_and_evaluate(const EvalSet& train, const EvalSet& test, const qa::QaConfig& config);

// QAE: train on synthetic pairs, evaluate on human test data.
EmF1 qae(const EvalSet& synthetic, const EvalSet& human_test, const qa::QaConfig& config);

// R-QAE: train on human pairs, evaluate on the synthetic pairs.
EmF1 rqae(const EvalSet& human_train, const EvalSet& synthetic, const qa::QaConfig& config);

// Scores `test` with an already-trained QA model.
EmF1 evaluate_trained(const qa::QaModel& model, ParameterStore& store, const EvalSet& test);

struct RefineResult {
  std::vector<gen::GeneratedPair> pairs;
  int replaced = 0;
};

// Appendix-style answer refinement: when token F1 between the generated
// answer and the trained QA model's prediction falls below the threshold,
// both answer text and span are replaced by the prediction. Questions are
// never changed. Idempotent for any threshold <= 100.
RefineResult refine_pairs(const std::vector<gen::GeneratedPair>& pairs,
                          const std::vector<corpus::Context>& contexts,
                          const corpus::Vocabulary& vocab, const qa::QaModel& qa_model,
                          ParameterStore& qa_store, double threshold, int max_context_len = 384);

struct SemiSupReport {
  EmF1 baseline;   // trained on human data only
  EmF1 augmented;  // pretrained on synthetic, fine-tuned on human
  std::string qa_config_hash;
};

// Two-phase protocol: pretrain on synthetic (epochs, lr_synthetic), then
// fine-tune on human (epochs, lr_human). Empty synthetic degenerates to
// human-only training.
SemiSupReport semi_supervised_train(const EvalSet& synthetic, const EvalSet& human_train,
                                    const EvalSet& test, const qa::QaConfig& config,
                                    double lr_synthetic, double lr_human);

// Mean raw bilinear critic score over pairs, via teacher-forced summaries
// at the posterior mean / argmax latents.
double estimate_mi(const model::InfoHcvae& hcvae, ParameterStore& store, const EvalSet& pairs);

struct EvalReport {
  EmF1 qae;
  EmF1 rqae;
  double mi_score = 0.0;
  int pairs_used = 0;
  int pairs_replaced = 0;
  std::string config_hash;
};

std::string report_to_json(const EvalReport& report);

}  // namespace qagen::eval
