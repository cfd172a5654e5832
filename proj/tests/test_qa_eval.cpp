#include "doctest.h"

#include <cmath>

#include "corpus/squad.hpp"
#include "eval/harness.hpp"
#include "eval/metrics.hpp"
#include "support/tmpdir.hpp"
#include "support/toy_corpus.hpp"

using namespace qagen;
using namespace qagen::eval;
using qagen::testsupport::TmpDir;
using qagen::testsupport::ToyCorpus;

TEST_CASE("normalize_answer lowercases, strips punctuation and articles") {
  CHECK(normalize_answer("The Cat!") == "cat");
  CHECK(normalize_answer("a  dog") == "dog");
  CHECK(normalize_answer("already normal") == "already normal");
  CHECK(normalize_answer("An Apple, a Day.") == "apple day");
}

TEST_CASE("token_f1 hand values and conventions") {
  CHECK(token_f1("same answer", "same answer") == doctest::Approx(100.0));
  // one shared-token-out-of-three each way: P = R = 2/3
  CHECK(token_f1("big cat sat", "cat sat down") == doctest::Approx(200.0 / 3).epsilon(1e-9));
  CHECK(token_f1("alpha beta", "gamma delta") == 0.0);
  CHECK(token_f1("", "") == 100.0);
  CHECK(token_f1("", "word") == 0.0);
  CHECK(token_f1("word", "") == 0.0);
  // articles vanish before counting
  CHECK(token_f1("the paris", "paris") == doctest::Approx(100.0));
}

TEST_CASE("token_f1 is symmetric and perfect on identity") {
  Rng rng(101);
  std::vector<std::string> words = {"red", "blue", "fox", "runs", "fast", "1984"};
  for (int rep = 0; rep < 50; ++rep) {
    auto make = [&] {
      std::string s;
      int n = rng.uniform_int(1, 5);
      for (int i = 0; i < n; ++i) {
        if (!s.empty()) s += " ";
        s += words[rng.uniform_int(0, static_cast<int>(words.size()) - 1)];
      }
      return s;
    };
    std::string a = make(), b = make();
    CHECK(token_f1(a, b) == doctest::Approx(token_f1(b, a)).epsilon(1e-12));
    CHECK(token_f1(a, a) == doctest::Approx(100.0));
    CHECK(exact_match(a, a) == 100.0);
  }
}

TEST_CASE("exact_match is normalization-insensitive") {
  CHECK(exact_match("Paris", "paris") == 100.0);
  CHECK(exact_match("the Paris!", "paris") == 100.0);
  CHECK(exact_match("london", "paris") == 0.0);
}

namespace {

struct HarnessFixture {
  TmpDir tmp;
  corpus::SquadData data;
  corpus::Vocabulary vocab;
  EvalSet set;

  explicit HarnessFixture(int contexts, uint64_t seed) {
    ToyCorpus::Options opt;
    opt.contexts = contexts;
    opt.seed = seed;
    opt.phrasing_variants = false;
    auto path = tmp.write("toy.json", ToyCorpus::make_json(opt));
    data = corpus::load_squad_json(path);
    vocab = corpus::build_vocabulary(data, 30000);
    set = to_eval_set(corpus::prepare_corpus(data, vocab, corpus::CorpusLimits{}));
  }
};

qa::QaConfig overfit_config(int n_examples) {
  qa::QaConfig c;
  c.d = 32;
  c.epochs = 400;
  c.batch_size = n_examples;
  c.learning_rate = 2e-3;
  c.seed = 11;
  return c;
}

}  // namespace

TEST_CASE("qa model overfits ten examples to EM 100") {
  HarnessFixture fx(4, 17);
  REQUIRE(fx.set.examples.size() >= 10);
  fx.set.examples.resize(10);
  qa::QaConfig cfg = overfit_config(10);
  EmF1 self = train_and_evaluate(fx.set, fx.set, cfg);
  CHECK(self.em == doctest::Approx(100.0));
  CHECK(self.f1 == doctest::Approx(100.0));
}

TEST_CASE("qa evaluation is deterministic and prediction text is a context substring") {
  HarnessFixture fx(3, 19);
  qa::QaConfig cfg;
  cfg.d = 24;
  cfg.epochs = 2;
  cfg.seed = 5;
  EmF1 a = train_and_evaluate(fx.set, fx.set, cfg);
  EmF1 b = train_and_evaluate(fx.set, fx.set, cfg);
  CHECK(a.em == b.em);
  CHECK(a.f1 == b.f1);

  // an untrained reader still predicts spans that are context substrings
  qa::QaModel model(fx.vocab.size(), cfg);
  ParameterStore store;
  Rng rng(cfg.seed);
  model.init(store, rng);
  for (const auto& ex : fx.set.examples) {
    auto pred = model.predict(store, ex.context_ids, ex.question_ids);
    REQUIRE(pred.has_value());
    CHECK(pred->span_start <= pred->span_end);
    CHECK(pred->span_end < static_cast<int>(ex.context_ids.size()));
    CHECK(pred->span_end - pred->span_start < cfg.max_answer_len);
  }
}

namespace {

std::vector<gen::GeneratedPair> pairs_from_examples(const EvalSet& set) {
  std::vector<gen::GeneratedPair> out;
  for (const auto& ex : set.examples) {
    gen::GeneratedPair p;
    p.context_id = set.contexts[ex.context_index].id;
    p.question_text = ex.question_text;
    p.answer_text = ex.answer_text;
    p.answer_token_start = ex.span_start;
    p.answer_token_end = ex.span_end;
    p.answer_char_start = ex.answer_char_start;
    p.answer_char_end = ex.answer_char_start + static_cast<int>(ex.answer_text.size());
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace

TEST_CASE("refine_pairs thresholds, replacement, and idempotence") {
  HarnessFixture fx(4, 23);
  fx.set.examples.resize(10);
  qa::QaConfig cfg = overfit_config(10);
  qa::QaModel reader(fx.vocab.size(), cfg);
  ParameterStore store;
  Rng rng(cfg.seed);
  reader.init(store, rng);
  Adam adam(cfg.learning_rate);
  reader.train(store, adam, fx.set.examples);

  auto pairs = pairs_from_examples(fx.set);
  // corrupt one answer so the reader disagrees with it completely
  pairs[0].answer_text = "zzz unrelated";

  // threshold 0: F1 < 0 never holds, nothing changes
  auto r0 = refine_pairs(pairs, fx.set.contexts, fx.vocab, reader, store, 0.0);
  CHECK(r0.replaced == 0);

  // threshold just above 100 replaces every pair that is not an exact match
  auto rall = refine_pairs(pairs, fx.set.contexts, fx.vocab, reader, store, 100.0 + 1e-9);
  CHECK(rall.replaced >= 1);

  // threshold 40 replaces the corrupted pair and keeps gold ones
  auto r40 = refine_pairs(pairs, fx.set.contexts, fx.vocab, reader, store, 40.0);
  CHECK(r40.replaced == 1);
  CHECK(r40.pairs[0].answer_text != "zzz unrelated");

  // a pair at F1 = 50 against the prediction survives threshold 40
  auto gold_pred = reader.predict(store, fx.set.examples[1].context_ids,
                                  fx.set.examples[1].question_ids);
  REQUIRE(gold_pred.has_value());
  // the overfit reader reproduces the gold single-token answer, so pad the
  // generated text with two extra tokens: P=1/3, R=1 -> F1 50
  REQUIRE(fx.set.examples[1].span_start == fx.set.examples[1].span_end);
  auto padded = pairs;
  padded[1].answer_text = "xx yy " + fx.set.examples[1].answer_text;
  auto r50 = refine_pairs(padded, fx.set.contexts, fx.vocab, reader, store, 40.0);
  CHECK(r50.pairs[1].answer_text == padded[1].answer_text);

  // idempotence: a second pass changes nothing
  auto again = refine_pairs(r40.pairs, fx.set.contexts, fx.vocab, reader, store, 40.0);
  CHECK(again.replaced == 0);
  for (size_t i = 0; i < again.pairs.size(); ++i)
    CHECK(again.pairs[i].answer_text == r40.pairs[i].answer_text);
}

TEST_CASE("semi-supervised: empty synthetic degenerates to human-only training") {
  HarnessFixture fx(3, 29);
  qa::QaConfig cfg;
  cfg.d = 24;
  cfg.epochs = 2;
  cfg.seed = 7;
  EvalSet empty;
  SemiSupReport rep = semi_supervised_train(empty, fx.set, fx.set, cfg, 4e-4, 6e-4);
  CHECK(std::isfinite(rep.baseline.em));
  CHECK(std::isfinite(rep.augmented.em));
  CHECK(!rep.qa_config_hash.empty());
}

TEST_CASE("estimate_mi is finite on a freshly initialized generator") {
  HarnessFixture fx(3, 31);
  model::ModelDims dims = model::ModelDims::desk();
  dims.d_emb = 16;
  dims.d_ctx = 24;
  dims.enc_width = 10;
  dims.qg_enc_width = 12;
  model::InfoHcvae hcvae(dims, fx.vocab.size());
  ParameterStore store;
  Rng rng(33);
  hcvae.init(store, rng, model::TrainFlags{});
  double mi = estimate_mi(hcvae, store, fx.set);
  CHECK(std::isfinite(mi));
}
