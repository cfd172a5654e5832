#include "corpus/squad.hpp"

#include <fstream>
#include <iostream>

#include "eval/metrics.hpp"
#include "json.hpp"

namespace qagen::corpus {

using nlohmann::json;

SquadData load_squad_json(const std::string& path, LoadStats* stats) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open data file: " + path);
  json root;
  try {
    in >> root;
  } catch (const json::exception& e) {
    throw std::runtime_error("malformed JSON in " + path + ": " + e.what());
  }
  LoadStats local;
  LoadStats& st = stats ? *stats : local;

  SquadData out;
  if (!root.contains("data")) throw std::runtime_error("missing 'data' array in " + path);
  int para_counter = 0;
  for (const auto& article : root.at("data")) {
    std::string title = article.value("title", "");
    for (const auto& para : article.at("paragraphs")) {
      Context ctx;
      ctx.text = para.at("context").get<std::string>();
      ctx.id = title.empty() ? "p" + std::to_string(para_counter)
                             : title + "_p" + std::to_string(para_counter);
      ++para_counter;
      if (ctx.text.empty()) continue;
      std::vector<QAPair> pairs;
      for (const auto& qa : para.at("qas")) {
        if (qa.at("answers").empty()) continue;
        const auto& ans = qa.at("answers").at(0);
        QAPair p;
        p.question_text = qa.at("question").get<std::string>();
        p.answer_text = ans.at("text").get<std::string>();
        p.answer_char_start = ans.at("answer_start").get<int>();
        if (p.answer_char_start < 0 ||
            p.answer_char_start + p.answer_text.size() > ctx.text.size()) {
          ++st.skipped_bad_offset;
          std::cerr << "warning: answer_start out of bounds in " << ctx.id << ", record skipped\n";
          continue;
        }
        if (ctx.text.compare(p.answer_char_start, p.answer_text.size(), p.answer_text) != 0) {
          ++st.skipped_bad_substring;
          std::cerr << "warning: answer text does not match context substring in " << ctx.id
                    << ", record skipped\n";
          continue;
        }
        ++st.pairs_loaded;
        pairs.push_back(std::move(p));
      }
      ++st.paragraphs;
      out.emplace_back(std::move(ctx), std::move(pairs));
    }
  }
  return out;
}

Vocabulary build_vocabulary(const SquadData& data, int max_size) {
  std::unordered_map<std::string, long> counts;
  for (const auto& [ctx, pairs] : data) {
    for (auto& [tok, span] : split_tokens(ctx.text)) counts[tok]++;
    for (const auto& p : pairs)
      for (auto& [tok, span] : split_tokens(p.question_text)) counts[tok]++;
  }
  return Vocabulary::build(counts, max_size);
}

PreparedCorpus prepare_corpus(const SquadData& data, const Vocabulary& vocab,
                              const CorpusLimits& limits) {
  PreparedCorpus out;
  for (const auto& [ctx, pairs] : data) {
    int ctx_index = static_cast<int>(out.contexts.size());
    out.contexts.push_back(ctx);
    Tokenized ctok = tokenize(ctx.text, vocab);
    int m = static_cast<int>(ctok.ids.size());
    if (m == 0) continue;
    if (m > limits.max_context_len) {
      m = limits.max_context_len;
      ctok.ids.resize(m);
      ctok.offsets.resize(m);
    }
    for (const auto& p : pairs) {
      auto span = align_answer_span(p.answer_char_start, p.answer_text, ctok.offsets);
      if (!span) {
        ++out.stats.skipped_unalignable;
        continue;
      }
      if (span->second >= m) {  // answer fell off the truncated tail
        ++out.stats.skipped_truncated_answer;
        continue;
      }
      // The aligned tokens must still spell the answer after normalization;
      // mid-token answer starts fail here and are counted as unalignable.
      std::vector<int> span_ids(ctok.ids.begin() + span->first,
                                ctok.ids.begin() + span->second + 1);
      std::string detok = detokenize(span_ids, vocab, {Vocabulary::kUnk});
      if (eval::normalize_answer(detok) != eval::normalize_answer(p.answer_text)) {
        ++out.stats.skipped_answer_mismatch;
        continue;
      }
      Tokenized qtok = tokenize(p.question_text, vocab);
      std::vector<int> qids;
      qids.reserve(qtok.ids.size() + 2);
      qids.push_back(Vocabulary::kBos);
      qids.insert(qids.end(), qtok.ids.begin(), qtok.ids.end());
      qids.push_back(Vocabulary::kEos);
      if (static_cast<int>(qids.size()) > limits.max_question_len) {
        ++out.stats.skipped_question_overflow;
        continue;
      }
      TokenizedExample ex;
      ex.context_index = ctx_index;
      ex.context_ids.assign(ctok.ids.begin(), ctok.ids.begin() + m);
      ex.context_offsets.assign(ctok.offsets.begin(), ctok.offsets.begin() + m);
      ex.span_start = span->first;
      ex.span_end = span->second;
      ex.token_type_ids = make_token_type_ids(m, *span);
      ex.question_ids = std::move(qids);
      ex.question_text = p.question_text;
      ex.answer_text = p.answer_text;
      ex.answer_char_start = p.answer_char_start;
      ++out.stats.examples;
      out.examples.push_back(std::move(ex));
    }
  }
  return out;
}

}  // namespace qagen::corpus
