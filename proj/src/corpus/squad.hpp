#pragma once

#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "corpus/tokenizer.hpp"
#include "corpus/vocab.hpp"

namespace qagen::corpus {

struct Context {
  std::string id;
  std::string text;
  size_t char_count() const { return text.size(); }
};

struct QAPair {
  std::string question_text;
  std::string answer_text;
  int answer_char_start = 0;
};

struct LoadStats {
  int paragraphs = 0;
  int pairs_loaded = 0;
  int skipped_bad_offset = 0;     // answer_start outside the context
  int skipped_bad_substring = 0;  // answer text != context substring at offset
};

using SquadData = std::vector<std::pair<Context, std::vector<QAPair>>>;

// SQuAD v1.1 schema: data -> paragraphs -> {context, qas -> {question,
// answers -> {text, answer_start}}}. Records violating the substring
// invariant are skipped with a warning, not errored.
SquadData load_squad_json(const std::string& path, LoadStats* stats = nullptr);

struct TokenizedExample {
  int context_index = 0;  // into the contexts vector
  std::vector<int> context_ids;
  std::vector<TokenSpan> context_offsets;
  std::vector<int> token_type_ids;
  std::vector<int> question_ids;  // BOS ... EOS
  int span_start = 0, span_end = 0;
  std::string question_text;
  std::string answer_text;
  int answer_char_start = 0;
};

struct CorpusLimits {
  int max_context_len = 384;
  int max_question_len = 32;  // includes BOS/EOS
  int vocab_size = 30000;
};

struct PrepareStats {
  int examples = 0;
  int skipped_unalignable = 0;
  int skipped_question_overflow = 0;
  int skipped_answer_mismatch = 0;  // normalized detok != normalized gold
  int skipped_truncated_answer = 0;
};

struct PreparedCorpus {
  std::vector<Context> contexts;
  std::vector<TokenizedExample> examples;
  PrepareStats stats;
};

Vocabulary build_vocabulary(const SquadData& data, int max_size);

PreparedCorpus prepare_corpus(const SquadData& data, const Vocabulary& vocab,
                              const CorpusLimits& limits);

}  // namespace qagen::corpus
