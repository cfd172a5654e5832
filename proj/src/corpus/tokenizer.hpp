#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "corpus/vocab.hpp"

namespace qagen::corpus {

// Byte offsets [begin, end) into the original text.
struct TokenSpan {
  int begin = 0;
  int end = 0;
};

// Lowercase word-level splitter: runs of alphanumeric bytes (plus any
// non-ASCII byte) form words, every other printable byte is its own token.
// Offsets are ascending, non-overlapping, and cover each non-space byte.
std::vector<std::pair<std::string, TokenSpan>> split_tokens(const std::string& text);

struct Tokenized {
  std::vector<int> ids;
  std::vector<TokenSpan> offsets;
};

Tokenized tokenize(const std::string& text, const Vocabulary& vocab);

// Joins tokens with single spaces; skips ids in `skip` (e.g. UNK/PAD).
std::string detokenize(const std::vector<int>& ids, const Vocabulary& vocab,
                       const std::vector<int>& skip = {});

// Walks token offsets to the inclusive token span covering the answer.
// Empty when no token contains the first or last answer character.
std::optional<std::pair<int, int>> align_answer_span(int answer_char_start,
                                                     const std::string& answer_text,
                                                     const std::vector<TokenSpan>& token_offsets);

// Binary answer-position markers: 1 exactly on [span.first, span.second].
std::vector<int> make_token_type_ids(int length, std::pair<int, int> span);

}  // namespace qagen::corpus
