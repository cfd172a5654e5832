#include "corpus/tokenizer.hpp"

#include <cctype>
#include <stdexcept>

namespace qagen::corpus {

namespace {
inline bool is_word_byte(unsigned char c) { return std::isalnum(c) || c >= 0x80; }
inline bool is_space_byte(unsigned char c) { return std::isspace(c); }
}  // namespace

std::vector<std::pair<std::string, TokenSpan>> split_tokens(const std::string& text) {
  std::vector<std::pair<std::string, TokenSpan>> out;
  const int n = static_cast<int>(text.size());
  int i = 0;
  while (i < n) {
    unsigned char c = static_cast<unsigned char>(text[i]);
    if (is_space_byte(c)) {
      ++i;
      continue;
    }
    if (is_word_byte(c)) {
      int j = i;
      std::string tok;
      while (j < n && is_word_byte(static_cast<unsigned char>(text[j]))) {
        tok.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(text[j]))));
        ++j;
      }
      out.push_back({std::move(tok), {i, j}});
      i = j;
    } else {
      out.push_back({std::string(1, text[i]), {i, i + 1}});
      ++i;
    }
  }
  return out;
}

Tokenized tokenize(const std::string& text, const Vocabulary& vocab) {
  Tokenized t;
  for (auto& [tok, span] : split_tokens(text)) {
    t.ids.push_back(vocab.id(tok));
    t.offsets.push_back(span);
  }
  return t;
}

std::string detokenize(const std::vector<int>& ids, const Vocabulary& vocab,
                       const std::vector<int>& skip) {
  std::string out;
  for (int id : ids) {
    bool skipped = false;
    for (int s : skip) skipped = skipped || id == s;
    if (skipped) continue;
    if (!out.empty()) out.push_back(' ');
    out += vocab.token(id);
  }
  return out;
}

std::optional<std::pair<int, int>> align_answer_span(int answer_char_start,
                                                     const std::string& answer_text,
                                                     const std::vector<TokenSpan>& token_offsets) {
  if (answer_text.empty()) return std::nullopt;
  int first_char = answer_char_start;
  int last_char = answer_char_start + static_cast<int>(answer_text.size()) - 1;
  int ys = -1, ye = -1;
  for (int t = 0; t < static_cast<int>(token_offsets.size()); ++t) {
    const TokenSpan& s = token_offsets[t];
    if (ys < 0 && first_char >= s.begin && first_char < s.end) ys = t;
    if (last_char >= s.begin && last_char < s.end) ye = t;
  }
  if (ys < 0 || ye < 0 || ys > ye) return std::nullopt;
  return std::make_pair(ys, ye);
}

std::vector<int> make_token_type_ids(int length, std::pair<int, int> span) {
  auto [ys, ye] = span;
  if (ys < 0 || ye < ys || ye >= length)
    throw std::invalid_argument("token type span out of range");
  std::vector<int> out(length, 0);
  for (int i = ys; i <= ye; ++i) out[i] = 1;
  return out;
}

}  // namespace qagen::corpus
