#pragma once

#include <string>
#include <vector>

namespace qagen::eval {

// SQuAD-style answer normalization: lowercase, drop punctuation, drop the
// articles a/an/the, collapse whitespace.
std::string normalize_answer(const std::string& text);

// Bag-of-tokens F1 on normalized text, in [0,100]. Both empty -> 100.
double token_f1(const std::string& prediction, const std::string& gold);

// 100 when the normalized strings are identical, else 0.
double exact_match(const std::string& prediction, const std::string& gold);

std::vector<std::string> whitespace_split(const std::string& text);

struct EmF1 {
  double em = 0.0;
  double f1 = 0.0;
};

}  // namespace qagen::eval
