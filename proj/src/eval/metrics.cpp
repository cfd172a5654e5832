#include "eval/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>

namespace qagen::eval {

std::vector<std::string> whitespace_split(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream is(text);
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

std::string normalize_answer(const std::string& text) {
  std::string lowered;
  lowered.reserve(text.size());
  for (unsigned char ch : text) {
    if (std::ispunct(ch)) continue;
    lowered.push_back(static_cast<char>(std::tolower(ch)));
  }
  std::vector<std::string> words = whitespace_split(lowered);
  std::string out;
  for (const auto& w : words) {
    if (w == "a" || w == "an" || w == "the") continue;
    if (!out.empty()) out.push_back(' ');
    out += w;
  }
  return out;
}

double token_f1(const std::string& prediction, const std::string& gold) {
  auto p = whitespace_split(normalize_answer(prediction));
  auto g = whitespace_split(normalize_answer(gold));
  if (p.empty() && g.empty()) return 100.0;
  if (p.empty() || g.empty()) return 0.0;
  std::map<std::string, int> counts;
  for (const auto& t : g) counts[t]++;
  int common = 0;
  for (const auto& t : p) {
    auto it = counts.find(t);
    if (it != counts.end() && it->second > 0) {
      ++common;
      --it->second;
    }
  }
  if (common == 0) return 0.0;
  double precision = static_cast<double>(common) / p.size();
  double recall = static_cast<double>(common) / g.size();
  return 100.0 * 2.0 * precision * recall / (precision + recall);
}

double exact_match(const std::string& prediction, const std::string& gold) {
  return normalize_answer(prediction) == normalize_answer(gold) ? 100.0 : 0.0;
}

}  // namespace qagen::eval
