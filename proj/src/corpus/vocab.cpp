#include "corpus/vocab.hpp"

#include <algorithm>
#include <stdexcept>

namespace qagen::corpus {

Vocabulary::Vocabulary() {
  id_to_token_ = {"<pad>", "<unk>", "<bos>", "<eos>"};
  for (int i = 0; i < static_cast<int>(id_to_token_.size()); ++i)
    token_to_id_[id_to_token_[i]] = i;
}

void Vocabulary::add_token(const std::string& token) {
  if (token_to_id_.count(token)) throw std::runtime_error("duplicate vocab token: " + token);
  int id = size();
  token_to_id_[token] = id;
  id_to_token_.push_back(token);
}

Vocabulary Vocabulary::build(const std::unordered_map<std::string, long>& counts, int max_size) {
  std::vector<std::pair<std::string, long>> items(counts.begin(), counts.end());
  std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  Vocabulary v;
  for (const auto& [tok, cnt] : items) {
    if (v.size() >= max_size) break;
    if (!v.contains(tok)) v.add_token(tok);
  }
  return v;
}

Vocabulary Vocabulary::from_tokens(const std::vector<std::string>& tokens) {
  Vocabulary v;
  for (size_t i = 4; i < tokens.size(); ++i) v.add_token(tokens[i]);
  return v;
}

}  // namespace qagen::corpus
