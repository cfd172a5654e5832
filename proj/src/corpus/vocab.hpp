#pragma once

#include <string>
#include <unordered_map>
#include <vector>

namespace qagen::corpus {

// Word-level vocabulary with fixed reserved ids.
class Vocabulary {
 public:
  static constexpr int kPad = 0;
  static constexpr int kUnk = 1;
  static constexpr int kBos = 2;
  static constexpr int kEos = 3;

  Vocabulary();

  // tokens must not contain reserved surface forms; duplicates rejected.
  void add_token(const std::string& token);

  int id(const std::string& token) const {
    auto it = token_to_id_.find(token);
    return it == token_to_id_.end() ? kUnk : it->second;
  }
  const std::string& token(int id) const { return id_to_token_.at(id); }
  bool contains(const std::string& token) const { return token_to_id_.count(token) != 0; }
  int size() const { return static_cast<int>(id_to_token_.size()); }

  // Frequency-capped construction: keeps the `max_size - 4` most frequent
  // tokens, ties broken lexicographically for determinism.
  static Vocabulary build(const std::unordered_map<std::string, long>& counts, int max_size);

  std::vector<std::string> save_tokens() const { return id_to_token_; }
  static Vocabulary from_tokens(const std::vector<std::string>& tokens);

 private:
  std::unordered_map<std::string, int> token_to_id_;
  std::vector<std::string> id_to_token_;
};

}  // namespace qagen::corpus
