#pragma once

#include <string>
#include <vector>

#include "core/graph.hpp"
#include "core/rng.hpp"

namespace qagen::model {

// JSD lower bound on the mutual information between question and answer
// summaries, with a bilinear sigmoid critic scored on in-batch negatives.
class InfoMax {
 public:
  InfoMax(std::string prefix, int d_question, int d_answer)
      : prefix_(std::move(prefix)), dq_(d_question), da_(d_answer) {}

  void init(ParameterStore& store, Rng& rng) const {
    store.add_glorot(prefix_ + ".w", dq_, da_, rng);
  }

  // x_bar: mean of decoder fused states over question steps.
  // y_bar: mean of answer hidden rows over the span.
  static Var summarize_question(Graph& g, const std::vector<Var>& fused_steps);
  static Var summarize_answer(Graph& g, Var answer_hidden, std::pair<int, int> span);

  // Raw bilinear score x_bar W y_bar^T (the Table-3 style scalar).
  Var score(Graph& g, Var x_bar, Var y_bar) const;
  // sigmoid(score), in (0,1).
  Var critic(Graph& g, Var x_bar, Var y_bar) const;

  // Partner index per example: fixed cyclic shift by one, a derangement for
  // any batch size >= 2. The seed is accepted for interface stability; the
  // pairing does not depend on it.
  static std::vector<int> make_negatives(int batch_size, uint64_t seed);

  // E_P[log g] + 0.5 E_N[log(1-g(x~,y))] + 0.5 E_N[log(1-g(x,y~))], <= 0.
  // Both negative directions reuse the same shift.
  Var jsd_mi_bound(Graph& g, const std::vector<Var>& x_bars,
                   const std::vector<Var>& y_bars) const;

  std::string weight_name() const { return prefix_ + ".w"; }

 private:
  std::string prefix_;
  int dq_, da_;
};

}  // namespace qagen::model
