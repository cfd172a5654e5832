#include "model/infomax.hpp"

#include <stdexcept>

namespace qagen::model {

Var InfoMax::summarize_question(Graph& g, const std::vector<Var>& fused_steps) {
  if (fused_steps.empty()) throw std::invalid_argument("empty question summary");
  return g.mean_rows(g.concat_rows(fused_steps));
}

Var InfoMax::summarize_answer(Graph& g, Var answer_hidden, std::pair<int, int> span) {
  auto [ys, ye] = span;
  const Tensor& H = g.value(answer_hidden);
  if (ys < 0 || ye < ys || ye >= H.rows) throw std::invalid_argument("empty or invalid span");
  return g.mean_rows(g.slice_rows(answer_hidden, ys, ye - ys + 1));
}

Var InfoMax::score(Graph& g, Var x_bar, Var y_bar) const {
  return g.matmul_nt(g.matmul(x_bar, g.param(prefix_ + ".w")), y_bar);  // 1x1
}

Var InfoMax::critic(Graph& g, Var x_bar, Var y_bar) const {
  return g.sigmoid(score(g, x_bar, y_bar));
}

std::vector<int> InfoMax::make_negatives(int batch_size, uint64_t /*seed*/) {
  if (batch_size < 2) throw std::invalid_argument("negatives need a batch of at least 2");
  std::vector<int> partner(batch_size);
  for (int i = 0; i < batch_size; ++i) partner[i] = (i + 1) % batch_size;
  return partner;
}

Var InfoMax::jsd_mi_bound(Graph& g, const std::vector<Var>& x_bars,
                          const std::vector<Var>& y_bars) const {
  if (x_bars.size() != y_bars.size() || x_bars.size() < 2)
    throw std::invalid_argument("jsd_mi_bound needs matched pairs, batch >= 2");
  int b = static_cast<int>(x_bars.size());
  std::vector<int> partner = make_negatives(b, 0);

  std::vector<Var> pos, neg_x, neg_y;
  for (int i = 0; i < b; ++i) {
    pos.push_back(g.log_clamped(critic(g, x_bars[i], y_bars[i])));
    Var gx = critic(g, x_bars[partner[i]], y_bars[i]);  // (x~, y)
    Var gy = critic(g, x_bars[i], y_bars[partner[i]]);  // (x, y~)
    Var one = g.input(Tensor::filled(1, 1, 1.0));
    neg_x.push_back(g.log_clamped(g.sub(one, gx)));
    neg_y.push_back(g.log_clamped(g.sub(one, gy)));
  }
  Var pos_mean = g.mean_rows(g.concat_rows(pos));
  Var nx_mean = g.mean_rows(g.concat_rows(neg_x));
  Var ny_mean = g.mean_rows(g.concat_rows(neg_y));
  return g.add(pos_mean, g.scale(g.add(nx_mean, ny_mean), 0.5));
}

}  // namespace qagen::model
