#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "core/params.hpp"
#include "core/tensor.hpp"

namespace qagen {

struct Var {
  int idx = -1;
  bool valid() const { return idx >= 0; }
};

// Define-by-run reverse-mode tape. Every op computes its value eagerly and
// registers a backward closure; backward(loss) walks the tape in reverse.
// Frozen parameters enter as constants, so their gradient stays exactly zero.
class Graph {
 public:
  explicit Graph(ParameterStore* store = nullptr) : store_(store) {}

  Var input(Tensor t);
  Var param(const std::string& name);

  const Tensor& value(Var v) const { return nodes_[v.idx].value; }
  const Tensor& grad(Var v) const { return nodes_[v.idx].grad; }

  // ---- linear algebra ----
  Var matmul(Var a, Var b);     // [m,k]x[k,n]
  Var matmul_nt(Var a, Var b);  // a * b^T
  Var transpose(Var a);

  // ---- elementwise / broadcast ----
  Var add(Var a, Var b);
  Var add_rowvec(Var a, Var v);  // v broadcast over rows of a
  Var sub(Var a, Var b);
  Var cmul(Var a, Var b);
  Var emax(Var a, Var b);  // ties resolve to a
  Var scale(Var a, double s);
  Var add_const(Var a, double s);
  Var abs(Var a);
  Var square(Var a);
  Var sigmoid(Var a);
  Var tanh(Var a);
  Var exp(Var a);
  Var log_clamped(Var a, double eps = 1e-12);
  Var reciprocal(Var a);
  Var clamp(Var a, double lo, double hi);
  Var mul_scalar(Var a, Var s);  // s is 1x1, broadcast multiply

  // ---- shape ----
  Var concat_cols(const std::vector<Var>& vs);
  Var concat_rows(const std::vector<Var>& vs);
  Var slice_cols(Var a, int c0, int len);
  Var slice_rows(Var a, int r0, int len);
  Var row(Var a, int r) { return slice_rows(a, r, 1); }

  // ---- reductions ----
  Var sum_all(Var a);
  Var mean_rows(Var a);  // column-wise mean -> 1 x cols
  Var pick(Var a, int r, int c);

  // ---- softmax family ----
  // mask: 1 x cols of {0,1}; masked columns get probability 0.
  Var softmax_rows(Var a, const Tensor* mask = nullptr);
  Var log_softmax_rows(Var a);
  // -log softmax(logits)[target] over unmasked columns, numerically stable.
  Var masked_nll(Var logits_row, int target, const Tensor* mask = nullptr);

  // ---- embedding / copy ----
  Var rows_lookup(const std::string& table_param, const std::vector<int>& ids);
  // Max-aggregated copy scores: out[v] = max over context positions with
  // token id v of attn[pos]; zero for absent ids.
  Var copy_max_scores(Var attn_row, const std::vector<int>& ids, int vocab_size);

  void backward(Var loss);

  size_t node_count() const { return nodes_.size(); }

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    std::function<void()> back;
    bool needs_grad = false;
    bool reached = false;
    Parameter* sink = nullptr;
  };

  int push(Tensor value, bool needs_grad);
  std::map<std::string, int> param_nodes_;  // one node per parameter per graph
  bool wants(int i) const { return nodes_[i].needs_grad; }
  Tensor& gref(int i) {
    nodes_[i].reached = true;
    return nodes_[i].grad;
  }
  const Tensor& val(int i) const { return nodes_[i].value; }

  std::vector<Node> nodes_;
  ParameterStore* store_ = nullptr;
};

}  // namespace qagen
