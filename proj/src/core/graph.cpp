#include "core/graph.hpp"

#include <cmath>
#include <stdexcept>

#include "core/kernels.hpp"

namespace qagen {

int Graph::push(Tensor value, bool needs_grad) {
  Node n;
  n.value = std::move(value);
  n.needs_grad = needs_grad;
  if (needs_grad) n.grad = Tensor::zeros(n.value.rows, n.value.cols);
  nodes_.push_back(std::move(n));
  return static_cast<int>(nodes_.size()) - 1;
}

Var Graph::input(Tensor t) { return {push(std::move(t), false)}; }

Var Graph::param(const std::string& name) {
  if (!store_) throw std::runtime_error("graph has no parameter store");
  auto cached = param_nodes_.find(name);
  if (cached != param_nodes_.end()) return {cached->second};
  Parameter& p = store_->get(name);
  int i = push(p.value, p.trainable);
  param_nodes_[name] = i;
  if (p.trainable) {
    nodes_[i].sink = &p;
    nodes_[i].back = [this, i] {
      Node& n = nodes_[i];
      kern::serial::axpy(1.0, n.grad, n.sink->grad);
    };
  }
  return {i};
}

Var Graph::matmul(Var a, Var b) {
  const Tensor &A = val(a.idx), &B = val(b.idx);
  if (A.cols != B.rows) throw std::runtime_error("matmul shape mismatch");
  Tensor C(A.rows, B.cols);
  kern::mm_nn(A, B, C, false);
  bool ng = wants(a.idx) || wants(b.idx);
  int i = push(std::move(C), ng);
  if (ng) {
    int ai = a.idx, bi = b.idx;
    nodes_[i].back = [this, i, ai, bi] {
      const Tensor& g = nodes_[i].grad;
      if (wants(ai)) kern::mm_nt(g, val(bi), gref(ai), true);
      if (wants(bi)) kern::mm_tn(val(ai), g, gref(bi), true);
    };
  }
  return {i};
}

Var Graph::matmul_nt(Var a, Var b) {
  const Tensor &A = val(a.idx), &B = val(b.idx);
  if (A.cols != B.cols) throw std::runtime_error("matmul_nt shape mismatch");
  Tensor C(A.rows, B.rows);
  kern::mm_nt(A, B, C, false);
  bool ng = wants(a.idx) || wants(b.idx);
  int i = push(std::move(C), ng);
  if (ng) {
    int ai = a.idx, bi = b.idx;
    nodes_[i].back = [this, i, ai, bi] {
      const Tensor& g = nodes_[i].grad;
      if (wants(ai)) kern::mm_nn(g, val(bi), gref(ai), true);
      if (wants(bi)) kern::mm_tn(g, val(ai), gref(bi), true);
    };
  }
  return {i};
}

Var Graph::transpose(Var a) {
  const Tensor& A = val(a.idx);
  Tensor C(A.cols, A.rows);
  for (int r = 0; r < A.rows; ++r)
    for (int c = 0; c < A.cols; ++c) C(c, r) = A(r, c);
  bool ng = wants(a.idx);
  int i = push(std::move(C), ng);
  if (ng) {
    int ai = a.idx;
    nodes_[i].back = [this, i, ai] {
      const Tensor& g = nodes_[i].grad;
      Tensor& ga = gref(ai);
      for (int r = 0; r < g.rows; ++r)
        for (int c = 0; c < g.cols; ++c) ga(c, r) += g(r, c);
    };
  }
  return {i};
}

Var Graph::add(Var a, Var b) {
  const Tensor &A = val(a.idx), &B = val(b.idx);
  if (!A.same_shape(B)) throw std::runtime_error("add shape mismatch");
  Tensor C = A;
  kern::serial::axpy(1.0, B, C);
  bool ng = wants(a.idx) || wants(b.idx);
  int i = push(std::move(C), ng);
  if (ng) {
    int ai = a.idx, bi = b.idx;
    nodes_[i].back = [this, i, ai, bi] {
      const Tensor& g = nodes_[i].grad;
      if (wants(ai)) kern::serial::axpy(1.0, g, gref(ai));
      if (wants(bi)) kern::serial::axpy(1.0, g, gref(bi));
    };
  }
  return {i};
}

Var Graph::add_rowvec(Var a, Var v) {
  const Tensor &A = val(a.idx), &V = val(v.idx);
  if (V.rows != 1 || V.cols != A.cols) throw std::runtime_error("add_rowvec shape mismatch");
  Tensor C = A;
  for (int r = 0; r < C.rows; ++r)
    for (int c = 0; c < C.cols; ++c) C(r, c) += V(0, c);
  bool ng = wants(a.idx) || wants(v.idx);
  int i = push(std::move(C), ng);
  if (ng) {
    int ai = a.idx, vi = v.idx;
    nodes_[i].back = [this, i, ai, vi] {
      const Tensor& g = nodes_[i].grad;
      if (wants(ai)) kern::serial::axpy(1.0, g, gref(ai));
      if (wants(vi)) {
        Tensor& gv = gref(vi);
        for (int r = 0; r < g.rows; ++r)
          for (int c = 0; c < g.cols; ++c) gv(0, c) += g(r, c);
      }
    };
  }
  return {i};
}

Var Graph::sub(Var a, Var b) {
  const Tensor &A = val(a.idx), &B = val(b.idx);
  if (!A.same_shape(B)) throw std::runtime_error("sub shape mismatch");
  Tensor C = A;
  kern::serial::axpy(-1.0, B, C);
  bool ng = wants(a.idx) || wants(b.idx);
  int i = push(std::move(C), ng);
  if (ng) {
    int ai = a.idx, bi = b.idx;
    nodes_[i].back = [this, i, ai, bi] {
      const Tensor& g = nodes_[i].grad;
      if (wants(ai)) kern::serial::axpy(1.0, g, gref(ai));
      if (wants(bi)) kern::serial::axpy(-1.0, g, gref(bi));
    };
  }
  return {i};
}

Var Graph::cmul(Var a, Var b) {
  const Tensor &A = val(a.idx), &B = val(b.idx);
  if (!A.same_shape(B)) throw std::runtime_error("cmul shape mismatch");
  Tensor C = A;
  for (size_t k = 0; k < C.data.size(); ++k) C.data[k] *= B.data[k];
  bool ng = wants(a.idx) || wants(b.idx);
  int i = push(std::move(C), ng);
  if (ng) {
    int ai = a.idx, bi = b.idx;
    nodes_[i].back = [this, i, ai, bi] {
      const Tensor& g = nodes_[i].grad;
      if (wants(ai)) {
        Tensor& ga = gref(ai);
        const Tensor& B2 = val(bi);
        for (size_t k = 0; k < g.data.size(); ++k) ga.data[k] += g.data[k] * B2.data[k];
      }
      if (wants(bi)) {
        Tensor& gb = gref(bi);
        const Tensor& A2 = val(ai);
        for (size_t k = 0; k < g.data.size(); ++k) gb.data[k] += g.data[k] * A2.data[k];
      }
    };
  }
  return {i};
}

Var Graph::emax(Var a, Var b) {
  const Tensor &A = val(a.idx), &B = val(b.idx);
  if (!A.same_shape(B)) throw std::runtime_error("emax shape mismatch");
  Tensor C = A;
  for (size_t k = 0; k < C.data.size(); ++k)
    if (B.data[k] > C.data[k]) C.data[k] = B.data[k];
  bool ng = wants(a.idx) || wants(b.idx);
  int i = push(std::move(C), ng);
  if (ng) {
    int ai = a.idx, bi = b.idx;
    nodes_[i].back = [this, i, ai, bi] {
      const Tensor& g = nodes_[i].grad;
      const Tensor &A2 = val(ai), &B2 = val(bi);
      for (size_t k = 0; k < g.data.size(); ++k) {
        if (A2.data[k] >= B2.data[k]) {
          if (wants(ai)) gref(ai).data[k] += g.data[k];
        } else if (wants(bi)) {
          gref(bi).data[k] += g.data[k];
        }
      }
    };
  }
  return {i};
}

Var Graph::scale(Var a, double s) {
  Tensor C = val(a.idx);
  for (auto& v : C.data) v *= s;
  bool ng = wants(a.idx);
  int i = push(std::move(C), ng);
  if (ng) {
    int ai = a.idx;
    nodes_[i].back = [this, i, ai, s] { kern::serial::axpy(s, nodes_[i].grad, gref(ai)); };
  }
  return {i};
}

Var Graph::add_const(Var a, double s) {
  Tensor C = val(a.idx);
  for (auto& v : C.data) v += s;
  bool ng = wants(a.idx);
  int i = push(std::move(C), ng);
  if (ng) {
    int ai = a.idx;
    nodes_[i].back = [this, i, ai] { kern::serial::axpy(1.0, nodes_[i].grad, gref(ai)); };
  }
  return {i};
}

Var Graph::abs(Var a) {
  Tensor C = val(a.idx);
  for (auto& v : C.data) v = std::abs(v);
  bool ng = wants(a.idx);
  int i = push(std::move(C), ng);
  if (ng) {
    int ai = a.idx;
    nodes_[i].back = [this, i, ai] {
      const Tensor& g = nodes_[i].grad;
      const Tensor& A = val(ai);
      Tensor& ga = gref(ai);
      for (size_t k = 0; k < g.data.size(); ++k) {
        double s = A.data[k] > 0 ? 1.0 : (A.data[k] < 0 ? -1.0 : 0.0);
        ga.data[k] += s * g.data[k];
      }
    };
  }
  return {i};
}

Var Graph::square(Var a) {
  Tensor C = val(a.idx);
  for (auto& v : C.data) v = v * v;
  bool ng = wants(a.idx);
  int i = push(std::move(C), ng);
  if (ng) {
    int ai = a.idx;
    nodes_[i].back = [this, i, ai] {
      const Tensor& g = nodes_[i].grad;
      const Tensor& A = val(ai);
      Tensor& ga = gref(ai);
      for (size_t k = 0; k < g.data.size(); ++k) ga.data[k] += 2.0 * A.data[k] * g.data[k];
    };
  }
  return {i};
}

Var Graph::sigmoid(Var a) {
  Tensor C = val(a.idx);
  for (auto& v : C.data) v = 1.0 / (1.0 + std::exp(-v));
  bool ng = wants(a.idx);
  int i = push(std::move(C), ng);
  if (ng) {
    int ai = a.idx;
    nodes_[i].back = [this, i, ai] {
      const Tensor& g = nodes_[i].grad;
      const Tensor& Y = nodes_[i].value;
      Tensor& ga = gref(ai);
      for (size_t k = 0; k < g.data.size(); ++k)
        ga.data[k] += g.data[k] * Y.data[k] * (1.0 - Y.data[k]);
    };
  }
  return {i};
}

Var Graph::tanh(Var a) {
  Tensor C = val(a.idx);
  for (auto& v : C.data) v = std::tanh(v);
  bool ng = wants(a.idx);
  int i = push(std::move(C), ng);
  if (ng) {
    int ai = a.idx;
    nodes_[i].back = [this, i, ai] {
      const Tensor& g = nodes_[i].grad;
      const Tensor& Y = nodes_[i].value;
      Tensor& ga = gref(ai);
      for (size_t k = 0; k < g.data.size(); ++k)
        ga.data[k] += g.data[k] * (1.0 - Y.data[k] * Y.data[k]);
    };
  }
  return {i};
}

Var Graph::exp(Var a) {
  Tensor C = val(a.idx);
  for (auto& v : C.data) v = std::exp(v);
  bool ng = wants(a.idx);
  int i = push(std::move(C), ng);
  if (ng) {
    int ai = a.idx;
    nodes_[i].back = [this, i, ai] {
      const Tensor& g = nodes_[i].grad;
      const Tensor& Y = nodes_[i].value;
      Tensor& ga = gref(ai);
      for (size_t k = 0; k < g.data.size(); ++k) ga.data[k] += g.data[k] * Y.data[k];
    };
  }
  return {i};
}

Var Graph::log_clamped(Var a, double eps) {
  Tensor C = val(a.idx);
  for (auto& v : C.data) v = std::log(std::max(v, eps));
  bool ng = wants(a.idx);
  int i = push(std::move(C), ng);
  if (ng) {
    int ai = a.idx;
    nodes_[i].back = [this, i, ai, eps] {
      const Tensor& g = nodes_[i].grad;
      const Tensor& A = val(ai);
      Tensor& ga = gref(ai);
      for (size_t k = 0; k < g.data.size(); ++k)
        ga.data[k] += g.data[k] / std::max(A.data[k], eps);
    };
  }
  return {i};
}

Var Graph::reciprocal(Var a) {
  Tensor C = val(a.idx);
  for (auto& v : C.data) v = 1.0 / v;
  bool ng = wants(a.idx);
  int i = push(std::move(C), ng);
  if (ng) {
    int ai = a.idx;
    nodes_[i].back = [this, i, ai] {
      const Tensor& g = nodes_[i].grad;
      const Tensor& Y = nodes_[i].value;
      Tensor& ga = gref(ai);
      for (size_t k = 0; k < g.data.size(); ++k)
        ga.data[k] -= g.data[k] * Y.data[k] * Y.data[k];
    };
  }
  return {i};
}

Var Graph::clamp(Var a, double lo, double hi) {
  Tensor C = val(a.idx);
  for (auto& v : C.data) v = std::min(std::max(v, lo), hi);
  bool ng = wants(a.idx);
  int i = push(std::move(C), ng);
  if (ng) {
    int ai = a.idx;
    nodes_[i].back = [this, i, ai, lo, hi] {
      const Tensor& g = nodes_[i].grad;
      const Tensor& A = val(ai);
      Tensor& ga = gref(ai);
      for (size_t k = 0; k < g.data.size(); ++k)
        if (A.data[k] >= lo && A.data[k] <= hi) ga.data[k] += g.data[k];
    };
  }
  return {i};
}

Var Graph::mul_scalar(Var a, Var s) {
  const Tensor& S = val(s.idx);
  if (S.rows != 1 || S.cols != 1) throw std::runtime_error("mul_scalar: s must be 1x1");
  double sv = S(0, 0);
  Tensor C = val(a.idx);
  for (auto& v : C.data) v *= sv;
  bool ng = wants(a.idx) || wants(s.idx);
  int i = push(std::move(C), ng);
  if (ng) {
    int ai = a.idx, si = s.idx;
    nodes_[i].back = [this, i, ai, si] {
      const Tensor& g = nodes_[i].grad;
      double sv2 = val(si)(0, 0);
      if (wants(ai)) kern::serial::axpy(sv2, g, gref(ai));
      if (wants(si)) {
        const Tensor& A = val(ai);
        double acc = 0.0;
        for (size_t k = 0; k < g.data.size(); ++k) acc += g.data[k] * A.data[k];
        gref(si)(0, 0) += acc;
      }
    };
  }
  return {i};
}

Var Graph::concat_cols(const std::vector<Var>& vs) {
  int rows = val(vs[0].idx).rows, cols = 0;
  bool ng = false;
  for (Var v : vs) {
    if (val(v.idx).rows != rows) throw std::runtime_error("concat_cols row mismatch");
    cols += val(v.idx).cols;
    ng = ng || wants(v.idx);
  }
  Tensor C(rows, cols);
  int off = 0;
  for (Var v : vs) {
    const Tensor& A = val(v.idx);
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < A.cols; ++c) C(r, off + c) = A(r, c);
    off += A.cols;
  }
  int i = push(std::move(C), ng);
  if (ng) {
    std::vector<int> idxs;
    for (Var v : vs) idxs.push_back(v.idx);
    nodes_[i].back = [this, i, idxs] {
      const Tensor& g = nodes_[i].grad;
      int off2 = 0;
      for (int ai : idxs) {
        const Tensor& A = val(ai);
        if (wants(ai)) {
          Tensor& ga = gref(ai);
          for (int r = 0; r < g.rows; ++r)
            for (int c = 0; c < A.cols; ++c) ga(r, c) += g(r, off2 + c);
        }
        off2 += A.cols;
      }
    };
  }
  return {i};
}

Var Graph::concat_rows(const std::vector<Var>& vs) {
  int cols = val(vs[0].idx).cols, rows = 0;
  bool ng = false;
  for (Var v : vs) {
    if (val(v.idx).cols != cols) throw std::runtime_error("concat_rows col mismatch");
    rows += val(v.idx).rows;
    ng = ng || wants(v.idx);
  }
  Tensor C(rows, cols);
  int off = 0;
  for (Var v : vs) {
    const Tensor& A = val(v.idx);
    std::copy(A.data.begin(), A.data.end(), C.data.begin() + static_cast<size_t>(off) * cols);
    off += A.rows;
  }
  int i = push(std::move(C), ng);
  if (ng) {
    std::vector<int> idxs;
    for (Var v : vs) idxs.push_back(v.idx);
    nodes_[i].back = [this, i, idxs] {
      const Tensor& g = nodes_[i].grad;
      int off2 = 0;
      for (int ai : idxs) {
        const Tensor& A = val(ai);
        if (wants(ai)) {
          Tensor& ga = gref(ai);
          for (int r = 0; r < A.rows; ++r)
            for (int c = 0; c < g.cols; ++c) ga(r, c) += g(off2 + r, c);
        }
        off2 += A.rows;
      }
    };
  }
  return {i};
}

Var Graph::slice_cols(Var a, int c0, int len) {
  const Tensor& A = val(a.idx);
  if (c0 < 0 || c0 + len > A.cols) throw std::runtime_error("slice_cols out of range");
  Tensor C(A.rows, len);
  for (int r = 0; r < A.rows; ++r)
    for (int c = 0; c < len; ++c) C(r, c) = A(r, c0 + c);
  bool ng = wants(a.idx);
  int i = push(std::move(C), ng);
  if (ng) {
    int ai = a.idx;
    nodes_[i].back = [this, i, ai, c0, len] {
      const Tensor& g = nodes_[i].grad;
      Tensor& ga = gref(ai);
      for (int r = 0; r < g.rows; ++r)
        for (int c = 0; c < len; ++c) ga(r, c0 + c) += g(r, c);
    };
  }
  return {i};
}

Var Graph::slice_rows(Var a, int r0, int len) {
  const Tensor& A = val(a.idx);
  if (r0 < 0 || r0 + len > A.rows) throw std::runtime_error("slice_rows out of range");
  Tensor C(len, A.cols);
  std::copy(A.data.begin() + static_cast<size_t>(r0) * A.cols,
            A.data.begin() + static_cast<size_t>(r0 + len) * A.cols, C.data.begin());
  bool ng = wants(a.idx);
  int i = push(std::move(C), ng);
  if (ng) {
    int ai = a.idx;
    nodes_[i].back = [this, i, ai, r0, len] {
      const Tensor& g = nodes_[i].grad;
      Tensor& ga = gref(ai);
      for (int r = 0; r < len; ++r)
        for (int c = 0; c < g.cols; ++c) ga(r0 + r, c) += g(r, c);
    };
  }
  return {i};
}

Var Graph::sum_all(Var a) {
  const Tensor& A = val(a.idx);
  double s = 0.0;
  for (double v : A.data) s += v;
  Tensor C(1, 1);
  C(0, 0) = s;
  bool ng = wants(a.idx);
  int i = push(std::move(C), ng);
  if (ng) {
    int ai = a.idx;
    nodes_[i].back = [this, i, ai] {
      double g = nodes_[i].grad(0, 0);
      Tensor& ga = gref(ai);
      for (auto& v : ga.data) v += g;
    };
  }
  return {i};
}

Var Graph::mean_rows(Var a) {
  const Tensor& A = val(a.idx);
  Tensor C(1, A.cols);
  for (int r = 0; r < A.rows; ++r)
    for (int c = 0; c < A.cols; ++c) C(0, c) += A(r, c);
  for (int c = 0; c < A.cols; ++c) C(0, c) /= A.rows;
  bool ng = wants(a.idx);
  int i = push(std::move(C), ng);
  if (ng) {
    int ai = a.idx;
    nodes_[i].back = [this, i, ai] {
      const Tensor& g = nodes_[i].grad;
      Tensor& ga = gref(ai);
      double inv = 1.0 / ga.rows;
      for (int r = 0; r < ga.rows; ++r)
        for (int c = 0; c < ga.cols; ++c) ga(r, c) += inv * g(0, c);
    };
  }
  return {i};
}

Var Graph::pick(Var a, int r, int c) {
  const Tensor& A = val(a.idx);
  Tensor C(1, 1);
  C(0, 0) = A(r, c);
  bool ng = wants(a.idx);
  int i = push(std::move(C), ng);
  if (ng) {
    int ai = a.idx;
    nodes_[i].back = [this, i, ai, r, c] { gref(ai)(r, c) += nodes_[i].grad(0, 0); };
  }
  return {i};
}

Var Graph::softmax_rows(Var a, const Tensor* mask) {
  const Tensor& A = val(a.idx);
  Tensor C(A.rows, A.cols);
  if (!mask) {
    kern::softmax_rows(A, C);
  } else {
    if (mask->rows != 1 || mask->cols != A.cols)
      throw std::runtime_error("softmax mask shape mismatch");
    for (int r = 0; r < A.rows; ++r) {
      double m = -1e300;
      for (int c = 0; c < A.cols; ++c)
        if ((*mask)(0, c) != 0.0) m = std::max(m, A(r, c));
      double z = 0.0;
      for (int c = 0; c < A.cols; ++c) {
        if ((*mask)(0, c) != 0.0) {
          C(r, c) = std::exp(A(r, c) - m);
          z += C(r, c);
        } else {
          C(r, c) = 0.0;
        }
      }
      for (int c = 0; c < A.cols; ++c) C(r, c) /= z;
    }
  }
  bool ng = wants(a.idx);
  int i = push(std::move(C), ng);
  if (ng) {
    int ai = a.idx;
    nodes_[i].back = [this, i, ai] {
      const Tensor& g = nodes_[i].grad;
      const Tensor& P = nodes_[i].value;
      Tensor& ga = gref(ai);
      for (int r = 0; r < g.rows; ++r) {
        double dot = 0.0;
        for (int c = 0; c < g.cols; ++c) dot += g(r, c) * P(r, c);
        for (int c = 0; c < g.cols; ++c) ga(r, c) += P(r, c) * (g(r, c) - dot);
      }
    };
  }
  return {i};
}

Var Graph::log_softmax_rows(Var a) {
  const Tensor& A = val(a.idx);
  Tensor C(A.rows, A.cols);
  for (int r = 0; r < A.rows; ++r) {
    double m = A(r, 0);
    for (int c = 1; c < A.cols; ++c) m = std::max(m, A(r, c));
    double z = 0.0;
    for (int c = 0; c < A.cols; ++c) z += std::exp(A(r, c) - m);
    double lse = m + std::log(z);
    for (int c = 0; c < A.cols; ++c) C(r, c) = A(r, c) - lse;
  }
  bool ng = wants(a.idx);
  int i = push(std::move(C), ng);
  if (ng) {
    int ai = a.idx;
    nodes_[i].back = [this, i, ai] {
      const Tensor& g = nodes_[i].grad;
      const Tensor& L = nodes_[i].value;
      Tensor& ga = gref(ai);
      for (int r = 0; r < g.rows; ++r) {
        double gs = 0.0;
        for (int c = 0; c < g.cols; ++c) gs += g(r, c);
        for (int c = 0; c < g.cols; ++c) ga(r, c) += g(r, c) - std::exp(L(r, c)) * gs;
      }
    };
  }
  return {i};
}

Var Graph::masked_nll(Var logits_row, int target, const Tensor* mask) {
  const Tensor& A = val(logits_row.idx);
  if (A.rows != 1) throw std::runtime_error("masked_nll expects a row vector");
  if (target < 0 || target >= A.cols) throw std::runtime_error("masked_nll target out of range");
  if (mask && (*mask)(0, target) == 0.0)
    throw std::runtime_error("masked_nll target is masked");
  double m = -1e300;
  for (int c = 0; c < A.cols; ++c)
    if (!mask || (*mask)(0, c) != 0.0) m = std::max(m, A(0, c));
  double z = 0.0;
  for (int c = 0; c < A.cols; ++c)
    if (!mask || (*mask)(0, c) != 0.0) z += std::exp(A(0, c) - m);
  double lse = m + std::log(z);
  Tensor C(1, 1);
  C(0, 0) = lse - A(0, target);
  bool ng = wants(logits_row.idx);
  int i = push(std::move(C), ng);
  if (ng) {
    int ai = logits_row.idx;
    Tensor maskcopy = mask ? *mask : Tensor();
    bool has_mask = mask != nullptr;
    nodes_[i].back = [this, i, ai, target, maskcopy, has_mask, lse] {
      double g = nodes_[i].grad(0, 0);
      const Tensor& A2 = val(ai);
      Tensor& ga = gref(ai);
      for (int c = 0; c < A2.cols; ++c) {
        if (has_mask && maskcopy(0, c) == 0.0) continue;
        double p = std::exp(A2(0, c) - lse);
        ga(0, c) += g * (p - (c == target ? 1.0 : 0.0));
      }
    };
  }
  return {i};
}

Var Graph::rows_lookup(const std::string& table_param, const std::vector<int>& ids) {
  if (!store_) throw std::runtime_error("graph has no parameter store");
  Parameter& p = store_->get(table_param);
  const Tensor& T = p.value;
  Tensor C(static_cast<int>(ids.size()), T.cols);
  for (size_t r = 0; r < ids.size(); ++r) {
    if (ids[r] < 0 || ids[r] >= T.rows) throw std::runtime_error("rows_lookup id out of range");
    std::copy(T.data.begin() + static_cast<size_t>(ids[r]) * T.cols,
              T.data.begin() + static_cast<size_t>(ids[r] + 1) * T.cols,
              C.data.begin() + r * T.cols);
  }
  int i = push(std::move(C), p.trainable);
  if (p.trainable) {
    Parameter* sink = &p;
    std::vector<int> ids_copy = ids;
    nodes_[i].sink = sink;
    nodes_[i].back = [this, i, sink, ids_copy] {
      const Tensor& g = nodes_[i].grad;
      for (size_t r = 0; r < ids_copy.size(); ++r)
        for (int c = 0; c < g.cols; ++c) sink->grad(ids_copy[r], c) += g(static_cast<int>(r), c);
    };
  }
  return {i};
}

Var Graph::copy_max_scores(Var attn_row, const std::vector<int>& ids, int vocab_size) {
  const Tensor& A = val(attn_row.idx);
  if (A.rows != 1 || A.cols != static_cast<int>(ids.size()))
    throw std::runtime_error("copy_max_scores shape mismatch");
  Tensor C(1, vocab_size);
  std::vector<int> best(vocab_size, -1);
  for (size_t m = 0; m < ids.size(); ++m) {
    int v = ids[m];
    if (A(0, static_cast<int>(m)) > C(0, v)) {
      C(0, v) = A(0, static_cast<int>(m));
      best[v] = static_cast<int>(m);
    }
  }
  bool ng = wants(attn_row.idx);
  int i = push(std::move(C), ng);
  if (ng) {
    int ai = attn_row.idx;
    nodes_[i].back = [this, i, ai, best] {
      const Tensor& g = nodes_[i].grad;
      Tensor& ga = gref(ai);
      for (int v = 0; v < g.cols; ++v)
        if (best[v] >= 0) ga(0, best[v]) += g(0, v);
    };
  }
  return {i};
}

void Graph::backward(Var loss) {
  const Tensor& L = val(loss.idx);
  if (L.rows != 1 || L.cols != 1) throw std::runtime_error("backward expects a scalar loss");
  if (nodes_[loss.idx].grad.data.empty()) nodes_[loss.idx].grad = Tensor::zeros(1, 1);
  nodes_[loss.idx].reached = true;
  nodes_[loss.idx].grad(0, 0) = 1.0;
  for (int i = loss.idx; i >= 0; --i) {
    Node& n = nodes_[i];
    if (n.reached && n.back) n.back();
  }
}

}  // namespace qagen
