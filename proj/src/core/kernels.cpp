#include "core/kernels.hpp"

#include <atomic>
#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace qagen::kern {

namespace {

std::atomic<bool> g_parallel{true};

inline void mm_nn_row(const Tensor& a, const Tensor& b, Tensor& c, bool acc, int i) {
  const double* arow = a.data.data() + static_cast<size_t>(i) * a.cols;
  double* crow = c.data.data() + static_cast<size_t>(i) * c.cols;
  if (!acc) {
    for (int j = 0; j < c.cols; ++j) crow[j] = 0.0;
  }
  for (int k = 0; k < a.cols; ++k) {
    double av = arow[k];
    if (av == 0.0) continue;
    const double* brow = b.data.data() + static_cast<size_t>(k) * b.cols;
    for (int j = 0; j < c.cols; ++j) crow[j] += av * brow[j];
  }
}

inline void mm_nt_row(const Tensor& a, const Tensor& b, Tensor& c, bool acc, int i) {
  const double* arow = a.data.data() + static_cast<size_t>(i) * a.cols;
  double* crow = c.data.data() + static_cast<size_t>(i) * c.cols;
  for (int j = 0; j < c.cols; ++j) {
    const double* brow = b.data.data() + static_cast<size_t>(j) * b.cols;
    double s = 0.0;
    for (int k = 0; k < a.cols; ++k) s += arow[k] * brow[k];
    crow[j] = acc ? crow[j] + s : s;
  }
}

// A^T*B parallelized over output rows (columns of A).
inline void mm_tn_row(const Tensor& a, const Tensor& b, Tensor& c, bool acc, int i) {
  double* crow = c.data.data() + static_cast<size_t>(i) * c.cols;
  if (!acc) {
    for (int j = 0; j < c.cols; ++j) crow[j] = 0.0;
  }
  for (int k = 0; k < a.rows; ++k) {
    double av = a(k, i);
    if (av == 0.0) continue;
    const double* brow = b.data.data() + static_cast<size_t>(k) * b.cols;
    for (int j = 0; j < c.cols; ++j) crow[j] += av * brow[j];
  }
}

inline void softmax_row(const Tensor& in, Tensor& out, int i) {
  const double* x = in.data.data() + static_cast<size_t>(i) * in.cols;
  double* y = out.data.data() + static_cast<size_t>(i) * out.cols;
  double m = x[0];
  for (int j = 1; j < in.cols; ++j) m = std::max(m, x[j]);
  double z = 0.0;
  for (int j = 0; j < in.cols; ++j) {
    y[j] = std::exp(x[j] - m);
    z += y[j];
  }
  double inv = 1.0 / z;
  for (int j = 0; j < in.cols; ++j) y[j] *= inv;
}

}  // namespace

namespace serial {

void mm_nn(const Tensor& a, const Tensor& b, Tensor& c, bool acc) {
  assert(a.cols == b.rows && c.rows == a.rows && c.cols == b.cols);
  for (int i = 0; i < c.rows; ++i) mm_nn_row(a, b, c, acc, i);
}

void mm_nt(const Tensor& a, const Tensor& b, Tensor& c, bool acc) {
  assert(a.cols == b.cols && c.rows == a.rows && c.cols == b.rows);
  for (int i = 0; i < c.rows; ++i) mm_nt_row(a, b, c, acc, i);
}

void mm_tn(const Tensor& a, const Tensor& b, Tensor& c, bool acc) {
  assert(a.rows == b.rows && c.rows == a.cols && c.cols == b.cols);
  for (int i = 0; i < c.rows; ++i) mm_tn_row(a, b, c, acc, i);
}

void softmax_rows(const Tensor& in, Tensor& out) {
  assert(in.same_shape(out));
  for (int i = 0; i < in.rows; ++i) softmax_row(in, out, i);
}

void axpy(double alpha, const Tensor& x, Tensor& y) {
  assert(x.same_shape(y));
  for (size_t i = 0; i < x.data.size(); ++i) y.data[i] += alpha * x.data[i];
}

}  // namespace serial

namespace par {

void mm_nn(const Tensor& a, const Tensor& b, Tensor& c, bool acc) {
  assert(a.cols == b.rows && c.rows == a.rows && c.cols == b.cols);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < c.rows; ++i) mm_nn_row(a, b, c, acc, i);
}

void mm_nt(const Tensor& a, const Tensor& b, Tensor& c, bool acc) {
  assert(a.cols == b.cols && c.rows == a.rows && c.cols == b.rows);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < c.rows; ++i) mm_nt_row(a, b, c, acc, i);
}

void mm_tn(const Tensor& a, const Tensor& b, Tensor& c, bool acc) {
  assert(a.rows == b.rows && c.rows == a.cols && c.cols == b.cols);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < c.rows; ++i) mm_tn_row(a, b, c, acc, i);
}

void softmax_rows(const Tensor& in, Tensor& out) {
  assert(in.same_shape(out));
#pragma omp parallel for schedule(static)
  for (int i = 0; i < in.rows; ++i) softmax_row(in, out, i);
}

void axpy(double alpha, const Tensor& x, Tensor& y) {
  assert(x.same_shape(y));
  const long n = static_cast<long>(x.data.size());
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i) y.data[i] += alpha * x.data[i];
}

}  // namespace par

void set_parallel(bool on) { g_parallel.store(on); }
bool parallel_enabled() { return g_parallel.load(); }

namespace {
inline bool go_par(long work) { return g_parallel.load() && work >= kMinParallelWork; }
}  // namespace

void mm_nn(const Tensor& a, const Tensor& b, Tensor& c, bool acc) {
  long work = static_cast<long>(a.rows) * a.cols * b.cols;
  go_par(work) ? par::mm_nn(a, b, c, acc) : serial::mm_nn(a, b, c, acc);
}

void mm_nt(const Tensor& a, const Tensor& b, Tensor& c, bool acc) {
  long work = static_cast<long>(a.rows) * a.cols * b.rows;
  go_par(work) ? par::mm_nt(a, b, c, acc) : serial::mm_nt(a, b, c, acc);
}

void mm_tn(const Tensor& a, const Tensor& b, Tensor& c, bool acc) {
  long work = static_cast<long>(a.cols) * a.rows * b.cols;
  go_par(work) ? par::mm_tn(a, b, c, acc) : serial::mm_tn(a, b, c, acc);
}

void softmax_rows(const Tensor& in, Tensor& out) {
  long work = static_cast<long>(in.rows) * in.cols * 4;
  go_par(work) ? par::softmax_rows(in, out) : serial::softmax_rows(in, out);
}

void axpy(double alpha, const Tensor& x, Tensor& y) {
  go_par(static_cast<long>(x.data.size())) ? par::axpy(alpha, x, y) : serial::axpy(alpha, x, y);
}

}  // namespace qagen::kern
