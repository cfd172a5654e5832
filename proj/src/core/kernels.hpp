#pragma once

#include "core/tensor.hpp"

// Dense kernels in two implementations: `serial` is the reference, `par` is
// OpenMP-parallel over disjoint output rows. Both produce bit-identical
// results because every output element accumulates in the same order.
// The unqualified functions dispatch on the global switch and a work
// threshold (tiny matrices are not worth the fork/join).

namespace qagen::kern {

// C (+)= A * B          [m,k]x[k,n]
// C (+)= A * B^T        [m,k]x[n,k]
// C (+)= A^T * B        [k,m]x[k,n]
namespace serial {
void mm_nn(const Tensor& a, const Tensor& b, Tensor& c, bool acc);
void mm_nt(const Tensor& a, const Tensor& b, Tensor& c, bool acc);
void mm_tn(const Tensor& a, const Tensor& b, Tensor& c, bool acc);
void softmax_rows(const Tensor& in, Tensor& out);
void axpy(double alpha, const Tensor& x, Tensor& y);  // y += alpha*x
}  // namespace serial

namespace par {
void mm_nn(const Tensor& a, const Tensor& b, Tensor& c, bool acc);
void mm_nt(const Tensor& a, const Tensor& b, Tensor& c, bool acc);
void mm_tn(const Tensor& a, const Tensor& b, Tensor& c, bool acc);
void softmax_rows(const Tensor& in, Tensor& out);
void axpy(double alpha, const Tensor& x, Tensor& y);
}  // namespace par

void set_parallel(bool on);
bool parallel_enabled();

// Flop count below which dispatch always stays serial.
inline constexpr long kMinParallelWork = 1 << 15;

void mm_nn(const Tensor& a, const Tensor& b, Tensor& c, bool acc = false);
void mm_nt(const Tensor& a, const Tensor& b, Tensor& c, bool acc = false);
void mm_tn(const Tensor& a, const Tensor& b, Tensor& c, bool acc = false);
void softmax_rows(const Tensor& in, Tensor& out);
void axpy(double alpha, const Tensor& x, Tensor& y);

}  // namespace qagen::kern
