// Times the serial reference kernels against the OpenMP variants and checks
// that both produce identical results. Usage: kernel_bench [reps]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>

#include "core/kernels.hpp"
#include "core/rng.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace qagen;
using Clock = std::chrono::steady_clock;

namespace {

double time_ms(const std::function<void()>& fn, int reps) {
  fn();  // warm up
  auto t0 = Clock::now();
  for (int i = 0; i < reps; ++i) fn();
  auto t1 = Clock::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

void bench_mm(int n, int reps) {
  Rng rng(7);
  Tensor a = rng.normal_tensor(n, n), b = rng.normal_tensor(n, n);
  Tensor cs(n, n), cp(n, n);
  double ts = time_ms([&] { kern::serial::mm_nn(a, b, cs, false); }, reps);
  double tp = time_ms([&] { kern::par::mm_nn(a, b, cp, false); }, reps);
  const char* match = (cs == cp) ? "exact" : "MISMATCH";
  std::printf("  mm_nn   %5dx%-5d  serial %9.3f ms   omp %9.3f ms   speedup %5.2fx   %s\n", n, n,
              ts, tp, ts / tp, match);
}

void bench_softmax(int rows, int cols, int reps) {
  Rng rng(8);
  Tensor x = rng.normal_tensor(rows, cols);
  Tensor ys(rows, cols), yp(rows, cols);
  double ts = time_ms([&] { kern::serial::softmax_rows(x, ys); }, reps);
  double tp = time_ms([&] { kern::par::softmax_rows(x, yp); }, reps);
  const char* match = (ys == yp) ? "exact" : "MISMATCH";
  std::printf("  softmax %5dx%-5d  serial %9.3f ms   omp %9.3f ms   speedup %5.2fx   %s\n", rows,
              cols, ts, tp, ts / tp, match);
}

}  // namespace

int main(int argc, char** argv) {
  int reps = argc > 1 ? std::atoi(argv[1]) : 5;
#ifdef _OPENMP
  std::printf("OpenMP enabled, max threads = %d\n", omp_get_max_threads());
#else
  std::printf("Built without OpenMP; both columns run the serial path\n");
#endif
  std::printf("reps per measurement: %d\n\n", reps);
  for (int n : {64, 128, 256, 512, 1024}) bench_mm(n, reps);
  std::printf("\n");
  bench_softmax(1 << 14, 128, reps);
  bench_softmax(1 << 10, 2048, reps);
  return 0;
}
