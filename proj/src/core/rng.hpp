#pragma once

#include <cstdint>
#include <random>
#include <sstream>
#include <string>

#include "core/tensor.hpp"

namespace qagen {

// All randomness in the project flows through seeded Rng instances.
class Rng {
 public:
  explicit Rng(uint64_t seed = 0) : engine_(seed) {}

  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }  // [0,1)
  // Open-interval uniform for Gumbel noise: log(-log(u)) needs u in (0,1).
  double uniform_open() {
    double u;
    do {
      u = uniform_(engine_);
    } while (u <= 0.0 || u >= 1.0);
    return u;
  }
  int uniform_int(int lo, int hi) {  // inclusive bounds
    return std::uniform_int_distribution<int>(lo, hi)(engine_);
  }

  Tensor normal_tensor(int r, int c, double stddev = 1.0) {
    Tensor t(r, c);
    for (auto& v : t.data) v = normal() * stddev;
    return t;
  }
  Tensor uniform_tensor(int r, int c, double lo, double hi) {
    Tensor t(r, c);
    for (auto& v : t.data) v = lo + (hi - lo) * uniform();
    return t;
  }

  std::mt19937_64& engine() { return engine_; }

  // mt19937_64 streams its full state as text; used by checkpoints.
  std::string save_state() const {
    std::ostringstream os;
    os << engine_;
    return os.str();
  }
  void load_state(const std::string& s) {
    std::istringstream is(s);
    is >> engine_;
  }

  // Derives an independent stream, e.g. one per context during generation.
  static uint64_t derive(uint64_t seed, uint64_t stream) {
    uint64_t z = seed + 0x9e3779b97f4a7c15ull * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace qagen
