#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

#include "core/tensor.hpp"

// Raw little-endian binary primitives for the checkpoint container.
// Doubles round-trip bit-exactly.

namespace qagen::ser {

inline void write_u64(std::ostream& os, uint64_t v) {
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  os.write(b, 8);
}

inline uint64_t read_u64(std::istream& is) {
  unsigned char b[8];
  is.read(reinterpret_cast<char*>(b), 8);
  if (!is) throw std::runtime_error("unexpected end of stream");
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(b[i]) << (8 * i);
  return v;
}

inline void write_string(std::ostream& os, const std::string& s) {
  write_u64(os, s.size());
  os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

inline std::string read_string(std::istream& is) {
  uint64_t n = read_u64(is);
  std::string s(n, '\0');
  is.read(s.data(), static_cast<std::streamsize>(n));
  if (!is) throw std::runtime_error("unexpected end of stream");
  return s;
}

inline void write_tensor(std::ostream& os, const Tensor& t) {
  write_u64(os, static_cast<uint64_t>(t.rows));
  write_u64(os, static_cast<uint64_t>(t.cols));
  os.write(reinterpret_cast<const char*>(t.data.data()),
           static_cast<std::streamsize>(t.data.size() * sizeof(double)));
}

inline Tensor read_tensor(std::istream& is) {
  int rows = static_cast<int>(read_u64(is));
  int cols = static_cast<int>(read_u64(is));
  Tensor t(rows, cols);
  is.read(reinterpret_cast<char*>(t.data.data()),
          static_cast<std::streamsize>(t.data.size() * sizeof(double)));
  if (!is) throw std::runtime_error("unexpected end of stream");
  return t;
}

}  // namespace qagen::ser
