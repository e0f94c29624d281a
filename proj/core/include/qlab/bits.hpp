#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace qlab {

// Bit vectors hold 0/1 bytes; index 0 is the first coordinate.
using Bits = std::vector<std::uint8_t>;

inline int weight(const Bits& x) {
  int w = 0;
  for (auto b : x) w += b;
  return w;
}

// Bit i of idx becomes coordinate i.
inline Bits bits_from_index(std::uint64_t idx, int n) {
  Bits x(n);
  for (int i = 0; i < n; ++i) x[i] = (idx >> i) & 1u;
  return x;
}

inline std::uint64_t index_from_bits(const Bits& x) {
  if (x.size() > 64) throw std::invalid_argument("index_from_bits: more than 64 bits");
  std::uint64_t idx = 0;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i]) idx |= std::uint64_t{1} << i;
  return idx;
}

// "0110" -> {0,1,1,0}; first character is coordinate 0.
inline Bits parse_bits(const std::string& s) {
  Bits x;
  x.reserve(s.size());
  for (char c : s) {
    if (c != '0' && c != '1') throw std::invalid_argument("parse_bits: non-binary character");
    x.push_back(static_cast<std::uint8_t>(c - '0'));
  }
  return x;
}

inline std::string format_bits(const Bits& x) {
  std::string s;
  s.reserve(x.size());
  for (auto b : x) s.push_back(b ? '1' : '0');
  return s;
}

// Coordinates [i*m, (i+1)*m) of x.
inline Bits block_of(const Bits& x, int i, int m) {
  return Bits(x.begin() + static_cast<std::ptrdiff_t>(i) * m,
              x.begin() + static_cast<std::ptrdiff_t>(i + 1) * m);
}

}  // namespace qlab
