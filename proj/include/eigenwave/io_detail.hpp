#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <istream>
#include <ostream>
#include <span>

namespace eigenwave::detail {

// Explicit little-endian byte order, independent of the host.

inline void write_le_doubles(std::ostream& out, std::span<const double> values) {
  std::array<char, 8> bytes{};
  for (double v : values) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    for (int b = 0; b < 8; ++b) {
      bytes[static_cast<std::size_t>(b)] = static_cast<char>((bits >> (8 * b)) & 0xffu);
    }
    out.write(bytes.data(), 8);
  }
}

inline void read_le_doubles(std::istream& in, std::span<double> values) {
  std::array<unsigned char, 8> bytes{};
  for (double& v : values) {
    in.read(reinterpret_cast<char*>(bytes.data()), 8);
    std::uint64_t bits = 0;
    for (int b = 7; b >= 0; --b) {
      bits = (bits << 8) | bytes[static_cast<std::size_t>(b)];
    }
    v = std::bit_cast<double>(bits);
  }
}

} // namespace eigenwave::detail
