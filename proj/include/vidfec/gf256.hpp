#pragma once

#include <array>
#include <cstdint>

namespace vidfec::gf256 {

// GF(2^8) with reduction polynomial x^8 + x^4 + x^3 + x^2 + 1 (0x11D),
// generator alpha = 2. Addition is XOR; multiplication goes through
// log/exp tables built at compile time.

namespace detail {

struct Tables {
  std::array<std::uint8_t, 512> exp{};
  std::array<std::uint8_t, 256> log{};
};

constexpr Tables build_tables() {
  Tables t{};
  std::uint16_t x = 1;
  for (int i = 0; i < 255; ++i) {
    t.exp[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(x);
    t.log[x] = static_cast<std::uint8_t>(i);
    x <<= 1;
    if (x & 0x100) x ^= 0x11D;
  }
  // Duplicate so exp[log a + log b] never needs a mod 255.
  for (int i = 255; i < 512; ++i) t.exp[static_cast<std::size_t>(i)] = t.exp[static_cast<std::size_t>(i - 255)];
  t.log[0] = 0;  // log(0) is undefined; callers guard the zero operand.
  return t;
}

inline constexpr Tables tables = build_tables();

}  // namespace detail

inline constexpr std::uint8_t add(std::uint8_t a, std::uint8_t b) { return a ^ b; }

inline std::uint8_t mul(std::uint8_t a, std::uint8_t b) {
  if (a == 0 || b == 0) return 0;
  return detail::tables.exp[detail::tables.log[a] + detail::tables.log[b]];
}

// Multiplicative inverse; x must be nonzero.
inline std::uint8_t inv(std::uint8_t x) {
  return detail::tables.exp[255 - detail::tables.log[x]];
}

inline std::uint8_t div(std::uint8_t a, std::uint8_t b) {
  if (a == 0) return 0;
  return detail::tables.exp[detail::tables.log[a] + 255 - detail::tables.log[b]];
}

// dst[i] ^= coeff * src[i]; the fused form the encoder/decoder loops use.
inline void mul_add_row(std::uint8_t* dst, const std::uint8_t* src, std::size_t len, std::uint8_t coeff) {
  if (coeff == 0) return;
  const int log_c = detail::tables.log[coeff];
  for (std::size_t i = 0; i < len; ++i) {
    if (src[i] != 0) dst[i] ^= detail::tables.exp[log_c + detail::tables.log[src[i]]];
  }
}

}  // namespace vidfec::gf256
