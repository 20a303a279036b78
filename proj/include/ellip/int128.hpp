#pragma once

#include <cstdint>
#include <string>

#include "ellip/errors.hpp"

namespace ellip {

using i64 = std::int64_t;
using u64 = std::uint64_t;
using i128 = __int128;
using u128 = unsigned __int128;

inline std::string i128_to_string(i128 v) {
  if (v == 0) return "0";
  bool neg = v < 0;
  u128 u = neg ? (u128)(-(v + 1)) + 1 : (u128)v;
  char buf[48];
  int pos = 48;
  while (u > 0) {
    buf[--pos] = char('0' + (int)(u % 10));
    u /= 10;
  }
  std::string s(buf + pos, 48 - pos);
  return neg ? "-" + s : s;
}

inline i128 abs_i128(i128 v) { return v < 0 ? -v : v; }

inline i128 gcd_i128(i128 a, i128 b) {
  a = abs_i128(a);
  b = abs_i128(b);
  while (b != 0) {
    i128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

// Checked arithmetic: desk-scale inputs leave enormous headroom, but a silent
// 128-bit wraparound would corrupt exact identities, so every product and sum
// that can plausibly grow goes through these.
inline i128 mul_checked(i128 a, i128 b) {
  i128 r;
  if (__builtin_mul_overflow(a, b, &r)) fail(Errc::Overflow, "128-bit multiply overflow");
  return r;
}

inline i128 add_checked(i128 a, i128 b) {
  i128 r;
  if (__builtin_add_overflow(a, b, &r)) fail(Errc::Overflow, "128-bit add overflow");
  return r;
}

inline i128 pow_checked(i128 base, int e) {
  i128 r = 1;
  for (int i = 0; i < e; ++i) r = mul_checked(r, base);
  return r;
}

// Floor square root of a 64-bit non-negative integer, exact.
inline i64 isqrt64(i64 n) {
  if (n < 0) fail(Errc::Overflow, "isqrt of negative value");
  if (n == 0) return 0;
  i64 r = (i64)__builtin_sqrt((double)n);
  while (r > 0 && r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

}  // namespace ellip
