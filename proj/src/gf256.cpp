#include "rncsim/gf256.hpp"

#include <cassert>

namespace rncsim {
namespace {

struct Tables {
  std::array<std::uint8_t, 512> exp{};
  std::array<std::uint8_t, 256> log{};
  std::array<std::array<std::uint8_t, 256>, 256> mul{};

  Tables() {
    // 3 generates the multiplicative group under 0x11B.
    std::uint16_t x = 1;
    for (int i = 0; i < 255; ++i) {
      exp[i] = static_cast<std::uint8_t>(x);
      log[x] = static_cast<std::uint8_t>(i);
      std::uint16_t doubled = static_cast<std::uint16_t>(x << 1);
      if (doubled & 0x100) doubled ^= FieldElement::kPolynomial;
      x = static_cast<std::uint16_t>(doubled ^ x);
    }
    for (int i = 255; i < 512; ++i) exp[i] = exp[i - 255];
    for (int a = 1; a < 256; ++a)
      for (int b = 1; b < 256; ++b)
        mul[a][b] = exp[log[a] + log[b]];
  }
};

const Tables& tables() {
  static const Tables t;
  return t;
}

}  // namespace

FieldElement FieldElement::inverse() const {
  if (value_ == 0) return FieldElement{};
  const auto& t = tables();
  return FieldElement(t.exp[255 - t.log[value_]]);
}

FieldElement operator*(FieldElement a, FieldElement b) {
  return FieldElement(tables().mul[a.value_][b.value_]);
}

namespace gf256 {

std::span<const std::uint8_t, 256> mul_row(FieldElement c) {
  return std::span<const std::uint8_t, 256>(tables().mul[c.value()]);
}

void mul_add_region(std::span<std::uint8_t> dst,
                    std::span<const std::uint8_t> src, FieldElement c) {
  assert(dst.size() == src.size());
  if (c.is_zero()) return;
  const std::uint8_t* row = tables().mul[c.value()].data();
  const std::size_t n = dst.size();
#pragma omp simd
  for (std::size_t i = 0; i < n; ++i) dst[i] ^= row[src[i]];
}

void scale_region(std::span<std::uint8_t> data, FieldElement c) {
  const std::uint8_t* row = tables().mul[c.value()].data();
  for (auto& byte : data) byte = row[byte];
}

namespace reference {

std::uint8_t mul(std::uint8_t a, std::uint8_t b) {
  std::uint8_t product = 0;
  while (b) {
    if (b & 1) product ^= a;
    const bool carry = a & 0x80;
    a = static_cast<std::uint8_t>(a << 1);
    if (carry) a ^= static_cast<std::uint8_t>(FieldElement::kPolynomial & 0xFF);
    b >>= 1;
  }
  return product;
}

void mul_add_region(std::span<std::uint8_t> dst,
                    std::span<const std::uint8_t> src, std::uint8_t c) {
  assert(dst.size() == src.size());
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] ^= mul(c, src[i]);
}

}  // namespace reference
}  // namespace gf256
}  // namespace rncsim
