#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>

namespace rncsim {

/// Element of GF(2^8) built on the polynomial x^8 + x^4 + x^3 + x + 1.
/// Addition is XOR; multiplication goes through log/exp tables.
class FieldElement {
 public:
  static constexpr std::uint16_t kPolynomial = 0x11B;

  constexpr FieldElement() = default;
  constexpr explicit FieldElement(std::uint8_t value) : value_(value) {}

  [[nodiscard]] constexpr std::uint8_t value() const { return value_; }
  [[nodiscard]] constexpr bool is_zero() const { return value_ == 0; }

  /// Multiplicative inverse. The inverse of zero is undefined; zero is
  /// returned so callers must check first.
  [[nodiscard]] FieldElement inverse() const;

  friend constexpr FieldElement operator+(FieldElement a, FieldElement b) {
    return FieldElement(static_cast<std::uint8_t>(a.value_ ^ b.value_));
  }
  friend constexpr FieldElement operator-(FieldElement a, FieldElement b) {
    return a + b;
  }
  friend FieldElement operator*(FieldElement a, FieldElement b);
  friend FieldElement operator/(FieldElement a, FieldElement b) {
    return a * b.inverse();
  }
  friend constexpr bool operator==(FieldElement, FieldElement) = default;

 private:
  std::uint8_t value_ = 0;
};

namespace gf256 {

/// Row `c` of the full multiplication table: mul_row(c)[x] == c * x.
[[nodiscard]] std::span<const std::uint8_t, 256> mul_row(FieldElement c);

/// dst[i] ^= c * src[i]. Table-driven kernel; sizes must match.
void mul_add_region(std::span<std::uint8_t> dst,
                    std::span<const std::uint8_t> src, FieldElement c);

/// data[i] = c * data[i].
void scale_region(std::span<std::uint8_t> data, FieldElement c);

/// Bit-serial (Russian peasant) arithmetic kept as the reference the table
/// kernels are checked and benchmarked against.
namespace reference {
[[nodiscard]] std::uint8_t mul(std::uint8_t a, std::uint8_t b);
void mul_add_region(std::span<std::uint8_t> dst,
                    std::span<const std::uint8_t> src, std::uint8_t c);
}  // namespace reference

}  // namespace gf256
}  // namespace rncsim
