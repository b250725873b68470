#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace slitcarpet {

/// Exact dyadic rational numerator / 2^exponent, always stored reduced:
/// when exponent > 0 the numerator is odd.
///
/// All arithmetic is exact; an operation whose result would not fit in
/// 64-bit numerator throws std::overflow_error instead of rounding.
class Dyadic {
 public:
  constexpr Dyadic() = default;
  Dyadic(std::int64_t numerator, std::uint32_t exponent = 0);

  static Dyadic from_int(std::int64_t v) { return Dyadic(v, 0); }
  /// Exact conversion of a double whose binary expansion terminates at or
  /// before 2^-max_exponent; std::nullopt otherwise (including non-finite).
  static std::optional<Dyadic> from_double(double v, std::uint32_t max_exponent = 62);
  /// Nearest multiple of 2^-exponent (ties away from zero).
  static Dyadic snap(double v, std::uint32_t exponent);
  /// Parses "k", "k/2^m", "k/N" with N a power of two, or a terminating
  /// decimal such as "0.375".
  static Dyadic parse(std::string_view text);

  std::int64_t numerator() const { return num_; }
  std::uint32_t exponent() const { return exp_; }

  double to_double() const;
  bool is_integer() const { return exp_ == 0; }
  bool is_zero() const { return num_ == 0; }

  /// floor(value) as an integer.
  std::int64_t floor() const;
  /// True when value * 2^e is an integer.
  bool is_multiple_of_pow2(int e) const;

  Dyadic operator-() const;
  friend Dyadic operator+(const Dyadic& a, const Dyadic& b);
  friend Dyadic operator-(const Dyadic& a, const Dyadic& b);
  friend Dyadic operator*(const Dyadic& a, const Dyadic& b);
  Dyadic& operator+=(const Dyadic& o) { return *this = *this + o; }
  Dyadic& operator-=(const Dyadic& o) { return *this = *this - o; }

  /// value * 2^k (k may be negative).
  Dyadic scaled(int k) const;

  friend bool operator==(const Dyadic& a, const Dyadic& b) {
    return a.num_ == b.num_ && a.exp_ == b.exp_;
  }
  friend std::strong_ordering operator<=>(const Dyadic& a, const Dyadic& b);

  /// "num/2^e", or "num" for integers.
  std::string to_string() const;

 private:
  static Dyadic make_reduced(__int128 numerator, std::int64_t exponent);

  std::int64_t num_ = 0;
  std::uint32_t exp_ = 0;
};

/// -1, 0 or +1.
int sign(const Dyadic& d);

}  // namespace slitcarpet
