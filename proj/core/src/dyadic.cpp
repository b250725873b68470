#include "slitcarpet/dyadic.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <limits>

namespace slitcarpet {

namespace {

constexpr __int128 kInt64Max = std::numeric_limits<std::int64_t>::max();
constexpr __int128 kInt64Min = std::numeric_limits<std::int64_t>::min();

std::int64_t checked_narrow(__int128 v) {
  if (v > kInt64Max || v < kInt64Min) throw std::overflow_error("Dyadic: numerator overflow");
  return static_cast<std::int64_t>(v);
}

__int128 shift_up(std::int64_t v, std::uint32_t by) {
  if (v == 0) return 0;
  if (by > 62) throw std::overflow_error("Dyadic: exponent gap too large");
  return static_cast<__int128>(v) << by;
}

bool parse_int128(std::string_view s, __int128& out) {
  if (s.empty()) return false;
  bool neg = false;
  std::size_t i = 0;
  if (s[0] == '-' || s[0] == '+') {
    neg = s[0] == '-';
    i = 1;
  }
  if (i == s.size()) return false;
  __int128 v = 0;
  for (; i < s.size(); ++i) {
    if (s[i] < '0' || s[i] > '9') return false;
    v = v * 10 + (s[i] - '0');
    if (v > (static_cast<__int128>(1) << 100)) return false;
  }
  out = neg ? -v : v;
  return true;
}

}  // namespace

Dyadic::Dyadic(std::int64_t numerator, std::uint32_t exponent) {
  *this = make_reduced(numerator, exponent);
}

Dyadic Dyadic::make_reduced(__int128 numerator, std::int64_t exponent) {
  if (numerator == 0) return Dyadic{};
  while (exponent > 0 && (numerator & 1) == 0) {
    numerator >>= 1;
    --exponent;
  }
  if (exponent < 0) {
    if (-exponent > 62) throw std::overflow_error("Dyadic: value too large");
    numerator <<= -exponent;
    exponent = 0;
  }
  if (exponent > std::numeric_limits<std::uint32_t>::max()) {
    throw std::overflow_error("Dyadic: exponent overflow");
  }
  Dyadic d;
  d.num_ = checked_narrow(numerator);
  d.exp_ = static_cast<std::uint32_t>(exponent);
  return d;
}

std::optional<Dyadic> Dyadic::from_double(double v, std::uint32_t max_exponent) {
  if (!std::isfinite(v)) return std::nullopt;
  if (v == 0.0) return Dyadic{};
  int e = 0;
  const double frac = std::frexp(v, &e);  // v = frac * 2^e, 0.5 <= |frac| < 1
  const auto mant = static_cast<std::int64_t>(std::ldexp(frac, 53));
  // v = mant * 2^(e - 53)
  const std::int64_t exponent = 53 - static_cast<std::int64_t>(e);
  const int tz = std::countr_zero(static_cast<std::uint64_t>(mant < 0 ? -mant : mant));
  const std::int64_t reduced = exponent - tz;
  if (reduced > static_cast<std::int64_t>(max_exponent)) return std::nullopt;
  if (reduced < -9) return std::nullopt;  // |v| >= 2^62, out of range for the numerator
  return make_reduced(mant, exponent);
}

Dyadic Dyadic::snap(double v, std::uint32_t exponent) {
  if (!std::isfinite(v)) throw std::invalid_argument("Dyadic::snap: non-finite value");
  const double scaled = std::ldexp(v, static_cast<int>(exponent));
  if (std::fabs(scaled) > 9.0e18) throw std::overflow_error("Dyadic::snap: value too large");
  return Dyadic(std::llround(scaled), exponent);
}

Dyadic Dyadic::parse(std::string_view text) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  const auto bad = [&] { return std::invalid_argument("not a dyadic rational: '" + std::string(text) + "'"); };
  if (text.empty()) throw bad();

  if (const auto slash = text.find('/'); slash != std::string_view::npos) {
    __int128 num = 0;
    if (!parse_int128(text.substr(0, slash), num)) throw bad();
    std::string_view den = text.substr(slash + 1);
    std::int64_t exponent = 0;
    if (den.rfind("2^", 0) == 0) {
      __int128 e = 0;
      if (!parse_int128(den.substr(2), e) || e < 0 || e > 4096) throw bad();
      exponent = static_cast<std::int64_t>(e);
    } else {
      __int128 d = 0;
      if (!parse_int128(den, d) || d <= 0) throw bad();
      const auto ud = static_cast<unsigned __int128>(d);
      if ((ud & (ud - 1)) != 0) throw bad();
      while (d > 1) {
        d >>= 1;
        ++exponent;
      }
    }
    return make_reduced(num, exponent);
  }

  const auto dot = text.find('.');
  if (dot == std::string_view::npos) {
    __int128 v = 0;
    if (!parse_int128(text, v)) throw bad();
    return make_reduced(v, 0);
  }
  std::string digits(text.substr(0, dot));
  std::string_view frac = text.substr(dot + 1);
  if (frac.size() > 30) throw bad();
  digits += frac;
  if (digits == "-" || digits == "+" || digits.empty()) throw bad();
  __int128 v = 0;
  if (!parse_int128(digits, v)) throw bad();
  // v / 10^d = v / 5^d / 2^d, dyadic iff 5^d divides v.
  const auto d = static_cast<std::int64_t>(frac.size());
  __int128 five = 1;
  for (std::int64_t i = 0; i < d; ++i) five *= 5;
  if (v % five != 0) throw bad();
  return make_reduced(v / five, d);
}

double Dyadic::to_double() const { return std::ldexp(static_cast<double>(num_), -static_cast<int>(exp_)); }

std::int64_t Dyadic::floor() const {
  if (exp_ == 0) return num_;
  if (exp_ >= 63) return num_ < 0 ? -1 : 0;
  return num_ >> exp_;
}

bool Dyadic::is_multiple_of_pow2(int e) const {
  // value * 2^e integer  <=>  exponent <= e (reduced form)
  if (num_ == 0) return true;
  return static_cast<std::int64_t>(exp_) <= e;
}

Dyadic Dyadic::operator-() const {
  if (num_ == std::numeric_limits<std::int64_t>::min()) throw std::overflow_error("Dyadic: negation overflow");
  Dyadic d = *this;
  d.num_ = -num_;
  return d;
}

Dyadic operator+(const Dyadic& a, const Dyadic& b) {
  const std::uint32_t e = std::max(a.exp_, b.exp_);
  return Dyadic::make_reduced(shift_up(a.num_, e - a.exp_) + shift_up(b.num_, e - b.exp_), e);
}

Dyadic operator-(const Dyadic& a, const Dyadic& b) { return a + (-b); }

Dyadic operator*(const Dyadic& a, const Dyadic& b) {
  return Dyadic::make_reduced(static_cast<__int128>(a.num_) * b.num_,
                              static_cast<std::int64_t>(a.exp_) + b.exp_);
}

Dyadic Dyadic::scaled(int k) const {
  if (num_ == 0) return *this;
  return make_reduced(num_, static_cast<std::int64_t>(exp_) - k);
}

std::strong_ordering operator<=>(const Dyadic& a, const Dyadic& b) {
  if (a.exp_ == b.exp_) return a.num_ <=> b.num_;
  const bool a_finer = a.exp_ > b.exp_;
  const Dyadic& fine = a_finer ? a : b;
  const Dyadic& coarse = a_finer ? b : a;
  const std::uint32_t gap = fine.exp_ - coarse.exp_;
  std::strong_ordering coarse_vs_fine = std::strong_ordering::equal;
  if (gap <= 62) {
    coarse_vs_fine = (static_cast<__int128>(coarse.num_) << gap) <=> static_cast<__int128>(fine.num_);
  } else {
    // |fine| * 2^coarse.exp < 1, and fine is not an integer there.
    if (coarse.num_ >= 1) coarse_vs_fine = std::strong_ordering::greater;
    else if (coarse.num_ <= -1) coarse_vs_fine = std::strong_ordering::less;
    else coarse_vs_fine = 0 <=> fine.num_;
  }
  if (a_finer) return 0 <=> coarse_vs_fine;  // reverse
  return coarse_vs_fine;
}

std::string Dyadic::to_string() const {
  if (exp_ == 0) return std::to_string(num_);
  return std::to_string(num_) + "/2^" + std::to_string(exp_);
}

int sign(const Dyadic& d) { return (d.numerator() > 0) - (d.numerator() < 0); }

}  // namespace slitcarpet
