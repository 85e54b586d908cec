// Shared vocabulary for the amenact library: error types, exact counts,
// rationals and small hashing helpers.
#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <boost/rational.hpp>

#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace amenact {

using Coords = std::vector<std::int64_t>;

/// Exact cardinalities; trajectory sizes grow exponentially.
using BigCount = boost::multiprecision::cpp_int;

using Rational = boost::rational<std::int64_t>;

inline constexpr std::size_t kDefaultElementBudget = 10'000'000;
inline constexpr std::size_t kDefaultSearchBudget = 1u << 16;

// ---------------------------------------------------------------------------
// Errors. Every failure mode named by an operation contract has its own type
// so callers (and the CLI exit-code mapping) can tell them apart.
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MismatchError : public Error {
 public:
  using Error::Error;
};

class UnsupportedError : public Error {
 public:
  using Error::Error;
};

class BudgetExceeded : public Error {
 public:
  BudgetExceeded(std::string what, std::size_t completed = 0)
      : Error(std::move(what)), completed_(completed) {}
  /// Largest index (or element count) finished before the budget ran out.
  std::size_t completed() const noexcept { return completed_; }

 private:
  std::size_t completed_;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class NotGoodSection : public Error {
 public:
  using Error::Error;
};

class NotInvariant : public Error {
 public:
  using Error::Error;
};

class WindowEscape : public Error {
 public:
  WindowEscape(std::string what, Coords offending, std::size_t completed = 0)
      : Error(std::move(what)), offending_(std::move(offending)), completed_(completed) {}
  const Coords& offending() const noexcept { return offending_; }
  /// Largest net index whose computation stayed inside the window.
  std::size_t completed() const noexcept { return completed_; }

 private:
  Coords offending_;
  std::size_t completed_;
};

// ---------------------------------------------------------------------------
// Arithmetic helpers
// ---------------------------------------------------------------------------

inline std::int64_t floor_mod(std::int64_t a, std::int64_t m) {
  std::int64_t r = a % m;
  return r < 0 ? r + m : r;
}

inline std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

inline std::int64_t checked_narrow(__int128 v) {
  if (v > std::numeric_limits<std::int64_t>::max() ||
      v < std::numeric_limits<std::int64_t>::min())
    throw BudgetExceeded("integer overflow in exact arithmetic");
  return static_cast<std::int64_t>(v);
}

inline std::int64_t mul_add(std::int64_t acc, std::int64_t a, std::int64_t b) {
  return checked_narrow(static_cast<__int128>(acc) +
                        static_cast<__int128>(a) * b);
}

/// Extended gcd: returns g = gcd(a,b) >= 0 with x*a + y*b = g.
inline std::int64_t ext_gcd(std::int64_t a, std::int64_t b, std::int64_t& x,
                            std::int64_t& y) {
  std::int64_t old_r = a, r = b, old_s = 1, s = 0, old_t = 0, t = 1;
  while (r != 0) {
    std::int64_t q = old_r / r;
    std::int64_t tmp = old_r - q * r;
    old_r = r;
    r = tmp;
    tmp = old_s - q * s;
    old_s = s;
    s = tmp;
    tmp = old_t - q * t;
    old_t = t;
    t = tmp;
  }
  if (old_r < 0) {
    old_r = -old_r;
    old_s = -old_s;
    old_t = -old_t;
  }
  x = old_s;
  y = old_t;
  return old_r;
}

inline std::int64_t gcd64(std::int64_t a, std::int64_t b) {
  a = a < 0 ? -a : a;
  b = b < 0 ? -b : b;
  while (b != 0) {
    std::int64_t t = a % b;
    a = b;
    b = t;
  }
  return a;
}

/// Natural logarithm of an exact count; accurate to double precision.
inline double log_count(const BigCount& n) {
  if (n <= 0) throw InvalidArgument("log of a non-positive count");
  if (n < (BigCount(1) << 62)) return std::log(static_cast<double>(n.convert_to<std::int64_t>()));
  const unsigned bits = boost::multiprecision::msb(n);
  const unsigned shift = bits - 60;
  BigCount top = n >> shift;
  return std::log(static_cast<double>(top.convert_to<std::int64_t>())) +
         static_cast<double>(shift) * std::log(2.0);
}

inline BigCount pow_count(std::int64_t base, std::uint64_t exp) {
  BigCount r = 1;
  for (std::uint64_t i = 0; i < exp; ++i) r *= base;
  return r;
}

/// Parses a decimal literal ("0.15", "1e-2", "3/20") into an exact rational.
inline Rational parse_rational(std::string_view text) {
  auto slash = text.find('/');
  if (slash != std::string_view::npos) {
    std::int64_t num = 0, den = 0;
    auto a = text.substr(0, slash), b = text.substr(slash + 1);
    if (std::from_chars(a.data(), a.data() + a.size(), num).ec != std::errc{} ||
        std::from_chars(b.data(), b.data() + b.size(), den).ec != std::errc{} || den == 0)
      throw InvalidArgument("malformed rational '" + std::string(text) + "'");
    return Rational(num, den);
  }
  std::string s(text);
  std::int64_t exponent = 0;
  if (auto e = s.find_first_of("eE"); e != std::string::npos) {
    exponent = std::stoll(s.substr(e + 1));
    s = s.substr(0, e);
  }
  bool negative = false;
  if (!s.empty() && (s[0] == '-' || s[0] == '+')) {
    negative = s[0] == '-';
    s = s.substr(1);
  }
  std::int64_t digits = 0;
  std::int64_t scale = 0;
  bool seen_dot = false;
  if (s.empty()) throw InvalidArgument("malformed rational '" + std::string(text) + "'");
  for (char c : s) {
    if (c == '.') {
      if (seen_dot) throw InvalidArgument("malformed rational '" + std::string(text) + "'");
      seen_dot = true;
      continue;
    }
    if (c < '0' || c > '9') throw InvalidArgument("malformed rational '" + std::string(text) + "'");
    digits = mul_add(c - '0', digits, 10);
    if (seen_dot) ++scale;
  }
  exponent -= scale;
  std::int64_t num = digits, den = 1;
  for (; exponent > 0; --exponent) num = mul_add(0, num, 10);
  for (; exponent < 0; ++exponent) den = mul_add(0, den, 10);
  return Rational(negative ? -num : num, den);
}

/// Shortest round-trip decimal of a double, read back as an exact rational.
inline Rational to_rational(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return parse_rational(std::string_view(buf, static_cast<std::size_t>(res.ptr - buf)));
}

inline double to_double(const Rational& r) {
  return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

inline std::string to_string(const Coords& c) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < c.size(); ++i) os << (i ? "," : "") << c[i];
  os << ')';
  return os.str();
}

inline std::string to_string(const BigCount& n) { return n.str(); }

struct CoordsHash {
  std::size_t operator()(const Coords& c) const noexcept {
    std::uint64_t h = 0x9e3779b97f4a7c15ull ^ c.size();
    for (auto v : c) {
      h ^= static_cast<std::uint64_t>(v) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return static_cast<std::size_t>(h);
  }
};

inline void hash_combine(std::size_t& seed, std::size_t v) noexcept {
  seed ^= v + 0x9e3779b97f4a7c15ull + (seed << 6) + (seed >> 2);
}

}  // namespace amenact
