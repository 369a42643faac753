#pragma once

// Shared vocabulary types: indices, exact rationals, and the error hierarchy.

#include <boost/rational.hpp>

#include <bit>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

// Boost 1.74's mixed rational/integer operator== recurses forever once C++20
// rewrites `a == b` as `b == a`. Exact non-template matches take precedence.
namespace boost {
#define DENSITYLAB_RATIONAL_EQ(T)                                                          \
  inline bool operator==(const rational<std::int64_t>& a, T b) {                         \
    return a.denominator() == 1 && a.numerator() == static_cast<std::int64_t>(b);          \
  }
DENSITYLAB_RATIONAL_EQ(int)
DENSITYLAB_RATIONAL_EQ(long)
DENSITYLAB_RATIONAL_EQ(long long)
#undef DENSITYLAB_RATIONAL_EQ
}  // namespace boost

namespace densitylab {

using Index = std::uint64_t;
using Rational = boost::rational<std::int64_t>;

inline constexpr Index kIndexMax = std::numeric_limits<Index>::max();

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad arguments: malformed tokens, out-of-range parameters, arity mismatch.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// A table-backed sequence was evaluated past its stored horizon.
class HorizonError : public Error {
 public:
  using Error::Error;
};

/// Injectivity/bijectivity violations and failed theorem-level checks.
/// Seeing one of these means either user input broke a contract or the
/// construction has a bug.
class IntegrityError : public Error {
 public:
  using Error::Error;
};

/// A search ran past its working horizon before finding what it needed.
class InsufficientError : public Error {
 public:
  using Error::Error;
};

/// A dovetailed search exhausted its budget schedule.
class TimeoutError : public Error {
 public:
  using Error::Error;
};

inline Rational make_rational(std::int64_t num, std::int64_t den) {
  if (den == 0) throw ParameterError("rational with zero denominator");
  return Rational(num, den);
}

inline double to_double(const Rational& r) {
  return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

inline std::string to_string(const Rational& r) {
  if (r.denominator() == 1) return std::to_string(r.numerator());
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

/// Largest r with r*r <= n.
constexpr Index isqrt(Index n) {
  if (n < 2) return n;
  // Newton from a power-of-two overestimate; monotone decreasing.
  Index x = Index{1} << ((std::bit_width(n) + 1) / 2);
  while (true) {
    Index y = (x + n / x) / 2;
    if (y >= x) return x;
    x = y;
  }
}

constexpr bool is_square(Index n) {
  Index r = isqrt(n);
  return r * r == n;
}

/// Checked arithmetic for encodings that must never wrap silently.
inline Index checked_add(Index a, Index b) {
  Index out;
  if (__builtin_add_overflow(a, b, &out)) throw InsufficientError("index arithmetic overflow");
  return out;
}

inline Index checked_mul(Index a, Index b) {
  Index out;
  if (__builtin_mul_overflow(a, b, &out)) throw InsufficientError("index arithmetic overflow");
  return out;
}

}  // namespace densitylab
