#pragma once

// Characteristic sequences of subsets of the naturals, evaluated lazily.
//
// A BitSequence is a total, deterministic map from index to bit. Sets with
// a closed-form member count also carry a counter so that partial densities
// and rank/select queries at huge horizons stay cheap.

#include "densitylab/core.hpp"

#include <algorithm>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace densitylab {

enum class SequenceKind { closed_form, table_backed, prng_backed, derived };

inline const char* to_string(SequenceKind k) {
  switch (k) {
    case SequenceKind::closed_form: return "closed-form";
    case SequenceKind::table_backed: return "table-backed";
    case SequenceKind::prng_backed: return "prng-backed";
    case SequenceKind::derived: return "derived";
  }
  return "?";
}

struct Seed {
  std::uint64_t value = 0;
  friend bool operator==(Seed, Seed) = default;
};

inline constexpr const char* kSurrogateDisclaimer =
    "prng-backed sequences are pseudo-random surrogates; results are finite "
    "evidence and carry no guarantee that holds for genuinely random sets";

class BitSequence {
 public:
  using Evaluator = std::function<bool(Index)>;
  /// Returns |S ∩ [0, n)|.
  using Counter = std::function<Index(Index)>;

  BitSequence(SequenceKind kind, std::string label, Evaluator eval,
              std::optional<Rational> known_density = std::nullopt, Counter counter = {})
      : kind_(kind),
        label_(std::move(label)),
        eval_(std::move(eval)),
        counter_(std::move(counter)),
        known_density_(known_density) {}

  bool operator()(Index n) const { return eval_(n); }
  bool contains(Index n) const { return eval_(n); }

  SequenceKind kind() const { return kind_; }
  const std::string& label() const { return label_; }
  /// Metadata only. Density computations never read it.
  const std::optional<Rational>& known_density() const { return known_density_; }

  bool has_counter() const { return static_cast<bool>(counter_); }

  /// |S ∩ [0, n)|, via the closed-form counter when present.
  Index count_below(Index n) const {
    if (counter_) return counter_(n);
    Index c = 0;
    for (Index k = 0; k < n; ++k) c += eval_(k) ? 1 : 0;
    return c;
  }

  const Evaluator& evaluator() const { return eval_; }
  const Counter& counter() const { return counter_; }

  BitSequence relabeled(std::string label) const {
    BitSequence out = *this;
    out.label_ = std::move(label);
    return out;
  }

 private:
  SequenceKind kind_;
  std::string label_;
  Evaluator eval_;
  Counter counter_;
  std::optional<Rational> known_density_;
};

namespace detail {

/// Sequentially generated bits with a memoized frontier. Readers below the
/// frontier see stored values; the generator is only ever stepped under the
/// lock, in index order.
class BitFrontier {
 public:
  using Step = std::function<bool(Index n, Index count_so_far)>;

  explicit BitFrontier(Step step) : step_(std::move(step)) {}

  bool bit(Index n) {
    std::lock_guard lock(mu_);
    extend_to(n + 1);
    return (words_[n / 64] >> (n % 64)) & 1u;
  }

  Index count_below(Index n) {
    std::lock_guard lock(mu_);
    extend_to(n);
    if (n == 0) return 0;
    Index w = n / 64;
    Index c = w == 0 ? 0 : cumulative_[w - 1];
    if (n % 64) c += std::popcount(words_[w] & ((std::uint64_t{1} << (n % 64)) - 1));
    return c;
  }

 private:
  void extend_to(Index n) {
    while (size_ < n) {
      bool b = step_(size_, count_);
      if (size_ % 64 == 0) {
        words_.push_back(0);
        cumulative_.push_back(count_);
      }
      if (b) {
        words_.back() |= std::uint64_t{1} << (size_ % 64);
        ++count_;
      }
      cumulative_.back() = count_;
      ++size_;
    }
  }

  std::mutex mu_;
  Step step_;
  std::vector<std::uint64_t> words_;
  std::vector<Index> cumulative_;  // ones in words_[0..=i]
  Index size_ = 0;
  Index count_ = 0;
};

constexpr std::uint64_t splitmix_mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// SplitMix64 output for counter `block` of the stream keyed by `seed`.
constexpr std::uint64_t prf_word(std::uint64_t seed, std::uint64_t block) {
  constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;
  std::uint64_t key = splitmix_mix(seed ^ 0x6A09E667F3BCC909ull);
  return splitmix_mix(key + (block + 1) * kGamma);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Standard sets

inline BitSequence all_ones() {
  return BitSequence(
      SequenceKind::closed_form, "ones", [](Index) { return true; }, Rational(1),
      [](Index n) { return n; });
}

inline BitSequence all_zeros() {
  return BitSequence(
      SequenceKind::closed_form, "zeros", [](Index) { return false; }, Rational(0),
      [](Index) { return Index{0}; });
}

/// {k*m + i : k >= 0}
inline BitSequence arithmetic(Index m, Index i) {
  if (m < 1 || i >= m)
    throw ParameterError("arithmetic(m,i) needs m >= 1 and 0 <= i < m");
  return BitSequence(
      SequenceKind::closed_form,
      "arithmetic:" + std::to_string(m) + ":" + std::to_string(i),
      [m, i](Index n) { return n >= i && (n - i) % m == 0; },
      make_rational(1, static_cast<std::int64_t>(m)),
      [m, i](Index n) { return n <= i ? Index{0} : (n - i - 1) / m + 1; });
}

inline BitSequence evens() { return arithmetic(2, 0).relabeled("evens"); }
inline BitSequence odds() { return arithmetic(2, 1).relabeled("odds"); }

inline BitSequence squares() {
  return BitSequence(
      SequenceKind::closed_form, "squares", [](Index n) { return is_square(n); }, Rational(0),
      [](Index n) { return n == 0 ? Index{0} : isqrt(n - 1) + 1; });
}

/// {2^(2^k) : k >= 0} = {2, 4, 16, 256, 65536, 2^32}
inline BitSequence tower() {
  auto contains = [](Index n) {
    if (!std::has_single_bit(n)) return false;
    Index e = static_cast<Index>(std::countr_zero(n));
    return std::has_single_bit(e);
  };
  return BitSequence(
      SequenceKind::closed_form, "tower", contains, Rational(0), [](Index n) {
        Index c = 0;
        for (int k = 0; k < 6; ++k) {
          Index member = Index{1} << (Index{1} << k);
          if (member < n) ++c;
        }
        return c;
      });
}

/// {2^e * m : m odd}. Together with {0} these partition the naturals.
inline BitSequence dyadic(Index e) {
  if (e > 63) throw ParameterError("dyadic(e) needs 0 <= e <= 63");
  return BitSequence(
      SequenceKind::closed_form, "dyadic:" + std::to_string(e),
      [e](Index n) { return n != 0 && static_cast<Index>(std::countr_zero(n)) == e; },
      e < 62 ? std::optional<Rational>(make_rational(1, std::int64_t{1} << (e + 1)))
             : std::nullopt,
      [e](Index n) {
        if (n == 0) return Index{0};
        Index x = n - 1;
        Index a = e >= 64 ? 0 : x >> e;
        Index b = e + 1 >= 64 ? 0 : x >> (e + 1);
        return a - b;
      });
}

/// {k! : k >= 1} = {1, 2, 6, 24, ...}; one member in each [k!, (k+1)!).
inline BitSequence factorial_gaps() {
  auto members = [] {
    std::vector<Index> out;
    Index f = 1;
    for (Index k = 1; k <= 20; ++k) {
      f *= k;
      if (out.empty() || out.back() != f) out.push_back(f);
    }
    return out;
  }();
  return BitSequence(
      SequenceKind::closed_form, "factorial_gaps",
      [members](Index n) { return std::binary_search(members.begin(), members.end(), n); },
      Rational(0),
      [members](Index n) {
        return static_cast<Index>(std::lower_bound(members.begin(), members.end(), n) -
                                  members.begin());
      });
}

/// Explicit finite table; evaluating at or past the horizon is an error.
inline BitSequence table(std::vector<bool> bits, std::string label = "table") {
  auto shared = std::make_shared<const std::vector<bool>>(std::move(bits));
  auto lbl = label;
  return BitSequence(SequenceKind::table_backed, std::move(label),
                     [shared, lbl](Index n) {
                       if (n >= shared->size())
                         throw HorizonError("table '" + lbl + "' evaluated at " +
                                            std::to_string(n) + " past horizon " +
                                            std::to_string(shared->size()));
                       return static_cast<bool>((*shared)[n]);
                     });
}

// ---------------------------------------------------------------------------
// Pseudo-random surrogate

/// Counter-mode sequence: bit n is bit (n mod 64) of SplitMix64 output number
/// n/64 of the stream keyed by the seed, so any index is evaluated directly.
inline BitSequence prng_sequence(Seed seed) {
  const std::uint64_t s = seed.value;
  return BitSequence(SequenceKind::prng_backed, "prng:" + std::to_string(s), [s](Index n) {
    return ((detail::prf_word(s, n / 64) >> (n % 64)) & 1u) != 0;
  });
}

// ---------------------------------------------------------------------------
// Combinators

enum class SetOp { intersect, unite, complement };

inline BitSequence complement(const BitSequence& a) {
  auto ea = a.evaluator();
  BitSequence::Counter counter;
  if (a.has_counter()) counter = [ca = a.counter()](Index n) { return n - ca(n); };
  std::optional<Rational> d;
  if (a.known_density()) d = Rational(1) - *a.known_density();
  return BitSequence(SequenceKind::derived, "complement:" + a.label(),
                     [ea](Index n) { return !ea(n); }, d, std::move(counter));
}

inline BitSequence intersect(const BitSequence& a, const BitSequence& b) {
  return BitSequence(SequenceKind::derived, "intersect(" + a.label() + "," + b.label() + ")",
                     [ea = a.evaluator(), eb = b.evaluator()](Index n) { return ea(n) && eb(n); });
}

inline BitSequence unite(const BitSequence& a, const BitSequence& b) {
  return BitSequence(SequenceKind::derived, "union(" + a.label() + "," + b.label() + ")",
                     [ea = a.evaluator(), eb = b.evaluator()](Index n) { return ea(n) || eb(n); });
}

inline BitSequence combine(SetOp op, const BitSequence& a,
                           const std::optional<BitSequence>& b = std::nullopt) {
  if (op == SetOp::complement) {
    if (b) throw ParameterError("complement takes exactly one operand");
    return complement(a);
  }
  if (!b) throw ParameterError("intersect/union take exactly two operands");
  return op == SetOp::intersect ? intersect(a, *b) : unite(a, *b);
}

/// S ↾ n as a '0'/'1' string.
inline std::string prefix(const BitSequence& s, Index n) {
  std::string out;
  out.reserve(n);
  for (Index k = 0; k < n; ++k) out.push_back(s(k) ? '1' : '0');
  return out;
}

}  // namespace densitylab
