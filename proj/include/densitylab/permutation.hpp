#pragma once

// Computable injections and permutations of the naturals, set images,
// sampled subsequences, and the constructive transformations between them.

#include "densitylab/construct.hpp"
#include "densitylab/density.hpp"
#include "densitylab/primes.hpp"

#include <cmath>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

namespace densitylab {

using IndexMap = std::function<Index(Index)>;

/// Total computable injection p. Checked evaluation keeps a seen-set over the
/// evaluated domain prefix [0, frontier); a repeated value is a hard error.
class ComputableInjection {
 public:
  ComputableInjection(std::string label, IndexMap forward)
      : label_(std::move(label)),
        forward_(std::move(forward)),
        guard_(std::make_shared<Guard>()) {}

  Index operator()(Index n) const {
    std::lock_guard lock(guard_->mu);
    while (guard_->frontier <= n) {
      Index i = guard_->frontier;
      Index v = forward_(i);
      auto [it, fresh] = guard_->seen.emplace(v, i);
      if (!fresh)
        throw IntegrityError("injection '" + label_ + "' is not injective: p(" +
                             std::to_string(it->second) + ") = p(" + std::to_string(i) +
                             ") = " + std::to_string(v));
      ++guard_->frontier;
    }
    return forward_(n);
  }

  /// Unchecked evaluation.
  Index raw(Index n) const { return forward_(n); }
  const std::string& label() const { return label_; }

 private:
  struct Guard {
    std::mutex mu;
    Index frontier = 0;
    std::unordered_map<Index, Index> seen;
  };

  std::string label_;
  IndexMap forward_;
  std::shared_ptr<Guard> guard_;
};

class ComputablePermutation {
 public:
  ComputablePermutation(std::string label, IndexMap forward, IndexMap inverse)
      : label_(std::move(label)), forward_(std::move(forward)), inverse_(std::move(inverse)) {}

  Index operator()(Index n) const { return forward_(n); }
  Index forward(Index n) const { return forward_(n); }
  Index inverse(Index n) const { return inverse_(n); }
  const std::string& label() const { return label_; }

  const IndexMap& forward_map() const { return forward_; }
  const IndexMap& inverse_map() const { return inverse_; }

  ComputableInjection as_injection() const { return ComputableInjection(label_, forward_); }

 private:
  std::string label_;
  IndexMap forward_;
  IndexMap inverse_;
};

// ---------------------------------------------------------------------------
// Library injections

namespace injections {

inline ComputableInjection identity() {
  return ComputableInjection("identity", [](Index n) { return n; });
}
inline ComputableInjection doubling() {
  return ComputableInjection("double", [](Index n) { return checked_mul(n, 2); });
}
inline ComputableInjection squaring() {
  return ComputableInjection("square", [](Index n) { return checked_mul(n, n); });
}
inline ComputableInjection cubing() {
  return ComputableInjection("cube", [](Index n) { return checked_mul(checked_mul(n, n), n); });
}
/// n -> a*n + b with a >= 1.
inline ComputableInjection affine(Index a, Index b) {
  if (a < 1) throw ParameterError("affine injection needs a >= 1");
  return ComputableInjection("affine:" + std::to_string(a) + ":" + std::to_string(b),
                             [a, b](Index n) { return checked_add(checked_mul(a, n), b); });
}
inline ComputableInjection shift(Index k) {
  return ComputableInjection("shift:" + std::to_string(k),
                             [k](Index n) { return checked_add(n, k); });
}
/// n -> the n-th prime (0-based).
inline ComputableInjection primes() {
  return ComputableInjection("prime", [](Index n) { return detail::PrimeSieve::instance().nth(n); });
}

}  // namespace injections

// ---------------------------------------------------------------------------
// Library permutations

inline ComputablePermutation identity_permutation() {
  auto id = [](Index n) { return n; };
  return ComputablePermutation("identity", id, id);
}

/// 2k <-> 2k+1
inline ComputablePermutation swap_adjacent() {
  auto f = [](Index n) { return n ^ Index{1}; };
  return ComputablePermutation("swap", f, f);
}

inline ComputablePermutation invert(const ComputablePermutation& p) {
  return ComputablePermutation("invert:" + p.label(), p.inverse_map(), p.forward_map());
}

/// (outer ∘ inner)(x) = outer(inner(x))
inline ComputablePermutation compose(const ComputablePermutation& outer,
                                     const ComputablePermutation& inner) {
  return ComputablePermutation(
      "compose:" + outer.label() + "," + inner.label(),
      [o = outer.forward_map(), i = inner.forward_map()](Index x) { return o(i(x)); },
      [o = outer.inverse_map(), i = inner.inverse_map()](Index y) { return i(o(y)); });
}

namespace detail {

inline Index low_mask(unsigned bits) {
  return bits >= 64 ? ~Index{0} : (Index{1} << bits) - 1;
}

/// Inverse of an odd number modulo 2^64 (Newton iteration).
constexpr Index odd_inverse(Index a) {
  Index x = a;  // correct to 3 bits
  for (int i = 0; i < 5; ++i) x *= 2 - a * x;
  return x;
}

/// Keyed bijection on k-bit words built from odd multiplication, right
/// xorshift, and addition, each invertible modulo 2^k.
struct BlockCipher {
  static constexpr int kRounds = 3;

  static Index key(std::uint64_t seed, unsigned bits, int round, int part) {
    return prf_word(seed, (static_cast<Index>(bits) << 8) | (round << 2) | part);
  }

  static Index encrypt(std::uint64_t seed, unsigned bits, Index x) {
    if (bits == 0) return x;
    const Index mask = low_mask(bits);
    const unsigned sh = (bits + 1) / 2;
    for (int r = 0; r < kRounds; ++r) {
      x = (x * (key(seed, bits, r, 0) | 1)) & mask;
      x ^= x >> sh;
      x = (x + key(seed, bits, r, 1)) & mask;
    }
    return x;
  }

  static Index decrypt(std::uint64_t seed, unsigned bits, Index y) {
    if (bits == 0) return y;
    const Index mask = low_mask(bits);
    const unsigned sh = (bits + 1) / 2;
    for (int r = kRounds - 1; r >= 0; --r) {
      y = (y - key(seed, bits, r, 1)) & mask;
      Index x = y;
      for (Index t = y >> sh; t != 0; t >>= sh) x ^= t;
      y = x & mask;
      y = (y * odd_inverse(key(seed, bits, r, 0) | 1)) & mask;
    }
    return y;
  }
};

}  // namespace detail

/// Permutes each dyadic block [2^k, 2^(k+1)) within itself by a seeded keyed
/// bijection; 0 and 1 are fixed.
inline ComputablePermutation block_shuffle(Seed seed) {
  const std::uint64_t s = seed.value;
  auto apply = [s](Index x, bool forward) {
    if (x < 2) return x;
    const unsigned bits = static_cast<unsigned>(std::bit_width(x)) - 1;
    const Index base = Index{1} << bits;
    Index off = x - base;
    off = forward ? detail::BlockCipher::encrypt(s, bits, off)
                  : detail::BlockCipher::decrypt(s, bits, off);
    return base + off;
  };
  return ComputablePermutation(
      "blockshuffle:" + std::to_string(s), [apply](Index x) { return apply(x, true); },
      [apply](Index x) { return apply(x, false); });
}

// ---------------------------------------------------------------------------
// Rank/select over a sequence's members and non-members.

inline constexpr Index kDefaultWorkingHorizon = Index{1} << 40;
inline constexpr Index kDefaultScanHorizon = Index{1} << 28;

namespace detail {

class RankSelect {
 public:
  RankSelect(BitSequence s, Index working_horizon)
      : s_(std::move(s)),
        limit_(s_.has_counter() ? working_horizon
                                : std::min(working_horizon, kDefaultScanHorizon)) {}

  /// (is member, rank among its own class)
  std::pair<bool, Index> rank(Index x) {
    bool member = s_(x);
    if (s_.has_counter()) {
      Index c = s_.count_below(x);
      return {member, member ? c : x - c};
    }
    std::lock_guard lock(mu_);
    scan_to(x + 1);
    const auto& v = member ? members_ : nonmembers_;
    return {member, static_cast<Index>(std::lower_bound(v.begin(), v.end(), x) - v.begin())};
  }

  /// Position of the k-th (0-based) member or non-member.
  Index select(bool member, Index k) {
    if (s_.has_counter()) {
      auto cls = [&](Index n) { return member ? s_.count_below(n) : n - s_.count_below(n); };
      // least x with cls(x + 1) >= k + 1
      Index lo = 0, hi = 1, step = 1;
      while (cls(hi) < k + 1) {
        if (hi >= limit_) throw exhausted(member, k);
        lo = hi;
        step = step > limit_ ? limit_ : step * 2;
        hi = limit_ - lo < step ? limit_ : lo + step;
      }
      while (hi - lo > 1) {
        Index mid = lo + (hi - lo) / 2;
        if (cls(mid) >= k + 1) hi = mid;
        else lo = mid;
      }
      return hi - 1;
    }
    std::lock_guard lock(mu_);
    auto& v = member ? members_ : nonmembers_;
    while (v.size() <= k) {
      if (scanned_ >= limit_) throw exhausted(member, k);
      scan_to(std::min(limit_, scanned_ + 4096));
    }
    return v[k];
  }

 private:
  void scan_to(Index n) {
    for (; scanned_ < n; ++scanned_) (s_(scanned_) ? members_ : nonmembers_).push_back(scanned_);
  }

  InsufficientError exhausted(bool member, Index k) const {
    return InsufficientError("'" + s_.label() + "' has fewer than " + std::to_string(k + 1) +
                             (member ? " members" : " non-members") + " below working horizon " +
                             std::to_string(limit_));
  }

  BitSequence s_;
  Index limit_;
  std::mutex mu_;
  Index scanned_ = 0;
  std::vector<Index> members_, nonmembers_;
};

}  // namespace detail

/// Maps the k-th member of a to the k-th member of b and the k-th non-member
/// of a to the k-th non-member of b, so image_set(pi, a) = b.
inline ComputablePermutation orbit_permutation(const BitSequence& a, const BitSequence& b,
                                               Index working_horizon = kDefaultWorkingHorizon) {
  auto ra = std::make_shared<detail::RankSelect>(a, working_horizon);
  auto rb = std::make_shared<detail::RankSelect>(b, working_horizon);
  return ComputablePermutation(
      "orbit:" + a.label() + ":" + b.label(),
      [ra, rb](Index x) {
        auto [member, r] = ra->rank(x);
        return rb->select(member, r);
      },
      [ra, rb](Index y) {
        auto [member, r] = rb->rank(y);
        return ra->select(member, r);
      });
}

/// Permutation pi whose image of a has the prescribed lower/upper densities.
inline ComputablePermutation density_shift(const BitSequence& a, Rational lower, Rational upper,
                                           Index working_horizon = kDefaultWorkingHorizon) {
  return orbit_permutation(a, build_prescribed_density(lower, upper), working_horizon);
}

namespace detail {

/// Sequential assignment: for j = 0, 1, 2, ... set pi(j) = p(j) when j is not
/// a square and p(j) is still free, otherwise the least free value.
class InjectionAssignment {
 public:
  InjectionAssignment(ComputableInjection p, Index working_horizon)
      : p_(std::move(p)), limit_(working_horizon) {}

  Index forward(Index j) {
    std::lock_guard lock(mu_);
    while (values_.size() <= j) step();
    return values_[j];
  }

  Index inverse(Index v) {
    std::lock_guard lock(mu_);
    // v is assigned no later than the first square slot after least_free_ passes v.
    while (true) {
      auto it = owner_.find(v);
      if (it != owner_.end()) return it->second;
      step();
    }
  }

 private:
  void step() {
    const Index j = values_.size();
    if (j >= limit_)
      throw InsufficientError("injection-to-permutation assignment for '" + p_.label() +
                              "' passed working horizon " + std::to_string(limit_));
    Index v = least_free_;
    if (!is_square(j)) {
      Index candidate = p_(j);
      if (!owner_.contains(candidate)) v = candidate;
    }
    auto [it, fresh] = owner_.emplace(v, j);
    if (!fresh) throw IntegrityError("injection-to-permutation assigned a value twice");
    values_.push_back(v);
    while (owner_.contains(least_free_)) ++least_free_;
  }

  ComputableInjection p_;
  Index limit_;
  std::mutex mu_;
  std::vector<Index> values_;
  std::unordered_map<Index, Index> owner_;
  Index least_free_ = 0;
};

}  // namespace detail

inline ComputablePermutation injection_to_permutation(const ComputableInjection& p,
                                                      Index working_horizon = Index{1} << 27) {
  auto state = std::make_shared<detail::InjectionAssignment>(p, working_horizon);
  return ComputablePermutation(
      "inj2perm:" + p.label(), [state](Index j) { return state->forward(j); },
      [state](Index v) { return state->inverse(v); });
}

// ---------------------------------------------------------------------------
// Images and samples

/// pi(S): bit n is S(pi^-1(n)). Each evaluation checks pi(pi^-1(n)) = n.
inline BitSequence image_set(const ComputablePermutation& pi, const BitSequence& s) {
  return BitSequence(SequenceKind::derived, "image(" + pi.label() + "," + s.label() + ")",
                     [pi, e = s.evaluator()](Index n) {
                       Index pre = pi.inverse(n);
                       if (pi.forward(pre) != n)
                         throw IntegrityError("permutation '" + pi.label() +
                                              "' failed round trip at " + std::to_string(n));
                       return e(pre);
                     });
}

/// p^-1(S) = {n : p(n) ∈ S}, the subsequence S(p(0)), S(p(1)), ...
inline BitSequence sampled_subsequence(const ComputableInjection& p, const BitSequence& s) {
  return BitSequence(SequenceKind::derived, "sample(" + p.label() + "," + s.label() + ")",
                     [p, e = s.evaluator()](Index n) { return e(p(n)); });
}

inline BitSequence sampled_subsequence(const ComputablePermutation& pi, const BitSequence& s) {
  return BitSequence(SequenceKind::derived, "sample(" + pi.label() + "," + s.label() + ")",
                     [f = pi.forward_map(), e = s.evaluator()](Index n) { return e(f(n)); });
}

/// Forward/inverse round trip on [0, n). Throws IntegrityError on failure.
inline void check_round_trip(const ComputablePermutation& pi, Index n) {
  for (Index x = 0; x < n; ++x) {
    if (pi.inverse(pi.forward(x)) != x || pi.forward(pi.inverse(x)) != x)
      throw IntegrityError("permutation '" + pi.label() + "' failed round trip at " +
                           std::to_string(x));
  }
}

/// One-sided check for permutations whose forward images leave the 64-bit
/// range early: pi(pi^-1(x)) = x on [0, n).
inline void check_inverse_round_trip(const ComputablePermutation& pi, Index n) {
  for (Index x = 0; x < n; ++x)
    if (pi.forward(pi.inverse(x)) != x)
      throw IntegrityError("permutation '" + pi.label() + "' failed inverse round trip at " +
                           std::to_string(x));
}

struct TransferReport {
  Index horizon = 0;
  /// max over n of |count_pi(n) - count_p(n)|; the construction keeps it <= ceil(sqrt n).
  Index max_count_gap = 0;
  Rational max_abs_diff{0};
  Index worst_n = 0;
  /// max over n of |rho_n difference| / (2/sqrt n); strictly below 1 when the bound holds.
  double worst_ratio = 0.0;
};

/// Checks |rho_n(pi^-1(S)) - rho_n(p^-1(S))| < 2/sqrt(n) for 1 <= n <= horizon,
/// with pi = injection_to_permutation(p). A violation is an IntegrityError.
inline TransferReport verify_density_transfer(const ComputableInjection& p,
                                              const ComputablePermutation& pi,
                                              const BitSequence& s, Index horizon) {
  if (horizon < 4) throw ParameterError("density transfer check needs horizon >= 4");
  TransferReport r;
  r.horizon = horizon;
  Index cpi = 0, cp = 0;
  for (Index n = 1; n <= horizon; ++n) {
    cpi += s(pi(n - 1)) ? 1 : 0;
    cp += s(p(n - 1)) ? 1 : 0;
    Index gap = cpi > cp ? cpi - cp : cp - cpi;
    // gap/n < 2/sqrt(n)  <=>  gap^2 < 4n
    if (static_cast<unsigned __int128>(gap) * gap >= static_cast<unsigned __int128>(4) * n)
      throw IntegrityError("density transfer bound violated for '" + p.label() + "' on '" +
                           s.label() + "' at n = " + std::to_string(n) + " (gap " +
                           std::to_string(gap) + ")");
    double ratio = static_cast<double>(gap) * std::sqrt(static_cast<double>(n)) /
                   (2.0 * static_cast<double>(n));
    if (gap > r.max_count_gap) r.max_count_gap = gap;
    Rational diff(static_cast<std::int64_t>(gap), static_cast<std::int64_t>(n));
    if (diff > r.max_abs_diff) r.max_abs_diff = diff;
    if (ratio > r.worst_ratio) {
      r.worst_ratio = ratio;
      r.worst_n = n;
    }
  }
  return r;
}

inline TransferReport verify_density_transfer(const ComputableInjection& p, const BitSequence& s,
                                              Index horizon) {
  return verify_density_transfer(p, injection_to_permutation(p), s, horizon);
}

}  // namespace densitylab
