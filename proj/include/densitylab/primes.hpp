#pragma once

#include "densitylab/core.hpp"

#include <algorithm>
#include <mutex>
#include <vector>

namespace densitylab::detail {

/// Growable sieve of Eratosthenes, shared process-wide. Doubles its range on
/// demand; queries are serialized.
class PrimeSieve {
 public:
  static PrimeSieve& instance() {
    static PrimeSieve sieve;
    return sieve;
  }

  bool is_prime(Index n) {
    std::lock_guard lock(mu_);
    grow_to(n + 1);
    return composite_.size() > n && !composite_[n] && n >= 2;
  }

  /// 0-based: nth(0) = 2.
  Index nth(Index k) {
    std::lock_guard lock(mu_);
    while (primes_.size() <= k) grow_to(std::max<Index>(limit_ * 2, 64));
    return primes_[k];
  }

 private:
  void grow_to(Index n) {
    if (n <= limit_) return;
    Index target = std::max<Index>(n, limit_ * 2);
    composite_.assign(target, false);
    primes_.clear();
    for (Index i = 2; i < target; ++i) {
      if (composite_[i]) continue;
      primes_.push_back(i);
      for (Index j = i * i; j < target; j += i) composite_[j] = true;
    }
    limit_ = target;
  }

  std::mutex mu_;
  std::vector<bool> composite_;
  std::vector<Index> primes_;
  Index limit_ = 0;
};

}  // namespace densitylab::detail
