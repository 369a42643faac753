#pragma once

// Computable sets with prescribed rational lower and upper densities.

#include "densitylab/bit_sequence.hpp"

#include <algorithm>
#include <iterator>
#include <memory>
#include <mutex>
#include <vector>

namespace densitylab {

namespace detail {

/// Target-driven oscillator: runs of ones until the partial density reaches
/// the upper target, then runs of zeros until it falls to the lower target.
/// A target of exactly 0 or 1 is unreachable in finite time, so those ends
/// are approached through the shrinking margins upper/(c+2) and
/// 1 - (1-lower)/(c+2), where c counts completed cycles.
class Oscillator {
 public:
  Oscillator(Rational lower, Rational upper) : lower_(lower), upper_(upper) {}

  /// Emits bit n given the number of ones before n; returns the bit and
  /// whether a phase switch happened right after it.
  std::pair<bool, bool> step(Index n, Index count) {
    bool bit = rising_;
    Index after = count + (bit ? 1 : 0);
    Rational rho(static_cast<std::int64_t>(after), static_cast<std::int64_t>(n + 1));
    bool switched = false;
    if (rising_ && rho >= up_target()) {
      rising_ = false;
      switched = true;
    } else if (!rising_ && rho <= down_target()) {
      rising_ = true;
      ++cycle_;
      switched = true;
    }
    return {bit, switched};
  }

  bool rising() const { return rising_; }
  Rational up_target() const {
    return upper_ < 1 ? upper_ : Rational(1) - (Rational(1) - lower_) * margin();
  }
  Rational down_target() const { return lower_ > 0 ? lower_ : upper_ * margin(); }

 private:
  Rational margin() const { return Rational(1, static_cast<std::int64_t>(cycle_) + 2); }

  Rational lower_, upper_;
  bool rising_ = true;
  Index cycle_ = 0;
};

/// The oscillator as a list of runs. Each run's length has a closed form, so
/// bit n and |S ↾ n| cost O(log n) for any n < 2^64.
class OscillatorRuns {
 public:
  OscillatorRuns(Rational lower, Rational upper) : osc_(lower, upper) {}

  bool bit(Index n) {
    std::lock_guard lock(mu_);
    return run_of(n).rising;
  }

  Index count_below(Index n) {
    std::lock_guard lock(mu_);
    if (n == 0) return 0;
    const Run& r = run_of(n - 1);
    return r.count + (r.rising ? n - r.start : 0);
  }

 private:
  struct Run {
    Index start;
    Index count;  // ones before start
    bool rising;
  };

  const Run& run_of(Index n) {
    while (end_ <= n) extend();
    auto it = std::upper_bound(runs_.begin(), runs_.end(), n,
                               [](Index v, const Run& r) { return v < r.start; });
    return *std::prev(it);
  }

  void extend() {
    using i128 = __int128;
    const bool rising = osc_.rising();
    const Rational t = rising ? osc_.up_target() : osc_.down_target();
    const i128 p = t.numerator(), q = t.denominator();
    const i128 n0 = end_, c0 = count_;
    // rising: (c0+k)/(n0+k) >= p/q;  falling: c0/(n0+k) <= p/q
    i128 num = rising ? p * n0 - q * c0 : q * c0 - p * n0;
    i128 den = rising ? q - p : p;
    i128 k = num <= 0 ? 1 : (num + den - 1) / den;
    if (k < 1) k = 1;
    runs_.push_back({end_, count_, rising});
    const i128 stop = n0 + k;
    if (stop > static_cast<i128>(kIndexMax)) {
      end_ = kIndexMax;
      return;
    }
    end_ = static_cast<Index>(stop);
    if (rising) count_ += static_cast<Index>(k);
    // Replay the final bit through the oscillator so its phase state advances.
    auto [bit, switched] = osc_.step(end_ - 1, count_ - (rising ? 1 : 0));
    if (!switched || bit != rising) throw IntegrityError("oscillator run length mismatch");
  }

  std::mutex mu_;
  Oscillator osc_;
  std::vector<Run> runs_;
  Index end_ = 0;
  Index count_ = 0;
};

inline void check_targets(Rational lower, Rational upper) {
  if (lower < 0 || upper > 1 || lower > upper)
    throw ParameterError("prescribed densities need 0 <= lower <= upper <= 1, got " +
                         to_string(lower) + " and " + to_string(upper));
}

}  // namespace detail

/// bit(n) = floor((n+1)d) - floor(nd); |S ↾ n| = floor(nd) exactly.
inline BitSequence beatty_sequence(Rational d) {
  if (d < 0 || d > 1) throw ParameterError("Beatty density must lie in [0,1]");
  using u128 = unsigned __int128;
  const auto p = static_cast<u128>(d.numerator());
  const auto q = static_cast<u128>(d.denominator());
  auto count = [p, q](Index n) { return static_cast<Index>(static_cast<u128>(n) * p / q); };
  return BitSequence(
      SequenceKind::closed_form, "beatty:" + to_string(d),
      [count](Index n) { return count(n + 1) != count(n); }, d, count);
}

inline BitSequence build_prescribed_density(Rational lower, Rational upper) {
  detail::check_targets(lower, upper);
  const std::string label = "prescribed:" + to_string(lower) + ":" + to_string(upper);
  if (lower == upper) {
    if (lower == 0) return squares().relabeled(label);
    if (lower == 1) return complement(squares()).relabeled(label);
    return beatty_sequence(lower).relabeled(label);
  }
  auto runs = std::make_shared<detail::OscillatorRuns>(lower, upper);
  return BitSequence(
      SequenceKind::derived, label, [runs](Index n) { return runs->bit(n); }, std::nullopt,
      [runs](Index n) { return runs->count_below(n); });
}

/// Phase structure of the oscillating construction up to a horizon.
struct OscillationSchedule {
  std::vector<Index> boundaries;  // n at which a phase ended (rho_n hit its target)
  std::vector<Rational> targets;  // the target hit at each boundary; alternates up/down
  Rational growth_factor{0};      // min ratio between consecutive same-direction boundaries
};

inline OscillationSchedule oscillation_schedule(Rational lower, Rational upper, Index horizon) {
  detail::check_targets(lower, upper);
  if (lower == upper) throw ParameterError("constant-density targets do not oscillate");
  detail::Oscillator osc(lower, upper);
  OscillationSchedule sched;
  Index count = 0;
  for (Index n = 0; n < horizon; ++n) {
    Rational target = osc.rising() ? osc.up_target() : osc.down_target();
    auto [bit, switched] = osc.step(n, count);
    count += bit ? 1 : 0;
    if (switched) {
      sched.boundaries.push_back(n + 1);
      sched.targets.push_back(target);
    }
  }
  for (std::size_t i = 2; i < sched.boundaries.size(); ++i) {
    Rational r(static_cast<std::int64_t>(sched.boundaries[i]),
               static_cast<std::int64_t>(sched.boundaries[i - 2]));
    if (sched.growth_factor == 0 || r < sched.growth_factor) sched.growth_factor = r;
  }
  return sched;
}

}  // namespace densitylab
