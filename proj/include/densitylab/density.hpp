#pragma once

// Exact partial densities, checkpoint profiles, tail-window limit estimates,
// and principal-function diagnostics for density 0.

#include "densitylab/bit_sequence.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

namespace densitylab {

/// rho_n(S) = |S ∩ [0,n)| / n, kept as an exact integer pair.
struct PartialDensity {
  Index count = 0;
  Index horizon = 1;

  Rational value() const {
    return Rational(static_cast<std::int64_t>(count), static_cast<std::int64_t>(horizon));
  }
  double as_double() const { return static_cast<double>(count) / static_cast<double>(horizon); }

  friend bool operator==(const PartialDensity&, const PartialDensity&) = default;
};

inline PartialDensity partial_density(const BitSequence& s, Index n) {
  if (n == 0) throw ParameterError("partial density rho_0 is undefined (n must be >= 1)");
  return {s.count_below(n), n};
}

struct DensityProfile {
  std::vector<Index> checkpoints;
  std::vector<PartialDensity> values;
  Rational tail_window{1, 2};
};

/// ceil(ratio^k) for k = 0, 1, ... up to `to`, deduplicated, always ending at `to`.
inline std::vector<Index> geometric_schedule(Index to, double ratio = 1.1) {
  if (to == 0) throw ParameterError("schedule horizon must be >= 1");
  if (!(ratio > 1.0)) throw ParameterError("geometric ratio must be > 1");
  std::vector<Index> out;
  double x = 1.0;
  while (true) {
    double c = std::ceil(x);
    if (c >= static_cast<double>(to)) break;
    Index v = static_cast<Index>(c);
    if (out.empty() || out.back() < v) out.push_back(v);
    x *= ratio;
  }
  if (out.empty() || out.back() < to) out.push_back(to);
  return out;
}

/// One incremental pass over the sequence, sampled at each checkpoint.
inline DensityProfile density_profile(const BitSequence& s, const std::vector<Index>& schedule,
                                      Rational tail_window = Rational(1, 2)) {
  if (schedule.empty()) throw ParameterError("density profile schedule is empty");
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    if (schedule[i] == 0) throw ParameterError("checkpoint 0 has no partial density");
    if (i > 0 && schedule[i] <= schedule[i - 1])
      throw ParameterError("density profile schedule must be strictly increasing");
  }
  if (tail_window <= 0 || tail_window > 1) throw ParameterError("tail window must lie in (0,1]");

  DensityProfile p;
  p.checkpoints = schedule;
  p.tail_window = tail_window;
  p.values.reserve(schedule.size());
  if (s.has_counter()) {
    for (Index n : schedule) p.values.push_back({s.count_below(n), n});
    return p;
  }
  Index pos = 0, count = 0;
  for (Index n : schedule) {
    for (; pos < n; ++pos) count += s(pos) ? 1 : 0;
    p.values.push_back({count, n});
  }
  return p;
}

/// Finite stand-ins for the lower and upper density. These are estimates
/// from a truncated profile, not limits.
struct LimitEstimate {
  Rational lower_est;
  Rational upper_est;
};

inline LimitEstimate estimate_limits(const DensityProfile& p) {
  if (p.values.size() < 2) throw ParameterError("limit estimation needs >= 2 checkpoints");
  const auto size = static_cast<std::int64_t>(p.values.size());
  // ceil(size * window)
  Rational want = p.tail_window * size;
  std::int64_t tail = want.numerator() / want.denominator();
  if (want.numerator() % want.denominator() != 0) ++tail;
  tail = std::clamp<std::int64_t>(tail, 1, size);

  LimitEstimate e{p.values[size - 1].value(), p.values[size - 1].value()};
  for (std::int64_t i = size - tail; i < size; ++i) {
    Rational v = p.values[i].value();
    e.lower_est = std::min(e.lower_est, v);
    e.upper_est = std::max(e.upper_est, v);
  }
  return e;
}

// ---------------------------------------------------------------------------
// Principal function p_S(n) = least x with |S ↾ x| >= n.

inline constexpr Index kDefaultSearchHorizon = Index{1} << 36;

struct PrincipalTable {
  std::vector<Index> entries;  // entries[n-1] = p_S(n)

  Index at(Index n) const {
    if (n == 0 || n > entries.size()) throw ParameterError("principal table index out of range");
    return entries[n - 1];
  }
  Index size() const { return entries.size(); }
};

inline PrincipalTable principal_function(const BitSequence& s, Index n_max,
                                         Index search_horizon = kDefaultSearchHorizon) {
  PrincipalTable t;
  t.entries.reserve(n_max);
  auto insufficient = [&] {
    return InsufficientError("'" + s.label() + "' has only " + std::to_string(t.entries.size()) +
                             " members below search horizon " + std::to_string(search_horizon) +
                             "; principal function computed up to n = " +
                             std::to_string(t.entries.size()));
  };

  if (s.has_counter()) {
    Index lo = 0;  // count_below(lo) < n for the next n
    for (Index n = 1; n <= n_max; ++n) {
      // Exponential probe then bisection for the least x with count_below(x) >= n.
      Index step = 1, hi = lo + 1;
      while (s.count_below(hi) < n) {
        if (hi >= search_horizon) throw insufficient();
        lo = hi;
        step = step > search_horizon ? search_horizon : step * 2;
        hi = search_horizon - lo < step ? search_horizon : lo + step;
      }
      while (hi - lo > 1) {
        Index mid = lo + (hi - lo) / 2;
        if (s.count_below(mid) >= n) hi = mid;
        else lo = mid;
      }
      t.entries.push_back(hi);
      lo = hi;
    }
    return t;
  }

  Index count = 0;
  for (Index x = 0; t.entries.size() < n_max; ++x) {
    if (x >= search_horizon) throw insufficient();
    if (s(x)) {
      ++count;
      t.entries.push_back(x + 1);
    }
  }
  return t;
}

struct PrincipalCheckpoint {
  Index n;
  PartialDensity density;  // at horizon p_S(n)
};

/// Pairs (n, rho_{p_S(n)}(S)); each satisfies rho * p_S(n) = n exactly.
inline std::vector<PrincipalCheckpoint> upper_density_checkpoints(
    const BitSequence& s, Index n_max, Index search_horizon = kDefaultSearchHorizon) {
  PrincipalTable t = principal_function(s, n_max, search_horizon);
  std::vector<PrincipalCheckpoint> out;
  out.reserve(n_max);
  for (Index n = 1; n <= n_max; ++n) {
    PartialDensity d = partial_density(s, t.at(n));
    if (d.count != n)
      throw IntegrityError("principal function identity failed at n = " + std::to_string(n));
    out.push_back({n, d});
  }
  return out;
}

struct DominationReport {
  Rational slope;
  /// Largest n <= horizon with p_S(n) <= slope * n.
  std::optional<Index> last_crossing;
  /// True when p_S(n) > slope * n for every n after last_crossing up to the horizon.
  bool dominated_in_tail = false;
};

/// Density 0 iff p_S grows faster than every linear function; this reports,
/// per slope, where p_S last dips under the line.
inline std::vector<DominationReport> linear_domination_check(
    const BitSequence& s, const std::vector<Rational>& slopes, Index horizon,
    Index search_horizon = kDefaultSearchHorizon) {
  for (const auto& k : slopes)
    if (k <= 0) throw ParameterError("domination slopes must be positive");
  PrincipalTable t = principal_function(s, horizon, search_horizon);
  std::vector<DominationReport> out;
  for (const auto& k : slopes) {
    DominationReport r{k, std::nullopt, false};
    for (Index n = 1; n <= horizon; ++n) {
      // p(n) <= k*n  <=>  p(n) * den <= num * n   (in 128-bit to avoid overflow)
      unsigned __int128 lhs = static_cast<unsigned __int128>(t.at(n)) *
                              static_cast<unsigned __int128>(k.denominator());
      unsigned __int128 rhs = static_cast<unsigned __int128>(k.numerator()) *
                              static_cast<unsigned __int128>(n);
      if (lhs <= rhs) r.last_crossing = n;
    }
    r.dominated_in_tail = !r.last_crossing || *r.last_crossing < horizon;
    out.push_back(r);
  }
  return out;
}

struct FactorialWitness {
  Index n;
  PartialDensity density;  // at horizon (n+1)!
};

/// Strong array D_n = [n!, (n+1)!): returns each n <= n_max with S ∩ D_n empty,
/// where necessarily rho_{(n+1)!}(S) <= 1/n.
inline std::vector<FactorialWitness> factorial_array_witnesses(const BitSequence& s, Index n_max) {
  if (n_max > 12) throw ParameterError("factorial array limited to n <= 12");
  std::vector<FactorialWitness> out;
  // D_1 = {1} only gives the vacuous bound rho <= 1, so the array starts at n = 2.
  Index lo = 2;  // n!
  for (Index n = 2; n <= n_max; ++n) {
    Index hi = lo * (n + 1);
    Index below_hi = s.count_below(hi);
    if (below_hi == s.count_below(lo)) {
      PartialDensity d{below_hi, hi};
      // rho <= 1/n  <=>  count * n <= (n+1)!
      if (d.count * n > hi)
        throw IntegrityError("factorial witness bound violated at n = " + std::to_string(n));
      out.push_back({n, d});
    }
    lo = hi;
  }
  return out;
}

struct PartitionBound {
  Index modulus;
  std::vector<PartialDensity> residues;  // rho_h(S ∩ {km + i})
  PartialDensity total;
  Index max_residue = 0;
};

/// Splits rho_h(S) over the residue classes mod m. An r-cohesive set can load
/// at most one class, so its upper density is at most 1/m.
inline PartitionBound finite_partition_bound(const BitSequence& s, Index m, Index horizon) {
  if (m < 2) throw ParameterError("partition modulus must be >= 2");
  if (horizon == 0) throw ParameterError("partition horizon must be >= 1");
  PartitionBound b{m, std::vector<PartialDensity>(m, PartialDensity{0, horizon}), {0, horizon}, 0};
  for (Index k = 0; k < horizon; ++k) {
    if (s(k)) {
      ++b.residues[k % m].count;
      ++b.total.count;
    }
  }
  for (Index i = 1; i < m; ++i)
    if (b.residues[i].count > b.residues[b.max_residue].count) b.max_residue = i;
  return b;
}

}  // namespace densitylab
