#pragma once

// Monotone selection rules, bias measurement, and the density laws for
// pseudo-random surrogates: thinning, k-fold intersection, and the nested
// construction of an infinite, non-hyperimmune set with density tending to 0.
//
// All "random" inputs here are seeded PRNG surrogates. Reports are finite
// evidence; see kSurrogateDisclaimer.

#include "densitylab/density.hpp"
#include "densitylab/primes.hpp"

#include <cmath>
#include <functional>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace densitylab {

/// Decides from the bits observed so far (positions 0..n-1) whether position
/// n is selected. The rule never sees bit n before deciding.
struct MonotoneSelectionRule {
  std::string label;
  std::function<bool(std::span<const std::uint8_t> observed)> decide;
};

namespace rules {

inline MonotoneSelectionRule select_all() {
  return {"all", [](std::span<const std::uint8_t>) { return true; }};
}

/// Select n iff bit n-1 was a one.
inline MonotoneSelectionRule after_one() {
  return {"after-one",
          [](std::span<const std::uint8_t> seen) { return !seen.empty() && seen.back() != 0; }};
}

/// Select n iff pred(n); ignores the observed bits.
inline MonotoneSelectionRule oblivious(std::string label, std::function<bool(Index)> pred) {
  return {std::move(label), [pred = std::move(pred)](std::span<const std::uint8_t> seen) {
            return pred(seen.size());
          }};
}

inline MonotoneSelectionRule primes() {
  return oblivious("primes", [](Index n) { return detail::PrimeSieve::instance().is_prime(n); });
}

/// "If n ∈ A, select B(n)".
inline MonotoneSelectionRule in_set(const BitSequence& a) {
  return oblivious("in:" + a.label(), a.evaluator());
}

}  // namespace rules

struct SelectionReport {
  std::string rule;
  Index horizon = 0;
  Index selected = 0;
  Index selected_ones = 0;
  /// selected_ones / selected; empty when nothing was selected.
  std::optional<Rational> bias;
  bool zero_selection() const { return selected == 0; }
};

inline SelectionReport select(const MonotoneSelectionRule& rule, const BitSequence& s,
                              Index horizon) {
  if (horizon < 1) throw ParameterError("selection horizon must be >= 1");
  SelectionReport r{rule.label, horizon, 0, 0, std::nullopt};
  std::vector<std::uint8_t> seen;
  seen.reserve(horizon);
  for (Index n = 0; n < horizon; ++n) {
    bool take = rule.decide(std::span<const std::uint8_t>(seen));
    bool bit = s(n);
    if (take) {
      ++r.selected;
      r.selected_ones += bit ? 1 : 0;
    }
    seen.push_back(bit ? 1 : 0);
  }
  if (r.selected > 0)
    r.bias = Rational(static_cast<std::int64_t>(r.selected_ones),
                      static_cast<std::int64_t>(r.selected));
  return r;
}

/// Default battery tolerance: about four binomial standard deviations.
inline double bias_tolerance(Index selected) {
  return selected == 0 ? 1.0 : 4.0 / std::sqrt(static_cast<double>(selected));
}

// ---------------------------------------------------------------------------
// Thinning

struct ThinningRow {
  Index n;
  PartialDensity a;        // rho_n(A)
  PartialDensity a_and_b;  // rho_n(A ∩ B)
  /// Bias of B on the positions of A below n; empty when A ↾ n is empty.
  std::optional<Rational> bias;
  /// rho_n(A ∩ B) == rho_n(A) * bias, exactly.
  bool factorization_holds;
};

struct ThinningReport {
  Seed seed;
  Index horizon = 0;
  PartialDensity a;
  PartialDensity a_and_b;
  SelectionReport selection;  // rule "in A" applied to B
  /// rho_n(A ∩ B) / rho_n(A); equals the selection bias.
  std::optional<Rational> ratio;
  std::vector<ThinningRow> rows;
};

/// B = prng_sequence(seed). Scans once, recording a row at every checkpoint
/// (the horizon is always included).
inline ThinningReport thinning_experiment(const BitSequence& a, Seed seed, Index horizon,
                                          std::vector<Index> checkpoints = {}) {
  if (horizon < 1000) throw ParameterError("thinning experiment needs horizon >= 1000");
  for (std::size_t i = 1; i < checkpoints.size(); ++i)
    if (checkpoints[i] <= checkpoints[i - 1])
      throw ParameterError("thinning checkpoints must be strictly increasing");
  if (checkpoints.empty() || checkpoints.back() < horizon) checkpoints.push_back(horizon);

  const BitSequence b = prng_sequence(seed);
  ThinningReport rep;
  rep.seed = seed;
  rep.horizon = horizon;
  Index ca = 0, cab = 0, pos = 0;
  for (Index cp : checkpoints) {
    if (cp == 0 || cp > horizon) throw ParameterError("thinning checkpoint out of range");
    for (; pos < cp; ++pos) {
      if (a(pos)) {
        ++ca;
        cab += b(pos) ? 1 : 0;
      }
    }
    ThinningRow row{cp, {ca, cp}, {cab, cp}, std::nullopt, true};
    if (ca > 0) {
      row.bias = Rational(static_cast<std::int64_t>(cab), static_cast<std::int64_t>(ca));
      row.factorization_holds = row.a_and_b.value() == row.a.value() * *row.bias;
    } else {
      row.factorization_holds = cab == 0;
    }
    rep.rows.push_back(row);
  }
  rep.a = rep.rows.back().a;
  rep.a_and_b = rep.rows.back().a_and_b;
  rep.selection = select(rules::in_set(a), b, horizon);
  if (rep.a.count > 0) rep.ratio = rep.a_and_b.value() / rep.a.value();
  return rep;
}

// ---------------------------------------------------------------------------
// k-fold intersection

struct IntersectionReport {
  Index k = 0;
  Index horizon = 0;
  PartialDensity density;
  Rational target;  // 2^-k
  double deviation = 0.0;
};

inline IntersectionReport mutual_intersection_experiment(const std::vector<BitSequence>& sets,
                                                         Index horizon) {
  if (sets.empty()) throw ParameterError("intersection experiment needs k >= 1");
  if (sets.size() > 62) throw ParameterError("intersection experiment supports k <= 62");
  if (horizon < 1) throw ParameterError("intersection horizon must be >= 1");
  IntersectionReport r;
  r.k = sets.size();
  r.horizon = horizon;
  r.target = Rational(1, std::int64_t{1} << r.k);
  Index c = 0;
  for (Index n = 0; n < horizon; ++n) {
    bool in = true;
    for (const auto& s : sets) {
      if (!s(n)) {
        in = false;
        break;
      }
    }
    c += in ? 1 : 0;
  }
  r.density = {c, horizon};
  r.deviation = std::abs(r.density.as_double() - to_double(r.target));
  return r;
}

inline IntersectionReport mutual_intersection_experiment(const std::vector<Seed>& seeds,
                                                         Index horizon) {
  std::set<std::uint64_t> distinct;
  for (Seed s : seeds) distinct.insert(s.value);
  if (distinct.size() != seeds.size())
    throw ParameterError("intersection seeds must be distinct");
  std::vector<BitSequence> sets;
  for (Seed s : seeds) sets.push_back(prng_sequence(s));
  return mutual_intersection_experiment(sets, horizon);
}

// ---------------------------------------------------------------------------
// Nested construction

struct NestedConstruction {
  std::vector<Seed> seeds;
  /// bounds[j] = k_j; interval j is [k_{j-1}, k_j) with k_{-1} = 0.
  std::vector<Index> bounds;
  /// level(j) = A_j; final_set = A_J.
  std::vector<BitSequence> levels;
  BitSequence final_set;
  DensityProfile profile;

  std::pair<Index, Index> interval(std::size_t j) const {
    return {j == 0 ? 0 : bounds[j - 1], bounds[j]};
  }
};

namespace detail {

/// A_j: n ∈ R_0, and n ∈ R_i for every 1 <= i <= j with n >= k_{i-1}.
inline BitSequence nested_level(const std::vector<BitSequence>& randoms,
                                const std::vector<Index>& bounds, std::size_t j) {
  std::vector<BitSequence> rs(randoms.begin(), randoms.begin() + j + 1);
  std::vector<Index> ks(bounds.begin(), bounds.begin() + j);
  return BitSequence(SequenceKind::derived, "nested:A" + std::to_string(j),
                     [rs, ks](Index n) {
                       if (!rs[0](n)) return false;
                       for (std::size_t i = 1; i < rs.size(); ++i)
                         if (n >= ks[i - 1] && !rs[i](n)) return false;
                       return true;
                     });
}

}  // namespace detail

/// A_0 = R_0, A_{j+1} = A_j ∩ ([0, k_j) ∪ R_{j+1}); k_j is the least bound
/// past k_{j-1} with A_j ∩ [k_{j-1}, k_j) nonempty, found by direct search.
inline NestedConstruction nested_construction(const std::vector<Seed>& seeds, Index horizon,
                                              std::vector<Index> schedule = {}) {
  if (seeds.size() < 2) throw ParameterError("nested construction needs J >= 1 (J+1 seeds)");
  if (horizon < 1) throw ParameterError("nested construction horizon must be >= 1");
  std::vector<BitSequence> randoms;
  for (Seed s : seeds) randoms.push_back(prng_sequence(s));

  NestedConstruction out{seeds, {}, {}, all_zeros(), {}};
  for (std::size_t j = 0; j < seeds.size(); ++j) {
    BitSequence level = detail::nested_level(randoms, out.bounds, j);
    Index start = out.bounds.empty() ? 0 : out.bounds.back();
    Index k = start;
    while (true) {
      if (k >= horizon)
        throw InsufficientError("nested construction search passed horizon " +
                                std::to_string(horizon) + "; last completed level j = " +
                                (j == 0 ? std::string("none") : std::to_string(j - 1)));
      if (level(k)) break;
      ++k;
    }
    out.bounds.push_back(k + 1);
    out.levels.push_back(level);
  }
  out.final_set = out.levels.back().relabeled("nested:final");
  if (schedule.empty()) schedule = geometric_schedule(horizon);
  out.profile = density_profile(out.final_set, schedule);
  return out;
}

}  // namespace densitylab
