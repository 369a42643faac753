#pragma once

// Generic-case computability over the naturals: budgeted partial
// descriptions, the four intrinsic evaluation modes (weak battery, uniform
// family, oracle functional, strong/permuted description), the halting
// triviality census, and the adversary permutation for index sets together
// with the decision procedure it enables.
//
// Every "for all computable permutations" quantifier is replaced here by a
// finite, declared battery. Reports say so.

#include "densitylab/machine.hpp"
#include "densitylab/permutation.hpp"

#include <atomic>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace densitylab {

enum class Verdict : std::uint8_t { zero, one, pending };

inline Verdict verdict_of(bool b) { return b ? Verdict::one : Verdict::zero; }

/// Budget-monotone three-valued evaluator: once evaluate(n, t) converges, it
/// converges to the same bit for every larger budget.
struct PartialDescription {
  std::string label;
  std::function<Verdict(Index n, Index budget)> evaluate;

  Verdict operator()(Index n, Index budget) const { return evaluate(n, budget); }
};

namespace descriptions {

inline PartialDescription total(const BitSequence& a) {
  return {"total:" + a.label(), [e = a.evaluator()](Index n, Index) { return verdict_of(e(n)); }};
}

/// Describes a, but never converges on members of d.
inline PartialDescription diverge_on(const BitSequence& a, const BitSequence& d) {
  return {"diverge:" + d.label() + ":" + a.label(),
          [ea = a.evaluator(), ed = d.evaluator()](Index n, Index) {
            return ed(n) ? Verdict::pending : verdict_of(ea(n));
          }};
}

inline PartialDescription pending() {
  return {"pending", [](Index, Index) { return Verdict::pending; }};
}

/// f, except that it answers `bit` at `index`.
inline PartialDescription lie_at(const PartialDescription& f, Index index, bool bit) {
  return {"lie:" + std::to_string(index) + ":" + f.label,
          [f, index, bit](Index n, Index t) { return n == index ? verdict_of(bit) : f(n, t); }};
}

/// f, withheld until the budget reaches cost(n).
inline PartialDescription with_cost(const PartialDescription& f, std::function<Index(Index)> cost,
                                    std::string cost_label) {
  return {"cost:" + cost_label + ":" + f.label,
          [f, cost = std::move(cost)](Index n, Index t) {
            return t < cost(n) ? Verdict::pending : f(n, t);
          }};
}

/// Converges once the budget covers the bit length of n.
inline PartialDescription slow(const PartialDescription& f) {
  return with_cost(f, [](Index n) { return static_cast<Index>(std::bit_width(n)) + 1; }, "bits");
}

}  // namespace descriptions

/// Fraction of n < horizon on which f converges within the budget: a lower
/// bound on the true domain density at this horizon, nondecreasing in budget.
inline PartialDensity domain_density(const PartialDescription& f, Index horizon, Index budget) {
  if (horizon < 1 || budget < 1) throw ParameterError("horizon and budget must be >= 1");
  Index c = 0;
  for (Index n = 0; n < horizon; ++n) c += f(n, budget) != Verdict::pending ? 1 : 0;
  return {c, horizon};
}

struct ConsistencyResult {
  bool pass = true;
  std::optional<Index> first_violation;
};

/// f(n) = a(n) wherever f(n) converges below the horizon.
inline ConsistencyResult consistency_check(const PartialDescription& f, const BitSequence& a,
                                           Index horizon, Index budget) {
  for (Index n = 0; n < horizon; ++n) {
    Verdict v = f(n, budget);
    if (v == Verdict::pending) continue;
    if ((v == Verdict::one) != a(n)) return {false, n};
  }
  return {};
}

/// f ∘ pi^-1, a description of pi(A) whenever f describes A.
inline PartialDescription describe_under_permutation(const PartialDescription& f,
                                                     const ComputablePermutation& pi) {
  return {"permuted:" + pi.label() + ":" + f.label,
          [f, inv = pi.inverse_map()](Index n, Index t) { return f(inv(n), t); }};
}

// ---------------------------------------------------------------------------
// Batteries

inline constexpr const char* kBatteryCaveat =
    "finite battery: results cover only the listed permutations and horizon, "
    "not every computable permutation";

struct BatteryEntry {
  std::string permutation;
  PartialDensity domain;
  ConsistencyResult consistency;
  std::optional<Index> queries;     // oracle mode only
  std::optional<std::string> error; // builder failure etc.
};

struct BatteryReport {
  std::string mode;
  std::vector<BatteryEntry> entries;
  std::string caveat = kBatteryCaveat;
};

namespace detail {

inline BatteryEntry evaluate_entry(const std::string& label, const PartialDescription& g,
                                   const BitSequence& target, Index horizon, Index budget) {
  return {label, domain_density(g, horizon, budget), consistency_check(g, target, horizon, budget),
          std::nullopt, std::nullopt};
}

}  // namespace detail

/// Weak mode: one description f, transported along each permutation.
inline BatteryReport permutation_battery(const PartialDescription& f, const BitSequence& a,
                                         const std::vector<ComputablePermutation>& perms,
                                         Index horizon, Index budget) {
  if (perms.empty()) throw ParameterError("permutation battery needs at least one permutation");
  BatteryReport rep{"weak", {}};
  for (const auto& pi : perms)
    rep.entries.push_back(detail::evaluate_entry(pi.label(), describe_under_permutation(f, pi),
                                                 image_set(pi, a), horizon, budget));
  return rep;
}

/// A permutation together with the program index that names it.
struct IndexedPermutation {
  Index index;
  ComputablePermutation perm;
};

/// Uniform mode: f_e is built from the permutation's index alone and must
/// describe pi_e(A) directly.
inline BatteryReport uniform_family_mode(
    const std::function<PartialDescription(Index)>& builder,
    const std::vector<IndexedPermutation>& programs, const BitSequence& a, Index horizon,
    Index budget) {
  BatteryReport rep{"uniform", {}};
  for (const auto& prog : programs) {
    std::string label = "#" + std::to_string(prog.index) + ":" + prog.perm.label();
    try {
      PartialDescription fe = builder(prog.index);
      rep.entries.push_back(
          detail::evaluate_entry(label, fe, image_set(prog.perm, a), horizon, budget));
    } catch (const std::exception& ex) {
      rep.entries.push_back({label, {0, std::max<Index>(horizon, 1)}, {false, std::nullopt},
                             std::nullopt, std::string(ex.what())});
    }
  }
  return rep;
}

/// Black-box access to a permutation: the functional sees only these two
/// queries, never an index or a label. Every call is counted.
class PermutationOracle {
 public:
  explicit PermutationOracle(ComputablePermutation pi) : pi_(std::move(pi)) {}

  Index forward(Index n) const {
    ++queries_;
    return pi_.forward(n);
  }
  Index inverse(Index n) const {
    ++queries_;
    return pi_.inverse(n);
  }
  Index queries() const { return queries_.load(); }

 private:
  ComputablePermutation pi_;
  mutable std::atomic<Index> queries_{0};
};

using OracleFunctional =
    std::function<PartialDescription(std::shared_ptr<const PermutationOracle>)>;

/// Oracle mode: Phi^pi is produced from oracle access only.
inline BatteryReport oracle_mode(const OracleFunctional& functional,
                                 const std::vector<ComputablePermutation>& perms,
                                 const BitSequence& a, Index horizon, Index budget) {
  BatteryReport rep{"oracle", {}};
  for (const auto& pi : perms) {
    auto oracle = std::make_shared<const PermutationOracle>(pi);
    PartialDescription g = functional(oracle);
    BitSequence target = image_set(pi, a);
    Index before = oracle->queries();
    BatteryEntry e;
    e.permutation = pi.label();
    e.domain = domain_density(g, horizon, budget);
    // Queries spent by one pass of the description over [0, horizon).
    e.queries = oracle->queries() - before;
    e.consistency = consistency_check(g, target, horizon, budget);
    rep.entries.push_back(std::move(e));
  }
  return rep;
}

/// Strong mode: one description f with pi-transport checked on each
/// permutation, i.e. the battery of f ∘ pi^-1.
inline BatteryReport strong_mode(const PartialDescription& f, const BitSequence& a,
                                 const std::vector<ComputablePermutation>& perms, Index horizon,
                                 Index budget) {
  BatteryReport rep = permutation_battery(f, a, perms, horizon, budget);
  rep.mode = "strong";
  return rep;
}

// ---------------------------------------------------------------------------
// Halting triviality census

struct CensusReport {
  Index horizon = 0;
  Index budget = 0;
  Index halting = 0;
  Index diverging = 0;
  Index undecided = 0;

  Rational decided_density() const {
    return Rational(static_cast<std::int64_t>(halting + diverging),
                    static_cast<std::int64_t>(horizon));
  }
  friend bool operator==(const CensusReport&, const CensusReport&) = default;
};

/// Classifies programs 0..horizon-1 on input 0. Results are cached per core,
/// which is invisible since the pad never affects a run.
inline CensusReport triviality_census(Index horizon, Index budget) {
  if (horizon < 1 || budget < 1) throw ParameterError("census horizon and budget must be >= 1");
  CensusReport r{horizon, budget, 0, 0, 0};
  std::unordered_map<Index, RunStatus> by_core;
  for (Index n = 0; n < horizon; ++n) {
    auto [core, pad] = cantor_unpair(n);
    auto it = by_core.find(core);
    if (it == by_core.end()) {
      ToyProgram prog{n, core, pad, decode_core(core)};
      it = by_core.emplace(core, run_with_loop_check(prog, 0, budget).status).first;
    }
    switch (it->second) {
      case RunStatus::halted: ++r.halting; break;
      case RunStatus::diverging: ++r.diverging; break;
      case RunStatus::pending: ++r.undecided; break;
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// Adversary permutation for index sets

/// Target class of n under the partition {0} ∪ R_0 ∪ R_1 ∪ ... with
/// R_e = {2^e m : m odd}: -1 for n = 0, otherwise e.
inline int dyadic_class(Index n) { return n == 0 ? -1 : std::countr_zero(n); }

/// pi^-1 sends the j-th element 2^(e+1)(2j+1) of R_{e+1} to x_{e,j+1}, a
/// padded copy of program e. Pad-0 codes are never demanded; they fill
/// {0} ∪ R_0 in increasing order. Both directions are closed-form because the
/// padding sequences of distinct codes never collide, which makes this the
/// outcome of the greedy least-unused allocation over increasing targets.
inline ComputablePermutation adversary_permutation() {
  auto inverse = [](Index n) -> Index {
    if (n == 0) return encode_program(0, 0);
    if (n & 1) return encode_program((n + 1) / 2, 0);
    const int cls = std::countr_zero(n);
    const Index e = static_cast<Index>(cls - 1);
    const Index j = (n >> cls) >> 1;
    return padding_enumeration(e, j + 1);
  };
  auto forward = [](Index x) -> Index {
    auto [core, pad] = cantor_unpair(x);
    if (pad == 0) return core == 0 ? 0 : checked_mul(core, 2) - 1;
    auto src = padding_source(x);
    auto [e, i] = *src;
    if (e + 1 >= 64)
      throw InsufficientError("adversary target for code " + std::to_string(x) +
                              " lies beyond the 64-bit index space");
    Index odd = checked_add(checked_mul(i - 1, 2), 1);
    if (std::bit_width(odd) + e + 1 > 64)
      throw InsufficientError("adversary target for code " + std::to_string(x) +
                              " lies beyond the 64-bit index space");
    return odd << (e + 1);
  };
  return ComputablePermutation("adversary", forward, inverse);
}

/// Reference simulation of the greedy allocation for targets n < limit:
/// targets in increasing order each take the least unused x_{e,i} with i >= 1,
/// and the never-demanded pad-0 codes fill {0} ∪ R_0 in increasing order.
/// Returns pi^-1 on [0, limit). Collisions raise IntegrityError.
inline std::vector<Index> simulate_adversary_allocation(Index limit) {
  std::vector<Index> pre(limit);
  std::unordered_set<Index> used;
  std::map<Index, Index> next_i;  // per e: least i >= 1 not yet tried
  Index waste_core = 0;
  for (Index n = 0; n < limit; ++n) {
    Index x;
    if (n == 0 || (n & 1)) {
      x = encode_program(waste_core++, 0);
    } else {
      const Index e = static_cast<Index>(std::countr_zero(n) - 1);
      Index& i = next_i.try_emplace(e, 1).first->second;
      while (used.contains(padding_enumeration(e, i))) ++i;
      x = padding_enumeration(e, i);
      ++i;
    }
    if (!used.insert(x).second)
      throw IntegrityError("adversary allocation collision at target " + std::to_string(n));
    pre[n] = x;
  }
  return pre;
}

// ---------------------------------------------------------------------------
// Bounded-behaviour index sets and the decision procedure

/// S_t = {codes whose core halts on input 0 within t steps}. Closed under
/// pad-equivalence, so an index set for this machine model.
inline BitSequence bounded_halting_set(Index steps) {
  auto cache = std::make_shared<std::pair<std::mutex, std::unordered_map<Index, bool>>>();
  return BitSequence(SequenceKind::derived, "halts-within:" + std::to_string(steps),
                     [cache, steps](Index code) {
                       Index core = cantor_unpair(code).first;
                       {
                         std::lock_guard lock(cache->first);
                         auto it = cache->second.find(core);
                         if (it != cache->second.end()) return it->second;
                       }
                       ToyProgram p{code, core, 0, decode_core(core)};
                       bool h = run(p, 0, steps).status == RunStatus::halted;
                       std::lock_guard lock(cache->first);
                       cache->second.emplace(core, h);
                       return h;
                     });
}

/// A consistent generic-case description of pi(S_t) for pi the adversary
/// permutation. It never converges on the first `holes` elements of each
/// R_{e+1} (a density-0 set meeting each R_{e+1} finitely), and elsewhere
/// converges once the budget covers the simulation it performs.
inline PartialDescription adversary_image_description(Index steps, Index holes = 3) {
  ComputablePermutation pi = adversary_permutation();
  return {"adversary-image:halts-within:" + std::to_string(steps),
          [inv = pi.inverse_map(), steps, holes](Index k, Index budget) {
            if (k != 0 && !(k & 1)) {
              const int cls = std::countr_zero(k);
              if (((k >> cls) >> 1) < holes) return Verdict::pending;
            }
            ToyProgram p = enumerate_program(inv(k));
            RunResult r = run(p, 0, steps);
            if (budget < r.steps) return Verdict::pending;
            return verdict_of(r.status == RunStatus::halted);
          }};
}

struct DecideOptions {
  std::vector<Index> budgets{10, 100, 1000, 10000};
  /// Stage s examines the first (s+1) * width elements of R_{e+1}.
  Index width = 16;
};

struct DecideResult {
  bool bit = false;
  Index witness = 0;  // k_e ∈ R_{e+1} on which psi converged
  Index budget = 0;
  std::size_t stage = 0;
};

/// Reads S(e) off a generic-case description psi of pi(S): searches
/// R_{e+1} with growing budgets until psi(k) converges, then
/// S(e) = S(pi^-1(k)) = psi(k) because pi^-1(k) is a padded copy of e.
inline DecideResult decide_from_generic(const PartialDescription& psi, Index e,
                                        const DecideOptions& opts = {}) {
  if (e + 1 >= 63) throw ParameterError("decide needs e <= 61 to stay in the index space");
  if (opts.budgets.empty()) throw ParameterError("decide needs a nonempty budget schedule");
  for (std::size_t s = 0; s < opts.budgets.size(); ++s) {
    const Index limit = (s + 1) * opts.width;
    for (Index j = 0; j < limit; ++j) {
      Index odd = 2 * j + 1;
      if (std::bit_width(odd) + e + 1 > 64) break;
      Index k = odd << (e + 1);
      Verdict v = psi(k, opts.budgets[s]);
      if (v != Verdict::pending) return {v == Verdict::one, k, opts.budgets[s], s};
    }
  }
  throw TimeoutError("description never converged on the searched part of R_" +
                     std::to_string(e + 1) + " within the budget schedule");
}

}  // namespace densitylab
