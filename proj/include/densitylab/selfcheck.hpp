#pragma once

// Invariant batteries for every module, run at small horizons.

#include "densitylab/generic_case.hpp"
#include "densitylab/stochastic.hpp"

#include <functional>
#include <ostream>
#include <string>
#include <vector>

namespace densitylab {

struct SelfcheckResult {
  std::string name;
  bool passed;
  std::string detail;
};

namespace detail {

inline void require(bool cond, const std::string& what) {
  if (!cond) throw IntegrityError(what);
}

inline std::vector<BitSequence> selfcheck_library() {
  return {evens(),          odds(),         squares(),           tower(),
          factorial_gaps(), all_ones(),     all_zeros(),         arithmetic(3, 0),
          arithmetic(5, 2), dyadic(0),      dyadic(3),           prng_sequence(Seed{42}),
          build_prescribed_density(Rational(1, 3), Rational(2, 3)),
          build_prescribed_density(Rational(1, 4), Rational(1, 4))};
}

inline std::vector<std::pair<std::string, std::function<void()>>> selfcheck_battery() {
  std::vector<std::pair<std::string, std::function<void()>>> checks;

  // seqcore
  checks.emplace_back("seqcore: prefixes extend and complement is an involution", [] {
    for (const auto& s : selfcheck_library()) {
      std::string p = prefix(s, 256);
      require(prefix(s, 255) == p.substr(0, 255), "prefix extension for " + s.label());
      require(prefix(complement(complement(s)), 256) == p, "double complement for " + s.label());
    }
  });
  checks.emplace_back("seqcore: intersect/union commutative and associative", [] {
    auto a = squares(), b = prng_sequence(Seed{1}), c = arithmetic(3, 1);
    for (Index n = 0; n < 4096; ++n) {
      require(intersect(a, b)(n) == intersect(b, a)(n), "intersect commutes");
      require(unite(a, b)(n) == unite(b, a)(n), "union commutes");
      require(intersect(intersect(a, b), c)(n) == intersect(a, intersect(b, c))(n),
              "intersect associates");
      require(unite(unite(a, b), c)(n) == unite(a, unite(b, c))(n), "union associates");
    }
  });
  checks.emplace_back("seqcore: arithmetic and dyadic discrepancy bounds", [] {
    for (Index m = 1; m <= 6; ++m)
      for (Index i = 0; i < m; ++i) {
        auto s = arithmetic(m, i);
        for (Index n = 1; n <= 2048; ++n) {
          Rational d = partial_density(s, n).value() - Rational(1, static_cast<std::int64_t>(m));
          require(abs(d) * static_cast<std::int64_t>(n) <= 1, "arithmetic bound");
        }
      }
    for (Index e = 0; e <= 6; ++e) {
      auto s = dyadic(e);
      for (Index n = 1; n <= 4096; ++n) {
        Rational d = partial_density(s, n).value() - Rational(1, std::int64_t{1} << (e + 1));
        require(abs(d) * static_cast<std::int64_t>(n) <= (std::int64_t{1} << (e + 1)),
                "dyadic bound");
      }
    }
  });

  // density
  checks.emplace_back("density: counters agree with brute-force bit counts", [] {
    for (const auto& s : selfcheck_library()) {
      Index c = 0;
      for (Index n = 1; n <= 2000; ++n) {
        c += s(n - 1) ? 1 : 0;
        require(partial_density(s, n).count == c, "count mismatch for " + s.label());
      }
    }
  });
  checks.emplace_back("density: complement sums to one, union subadditive", [] {
    auto a = prng_sequence(Seed{3}), b = squares();
    for (Index n = 1; n <= 1000; ++n) {
      require(partial_density(a, n).value() + partial_density(complement(a), n).value() == 1,
              "complement sum");
      require(partial_density(unite(a, b), n).value() <=
                  partial_density(a, n).value() + partial_density(b, n).value(),
              "subadditivity");
    }
  });
  checks.emplace_back("density: principal-function identity", [] {
    for (const auto& s : {squares(), evens(), build_prescribed_density(Rational(1, 3),
                                                                      Rational(2, 3))}) {
      for (const auto& cp : upper_density_checkpoints(s, 200))
        require(cp.density.value() * static_cast<std::int64_t>(cp.density.horizon) ==
                    static_cast<std::int64_t>(cp.n),
                "identity for " + s.label());
    }
  });

  // construct
  checks.emplace_back("construct: Beatty discrepancy below one", [] {
    auto s = build_prescribed_density(Rational(1, 4), Rational(1, 4));
    for (Index n = 1; n <= 4000; ++n) {
      Index c = partial_density(s, n).count;
      require(c == n / 4 || c == (n + 3) / 4, "floor/ceil count");
    }
  });
  checks.emplace_back("construct: oscillation reaches both targets", [] {
    auto sched = oscillation_schedule(Rational(1, 3), Rational(2, 3), 1 << 14);
    require(sched.boundaries.size() >= 6, "phases terminate");
    require(sched.growth_factor > 1, "phases grow");
  });

  // permute
  checks.emplace_back("permute: round trips on library permutations", [] {
    check_round_trip(block_shuffle(Seed{7}), 4096);
    check_round_trip(orbit_permutation(arithmetic(3, 0), squares()), 2048);
    check_round_trip(injection_to_permutation(injections::doubling()), 1024);
    check_inverse_round_trip(adversary_permutation(), 4096);
    check_round_trip(compose(swap_adjacent(), block_shuffle(Seed{2})), 4096);
  });
  checks.emplace_back("permute: injection-to-permutation density bound", [] {
    for (auto p : {injections::doubling(), injections::squaring(), injections::affine(3, 1)})
      for (const auto& s : {evens(), prng_sequence(Seed{42}), squares()})
        verify_density_transfer(p, s, 2000);
  });
  checks.emplace_back("permute: orbit image equals target; block counts preserved", [] {
    auto a = arithmetic(3, 0), b = squares();
    require(prefix(image_set(orbit_permutation(a, b), a), 1000) == prefix(b, 1000), "orbit");
    auto s = prng_sequence(Seed{9});
    auto img = image_set(block_shuffle(Seed{4}), s);
    for (Index k = 0; k <= 12; ++k)
      require(partial_density(img, Index{1} << k) == partial_density(s, Index{1} << k),
              "block boundary count");
  });
  checks.emplace_back("permute: sampling by a permutation equals the inverse image", [] {
    auto pi = block_shuffle(Seed{11});
    auto s = prng_sequence(Seed{5});
    require(prefix(sampled_subsequence(pi, s), 2048) == prefix(image_set(invert(pi), s), 2048),
            "sample/image duality");
  });

  // stochastic
  checks.emplace_back("stochastic: thinning factorization is exact", [] {
    auto rep = thinning_experiment(arithmetic(3, 0), Seed{42}, 20000, geometric_schedule(20000));
    for (const auto& row : rep.rows) require(row.factorization_holds, "factorization");
  });
  checks.emplace_back("stochastic: selection counts are consistent", [] {
    auto rep = select(rules::after_one(), prng_sequence(Seed{8}), 5000);
    require(rep.selected_ones <= rep.selected, "ones <= selected");
  });
  checks.emplace_back("stochastic: nested final set lies inside every level", [] {
    auto nc = nested_construction({Seed{1}, Seed{2}, Seed{3}}, 20000);
    for (const auto& level : nc.levels)
      for (Index n = 0; n < 20000; ++n)
        require(!nc.final_set(n) || level(n), "subset chain");
  });

  // genericcase
  checks.emplace_back("genericcase: budget monotonicity and pad invariance", [] {
    auto f = descriptions::slow(descriptions::total(evens()));
    for (Index n = 0; n < 500; ++n)
      for (Index t = 1; t < 20; ++t) {
        Verdict a = f(n, t), b = f(n, t + 5);
        require(a == Verdict::pending || a == b, "budget monotone");
      }
    for (Index c = 0; c < 200; ++c)
      for (Index x = 0; x <= 3; ++x)
        require(run(enumerate_program(encode_program(c, 0)), x, 50) ==
                    run(enumerate_program(encode_program(c, 7)), x, 50),
                "pad invariance");
  });
  checks.emplace_back("genericcase: census partitions the horizon", [] {
    auto r = triviality_census(5000, 100);
    require(r.halting + r.diverging + r.undecided == r.horizon, "census partition");
  });
  checks.emplace_back("genericcase: adversary preimages are padded copies", [] {
    auto pi = adversary_permutation();
    auto sim = simulate_adversary_allocation(4096);
    for (Index n = 0; n < 4096; ++n) {
      require(pi.inverse(n) == sim[n], "closed form matches greedy simulation");
      if (n != 0 && !(n & 1)) {
        Index e = static_cast<Index>(dyadic_class(n) - 1);
        require(cantor_unpair(pi.inverse(n)).first == cantor_unpair(e).first, "core equality");
      }
    }
  });
  checks.emplace_back("genericcase: decision procedure agrees with brute force", [] {
    auto psi = adversary_image_description(256);
    for (Index e = 0; e < 20; ++e) {
      bool truth = run(enumerate_program(e), 0, 256).status == RunStatus::halted;
      require(decide_from_generic(psi, e).bit == truth, "decide e=" + std::to_string(e));
    }
  });
  return checks;
}

}  // namespace detail

inline std::vector<SelfcheckResult> run_selfcheck(std::ostream* log = nullptr) {
  std::vector<SelfcheckResult> out;
  for (auto& [name, fn] : detail::selfcheck_battery()) {
    SelfcheckResult r{name, true, ""};
    try {
      fn();
    } catch (const std::exception& ex) {
      r.passed = false;
      r.detail = ex.what();
    }
    if (log) *log << (r.passed ? "[ok]   " : "[FAIL] ") << r.name
                  << (r.passed ? "" : ": " + r.detail) << '\n';
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace densitylab
