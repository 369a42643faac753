#pragma once

// Command-line front end. Exit codes: 0 success, 1 integrity/IO/resource
// failure, 2 usage error.

#include "densitylab/report.hpp"
#include "densitylab/selfcheck.hpp"
#include "densitylab/tokens.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#ifndef DENSITYLAB_VERSION
#define DENSITYLAB_VERSION "0.0.0"
#endif

namespace densitylab {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

namespace detail {

inline Rational parse_rational(const std::string& text) {
  TokenParser p(text);
  Rational r = p.rational();
  p.expect_end();
  return r;
}

/// "geometric:<ratio>" or "list:<n>,<n>,..."
inline std::vector<Index> parse_schedule(const std::string& text, Index to) {
  if (text.rfind("geometric", 0) == 0) {
    double ratio = 1.1;
    if (text.size() > 9) {
      if (text[9] != ':') throw ParameterError("bad schedule '" + text + "'");
      try {
        std::size_t used = 0;
        ratio = std::stod(text.substr(10), &used);
        if (used != text.size() - 10) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        throw ParameterError("bad geometric ratio in '" + text + "'");
      }
    }
    return geometric_schedule(to, ratio);
  }
  if (text.rfind("list:", 0) == 0) {
    auto pts = parse_number_list(text.substr(5));
    if (pts.empty() || pts.back() > to)
      throw ParameterError("schedule points must not exceed --to");
    return pts;
  }
  throw ParameterError("unknown schedule '" + text + "' (geometric[:<ratio>] or list:<n>,...)");
}

inline MonotoneSelectionRule parse_rule(const std::string& text) {
  if (text == "all") return rules::select_all();
  if (text == "after_one") return rules::after_one();
  if (text == "primes") return rules::primes();
  if (text.rfind("in:", 0) == 0) return rules::in_set(parse_set(text.substr(3)));
  throw ParameterError("unknown selection rule '" + text + "' (all | after_one | primes | in:<set>)");
}

/// State shared by every subcommand: where output goes and what the manifest
/// records.
struct Session {
  std::ostream& out;
  std::ostream& err;
  std::string command_line;
  CLI::App* root = nullptr;
  std::string started = utc_timestamp();
  std::vector<std::uint64_t> seeds;
  std::vector<std::uint64_t> horizons;

  /// CSV to `path`, or to stdout when empty. Files get a sibling manifest.
  void emit(const CsvTable& t, const std::string& path) {
    if (path.empty()) {
      write_csv(t, out);
      return;
    }
    emit_csv(t, path);
    std::string config = root ? root->config_to_str(true, false) : command_line;
    RunManifest m{command_line, digest_hex(config), seeds, horizons, started,
                  utc_timestamp(), {path}, DENSITYLAB_VERSION};
    m.write(path + ".manifest.json");
  }
};

inline CsvTable profile_table(const DensityProfile& p) {
  CsvTable t{{"checkpoint", "count", "density_exact_num", "density_exact_den", "density_float"}, {}};
  for (const auto& v : p.values) {
    Rational r = v.value();
    t.add({std::to_string(v.horizon), std::to_string(v.count), std::to_string(r.numerator()),
           std::to_string(r.denominator()), format_float(v.as_double())});
  }
  return t;
}

inline void note_limits(Session& s, const DensityProfile& p) {
  if (p.checkpoints.size() < 2) return;
  LimitEstimate e = estimate_limits(p);
  s.err << "# tail estimates: liminf ~ " << format_float(to_double(e.lower_est))
        << ", limsup ~ " << format_float(to_double(e.upper_est)) << '\n';
}

// ---------------------------------------------------------------------------

inline void add_density(CLI::App& app, Session& s) {
  auto* density = app.add_subcommand("density", "partial densities and principal functions");
  density->require_subcommand(1);

  struct ProfileOpts {
    std::string set, schedule = "geometric:1.1", tail = "1/2", csv;
    Index to = 0;
  };
  auto po = std::make_shared<ProfileOpts>();
  auto* profile = density->add_subcommand("profile", "exact partial densities on a schedule");
  profile->add_option("--set", po->set, "set token")->required();
  profile->add_option("--to", po->to, "largest checkpoint")->required();
  profile->add_option("--schedule", po->schedule, "geometric[:<ratio>] or list:<n>,...");
  profile->add_option("--tail", po->tail, "tail window fraction q for the limit estimates");
  profile->add_option("--csv", po->csv, "output file (stdout if omitted)");
  profile->callback([po, &s] {
    if (po->to < 1) throw ParameterError("--to must be >= 1");
    BitSequence set = parse_set(po->set);
    s.horizons = {po->to};
    DensityProfile p = density_profile(set, parse_schedule(po->schedule, po->to),
                                       parse_rational(po->tail));
    s.emit(profile_table(p), po->csv);
    note_limits(s, p);
  });

  struct PrincipalOpts {
    std::string set, csv;
    Index n = 0;
  };
  auto pp = std::make_shared<PrincipalOpts>();
  auto* principal = density->add_subcommand("principal", "principal function p_S(1..n)");
  principal->add_option("--set", pp->set, "set token")->required();
  principal->add_option("--n", pp->n, "largest n")->required();
  principal->add_option("--csv", pp->csv, "output file");
  principal->callback([pp, &s] {
    if (pp->n < 1) throw ParameterError("--n must be >= 1");
    BitSequence set = parse_set(pp->set);
    s.horizons = {pp->n};
    CsvTable t{{"n", "p", "count", "density_exact_num", "density_exact_den"}, {}};
    for (const auto& cp : upper_density_checkpoints(set, pp->n)) {
      Rational r = cp.density.value();
      t.add({std::to_string(cp.n), std::to_string(cp.density.horizon),
             std::to_string(cp.density.count), std::to_string(r.numerator()),
             std::to_string(r.denominator())});
    }
    s.emit(t, pp->csv);
  });

  struct FactorialOpts {
    std::string set, csv;
    Index n = 12;
  };
  auto fo = std::make_shared<FactorialOpts>();
  auto* factorial = density->add_subcommand("factorial", "empty blocks of [n!, (n+1)!)");
  factorial->add_option("--set", fo->set, "set token")->required();
  factorial->add_option("--n", fo->n, "largest n (<= 12)");
  factorial->add_option("--csv", fo->csv, "output file");
  factorial->callback([fo, &s] {
    BitSequence set = parse_set(fo->set);
    CsvTable t{{"n", "horizon", "count", "density_exact_num", "density_exact_den"}, {}};
    for (const auto& w : factorial_array_witnesses(set, fo->n)) {
      Rational r = w.density.value();
      t.add({std::to_string(w.n), std::to_string(w.density.horizon),
             std::to_string(w.density.count), std::to_string(r.numerator()),
             std::to_string(r.denominator())});
    }
    s.emit(t, fo->csv);
  });

  struct PartitionOpts {
    std::string set, csv;
    Index m = 2, to = 0;
  };
  auto pa = std::make_shared<PartitionOpts>();
  auto* partition = density->add_subcommand("partition", "density split over residues mod m");
  partition->add_option("--set", pa->set, "set token")->required();
  partition->add_option("--m", pa->m, "modulus (>= 2)");
  partition->add_option("--to", pa->to, "horizon")->required();
  partition->add_option("--csv", pa->csv, "output file");
  partition->callback([pa, &s] {
    BitSequence set = parse_set(pa->set);
    s.horizons = {pa->to};
    PartitionBound b = finite_partition_bound(set, pa->m, pa->to);
    CsvTable t{{"residue", "count", "density_exact_num", "density_exact_den", "density_float"}, {}};
    for (Index i = 0; i < b.modulus; ++i) {
      Rational r = b.residues[i].value();
      t.add({std::to_string(i), std::to_string(b.residues[i].count),
             std::to_string(r.numerator()), std::to_string(r.denominator()),
             format_float(b.residues[i].as_double())});
    }
    s.emit(t, pa->csv);
  });
}

inline void add_permute(CLI::App& app, Session& s) {
  auto* permute = app.add_subcommand("permute", "computable permutations");
  permute->require_subcommand(1);

  struct ShowOpts {
    std::string perm;
    Index n = 16;
  };
  auto so = std::make_shared<ShowOpts>();
  auto* show = permute->add_subcommand("show", "print pi(0..n-1) and check the round trip");
  show->add_option("--perm", so->perm, "permutation token")->required();
  show->add_option("--n", so->n, "prefix length");
  show->callback([so, &s] {
    ComputablePermutation pi = parse_permutation(so->perm);
    check_round_trip(pi, so->n);
    CsvTable t{{"n", "forward", "inverse"}, {}};
    for (Index x = 0; x < so->n; ++x)
      t.add({std::to_string(x), std::to_string(pi.forward(x)), std::to_string(pi.inverse(x))});
    s.emit(t, "");
  });

  struct ApplyOpts {
    std::string perm, set, schedule = "geometric:1.1", csv;
    Index to = 0;
  };
  auto ao = std::make_shared<ApplyOpts>();
  auto* apply = permute->add_subcommand("apply", "density profile of pi(S)");
  apply->add_option("--perm", ao->perm, "permutation token")->required();
  apply->add_option("--set", ao->set, "set token")->required();
  apply->add_option("--to", ao->to, "largest checkpoint")->required();
  apply->add_option("--schedule", ao->schedule, "geometric[:<ratio>] or list:<n>,...");
  apply->add_option("--csv", ao->csv, "output file");
  apply->callback([ao, &s] {
    if (ao->to < 1) throw ParameterError("--to must be >= 1");
    BitSequence img = image_set(parse_permutation(ao->perm), parse_set(ao->set));
    s.horizons = {ao->to};
    DensityProfile p = density_profile(img, parse_schedule(ao->schedule, ao->to));
    s.emit(profile_table(p), ao->csv);
    note_limits(s, p);
  });

  struct VerifyOpts {
    std::string injection, sets, csv;
    Index to = 10000;
  };
  auto vo = std::make_shared<VerifyOpts>();
  auto* verify = permute->add_subcommand(
      "verify", "check the 2/sqrt(n) transfer bound for inj2perm; exit 1 on violation");
  verify->add_option("--injection", vo->injection, "injection token")->required();
  verify->add_option("--set", vo->sets, "set token, or several separated by ';'")->required();
  verify->add_option("--to", vo->to, "horizon (>= 4)");
  verify->add_option("--csv", vo->csv, "output file");
  verify->callback([vo, &s] {
    ComputableInjection p = parse_injection(vo->injection);
    ComputablePermutation pi = injection_to_permutation(p);
    s.horizons = {vo->to};
    CsvTable t{{"injection", "set", "horizon", "max_count_gap", "max_abs_diff_num",
                "max_abs_diff_den", "worst_n", "worst_ratio"},
               {}};
    std::stringstream list(vo->sets);
    std::string token;
    while (std::getline(list, token, ';')) {
      TransferReport r = verify_density_transfer(p, pi, parse_set(token), vo->to);
      t.add({p.label(), token, std::to_string(r.horizon), std::to_string(r.max_count_gap),
             std::to_string(r.max_abs_diff.numerator()),
             std::to_string(r.max_abs_diff.denominator()), std::to_string(r.worst_n),
             format_float(r.worst_ratio)});
    }
    s.emit(t, vo->csv);
  });
}

inline void add_experiment(CLI::App& app, Session& s) {
  auto* exp = app.add_subcommand("experiment", "stochasticity experiments on PRNG surrogates");
  exp->require_subcommand(1);

  struct ThinOpts {
    std::string set, csv;
    std::uint64_t seed = 42;
    Index to = 1000000;
  };
  auto to = std::make_shared<ThinOpts>();
  auto* thin = exp->add_subcommand("thinning", "rho(A ∩ B) against rho(A) * bias(B)");
  thin->add_option("--set", to->set, "set token for A")->required();
  thin->add_option("--seed", to->seed, "seed for B")->envname("DENSITYLAB_SEED");
  thin->add_option("--to", to->to, "horizon (>= 1000)");
  thin->add_option("--csv", to->csv, "output file");
  thin->callback([to, &s] {
    s.seeds = {to->seed};
    s.horizons = {to->to};
    ThinningReport r = thinning_experiment(parse_set(to->set), Seed{to->seed}, to->to,
                                           geometric_schedule(to->to));
    CsvTable t{{"checkpoint", "a_count", "ab_count", "ab_density_num", "ab_density_den",
                "ab_density_float", "bias_num", "bias_den", "factorization_holds"},
               {}};
    bool all_hold = true;
    for (const auto& row : r.rows) {
      Rational ab = row.a_and_b.value();
      t.add({std::to_string(row.n), std::to_string(row.a.count), std::to_string(row.a_and_b.count),
             std::to_string(ab.numerator()), std::to_string(ab.denominator()),
             format_float(row.a_and_b.as_double()),
             row.bias ? std::to_string(row.bias->numerator()) : "",
             row.bias ? std::to_string(row.bias->denominator()) : "",
             row.factorization_holds ? "1" : "0"});
      all_hold = all_hold && row.factorization_holds;
    }
    s.emit(t, to->csv);
    if (!all_hold) throw IntegrityError("thinning factorization failed at some checkpoint");
  });

  struct InterOpts {
    std::string seeds = "1,2,3", csv;
    Index k = 0, to = 1000000;
  };
  auto io = std::make_shared<InterOpts>();
  auto* inter = exp->add_subcommand("intersect", "density of a k-fold PRNG intersection");
  inter->add_option("--k", io->k, "number of sets (defaults to the number of seeds)");
  inter->add_option("--seeds", io->seeds, "comma-separated distinct seeds");
  inter->add_option("--to", io->to, "horizon");
  inter->add_option("--csv", io->csv, "output file");
  inter->callback([io, &s] {
    std::vector<Seed> seeds = parse_seed_list(io->seeds);
    if (io->k != 0 && io->k != seeds.size())
      throw ParameterError("--k must match the number of --seeds");
    for (Seed x : seeds) s.seeds.push_back(x.value);
    s.horizons = {io->to};
    IntersectionReport r = mutual_intersection_experiment(seeds, io->to);
    CsvTable t{{"k", "horizon", "count", "density_exact_num", "density_exact_den",
                "density_float", "target_num", "target_den", "deviation"},
               {}};
    Rational d = r.density.value();
    t.add({std::to_string(r.k), std::to_string(r.horizon), std::to_string(r.density.count),
           std::to_string(d.numerator()), std::to_string(d.denominator()),
           format_float(r.density.as_double()), std::to_string(r.target.numerator()),
           std::to_string(r.target.denominator()), format_float(r.deviation)});
    s.emit(t, io->csv);
  });

  struct NestOpts {
    std::string seeds, csv;
    Index levels = 0, to = 1000000;
  };
  auto no = std::make_shared<NestOpts>();
  auto* nest = exp->add_subcommand("nested", "nested intersections A_0 ⊇ A_1 ⊇ ... ⊇ A_J");
  nest->add_option("--levels", no->levels, "J (needs J+1 seeds)")->required();
  nest->add_option("--seeds", no->seeds, "comma-separated seeds")->required();
  nest->add_option("--to", no->to, "horizon");
  nest->add_option("--csv", no->csv, "output file");
  nest->callback([no, &s] {
    std::vector<Seed> seeds = parse_seed_list(no->seeds);
    if (seeds.size() != no->levels + 1)
      throw ParameterError("--levels J needs exactly J+1 seeds");
    for (Seed x : seeds) s.seeds.push_back(x.value);
    s.horizons = {no->to};
    NestedConstruction nc = nested_construction(seeds, no->to);
    for (std::size_t j = 0; j < nc.bounds.size(); ++j) {
      auto [lo, hi] = nc.interval(j);
      s.err << "# interval " << j << ": [" << lo << ", " << hi << ")\n";
    }
    s.emit(profile_table(nc.profile), no->csv);
    note_limits(s, nc.profile);
  });

  struct SelectOpts {
    std::string rule = "after_one", set, csv;
    Index to = 100000;
  };
  auto se = std::make_shared<SelectOpts>();
  auto* sel = exp->add_subcommand("select", "apply a monotone selection rule");
  sel->add_option("--rule", se->rule, "all | after_one | primes | in:<set>");
  sel->add_option("--set", se->set, "set token to select from")->required();
  sel->add_option("--to", se->to, "horizon");
  sel->add_option("--csv", se->csv, "output file");
  sel->callback([se, &s] {
    s.horizons = {se->to};
    SelectionReport r = select(parse_rule(se->rule), parse_set(se->set), se->to);
    CsvTable t{{"rule", "horizon", "selected", "selected_ones", "bias_num", "bias_den",
                "bias_float", "tolerance"},
               {}};
    t.add({r.rule, std::to_string(r.horizon), std::to_string(r.selected),
           std::to_string(r.selected_ones), r.bias ? std::to_string(r.bias->numerator()) : "",
           r.bias ? std::to_string(r.bias->denominator()) : "",
           r.bias ? format_float(to_double(*r.bias)) : "",
           r.selected ? format_float(bias_tolerance(r.selected)) : ""});
    s.emit(t, se->csv);
  });
}

inline void add_census(CLI::App& app, Session& s) {
  struct CensusOpts {
    std::string budgets = "1000", csv;
    Index horizon = 100000;
  };
  auto co = std::make_shared<CensusOpts>();
  auto* census = app.add_subcommand("census", "halting triviality census on input 0");
  census->add_option("--horizon", co->horizon, "number of program codes");
  census->add_option("--budget", co->budgets, "step budget, or a comma-separated list");
  census->add_option("--csv", co->csv, "output file");
  census->callback([co, &s] {
    std::vector<Index> budgets = parse_number_list(co->budgets);
    s.horizons = {co->horizon};
    CsvTable t{{"horizon", "budget", "halting", "diverging", "undecided", "decided_density_num",
                "decided_density_den"},
               {}};
    for (Index b : budgets) {
      CensusReport r = triviality_census(co->horizon, b);
      Rational d = r.decided_density();
      t.add({std::to_string(r.horizon), std::to_string(r.budget), std::to_string(r.halting),
             std::to_string(r.diverging), std::to_string(r.undecided),
             std::to_string(d.numerator()), std::to_string(d.denominator())});
    }
    s.emit(t, co->csv);
  });
}

inline void add_igc(CLI::App& app, Session& s) {
  auto* igc = app.add_subcommand("igc", "intrinsic generic-case harness");
  igc->require_subcommand(1);

  struct BatteryOpts {
    std::string description = "total", set, perms, mode = "weak", csv;
    Index to = 10000, budget = 1000;
  };
  auto bo = std::make_shared<BatteryOpts>();
  auto* battery = igc->add_subcommand("battery", "evaluate a description over a permutation battery");
  battery->add_option("--description", bo->description, "description token");
  battery->add_option("--set", bo->set, "set token")->required();
  battery->add_option("--perms", bo->perms, "comma-separated permutation tokens")->required();
  battery->add_option("--to", bo->to, "horizon");
  battery->add_option("--budget", bo->budget, "step budget");
  battery->add_option("--mode", bo->mode, "weak | uniform | oracle | strong")
      ->check(CLI::IsMember({"weak", "uniform", "oracle", "strong"}));
  battery->add_option("--csv", bo->csv, "output file");
  battery->callback([bo, &s] {
    BitSequence a = parse_set(bo->set);
    PartialDescription f = parse_description(bo->description, a);
    std::vector<ComputablePermutation> perms = parse_permutation_list(bo->perms);
    s.horizons = {bo->to};
    BatteryReport rep;
    if (bo->mode == "weak") {
      rep = permutation_battery(f, a, perms, bo->to, bo->budget);
    } else if (bo->mode == "strong") {
      rep = strong_mode(f, a, perms, bo->to, bo->budget);
    } else if (bo->mode == "uniform") {
      std::vector<IndexedPermutation> progs;
      for (std::size_t i = 0; i < perms.size(); ++i) progs.push_back({i, perms[i]});
      auto builder = [f, perms](Index e) { return describe_under_permutation(f, perms.at(e)); };
      rep = uniform_family_mode(builder, progs, a, bo->to, bo->budget);
    } else {
      auto functional = [f](std::shared_ptr<const PermutationOracle> o) {
        return PartialDescription{"oracle:" + f.label, [f, o](Index n, Index t) {
                                    return f(o->inverse(n), t);
                                  }};
      };
      rep = oracle_mode(functional, perms, a, bo->to, bo->budget);
    }
    CsvTable t{{"mode", "permutation", "domain_count", "domain_num", "domain_den", "domain_float",
                "consistent", "first_violation", "queries", "error"},
               {}};
    for (const auto& e : rep.entries) {
      Rational d = e.domain.value();
      t.add({rep.mode, e.permutation, std::to_string(e.domain.count),
             std::to_string(d.numerator()), std::to_string(d.denominator()),
             format_float(e.domain.as_double()), e.consistency.pass ? "1" : "0",
             e.consistency.first_violation ? std::to_string(*e.consistency.first_violation) : "",
             e.queries ? std::to_string(*e.queries) : "", e.error.value_or("")});
    }
    s.emit(t, bo->csv);
    s.err << "# " << rep.caveat << '\n';
  });

  struct DecideOpts {
    std::string e, budgets = "10,100,1000,10000", csv;
    Index steps = 256, holes = 3, width = 16;
  };
  auto dopt = std::make_shared<DecideOpts>();
  auto* decide = igc->add_subcommand(
      "decide", "decide bounded halting through the adversary permutation; exit 1 on mismatch");
  decide->add_option("--e", dopt->e, "program code, or a comma-separated list")->required();
  decide->add_option("--budgets", dopt->budgets, "comma-separated budget schedule");
  decide->add_option("--steps", dopt->steps, "halting step bound t of S_t");
  decide->add_option("--holes", dopt->holes, "divergent points per R_{e+1} of the test double");
  decide->add_option("--width", dopt->width, "search width per stage");
  decide->add_option("--csv", dopt->csv, "output file");
  decide->callback([dopt, &s] {
    DecideOptions opts{parse_number_list(dopt->budgets), dopt->width};
    PartialDescription psi = adversary_image_description(dopt->steps, dopt->holes);
    BitSequence truth = bounded_halting_set(dopt->steps);
    CsvTable t{{"e", "decided", "brute_force", "witness", "budget", "stage"}, {}};
    bool mismatch = false;
    for (Index e : parse_number_list(dopt->e)) {
      DecideResult r = decide_from_generic(psi, e, opts);
      bool expect = truth(e);
      mismatch = mismatch || r.bit != expect;
      t.add({std::to_string(e), r.bit ? "1" : "0", expect ? "1" : "0", std::to_string(r.witness),
             std::to_string(r.budget), std::to_string(r.stage)});
    }
    s.emit(t, dopt->csv);
    if (mismatch) throw IntegrityError("decision procedure disagreed with brute force");
  });
}

}  // namespace detail

/// Runs the CLI on argv-style arguments (args[0] is the program name).
inline int run_cli(const std::vector<std::string>& args, std::ostream& out = std::cout,
                   std::ostream& err = std::cerr) {
  CLI::App app{"densitylab: asymptotic and intrinsic density experiments", "densitylab"};
  app.set_version_flag("--version", DENSITYLAB_VERSION);
  app.set_config("--config", "", "key = value configuration file");
  app.require_subcommand(1);

  std::string command_line;
  for (std::size_t i = 0; i < args.size(); ++i) command_line += (i ? " " : "") + args[i];
  detail::Session session{out, err, command_line, &app, utc_timestamp(), {}, {}};

  detail::add_density(app, session);
  detail::add_permute(app, session);
  detail::add_experiment(app, session);
  detail::add_census(app, session);
  detail::add_igc(app, session);
  bool selfcheck_ok = true;
  app.add_subcommand("selfcheck", "run the invariant batteries of every module")
      ->callback([&] {
        for (const auto& r : run_selfcheck(&out)) selfcheck_ok = selfcheck_ok && r.passed;
      });

  std::vector<std::string> rev(args.rbegin(), args.rend());
  if (!rev.empty()) rev.pop_back();
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  } catch (const ParameterError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return selfcheck_ok ? kExitOk : kExitFailure;
}

inline int run_cli(int argc, char** argv) {
  return run_cli(std::vector<std::string>(argv, argv + argc));
}

}  // namespace densitylab
