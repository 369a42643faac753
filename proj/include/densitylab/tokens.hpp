#pragma once

// Text tokens naming sets, injections, permutations and descriptions.
//
//   set   := evens | odds | squares | tower | factorial_gaps | ones | zeros
//          | arithmetic:<m>:<i> | dyadic:<e> | prng:<seed> | beatty:<q>
//          | prescribed:<q>:<q> | complement:<set> | halts:<steps>
//   inj   := identity | double | square | cube | prime | affine:<a>:<b> | shift:<k>
//   perm  := identity | swap | adversary | blockshuffle:<seed>
//          | orbit:<set>:<set> | inj2perm:<inj> | compose:<perm>,<perm>
//          | invert:<perm> | densityshift:<set>:<q>:<q>
//   desc  := total | pending | slow | diverge:<set> | lie:<index>
//   q     := <int> | <int>/<int>
//
// Lists of permutations are comma separated; compose consumes exactly two.

#include "densitylab/generic_case.hpp"

#include <cctype>
#include <string>
#include <string_view>
#include <vector>

namespace densitylab {

inline constexpr const char* kTokenGrammar =
    "set   := evens | odds | squares | tower | factorial_gaps | ones | zeros\n"
    "       | arithmetic:<m>:<i> | dyadic:<e> | prng:<seed> | beatty:<q>\n"
    "       | prescribed:<q>:<q> | complement:<set> | halts:<steps>\n"
    "inj   := identity | double | square | cube | prime | affine:<a>:<b> | shift:<k>\n"
    "perm  := identity | swap | adversary | blockshuffle:<seed> | orbit:<set>:<set>\n"
    "       | inj2perm:<inj> | compose:<perm>,<perm> | invert:<perm>\n"
    "       | densityshift:<set>:<q>:<q>\n"
    "desc  := total | pending | slow | diverge:<set> | lie:<index>\n"
    "q     := <int> | <int>/<int>\n";

class TokenParser {
 public:
  explicit TokenParser(std::string_view text) : text_(text) {}

  BitSequence parse_set() {
    std::string name = word();
    if (name == "evens") return evens();
    if (name == "odds") return odds();
    if (name == "squares") return squares();
    if (name == "tower") return tower();
    if (name == "factorial_gaps") return factorial_gaps();
    if (name == "ones" || name == "all") return all_ones();
    if (name == "zeros" || name == "empty") return all_zeros();
    if (name == "arithmetic") {
      Index m = arg_number();
      Index i = arg_number();
      return arithmetic(m, i);
    }
    if (name == "dyadic") return dyadic(arg_number());
    if (name == "prng") return prng_sequence(Seed{arg_number()});
    if (name == "beatty") return beatty_sequence(arg_rational());
    if (name == "prescribed") {
      Rational lo = arg_rational();
      Rational hi = arg_rational();
      return build_prescribed_density(lo, hi);
    }
    if (name == "complement") {
      expect(':');
      return complement(parse_set());
    }
    if (name == "halts") return bounded_halting_set(arg_number());
    fail("unknown set '" + name + "'");
  }

  ComputableInjection parse_injection() {
    std::string name = word();
    if (name == "identity") return injections::identity();
    if (name == "double") return injections::doubling();
    if (name == "square") return injections::squaring();
    if (name == "cube") return injections::cubing();
    if (name == "prime") return injections::primes();
    if (name == "affine") {
      Index a = arg_number();
      Index b = arg_number();
      return injections::affine(a, b);
    }
    if (name == "shift") return injections::shift(arg_number());
    fail("unknown injection '" + name + "'");
  }

  ComputablePermutation parse_permutation() {
    std::string name = word();
    if (name == "identity") return identity_permutation();
    if (name == "swap") return swap_adjacent();
    if (name == "adversary") return adversary_permutation();
    if (name == "blockshuffle") return block_shuffle(Seed{arg_number()});
    if (name == "orbit") {
      expect(':');
      BitSequence a = parse_set();
      expect(':');
      BitSequence b = parse_set();
      return orbit_permutation(a, b);
    }
    if (name == "inj2perm") {
      expect(':');
      return injection_to_permutation(parse_injection());
    }
    if (name == "compose") {
      expect(':');
      ComputablePermutation outer = parse_permutation();
      expect(',');
      ComputablePermutation inner = parse_permutation();
      return compose(outer, inner);
    }
    if (name == "invert") {
      expect(':');
      return invert(parse_permutation());
    }
    if (name == "densityshift") {
      expect(':');
      BitSequence a = parse_set();
      Rational lo = arg_rational();
      Rational hi = arg_rational();
      return density_shift(a, lo, hi);
    }
    fail("unknown permutation '" + name + "'");
  }

  /// Description of `a`, degraded as the token says.
  PartialDescription parse_description(const BitSequence& a) {
    std::string name = word();
    if (name == "total") return descriptions::total(a);
    if (name == "pending") return descriptions::pending();
    if (name == "slow") return descriptions::slow(descriptions::total(a));
    if (name == "diverge") {
      expect(':');
      return descriptions::diverge_on(a, parse_set());
    }
    if (name == "lie") {
      Index at = arg_number();
      return descriptions::lie_at(descriptions::total(a), at, !a(at));
    }
    fail("unknown description '" + name + "'");
  }

  bool done() const { return pos_ == text_.size(); }

  void expect_end() {
    if (!done()) fail("unexpected trailing text");
  }

  bool accept(char c) {
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  Index number() {
    std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (start == pos_) fail("expected a number");
    try {
      return std::stoull(std::string(text_.substr(start, pos_ - start)));
    } catch (const std::exception&) {
      fail("number out of range");
    }
  }

  Rational rational() {
    Index num = number();
    Index den = accept('/') ? number() : 1;
    if (den == 0) fail("zero denominator");
    return Rational(static_cast<std::int64_t>(num), static_cast<std::int64_t>(den));
  }

 private:
  std::string word() {
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    if (start == pos_) fail("expected a name");
    return std::string(text_.substr(start, pos_ - start));
  }

  Index arg_number() {
    expect(':');
    return number();
  }

  Rational arg_rational() {
    expect(':');
    return rational();
  }

  [[noreturn]] void fail(const std::string& why) const {
    throw ParameterError("bad token '" + std::string(text_) + "' at offset " +
                         std::to_string(pos_) + ": " + why + "\ngrammar:\n" + kTokenGrammar);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

inline BitSequence parse_set(std::string_view text) {
  TokenParser p(text);
  BitSequence s = p.parse_set();
  p.expect_end();
  return s;
}

inline ComputableInjection parse_injection(std::string_view text) {
  TokenParser p(text);
  ComputableInjection inj = p.parse_injection();
  p.expect_end();
  return inj;
}

inline ComputablePermutation parse_permutation(std::string_view text) {
  TokenParser p(text);
  ComputablePermutation pi = p.parse_permutation();
  p.expect_end();
  return pi;
}

inline std::vector<ComputablePermutation> parse_permutation_list(std::string_view text) {
  TokenParser p(text);
  std::vector<ComputablePermutation> out;
  out.push_back(p.parse_permutation());
  while (p.accept(',')) out.push_back(p.parse_permutation());
  p.expect_end();
  return out;
}

inline PartialDescription parse_description(std::string_view text, const BitSequence& a) {
  TokenParser p(text);
  PartialDescription f = p.parse_description(a);
  p.expect_end();
  return f;
}

/// "1,2,3" -> seeds
inline std::vector<Seed> parse_seed_list(std::string_view text) {
  TokenParser p(text);
  std::vector<Seed> out{Seed{p.number()}};
  while (p.accept(',')) out.push_back(Seed{p.number()});
  p.expect_end();
  return out;
}

inline std::vector<Index> parse_number_list(std::string_view text) {
  TokenParser p(text);
  std::vector<Index> out{p.number()};
  while (p.accept(',')) out.push_back(p.number());
  p.expect_end();
  return out;
}

}  // namespace densitylab
