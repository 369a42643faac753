#pragma once

// A small register machine with a canonical enumeration of its programs.
//
// Instructions: INC r | DECJZ r, label | HALT, over two unbounded registers.
// Input arrives in r0, output is read from r0. Running off the end halts.
//
// Program code n decodes as a Cantor pair (core, pad). The core index is a
// length-lex enumeration of instruction lists; the pad is ignored by the
// semantics and exists so that every program has infinitely many equivalent
// codes, enumerable from the original.

#include "densitylab/bit_sequence.hpp"

#include <cmath>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

namespace densitylab {

inline constexpr unsigned kRegisters = 2;

enum class Opcode : std::uint8_t { halt, inc, decjz };

struct Instruction {
  Opcode op = Opcode::halt;
  std::uint8_t reg = 0;
  std::uint32_t target = 0;  // DECJZ jump label, in [0, length]
  friend bool operator==(const Instruction&, const Instruction&) = default;
};

using Core = std::vector<Instruction>;

struct ToyProgram {
  Index code = 0;
  Index core_index = 0;
  Index pad = 0;
  Core core;
};

// ---------------------------------------------------------------------------
// Pairing

/// Cantor pairing <a, b> = (a+b)(a+b+1)/2 + b.
inline Index cantor_pair(Index a, Index b) {
  Index s = checked_add(a, b);
  unsigned __int128 t = static_cast<unsigned __int128>(s) * (s + 1) / 2 + b;
  if (t > kIndexMax) throw InsufficientError("pairing exceeds the 64-bit index space");
  return static_cast<Index>(t);
}

inline std::pair<Index, Index> cantor_unpair(Index z) {
  auto tri = [](Index w) { return static_cast<unsigned __int128>(w) * (w + 1) / 2; };
  auto w = static_cast<Index>((std::sqrt(8.0L * static_cast<long double>(z) + 1.0L) - 1.0L) / 2.0L);
  while (w > 0 && tri(w) > z) --w;
  while (tri(w + 1) <= z) ++w;
  Index b = z - static_cast<Index>(tri(w));
  return {w - b, b};
}

// ---------------------------------------------------------------------------
// Core enumeration

namespace detail {

inline Index alphabet_size(Index length) { return 1 + kRegisters + kRegisters * (length + 1); }

/// Number of cores of exactly `length` instructions, saturating at kIndexMax.
inline Index cores_of_length(Index length) {
  Index a = alphabet_size(length), n = 1;
  for (Index i = 0; i < length; ++i) {
    if (__builtin_mul_overflow(n, a, &n)) return kIndexMax;
  }
  return n;
}

inline Instruction decode_digit(Index d, Index length) {
  if (d == 0) return {Opcode::halt, 0, 0};
  if (d <= kRegisters) return {Opcode::inc, static_cast<std::uint8_t>(d - 1), 0};
  Index rest = d - 1 - kRegisters;
  return {Opcode::decjz, static_cast<std::uint8_t>(rest / (length + 1)),
          static_cast<std::uint32_t>(rest % (length + 1))};
}

inline Index encode_digit(const Instruction& ins, Index length) {
  switch (ins.op) {
    case Opcode::halt: return 0;
    case Opcode::inc: return 1 + ins.reg;
    case Opcode::decjz: return 1 + kRegisters + ins.reg * (length + 1) + ins.target;
  }
  return 0;
}

}  // namespace detail

inline Core decode_core(Index c) {
  Index length = 0;
  while (true) {
    Index count = detail::cores_of_length(length);
    if (c < count) break;
    c -= count;
    ++length;
  }
  const Index a = detail::alphabet_size(length);
  Core core(length);
  for (Index i = length; i-- > 0;) {
    core[i] = detail::decode_digit(c % a, length);
    c /= a;
  }
  return core;
}

inline Index encode_core(const Core& core) {
  const Index length = core.size();
  Index offset = 0;
  for (Index l = 0; l < length; ++l) offset = checked_add(offset, detail::cores_of_length(l));
  const Index a = detail::alphabet_size(length);
  Index c = 0;
  for (const auto& ins : core) {
    if (ins.reg >= kRegisters || (ins.op == Opcode::decjz && ins.target > length))
      throw ParameterError("instruction out of range for a core of this length");
    c = checked_add(checked_mul(c, a), detail::encode_digit(ins, length));
  }
  return checked_add(offset, c);
}

inline Index encode_program(Index core_index, Index pad) { return cantor_pair(core_index, pad); }

inline ToyProgram enumerate_program(Index n) {
  auto [c, pad] = cantor_unpair(n);
  return {n, c, pad, decode_core(c)};
}

inline std::string disassemble(const Core& core) {
  std::string out;
  for (std::size_t i = 0; i < core.size(); ++i) {
    if (i) out += "; ";
    const auto& ins = core[i];
    switch (ins.op) {
      case Opcode::halt: out += "HALT"; break;
      case Opcode::inc: out += "INC r" + std::to_string(ins.reg); break;
      case Opcode::decjz:
        out += "DECJZ r" + std::to_string(ins.reg) + "," + std::to_string(ins.target);
        break;
    }
  }
  return out.empty() ? "<empty>" : out;
}

// ---------------------------------------------------------------------------
// Execution

enum class RunStatus { halted, pending, diverging };

struct RunResult {
  RunStatus status = RunStatus::pending;
  Index output = 0;
  Index steps = 0;
  friend bool operator==(const RunResult&, const RunResult&) = default;
};

namespace detail {

struct MachineState {
  Index pc = 0;
  Index r[kRegisters] = {};
  friend bool operator==(const MachineState&, const MachineState&) = default;
};

struct MachineStateHash {
  std::size_t operator()(const MachineState& s) const {
    std::uint64_t h = splitmix_mix(s.pc);
    for (Index v : s.r) h = splitmix_mix(h ^ v);
    return static_cast<std::size_t>(h);
  }
};

inline RunResult execute(const Core& core, Index input, Index budget, bool detect_loops) {
  if (budget < 1) throw ParameterError("run budget must be >= 1");
  MachineState st;
  st.r[0] = input;
  std::unordered_set<MachineState, MachineStateHash> seen;
  RunResult res;
  const Index length = core.size();
  while (true) {
    if (res.steps == budget) {
      res.status = RunStatus::pending;
      return res;
    }
    if (detect_loops && !seen.insert(st).second) {
      res.status = RunStatus::diverging;
      return res;
    }
    ++res.steps;
    if (st.pc >= length || core[st.pc].op == Opcode::halt) {
      res.status = RunStatus::halted;
      res.output = st.r[0];
      return res;
    }
    const Instruction& ins = core[st.pc];
    if (ins.op == Opcode::inc) {
      ++st.r[ins.reg];
      ++st.pc;
    } else if (st.r[ins.reg] == 0) {
      st.pc = ins.target;
    } else {
      --st.r[ins.reg];
      ++st.pc;
    }
  }
}

}  // namespace detail

/// Runs at most `budget` steps. Each executed instruction is one step, and so
/// is halting (HALT or falling off the end).
inline RunResult run(const ToyProgram& prog, Index input, Index budget) {
  return detail::execute(prog.core, input, budget, false);
}

/// As run(), but reports `diverging` when an exact machine state repeats
/// within the budget. Sound (a repeated state loops forever) but incomplete.
inline RunResult run_with_loop_check(const ToyProgram& prog, Index input, Index budget) {
  return detail::execute(prog.core, input, budget, true);
}

// ---------------------------------------------------------------------------
// Padding

/// x_{e,0} = e; for i >= 1, x_{e,i} = <core(e), <pad(e), i-1> + 1>. The pad
/// sequences of distinct codes sharing a core are disjoint, and together they
/// cover every pad >= 1.
inline Index padding_enumeration(Index e, Index i) {
  if (i == 0) return e;
  auto [c, p] = cantor_unpair(e);
  Index q = checked_add(cantor_pair(p, i - 1), 1);
  return encode_program(c, q);
}

/// Inverse of padding_enumeration on codes with pad >= 1: the (e, i) with
/// x_{e,i} = code and i >= 1. Pad-0 codes have none.
inline std::optional<std::pair<Index, Index>> padding_source(Index code) {
  auto [c, q] = cantor_unpair(code);
  if (q == 0) return std::nullopt;
  auto [p, i_minus_1] = cantor_unpair(q - 1);
  return std::pair{encode_program(c, p), i_minus_1 + 1};
}

}  // namespace densitylab
