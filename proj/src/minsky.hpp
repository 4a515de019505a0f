#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "common.hpp"

namespace cf {

enum class Reg : uint8_t { A = 0, B = 1 };

inline char reg_letter(Reg r) { return r == Reg::A ? 'A' : 'B'; }

// Two instruction forms:
//   (i, R, j)    -- in state i, increment R, go to j
//   (i, R, k, j) -- in state i, if R == 0 go to k, else decrement R and go to j
struct Instruction {
  enum class Kind : uint8_t { increment, test_decrement };
  Kind kind;
  int state;
  Reg reg;
  int target;          // increment target / nonzero branch
  int zero_target = 0; // test-decrement only

  static Instruction inc(int state, Reg r, int target) {
    return {Kind::increment, state, r, target, 0};
  }
  static Instruction dec(int state, Reg r, int zero_target, int target) {
    return {Kind::test_decrement, state, r, target, zero_target};
  }
  bool operator==(const Instruction&) const = default;
};

struct Configuration {
  int state = 1;
  long long alpha = 0;
  long long beta = 0;
  bool operator==(const Configuration&) const = default;
  auto operator<=>(const Configuration&) const = default;
};

struct RunResult {
  enum class Outcome { halted, fuel_exhausted };
  Outcome outcome;
  long long steps;
  long long trace_max_sum; // max alpha+beta over all visited configurations
  Configuration final;
};

struct CapacityReport {
  bool halted;        // halted within fuel; capacity is exact iff true
  long long capacity; // exact capacity if halted, else fuel-bounded k-step capacity
  long long steps;    // steps taken (to the halt, or the whole fuel)
};

// A two-register counter machine with states {0..N}; 0 halts, 1 is initial.
class MinskyMachine {
public:
  MinskyMachine() = default;
  MinskyMachine(int num_states, std::vector<Instruction> instructions);

  static MinskyMachine parse(const std::string& text);

  int num_states() const { return num_states_; } // N+1, including state 0
  const Instruction* instruction(int state) const;
  const std::vector<Instruction>& instructions() const { return instructions_; }

  bool has_instruction_per_state() const; // exactly one per nonzero state
  std::string format() const;             // canonical machine file text

  Configuration step(const Configuration& cfg) const;
  RunResult run(const Configuration& start, long long fuel) const;
  CapacityReport capacity(long long fuel) const; // from (1,0,0)

  // Decides whether the machine halts from (1,0,0) while alpha+beta stays <= c.
  // Always terminates: the configuration space under the bound is finite.
  bool halts_with_capacity(long long c) const;

  // Trace prefix from (1,0,0) while alpha+beta <= c, up to halt or first
  // revisit (exhaustive under the bound).
  std::vector<Configuration> bounded_trace(long long c) const;

  MinskyMachine normalize() const;
  bool is_normalized() const;

  // out-neighbours in the state graph, in instruction order
  // (test-decrement lists the zero branch first)
  std::vector<int> successors(int state) const;
  std::vector<bool> reaches_zero() const;   // per state: path to 0 exists
  std::vector<bool> reachable_from(int start) const;

  bool operator==(const MinskyMachine&) const = default;

private:
  void check_state(int s, const char* what) const;

  int num_states_ = 1;
  std::vector<Instruction> instructions_; // sorted by state, at most one each
};

} // namespace cf
