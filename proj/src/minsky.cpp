#include "minsky.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <sstream>
#include <unordered_set>

namespace cf {

namespace {

struct ConfigKey {
  bool operator()(const Configuration& a, const Configuration& b) const {
    return a < b;
  }
};

} // namespace

MinskyMachine::MinskyMachine(int num_states, std::vector<Instruction> instructions)
    : num_states_(num_states), instructions_(std::move(instructions)) {
  if (num_states_ < 1) fail(ErrorCode::invalid, "machine needs at least the halting state 0");
  std::sort(instructions_.begin(), instructions_.end(),
            [](const Instruction& a, const Instruction& b) { return a.state < b.state; });
  int prev = -1;
  for (const Instruction& ins : instructions_) {
    if (ins.state == 0)
      fail(ErrorCode::invalid, "instruction attached to state 0");
    if (ins.state == prev)
      fail(ErrorCode::invalid, "duplicate instruction for state " + std::to_string(ins.state));
    prev = ins.state;
    check_state(ins.state, "instruction state");
    check_state(ins.target, "instruction target");
    if (ins.kind == Instruction::Kind::test_decrement)
      check_state(ins.zero_target, "instruction zero target");
  }
}

void MinskyMachine::check_state(int s, const char* what) const {
  if (s < 0 || s >= num_states_)
    fail(ErrorCode::invalid, std::string(what) + " " + std::to_string(s) +
                                 " out of range (num_states " + std::to_string(num_states_) + ")");
}

const Instruction* MinskyMachine::instruction(int state) const {
  auto it = std::lower_bound(instructions_.begin(), instructions_.end(), state,
                             [](const Instruction& ins, int s) { return ins.state < s; });
  if (it == instructions_.end() || it->state != state) return nullptr;
  return &*it;
}

bool MinskyMachine::has_instruction_per_state() const {
  for (int s = 1; s < num_states_; ++s)
    if (!instruction(s)) return false;
  return true;
}

MinskyMachine MinskyMachine::parse(const std::string& text) {
  std::vector<Instruction> instrs;
  int max_state = 1;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    if (auto pos = raw.find('#'); pos != std::string::npos) raw.erase(pos);
    // a slash separates instructions within one line
    std::replace(raw.begin(), raw.end(), '/', '\n');
    std::istringstream parts(raw);
    std::string line;
    while (std::getline(parts, line)) {
      std::istringstream ls(line);
      std::vector<std::string> tok;
      std::string t;
      while (ls >> t) tok.push_back(t);
      if (tok.empty()) continue;
      auto bad = [&](const std::string& why) {
        fail(ErrorCode::parse, "line " + std::to_string(lineno) + ": " + why);
      };
      if (tok.size() != 3 && tok.size() != 4) bad("expected `i R j` or `i R k j`");
      auto num = [&](const std::string& s) -> int {
        try {
          size_t used = 0;
          int v = std::stoi(s, &used);
          if (used != s.size() || v < 0) throw std::invalid_argument(s);
          return v;
        } catch (...) {
          bad("not a state id: " + s);
        }
        return 0;
      };
      int state = num(tok[0]);
      if (tok[1] != "A" && tok[1] != "B") bad("register must be A or B");
      Reg reg = tok[1] == "A" ? Reg::A : Reg::B;
      Instruction ins = tok.size() == 3
                            ? Instruction::inc(state, reg, num(tok[2]))
                            : Instruction::dec(state, reg, num(tok[2]), num(tok[3]));
      if (state == 0) bad("instruction attached to state 0");
      for (const Instruction& other : instrs)
        if (other.state == state)
          bad("duplicate instruction for state " + std::to_string(state));
      max_state = std::max({max_state, ins.state, ins.target,
                            ins.kind == Instruction::Kind::test_decrement ? ins.zero_target : 0});
      instrs.push_back(ins);
    }
  }
  bool has1 = false;
  for (const Instruction& ins : instrs) has1 |= ins.state == 1;
  if (!has1) fail(ErrorCode::parse, "no instruction for state 1");
  return MinskyMachine(max_state + 1, std::move(instrs));
}

std::string MinskyMachine::format() const {
  std::ostringstream out;
  for (const Instruction& ins : instructions_) {
    out << ins.state << ' ' << reg_letter(ins.reg) << ' ';
    if (ins.kind == Instruction::Kind::increment)
      out << ins.target;
    else
      out << ins.zero_target << ' ' << ins.target;
    out << '\n';
  }
  return out.str();
}

Configuration MinskyMachine::step(const Configuration& cfg) const {
  check_state(cfg.state, "configuration state");
  if (cfg.state == 0) return cfg;
  const Instruction* ins = instruction(cfg.state);
  if (!ins)
    fail(ErrorCode::invalid, "no instruction for state " + std::to_string(cfg.state));
  long long a = cfg.alpha, b = cfg.beta;
  if (ins->kind == Instruction::Kind::increment) {
    if (ins->reg == Reg::A) return {ins->target, a + 1, b};
    return {ins->target, a, b + 1};
  }
  if (ins->reg == Reg::A) {
    if (a != 0) return {ins->target, a - 1, b};
    return {ins->zero_target, a, b};
  }
  if (b != 0) return {ins->target, a, b - 1};
  return {ins->zero_target, a, b};
}

RunResult MinskyMachine::run(const Configuration& start, long long fuel) const {
  if (fuel < 0) fail(ErrorCode::invalid, "negative fuel");
  Configuration cfg = start;
  long long max_sum = cfg.alpha + cfg.beta;
  long long steps = 0;
  while (steps < fuel && cfg.state != 0) {
    cfg = step(cfg);
    ++steps;
    max_sum = std::max(max_sum, cfg.alpha + cfg.beta);
  }
  RunResult r;
  r.outcome = cfg.state == 0 ? RunResult::Outcome::halted : RunResult::Outcome::fuel_exhausted;
  r.steps = steps;
  r.trace_max_sum = max_sum;
  r.final = cfg;
  return r;
}

CapacityReport MinskyMachine::capacity(long long fuel) const {
  RunResult r = run(Configuration{1, 0, 0}, fuel);
  return {r.outcome == RunResult::Outcome::halted, r.trace_max_sum, r.steps};
}

bool MinskyMachine::halts_with_capacity(long long c) const {
  Configuration cfg{1, 0, 0};
  std::set<Configuration> seen;
  while (true) {
    if (cfg.alpha + cfg.beta > c) return false;
    if (cfg.state == 0) return true;
    if (!seen.insert(cfg).second) return false; // cycle: never halts
    cfg = step(cfg);
  }
}

std::vector<Configuration> MinskyMachine::bounded_trace(long long c) const {
  std::vector<Configuration> trace;
  Configuration cfg{1, 0, 0};
  std::set<Configuration> seen;
  while (cfg.alpha + cfg.beta <= c && seen.insert(cfg).second) {
    trace.push_back(cfg);
    if (cfg.state == 0) break;
    cfg = step(cfg);
  }
  return trace;
}

std::vector<int> MinskyMachine::successors(int state) const {
  const Instruction* ins = instruction(state);
  if (!ins) return {};
  if (ins->kind == Instruction::Kind::increment) return {ins->target};
  return {ins->zero_target, ins->target};
}

std::vector<bool> MinskyMachine::reaches_zero() const {
  // reverse reachability from state 0
  std::vector<std::vector<int>> preds(num_states_);
  for (const Instruction& ins : instructions_)
    for (int t : successors(ins.state)) preds[t].push_back(ins.state);
  std::vector<bool> in(num_states_, false);
  std::deque<int> work{0};
  in[0] = true;
  while (!work.empty()) {
    int s = work.front();
    work.pop_front();
    for (int p : preds[s])
      if (!in[p]) {
        in[p] = true;
        work.push_back(p);
      }
  }
  return in;
}

std::vector<bool> MinskyMachine::reachable_from(int start) const {
  std::vector<bool> in(num_states_, false);
  std::deque<int> work{start};
  in[start] = true;
  while (!work.empty()) {
    int s = work.front();
    work.pop_front();
    for (int t : successors(s))
      if (!in[t]) {
        in[t] = true;
        work.push_back(t);
      }
  }
  return in;
}

namespace {

// Conservative dataflow check that every abstractly reachable entry into
// state 0 carries provably zero registers. Register abstraction: false =
// definitely 0, true = may be positive.
bool zeroes_registers_statically(const MinskyMachine& m) {
  struct Flags {
    bool a = false, b = false;
  };
  int n = m.num_states();
  std::vector<Flags> at(n);
  std::vector<bool> seen(n, false);
  seen[1] = true;
  bool entry_violates_zero = false;
  bool changed = true;
  auto join = [&](int s, bool a, bool b) {
    if (s == 0) {
      if (a || b) entry_violates_zero = true;
      return;
    }
    if (!seen[s] || (a && !at[s].a) || (b && !at[s].b)) {
      seen[s] = true;
      at[s].a = at[s].a || a;
      at[s].b = at[s].b || b;
      changed = true;
    }
  };
  while (changed) {
    changed = false;
    entry_violates_zero = false;
    for (const Instruction& ins : m.instructions()) {
      if (!seen[ins.state]) continue;
      Flags f = at[ins.state];
      if (ins.kind == Instruction::Kind::increment) {
        join(ins.target, ins.reg == Reg::A ? true : f.a, ins.reg == Reg::B ? true : f.b);
      } else if (ins.reg == Reg::A) {
        join(ins.zero_target, false, f.b);
        if (f.a) join(ins.target, true, f.b);
      } else {
        join(ins.zero_target, f.a, false);
        if (f.b) join(ins.target, f.a, true);
      }
    }
    // one extra sweep recomputes the violation flag against the final state
    if (!changed) break;
  }
  return !entry_violates_zero;
}

struct Builder {
  int next_state;
  std::map<int, Instruction> by_state;

  explicit Builder(const MinskyMachine& m) : next_state(m.num_states()) {
    for (const Instruction& ins : m.instructions()) by_state[ins.state] = ins;
  }
  int fresh() { return next_state++; }
  void put(Instruction ins) { by_state[ins.state] = ins; }
  void retarget(int old_target, int new_target) {
    for (auto& [s, ins] : by_state) {
      if (ins.target == old_target) ins.target = new_target;
      if (ins.kind == Instruction::Kind::test_decrement && ins.zero_target == old_target)
        ins.zero_target = new_target;
    }
  }
  MinskyMachine build() const {
    std::vector<Instruction> v;
    v.reserve(by_state.size());
    for (const auto& [s, ins] : by_state) v.push_back(ins);
    return MinskyMachine(next_state, std::move(v));
  }
};

} // namespace

MinskyMachine MinskyMachine::normalize() const {
  if (!instruction(1))
    fail(ErrorCode::invalid, "normalize requires an instruction for state 1");
  Builder b(*this);

  // (b) exactly one instruction per state: self-increment on register A
  for (int s = 1; s < num_states_; ++s)
    if (!b.by_state.count(s)) b.put(Instruction::inc(s, Reg::A, s));

  auto drain_registers = [](Builder& bb) {
    int k = bb.fresh();
    int k1 = bb.fresh();
    bb.retarget(0, k);
    bb.put(Instruction::dec(k, Reg::A, k1, k));
    bb.put(Instruction::dec(k1, Reg::B, 0, k1));
  };

  // (a) zero the registers before halting, unless that already provably holds
  if (!zeroes_registers_statically(b.build())) drain_registers(b);

  // (c) first instruction in increment form: insert a cancelling
  // increment/decrement pair in front of the old state-1 behaviour
  if (b.by_state.at(1).kind == Instruction::Kind::test_decrement) {
    int relay = b.fresh();
    int moved = b.fresh();
    b.retarget(1, moved); // in-edges (and self-branches) follow the old behaviour
    Instruction old1 = b.by_state.at(1);
    old1.state = moved;
    b.put(old1);
    b.put(Instruction::inc(1, Reg::A, relay));
    b.put(Instruction::dec(relay, Reg::A, moved, moved));
  }

  // (d) every state reaching 0 in the state graph: redirect branches that
  // leave the 0-reaching region into fresh looping states
  for (;;) {
    MinskyMachine cur = b.build();
    std::vector<bool> good = cur.reaches_zero();
    if (!good[1]) {
      // no graph path from 1 to 0 at all: split the initial increment so the
      // re-increment relay exposes a (never taken) zero branch to 0
      Instruction first = b.by_state.at(1);
      int check = b.fresh();
      int redo = b.fresh();
      b.put(Instruction::inc(1, first.reg, check));
      b.put(Instruction::dec(check, first.reg, 0, redo));
      b.put(Instruction::inc(redo, first.reg, first.target));
      continue;
    }
    bool any = false;
    std::vector<Instruction> snapshot;
    for (const auto& [s, ins] : b.by_state) snapshot.push_back(ins);
    for (const Instruction& ins : snapshot) {
      if (!good[ins.state] || ins.kind != Instruction::Kind::test_decrement) continue;
      Instruction fixed = ins;
      bool touched = false;
      if (!good[ins.zero_target]) {
        int n = b.fresh();
        fixed.zero_target = n;
        b.put(Instruction::dec(n, ins.reg, ins.state, ins.state));
        touched = true;
      }
      if (!good[fixed.target]) {
        int n = b.fresh();
        fixed.target = n;
        b.put(Instruction::inc(n, ins.reg, ins.state));
        touched = true;
      }
      if (touched) {
        b.put(fixed);
        any = true;
      }
    }
    if (!any) {
      std::vector<bool> live = cur.reachable_from(1);
      bool all_good = true;
      for (int s = 0; s < cur.num_states(); ++s)
        if (live[s] && !good[s]) all_good = false;
      if (all_good) break;
      fail(ErrorCode::invalid, "normalize: path-to-halt transform did not converge");
    }
  }

  // the transforms for (c) and (d) shuffle registers through never-taken
  // branches, which can defeat the static zero check; drain again if so (the
  // drain pair passes it unconditionally and keeps (b)-(d) intact)
  if (!zeroes_registers_statically(b.build())) drain_registers(b);

  // prune states unreachable from 1, then renumber by BFS order (0 and 1 fixed)
  MinskyMachine cur = b.build();
  std::vector<bool> live = cur.reachable_from(1);
  std::vector<int> renum(cur.num_states(), -1);
  renum[0] = 0;
  renum[1] = 1;
  int next_id = 2;
  std::deque<int> work{1};
  std::vector<bool> visited(cur.num_states(), false);
  visited[1] = true;
  while (!work.empty()) {
    int s = work.front();
    work.pop_front();
    for (int t : cur.successors(s)) {
      if (visited[t]) continue;
      visited[t] = true;
      if (t != 0 && renum[t] == -1) renum[t] = next_id++;
      work.push_back(t);
    }
  }
  std::vector<Instruction> out;
  for (const Instruction& ins : cur.instructions()) {
    if (!live[ins.state]) continue;
    Instruction r = ins;
    r.state = renum[ins.state];
    r.target = renum[ins.target];
    if (r.kind == Instruction::Kind::test_decrement) r.zero_target = renum[ins.zero_target];
    out.push_back(r);
  }
  return MinskyMachine(next_id, std::move(out));
}

bool MinskyMachine::is_normalized() const {
  if (!has_instruction_per_state()) return false;
  const Instruction* first = instruction(1);
  if (!first || first->kind != Instruction::Kind::increment) return false;
  std::vector<bool> good = reaches_zero();
  std::vector<bool> live = reachable_from(1);
  for (int s = 0; s < num_states_; ++s) {
    if (!live[s] && s != 0) return false;
    if (!good[s]) return false;
  }
  return zeroes_registers_statically(*this);
}

} // namespace cf
