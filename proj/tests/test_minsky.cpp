#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <set>
#include <sstream>

#include "minsky.hpp"
#include "verify.hpp"

using namespace cf;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string fixture(const std::string& name) {
  return std::string(CF_FIXTURE_DIR) + "/" + name;
}

MinskyMachine load(const std::string& name) {
  return MinskyMachine::parse(read_file(fixture(name)));
}

} // namespace

TEST_CASE("parse: example machine from lines") {
  MinskyMachine m = MinskyMachine::parse("1 A 2\n2 B 3\n3 A 4 3\n4 B 0 4\n");
  CHECK(m.num_states() == 5);
  CHECK(m == example_machine());
  CHECK(m == load("example54.mm"));
}

TEST_CASE("parse: slash-separated single-line form") {
  CHECK(MinskyMachine::parse("1 A 2 / 2 B 3 / 3 A 4 3 / 4 B 0 4") == example_machine());
  CHECK_THROWS_AS(MinskyMachine::parse("1 A 2 / 1 B 2"), Error); // duplicate state
}

TEST_CASE("parse: empty text is missing state 1") {
  CHECK_THROWS_WITH_AS(MinskyMachine::parse(""), "no instruction for state 1", Error);
}

TEST_CASE("parse: duplicate instruction per state rejected") {
  CHECK_THROWS_AS(MinskyMachine::parse("1 A 2\n1 B 2\n"), Error);
}

TEST_CASE("parse: instruction on state 0 rejected") {
  CHECK_THROWS_AS(MinskyMachine::parse("1 A 2\n0 A 1\n"), Error);
}

TEST_CASE("parse: comments and blank lines") {
  MinskyMachine m = MinskyMachine::parse("# header\n\n1 A 2 # inline\n\n2 B 0\n");
  CHECK(m.num_states() == 3);
  CHECK(m.instruction(1)->reg == Reg::A);
}

TEST_CASE("step: worked example table transitions") {
  MinskyMachine m = example_machine();
  CHECK(m.step({1, 0, 0}) == Configuration{2, 1, 0});
  CHECK(m.step({3, 1, 1}) == Configuration{3, 0, 1});
  CHECK(m.step({0, 5, 7}) == Configuration{0, 5, 7}); // halting state is a fixed point
}

TEST_CASE("step: missing instruction fails") {
  MinskyMachine m(4, {Instruction::inc(1, Reg::A, 2)});
  CHECK_THROWS_AS(m.step({2, 0, 0}), Error);
}

TEST_CASE("run: full worked example trace") {
  MinskyMachine m = example_machine();
  RunResult r = m.run({1, 0, 0}, 10);
  CHECK(r.outcome == RunResult::Outcome::halted);
  CHECK(r.steps == 6);
  CHECK(r.final == Configuration{0, 0, 0});
  CHECK(r.trace_max_sum == 2);

  // n-fold composition of step agrees with run
  Configuration cfg{1, 0, 0};
  const Configuration expected[] = {{1, 0, 0}, {2, 1, 0}, {3, 1, 1}, {3, 0, 1},
                                    {4, 0, 1}, {4, 0, 0}, {0, 0, 0}};
  for (int n = 0; n <= 6; ++n) {
    CHECK(cfg == expected[n]);
    cfg = m.step(cfg);
  }
}

TEST_CASE("run: fuel exhaustion stops at step 3") {
  RunResult r = example_machine().run({1, 0, 0}, 3);
  CHECK(r.outcome == RunResult::Outcome::fuel_exhausted);
  CHECK(r.final == Configuration{3, 0, 1});
}

TEST_CASE("run: normalized ping-pong machine never halts, bounded registers") {
  MinskyMachine m = load("pingpong.mm");
  CHECK(m.is_normalized());
  RunResult r = m.run({1, 0, 0}, 100);
  CHECK(r.outcome == RunResult::Outcome::fuel_exhausted);
  CHECK(r.trace_max_sum == 1);
}

TEST_CASE("capacity: worked example has capacity 2") {
  CapacityReport rep = example_machine().capacity(100);
  CHECK(rep.halted);
  CHECK(rep.capacity == 2);
  CHECK(rep.steps == 6);
}

TEST_CASE("capacity: zero fuel reports the initial configuration only") {
  CapacityReport rep = example_machine().capacity(0);
  CHECK(!rep.halted);
  CHECK(rep.capacity == 0);
}

TEST_CASE("capacity: unbounded grower at large fuel stays unknown") {
  CapacityReport rep = load("grow.mm").capacity(10'000);
  CHECK(!rep.halted);
  CHECK(rep.capacity > 100);
}

TEST_CASE("halts_with_capacity decides exactly") {
  MinskyMachine ex = example_machine();
  CHECK(ex.halts_with_capacity(2));
  CHECK(ex.halts_with_capacity(7));
  CHECK(!ex.halts_with_capacity(1)); // capacity exceeded before halting
  CHECK(!load("pingpong.mm").halts_with_capacity(50)); // cycle detected
  CHECK(!load("grow.mm").halts_with_capacity(6));      // bound exceeded
}

TEST_CASE("normalize: worked example maps to itself") {
  MinskyMachine m = example_machine();
  CHECK(m.is_normalized());
  CHECK(m.normalize() == m);
}

TEST_CASE("normalize: trivial halting machine is already normalized") {
  MinskyMachine m = load("trivial.mm");
  CHECK(m.is_normalized());
  CHECK(m.normalize() == m);
  // halting status preserved, checked by paired simulation
  RunResult before = m.run({1, 0, 0}, 1000);
  RunResult after = m.normalize().run({1, 0, 0}, 1000);
  CHECK(before.outcome == RunResult::Outcome::halted);
  CHECK(after.outcome == RunResult::Outcome::halted);
}

TEST_CASE("normalize: drains appended when registers stay dirty at halt") {
  // (1,A,0) halts with register A = 1, so the drain pair must be added
  MinskyMachine m = MinskyMachine::parse("1 A 0\n");
  MinskyMachine n = m.normalize();
  CHECK(n.is_normalized());
  RunResult r = n.run({1, 0, 0}, 1000);
  CHECK(r.outcome == RunResult::Outcome::halted);
  CHECK(r.final == Configuration{0, 0, 0});
}

TEST_CASE("normalize: unreachable states pruned") {
  MinskyMachine m = MinskyMachine::parse("1 A 0\n5 A 5\n");
  MinskyMachine n = m.normalize();
  CHECK(n.is_normalized());
  std::vector<bool> live = n.reachable_from(1);
  for (int s = 0; s < n.num_states(); ++s) CHECK(live[s]);
  // the self-looping state 5 is gone; only the drain chain remains
  CHECK(n.num_states() == 4);
}

TEST_CASE("normalize: test-decrement first instruction gets an increment prefix") {
  MinskyMachine m = MinskyMachine::parse("1 A 2 1\n2 B 0\n");
  MinskyMachine n = m.normalize();
  CHECK(n.is_normalized());
  CHECK(n.instruction(1)->kind == Instruction::Kind::increment);
  // halting status preserved: original halts (zero branch from (1,0,0) to 2, then B+1 -> 0)
  CHECK(m.run({1, 0, 0}, 1000).outcome == RunResult::Outcome::halted);
  CHECK(n.run({1, 0, 0}, 1000).outcome == RunResult::Outcome::halted);
}

TEST_CASE("normalize: self-looping machine gains a graph path to 0") {
  MinskyMachine m = MinskyMachine::parse("1 A 1\n");
  MinskyMachine n = m.normalize();
  CHECK(n.is_normalized());
  // still never halts
  CHECK(n.run({1, 0, 0}, 10'000).outcome == RunResult::Outcome::fuel_exhausted);
}

TEST_CASE("normalize: grower gains drains but keeps non-halting status") {
  MinskyMachine m = load("grow.mm");
  MinskyMachine n = m.normalize();
  CHECK(n.is_normalized());
  CHECK(n.run({1, 0, 0}, 10'000).outcome == RunResult::Outcome::fuel_exhausted);
  CHECK(!n.halts_with_capacity(6));
}

TEST_CASE("normalize: halting-status preservation across a corpus") {
  const char* corpus[] = {
      "1 A 0\n",
      "1 A 2\n2 A 0 2\n",
      "1 B 2\n2 B 1 1\n",
      "1 A 2 1\n2 B 0\n",
      "1 A 1\n",
      "1 B 3\n3 A 1 3\n",
      "1 A 2\n2 B 3\n3 A 4 3\n4 B 0 4\n",
      "1 A 2\n2 B 1\n",
  };
  for (const char* text : corpus) {
    MinskyMachine m = MinskyMachine::parse(text);
    MinskyMachine n = m.normalize();
    CHECK(n.is_normalized());
    bool halt_before = false;
    // pre-normalization machines can get stuck on a missing instruction;
    // treat that as non-halting for the comparison
    try {
      halt_before = m.run({1, 0, 0}, 2000).outcome == RunResult::Outcome::halted;
    } catch (const Error&) {
      halt_before = false;
    }
    bool halt_after = n.run({1, 0, 0}, 2000).outcome == RunResult::Outcome::halted;
    CAPTURE(text);
    CHECK(halt_before == halt_after);
  }
}

TEST_CASE("normalize is idempotent on the fixture corpus") {
  for (const char* name : {"example54.mm", "trivial.mm", "pingpong.mm", "grow.mm", "loop1.mm"}) {
    MinskyMachine n = load(name).normalize();
    CHECK(n.normalize() == n);
  }
}

TEST_CASE("format round-trips") {
  for (const char* name : {"example54.mm", "grow.mm"}) {
    MinskyMachine m = load(name);
    CHECK(MinskyMachine::parse(m.format()) == m);
  }
}
