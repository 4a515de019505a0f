// Acceptance suite: one check per release criterion, each printed as a
// single pass/fail line with its measured time against the pinned limit.
// Exits nonzero if any criterion fails.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "entail.hpp"
#include "gadgets.hpp"
#include "verify.hpp"

using namespace cf;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

void report(const std::string& name, bool ok, double ms, double limit_ms,
            const std::string& detail = "") {
  bool timed_ok = limit_ms <= 0 || ms <= limit_ms;
  bool pass = ok && timed_ok;
  if (!pass) ++g_failures;
  std::printf("[%s] %s (%.1f ms%s)%s%s\n", name.c_str(), pass ? "PASS" : "FAIL", ms,
              limit_ms > 0 ? ("/" + std::to_string(static_cast<long>(limit_ms)) + " ms").c_str()
                           : "",
              detail.empty() ? "" : " ",
              detail.c_str());
}

struct Fail {
  std::string what;
};

void need(bool cond, const std::string& what) {
  if (!cond) throw Fail{what};
}

void run(const std::string& name, double limit_ms, const std::function<void()>& body) {
  auto t0 = Clock::now();
  try {
    body();
    report(name, true, ms_since(t0), limit_ms);
  } catch (const Fail& f) {
    report(name, false, ms_since(t0), limit_ms, f.what);
  } catch (const std::exception& e) {
    report(name, false, ms_since(t0), limit_ms, e.what());
  }
}

std::string fixture(const std::string& name) {
  return std::string(CF_FIXTURE_DIR) + "/" + name;
}

MinskyMachine load(const std::string& name) {
  std::ifstream in(fixture(name));
  if (!in) throw Fail{"missing fixture " + name};
  std::ostringstream buf;
  buf << in.rdbuf();
  return MinskyMachine::parse(buf.str());
}

std::string run_cli(const std::string& args, int* status = nullptr) {
  std::string cmd = std::string(CF_CLI_DEFAULT) + " " + args + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) throw Fail{"cannot spawn the command line"};
  std::string out;
  char buf[4096];
  size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) out.append(buf, n);
  int rc = pclose(p);
  if (status) *status = WEXITSTATUS(rc);
  return out;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

bool meets_c_power(const Relation& r) {
  for (const Tup& t : r.tuples()) {
    bool all_c = true;
    for (int c = 0; c < r.arity(); ++c)
      if (!t.at(c).in_C()) all_c = false;
    if (all_c) return true;
  }
  return false;
}

} // namespace

int main() {
  MinskyMachine ex = load("example54.mm");

  // 1. the seven-row simulation table, exact, within a millisecond
  run("criterion-1 simulation-table", 1.0, [&] {
    const Configuration expected[] = {{1, 0, 0}, {2, 1, 0}, {3, 1, 1}, {3, 0, 1},
                                      {4, 0, 1}, {4, 0, 0}, {0, 0, 0}};
    Configuration cfg{1, 0, 0};
    for (int n = 0; n <= 6; ++n) {
      need(cfg == expected[n], "step " + std::to_string(n) + " deviates");
      if (n < 6) cfg = ex.step(cfg);
    }
    need(ex.run({1, 0, 0}, 10).steps == 6, "halt step count");
  });

  // 2. the encoding: S_3 contains every configuration set of the run, and the
  // six displayed M/M' evaluations reproduce element for element
  run("criterion-2 encoding", 10'000.0, [&] {
    SuiteReport r = run_suite(ex, "encoding-example");
    for (const CheckRecord& rec : r.checks)
      need(rec.status == CheckRecord::Status::pass, rec.id + ": " + rec.witness);
    need(r.passed == 5, "expected 5 checks");
  });

  // 3. halting instance checks: S_3 of the fixture is halting and meets C^3;
  // S_2 and S_3 of each normalized non-halting fixture are non-halting
  run("criterion-3 halting-instances", 60'000.0, [&] {
    Algebra alg(ex);
    Relation s3 = sequential_relation(alg, 3);
    need(is_halting_set(s3.tuples(), 3), "fixture S_3 not halting");
    need(meets_c_power(s3), "fixture S_3 misses C^3");
    for (const char* name : {"pingpong.mm", "grow.mm"}) {
      MinskyMachine m = load(name).normalize();
      need(m.is_normalized(), std::string(name) + " not normalized");
      Algebra a(m);
      for (int k : {2, 3}) {
        Relation sk = sequential_relation(a, k);
        need(!is_halting_set(sk.tuples(), k),
             std::string(name) + " S_" + std::to_string(k) + " halting");
      }
    }
  });

  // 4. gadget certification: five gadgets closed under all nine operations,
  // exhaustively at the 10-element domain and blockwise at 25; gamma closed
  // under the reduct with a concrete I-violation
  run("criterion-4 gadget-certification", 120'000.0, [&] {
    Algebra small(MinskyMachine(2, {Instruction::inc(1, Reg::A, 1)}));
    CertificationReport a = certify_gadgets(small);
    need(a.tier == CertTier::exhaustive, "small tier not exhaustive");
    need(a.ok(), "certification failed at the 10-element domain");
    Algebra big(ex);
    CertificationReport b = certify_gadgets(big);
    need(b.tier == CertTier::blockwise, "fixture tier not blockwise");
    need(b.ok(), "certification failed at the 25-element domain");
    need(b.gamma_i_violation.has_value(), "no I-violation witness");
    // the emitted witness re-applies
    const ClosureWitness& w = *b.gamma_i_violation;
    Relation gamma = build_gadget(big, GadgetId::gamma);
    Tup out{};
    for (int c = 0; c < 4; ++c) out[c] = big.i_op(w.args[0].at(c), w.args[1].at(c)).code;
    need(out == w.out && !gamma.contains(out), "I-violation witness does not reproduce");
  });

  // 5. structural facts: state homomorphism and X-absorption exhaustive at the
  // 10-element domain; z/w terms pointwise over the fixture domain
  run("criterion-5 structural-facts", 10'000.0, [&] {
    MinskyMachine loop(2, {Instruction::inc(1, Reg::A, 1)});
    SuiteReport small = run_suite(loop, "basic-facts");
    for (const CheckRecord& rec : small.checks)
      need(rec.status == CheckRecord::Status::pass, rec.id + ": " + rec.witness);
    Algebra alg(ex);
    for (int i = 0; i < alg.num_states(); ++i) {
      Term z = derive_z(alg, i);
      Term w = derive_w(alg, i);
      for (int x = 0; x < alg.size(); ++x) {
        Element e{static_cast<uint8_t>(x)};
        Element zx = eval_term(alg, z, std::array{e});
        need(zx == (e.in_C() ? Element::make(i, Content::zero) : Element::make(i, Content::cross)),
             "z_" + std::to_string(i) + " wrong at " + element_text(e));
      }
      for (Content c : {Content::cross, Content::zero, Content::reg_a, Content::reg_b}) {
        Element in = Element::make(i, c);
        Element wx = eval_term(alg, w, std::array{in});
        need(wx == (c == Content::zero ? Element::make(0, Content::zero)
                                       : Element::make(0, Content::cross)),
             "w_" + std::to_string(i) + " wrong at " + element_text(in));
      }
    }
  });

  // 6. permutation invariance of S_3, all-or-nothing configuration sets, and
  // the C-part halting implication
  run("criterion-6 sequential-properties", 0, [&] {
    Algebra alg(ex);
    Relation s3 = sequential_relation(alg, 3);
    std::vector<int> perm{0, 1, 2};
    int perms = 0;
    do {
      need(permute_relation(s3, perm) == s3, "permutation moves S_3");
      ++perms;
    } while (std::next_permutation(perm.begin(), perm.end()));
    need(perms == 6, "expected 6 permutations");
    for (int k = 0; k < alg.num_states(); ++k)
      for (int a = 0; a <= 2; ++a)
        for (int b = 0; a + b <= 2; ++b) {
          std::vector<Tup> cfg = config_set(alg, k, a, b, 3);
          size_t inside = 0;
          for (const Tup& t : cfg)
            if (s3.contains(t)) ++inside;
          need(inside == 0 || inside == cfg.size(), "configuration set split by S_3");
        }
    if (meets_c_power(s3)) need(is_halting_set(s3.tuples(), 3), "C-part without halting");
  });

  // 7. analysis toolkit coherence on the corpus
  run("criterion-7 toolkit", 0, [&] {
    for (const char* name : {"example54.mm", "trivial.mm", "pingpong.mm", "grow.mm"}) {
      MinskyMachine m = load(name).normalize();
      SuiteReport r = run_suite(m, "tools");
      for (const CheckRecord& rec : r.checks)
        need(rec.status != CheckRecord::Status::fail,
             std::string(name) + "/" + rec.id + ": " + rec.witness);
    }
  });

  // 8. byte-identical outputs across consecutive runs and worker counts
  run("criterion-8 determinism", 0, [&] {
    std::string m = " --machine " + fixture("example54.mm");
    int rc = 0;
    run_cli("rel sm 3" + m + " --out /tmp/cf_acc_a.rel --workers 1", &rc);
    need(rc == 0, "first run failed");
    run_cli("rel sm 3" + m + " --out /tmp/cf_acc_b.rel --workers 1", &rc);
    need(rc == 0, "second run failed");
    run_cli("rel sm 3" + m + " --out /tmp/cf_acc_c.rel", &rc); // default workers
    need(rc == 0, "default-workers run failed");
    std::string a = slurp("/tmp/cf_acc_a.rel");
    need(!a.empty() && a == slurp("/tmp/cf_acc_b.rel"), "reruns differ");
    need(a == slurp("/tmp/cf_acc_c.rel"), "worker counts differ");
    for (const char* suite : {"encoding-example", "tools", "gadgets"}) {
      std::string r1 = run_cli(std::string("verify ") + suite + m + " --workers 1", &rc);
      need(rc == 0, std::string(suite) + " not all-pass");
      std::string r2 = run_cli(std::string("verify ") + suite + m + " --workers 1");
      std::string r3 = run_cli(std::string("verify ") + suite + m); // default workers
      need(r1 == r2, std::string(suite) + " reruns differ");
      need(r1 == r3, std::string(suite) + " worker counts differ");
    }
  });

  std::printf("acceptance: %s (%d failing)\n", g_failures == 0 ? "ALL PASS" : "FAILURES",
              g_failures);
  return g_failures == 0 ? 0 : 1;
}
