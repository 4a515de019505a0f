#include "verify.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "entail.hpp"

namespace cf {

namespace {

using Status = CheckRecord::Status;

struct CheckResult {
  Status status = Status::pass;
  std::string witness;
};

CheckResult pass(std::string note = "") { return {Status::pass, std::move(note)}; }
CheckResult failed(std::string witness) { return {Status::fail, std::move(witness)}; }
CheckResult skip(std::string reason) { return {Status::skip, std::move(reason)}; }

struct Check {
  std::string id;
  std::string anchor;
  std::function<CheckResult()> fn;
};

// Shared per-run artifacts, fully built before checks execute in parallel.
struct Ctx {
  MinskyMachine machine;
  SuiteOptions opts;
  std::optional<Algebra> alg_;
  std::map<int, Relation> sm_;
  std::optional<CertificationReport> cert_;

  GenerateOptions gen() const {
    GenerateOptions g;
    g.budget_tuples = opts.budget_tuples;
    g.workers = opts.workers;
    return g;
  }
  const Algebra& alg() {
    if (!alg_) alg_.emplace(machine);
    return *alg_;
  }
  const Relation& sm(int m) {
    auto it = sm_.find(m);
    if (it == sm_.end()) it = sm_.emplace(m, sequential_relation(alg(), m, gen())).first;
    if (it->second.stats().budget_exceeded) fail(ErrorCode::budget, "closure budget exceeded");
    return it->second;
  }
  const CertificationReport& cert() {
    if (!cert_) {
      GadgetCertOptions gopts;
      gopts.seed = opts.seed;
      cert_ = certify_gadgets(alg(), gopts);
    }
    return *cert_;
  }
  bool is_example_machine() const { return machine == example_machine(); }
};

std::string tup_str(const Tup& t, int m) { return "(" + tuple_text(t, m) + ")"; }

std::string witness_str(const ClosureWitness& w, int m) {
  std::string out = std::string(op_name(w.op)) + " on";
  for (const Tup& a : w.args) out += " " + tup_str(a, m);
  out += " -> " + tup_str(w.out, m);
  return out;
}

std::string coord_set_str(std::span<const int> coords) {
  std::string out = "{";
  for (size_t i = 0; i < coords.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(coords[i] + 1);
  }
  return out + "}";
}

// ---- basic-facts ------------------------------------------------------------

// all argument tuples of the given arity over the domain, or seeded probes
template <class F>
std::optional<std::string> scan_args(const Algebra& alg, int arity, bool exhaustive,
                                     uint64_t samples, uint64_t seed, F&& check) {
  int n = alg.size();
  std::vector<Element> args(arity);
  if (exhaustive) {
    std::vector<int> idx(arity, 0);
    for (;;) {
      for (int k = 0; k < arity; ++k) args[k] = Element{static_cast<uint8_t>(idx[k])};
      if (auto w = check(args)) return w;
      int k = arity - 1;
      while (k >= 0 && ++idx[k] == n) idx[k--] = 0;
      if (k < 0) break;
    }
    return std::nullopt;
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick(0, n - 1);
  for (uint64_t s = 0; s < samples; ++s) {
    for (int k = 0; k < arity; ++k) args[k] = Element{static_cast<uint8_t>(pick(rng))};
    if (auto w = check(args)) return w;
  }
  return std::nullopt;
}

std::string args_str(std::span<const Element> args) {
  std::string out;
  for (Element a : args) out += element_text(a) + " ";
  return out;
}

CheckResult check_state_homomorphism(Ctx& ctx) {
  const Algebra& alg = ctx.alg();
  bool exhaustive = alg.size() <= 15;
  for (int k = 0; k < kNumOps; ++k) {
    Op op = static_cast<Op>(k);
    int ar = op_arity(op);
    std::map<std::vector<int>, int> table;
    auto w = scan_args(alg, ar, exhaustive, 100'000, ctx.opts.seed + k,
                       [&](std::span<const Element> args) -> std::optional<std::string> {
                         std::vector<int> states(ar);
                         for (int i = 0; i < ar; ++i) states[i] = args[i].state();
                         int out = alg.apply(op, args).state();
                         auto [it, fresh] = table.emplace(states, out);
                         if (!fresh && it->second != out)
                           return std::string(op_name(op)) + " at " + std::string(args_str(args)) +
                                  "gives state " + std::to_string(out) + " vs " +
                                  std::to_string(it->second);
                         return std::nullopt;
                       });
    if (w) return failed(*w);
  }
  return pass(exhaustive ? "exhaustive" : "sampled 100000/op");
}

CheckResult check_x_absorption(Ctx& ctx) {
  const Algebra& alg = ctx.alg();
  for (Op op : {Op::meet, Op::m, Op::mp, Op::h, Op::s}) {
    int ar = op_arity(op);
    auto w = scan_args(alg, ar, true, 0, 0,
                       [&](std::span<const Element> args) -> std::optional<std::string> {
                         bool has_x = false;
                         for (Element a : args) has_x |= a.in_X();
                         if (!has_x) return std::nullopt;
                         if (alg.apply(op, args).in_X()) return std::nullopt;
                         return std::string(op_name(op)) + " at " + args_str(args) + "leaves X";
                       });
    if (w) return failed(*w);
  }
  return pass("exhaustive");
}

CheckResult check_i_absorption(Ctx& ctx) {
  const Algebra& alg = ctx.alg();
  for (int a = 0; a < alg.size(); ++a) {
    Element ea{static_cast<uint8_t>(a)};
    if (!ea.in_E()) continue;
    for (int x = 0; x < alg.size(); ++x) {
      Element ex{static_cast<uint8_t>(x)};
      if (!ex.in_X()) continue;
      if (!alg.i_op(ea, ex).in_X())
        return failed("I(" + element_text(ea) + "," + element_text(ex) + ") leaves X");
    }
  }
  return pass("exhaustive");
}

CheckResult check_z_terms(Ctx& ctx) {
  const Algebra& alg = ctx.alg();
  std::vector<bool> reach = ctx.machine.reachable_from(1);
  int done = 0;
  for (int i = 0; i < ctx.machine.num_states(); ++i) {
    if (!reach[i]) continue;
    Term z = derive_z(alg, i);
    ++done;
    for (int x = 0; x < alg.size(); ++x) {
      Element ex{static_cast<uint8_t>(x)};
      Element got = eval_term(alg, z, std::array{ex});
      Element want = ex.in_C() ? Element::make(i, Content::zero) : Element::make(i, Content::cross);
      if (got != want)
        return failed("z_" + std::to_string(i) + "(" + element_text(ex) + ") = " +
                      element_text(got) + ", expected " + element_text(want));
    }
  }
  return pass("states checked: " + std::to_string(done));
}

CheckResult check_w_terms(Ctx& ctx) {
  const Algebra& alg = ctx.alg();
  std::vector<bool> good = ctx.machine.reaches_zero();
  int done = 0;
  for (int i = 0; i < ctx.machine.num_states(); ++i) {
    if (!good[i]) continue;
    Term w = derive_w(alg, i);
    ++done;
    for (Content c : {Content::cross, Content::zero, Content::reg_a, Content::reg_b}) {
      Element in = Element::make(i, c);
      Element got = eval_term(alg, w, std::array{in});
      Element want = c == Content::zero ? Element::make(0, Content::zero)
                                        : Element::make(0, Content::cross);
      if (got != want)
        return failed("w_" + std::to_string(i) + "(" + element_text(in) + ") = " +
                      element_text(got) + ", expected " + element_text(want));
    }
  }
  return pass("states checked: " + std::to_string(done));
}

Term random_mm_term(std::mt19937_64& rng, int depth) {
  Term t;
  // bottom-up random tree over {M, M'} with leaves x1/x2
  std::function<int(int)> build = [&](int d) -> int {
    std::uniform_int_distribution<int> leaf(0, 1);
    if (d <= 0 || std::uniform_int_distribution<int>(0, 3)(rng) == 0) {
      Term::Node n;
      n.op = -1;
      n.var = 1 + leaf(rng);
      t.nodes.push_back(n);
      return static_cast<int>(t.nodes.size()) - 1;
    }
    if (std::uniform_int_distribution<int>(0, 2)(rng) == 0) {
      int c = build(d - 1);
      Term::Node n;
      n.op = static_cast<int>(Op::mp);
      n.child[0] = c;
      t.nodes.push_back(n);
    } else {
      int c1 = build(d - 1);
      int c2 = build(d - 1);
      Term::Node n;
      n.op = static_cast<int>(Op::m);
      n.child[0] = c1;
      n.child[1] = c2;
      t.nodes.push_back(n);
    }
    return static_cast<int>(t.nodes.size()) - 1;
  };
  t.root = build(depth);
  return t;
}

CheckResult check_mm_identity(Ctx& ctx) {
  // diagonal identity on same-state argument pairs (it fails across states:
  // take the projection onto the second variable)
  const Algebra& alg = ctx.alg();
  std::mt19937_64 rng(ctx.opts.seed);
  std::uniform_int_distribution<int> pick(0, alg.size() - 1);
  int tried = 0;
  for (int s = 0; s < 10'000; ++s) {
    Term t = random_mm_term(rng, 3);
    Element a{static_cast<uint8_t>(pick(rng))};
    Element b = Element::make(a.state(), static_cast<Content>(rng() % 5));
    Element c = eval_term(alg, t, std::array{a, b});
    if (c.in_X()) continue;
    ++tried;
    Element diag = Element::make(a.state(), Content::zero);
    Element got = eval_term(alg, t, std::array{diag, diag});
    Element want = Element::make(c.state(), Content::zero);
    if (got != want)
      return failed(term_text(t) + " on " + element_text(a) + "," + element_text(b) +
                    " = " + element_text(c) + " but diagonal gives " + element_text(got));
  }
  return pass("non-X samples: " + std::to_string(tried));
}

CheckResult check_mm_state_forcing(Ctx& ctx) {
  const Algebra& alg = ctx.alg();
  for (int a = 0; a < alg.size(); ++a)
    for (int b = 0; b < alg.size(); ++b) {
      Element ea{static_cast<uint8_t>(a)}, eb{static_cast<uint8_t>(b)};
      if (!alg.m_op(ea, eb).in_X() && ea.state() != eb.state())
        return failed("M(" + element_text(ea) + "," + element_text(eb) + ") leaves X across states");
    }
  return pass("exhaustive");
}

// ---- encoding-example --------------------------------------------------------

const std::vector<Configuration>& example_table() {
  static const std::vector<Configuration> table = {
      {1, 0, 0}, {2, 1, 0}, {3, 1, 1}, {3, 0, 1}, {4, 0, 1}, {4, 0, 0}, {0, 0, 0}};
  return table;
}

CheckResult check_run_table(Ctx& ctx) {
  RunResult r = ctx.machine.run({1, 0, 0}, 10);
  std::vector<Configuration> got;
  Configuration cfg{1, 0, 0};
  got.push_back(cfg);
  while (cfg.state != 0) {
    cfg = ctx.machine.step(cfg);
    got.push_back(cfg);
  }
  if (got != example_table()) return failed("trace deviates from the expected 7 configurations");
  if (r.outcome != RunResult::Outcome::halted || r.steps != 6 || r.trace_max_sum != 2)
    return failed("run summary: steps=" + std::to_string(r.steps) +
                  " max=" + std::to_string(r.trace_max_sum));
  return pass();
}

Tup row3(const Algebra&, std::initializer_list<std::pair<int, Content>> elems) {
  Tup t{};
  int c = 0;
  for (auto [st, ct] : elems) t[c++] = Element::make(st, ct).code;
  return t;
}

CheckResult check_matrix_evals(Ctx& ctx) {
  const Algebra& alg = ctx.alg();
  constexpr Content O = Content::zero, D = Content::dot, A = Content::reg_a, B = Content::reg_b;
  struct Eval {
    bool unary;
    Tup x, y, want;
  };
  std::vector<Eval> evals = {
      {false, row3(alg, {{1, O}, {1, D}, {1, O}}), row3(alg, {{1, O}, {1, O}, {1, D}}),
       row3(alg, {{2, O}, {2, A}, {2, D}})},
      {false, row3(alg, {{2, O}, {2, D}, {2, A}}), row3(alg, {{2, D}, {2, O}, {2, A}}),
       row3(alg, {{3, D}, {3, B}, {3, A}})},
      {false, row3(alg, {{3, B}, {3, A}, {3, D}}), row3(alg, {{3, B}, {3, D}, {3, A}}),
       row3(alg, {{3, B}, {3, D}, {3, O}})},
      {true, row3(alg, {{3, O}, {3, B}, {3, D}}), {}, row3(alg, {{4, O}, {4, B}, {4, D}})},
      {false, row3(alg, {{4, B}, {4, D}, {4, O}}), row3(alg, {{4, D}, {4, B}, {4, O}}),
       row3(alg, {{4, D}, {4, O}, {4, O}})},
      {true, row3(alg, {{4, O}, {4, D}, {4, O}}), {}, row3(alg, {{0, O}, {0, D}, {0, O}})},
  };
  for (size_t k = 0; k < evals.size(); ++k) {
    const Eval& e = evals[k];
    Tup got{};
    for (int c = 0; c < 3; ++c)
      got[c] = e.unary ? alg.mp_op(e.x.at(c)).code : alg.m_op(e.x.at(c), e.y.at(c)).code;
    if (got != e.want)
      return failed("evaluation " + std::to_string(k + 1) + " gives " + tup_str(got, 3) +
                    ", expected " + tup_str(e.want, 3));
  }
  return pass("6 evaluations");
}

CheckResult check_sigma_config(Ctx& ctx) {
  std::vector<Tup> cfg = config_set(ctx.alg(), 1, 0, 0, 3);
  std::vector<Tup> sigma = sigma_generators(3);
  std::sort(sigma.begin(), sigma.end());
  if (cfg != sigma) return failed("Config(1,0,0) differs from the sigma generators");
  return pass();
}

CheckResult check_config_membership(Ctx& ctx) {
  const Relation& s3 = ctx.sm(3);
  for (const Configuration& c : example_table()) {
    for (const Tup& t : config_set(ctx.alg(), c.state, static_cast<int>(c.alpha),
                                   static_cast<int>(c.beta), 3))
      if (!s3.contains(t))
        return failed("Config(" + std::to_string(c.state) + "," + std::to_string(c.alpha) + "," +
                      std::to_string(c.beta) + ") not inside S_3: missing " + tup_str(t, 3));
  }
  return pass("7 configurations");
}

CheckResult check_s3_profile(Ctx& ctx) {
  RelationProfile p = classify(ctx.sm(3));
  if (!p.computational) return failed("S_3 not computational");
  if (p.capacity.value != 2) return failed("S_3 capacity " + std::to_string(p.capacity.value));
  if (!p.halting) return failed("S_3 not halting");
  return pass("|S_3| = " + std::to_string(ctx.sm(3).size()));
}

// ---- coding-theorem ----------------------------------------------------------

CheckResult check_coding_forward(Ctx& ctx, int m) {
  const Relation& sm = ctx.sm(m);
  auto trace = ctx.machine.bounded_trace(m - 1);
  int checked = 0;
  for (const Configuration& c : trace) {
    for (const Tup& t : config_set(ctx.alg(), c.state, static_cast<int>(c.alpha),
                                   static_cast<int>(c.beta), m))
      if (!sm.contains(t))
        return failed("step " + std::to_string(checked) + ": Config(" + std::to_string(c.state) +
                      "," + std::to_string(c.alpha) + "," + std::to_string(c.beta) +
                      ") not inside S_" + std::to_string(m));
    ++checked;
  }
  return pass("configurations checked: " + std::to_string(checked));
}

CheckResult check_coding_no_spurious(Ctx& ctx, int m) {
  if (ctx.machine.halts_with_capacity(m - 1))
    return skip("machine halts within capacity " + std::to_string(m - 1) +
                "; converse direction not applicable");
  const Relation& sm = ctx.sm(m);
  std::set<Configuration> reached;
  for (const Configuration& c : ctx.machine.bounded_trace(m - 1)) reached.insert(c);
  for (int k = 0; k < ctx.machine.num_states(); ++k)
    for (int alpha = 0; alpha < m; ++alpha)
      for (int beta = 0; alpha + beta < m; ++beta) {
        std::vector<Tup> cfg = config_set(ctx.alg(), k, alpha, beta, m);
        bool inside = std::all_of(cfg.begin(), cfg.end(),
                                  [&](const Tup& t) { return sm.contains(t); });
        bool simulated = reached.count({k, alpha, beta}) != 0;
        if (inside != simulated)
          return failed("Config(" + std::to_string(k) + "," + std::to_string(alpha) + "," +
                        std::to_string(beta) + ") " + (inside ? "inside" : "outside") + " S_" +
                        std::to_string(m) + " but " + (simulated ? "" : "not ") + "simulated");
      }
  return pass("exhaustive under the capacity bound " + std::to_string(m - 1) +
              " (trace closed by halt, cycle, or bound overflow)");
}

// ---- halting-equivalence -------------------------------------------------------

CheckResult check_halting_equiv(Ctx& ctx, int m) {
  bool halts = ctx.machine.halts_with_capacity(m - 1);
  bool s_halting = is_halting_set(ctx.sm(m).tuples(), m);
  if (halts != s_halting)
    return failed("halts-with-capacity-" + std::to_string(m - 1) + " = " +
                  (halts ? "true" : "false") + " but S_" + std::to_string(m) + " " +
                  (s_halting ? "halting" : "non-halting"));
  return pass(s_halting ? "both halting" : "both non-halting");
}

CheckResult check_embedding_spot(Ctx& ctx, int m) {
  if (!is_halting_set(ctx.sm(m).tuples(), m))
    return skip("S_" + std::to_string(m) + " non-halting; instance not applicable");
  int ell = m + 1;
  if (ell > kMaxArity) return skip("arity cap");
  // sigma generators padded with (1,0): a computational relation of the same
  // capacity inside a higher power
  std::vector<Tup> gens;
  for (const Tup& s : sigma_generators(m)) {
    Tup t = s;
    t[ell - 1] = Element::make(1, Content::zero).code;
    gens.push_back(t);
  }
  Relation embedded = generate(ctx.alg(), gens, ell, ctx.gen());
  if (embedded.stats().budget_exceeded) return skip("closure budget exceeded");
  RelationProfile p = classify(embedded);
  if (!p.computational) return failed("embedded relation not computational");
  if (p.capacity.value != m - 1)
    return failed("embedded capacity " + std::to_string(p.capacity.value));
  if (!p.halting) return failed("embedded relation non-halting despite halting S_m");
  return pass("embedded into arity " + std::to_string(ell));
}

// ---- relations-lemmas ----------------------------------------------------------

bool tup_leq(const Algebra& alg, const Tup& a, const Tup& b, int m) {
  for (int c = 0; c < m; ++c)
    if (alg.meet(a.at(c), b.at(c)) != a.at(c)) return false;
  return true;
}

bool tup_in_y(const Tup& t, int m) {
  for (int c = 0; c < m; ++c)
    if (t.at(c).in_X()) return false;
  return true;
}

// deterministic scan over arg tuples from a relation: exhaustive when small
template <class F>
std::optional<std::string> scan_rows(const Relation& rel, int nargs, uint64_t budget,
                                     uint64_t samples, uint64_t seed, F&& check) {
  uint64_t total = 1;
  for (int k = 0; k < nargs; ++k) {
    if (total > budget / std::max<size_t>(rel.size(), 1)) {
      total = UINT64_MAX;
      break;
    }
    total *= rel.size();
  }
  std::vector<Tup> args(nargs);
  if (total <= budget) {
    std::vector<size_t> idx(nargs, 0);
    for (;;) {
      for (int k = 0; k < nargs; ++k) args[k] = rel.tuples()[idx[k]];
      if (auto w = check(args)) return w;
      int k = nargs - 1;
      while (k >= 0 && ++idx[k] == rel.size()) idx[k--] = 0;
      if (k < 0) break;
    }
    return std::nullopt;
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<size_t> pick(0, rel.size() - 1);
  for (uint64_t s = 0; s < samples; ++s) {
    for (int k = 0; k < nargs; ++k) args[k] = rel.tuples()[pick(rng)];
    if (auto w = check(args)) return w;
  }
  return std::nullopt;
}

CheckResult check_n0_contraction(Ctx& ctx) {
  std::string note;
  for (int m : {2, 3}) {
    const Relation& r = ctx.sm(m);
    RelationProfile p = classify(r);
    if (!p.computational || p.halting) {
      note += "S_" + std::to_string(m) + " skipped; ";
      continue;
    }
    auto w = scan_rows(r, 3, 2'000'000, 100'000, ctx.opts.seed,
                       [&](std::span<const Tup> a) -> std::optional<std::string> {
                         Tup out{};
                         for (int c = 0; c < m; ++c)
                           out[c] = ctx.alg().n0_op(a[0].at(c), a[1].at(c), a[2].at(c)).code;
                         if (!tup_in_y(out, m) || out == a[2]) return std::nullopt;
                         return "N0 " + tup_str(a[0], m) + tup_str(a[1], m) + tup_str(a[2], m) +
                                " -> " + tup_str(out, m);
                       });
    if (w) return failed(*w);
    note += "S_" + std::to_string(m) + " ok; ";
  }
  return pass(note);
}

CheckResult check_ndot_order(Ctx& ctx) {
  for (int m : {2, 3}) {
    const Relation& r = ctx.sm(m);
    if (!classify(r).computational) continue;
    auto w = scan_rows(r, 4, 400'000, 100'000, ctx.opts.seed,
                       [&](std::span<const Tup> a) -> std::optional<std::string> {
                         Tup out{};
                         for (int c = 0; c < m; ++c)
                           out[c] =
                               ctx.alg().ndot_op(a[0].at(c), a[1].at(c), a[2].at(c), a[3].at(c)).code;
                         if (tup_leq(ctx.alg(), out, a[1], m) || tup_leq(ctx.alg(), out, a[2], m))
                           return std::nullopt;
                         return "Ndot output " + tup_str(out, m) + " not below " +
                                tup_str(a[1], m) + " or " + tup_str(a[2], m);
                       });
    if (w) return failed(*w);
  }
  return pass();
}

CheckResult check_p_choice(Ctx& ctx) {
  for (int m : {2, 3}) {
    const Relation& r = ctx.sm(m);
    if (!classify(r).synchronized) continue;
    auto w = scan_rows(r, 4, 400'000, 100'000, ctx.opts.seed,
                       [&](std::span<const Tup> a) -> std::optional<std::string> {
                         Tup out{};
                         for (int c = 0; c < m; ++c)
                           out[c] =
                               ctx.alg().p_op(a[0].at(c), a[1].at(c), a[2].at(c), a[3].at(c)).code;
                         if (out == a[2] || out == a[3]) return std::nullopt;
                         return "P output " + tup_str(out, m) + " not among its last two arguments";
                       });
    if (w) return failed(*w);
  }
  return pass();
}

CheckResult check_s_bound(Ctx& ctx) {
  for (int m : {2, 3}) {
    const Relation& r = ctx.sm(m);
    auto w = scan_rows(r, 3, 2'000'000, 100'000, ctx.opts.seed,
                       [&](std::span<const Tup> a) -> std::optional<std::string> {
                         Tup out{}, iaa{};
                         for (int c = 0; c < m; ++c) {
                           out[c] = ctx.alg().s_op(a[0].at(c), a[1].at(c), a[2].at(c)).code;
                           iaa[c] = ctx.alg().i_op(a[0].at(c), a[0].at(c)).code;
                         }
                         if (!tup_leq(ctx.alg(), out, iaa, m))
                           return "S output " + tup_str(out, m) + " not below I(a,a)";
                         bool all_x = true;
                         for (int c = 0; c < m; ++c)
                           if (!Element{out[c]}.in_X()) all_x = false;
                         if (!all_x && !tup_leq(ctx.alg(), out, a[0], m))
                           return "S output " + tup_str(out, m) + " outside X^m and not below a";
                         return std::nullopt;
                       });
    if (w) return failed(*w);
  }
  return pass();
}

CheckResult check_sync_intersection(Ctx& ctx) {
  if (ctx.alg().size() > 10) return skip("exhaustive tier needs a 2-state machine");
  for (int m : {1, 2}) {
    // intersection over all nonempty synchronized subpowers equals the
    // intersection of the closures of the synchronized singletons
    std::optional<std::vector<Tup>> inter;
    for (int st = 0; st < ctx.machine.num_states(); ++st) {
      std::vector<int> idx(m, 0);
      for (;;) {
        Tup t{};
        for (int c = 0; c < m; ++c)
          t[c] = Element::make(st, static_cast<Content>(idx[c])).code;
        Relation sg = generate(ctx.alg(), std::array{t}, m, ctx.gen());
        if (!inter) {
          inter = sg.tuples();
        } else {
          std::vector<Tup> next;
          std::set_intersection(inter->begin(), inter->end(), sg.tuples().begin(),
                                sg.tuples().end(), std::back_inserter(next));
          inter = std::move(next);
        }
        int k = m - 1;
        while (k >= 0 && ++idx[k] == 5) idx[k--] = 0;
        if (k < 0) break;
      }
    }
    std::vector<Tup> want;
    for (int st = 0; st < ctx.machine.num_states(); ++st) {
      Tup t{};
      for (int c = 0; c < m; ++c) t[c] = Element::make(st, Content::cross).code;
      want.push_back(t);
    }
    std::sort(want.begin(), want.end());
    if (*inter != want)
      return failed("arity " + std::to_string(m) + ": intersection has " +
                    std::to_string(inter->size()) + " tuples, expected " +
                    std::to_string(want.size()));
  }
  return pass("arities 1 and 2");
}

// ---- gadgets -------------------------------------------------------------------

const char* tier_name(CertTier t) {
  switch (t) {
    case CertTier::exhaustive: return "exhaustive";
    case CertTier::blockwise: return "blockwise";
    case CertTier::sampled: return "sampled";
  }
  return "?";
}

CheckResult check_gadget_closed(Ctx& ctx, GadgetId id) {
  const CertificationReport& rep = ctx.cert();
  for (const GadgetCertificate& g : rep.gadgets) {
    if (g.id != id) continue;
    for (const OpCertificate& oc : g.per_op)
      if (!oc.closed)
        return failed(witness_str(*oc.witness, gadget_arity(id)));
    return pass(tier_name(rep.tier));
  }
  return failed("gadget not certified");
}

CheckResult check_gamma_reduct(Ctx& ctx) {
  const CertificationReport& rep = ctx.cert();
  for (const OpCertificate& oc : rep.gamma_reduct.per_op)
    if (!oc.closed) return failed(witness_str(*oc.witness, 4));
  if (!rep.gamma_i_violation) return failed("no I-violation found on gamma");
  return pass("I-violation: " + witness_str(*rep.gamma_i_violation, 4));
}

CheckResult check_delta_dotfree(Ctx& ctx) {
  for (GadgetId id : {GadgetId::delta_forall, GadgetId::delta_exists_a, GadgetId::delta_exists_b,
                      GadgetId::gamma, GadgetId::mu, GadgetId::chi}) {
    Relation g = build_gadget(ctx.alg(), id);
    for (const Tup& t : g.tuples())
      for (int c = 0; c < g.arity(); ++c)
        if (t.at(c).in_D())
          return failed(std::string(gadget_name(id)) + " contains a dot element: " +
                        tup_str(t, g.arity()));
  }
  return pass();
}

CheckResult check_gamma_determinism(Ctx& ctx) {
  Relation g = build_gadget(ctx.alg(), GadgetId::gamma);
  for (const Tup& t : g.tuples()) {
    if (!tup_in_y(t, 4)) continue;
    if (t[3] != t[0] && t[3] != t[1] && t[3] != t[2])
      return failed("gamma Y-tuple with free last coordinate: " + tup_str(t, 4));
  }
  return pass("exhaustive over gamma");
}

CheckResult check_gadget_sync(Ctx& ctx) {
  for (GadgetId id : {GadgetId::mu, GadgetId::chi, GadgetId::delta_forall,
                      GadgetId::delta_exists_a, GadgetId::delta_exists_b, GadgetId::gamma}) {
    Relation g = build_gadget(ctx.alg(), id);
    for (const Tup& t : g.tuples()) {
      int state = -1;
      bool ok = true;
      for (int c = 0; c < g.arity(); ++c) {
        if (t.at(c).in_X()) continue;
        if (state == -1) state = t.at(c).state();
        ok = ok && t.at(c).state() == state;
      }
      if (!ok)
        return failed(std::string(gadget_name(id)) + " tuple not single-state off X: " +
                      tup_str(t, g.arity()));
    }
  }
  return pass();
}

// ---- tools ---------------------------------------------------------------------

CheckResult check_ri_permutation(Ctx& ctx) {
  const Relation& r = ctx.sm(3);
  Relation ri = build_RI(ctx.alg(), r, ctx.gen());
  if (ri.empty()) return skip("R_I empty");
  std::vector<int> perm{0, 1, 2};
  // K here is all of [3] for S_3, so every permutation must fix R_I
  do {
    Relation p = permute_relation(ri, perm);
    if (!(p == ri)) return failed("permutation " + coord_set_str(perm) + " moves R_I");
  } while (std::next_permutation(perm.begin(), perm.end()));
  return pass("all 6 permutations");
}

CheckResult check_ri_halting_equiv(Ctx& ctx) {
  for (int m : {2, 3}) {
    const Relation& r = ctx.sm(m);
    RelationProfile p = classify(r);
    if (p.dot_part.empty()) continue;
    Relation ri = build_RI(ctx.alg(), r, ctx.gen());
    bool rh = p.halting;
    bool rih = is_halting_set(ri.tuples(), m);
    if (rh != rih)
      return failed("S_" + std::to_string(m) + (rh ? " halting" : " non-halting") + " but R_I " +
                    (rih ? "halting" : "non-halting"));
  }
  return pass();
}

CheckResult check_ri_dot_part(Ctx& ctx) {
  for (int m : {2, 3}) {
    const Relation& r = ctx.sm(m);
    RelationProfile p = classify(r);
    if (p.dot_part.size() < 2) continue;
    Relation ri = build_RI(ctx.alg(), r, ctx.gen());
    RelationProfile pi = classify(ri);
    std::vector<int> want;
    std::set_intersection(p.dot_part.begin(), p.dot_part.end(), p.approx_halting.begin(),
                          p.approx_halting.end(), std::back_inserter(want));
    if (pi.dot_part != want)
      return failed("S_" + std::to_string(m) + ": D(R_I) = " + coord_set_str(pi.dot_part) +
                    ", expected " + coord_set_str(want));
  }
  return pass();
}

CheckResult check_ri_structure(Ctx& ctx) {
  const Relation& r = ctx.sm(3);
  Relation ri = build_RI(ctx.alg(), r, ctx.gen());
  RelationProfile pi = classify(ri);
  if (pi.dot_part.empty()) return skip("D(R_I) empty");
  Relation proj = project(ri, pi.dot_part);
  Relation want = ctx.sm(static_cast<int>(pi.dot_part.size()));
  if (!(proj == want))
    return failed("R_I projected to its dot part has " + std::to_string(proj.size()) +
                  " tuples, S_" + std::to_string(pi.dot_part.size()) + " has " +
                  std::to_string(want.size()));
  return pass("|D_I| = " + std::to_string(pi.dot_part.size()));
}

CheckResult check_sigma_vectors(Ctx& ctx) {
  for (int m : {2, 3}) {
    const Relation& r = ctx.sm(m);
    RelationProfile p = classify(r);
    std::vector<int> dh;
    std::set_intersection(p.dot_part.begin(), p.dot_part.end(), p.approx_halting.begin(),
                          p.approx_halting.end(), std::back_inserter(dh));
    for (int i : dh) {
      Tup sigma{};
      for (int c = 0; c < m; ++c)
        sigma[c] = Element::make(1, c == i ? Content::dot : Content::zero).code;
      if (!r.contains(sigma))
        return failed("S_" + std::to_string(m) + " misses sigma_" + std::to_string(i + 1));
    }
  }
  return pass();
}

CheckResult check_halting_c_equiv(Ctx& ctx) {
  for (int m : {2, 3}) {
    const Relation& r = ctx.sm(m);
    RelationProfile p = classify(r);
    if (p.dot_part.empty()) continue;
    bool c_nonempty = false;
    for (const Tup& t : r.tuples()) {
      bool all_c = true;
      for (int c = 0; c < m; ++c)
        if (!t.at(c).in_C()) all_c = false;
      if (all_c) {
        c_nonempty = true;
        break;
      }
    }
    if (p.halting != c_nonempty)
      return failed("S_" + std::to_string(m) + ": halting=" + (p.halting ? "true" : "false") +
                    " but C-part " + (c_nonempty ? "nonempty" : "empty"));
  }
  return pass();
}

CheckResult check_capacity_coherence(Ctx& ctx) {
  for (int m : {2, 3}) {
    const Relation& r = ctx.sm(m);
    RelationProfile p = classify(r);
    if (!p.computational) continue;
    std::vector<int> dh;
    std::set_intersection(p.dot_part.begin(), p.dot_part.end(), p.approx_halting.begin(),
                          p.approx_halting.end(), std::back_inserter(dh));
    long long want = static_cast<long long>(dh.size()) - 1;
    if (p.capacity.value != want)
      return failed("S_" + std::to_string(m) + " capacity " + std::to_string(p.capacity.value) +
                    " != |D∩H|-1 = " + std::to_string(want));
  }
  return pass();
}

CheckResult check_weak_capacity(Ctx& ctx) {
  for (int m : {2, 3}) {
    const Relation& r = ctx.sm(m);
    RelationProfile p = classify(r);
    bool c_nonempty = false;
    for (const Tup& t : r.tuples()) {
      bool all_c = true;
      for (int c = 0; c < m; ++c)
        if (!t.at(c).in_C()) all_c = false;
      if (all_c) c_nonempty = true;
    }
    if (c_nonempty && p.weak_capacity.value != p.capacity.value)
      return failed("S_" + std::to_string(m) + ": weak capacity " +
                    std::to_string(p.weak_capacity.value) + " != capacity " +
                    std::to_string(p.capacity.value) + " despite a C-tuple");
    if (p.capacity.value > p.weak_capacity.value)
      return failed("capacity exceeds weak capacity");
  }
  return pass();
}

CheckResult check_nonhalting_capacity_bound(Ctx& ctx) {
  CapacityReport cap = ctx.machine.capacity(ctx.opts.fuel);
  if (!cap.halted) return skip("machine capacity unknown within fuel");
  for (int m : {2, 3}) {
    const Relation& r = ctx.sm(m);
    RelationProfile p = classify(r);
    if (!p.computational || p.halting) continue;
    std::vector<int> dh;
    std::set_intersection(p.dot_part.begin(), p.dot_part.end(), p.approx_halting.begin(),
                          p.approx_halting.end(), std::back_inserter(dh));
    if (static_cast<long long>(dh.size()) > cap.capacity)
      return failed("non-halting S_" + std::to_string(m) + " has |D∩H| = " +
                    std::to_string(dh.size()) + " above machine capacity " +
                    std::to_string(cap.capacity));
  }
  return pass();
}

CheckResult check_inherent_nonhalting(Ctx& ctx) {
  CapacityReport cap = ctx.machine.capacity(ctx.opts.fuel);
  int verified = 0;
  for (int m : {2, 3}) {
    const Relation& r = ctx.sm(m);
    RelationProfile p = classify(r);
    if (!p.computational || p.halting) continue;
    std::vector<int> nh = inherent_nonhalting(ctx.alg(), r);
    Relation sub = project(r, nh);
    if (is_halting_set(sub.tuples(), sub.arity()))
      return failed("R(N) halting for S_" + std::to_string(m));
    std::vector<int> nd;
    std::set_intersection(nh.begin(), nh.end(), p.dot_part.begin(), p.dot_part.end(),
                          std::back_inserter(nd));
    if (!p.dot_part.empty() && nd.empty())
      return failed("N misses the dot part for S_" + std::to_string(m));
    if (cap.halted && static_cast<long long>(nd.size()) > cap.capacity)
      return failed("|N∩D| = " + std::to_string(nd.size()) + " exceeds machine capacity " +
                    std::to_string(cap.capacity));
    for (int c = 0; c < m; ++c)
      if (std::find(p.dot_part.begin(), p.dot_part.end(), c) == p.dot_part.end() &&
          std::find(nh.begin(), nh.end(), c) == nh.end())
        return failed("non-dot coordinate " + std::to_string(c + 1) + " missing from N");
    if (p.dot_part.size() <= 1 && static_cast<int>(nh.size()) != m)
      return failed("|D| <= 1 but N != [m] for S_" + std::to_string(m));
    ++verified;
  }
  if (verified == 0) return skip("no computational non-halting relation in the corpus");
  return pass("relations verified: " + std::to_string(verified));
}

CheckResult check_ri_off_dot(Ctx& ctx) {
  int m = 3;
  if (static_cast<uint64_t>(std::pow(ctx.alg().size(), m)) > 1'000'000)
    return skip("domain too large for the exhaustive sweep");
  const Relation& r = ctx.sm(m);
  Relation ri = build_RI(ctx.alg(), r, ctx.gen());
  if (ri.empty()) return skip("R_I empty");
  RelationProfile pi = classify(ri);
  if (pi.dot_part.empty()) return skip("D(R_I) empty; structure law not in force");
  std::vector<int> L;
  for (int c = 0; c < m; ++c)
    if (std::find(pi.dot_part.begin(), pi.dot_part.end(), c) == pi.dot_part.end()) L.push_back(c);
  Relation ri_dots = pi.dot_part.empty() ? Relation() : project(ri, pi.dot_part);

  int n = ctx.alg().size();
  std::vector<int> idx(m, 0);
  for (;;) {
    Tup t{};
    for (int c = 0; c < m; ++c) t[c] = static_cast<uint8_t>(idx[c]);
    bool lhs = ri.contains(t);
    // right side: synchronized, dot-part projection inside, L constant 0 or x
    bool rhs = true;
    int state = t.at(0).state();
    for (int c = 1; c < m; ++c)
      if (t.at(c).state() != state) rhs = false;
    if (rhs && !pi.dot_part.empty()) {
      Tup pd{};
      for (size_t k = 0; k < pi.dot_part.size(); ++k) pd[static_cast<int>(k)] = t[pi.dot_part[k]];
      rhs = ri_dots.contains(pd);
    }
    if (rhs && !L.empty()) {
      bool all_zero = true, all_cross = true;
      for (int c : L) {
        if (t.at(c).content() != Content::zero) all_zero = false;
        if (t.at(c).content() != Content::cross) all_cross = false;
      }
      rhs = all_zero || all_cross;
    }
    if (lhs != rhs)
      return failed(tup_str(t, m) + (lhs ? " inside" : " outside") + " R_I but structure says " +
                    (rhs ? "inside" : "outside"));
    int k = m - 1;
    while (k >= 0 && ++idx[k] == n) idx[k--] = 0;
    if (k < 0) break;
  }
  return pass("swept " + std::to_string(static_cast<uint64_t>(std::pow(n, m))) + " tuples");
}

CheckResult check_chi_compat(Ctx& ctx) {
  const Relation& r = ctx.sm(3);
  RelationProfile p = classify(r);
  std::vector<int> K;
  for (int c = 0; c < 3; ++c)
    if (std::find(p.dot_part.begin(), p.dot_part.end(), c) == p.dot_part.end()) K.push_back(c);
  std::vector<Tup> sigma = sigma_generators(3);
  bool compat = chi_compatible(sigma, 3, K);
  if (K.empty() && !compat) return failed("empty K must be compatible");
  return pass(std::string("sigma_3 over default K ") + coord_set_str(K) + ": " +
              (compat ? "compatible" : "incompatible"));
}

// ---- t-halting -----------------------------------------------------------------

CheckResult check_degree_hint(Ctx& ctx) {
  // reported, never certified: a halting machine of capacity c caps the
  // degree of the derived algebra at c + 15
  CapacityReport cap = ctx.machine.capacity(ctx.opts.fuel);
  if (!cap.halted)
    return pass("machine capacity unknown within fuel; no ceiling to report");
  return pass("machine capacity " + std::to_string(cap.capacity) + "; degree ceiling hint " +
              std::to_string(cap.capacity + 15) + " (reported, not certified)");
}

CheckResult check_t_halting(Ctx& ctx) {
  std::vector<Tup> gens;
  Tup a{}, b{};
  a[0] = Element::make(1, Content::dot).code;
  b[0] = Element::make(1, Content::zero).code;
  gens.push_back(a);
  gens.push_back(b);
  Relation t = generate(ctx.alg(), gens, 1, ctx.gen());
  bool halting = is_halting_set(t.tuples(), 1);
  CapacityReport cap = ctx.machine.capacity(ctx.opts.fuel);
  if (cap.halted && !halting)
    return failed("machine halts but the unary initial-state subpower is non-halting");
  return pass(std::string("gate value: ") + (halting ? "halting" : "non-halting") + ", |T| = " +
              std::to_string(t.size()));
}

// ---- suite assembly ------------------------------------------------------------

std::vector<Check> suite_checks(const std::string& suite, Ctx& ctx) {
  std::vector<Check> checks;
  auto add = [&](std::string id, std::string anchor, std::function<CheckResult()> fn) {
    checks.push_back({std::move(id), std::move(anchor), std::move(fn)});
  };

  if (suite == "basic-facts") {
    add("state-homomorphism", "basic-facts/state-map", [&] { return check_state_homomorphism(ctx); });
    add("x-absorption", "basic-facts/x-absorption", [&] { return check_x_absorption(ctx); });
    add("i-absorption-on-e", "basic-facts/i-absorption", [&] { return check_i_absorption(ctx); });
    add("z-terms", "basic-facts/z-terms", [&] { return check_z_terms(ctx); });
    add("w-terms", "basic-facts/w-terms", [&] { return check_w_terms(ctx); });
    add("mm-diagonal-identity", "basic-facts/mm-identity", [&] { return check_mm_identity(ctx); });
    add("mm-state-forcing", "basic-facts/mm-forcing", [&] { return check_mm_state_forcing(ctx); });
  } else if (suite == "encoding-example") {
    if (!ctx.is_example_machine()) {
      add("fixture", "encoding-example/fixture",
          [] { return skip("suite is specific to the worked example machine"); });
      return checks;
    }
    add("run-table", "encoding-example/run-table", [&] { return check_run_table(ctx); });
    add("matrix-evals", "encoding-example/matrix-evals", [&] { return check_matrix_evals(ctx); });
    add("sigma-config", "encoding-example/sigma-config", [&] { return check_sigma_config(ctx); });
    add("config-membership", "encoding-example/config-membership",
        [&] { return check_config_membership(ctx); });
    add("s3-profile", "encoding-example/s3-profile", [&] { return check_s3_profile(ctx); });
  } else if (suite == "coding-theorem") {
    for (int m : {3, 4}) {
      add("forward-m" + std::to_string(m), "coding-theorem/forward",
          [&ctx, m] { return check_coding_forward(ctx, m); });
      add("no-spurious-m" + std::to_string(m), "coding-theorem/converse",
          [&ctx, m] { return check_coding_no_spurious(ctx, m); });
    }
  } else if (suite == "halting-equivalence") {
    for (int m : {2, 3, 4})
      add("equivalence-m" + std::to_string(m), "halting-equivalence/coding",
          [&ctx, m] { return check_halting_equiv(ctx, m); });
    add("embedding-spot-m3", "halting-equivalence/embedding",
        [&] { return check_embedding_spot(ctx, 3); });
  } else if (suite == "relations-lemmas") {
    add("n0-contraction", "relations/n0-contraction", [&] { return check_n0_contraction(ctx); });
    add("ndot-order", "relations/ndot-order", [&] { return check_ndot_order(ctx); });
    add("p-choice", "relations/p-choice", [&] { return check_p_choice(ctx); });
    add("s-bound", "relations/s-bound", [&] { return check_s_bound(ctx); });
    add("sync-intersection", "relations/sync-intersection",
        [&] { return check_sync_intersection(ctx); });
  } else if (suite == "gadgets") {
    for (GadgetId id : {GadgetId::mu, GadgetId::chi, GadgetId::delta_forall,
                        GadgetId::delta_exists_a, GadgetId::delta_exists_b})
      add(std::string(gadget_name(id)) + "-closed", "gadgets/closure",
          [&ctx, id] { return check_gadget_closed(ctx, id); });
    add("gamma-reduct", "gadgets/gamma-reduct", [&] { return check_gamma_reduct(ctx); });
    add("dot-free", "gadgets/dot-free", [&] { return check_delta_dotfree(ctx); });
    add("gamma-determinism", "gadgets/gamma-determinism",
        [&] { return check_gamma_determinism(ctx); });
    add("state-blocks", "gadgets/state-blocks", [&] { return check_gadget_sync(ctx); });
  } else if (suite == "tools") {
    add("ri-permutation", "tools/ri-permutation", [&] { return check_ri_permutation(ctx); });
    add("ri-halting", "tools/ri-halting", [&] { return check_ri_halting_equiv(ctx); });
    add("ri-dot-part", "tools/ri-dot-part", [&] { return check_ri_dot_part(ctx); });
    add("ri-structure", "tools/ri-structure", [&] { return check_ri_structure(ctx); });
    add("sigma-vectors", "tools/sigma-vectors", [&] { return check_sigma_vectors(ctx); });
    add("halting-c-part", "tools/halting-c-part", [&] { return check_halting_c_equiv(ctx); });
    add("capacity-coherence", "tools/capacity", [&] { return check_capacity_coherence(ctx); });
    add("weak-capacity", "tools/weak-capacity", [&] { return check_weak_capacity(ctx); });
    add("nonhalting-capacity-bound", "tools/nonhalting-bound",
        [&] { return check_nonhalting_capacity_bound(ctx); });
    add("degree-hint", "tools/degree-hint", [&] { return check_degree_hint(ctx); });
    add("inherent-nonhalting", "tools/inherent-nonhalting",
        [&] { return check_inherent_nonhalting(ctx); });
    add("ri-off-dot", "tools/ri-off-dot", [&] { return check_ri_off_dot(ctx); });
    add("chi-compatibility", "tools/chi-compatibility", [&] { return check_chi_compat(ctx); });
  } else if (suite == "t-halting") {
    add("t-halting", "t-halting/gate", [&] { return check_t_halting(ctx); });
  } else {
    fail(ErrorCode::invalid, "unknown suite `" + suite + "`");
  }
  return checks;
}

void warm_context(const std::string& suite, Ctx& ctx) {
  // everything the checks read concurrently is built up front
  ctx.alg();
  if (suite == "encoding-example" && ctx.is_example_machine()) ctx.sm(3);
  if (suite == "coding-theorem") {
    ctx.sm(3);
    ctx.sm(4);
  }
  if (suite == "halting-equivalence") {
    ctx.sm(2);
    ctx.sm(3);
    ctx.sm(4);
  }
  if (suite == "relations-lemmas" || suite == "tools") {
    ctx.sm(2);
    ctx.sm(3);
  }
  if (suite == "gadgets") ctx.cert();
}

} // namespace

MinskyMachine example_machine() {
  return MinskyMachine(5, {Instruction::inc(1, Reg::A, 2), Instruction::inc(2, Reg::B, 3),
                           Instruction::dec(3, Reg::A, 4, 3), Instruction::dec(4, Reg::B, 0, 4)});
}

std::vector<std::string> suite_names() {
  return {"basic-facts",   "encoding-example", "coding-theorem", "halting-equivalence",
          "relations-lemmas", "gadgets",       "tools",          "t-halting"};
}

bool is_suite_name(const std::string& name) {
  auto names = suite_names();
  return std::find(names.begin(), names.end(), name) != names.end();
}

SuiteReport run_suite(const MinskyMachine& machine, const std::string& suite,
                      const SuiteOptions& opts) {
  if (!is_suite_name(suite)) fail(ErrorCode::invalid, "unknown suite `" + suite + "`");
  SuiteReport report;
  report.suite = suite;
  report.opts = opts;

  Ctx ctx{machine, opts, {}, {}, {}};
  if (!machine.has_instruction_per_state()) {
    ctx.machine = machine.normalize();
    report.was_normalized = true;
  }
  report.num_states = ctx.machine.num_states();

  std::vector<Check> checks;
  std::vector<CheckRecord> records;
  try {
    warm_context(suite, ctx);
    checks = suite_checks(suite, ctx);
  } catch (const Error& e) {
    CheckRecord rec;
    rec.id = "setup";
    rec.anchor = suite + "/setup";
    rec.status = e.code() == ErrorCode::budget ? Status::skip : Status::fail;
    rec.witness = e.what();
    report.checks.push_back(rec);
    report.failed = rec.status == Status::fail ? 1 : 0;
    report.skipped = rec.status == Status::skip ? 1 : 0;
    return report;
  }

  records.resize(checks.size());
  auto run_one = [&](size_t k) {
    auto t0 = std::chrono::steady_clock::now();
    CheckRecord& rec = records[k];
    rec.id = checks[k].id;
    rec.anchor = checks[k].anchor;
    try {
      CheckResult res = checks[k].fn();
      rec.status = res.status;
      rec.witness = res.witness;
    } catch (const Error& e) {
      rec.status = e.code() == ErrorCode::budget ? Status::skip : Status::fail;
      rec.witness = e.what();
    } catch (const std::exception& e) {
      rec.status = Status::fail;
      rec.witness = e.what();
    }
    rec.millis =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  };

  if (opts.workers > 1) {
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < opts.workers; ++w)
      pool.emplace_back([&] {
        for (;;) {
          size_t k = next.fetch_add(1);
          if (k >= checks.size()) break;
          run_one(k);
        }
      });
    for (auto& th : pool) th.join();
  } else {
    for (size_t k = 0; k < checks.size(); ++k) run_one(k);
  }

  report.checks = std::move(records);
  for (const CheckRecord& rec : report.checks) {
    if (rec.status == Status::pass) ++report.passed;
    if (rec.status == Status::fail) ++report.failed;
    if (rec.status == Status::skip) ++report.skipped;
  }
  for (const auto& [m, rel] : ctx.sm_)
    report.closures.push_back(
        {m, rel.size(), rel.stats().rounds, rel.stats().peak_frontier});
  return report;
}

// Reports never mention the worker count: results are worker-independent by
// construction and the rendered bytes must be too.
std::string report_text(const SuiteReport& report, bool timings) {
  std::ostringstream out;
  out << "suite " << report.suite << "\n";
  out << "states " << report.num_states << (report.was_normalized ? " (normalized)" : "") << "\n";
  out << "seed 0x" << std::hex << report.opts.seed << std::dec << "\n";
  out << "budget-tuples " << report.opts.budget_tuples << "\n";
  out << "fuel " << report.opts.fuel << "\n";
  for (const CheckRecord& rec : report.checks) {
    const char* status = rec.status == Status::pass   ? "pass"
                         : rec.status == Status::fail ? "fail"
                                                      : "skip";
    out << "check " << rec.id << " " << status;
    if (!rec.witness.empty()) out << " | " << rec.witness;
    if (timings) out << " | " << rec.millis << " ms";
    out << "\n";
  }
  for (const ClosureLine& cl : report.closures)
    out << "closure S_" << cl.arity << " tuples=" << cl.tuples << " rounds=" << cl.rounds
        << " peak-frontier=" << cl.peak_frontier << "\n";
  out << "result pass=" << report.passed << " fail=" << report.failed
      << " skip=" << report.skipped << "\n";
  out << "scope instance-level and property-based checks on this machine; no "
         "universally quantified statement is certified\n";
  return out.str();
}

std::string report_structured(const SuiteReport& report, bool timings) {
  std::ostringstream out;
  for (const CheckRecord& rec : report.checks) {
    nlohmann::json j;
    j["check"] = rec.id;
    j["anchor"] = rec.anchor;
    j["status"] = rec.status == Status::pass   ? "pass"
                  : rec.status == Status::fail ? "fail"
                                               : "skip";
    j["witness"] = rec.witness.empty() ? nlohmann::json() : nlohmann::json(rec.witness);
    j["millis"] = timings ? nlohmann::json(rec.millis) : nlohmann::json();
    out << j.dump() << "\n";
  }
  nlohmann::json sum;
  sum["suite"] = report.suite;
  sum["states"] = report.num_states;
  sum["seed"] = report.opts.seed;
  sum["pass"] = report.passed;
  sum["fail"] = report.failed;
  sum["skip"] = report.skipped;
  sum["scope"] = "instance-level";
  nlohmann::json closures = nlohmann::json::array();
  for (const ClosureLine& cl : report.closures) {
    nlohmann::json j;
    j["arity"] = cl.arity;
    j["tuples"] = cl.tuples;
    j["rounds"] = cl.rounds;
    j["peak_frontier"] = cl.peak_frontier;
    closures.push_back(j);
  }
  sum["closures"] = closures;
  out << sum.dump() << "\n";
  return out.str();
}

} // namespace cf
