#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <set>

#include "support/closure_oracle.hpp"
#include "verify.hpp"

using namespace cf;

namespace {

Element el(int st, Content c) { return Element::make(st, c); }

Algebra example_algebra() { return Algebra(example_machine()); }

Algebra pingpong_algebra() { return Algebra(MinskyMachine::parse("1 A 2\n2 A 0 1\n")); }

Tup tup(std::initializer_list<Element> elems) {
  std::vector<Element> v(elems);
  return make_tup(v);
}

std::set<Tup> as_set(const Relation& r) { return {r.tuples().begin(), r.tuples().end()}; }

} // namespace

TEST_CASE("tuple text round-trip and ordering") {
  Tup t = tup({el(1, Content::dot), el(2, Content::reg_a)});
  CHECK(tuple_text(t, 2) == "(1,.),(2,A)");
  CHECK(parse_tuple("(1,.),(2,A)", 2, 5) == t);
  CHECK_THROWS_AS(parse_tuple("(1,.)", 2, 5), Error);
  CHECK_THROWS_AS(parse_tuple("(1,.),(2,A),(1,0)", 2, 5), Error);
  // lexicographic by coordinate
  Tup u = tup({el(1, Content::dot), el(3, Content::zero)});
  CHECK(t < u);
}

TEST_CASE("relation file round-trip keeps generators and ordering") {
  Algebra a = example_algebra();
  Relation s2 = sequential_relation(a, 2);
  std::string text = s2.to_text();
  Relation back = Relation::from_text(text);
  CHECK(back == s2);
  CHECK(back.generators() == s2.generators());
  CHECK(back.to_text() == text); // canonical form is stable
}

TEST_CASE("generate rejects an empty generator set") {
  Algebra a = example_algebra();
  CHECK_THROWS_AS(generate(a, {}, 2), Error);
}

TEST_CASE("generate matches the brute-force oracle on random generator sets") {
  // the oracle costs |R|^4 per round, so trials whose closure outgrows a small
  // cap are skipped; enough survive to exercise every operation path
  std::mt19937_64 rng(0xC10E);
  int compared = 0;
  for (const char* text : {"1 A 1\n", "1 A 2\n2 A 0 1\n"}) {
    Algebra a(MinskyMachine::parse(text));
    for (int trial = 0; trial < 30; ++trial) {
      int m = 1 + static_cast<int>(rng() % 2);
      int ngens = 1 + static_cast<int>(rng() % 3);
      std::set<Tup> gens;
      for (int g = 0; g < ngens; ++g) {
        Tup t{};
        for (int c = 0; c < m; ++c) t[c] = static_cast<uint8_t>(rng() % a.size());
        gens.insert(t);
      }
      std::set<Tup> expect;
      try {
        expect = cf_oracle::brute_closure(a, gens, m, 60);
      } catch (const Error&) {
        continue; // closure too large for the quartic oracle
      }
      std::vector<Tup> gv(gens.begin(), gens.end());
      Relation got = generate(a, gv, m);
      CAPTURE(text);
      CAPTURE(trial);
      REQUIRE(!got.stats().budget_exceeded);
      CHECK(as_set(got) == expect);
      ++compared;
    }
  }
  CHECK(compared >= 20);
}

TEST_CASE("double-dot generators (joint z-dependence) still match brute force") {
  // a tuple with two dot coordinates drives Ndot into its exhaustive mode
  Algebra a = pingpong_algebra();
  std::set<Tup> gens{tup({el(1, Content::dot), el(1, Content::dot)}),
                     tup({el(1, Content::reg_a), el(1, Content::reg_b)}),
                     tup({el(2, Content::zero), el(1, Content::zero)})};
  std::set<Tup> expect = cf_oracle::brute_closure(a, gens, 2, 3000);
  std::vector<Tup> gv(gens.begin(), gens.end());
  Relation got = generate(a, gv, 2);
  CHECK(as_set(got) == expect);
}

TEST_CASE("arity-3 constant-tuple closure matches brute force") {
  Algebra a = pingpong_algebra();
  auto constant = [&](Element e) { return tup({e, e, e}); };
  std::set<Tup> gens{constant(el(1, Content::dot)), constant(el(2, Content::reg_a))};
  std::set<Tup> expect = cf_oracle::brute_closure(a, gens, 3, 500);
  std::vector<Tup> gv(gens.begin(), gens.end());
  Relation got = generate(a, gv, 3);
  CHECK(as_set(got) == expect);
  // constants in, constants out
  for (const Tup& t : got.tuples()) CHECK((t[0] == t[1] && t[1] == t[2]));
}

TEST_CASE("generated S_2 passes a brute-force one-pass closedness scan") {
  for (const char* text : {"1 A 2\n2 B 3\n3 A 4 3\n4 B 0 4\n", "1 A 2\n2 A 0 1\n"}) {
    Algebra a(MinskyMachine::parse(text));
    Relation s2 = sequential_relation(a, 2);
    CAPTURE(text);
    CHECK(!cf_oracle::brute_violation(a, s2.tuples(), 2, kAllOpsMask).has_value());
  }
}

TEST_CASE("generate is idempotent on closed sets") {
  Algebra a = example_algebra();
  Relation s2 = sequential_relation(a, 2);
  Relation again = generate(a, s2.tuples(), 2);
  CHECK(as_set(again) == as_set(s2));
  CHECK(again.stats().rounds == 0);
}

TEST_CASE("generate is worker-count independent") {
  Algebra a = example_algebra();
  GenerateOptions seq, par;
  seq.workers = 1;
  par.workers = 4;
  Relation r1 = sequential_relation(a, 3, seq);
  Relation r4 = sequential_relation(a, 3, par);
  CHECK(r1 == r4);
  CHECK(r1.stats().rounds == r4.stats().rounds);
  CHECK(r1.stats().peak_frontier == r4.stats().peak_frontier);
  CHECK(r1.to_text() == r4.to_text());
}

TEST_CASE("closure of a cross-content tuple stays inside X^m") {
  Algebra a = example_algebra();
  Tup t = tup({el(2, Content::cross), el(4, Content::cross)});
  Relation r = generate(a, std::array{t}, 2);
  for (const Tup& u : r.tuples())
    for (int c = 0; c < 2; ++c) CHECK(u.at(c).in_X());
}

TEST_CASE("closed_under agrees with the brute-force violation scan") {
  std::mt19937_64 rng(0x5EED);
  Algebra a = pingpong_algebra();
  for (int trial = 0; trial < 60; ++trial) {
    int m = 1 + static_cast<int>(rng() % 2);
    std::set<Tup> set;
    int n = 2 + static_cast<int>(rng() % 10);
    for (int g = 0; g < n; ++g) {
      Tup t{};
      for (int c = 0; c < m; ++c) t[c] = static_cast<uint8_t>(rng() % a.size());
      set.insert(t);
    }
    std::vector<Tup> tuples(set.begin(), set.end());
    unsigned mask = static_cast<unsigned>(rng() % 0x200);
    auto fast = closed_under(a, tuples, m, mask);
    auto brute = cf_oracle::brute_violation(a, tuples, m, mask);
    CAPTURE(trial);
    CHECK(fast.has_value() == brute.has_value());
    if (fast) {
      // witness must actually reproduce: re-apply the operation
      std::array<Element, 4> args;
      Tup out{};
      for (int c = 0; c < m; ++c) {
        for (size_t i = 0; i < fast->args.size(); ++i) args[i] = fast->args[i].at(c);
        out[c] = a.apply(fast->op, std::span<const Element>(args.data(), fast->args.size())).code;
      }
      CHECK(out == fast->out);
      CHECK(!std::binary_search(tuples.begin(), tuples.end(), out));
    }
  }
}

TEST_CASE("generated relations are closed under everything") {
  Algebra a = example_algebra();
  Relation s3 = sequential_relation(a, 3);
  CHECK(!closed_under(a, s3.tuples(), 3).has_value());
}

TEST_CASE("project: identity, drop, duplicate") {
  Algebra a = example_algebra();
  Relation s3 = sequential_relation(a, 3);
  std::vector<int> all{0, 1, 2};
  CHECK(project(s3, all) == s3);

  std::vector<int> dup{0, 0};
  Relation d = project(s3, dup);
  for (const Tup& t : d.tuples()) CHECK(t[0] == t[1]);

  std::vector<int> bad{3};
  CHECK_THROWS_AS(project(s3, bad), Error);
  CHECK_THROWS_AS(project(s3, std::vector<int>{}), Error);
}

TEST_CASE("projection of S_3 off one coordinate strictly contains S_2") {
  // sigma_3 restricted to {1,2} is the all-(1,0) pair, which cannot lie in
  // S_2: the machine needs capacity 2, so S_2 is non-halting and misses C^2
  Algebra a = example_algebra();
  Relation s3 = sequential_relation(a, 3);
  Relation s2 = sequential_relation(a, 2);
  std::vector<int> drop{2};
  Relation proj = project_away(s3, drop);
  for (const Tup& t : s2.tuples()) CHECK(proj.contains(t));
  Tup allzero = tup({el(1, Content::zero), el(1, Content::zero)});
  CHECK(proj.contains(allzero));
  CHECK(!s2.contains(allzero));
  CHECK(proj.size() > s2.size());
  // the projection is itself closed
  CHECK(!closed_under(a, proj.tuples(), 2).has_value());
}

TEST_CASE("classify the full unary power: not synchronized") {
  Algebra a = example_algebra();
  std::vector<Tup> all;
  for (int code = 0; code < a.size(); ++code) {
    Tup t{};
    t[0] = static_cast<uint8_t>(code);
    all.push_back(t);
  }
  Relation full(1, a.num_states(), all);
  // arity 1 tuples are trivially synchronized; build the binary power instead
  std::vector<Tup> all2;
  for (int x = 0; x < a.size(); ++x)
    for (int y = 0; y < a.size(); ++y) {
      Tup t{};
      t[0] = static_cast<uint8_t>(x);
      t[1] = static_cast<uint8_t>(y);
      all2.push_back(t);
    }
  Relation full2(2, a.num_states(), all2);
  CHECK(!classify(full2).synchronized);
  CHECK(classify(full).synchronized);
}

TEST_CASE("classify S_3 of the worked example") {
  Algebra a = example_algebra();
  RelationProfile p = classify(sequential_relation(a, 3));
  CHECK(p.synchronized);
  CHECK(p.computational);
  CHECK(p.halting);
  CHECK(p.capacity.value == 2);
  CHECK(p.weak_capacity.value == 2);
  CHECK(p.dot_part == std::vector<int>{0, 1, 2});
  CHECK(p.approx_halting == std::vector<int>{0, 1, 2});
  REQUIRE(p.halting_witness.has_value());
  // witnesses certify: sigma_j in Y^m with a dot at the certified coordinate
  for (size_t j = 0; j < p.capacity.coords.size(); ++j) {
    CHECK(p.capacity.witnesses[j].at(p.capacity.coords[j]).in_D());
    for (int c = 0; c < 3; ++c) CHECK(!p.capacity.witnesses[j].at(c).in_X());
  }
}

TEST_CASE("classify S_3 of a non-halting machine") {
  Algebra a = pingpong_algebra();
  RelationProfile p = classify(sequential_relation(a, 3));
  CHECK(p.computational);
  CHECK(!p.halting);
}

TEST_CASE("S_m is computational with capacity m-1 on both corpus machines") {
  // the sigma generators always witness the full capacity
  for (const MinskyMachine& m : {example_machine(), MinskyMachine::parse("1 A 2\n2 A 0 1\n")}) {
    Algebra a(m);
    for (int k = 2; k <= 3; ++k) {
      RelationProfile p = classify(sequential_relation(a, k));
      CAPTURE(k);
      CHECK(p.computational);
      CHECK(p.capacity.value == k - 1);
    }
  }
}

TEST_CASE("config_set sizes follow the multiset-permutation count") {
  Algebra a = example_algebra();
  CHECK(config_set(a, 1, 0, 0, 3).size() == 3);  // one dot placement
  CHECK(config_set(a, 3, 1, 1, 3).size() == 6);  // 3!/(1 1 1)
  CHECK(config_set(a, 0, 0, 0, 3).size() == 3);
  CHECK(config_set(a, 2, 2, 0, 4).size() == 4 * 3); // 4 * C(3,2)
  CHECK_THROWS_AS(config_set(a, 1, 2, 1, 3), Error); // alpha + beta >= m
}

TEST_CASE("config of (1,0,0) is exactly the sigma generators") {
  Algebra a = example_algebra();
  std::vector<Tup> sigma = sigma_generators(3);
  std::sort(sigma.begin(), sigma.end());
  CHECK(config_set(a, 1, 0, 0, 3) == sigma);
}

TEST_CASE("config of (3,1,1) lists the six dot/A/B arrangements") {
  Algebra a = example_algebra();
  std::vector<Tup> cfg = config_set(a, 3, 1, 1, 3);
  CHECK(cfg.size() == 6);
  for (const Tup& t : cfg) {
    std::multiset<Content> contents;
    for (int c = 0; c < 3; ++c) {
      CHECK(t.at(c).state() == 3);
      contents.insert(t.at(c).content());
    }
    CHECK(contents == std::multiset<Content>{Content::dot, Content::reg_a, Content::reg_b});
  }
}

TEST_CASE("S_1 is the closure of the single dot generator") {
  Algebra a = example_algebra();
  Relation s1 = sequential_relation(a, 1);
  Tup g{};
  g[0] = el(1, Content::dot).code;
  Relation direct = generate(a, std::array{g}, 1);
  CHECK(s1 == direct);
}

TEST_CASE("unary initial-state subpower of the worked example is halting") {
  Algebra a = example_algebra();
  Tup g1{}, g2{};
  g1[0] = el(1, Content::dot).code;
  g2[0] = el(1, Content::zero).code;
  Relation t = generate(a, std::array{g1, g2}, 1);
  Tup halt{};
  halt[0] = el(0, Content::dot).code;
  CHECK(t.contains(halt));
  CHECK(is_halting_set(t.tuples(), 1));
}

TEST_CASE("S_4 is invariant under all coordinate permutations") {
  Algebra a = example_algebra();
  Relation s4 = sequential_relation(a, 4);
  std::vector<int> perm{0, 1, 2, 3};
  do {
    CHECK(permute_relation(s4, perm) == s4);
  } while (std::next_permutation(perm.begin(), perm.end()));
}

TEST_CASE("config sets are all-or-nothing inside S_3") {
  Algebra a = example_algebra();
  Relation s3 = sequential_relation(a, 3);
  for (int k = 0; k < a.num_states(); ++k)
    for (int alpha = 0; alpha <= 2; ++alpha)
      for (int beta = 0; alpha + beta <= 2; ++beta) {
        std::vector<Tup> cfg = config_set(a, k, alpha, beta, 3);
        size_t in = 0;
        for (const Tup& t : cfg)
          if (s3.contains(t)) ++in;
        CHECK((in == 0 || in == cfg.size()));
      }
}

TEST_CASE("build_RI of S_3 equals S_3 for the worked example") {
  // D(R_I) = D∩H = [3], and the sigma vectors regenerate all of S_3
  Algebra a = example_algebra();
  Relation s3 = sequential_relation(a, 3);
  Relation ri = build_RI(a, s3);
  CHECK(ri == s3);
}

TEST_CASE("build_RI of an all-cross relation is empty") {
  Algebra a = example_algebra();
  Tup t = tup({el(2, Content::cross), el(2, Content::cross)});
  Relation r = generate(a, std::array{t}, 2);
  Relation ri = build_RI(a, r);
  CHECK(ri.empty());
}

TEST_CASE("inherent non-halting part: no dots means everything") {
  Algebra a = example_algebra();
  Tup t = tup({el(2, Content::cross), el(2, Content::cross)});
  Relation r = generate(a, std::array{t}, 2);
  CHECK(inherent_nonhalting(a, r) == std::vector<int>{0, 1});
}

TEST_CASE("inherent non-halting part of non-halting S_3 satisfies the contract") {
  Algebra a = pingpong_algebra();
  Relation s3 = sequential_relation(a, 3);
  RelationProfile p = classify(s3);
  REQUIRE(p.computational);
  REQUIRE(!p.halting);
  std::vector<int> nh = inherent_nonhalting(a, s3);
  Relation sub = project(s3, nh);
  CHECK(!is_halting_set(sub.tuples(), sub.arity()));
  if (!p.dot_part.empty()) {
    std::vector<int> nd;
    std::set_intersection(nh.begin(), nh.end(), p.dot_part.begin(), p.dot_part.end(),
                          std::back_inserter(nd));
    CHECK(!nd.empty());
  }
  for (int c = 0; c < 3; ++c)
    if (std::find(p.dot_part.begin(), p.dot_part.end(), c) == p.dot_part.end())
      CHECK(std::find(nh.begin(), nh.end(), c) != nh.end());
}

TEST_CASE("inherent non-halting rejects halting input") {
  Algebra a = example_algebra();
  Relation s3 = sequential_relation(a, 3);
  CHECK_THROWS_AS(inherent_nonhalting(a, s3), Error);
}

TEST_CASE("a single dot coordinate forces the whole coordinate set") {
  // Sg{((1,.),(1,0))} of the ping-pong machine: computational, non-halting,
  // dot part of size one, so nothing can be deleted
  Algebra a = pingpong_algebra();
  Tup t = tup({el(1, Content::dot), el(1, Content::zero)});
  Relation r = generate(a, std::array{t}, 2);
  RelationProfile p = classify(r);
  REQUIRE(p.computational);
  REQUIRE(!p.halting);
  REQUIRE(p.dot_part == std::vector<int>{0});
  CHECK(inherent_nonhalting(a, r) == std::vector<int>{0, 1});
}

TEST_CASE("chi compatibility") {
  std::vector<Tup> sigma = sigma_generators(3);
  CHECK(chi_compatible(sigma, 3, std::vector<int>{})); // empty K is vacuous
  // all contents of sigma on any single coordinate are in {., 0}: a dot makes
  // the projection neither constant-cross nor all-register
  std::vector<int> k0{0};
  CHECK(!chi_compatible(sigma, 3, k0));
  // a generator set mixing cross and A on K fails
  std::vector<Tup> bad{tup({el(1, Content::cross), el(1, Content::reg_a)})};
  std::vector<int> both{0, 1};
  CHECK(!chi_compatible(bad, 2, both));
  // constant-cross rows and register rows are fine
  std::vector<Tup> good{tup({el(1, Content::cross), el(1, Content::cross)}),
                        tup({el(2, Content::reg_a), el(2, Content::zero)})};
  CHECK(chi_compatible(good, 2, both));
  // mixed states on K fail
  std::vector<Tup> mixed{tup({el(1, Content::reg_a), el(2, Content::zero)})};
  CHECK(!chi_compatible(mixed, 2, both));
}

TEST_CASE("budget exceeded reports a partial closure") {
  Algebra a = example_algebra();
  GenerateOptions opts;
  opts.budget_tuples = 10;
  Relation r = sequential_relation(a, 3, opts);
  CHECK(r.stats().budget_exceeded);
  CHECK(r.size() > 10); // ran to the end of the round that crossed the line
}

TEST_CASE("ambient cap rejects oversized spaces") {
  Algebra a = example_algebra();
  GenerateOptions opts;
  opts.ambient_cap = 100;
  CHECK_THROWS_AS(sequential_relation(a, 3, opts), Error);
}

TEST_CASE("eval_term_tuplewise matches the displayed matrix evaluation") {
  Algebra a = example_algebra();
  Term m = parse_term("M(x1,x2)");
  std::vector<Tup> env{tup({el(1, Content::zero), el(1, Content::dot), el(1, Content::zero)}),
                       tup({el(1, Content::zero), el(1, Content::zero), el(1, Content::dot)})};
  Tup out = eval_term_tuplewise(a, m, env, 3);
  CHECK(out == tup({el(2, Content::zero), el(2, Content::reg_a), el(2, Content::dot)}));
}
