#include "subpower.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "closure_impl.hpp"

namespace cf {

Tup make_tup(std::span<const Element> coords) {
  if (coords.size() < 1 || coords.size() > kMaxArity)
    fail(ErrorCode::invalid, "tuple arity out of range");
  Tup t{};
  for (size_t i = 0; i < coords.size(); ++i) t[static_cast<int>(i)] = coords[i].code;
  return t;
}

std::string tuple_text(const Tup& t, int arity) {
  std::string out;
  for (int c = 0; c < arity; ++c) {
    if (c) out += ',';
    out += element_text(t.at(c));
  }
  return out;
}

Tup parse_tuple(std::string_view line, int arity, int num_states) {
  Tup t{};
  size_t pos = 0;
  for (int c = 0; c < arity; ++c) {
    size_t open = line.find('(', pos);
    size_t close = line.find(')', pos);
    if (open == std::string_view::npos || close == std::string_view::npos || close < open)
      fail(ErrorCode::parse, "expected " + std::to_string(arity) + " elements in tuple");
    t[c] = parse_element(line.substr(open, close - open + 1), num_states).code;
    pos = close + 1;
  }
  if (line.find('(', pos) != std::string_view::npos)
    fail(ErrorCode::parse, "tuple has more than " + std::to_string(arity) + " elements");
  return t;
}

Relation::Relation(int arity, int num_states, std::vector<Tup> tuples, std::vector<Tup> generators,
                   ClosureStats stats)
    : arity_(arity), num_states_(num_states), tuples_(std::move(tuples)),
      generators_(std::move(generators)), stats_(stats) {
  if (arity_ < 0 || arity_ > kMaxArity) fail(ErrorCode::invalid, "relation arity out of range");
  std::sort(tuples_.begin(), tuples_.end());
  tuples_.erase(std::unique(tuples_.begin(), tuples_.end()), tuples_.end());
  std::sort(generators_.begin(), generators_.end());
  generators_.erase(std::unique(generators_.begin(), generators_.end()), generators_.end());
}

bool Relation::contains(const Tup& t) const {
  return std::binary_search(tuples_.begin(), tuples_.end(), t);
}

std::string Relation::to_text() const {
  std::ostringstream out;
  out << "arity " << arity_ << "\n";
  out << "states " << (num_states_ - 1) << "\n";
  for (const Tup& t : tuples_) {
    out << tuple_text(t, arity_);
    if (std::binary_search(generators_.begin(), generators_.end(), t)) out << " # generator";
    out << "\n";
  }
  return out.str();
}

Relation Relation::from_text(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int arity = -1, states = -1;
  std::vector<Tup> tuples, gens;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    bool generator = line.find("# generator") != std::string::npos;
    if (auto pos = line.find('#'); pos != std::string::npos) line.erase(pos);
    std::istringstream ls(line);
    std::string word;
    if (!(ls >> word)) continue;
    if (word == "arity") {
      if (!(ls >> arity) || arity < 1 || arity > kMaxArity)
        fail(ErrorCode::parse, "line " + std::to_string(lineno) + ": bad arity header");
      continue;
    }
    if (word == "states") {
      if (!(ls >> states) || states < 0)
        fail(ErrorCode::parse, "line " + std::to_string(lineno) + ": bad states header");
      continue;
    }
    if (arity < 0 || states < 0)
      fail(ErrorCode::parse, "line " + std::to_string(lineno) +
                                 ": tuple before arity/states headers");
    Tup t = parse_tuple(line, arity, states + 1);
    tuples.push_back(t);
    if (generator) gens.push_back(t);
  }
  if (arity < 0 || states < 0) fail(ErrorCode::parse, "missing arity/states headers");
  return Relation(arity, states + 1, std::move(tuples), std::move(gens));
}

void Relation::write_file(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::invalid, "cannot write " + path);
  out << to_text();
}

Relation Relation::read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::invalid, "cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_text(buf.str());
}

namespace {

uint64_t saturating_pow(uint64_t base, int exp) {
  uint64_t r = 1;
  for (int i = 0; i < exp; ++i) {
    if (r > UINT64_MAX / base) return UINT64_MAX;
    r *= base;
  }
  return r;
}

void validate_tuples(const Algebra& alg, std::span<const Tup> tuples, int arity) {
  for (const Tup& t : tuples) {
    for (int c = 0; c < arity; ++c)
      if (t[c] >= alg.size()) fail(ErrorCode::invalid, "tuple element out of domain");
    for (int c = arity; c < kMaxArity; ++c)
      if (t[c] != 0) fail(ErrorCode::invalid, "tuple has nonzero padding beyond its arity");
  }
}

} // namespace

Relation generate(const Algebra& alg, std::span<const Tup> generators, int arity,
                  const GenerateOptions& opts) {
  if (generators.empty()) fail(ErrorCode::invalid, "empty generator set");
  if (arity < 1 || arity > kMaxArity) fail(ErrorCode::invalid, "arity out of range");
  validate_tuples(alg, generators, arity);
  if (saturating_pow(alg.size(), arity) > opts.ambient_cap)
    fail(ErrorCode::budget, "ambient space |A|^m exceeds the configured ceiling");

  ClosureContext ctx(alg, arity);
  for (const Tup& g : generators) ctx.add(g);

  ClosureStats stats;
  for (;;) {
    std::vector<Tup> fresh = ctx.enumerate_new(kAllOpsMask, opts.workers);
    ctx.advance_round();
    if (fresh.empty()) break;
    ++stats.rounds;
    stats.peak_frontier = std::max(stats.peak_frontier, fresh.size());
    for (const Tup& t : fresh) ctx.add(t);
    if (ctx.size() > opts.budget_tuples || stats.rounds >= opts.max_rounds) {
      stats.budget_exceeded = true;
      break;
    }
  }

  std::vector<Tup> gens(generators.begin(), generators.end());
  return Relation(arity, alg.num_states(), ctx.tuples(), std::move(gens), stats);
}

std::optional<ClosureWitness> closed_under(const Algebra& alg, std::span<const Tup> tuples,
                                           int arity, unsigned ops_mask) {
  if (tuples.empty()) return std::nullopt;
  validate_tuples(alg, tuples, arity);
  ClosureContext ctx(alg, arity);
  for (const Tup& t : tuples) ctx.add(t);
  std::optional<ClosureWitness> witness;
  ctx.enumerate(ops_mask, [&](const Tup& out, auto&& wf) {
    if (ctx.contains(out)) return true;
    witness = wf();
    return false;
  });
  return witness;
}

std::optional<ClosureWitness> closure_violation(const Algebra& alg, std::span<const Tup> args,
                                                int arity, unsigned ops_mask,
                                                const Relation& member_of) {
  if (args.empty()) return std::nullopt;
  validate_tuples(alg, args, arity);
  ClosureContext ctx(alg, arity);
  for (const Tup& t : args) ctx.add(t);
  std::optional<ClosureWitness> witness;
  ctx.enumerate(ops_mask, [&](const Tup& out, auto&& wf) {
    if (member_of.contains(out)) return true;
    witness = wf();
    return false;
  });
  return witness;
}

Relation project(const Relation& rel, std::span<const int> coords) {
  if (coords.empty()) fail(ErrorCode::invalid, "projection needs at least one coordinate");
  if (coords.size() > kMaxArity) fail(ErrorCode::invalid, "projection arity out of range");
  for (int c : coords)
    if (c < 0 || c >= rel.arity())
      fail(ErrorCode::invalid, "projection coordinate " + std::to_string(c + 1) + " out of range");
  std::vector<Tup> out;
  out.reserve(rel.size());
  for (const Tup& t : rel.tuples()) {
    Tup p{};
    for (size_t k = 0; k < coords.size(); ++k) p[static_cast<int>(k)] = t[coords[k]];
    out.push_back(p);
  }
  return Relation(static_cast<int>(coords.size()), rel.num_states(), std::move(out));
}

Relation project_away(const Relation& rel, std::span<const int> dropped) {
  std::vector<int> keep;
  for (int c = 0; c < rel.arity(); ++c)
    if (std::find(dropped.begin(), dropped.end(), c) == dropped.end()) keep.push_back(c);
  return project(rel, keep);
}

bool is_halting_set(std::span<const Tup> tuples, int arity, Tup* witness) {
  const uint8_t zero0 = Element::make(0, Content::zero).code;
  const uint8_t dot0 = Element::make(0, Content::dot).code;
  for (const Tup& t : tuples) {
    bool in_range = true, all_zero = true;
    for (int c = 0; c < arity; ++c) {
      if (t[c] != zero0 && t[c] != dot0) in_range = false;
      if (t[c] != zero0) all_zero = false;
    }
    if (in_range && !all_zero) {
      if (witness) *witness = t;
      return true;
    }
  }
  return false;
}

RelationProfile classify(const Relation& rel) {
  RelationProfile p;
  int m = rel.arity();
  p.synchronized = true;
  p.computational = true;
  for (const Tup& t : rel.tuples()) {
    int dots = 0;
    for (int c = 0; c < m; ++c) {
      if (t.at(c).state() != t.at(0).state()) p.synchronized = false;
      if (t.at(c).in_D()) ++dots;
    }
    if (dots > 1) p.computational = false;
  }
  p.computational = p.computational && p.synchronized;

  Tup hw{};
  p.halting = is_halting_set(rel.tuples(), m, &hw);
  if (p.halting) p.halting_witness = hw;

  for (int c = 0; c < m; ++c) {
    bool dot = false;
    for (const Tup& t : rel.tuples())
      if (t.at(c).in_D()) {
        dot = true;
        break;
      }
    if (dot) p.dot_part.push_back(c);
  }

  if (m > 1) {
    for (int c = 0; c < m; ++c) {
      std::vector<int> drop{c};
      Relation sub = project_away(rel, drop);
      if (is_halting_set(sub.tuples(), sub.arity())) p.approx_halting.push_back(c);
    }
  }

  auto certify = [&](bool restrict_y) {
    CapacityCertificate cert;
    for (int c = 0; c < m; ++c) {
      for (const Tup& t : rel.tuples()) {
        if (!t.at(c).in_D()) continue;
        if (restrict_y) {
          bool in_y = true;
          for (int k = 0; k < m; ++k)
            if (t.at(k).in_X()) in_y = false;
          if (!in_y) continue;
        }
        cert.coords.push_back(c);
        cert.witnesses.push_back(t);
        break;
      }
    }
    cert.value = static_cast<long long>(cert.coords.size()) - 1;
    return cert;
  };
  p.capacity = certify(true);
  p.weak_capacity = certify(false);
  return p;
}

std::vector<Tup> config_set(const Algebra& alg, int k, int alpha, int beta, int m) {
  if (k < 0 || k >= alg.num_states()) fail(ErrorCode::invalid, "state out of range");
  if (alpha < 0 || beta < 0) fail(ErrorCode::invalid, "negative register value");
  if (m < 1 || m > kMaxArity) fail(ErrorCode::invalid, "arity out of range");
  if (alpha + beta >= m)
    fail(ErrorCode::invalid, "configuration needs alpha + beta < m");
  // contents multiset: one dot, alpha A's, beta B's, rest zeros
  std::vector<Content> base(m, Content::zero);
  base[0] = Content::dot;
  for (int i = 0; i < alpha; ++i) base[1 + i] = Content::reg_a;
  for (int i = 0; i < beta; ++i) base[1 + alpha + i] = Content::reg_b;
  std::sort(base.begin(), base.end());
  std::set<Tup> out;
  do {
    Tup t{};
    for (int c = 0; c < m; ++c) t[c] = Element::make(k, base[c]).code;
    out.insert(t);
  } while (std::next_permutation(base.begin(), base.end()));
  return {out.begin(), out.end()};
}

std::vector<Tup> sigma_generators(int m) {
  if (m < 1 || m > kMaxArity) fail(ErrorCode::invalid, "arity out of range");
  std::vector<Tup> sigma;
  for (int i = 0; i < m; ++i) {
    Tup t{};
    for (int c = 0; c < m; ++c)
      t[c] = Element::make(1, c == i ? Content::dot : Content::zero).code;
    sigma.push_back(t);
  }
  return sigma;
}

Relation sequential_relation(const Algebra& alg, int m, const GenerateOptions& opts) {
  std::vector<Tup> sigma = sigma_generators(m);
  return generate(alg, sigma, m, opts);
}

Relation build_RI(const Algebra& alg, const Relation& rel, const GenerateOptions& opts) {
  int m = rel.arity();
  std::vector<Tup> ypart;
  for (const Tup& t : rel.tuples()) {
    bool in_y = true;
    for (int c = 0; c < m; ++c)
      if (t.at(c).in_X()) in_y = false;
    if (in_y) ypart.push_back(t);
  }
  std::set<Tup> gens;
  for (const Tup& a : ypart)
    for (const Tup& b : ypart) {
      Tup g{};
      for (int c = 0; c < m; ++c) g[c] = alg.i_op(a.at(c), b.at(c)).code;
      gens.insert(g);
    }
  if (gens.empty()) return Relation(m, alg.num_states(), {});
  std::vector<Tup> gv(gens.begin(), gens.end());
  return generate(alg, gv, m, opts);
}

std::vector<int> inherent_nonhalting(const Algebra&, const Relation& rel) {
  RelationProfile prof = classify(rel);
  if (!prof.computational || prof.halting)
    fail(ErrorCode::invalid, "inherently non-halting part needs a computational non-halting relation");
  int m = rel.arity();
  if (prof.dot_part.empty()) {
    std::vector<int> all(m);
    for (int c = 0; c < m; ++c) all[c] = c;
    return all;
  }
  // greedy descending deletion of dot coordinates, repeated to a fixpoint
  std::set<int> keep;
  for (int c = 0; c < m; ++c) keep.insert(c);
  std::set<int> dots(prof.dot_part.begin(), prof.dot_part.end());
  bool changed = true;
  while (changed) {
    changed = false;
    for (auto it = dots.rbegin(); it != dots.rend(); ++it) {
      int c = *it;
      if (!keep.count(c)) continue;
      std::set<int> kd;
      for (int d : dots)
        if (keep.count(d) && d != c) kd.insert(d);
      if (kd.empty()) continue; // keep at least one dot coordinate
      std::vector<int> coords;
      for (int k : keep)
        if (k != c) coords.push_back(k);
      Relation sub = project(rel, coords);
      if (!is_halting_set(sub.tuples(), sub.arity())) {
        keep.erase(c);
        changed = true;
      }
    }
  }
  return {keep.begin(), keep.end()};
}

bool chi_compatible(std::span<const Tup> generators, int arity, std::span<const int> K) {
  for (int c : K)
    if (c < 0 || c >= arity) fail(ErrorCode::invalid, "K coordinate out of range");
  if (K.empty()) return true;
  for (const Tup& g : generators) {
    int state = g.at(K[0]).state();
    bool all_cross = true, all_reg = true;
    for (int c : K) {
      Element e = g.at(c);
      if (e.state() != state) return false;
      if (!e.in_X()) all_cross = false;
      if (!e.in_C()) all_reg = false; // contents must be in {A, B, 0}
    }
    if (!all_cross && !all_reg) return false;
  }
  return true;
}

Tup permute_tuple(const Tup& t, std::span<const int> perm) {
  Tup out{};
  for (size_t i = 0; i < perm.size(); ++i) out[static_cast<int>(i)] = t[perm[i]];
  return out;
}

Relation permute_relation(const Relation& rel, std::span<const int> perm) {
  if (static_cast<int>(perm.size()) != rel.arity())
    fail(ErrorCode::invalid, "permutation size must equal the arity");
  std::vector<bool> hit(rel.arity(), false);
  for (int p : perm) {
    if (p < 0 || p >= rel.arity() || hit[p]) fail(ErrorCode::invalid, "not a permutation");
    hit[p] = true;
  }
  std::vector<Tup> out;
  out.reserve(rel.size());
  for (const Tup& t : rel.tuples()) out.push_back(permute_tuple(t, perm));
  return Relation(rel.arity(), rel.num_states(), std::move(out));
}

Tup eval_term_tuplewise(const Algebra& alg, const Term& t, std::span<const Tup> env, int arity) {
  Tup out{};
  std::vector<Element> coord_env(env.size());
  for (int c = 0; c < arity; ++c) {
    for (size_t v = 0; v < env.size(); ++v) coord_env[v] = env[v].at(c);
    out[c] = eval_term(alg, t, coord_env).code;
  }
  return out;
}

} // namespace cf
