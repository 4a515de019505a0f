#include "entail.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <sstream>

namespace cf {

Relation equality_relation(const Algebra& alg) {
  std::vector<Tup> out;
  for (int a = 0; a < alg.size(); ++a) {
    Tup t{};
    t[0] = static_cast<uint8_t>(a);
    t[1] = static_cast<uint8_t>(a);
    out.push_back(t);
  }
  return Relation(2, alg.num_states(), std::move(out));
}

namespace {

int expr_arity(const EntailExpr& e, int node, std::span<const Relation> catalog) {
  const EntailExpr::Node& n = e.nodes[node];
  switch (n.kind) {
    case EntailExpr::Kind::atom: {
      if (n.atom < 0 || static_cast<size_t>(n.atom) >= catalog.size())
        fail(ErrorCode::invalid, "catalog index " + std::to_string(n.atom + 1) + " out of range");
      return catalog[n.atom].arity();
    }
    case EntailExpr::Kind::eq:
      return 2;
    case EntailExpr::Kind::intersect: {
      if (n.children.empty()) fail(ErrorCode::invalid, "intersection needs children");
      int a = expr_arity(e, n.children[0], catalog);
      for (int c : n.children)
        if (expr_arity(e, c, catalog) != a)
          fail(ErrorCode::invalid, "intersection children must share one arity");
      return a;
    }
    case EntailExpr::Kind::product: {
      int a = 0;
      for (int c : n.children) a += expr_arity(e, c, catalog);
      return a;
    }
    case EntailExpr::Kind::permute:
      return static_cast<int>(n.coords.size());
    case EntailExpr::Kind::project:
      return static_cast<int>(n.coords.size());
  }
  fail(ErrorCode::invalid, "bad expression node");
}

} // namespace

Relation eval_expression(const Algebra& alg, std::span<const Relation> catalog,
                         const EntailExpr& expr, const EvalLimits& limits) {
  if (expr.root < 0) fail(ErrorCode::invalid, "empty expression");
  std::vector<Relation> val(expr.nodes.size());
  for (size_t k = 0; k < expr.nodes.size(); ++k) {
    const EntailExpr::Node& n = expr.nodes[k];
    switch (n.kind) {
      case EntailExpr::Kind::atom: {
        if (n.atom < 0 || static_cast<size_t>(n.atom) >= catalog.size())
          fail(ErrorCode::invalid, "catalog index " + std::to_string(n.atom + 1) + " out of range");
        val[k] = catalog[n.atom];
        break;
      }
      case EntailExpr::Kind::eq:
        val[k] = equality_relation(alg);
        break;
      case EntailExpr::Kind::intersect: {
        if (n.children.empty()) fail(ErrorCode::invalid, "intersection needs children");
        const Relation& first = val[n.children[0]];
        std::vector<Tup> acc = first.tuples();
        for (size_t ci = 1; ci < n.children.size(); ++ci) {
          const Relation& r = val[n.children[ci]];
          if (r.arity() != first.arity())
            fail(ErrorCode::invalid, "intersection children must share one arity");
          std::vector<Tup> next;
          std::set_intersection(acc.begin(), acc.end(), r.tuples().begin(), r.tuples().end(),
                                std::back_inserter(next));
          acc = std::move(next);
        }
        val[k] = Relation(first.arity(), alg.num_states(), std::move(acc));
        break;
      }
      case EntailExpr::Kind::product: {
        if (n.children.empty()) fail(ErrorCode::invalid, "product needs children");
        int arity = 0;
        size_t count = 1;
        for (int c : n.children) {
          arity += val[c].arity();
          count = val[c].empty() ? 0 : count * val[c].size();
          if (count > limits.max_tuples)
            fail(ErrorCode::budget, "product exceeds the tuple budget");
        }
        if (arity > limits.max_arity || arity > kMaxArity)
          fail(ErrorCode::budget, "product arity exceeds the cap");
        std::vector<Tup> acc{Tup{}};
        int at = 0;
        for (int c : n.children) {
          const Relation& r = val[c];
          std::vector<Tup> next;
          next.reserve(acc.size() * std::max<size_t>(r.size(), 1));
          for (const Tup& left : acc)
            for (const Tup& right : r.tuples()) {
              Tup t = left;
              for (int i = 0; i < r.arity(); ++i) t[at + i] = right[i];
              next.push_back(t);
            }
          acc = std::move(next);
          at += r.arity();
        }
        if (arity == 0) acc.clear();
        val[k] = Relation(arity, alg.num_states(), std::move(acc));
        break;
      }
      case EntailExpr::Kind::permute:
        val[k] = permute_relation(val[n.children[0]], n.coords);
        break;
      case EntailExpr::Kind::project:
        val[k] = project(val[n.children[0]], n.coords);
        break;
    }
  }
  return val[expr.root];
}

// ---- text formats ----------------------------------------------------------

namespace {

struct ExprParser {
  std::string_view s;
  size_t pos = 0;

  void skip() {
    while (pos < s.size() && isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  }
  [[noreturn]] void bad(const std::string& why) {
    fail(ErrorCode::parse, "expression: " + why + " at offset " + std::to_string(pos));
  }
  bool eat(char c) {
    skip();
    if (pos < s.size() && s[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }
  std::string ident() {
    skip();
    size_t start = pos;
    while (pos < s.size() && (isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_')) ++pos;
    return std::string(s.substr(start, pos - start));
  }
  std::vector<int> coord_list() {
    if (!eat('[')) bad("expected [");
    std::vector<int> out;
    skip();
    while (!eat(']')) {
      skip();
      size_t start = pos;
      while (pos < s.size() && isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
      if (start == pos) bad("expected coordinate");
      out.push_back(std::stoi(std::string(s.substr(start, pos - start))) - 1); // 1-based text
      skip();
      if (s[pos] == ',') ++pos;
    }
    return out;
  }
  int parse(EntailExpr& e) {
    std::string name = ident();
    if (name.empty()) bad("expected expression");
    EntailExpr::Node n;
    if (name == "Eq") {
      n.kind = EntailExpr::Kind::eq;
    } else if (name[0] == 'R' && name.size() > 1) {
      n.kind = EntailExpr::Kind::atom;
      n.atom = std::stoi(name.substr(1)) - 1; // R1 = first catalog entry
    } else if (name == "intersect" || name == "product") {
      n.kind = name == "intersect" ? EntailExpr::Kind::intersect : EntailExpr::Kind::product;
      if (!eat('(')) bad("expected (");
      for (;;) {
        n.children.push_back(parse(e));
        if (eat(')')) break;
        if (!eat(',')) bad("expected , or )");
      }
    } else if (name == "permute" || name == "project") {
      n.kind = name == "permute" ? EntailExpr::Kind::permute : EntailExpr::Kind::project;
      if (!eat('(')) bad("expected (");
      n.children.push_back(parse(e));
      if (!eat(',')) bad("expected ,");
      n.coords = coord_list();
      if (!eat(')')) bad("expected )");
    } else {
      bad("unknown form `" + name + "`");
    }
    e.nodes.push_back(std::move(n));
    return static_cast<int>(e.nodes.size()) - 1;
  }
};

std::string coords_text(std::span<const int> coords) {
  std::string out = "[";
  for (size_t i = 0; i < coords.size(); ++i) {
    if (i) out += ' ';
    out += std::to_string(coords[i] + 1);
  }
  return out + "]";
}

void expr_text_rec(const EntailExpr& e, int at, std::string& out) {
  const EntailExpr::Node& n = e.nodes[at];
  switch (n.kind) {
    case EntailExpr::Kind::atom: out += "R" + std::to_string(n.atom + 1); return;
    case EntailExpr::Kind::eq: out += "Eq"; return;
    case EntailExpr::Kind::intersect:
    case EntailExpr::Kind::product: {
      out += n.kind == EntailExpr::Kind::intersect ? "intersect(" : "product(";
      for (size_t i = 0; i < n.children.size(); ++i) {
        if (i) out += ',';
        expr_text_rec(e, n.children[i], out);
      }
      out += ')';
      return;
    }
    case EntailExpr::Kind::permute:
    case EntailExpr::Kind::project: {
      out += n.kind == EntailExpr::Kind::permute ? "permute(" : "project(";
      expr_text_rec(e, n.children[0], out);
      out += ',';
      out += coords_text(n.coords);
      out += ')';
      return;
    }
  }
}

} // namespace

EntailExpr parse_expr(const std::string& text) {
  EntailExpr e;
  ExprParser p{text};
  e.root = p.parse(e);
  p.skip();
  if (p.pos != text.size()) p.bad("trailing input");
  return e;
}

std::string expr_text(const EntailExpr& e) {
  std::string out;
  if (e.root >= 0) expr_text_rec(e, e.root, out);
  return out;
}

std::string certificate_text(const CanonicalCertificate& cert) {
  std::string out = "PROJECT " + coords_text(cert.projection) + " ; INTERSECT {";
  for (size_t f = 0; f < cert.factors.size(); ++f) {
    if (f) out += " ;";
    out += " PERMUTE " + coords_text(cert.factors[f].perm) + " PRODUCT [";
    for (size_t a = 0; a < cert.factors[f].atoms.size(); ++a) {
      if (a) out += ' ';
      int atom = cert.factors[f].atoms[a];
      out += atom < 0 ? std::string("Eq") : "R" + std::to_string(atom + 1);
    }
    out += ']';
  }
  out += " }";
  return out;
}

CanonicalCertificate parse_certificate(const std::string& text) {
  CanonicalCertificate cert;
  ExprParser p{text};
  auto expect = [&](const std::string& word) {
    std::string got = p.ident();
    if (got != word) p.bad("expected " + word);
  };
  expect("PROJECT");
  cert.projection = p.coord_list();
  if (!p.eat(';')) p.bad("expected ;");
  expect("INTERSECT");
  if (!p.eat('{')) p.bad("expected {");
  for (;;) {
    CanonicalCertificate::Factor factor;
    expect("PERMUTE");
    factor.perm = p.coord_list();
    expect("PRODUCT");
    if (!p.eat('[')) p.bad("expected [");
    while (!p.eat(']')) {
      std::string a = p.ident();
      if (a == "Eq")
        factor.atoms.push_back(-1);
      else if (!a.empty() && a[0] == 'R')
        factor.atoms.push_back(std::stoi(a.substr(1)) - 1);
      else
        p.bad("expected R<k> or Eq");
      p.skip();
      if (p.pos < p.s.size() && p.s[p.pos] == ',') ++p.pos;
    }
    cert.factors.push_back(std::move(factor));
    if (p.eat('}')) break;
    if (!p.eat(';')) p.bad("expected ; or }");
  }
  if (cert.factors.empty()) fail(ErrorCode::parse, "certificate needs at least one factor");
  return cert;
}

EntailExpr certificate_expr(const CanonicalCertificate& cert) {
  EntailExpr e;
  std::vector<int> factor_nodes;
  for (const auto& factor : cert.factors) {
    std::vector<int> atom_nodes;
    for (int a : factor.atoms) {
      EntailExpr::Node n;
      n.kind = a < 0 ? EntailExpr::Kind::eq : EntailExpr::Kind::atom;
      n.atom = a;
      e.nodes.push_back(n);
      atom_nodes.push_back(static_cast<int>(e.nodes.size()) - 1);
    }
    EntailExpr::Node prod;
    prod.kind = EntailExpr::Kind::product;
    prod.children = atom_nodes;
    e.nodes.push_back(prod);
    int node = static_cast<int>(e.nodes.size()) - 1;
    if (!factor.perm.empty()) {
      EntailExpr::Node perm;
      perm.kind = EntailExpr::Kind::permute;
      perm.children = {node};
      perm.coords = factor.perm;
      e.nodes.push_back(perm);
      node = static_cast<int>(e.nodes.size()) - 1;
    }
    factor_nodes.push_back(node);
  }
  EntailExpr::Node inter;
  inter.kind = EntailExpr::Kind::intersect;
  inter.children = factor_nodes;
  e.nodes.push_back(inter);
  EntailExpr::Node proj;
  proj.kind = EntailExpr::Kind::project;
  proj.children = {static_cast<int>(e.nodes.size()) - 1};
  proj.coords = cert.projection;
  e.nodes.push_back(proj);
  e.root = static_cast<int>(e.nodes.size()) - 1;
  return e;
}

Relation canonical_form_eval(const Algebra& alg, std::span<const Relation> catalog,
                             const CanonicalCertificate& cert, const EvalLimits& limits,
                             CertEvalInfo* info) {
  EntailExpr e = certificate_expr(cert);
  Relation value = eval_expression(alg, catalog, e, limits);
  if (info) {
    *info = CertEvalInfo{};
    for (const auto& factor : cert.factors) {
      int arity = 0;
      for (int a : factor.atoms) {
        int one = a < 0 ? 2 : catalog[a].arity();
        info->max_catalog_arity = std::max(info->max_catalog_arity, one);
        arity += one;
      }
      info->product_arity = arity;
    }
    int m = value.arity();
    info->contains_all_sigma = true;
    for (const Tup& s : sigma_generators(m))
      if (!value.contains(s)) info->contains_all_sigma = false;
    info->low_arity_case = info->max_catalog_arity < m;
    const auto& tuples = value.tuples();
    info->c_part_nonempty = std::any_of(tuples.begin(), tuples.end(), [&](const Tup& t) {
      for (int c = 0; c < m; ++c)
        if (!t.at(c).in_C()) return false;
      return true;
    });
    // a certificate built from strictly lower-arity relations whose value
    // covers the sigma vectors must also meet C^m; a violation would witness
    // a defect somewhere, so it is surfaced loudly
    if (info->low_arity_case && info->contains_all_sigma && !info->c_part_nonempty)
      fail(ErrorCode::check_failed,
           "low-arity certificate covers the sigma vectors but misses the C-part");
  }
  return value;
}

PreserveVerdict preserves(const Algebra& alg, const Term& f, const Relation& rel,
                          const PreserveLimits& limits) {
  PreserveVerdict v;
  int n = f.max_var();
  if (n < 1) fail(ErrorCode::invalid, "operation must have at least one variable");
  if (rel.empty()) return v;

  uint64_t total = 1;
  bool overflow = false;
  for (int k = 0; k < n; ++k) {
    if (total > limits.full_scan_budget / rel.size()) {
      overflow = true;
      break;
    }
    total *= rel.size();
  }
  bool full = !overflow && n <= limits.full_scan_max_arity && total <= limits.full_scan_budget;

  std::vector<Tup> args(n);
  auto check = [&](const std::vector<Tup>& rows) {
    Tup out = eval_term_tuplewise(alg, f, rows, rel.arity());
    if (rel.contains(out)) return true;
    v.preserved = false;
    v.args = rows;
    v.out = out;
    return false;
  };

  if (full) {
    std::vector<size_t> idx(n, 0);
    for (;;) {
      for (int k = 0; k < n; ++k) args[k] = rel.tuples()[idx[k]];
      if (!check(args)) return v;
      int k = n - 1;
      while (k >= 0 && ++idx[k] == rel.size()) idx[k--] = 0;
      if (k < 0) break;
    }
    return v;
  }

  v.sampled = true;
  std::mt19937_64 rng(limits.seed);
  std::uniform_int_distribution<size_t> pick(0, rel.size() - 1);
  for (uint64_t s = 0; s < limits.samples; ++s) {
    for (int k = 0; k < n; ++k) args[k] = rel.tuples()[pick(rng)];
    if (!check(args)) return v;
  }
  return v;
}

// ---- bounded certificate search --------------------------------------------

namespace {

// permutations that reorder whole product blocks
std::vector<std::vector<int>> block_permutations(const std::vector<int>& block_arities) {
  std::vector<int> order(block_arities.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::vector<std::vector<int>> out;
  do {
    std::vector<int> perm;
    for (int b : order) {
      int start = 0;
      for (int k = 0; k < b; ++k) start += block_arities[k];
      for (int c = 0; c < block_arities[b]; ++c) perm.push_back(start + c);
    }
    out.push_back(perm);
  } while (std::next_permutation(order.begin(), order.end()));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<std::vector<int>> all_permutations(int n) {
  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i;
  std::vector<std::vector<int>> out;
  do {
    out.push_back(perm);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

void increasing_subsets(int n, int k, std::vector<std::vector<int>>& out) {
  std::vector<int> pick(k);
  for (int i = 0; i < k; ++i) pick[i] = i;
  for (;;) {
    out.push_back(pick);
    int i = k - 1;
    while (i >= 0 && pick[i] == n - k + i) --i;
    if (i < 0) break;
    ++pick[i];
    for (int j = i + 1; j < k; ++j) pick[j] = pick[j - 1] + 1;
  }
}

} // namespace

SearchOutcome search_entailment(const Algebra& alg, std::span<const Relation> catalog,
                                const Relation& target, const SearchBounds& bounds,
                                CanonicalCertificate* out) {
  int m = target.arity();
  int atom_kinds = static_cast<int>(catalog.size()) + 1; // catalog entries + Eq
  auto atom_arity = [&](int a) { return a < 0 ? 2 : catalog[a].arity(); };

  uint64_t candidates = 0;
  EvalLimits limits;

  // non-decreasing atom sequences (block order is handled by the permutations)
  std::vector<std::vector<int>> atom_seqs;
  std::vector<std::vector<int>> stack{{}};
  while (!stack.empty()) {
    std::vector<int> seq = std::move(stack.back());
    stack.pop_back();
    if (!seq.empty()) atom_seqs.push_back(seq);
    if (static_cast<int>(seq.size()) >= bounds.max_factors_per_product) continue;
    int lo = seq.empty() ? -1 : seq.back();
    for (int a = lo; a < atom_kinds - 1; ++a) {
      std::vector<int> next = seq;
      next.push_back(a);
      int arity = 0;
      for (int x : next) arity += atom_arity(x);
      if (arity <= kMaxArity) stack.push_back(std::move(next));
    }
  }
  std::sort(atom_seqs.begin(), atom_seqs.end(),
            [](const auto& a, const auto& b) { return a.size() != b.size() ? a.size() < b.size() : a < b; });

  struct FactorVariant {
    CanonicalCertificate::Factor factor;
    int arity;
  };

  // factor variants grouped by arity
  std::vector<FactorVariant> variants;
  for (const auto& seq : atom_seqs) {
    std::vector<int> block_arities;
    int arity = 0;
    for (int a : seq) {
      block_arities.push_back(atom_arity(a));
      arity += atom_arity(a);
    }
    if (arity < m) continue;
    auto perms = bounds.full_permutations ? all_permutations(arity) : block_permutations(block_arities);
    for (const auto& perm : perms)
      variants.push_back({CanonicalCertificate::Factor{perm, seq}, arity});
  }

  // try single factors first, then pairs, then wider intersections
  for (int width = 1; width <= bounds.max_intersects; ++width) {
    std::vector<size_t> idx(width, 0);
    if (variants.empty()) break;
    for (;;) {
      bool arity_ok = true;
      int arity = variants[idx[0]].arity;
      for (int k = 1; k < width; ++k)
        if (variants[idx[k]].arity != arity) arity_ok = false;
      bool nondecreasing = true;
      for (int k = 1; k < width; ++k)
        if (idx[k] < idx[k - 1]) nondecreasing = false;
      if (arity_ok && nondecreasing && arity >= m) {
        std::vector<std::vector<int>> projections;
        increasing_subsets(arity, m, projections);
        for (const auto& proj : projections) {
          if (++candidates > bounds.max_candidates) return SearchOutcome::budget_exhausted;
          CanonicalCertificate cert;
          cert.projection = proj;
          for (int k = 0; k < width; ++k) cert.factors.push_back(variants[idx[k]].factor);
          try {
            Relation value = canonical_form_eval(alg, catalog, cert, limits, nullptr);
            if (value == target) {
              if (out) *out = cert;
              return SearchOutcome::found;
            }
          } catch (const Error& e) {
            if (e.code() != ErrorCode::budget) throw;
          }
        }
      }
      int k = width - 1;
      while (k >= 0 && ++idx[k] == variants.size()) idx[k--] = 0;
      if (k < 0) break;
    }
  }
  return SearchOutcome::not_found_within_bounds;
}

} // namespace cf
