#include "gadgets.hpp"

#include <algorithm>
#include <random>
#include <set>

namespace cf {

const char* gadget_name(GadgetId id) {
  switch (id) {
    case GadgetId::mu: return "mu";
    case GadgetId::chi: return "chi";
    case GadgetId::delta_forall: return "delta-forall";
    case GadgetId::delta_exists_a: return "delta-exists-a";
    case GadgetId::delta_exists_b: return "delta-exists-b";
    case GadgetId::gamma: return "gamma";
  }
  return "?";
}

std::optional<GadgetId> gadget_from_name(std::string_view name) {
  for (GadgetId id : {GadgetId::mu, GadgetId::chi, GadgetId::delta_forall,
                      GadgetId::delta_exists_a, GadgetId::delta_exists_b, GadgetId::gamma})
    if (name == gadget_name(id)) return id;
  if (name == "delta_forall" || name == "dall") return GadgetId::delta_forall;
  if (name == "delta_exists_a" || name == "dexa") return GadgetId::delta_exists_a;
  if (name == "delta_exists_b" || name == "dexb") return GadgetId::delta_exists_b;
  return std::nullopt;
}

int gadget_arity(GadgetId id) {
  switch (id) {
    case GadgetId::mu: return 2;
    case GadgetId::chi: return 3;
    case GadgetId::gamma: return 4;
    default: return 3;
  }
}

namespace {

std::vector<Element> e_elements(int state) {
  return {Element::make(state, Content::cross), Element::make(state, Content::zero),
          Element::make(state, Content::reg_a), Element::make(state, Content::reg_b)};
}

void add(std::set<Tup>& out, std::initializer_list<Element> coords) {
  Tup t{};
  int c = 0;
  for (Element e : coords) t[c++] = e.code;
  out.insert(t);
}

} // namespace

Relation build_gadget(const Algebra& alg, GadgetId id) {
  std::set<Tup> out;
  int n = alg.num_states();
  for (int st = 0; st < n; ++st) {
    Element a = Element::make(st, Content::reg_a);
    Element b = Element::make(st, Content::reg_b);
    Element z = Element::make(st, Content::zero);
    Element xz = z.crossed();
    std::vector<Element> es = e_elements(st);
    switch (id) {
      case GadgetId::mu:
        // pairs are taken over all of E, not per synchronized state
        for (Element e : es) {
          add(out, {e, e});
          add(out, {e, e.crossed()});
        }
        // dot-free contents only: E also excludes nothing else per state
        break;
      case GadgetId::chi:
        for (Element a1 : es)
          for (Element a2 : es) {
            add(out, {a1, a2, a2});
            add(out, {a1.crossed(), a2, a2.crossed()});
          }
        break;
      case GadgetId::delta_forall:
        add(out, {z, z, z});
        add(out, {z, a, z});
        add(out, {z, b, z});
        add(out, {a, z, z});
        add(out, {a, a, a});
        add(out, {a, b, z});
        add(out, {b, z, z});
        add(out, {b, a, z});
        add(out, {b, b, b});
        for (Element c1 : es)
          for (Element c2 : es) {
            add(out, {xz, c1, c2});
            add(out, {c1, xz, c2});
          }
        break;
      case GadgetId::delta_exists_a:
        add(out, {z, z, z});
        add(out, {z, a, a});
        add(out, {z, b, z});
        add(out, {a, z, a});
        add(out, {a, a, a});
        add(out, {a, b, a});
        add(out, {b, z, z});
        add(out, {b, a, a});
        add(out, {b, b, b});
        for (Element c1 : es)
          for (Element c2 : es) {
            add(out, {xz, c1, c2});
            add(out, {c1, xz, c2});
          }
        break;
      case GadgetId::delta_exists_b:
        add(out, {z, z, z});
        add(out, {z, a, z});
        add(out, {z, b, b});
        add(out, {a, z, z});
        add(out, {a, a, a});
        add(out, {a, b, b});
        add(out, {b, z, b});
        add(out, {b, a, b});
        add(out, {b, b, b});
        for (Element c1 : es)
          for (Element c2 : es) {
            add(out, {xz, c1, c2});
            add(out, {c1, xz, c2});
          }
        break;
      case GadgetId::gamma:
        add(out, {z, z, z, z});
        add(out, {a, a, a, a});
        add(out, {b, b, b, b});
        for (Element alpha : {z, a}) add(out, {z, a, z, alpha});
        for (Element gamma : {z, a, b}) add(out, {z, a, b, gamma});
        for (Element beta : {z, b}) add(out, {z, z, b, beta});
        for (Element c1 : es)
          for (Element c2 : es)
            for (Element c3 : es) {
              Element m12 = alg.meet(c1, c2);
              add(out, {c1, c2, c3, alg.meet(m12, c3)});
              add(out, {xz, c1, c2, c3});
              add(out, {c1, xz, c2, c3});
              add(out, {c1, c2, xz, c3});
            }
        break;
    }
  }
  std::vector<Tup> tv(out.begin(), out.end());
  return Relation(gadget_arity(id), n, std::move(tv));
}

namespace {

OpCertificate certify_one(const Algebra& alg, const Relation& g, Op op, CertTier tier,
                          const GadgetCertOptions& opts) {
  OpCertificate cert;
  cert.op = op;
  cert.tier = tier;
  unsigned mask = 1u << static_cast<int>(op);

  if (tier == CertTier::exhaustive) {
    auto w = closed_under(alg, g.tuples(), g.arity(), mask);
    if (w) {
      cert.closed = false;
      cert.witness = std::move(w);
    }
    return cert;
  }

  if (tier == CertTier::blockwise) {
    // exhaustive inside each state block, membership against the whole gadget
    for (int st = 0; st < g.num_states(); ++st) {
      std::vector<Tup> block;
      for (const Tup& t : g.tuples()) {
        bool in = true;
        for (int c = 0; c < g.arity(); ++c)
          if (t.at(c).state() != st) in = false;
        if (in) block.push_back(t);
      }
      if (block.empty()) continue;
      auto w = closure_violation(alg, block, g.arity(), mask, g);
      if (w) {
        cert.closed = false;
        cert.witness = std::move(w);
        return cert;
      }
    }
  }

  // seeded cross-state sampling (also the whole story for the sampled tier)
  std::mt19937_64 rng(opts.seed ^ (0x9e37u * static_cast<unsigned>(op)));
  std::uniform_int_distribution<size_t> pick(0, g.size() - 1);
  int arity = op_arity(op);
  std::vector<Tup> args(arity);
  std::vector<Element> coord(arity);
  for (uint64_t s = 0; s < opts.samples; ++s) {
    for (int k = 0; k < arity; ++k) args[k] = g.tuples()[pick(rng)];
    Tup out{};
    for (int c = 0; c < g.arity(); ++c) {
      for (int k = 0; k < arity; ++k) coord[k] = args[k].at(c);
      out[c] = alg.apply(op, coord).code;
    }
    if (!g.contains(out)) {
      cert.closed = false;
      cert.witness = ClosureWitness{op, args, out};
      return cert;
    }
  }
  return cert;
}

GadgetCertificate certify_gadget(const Algebra& alg, GadgetId id, unsigned ops_mask,
                                 CertTier tier, const GadgetCertOptions& opts) {
  GadgetCertificate out;
  out.id = id;
  Relation g = build_gadget(alg, id);
  for (int k = 0; k < kNumOps; ++k) {
    if (!((ops_mask >> k) & 1u)) continue;
    out.per_op.push_back(certify_one(alg, g, static_cast<Op>(k), tier, opts));
  }
  return out;
}

} // namespace

CertificationReport certify_gadgets(const Algebra& alg, const GadgetCertOptions& opts) {
  CertificationReport report;
  CertTier tier = CertTier::exhaustive;
  if (alg.size() > opts.exhaustive_max_domain) tier = CertTier::blockwise;
  if (alg.size() > opts.blockwise_max_domain) tier = CertTier::sampled;
  report.tier = tier;

  for (GadgetId id : {GadgetId::mu, GadgetId::chi, GadgetId::delta_forall,
                      GadgetId::delta_exists_a, GadgetId::delta_exists_b})
    report.gadgets.push_back(certify_gadget(alg, id, kAllOpsMask, tier, opts));

  report.gamma_reduct = certify_gadget(alg, GadgetId::gamma, ops_mask_without(Op::i), tier, opts);

  // concrete I-escape from gamma
  Relation gamma = build_gadget(alg, GadgetId::gamma);
  for (const Tup& g1 : gamma.tuples()) {
    for (const Tup& g2 : gamma.tuples()) {
      Tup out{};
      for (int c = 0; c < gamma.arity(); ++c) out[c] = alg.i_op(g1.at(c), g2.at(c)).code;
      if (!gamma.contains(out)) {
        report.gamma_i_violation = ClosureWitness{Op::i, {g1, g2}, out};
        break;
      }
    }
    if (report.gamma_i_violation) break;
  }
  return report;
}

} // namespace cf
