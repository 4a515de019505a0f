#include "cloneforge.h"

#include <cstring>
#include <thread>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "entail.hpp"
#include "gadgets.hpp"
#include "verify.hpp"

using namespace cf;

struct cf_machine {
  MinskyMachine m;
};
struct cf_algebra {
  Algebra a;
};
struct cf_relation {
  Relation r;
};

namespace {

thread_local std::string g_last_error;

int code_of(const Error& e) {
  switch (e.code()) {
    case ErrorCode::parse: return CF_ERR_PARSE;
    case ErrorCode::invalid: return CF_ERR_INVALID;
    case ErrorCode::budget: return CF_ERR_BUDGET;
    case ErrorCode::unreachable: return CF_ERR_UNREACHABLE;
    case ErrorCode::check_failed: return CF_ERR_CHECK;
  }
  return CF_ERR_INTERNAL;
}

template <class F>
int guarded(F&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    g_last_error = e.what();
    return code_of(e);
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return CF_ERR_INTERNAL;
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

int require(bool cond, const char* what) {
  if (cond) return CF_OK;
  g_last_error = what;
  return CF_ERR_INVALID;
}

int effective_workers(int workers) {
  if (workers > 0) return workers;
  unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

GenerateOptions gen_opts(long long budget, int workers) {
  GenerateOptions g;
  if (budget > 0) g.budget_tuples = static_cast<size_t>(budget);
  g.workers = effective_workers(workers);
  return g;
}

std::string classify_text(const RelationProfile& p, const Relation& r) {
  std::ostringstream out;
  auto coords = [](const std::vector<int>& cs) {
    std::string s = "{";
    for (size_t i = 0; i < cs.size(); ++i) {
      if (i) s += ",";
      s += std::to_string(cs[i] + 1);
    }
    return s + "}";
  };
  out << "arity " << r.arity() << "\n";
  out << "tuples " << r.size() << "\n";
  out << "synchronized " << (p.synchronized ? "yes" : "no") << "\n";
  out << "computational " << (p.computational ? "yes" : "no") << "\n";
  out << "halting " << (p.halting ? "yes" : "no");
  if (p.halting_witness) out << " witness (" << tuple_text(*p.halting_witness, r.arity()) << ")";
  out << "\n";
  out << "dot-part " << coords(p.dot_part) << "\n";
  out << "approx-halting " << coords(p.approx_halting) << "\n";
  out << "capacity " << p.capacity.value << "\n";
  out << "weak-capacity " << p.weak_capacity.value << "\n";
  return out.str();
}

std::vector<Relation> catalog_vec(const cf_relation* const* catalog, int ncatalog) {
  std::vector<Relation> out;
  for (int i = 0; i < ncatalog; ++i) {
    if (!catalog[i]) fail(ErrorCode::invalid, "null catalog entry");
    out.push_back(catalog[i]->r);
  }
  return out;
}

std::string classify_json(const RelationProfile& p, const Relation& r) {
  nlohmann::json j;
  auto coords = [](const std::vector<int>& cs) {
    std::vector<int> one;
    for (int c : cs) one.push_back(c + 1);
    return one;
  };
  j["arity"] = r.arity();
  j["tuples"] = r.size();
  j["synchronized"] = p.synchronized;
  j["computational"] = p.computational;
  j["halting"] = p.halting;
  j["halting_witness"] = p.halting_witness
                             ? nlohmann::json(tuple_text(*p.halting_witness, r.arity()))
                             : nlohmann::json();
  j["dot_part"] = coords(p.dot_part);
  j["approx_halting"] = coords(p.approx_halting);
  j["capacity"] = p.capacity.value;
  j["weak_capacity"] = p.weak_capacity.value;
  return j.dump();
}

} // namespace

extern "C" {

const char* cf_version(void) { return "cloneforge 0.1.0"; }

const char* cf_last_error(void) { return g_last_error.c_str(); }

void cf_string_free(char* s) { std::free(s); }

/* ---- machines ---------------------------------------------------------- */

int cf_machine_parse(const char* text, cf_machine** out) {
  if (int rc = require(text && out, "null argument")) return rc;
  return guarded([&] {
    *out = new cf_machine{MinskyMachine::parse(text)};
    return CF_OK;
  });
}

int cf_machine_read_file(const char* path, cf_machine** out) {
  if (int rc = require(path && out, "null argument")) return rc;
  return guarded([&] {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::invalid, std::string("cannot read ") + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    *out = new cf_machine{MinskyMachine::parse(buf.str())};
    return CF_OK;
  });
}

void cf_machine_free(cf_machine* m) { delete m; }

int cf_machine_num_states(const cf_machine* m) { return m ? m->m.num_states() : 0; }

int cf_machine_format(const cf_machine* m, char** out_text) {
  if (int rc = require(m && out_text, "null argument")) return rc;
  return guarded([&] {
    *out_text = dup_string(m->m.format());
    return CF_OK;
  });
}

int cf_machine_normalize(const cf_machine* m, cf_machine** out) {
  if (int rc = require(m && out, "null argument")) return rc;
  return guarded([&] {
    *out = new cf_machine{m->m.normalize()};
    return CF_OK;
  });
}

int cf_machine_is_normalized(const cf_machine* m, int* out_flag) {
  if (int rc = require(m && out_flag, "null argument")) return rc;
  return guarded([&] {
    *out_flag = m->m.is_normalized() ? 1 : 0;
    return CF_OK;
  });
}

int cf_machine_step(const cf_machine* m, int state, long long alpha, long long beta,
                    int* out_state, long long* out_alpha, long long* out_beta) {
  if (int rc = require(m && out_state && out_alpha && out_beta, "null argument")) return rc;
  return guarded([&] {
    Configuration cfg = m->m.step({state, alpha, beta});
    *out_state = cfg.state;
    *out_alpha = cfg.alpha;
    *out_beta = cfg.beta;
    return CF_OK;
  });
}

int cf_machine_run(const cf_machine* m, int state, long long alpha, long long beta, long long fuel,
                   cf_run_result* out) {
  if (int rc = require(m && out, "null argument")) return rc;
  return guarded([&] {
    RunResult r = m->m.run({state, alpha, beta}, fuel);
    out->halted = r.outcome == RunResult::Outcome::halted ? 1 : 0;
    out->steps = r.steps;
    out->trace_max_sum = r.trace_max_sum;
    out->final_state = r.final.state;
    out->final_alpha = r.final.alpha;
    out->final_beta = r.final.beta;
    return CF_OK;
  });
}

int cf_machine_run_table(const cf_machine* m, int state, long long alpha, long long beta,
                         long long fuel, char** out_text) {
  if (int rc = require(m && out_text, "null argument")) return rc;
  return guarded([&] {
    std::ostringstream out;
    Configuration cfg{state, alpha, beta};
    long long n = 0;
    out << n << " (" << cfg.state << "," << cfg.alpha << "," << cfg.beta << ")\n";
    while (cfg.state != 0 && n < fuel) {
      cfg = m->m.step(cfg);
      ++n;
      out << n << " (" << cfg.state << "," << cfg.alpha << "," << cfg.beta << ")\n";
    }
    out << (cfg.state == 0 ? "halted" : "fuel-exhausted") << " steps=" << n << "\n";
    *out_text = dup_string(out.str());
    return CF_OK;
  });
}

int cf_machine_capacity(const cf_machine* m, long long fuel, cf_capacity_report* out) {
  if (int rc = require(m && out, "null argument")) return rc;
  return guarded([&] {
    CapacityReport r = m->m.capacity(fuel);
    out->halted = r.halted ? 1 : 0;
    out->capacity = r.capacity;
    out->steps = r.steps;
    return CF_OK;
  });
}

/* ---- the derived algebra ------------------------------------------------ */

int cf_algebra_build(const cf_machine* m, cf_algebra** out) {
  if (int rc = require(m && out, "null argument")) return rc;
  return guarded([&] {
    *out = new cf_algebra{Algebra(m->m)};
    return CF_OK;
  });
}

void cf_algebra_free(cf_algebra* a) { delete a; }

int cf_algebra_size(const cf_algebra* a) { return a ? a->a.size() : 0; }

int cf_algebra_num_states(const cf_algebra* a) { return a ? a->a.num_states() : 0; }

int cf_algebra_apply(const cf_algebra* a, const char* op, const char* const* args, int nargs,
                     char** out_element) {
  if (int rc = require(a && op && out_element && (nargs == 0 || args), "null argument")) return rc;
  return guarded([&] {
    auto o = op_from_name(op);
    if (!o) fail(ErrorCode::invalid, std::string("unknown operation `") + op + "`");
    std::vector<Element> elems;
    for (int i = 0; i < nargs; ++i) elems.push_back(parse_element(args[i], a->a.num_states()));
    Element result = a->a.apply(*o, elems);
    *out_element = dup_string(element_text(result));
    return CF_OK;
  });
}

int cf_algebra_eval_term(const cf_algebra* a, const char* term, const char* const* env, int nenv,
                         char** out_element) {
  if (int rc = require(a && term && out_element && (nenv == 0 || env), "null argument")) return rc;
  return guarded([&] {
    Term t = parse_term(term);
    std::vector<Element> elems;
    for (int i = 0; i < nenv; ++i) elems.push_back(parse_element(env[i], a->a.num_states()));
    Element result = eval_term(a->a, t, elems);
    *out_element = dup_string(element_text(result));
    return CF_OK;
  });
}

int cf_algebra_state_term(const cf_algebra* a, int from_state, int to_state, char** out_term) {
  if (int rc = require(a && out_term, "null argument")) return rc;
  return guarded([&] {
    *out_term = dup_string(term_text(derive_state_term(a->a, from_state, to_state)));
    return CF_OK;
  });
}

int cf_algebra_z_term(const cf_algebra* a, int state, char** out_term) {
  if (int rc = require(a && out_term, "null argument")) return rc;
  return guarded([&] {
    *out_term = dup_string(term_text(derive_z(a->a, state)));
    return CF_OK;
  });
}

int cf_algebra_w_term(const cf_algebra* a, int state, char** out_term) {
  if (int rc = require(a && out_term, "null argument")) return rc;
  return guarded([&] {
    *out_term = dup_string(term_text(derive_w(a->a, state)));
    return CF_OK;
  });
}

/* ---- relations ----------------------------------------------------------- */

int cf_relation_parse(const char* text, cf_relation** out) {
  if (int rc = require(text && out, "null argument")) return rc;
  return guarded([&] {
    *out = new cf_relation{Relation::from_text(text)};
    return CF_OK;
  });
}

int cf_relation_read_file(const char* path, cf_relation** out) {
  if (int rc = require(path && out, "null argument")) return rc;
  return guarded([&] {
    *out = new cf_relation{Relation::read_file(path)};
    return CF_OK;
  });
}

void cf_relation_free(cf_relation* r) { delete r; }

int cf_relation_format(const cf_relation* r, char** out_text) {
  if (int rc = require(r && out_text, "null argument")) return rc;
  return guarded([&] {
    *out_text = dup_string(r->r.to_text());
    return CF_OK;
  });
}

int cf_relation_write_file(const cf_relation* r, const char* path) {
  if (int rc = require(r && path, "null argument")) return rc;
  return guarded([&] {
    r->r.write_file(path);
    return CF_OK;
  });
}

int cf_relation_arity(const cf_relation* r) { return r ? r->r.arity() : 0; }

long long cf_relation_size(const cf_relation* r) {
  return r ? static_cast<long long>(r->r.size()) : 0;
}

int cf_relation_equal(const cf_relation* a, const cf_relation* b, int* out_flag) {
  if (int rc = require(a && b && out_flag, "null argument")) return rc;
  *out_flag = a->r == b->r ? 1 : 0;
  return CF_OK;
}

int cf_relation_generate(const cf_algebra* a, const cf_relation* generators,
                         long long budget_tuples, int workers, cf_relation** out) {
  if (int rc = require(a && generators && out, "null argument")) return rc;
  return guarded([&] {
    Relation r = generate(a->a, generators->r.tuples(), generators->r.arity(),
                          gen_opts(budget_tuples, workers));
    if (r.stats().budget_exceeded)
      fail(ErrorCode::budget, "closure budget exceeded; partial size " + std::to_string(r.size()));
    *out = new cf_relation{std::move(r)};
    return CF_OK;
  });
}

int cf_relation_sm(const cf_algebra* a, int m, long long budget_tuples, int workers,
                   cf_relation** out) {
  if (int rc = require(a && out, "null argument")) return rc;
  return guarded([&] {
    Relation r = sequential_relation(a->a, m, gen_opts(budget_tuples, workers));
    if (r.stats().budget_exceeded)
      fail(ErrorCode::budget, "closure budget exceeded; partial size " + std::to_string(r.size()));
    *out = new cf_relation{std::move(r)};
    return CF_OK;
  });
}

int cf_relation_config(const cf_algebra* a, int state, int alpha, int beta, int m,
                       cf_relation** out) {
  if (int rc = require(a && out, "null argument")) return rc;
  return guarded([&] {
    std::vector<Tup> tuples = config_set(a->a, state, alpha, beta, m);
    *out = new cf_relation{Relation(m, a->a.num_states(), std::move(tuples))};
    return CF_OK;
  });
}

int cf_relation_gadget(const cf_algebra* a, const char* gadget, cf_relation** out) {
  if (int rc = require(a && gadget && out, "null argument")) return rc;
  return guarded([&] {
    auto id = gadget_from_name(gadget);
    if (!id) fail(ErrorCode::invalid, std::string("unknown gadget `") + gadget + "`");
    *out = new cf_relation{build_gadget(a->a, *id)};
    return CF_OK;
  });
}

int cf_relation_ri(const cf_algebra* a, const cf_relation* r, long long budget_tuples, int workers,
                   cf_relation** out) {
  if (int rc = require(a && r && out, "null argument")) return rc;
  return guarded([&] {
    *out = new cf_relation{build_RI(a->a, r->r, gen_opts(budget_tuples, workers))};
    return CF_OK;
  });
}

int cf_relation_project(const cf_relation* r, const int* coords, int ncoords, int drop,
                        cf_relation** out) {
  if (int rc = require(r && coords && ncoords > 0 && out, "null argument")) return rc;
  return guarded([&] {
    std::vector<int> cs;
    for (int i = 0; i < ncoords; ++i) cs.push_back(coords[i] - 1);
    *out = new cf_relation{drop ? project_away(r->r, cs) : project(r->r, cs)};
    return CF_OK;
  });
}

int cf_relation_closed_under(const cf_algebra* a, const cf_relation* r, unsigned ops_mask,
                             int* out_closed, char** out_witness) {
  if (int rc = require(a && r && out_closed, "null argument")) return rc;
  return guarded([&] {
    auto w = closed_under(a->a, r->r.tuples(), r->r.arity(), ops_mask);
    *out_closed = w ? 0 : 1;
    if (w && out_witness) {
      std::string s = std::string(op_name(w->op)) + " on";
      for (const Tup& arg : w->args) s += " (" + tuple_text(arg, r->r.arity()) + ")";
      s += " -> (" + tuple_text(w->out, r->r.arity()) + ")";
      *out_witness = dup_string(s);
    } else if (out_witness) {
      *out_witness = nullptr;
    }
    return CF_OK;
  });
}

int cf_relation_classify(const cf_relation* r, int as_json, char** out_text) {
  if (int rc = require(r && out_text, "null argument")) return rc;
  return guarded([&] {
    RelationProfile p = classify(r->r);
    *out_text = dup_string(as_json ? classify_json(p, r->r) : classify_text(p, r->r));
    return CF_OK;
  });
}

int cf_relation_inherent_nonhalting(const cf_algebra* a, const cf_relation* r, char** out_coords) {
  if (int rc = require(a && r && out_coords, "null argument")) return rc;
  return guarded([&] {
    std::vector<int> coords = inherent_nonhalting(a->a, r->r);
    std::string s;
    for (size_t i = 0; i < coords.size(); ++i) {
      if (i) s += ",";
      s += std::to_string(coords[i] + 1);
    }
    *out_coords = dup_string(s);
    return CF_OK;
  });
}

int cf_relation_chi_compatible(const cf_algebra* a, const cf_relation* generators, const int* K,
                               int nK, int* out_flag) {
  if (int rc = require(a && generators && out_flag, "null argument")) return rc;
  return guarded([&] {
    std::vector<int> ks;
    if (nK >= 0) {
      for (int i = 0; i < nK; ++i) ks.push_back(K[i] - 1);
    } else {
      Relation closed = generate(a->a, generators->r.tuples(), generators->r.arity(), {});
      RelationProfile p = classify(closed);
      for (int c = 0; c < generators->r.arity(); ++c)
        if (std::find(p.dot_part.begin(), p.dot_part.end(), c) == p.dot_part.end())
          ks.push_back(c);
    }
    *out_flag = chi_compatible(generators->r.tuples(), generators->r.arity(), ks) ? 1 : 0;
    return CF_OK;
  });
}

/* ---- entailment ----------------------------------------------------------- */

int cf_entail_eval(const cf_algebra* a, const cf_relation* const* catalog, int ncatalog,
                   const char* expr, cf_relation** out) {
  if (int rc = require(a && expr && out && (ncatalog == 0 || catalog), "null argument")) return rc;
  return guarded([&] {
    std::vector<Relation> cat = catalog_vec(catalog, ncatalog);
    *out = new cf_relation{eval_expression(a->a, cat, parse_expr(expr))};
    return CF_OK;
  });
}

int cf_entail_check(const cf_algebra* a, const cf_relation* const* catalog, int ncatalog,
                    const char* certificate, cf_relation** out_value, char** out_info) {
  if (int rc = require(a && certificate && out_value && (ncatalog == 0 || catalog),
                       "null argument"))
    return rc;
  return guarded([&] {
    std::vector<Relation> cat = catalog_vec(catalog, ncatalog);
    CertEvalInfo info;
    Relation value = canonical_form_eval(a->a, cat, parse_certificate(certificate), {}, &info);
    if (out_info) {
      nlohmann::json j;
      j["product_arity"] = info.product_arity;
      j["max_catalog_arity"] = info.max_catalog_arity;
      j["contains_all_sigma"] = info.contains_all_sigma;
      j["low_arity_case"] = info.low_arity_case;
      j["c_part_nonempty"] = info.c_part_nonempty;
      *out_info = dup_string(j.dump());
    }
    *out_value = new cf_relation{std::move(value)};
    return CF_OK;
  });
}

int cf_entail_search(const cf_algebra* a, const cf_relation* const* catalog, int ncatalog,
                     const cf_relation* target, int max_factors, int max_intersects,
                     long long max_candidates, int full_perms, char** out_certificate) {
  if (int rc = require(a && target && out_certificate && (ncatalog == 0 || catalog),
                       "null argument"))
    return rc;
  return guarded([&] {
    std::vector<Relation> cat = catalog_vec(catalog, ncatalog);
    SearchBounds bounds;
    if (max_factors > 0) bounds.max_factors_per_product = max_factors;
    if (max_intersects > 0) bounds.max_intersects = max_intersects;
    if (max_candidates > 0) bounds.max_candidates = static_cast<uint64_t>(max_candidates);
    bounds.full_permutations = full_perms != 0;
    CanonicalCertificate cert;
    SearchOutcome outcome = search_entailment(a->a, cat, target->r, bounds, &cert);
    if (outcome == SearchOutcome::found) {
      *out_certificate = dup_string(certificate_text(cert));
      return CF_OK;
    }
    g_last_error = outcome == SearchOutcome::budget_exhausted
                       ? "candidate budget exhausted before covering the bounds"
                       : "no certificate within the given bounds";
    return outcome == SearchOutcome::budget_exhausted ? CF_ERR_BUDGET : CF_ERR_NOT_FOUND;
  });
}

int cf_preserves(const cf_algebra* a, const char* term, const cf_relation* r, int* out_preserved,
                 char** out_witness) {
  if (int rc = require(a && term && r && out_preserved, "null argument")) return rc;
  return guarded([&] {
    PreserveVerdict v = preserves(a->a, parse_term(term), r->r);
    *out_preserved = v.preserved ? (v.sampled ? 2 : 1) : 0;
    if (out_witness) {
      if (!v.preserved) {
        std::string s = "rows:";
        for (const Tup& arg : v.args) s += " (" + tuple_text(arg, r->r.arity()) + ")";
        s += " -> (" + tuple_text(v.out, r->r.arity()) + ")";
        *out_witness = dup_string(s);
      } else {
        *out_witness = nullptr;
      }
    }
    return CF_OK;
  });
}

/* ---- verification suites --------------------------------------------------- */

int cf_verify(const cf_machine* m, const char* suite, uint64_t seed, long long budget_tuples,
              int workers, long long fuel, int format, int timings, char** out_report,
              int* out_all_pass) {
  if (int rc = require(m && suite && out_report && out_all_pass, "null argument")) return rc;
  return guarded([&] {
    SuiteOptions opts;
    if (seed) opts.seed = seed;
    if (budget_tuples > 0) opts.budget_tuples = static_cast<size_t>(budget_tuples);
    opts.workers = effective_workers(workers);
    if (fuel > 0) opts.fuel = fuel;
    SuiteReport report = run_suite(m->m, suite, opts);
    *out_report = dup_string(format ? report_structured(report, timings != 0)
                                    : report_text(report, timings != 0));
    *out_all_pass = report.all_pass() ? 1 : 0;
    return CF_OK;
  });
}

} // extern "C"
