// cloneforge command line: machines in, relations and reports out.
// Talks to the core exclusively through the public C API.

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iostream>
#include <functional>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cloneforge.h"

namespace {

struct MachineDeleter {
  void operator()(cf_machine* m) const { cf_machine_free(m); }
};
struct AlgebraDeleter {
  void operator()(cf_algebra* a) const { cf_algebra_free(a); }
};
struct RelationDeleter {
  void operator()(cf_relation* r) const { cf_relation_free(r); }
};
using MachinePtr = std::unique_ptr<cf_machine, MachineDeleter>;
using AlgebraPtr = std::unique_ptr<cf_algebra, AlgebraDeleter>;
using RelationPtr = std::unique_ptr<cf_relation, RelationDeleter>;

struct OwnedString {
  char* s = nullptr;
  ~OwnedString() { cf_string_free(s); }
  std::string str() const { return s ? std::string(s) : std::string(); }
};

int exit_code(int rc) {
  switch (rc) {
    case CF_OK: return 0;
    case CF_ERR_CHECK:
    case CF_ERR_NOT_FOUND: return 1;
    default: return 2;
  }
}

[[noreturn]] void die(int rc) {
  std::cerr << "error: " << cf_last_error() << "\n";
  std::exit(exit_code(rc));
}

void check(int rc) {
  if (rc != CF_OK) die(rc);
}

MachinePtr load_machine(const std::string& path) {
  cf_machine* m = nullptr;
  check(cf_machine_read_file(path.c_str(), &m));
  return MachinePtr(m);
}

AlgebraPtr build_algebra(const cf_machine* m) {
  cf_algebra* a = nullptr;
  check(cf_algebra_build(m, &a));
  return AlgebraPtr(a);
}

RelationPtr load_relation(const std::string& path) {
  cf_relation* r = nullptr;
  check(cf_relation_read_file(path.c_str(), &r));
  return RelationPtr(r);
}

void emit_relation(const cf_relation* r, const std::string& out_path) {
  if (!out_path.empty()) {
    check(cf_relation_write_file(r, out_path.c_str()));
    std::cout << "wrote " << out_path << " (" << cf_relation_size(r) << " tuples)\n";
    return;
  }
  OwnedString text;
  check(cf_relation_format(r, &text.s));
  std::cout << text.str();
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep))
    if (!item.empty()) out.push_back(item);
  return out;
}

long long env_budget() {
  const char* v = std::getenv("CF_BUDGET_TUPLES");
  return v ? std::atoll(v) : 0;
}

int env_workers() {
  const char* v = std::getenv("CF_WORKERS");
  return v ? std::atoi(v) : 0;
}

struct Common {
  long long budget = 0;
  int workers = 0;

  void finalize() {
    if (budget == 0) budget = env_budget();
    if (workers == 0) workers = env_workers();
  }
  // effective values go to stderr: stdout stays byte-identical across
  // worker counts
  void banner() const {
    std::cerr << "# budget-tuples " << (budget > 0 ? std::to_string(budget) : "default")
              << " workers " << (workers > 0 ? std::to_string(workers) : "default") << "\n";
  }
};

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"workbench for counter machines, their derived algebras, and subpowers"};
  app.require_subcommand(1);
  Common common;
  app.add_option("--budget", common.budget, "closure tuple budget (env CF_BUDGET_TUPLES)");
  app.add_option("--workers", common.workers, "worker threads (env CF_WORKERS)");

  // ---- machine ----
  auto* machine = app.add_subcommand("machine", "parse, normalize, and run machines");
  machine->require_subcommand(1);
  std::string m_file;
  long long fuel = 1'000'000;
  std::string input = "0,0";

  auto* m_parse = machine->add_subcommand("parse", "validate and echo the canonical form");
  m_parse->add_option("file", m_file)->required();

  std::string m_out;
  auto* m_norm = machine->add_subcommand("normalize", "apply the normalization transforms");
  m_norm->add_option("file", m_file)->required();
  m_norm->add_option("--out", m_out, "write the result here instead of stdout");

  auto* m_run = machine->add_subcommand("run", "simulate from state 1");
  m_run->add_option("file", m_file)->required();
  m_run->add_option("--fuel", fuel, "step budget");
  m_run->add_option("--input", input, "initial registers a,b");

  auto* m_cap = machine->add_subcommand("capacity", "capacity profile from (1,0,0)");
  m_cap->add_option("file", m_file)->required();
  m_cap->add_option("--fuel", fuel, "step budget");

  // ---- algebra ----
  auto* algebra = app.add_subcommand("algebra", "the derived finite algebra");
  algebra->require_subcommand(1);
  std::string a_machine;
  std::string op_sym, term_text_arg;
  std::vector<std::string> op_args, term_env;

  auto* a_build = algebra->add_subcommand("build", "build and summarise");
  a_build->add_option("--machine", a_machine)->required();

  auto* a_op = algebra->add_subcommand("op", "apply one fundamental operation");
  a_op->add_option("symbol", op_sym, "meet|M|Mp|I|H|N0|S|Ndot|P")->required();
  a_op->add_option("args", op_args, "elements like (1,.)")->required();
  a_op->add_option("--machine", a_machine)->required();

  auto* a_term = algebra->add_subcommand("term-eval", "evaluate a term");
  a_term->add_option("term", term_text_arg, "e.g. H(I(x1,x1))")->required();
  a_term->add_option("env", term_env, "one element per variable")->required();
  a_term->add_option("--machine", a_machine)->required();

  // ---- rel ----
  auto* rel = app.add_subcommand("rel", "relations: generation, projection, analysis");
  rel->require_subcommand(1);
  std::string r_machine, r_in, r_out, r_coords, r_drop, gadget_id, gens_file;
  int sm_m = 0;
  bool classify_json = false;
  std::vector<int> config_args;

  auto* r_gen = rel->add_subcommand("generate", "close a generator file under the operations");
  r_gen->add_option("--machine", r_machine)->required();
  r_gen->add_option("--gens", gens_file, "relation file with the generators")->required();
  r_gen->add_option("--out", r_out);

  auto* r_proj = rel->add_subcommand("project", "project onto coordinates");
  r_proj->add_option("--in", r_in)->required();
  r_proj->add_option("--coords", r_coords, "1-based list, e.g. 1,3");
  r_proj->add_option("--drop", r_drop, "complement form, e.g. 3 for (!= 3)");
  r_proj->add_option("--out", r_out);

  auto* r_classify = rel->add_subcommand("classify", "profile a relation");
  r_classify->add_option("--in", r_in)->required();
  r_classify->add_flag("--json", classify_json);

  auto* r_sm = rel->add_subcommand("sm", "the m-th sequential relation");
  r_sm->add_option("m", sm_m)->required();
  r_sm->add_option("--machine", r_machine)->required();
  r_sm->add_option("--out", r_out);

  auto* r_config = rel->add_subcommand("config", "configuration vectors (k a b m)");
  r_config->add_option("args", config_args)->expected(4);
  r_config->add_option("--machine", r_machine)->required();
  r_config->add_option("--out", r_out);

  auto* r_ri = rel->add_subcommand("ri", "closure of the pairwise I-image of the Y-part");
  r_ri->add_option("--in", r_in)->required();
  r_ri->add_option("--machine", r_machine)->required();
  r_ri->add_option("--out", r_out);

  auto* r_gadget = rel->add_subcommand("gadget", "one of the fixed auxiliary relations");
  r_gadget->add_option("id", gadget_id, "mu|chi|delta-forall|delta-exists-a|delta-exists-b|gamma")
      ->required();
  r_gadget->add_option("--machine", r_machine)->required();
  r_gadget->add_option("--out", r_out);

  // ---- entail ----
  auto* entail = app.add_subcommand("entail", "expressions and certificates over a catalog");
  entail->require_subcommand(1);
  std::string e_machine, e_catalog, e_expr, e_cert, e_target, e_bounds;
  bool e_full_perms = false;

  auto* e_eval = entail->add_subcommand("eval", "evaluate an expression");
  e_eval->add_option("--machine", e_machine)->required();
  e_eval->add_option("--catalog", e_catalog, "comma-separated relation files");
  e_eval->add_option("--expr", e_expr)->required();
  e_eval->add_option("--out", r_out);

  auto* e_check = entail->add_subcommand("check", "evaluate a canonical certificate");
  e_check->add_option("--machine", e_machine)->required();
  e_check->add_option("--catalog", e_catalog);
  e_check->add_option("--cert", e_cert)->required();
  e_check->add_option("--target", e_target, "compare the value against this relation file");
  e_check->add_option("--out", r_out);

  auto* e_search = entail->add_subcommand("search", "bounded certificate search");
  e_search->add_option("--machine", e_machine)->required();
  e_search->add_option("--catalog", e_catalog);
  e_search->add_option("--target", e_target)->required();
  e_search->add_option("--bounds", e_bounds, "factors,intersects,candidates");
  e_search->add_flag("--full-perms", e_full_perms, "search all coordinate permutations");

  // ---- verify ----
  std::string v_suite, v_machine, v_report = "text";
  uint64_t v_seed = 0;
  bool v_timings = false;
  auto* verify = app.add_subcommand("verify", "run a verification suite");
  verify->add_option("suite", v_suite,
                     "basic-facts|encoding-example|coding-theorem|halting-equivalence|"
                     "relations-lemmas|gadgets|tools|t-halting")
      ->required();
  verify->add_option("--machine", v_machine)->required();
  verify->add_option("--report", v_report, "text|structured");
  verify->add_option("--seed", v_seed);
  verify->add_option("--fuel", fuel);
  verify->add_flag("--timings", v_timings, "include per-check timings (not reproducible)");

  // global flags (--budget/--workers) may follow any subcommand
  std::function<void(CLI::App*)> allow_fallthrough = [&](CLI::App* cmd) {
    cmd->fallthrough();
    for (CLI::App* sub : cmd->get_subcommands({})) allow_fallthrough(sub);
  };
  allow_fallthrough(&app);

  CLI11_PARSE(app, argc, argv);
  common.finalize();

  // machine -------------------------------------------------------------
  if (m_parse->parsed()) {
    MachinePtr m = load_machine(m_file);
    OwnedString text;
    check(cf_machine_format(m.get(), &text.s));
    std::cout << "states " << cf_machine_num_states(m.get()) << "\n" << text.str();
    return 0;
  }
  if (m_norm->parsed()) {
    MachinePtr m = load_machine(m_file);
    cf_machine* n = nullptr;
    check(cf_machine_normalize(m.get(), &n));
    MachinePtr norm(n);
    OwnedString text;
    check(cf_machine_format(norm.get(), &text.s));
    if (!m_out.empty()) {
      std::ofstream out(m_out, std::ios::binary);
      out << text.str();
      std::cout << "wrote " << m_out << "\n";
    } else {
      std::cout << "states " << cf_machine_num_states(norm.get()) << "\n" << text.str();
    }
    return 0;
  }
  if (m_run->parsed()) {
    MachinePtr m = load_machine(m_file);
    auto regs = split(input, ',');
    long long a = regs.size() > 0 ? std::atoll(regs[0].c_str()) : 0;
    long long b = regs.size() > 1 ? std::atoll(regs[1].c_str()) : 0;
    std::cout << "# fuel " << fuel << " input " << a << "," << b << "\n";
    OwnedString table;
    check(cf_machine_run_table(m.get(), 1, a, b, fuel, &table.s));
    std::cout << table.str();
    return 0;
  }
  if (m_cap->parsed()) {
    MachinePtr m = load_machine(m_file);
    cf_capacity_report rep;
    std::cout << "# fuel " << fuel << "\n";
    check(cf_machine_capacity(m.get(), fuel, &rep));
    if (rep.halted)
      std::cout << "halted steps=" << rep.steps << " capacity=" << rep.capacity << "\n";
    else
      std::cout << "unknown steps=" << rep.steps << " k-step-capacity=" << rep.capacity << "\n";
    return 0;
  }

  // algebra ---------------------------------------------------------------
  if (a_build->parsed()) {
    MachinePtr m = load_machine(a_machine);
    AlgebraPtr a = build_algebra(m.get());
    std::cout << "states " << cf_algebra_num_states(a.get()) << "\n"
              << "domain " << cf_algebra_size(a.get()) << "\n";
    return 0;
  }
  if (a_op->parsed()) {
    MachinePtr m = load_machine(a_machine);
    AlgebraPtr a = build_algebra(m.get());
    std::vector<const char*> args;
    for (const std::string& s : op_args) args.push_back(s.c_str());
    OwnedString out;
    check(cf_algebra_apply(a.get(), op_sym.c_str(), args.data(), static_cast<int>(args.size()),
                           &out.s));
    std::cout << out.str() << "\n";
    return 0;
  }
  if (a_term->parsed()) {
    MachinePtr m = load_machine(a_machine);
    AlgebraPtr a = build_algebra(m.get());
    std::vector<const char*> env;
    for (const std::string& s : term_env) env.push_back(s.c_str());
    OwnedString out;
    check(cf_algebra_eval_term(a.get(), term_text_arg.c_str(), env.data(),
                               static_cast<int>(env.size()), &out.s));
    std::cout << out.str() << "\n";
    return 0;
  }

  // rel ---------------------------------------------------------------------
  if (r_gen->parsed()) {
    MachinePtr m = load_machine(r_machine);
    AlgebraPtr a = build_algebra(m.get());
    RelationPtr gens = load_relation(gens_file);
    common.banner();
    cf_relation* out = nullptr;
    check(cf_relation_generate(a.get(), gens.get(), common.budget, common.workers, &out));
    RelationPtr rel_out(out);
    emit_relation(rel_out.get(), r_out);
    return 0;
  }
  if (r_proj->parsed()) {
    RelationPtr in = load_relation(r_in);
    bool drop = !r_drop.empty();
    if (drop == !r_coords.empty()) {
      std::cerr << "error: give exactly one of --coords / --drop\n";
      return 2;
    }
    std::vector<int> cs;
    for (const std::string& c : split(drop ? r_drop : r_coords, ',')) cs.push_back(std::atoi(c.c_str()));
    cf_relation* out = nullptr;
    check(cf_relation_project(in.get(), cs.data(), static_cast<int>(cs.size()), drop ? 1 : 0, &out));
    RelationPtr rel_out(out);
    emit_relation(rel_out.get(), r_out);
    return 0;
  }
  if (r_classify->parsed()) {
    RelationPtr in = load_relation(r_in);
    OwnedString text;
    check(cf_relation_classify(in.get(), classify_json ? 1 : 0, &text.s));
    std::cout << text.str() << (classify_json ? "\n" : "");
    return 0;
  }
  if (r_sm->parsed()) {
    MachinePtr m = load_machine(r_machine);
    AlgebraPtr a = build_algebra(m.get());
    common.banner();
    cf_relation* out = nullptr;
    check(cf_relation_sm(a.get(), sm_m, common.budget, common.workers, &out));
    RelationPtr rel_out(out);
    emit_relation(rel_out.get(), r_out);
    return 0;
  }
  if (r_config->parsed()) {
    MachinePtr m = load_machine(r_machine);
    AlgebraPtr a = build_algebra(m.get());
    cf_relation* out = nullptr;
    check(cf_relation_config(a.get(), config_args[0], config_args[1], config_args[2],
                             config_args[3], &out));
    RelationPtr rel_out(out);
    emit_relation(rel_out.get(), r_out);
    return 0;
  }
  if (r_ri->parsed()) {
    MachinePtr m = load_machine(r_machine);
    AlgebraPtr a = build_algebra(m.get());
    RelationPtr in = load_relation(r_in);
    common.banner();
    cf_relation* out = nullptr;
    check(cf_relation_ri(a.get(), in.get(), common.budget, common.workers, &out));
    RelationPtr rel_out(out);
    emit_relation(rel_out.get(), r_out);
    return 0;
  }
  if (r_gadget->parsed()) {
    MachinePtr m = load_machine(r_machine);
    AlgebraPtr a = build_algebra(m.get());
    cf_relation* out = nullptr;
    check(cf_relation_gadget(a.get(), gadget_id.c_str(), &out));
    RelationPtr rel_out(out);
    emit_relation(rel_out.get(), r_out);
    return 0;
  }

  // entail ---------------------------------------------------------------------
  auto load_catalog = [&](std::vector<RelationPtr>& owned, std::vector<const cf_relation*>& raw) {
    for (const std::string& f : split(e_catalog, ',')) {
      owned.push_back(load_relation(f));
      raw.push_back(owned.back().get());
    }
  };
  if (e_eval->parsed()) {
    MachinePtr m = load_machine(e_machine);
    AlgebraPtr a = build_algebra(m.get());
    std::vector<RelationPtr> owned;
    std::vector<const cf_relation*> cat;
    load_catalog(owned, cat);
    cf_relation* out = nullptr;
    check(cf_entail_eval(a.get(), cat.data(), static_cast<int>(cat.size()), e_expr.c_str(), &out));
    RelationPtr rel_out(out);
    emit_relation(rel_out.get(), r_out);
    return 0;
  }
  if (e_check->parsed()) {
    MachinePtr m = load_machine(e_machine);
    AlgebraPtr a = build_algebra(m.get());
    std::vector<RelationPtr> owned;
    std::vector<const cf_relation*> cat;
    load_catalog(owned, cat);
    cf_relation* out = nullptr;
    OwnedString info;
    check(cf_entail_check(a.get(), cat.data(), static_cast<int>(cat.size()), e_cert.c_str(), &out,
                          &info.s));
    RelationPtr value(out);
    std::cout << "info " << info.str() << "\n";
    if (!e_target.empty()) {
      RelationPtr target = load_relation(e_target);
      int eq = 0;
      check(cf_relation_equal(value.get(), target.get(), &eq));
      std::cout << "matches-target " << (eq ? "yes" : "no") << "\n";
      if (!eq) return 1;
    } else {
      emit_relation(value.get(), r_out);
    }
    return 0;
  }
  if (e_search->parsed()) {
    MachinePtr m = load_machine(e_machine);
    AlgebraPtr a = build_algebra(m.get());
    std::vector<RelationPtr> owned;
    std::vector<const cf_relation*> cat;
    load_catalog(owned, cat);
    RelationPtr target = load_relation(e_target);
    int max_factors = 0, max_intersects = 0;
    long long max_candidates = 0;
    auto bounds = split(e_bounds, ',');
    if (bounds.size() > 0) max_factors = std::atoi(bounds[0].c_str());
    if (bounds.size() > 1) max_intersects = std::atoi(bounds[1].c_str());
    if (bounds.size() > 2) max_candidates = std::atoll(bounds[2].c_str());
    std::cout << "# bounds factors=" << (max_factors > 0 ? std::to_string(max_factors) : "default")
              << " intersects=" << (max_intersects > 0 ? std::to_string(max_intersects) : "default")
              << " candidates=" << (max_candidates > 0 ? std::to_string(max_candidates) : "default")
              << " full-perms=" << (e_full_perms ? "yes" : "no") << "\n";
    OwnedString cert;
    int rc = cf_entail_search(a.get(), cat.data(), static_cast<int>(cat.size()), target.get(),
                              max_factors, max_intersects, max_candidates, e_full_perms ? 1 : 0,
                              &cert.s);
    if (rc == CF_OK) {
      std::cout << "found " << cert.str() << "\n";
      return 0;
    }
    std::cout << (rc == CF_ERR_BUDGET ? "budget-exhausted" : "not-found-within-bounds") << "\n";
    return exit_code(rc);
  }

  // verify ----------------------------------------------------------------------
  if (verify->parsed()) {
    MachinePtr m = load_machine(v_machine);
    common.banner();
    int format = v_report == "structured" ? 1 : 0;
    OwnedString report;
    int all_pass = 0;
    check(cf_verify(m.get(), v_suite.c_str(), v_seed, common.budget, common.workers, fuel, format,
                    v_timings ? 1 : 0, &report.s, &all_pass));
    std::cout << report.str();
    return all_pass ? 0 : 1;
  }

  std::cerr << "error: no subcommand\n";
  return 2;
}
