/* cloneforge C API: machine-derived finite algebras, their subpowers, and the
 * verification suites, behind opaque handles.
 *
 * Conventions:
 *   - functions return CF_OK (0) or a negative error code; cf_last_error()
 *     returns a thread-local message for the most recent failure;
 *   - out-parameters are only written on CF_OK;
 *   - strings returned through char** are heap-allocated; release them with
 *     cf_string_free;
 *   - handles are released with the matching *_free (NULL is accepted);
 *   - budget/worker arguments accept 0 for the built-in defaults.
 */
#ifndef CLONEFORGE_H
#define CLONEFORGE_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef struct cf_machine cf_machine;
typedef struct cf_algebra cf_algebra;
typedef struct cf_relation cf_relation;

enum {
  CF_OK = 0,
  CF_ERR_PARSE = -1,      /* malformed input text */
  CF_ERR_INVALID = -2,    /* contract violation */
  CF_ERR_BUDGET = -3,     /* configured ceiling exceeded */
  CF_ERR_UNREACHABLE = -4,/* requested state not reachable */
  CF_ERR_CHECK = -5,      /* a verification check failed */
  CF_ERR_NOT_FOUND = -6,  /* bounded search exhausted without a hit */
  CF_ERR_INTERNAL = -7
};

const char* cf_version(void);
const char* cf_last_error(void);
void cf_string_free(char* s);

/* ---- machines ---------------------------------------------------------- */

typedef struct {
  int halted;              /* run reached state 0 */
  long long steps;
  long long trace_max_sum; /* max alpha+beta over the visited configurations */
  int final_state;
  long long final_alpha;
  long long final_beta;
} cf_run_result;

typedef struct {
  int halted;           /* capacity is exact iff nonzero */
  long long capacity;   /* fuel-bounded k-step capacity otherwise */
  long long steps;
} cf_capacity_report;

int cf_machine_parse(const char* text, cf_machine** out);
int cf_machine_read_file(const char* path, cf_machine** out);
void cf_machine_free(cf_machine* m);

int cf_machine_num_states(const cf_machine* m);
int cf_machine_format(const cf_machine* m, char** out_text);
int cf_machine_normalize(const cf_machine* m, cf_machine** out);
int cf_machine_is_normalized(const cf_machine* m, int* out_flag);

int cf_machine_step(const cf_machine* m, int state, long long alpha, long long beta,
                    int* out_state, long long* out_alpha, long long* out_beta);
int cf_machine_run(const cf_machine* m, int state, long long alpha, long long beta,
                   long long fuel, cf_run_result* out);
/* trace text: one `n (state,alpha,beta)` line per visited configuration */
int cf_machine_run_table(const cf_machine* m, int state, long long alpha, long long beta,
                         long long fuel, char** out_text);
int cf_machine_capacity(const cf_machine* m, long long fuel, cf_capacity_report* out);

/* ---- the derived algebra ------------------------------------------------ */

int cf_algebra_build(const cf_machine* m, cf_algebra** out);
void cf_algebra_free(cf_algebra* a);
int cf_algebra_size(const cf_algebra* a);
int cf_algebra_num_states(const cf_algebra* a);

/* op: one of "meet", "M", "Mp", "I", "H", "N0", "S", "Ndot", "P";
 * elements in the `(state,content)` text form, content in {., x, 0, A, B} */
int cf_algebra_apply(const cf_algebra* a, const char* op, const char* const* args, int nargs,
                     char** out_element);
/* term text over x1..xk, e.g. "H(I(x1,x1))" */
int cf_algebra_eval_term(const cf_algebra* a, const char* term, const char* const* env, int nenv,
                         char** out_element);
int cf_algebra_state_term(const cf_algebra* a, int from_state, int to_state, char** out_term);
int cf_algebra_z_term(const cf_algebra* a, int state, char** out_term);
int cf_algebra_w_term(const cf_algebra* a, int state, char** out_term);

/* ---- relations ----------------------------------------------------------- */

int cf_relation_parse(const char* text, cf_relation** out);
int cf_relation_read_file(const char* path, cf_relation** out);
void cf_relation_free(cf_relation* r);
int cf_relation_format(const cf_relation* r, char** out_text);
int cf_relation_write_file(const cf_relation* r, const char* path);

int cf_relation_arity(const cf_relation* r);
long long cf_relation_size(const cf_relation* r);
int cf_relation_equal(const cf_relation* a, const cf_relation* b, int* out_flag);

/* generators: a relation value whose tuples seed the closure */
int cf_relation_generate(const cf_algebra* a, const cf_relation* generators,
                         long long budget_tuples, int workers, cf_relation** out);
int cf_relation_sm(const cf_algebra* a, int m, long long budget_tuples, int workers,
                   cf_relation** out);
int cf_relation_config(const cf_algebra* a, int state, int alpha, int beta, int m,
                       cf_relation** out);
int cf_relation_gadget(const cf_algebra* a, const char* gadget, cf_relation** out);
int cf_relation_ri(const cf_algebra* a, const cf_relation* r, long long budget_tuples, int workers,
                   cf_relation** out);
/* coords are 1-based; drop != 0 keeps the complement instead */
int cf_relation_project(const cf_relation* r, const int* coords, int ncoords, int drop,
                        cf_relation** out);
/* closure check; ops_mask selects operations by bit in the order
 * meet,M,Mp,I,H,N0,S,Ndot,P (0x1ff = all). Returns CF_OK and sets *out_closed;
 * a violation witness is reported through out_witness when not closed. */
int cf_relation_closed_under(const cf_algebra* a, const cf_relation* r, unsigned ops_mask,
                             int* out_closed, char** out_witness);
/* classification: text report or one-object JSON */
int cf_relation_classify(const cf_relation* r, int as_json, char** out_text);
int cf_relation_inherent_nonhalting(const cf_algebra* a, const cf_relation* r, char** out_coords);
/* K: 1-based coordinates; nK < 0 uses the default (complement of the
 * generated relation's dot part) */
int cf_relation_chi_compatible(const cf_algebra* a, const cf_relation* generators, const int* K,
                               int nK, int* out_flag);

/* ---- entailment ----------------------------------------------------------- */

/* expression syntax: R<k> (catalog index, 1-based), Eq, intersect(...),
 * product(...), permute(e,[...]), project(e,[...]) */
int cf_entail_eval(const cf_algebra* a, const cf_relation* const* catalog, int ncatalog,
                   const char* expr, cf_relation** out);
/* certificate syntax: PROJECT [..] ; INTERSECT { PERMUTE [..] PRODUCT [..] ; ... } */
int cf_entail_check(const cf_algebra* a, const cf_relation* const* catalog, int ncatalog,
                    const char* certificate, cf_relation** out_value, char** out_info);
/* bounded search; returns CF_ERR_NOT_FOUND / CF_ERR_BUDGET when unsuccessful */
int cf_entail_search(const cf_algebra* a, const cf_relation* const* catalog, int ncatalog,
                     const cf_relation* target, int max_factors, int max_intersects,
                     long long max_candidates, int full_perms, char** out_certificate);
/* preservation of a relation by a term operation */
int cf_preserves(const cf_algebra* a, const char* term, const cf_relation* r, int* out_preserved,
                 char** out_witness);

/* ---- verification suites --------------------------------------------------- */

/* suite: basic-facts, encoding-example, coding-theorem, halting-equivalence,
 * relations-lemmas, gadgets, tools, t-halting.
 * format: 0 text, 1 structured (JSON lines). Returns CF_OK with *out_all_pass
 * reflecting the outcome. */
int cf_verify(const cf_machine* m, const char* suite, uint64_t seed, long long budget_tuples,
              int workers, long long fuel, int format, int timings, char** out_report,
              int* out_all_pass);

#ifdef __cplusplus
}
#endif

#endif /* CLONEFORGE_H */
