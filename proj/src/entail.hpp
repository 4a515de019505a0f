#pragma once

#include <optional>
#include <string>
#include <vector>

#include "subpower.hpp"

namespace cf {

// Expression tree over a relation catalog plus the equality relation, built
// from intersection, product, coordinate permutation, and projection.
struct EntailExpr {
  enum class Kind { atom, eq, intersect, product, permute, project };
  struct Node {
    Kind kind;
    int atom = -1;              // catalog index for Kind::atom
    std::vector<int> children;  // node indices (children precede parents)
    std::vector<int> coords;    // permutation (permute) or projection list (project), 0-based
  };
  std::vector<Node> nodes;
  int root = -1;
};

EntailExpr parse_expr(const std::string& text);
std::string expr_text(const EntailExpr& e);

struct EvalLimits {
  size_t max_tuples = 2'000'000;
  int max_arity = kMaxArity;
};

Relation eval_expression(const Algebra& alg, std::span<const Relation> catalog,
                         const EntailExpr& expr, const EvalLimits& limits = {});

// Certificate in the canonical shape: a projection of an intersection of
// permuted products of catalog relations (and equality).
struct CanonicalCertificate {
  struct Factor {
    std::vector<int> perm;   // coordinate source map over the product arity; empty = identity
    std::vector<int> atoms;  // catalog indices; -1 stands for the equality relation
  };
  std::vector<int> projection; // 0-based coordinates of the intersection arity
  std::vector<Factor> factors;
};

std::string certificate_text(const CanonicalCertificate& cert);
CanonicalCertificate parse_certificate(const std::string& text);

struct CertEvalInfo {
  int product_arity = 0;
  int max_catalog_arity = 0;     // over atoms used (equality counts as 2)
  bool contains_all_sigma = false; // value contains sigma_1..sigma_m
  bool low_arity_case = false;     // max_catalog_arity < value arity
  bool c_part_nonempty = false;    // value meets C^m
};

Relation canonical_form_eval(const Algebra& alg, std::span<const Relation> catalog,
                             const CanonicalCertificate& cert, const EvalLimits& limits = {},
                             CertEvalInfo* info = nullptr);

// expands the certificate into the equivalent expression tree
EntailExpr certificate_expr(const CanonicalCertificate& cert);

struct PreserveVerdict {
  bool preserved = true;
  bool sampled = false;        // verdict from sampling, not a full scan
  std::vector<Tup> args;       // counterexample rows when !preserved
  Tup out{};
};

struct PreserveLimits {
  uint64_t full_scan_budget = 20'000'000; // argument tuples; above this, sample
  uint64_t samples = 200'000;
  uint64_t seed = 0xC10E;
  int full_scan_max_arity = 3;
};

PreserveVerdict preserves(const Algebra& alg, const Term& f, const Relation& rel,
                          const PreserveLimits& limits = {});

struct SearchBounds {
  int max_factors_per_product = 3; // atoms multiplied per factor
  int max_intersects = 2;          // factors intersected
  uint64_t max_candidates = 100'000;
  bool full_permutations = false;  // otherwise only block reorderings
};

enum class SearchOutcome { found, not_found_within_bounds, budget_exhausted };

SearchOutcome search_entailment(const Algebra& alg, std::span<const Relation> catalog,
                                const Relation& target, const SearchBounds& bounds,
                                CanonicalCertificate* out);

Relation equality_relation(const Algebra& alg);

} // namespace cf
