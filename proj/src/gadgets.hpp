#pragma once

#include <optional>
#include <string>
#include <vector>

#include "subpower.hpp"

namespace cf {

enum class GadgetId { mu, chi, delta_forall, delta_exists_a, delta_exists_b, gamma };

const char* gadget_name(GadgetId id);
std::optional<GadgetId> gadget_from_name(std::string_view name);
int gadget_arity(GadgetId id);

// The fixed auxiliary relation, enumerated per state and unioned.
Relation build_gadget(const Algebra& alg, GadgetId id);

enum class CertTier { exhaustive, blockwise, sampled };

struct GadgetCertOptions {
  int exhaustive_max_domain = 10;
  int blockwise_max_domain = 35;
  uint64_t samples = 100'000; // cross-state samples per (gadget, op) in the non-exhaustive tiers
  uint64_t seed = 0xC10E;
};

struct OpCertificate {
  Op op;
  bool closed = true;
  CertTier tier = CertTier::exhaustive;
  std::optional<ClosureWitness> witness;
};

struct GadgetCertificate {
  GadgetId id;
  std::vector<OpCertificate> per_op;
  bool all_closed() const {
    for (const auto& c : per_op)
      if (!c.closed) return false;
    return true;
  }
};

struct CertificationReport {
  std::vector<GadgetCertificate> gadgets; // mu..delta_exists_b against all nine ops
  GadgetCertificate gamma_reduct;         // gamma against everything but I
  std::optional<ClosureWitness> gamma_i_violation;
  CertTier tier = CertTier::exhaustive;
  bool ok() const {
    for (const auto& g : gadgets)
      if (!g.all_closed()) return false;
    return gamma_reduct.all_closed() && gamma_i_violation.has_value();
  }
};

// Certifies mu, chi, and the three deltas closed under all nine operations,
// gamma closed under the reduct without I, and exhibits a concrete pair that
// I maps out of gamma.
CertificationReport certify_gadgets(const Algebra& alg, const GadgetCertOptions& opts = {});

} // namespace cf
