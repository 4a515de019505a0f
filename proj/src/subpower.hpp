#pragma once

#include <array>
#include <cstdint>
#include <cstring>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "algebra.hpp"

namespace cf {

inline constexpr int kMaxArity = 12;

// Fixed-width tuple; coordinates beyond the arity stay zero, so array
// comparison is the lexicographic coordinate order.
struct Tup {
  std::array<uint8_t, kMaxArity> v{};

  uint8_t operator[](int i) const { return v[i]; }
  uint8_t& operator[](int i) { return v[i]; }
  Element at(int i) const { return Element{v[i]}; }

  bool operator==(const Tup&) const = default;
  auto operator<=>(const Tup&) const = default;
};

struct TupHash {
  size_t operator()(const Tup& t) const {
    uint64_t a, b;
    std::memcpy(&a, t.v.data(), 8);
    std::memcpy(&b, t.v.data() + 4, 8); // overlaps; cheap and adequate
    a *= 0x9e3779b97f4a7c15ull;
    b *= 0xc2b2ae3d27d4eb4full;
    return static_cast<size_t>((a ^ (b >> 29)) * 0xff51afd7ed558ccdull >> 17);
  }
};

Tup make_tup(std::span<const Element> coords);
std::string tuple_text(const Tup& t, int arity);
Tup parse_tuple(std::string_view line, int arity, int num_states);

struct ClosureStats {
  int rounds = 0;
  size_t peak_frontier = 0;
  bool budget_exceeded = false;
};

struct GenerateOptions {
  size_t budget_tuples = 2'000'000;
  int max_rounds = 1'000'000;
  uint64_t ambient_cap = 1'000'000'000'000ull; // reject when |A|^m exceeds this
  int workers = 1;
};

// A finite set of m-tuples over the algebra domain, canonically sorted.
class Relation {
public:
  Relation() = default;
  Relation(int arity, int num_states, std::vector<Tup> tuples,
           std::vector<Tup> generators = {}, ClosureStats stats = {});

  int arity() const { return arity_; }
  int num_states() const { return num_states_; }
  size_t size() const { return tuples_.size(); }
  bool empty() const { return tuples_.empty(); }
  const std::vector<Tup>& tuples() const { return tuples_; }
  const std::vector<Tup>& generators() const { return generators_; }
  const ClosureStats& stats() const { return stats_; }

  bool contains(const Tup& t) const;
  bool operator==(const Relation& o) const {
    return arity_ == o.arity_ && tuples_ == o.tuples_;
  }

  std::string to_text() const;
  static Relation from_text(const std::string& text);
  void write_file(const std::string& path) const;
  static Relation read_file(const std::string& path);

private:
  int arity_ = 0;
  int num_states_ = 0;
  std::vector<Tup> tuples_;
  std::vector<Tup> generators_;
  ClosureStats stats_;
};

// Subpower generated by `generators` under all nine operations.
Relation generate(const Algebra& alg, std::span<const Tup> generators, int arity,
                  const GenerateOptions& opts = {});

struct ClosureWitness {
  Op op;
  std::vector<Tup> args;
  Tup out;
};

// "closed" (nullopt) or a witness that some op maps `tuples` outside itself.
// `ops_mask` selects operations by bit (1 << static_cast<int>(op)).
std::optional<ClosureWitness> closed_under(const Algebra& alg, std::span<const Tup> tuples,
                                           int arity, unsigned ops_mask = 0x1ff);

// Like closed_under, but outputs are tested for membership in `member_of`
// instead of the argument set (arguments may be a subset of it).
std::optional<ClosureWitness> closure_violation(const Algebra& alg, std::span<const Tup> args,
                                                int arity, unsigned ops_mask,
                                                const Relation& member_of);

inline constexpr unsigned kAllOpsMask = 0x1ff;
inline constexpr unsigned ops_mask_without(Op op) {
  return kAllOpsMask & ~(1u << static_cast<int>(op));
}

// Coordinatewise image; coords are 0-based and may repeat.
Relation project(const Relation& rel, std::span<const int> coords);
Relation project_away(const Relation& rel, std::span<const int> dropped);

struct CapacityCertificate {
  long long value = -1;                 // max certified capacity, -1 when none
  std::vector<int> coords;              // the certifying coordinates (0-based)
  std::vector<Tup> witnesses;           // one witness tuple per coordinate
};

struct RelationProfile {
  bool synchronized = false;
  bool computational = false;
  bool halting = false;
  std::optional<Tup> halting_witness;
  std::vector<int> dot_part;            // D(R), 0-based coordinates
  std::vector<int> approx_halting;      // H(R), 0-based coordinates
  CapacityCertificate capacity;         // over R intersect Y^m
  CapacityCertificate weak_capacity;    // over all of R
};

RelationProfile classify(const Relation& rel);

bool is_halting_set(std::span<const Tup> tuples, int arity, Tup* witness = nullptr);

// All coordinate permutations of the vector encoding configuration
// (k, alpha, beta): one dot, alpha A's, beta B's, zeros elsewhere, state k.
std::vector<Tup> config_set(const Algebra& alg, int k, int alpha, int beta, int m);

// Generators sigma_1..sigma_m (dot on the diagonal, zeros off it, state 1).
std::vector<Tup> sigma_generators(int m);

// S_m = Sg(Sigma_m)
Relation sequential_relation(const Algebra& alg, int m, const GenerateOptions& opts = {});

// R_I = Sg(I(R cap Y^m, R cap Y^m))
Relation build_RI(const Algebra& alg, const Relation& rel, const GenerateOptions& opts = {});

// Inclusion-minimal coordinate set N with R(N) non-halting, keeping a dot
// coordinate when any exists; includes every non-dot coordinate.
std::vector<int> inherent_nonhalting(const Algebra& alg, const Relation& rel);

// Every generator projects on K to either a constant-cross vector or a
// single-state vector with contents in {A, B, 0}.
bool chi_compatible(std::span<const Tup> generators, int arity, std::span<const int> K);

// Apply a coordinate permutation: out[i] = in[perm[i]] (0-based).
Tup permute_tuple(const Tup& t, std::span<const int> perm);
Relation permute_relation(const Relation& rel, std::span<const int> perm);

// Evaluate a term coordinatewise on rows of argument tuples.
Tup eval_term_tuplewise(const Algebra& alg, const Term& t, std::span<const Tup> env, int arity);

} // namespace cf
