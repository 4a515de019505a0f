#pragma once

#include <atomic>
#include <memory>
#include <span>
#include <unordered_map>
#include <unordered_set>

#include "subpower.hpp"

namespace cf {

// Shared engine behind generate() and closed_under(): enumerates the image of
// each fundamental operation over a tuple set without materialising the full
// argument power. Arguments that the operations only read through a small
// per-coordinate class (the first argument of N0/S/Ndot, the state pattern of
// P's first two arguments, the state vector of Ndot's fourth argument) are
// deduplicated into pattern registries; the enumeration is output-equivalent
// to brute force over all argument tuples.
class ClosureContext {
public:
  ClosureContext(const Algebra& alg, int arity);

  void add(const Tup& t); // ignores duplicates
  bool contains(const Tup& t) const { return member_.count(t) != 0; }
  const std::vector<Tup>& tuples() const { return tups_; }
  size_t size() const { return tups_.size(); }

  // Runs one expansion round against the current snapshot: every output of
  // every selected operation that frontier coverage requires is passed to
  // sink(out, witness_fn). sink returns false to abort; witness_fn() builds a
  // ClosureWitness for the arguments that produced out.
  // Returns false if the sink aborted. Sequential.
  template <class Sink>
  bool enumerate(unsigned ops_mask, Sink&& sink);

  // One expansion round collecting the distinct tuples not yet present.
  // Worker-count independent result.
  std::vector<Tup> enumerate_new(unsigned ops_mask, int workers);

  // Marks the current contents as processed; subsequent add()s form the next
  // frontier. Call once after each enumerate()+append cycle.
  void advance_round();

private:
  template <class Sink>
  bool run_ops(unsigned ops_mask, size_t ib, size_t ie, Sink&& sink);
  template <class Sink>
  bool ndot_pair(size_t pat, size_t i, size_t j, Sink&& sink);
  template <class F>
  bool frontier_pairs(bool full, size_t ib, size_t ie, F&& f) const;

  const Algebra& alg_;
  int m_;
  size_t sz_;

  std::vector<Tup> tups_;
  std::unordered_set<Tup, TupHash> member_;

  // pattern registries (value, representative tuple id)
  std::vector<std::pair<uint16_t, uint32_t>> dmask_;  // Ndot: D-membership bits of u
  std::unordered_set<uint16_t> dmask_seen_;
  std::vector<std::pair<uint32_t, uint32_t>> n0cls_;  // N0: 2-bit class per coordinate
  std::unordered_set<uint32_t> n0cls_seen_;
  std::vector<std::pair<uint16_t, uint32_t>> smask_;  // S: x==(1,0) bits
  std::unordered_set<uint16_t> smask_seen_;

  struct EqPat {
    uint16_t mask;
    uint32_t rep_u, rep_v;
  };
  std::vector<EqPat> eqpat_; // P: state-equality bits over state-vector pairs
  std::unordered_set<uint16_t> eqpat_seen_;

  // tuples bucketed by state vector; Ndot's fourth argument factors through
  // (bucket, value at the single fully-sensitive coordinate)
  struct Bucket {
    Tup sv{};
    uint32_t rep = 0;
    std::array<std::vector<uint8_t>, kMaxArity> vals;
    std::unique_ptr<std::array<std::array<uint32_t, 256>, kMaxArity>> vrep; // id + 1
  };
  static constexpr size_t kMaxBuckets = 64;
  std::vector<Bucket> buckets_;
  std::unordered_map<Tup, uint32_t, TupHash> bucket_idx_;

  // frontier bookkeeping
  size_t old_n_ = 0;
  size_t dmask_old_ = 0, n0_old_ = 0, s_old_ = 0, eq_old_ = 0;
  // z-context growth (buckets or their value sets) since the last round
  bool zctx_grew_accum_ = true;
  std::atomic<bool> ndot_full_{false}; // sticky exhaustive mode for Ndot's z
};

} // namespace cf
