#pragma once

#include <algorithm>
#include <atomic>
#include <thread>
#include <unordered_set>

#include "closure.hpp"

namespace cf {

inline ClosureContext::ClosureContext(const Algebra& alg, int arity)
    : alg_(alg), m_(arity), sz_(static_cast<size_t>(alg.size())) {
  if (arity < 1 || arity > kMaxArity)
    fail(ErrorCode::invalid, "arity must be between 1 and " + std::to_string(kMaxArity));
  if (!alg.has_ndot_tables())
    fail(ErrorCode::budget, "closure engine needs the per-class operation tables");
}

inline void ClosureContext::add(const Tup& t) {
  if (!member_.insert(t).second) return;
  uint32_t id = static_cast<uint32_t>(tups_.size());
  tups_.push_back(t);

  uint16_t dm = 0, sm = 0;
  uint32_t n0 = 0;
  Tup sv{};
  for (int c = 0; c < m_; ++c) {
    Element e = t.at(c);
    if (e.in_D()) dm |= uint16_t(1) << c;
    sm |= uint16_t(Algebra::s_class(e)) << c;
    n0 |= uint32_t(Algebra::n0_class(e)) << (2 * c);
    sv[c] = static_cast<uint8_t>(e.state());
  }
  if (dmask_seen_.insert(dm).second) dmask_.push_back({dm, id});
  if (n0cls_seen_.insert(n0).second) n0cls_.push_back({n0, id});
  if (smask_seen_.insert(sm).second) smask_.push_back({sm, id});

  auto it = bucket_idx_.find(sv);
  if (it == bucket_idx_.end()) {
    // pair the new state vector with every known one (including itself) to
    // discover P's equality patterns
    for (const Bucket& other : buckets_) {
      uint16_t eq = 0;
      for (int c = 0; c < m_; ++c)
        if (other.sv[c] == sv[c]) eq |= uint16_t(1) << c;
      if (eqpat_seen_.insert(eq).second) eqpat_.push_back({eq, other.rep, id});
    }
    if (eqpat_seen_.insert(static_cast<uint16_t>((uint32_t(1) << m_) - 1)).second)
      eqpat_.push_back({static_cast<uint16_t>((uint32_t(1) << m_) - 1), id, id});
    Bucket b;
    b.sv = sv;
    b.rep = id;
    if (buckets_.size() < kMaxBuckets)
      b.vrep = std::make_unique<std::array<std::array<uint32_t, 256>, kMaxArity>>();
    else
      ndot_full_ = true; // too many state vectors to bucket
    it = bucket_idx_.emplace(sv, static_cast<uint32_t>(buckets_.size())).first;
    buckets_.push_back(std::move(b));
    zctx_grew_accum_ = true;
  }
  Bucket& b = buckets_[it->second];
  if (b.vrep) {
    for (int c = 0; c < m_; ++c) {
      auto& slot = (*b.vrep)[c][t[c]];
      if (!slot) {
        slot = id + 1;
        b.vals[c].push_back(t[c]);
        zctx_grew_accum_ = true;
      }
    }
  }
}

inline void ClosureContext::advance_round() {
  old_n_ = tups_.size();
  dmask_old_ = dmask_.size();
  n0_old_ = n0cls_.size();
  s_old_ = smask_.size();
  eq_old_ = eqpat_.size();
  zctx_grew_accum_ = false;
}

// Iterates pairs (i, j) with i in [ib, ie) that frontier coverage requires:
// all pairs when full, otherwise pairs touching [old_n_, n).
template <class F>
bool ClosureContext::frontier_pairs(bool full, size_t ib, size_t ie, F&& f) const {
  size_t n = tups_.size();
  size_t o = full ? 0 : old_n_;
  for (size_t i = ib; i < ie; ++i) {
    for (size_t j = o; j < n; ++j)
      if (!f(i, j)) return false;
    if (!full && i >= old_n_)
      for (size_t j = 0; j < o; ++j)
        if (!f(i, j)) return false;
  }
  return true;
}

// One Ndot pattern/pair application. The fourth argument is factored through
// (state-vector bucket, value at the fully-sensitive coordinate); two or more
// fully-sensitive coordinates fall back to the sticky exhaustive mode.
template <class Sink>
bool ClosureContext::ndot_pair(size_t pat, size_t i, size_t j, Sink&& sink) {
  const auto [mask, rep] = dmask_[pat];
  const Tup& x = tups_[i];
  const Tup& y = tups_[j];
  Tup out{};
  int sonly[kMaxArity], full[kMaxArity];
  int nsonly = 0, nfull = 0;
  for (int c = 0; c < m_; ++c) {
    int d = (mask >> c) & 1;
    switch (alg_.ndot_z_class(d, x.at(c), y.at(c))) {
      case Algebra::z_fixed: out[c] = alg_.ndot_fixed(d, x.at(c), y.at(c)).code; break;
      case Algebra::z_state_only: sonly[nsonly++] = c; break;
      case Algebra::z_full: full[nfull++] = c; break;
    }
  }

  if (nfull >= 2 || ndot_full_) {
    ndot_full_ = true;
    for (size_t zi = 0; zi < tups_.size(); ++zi) {
      const Tup& z = tups_[zi];
      for (int t = 0; t < nsonly; ++t) {
        int c = sonly[t];
        out[c] = alg_.ndot_class_op((mask >> c) & 1, x.at(c), y.at(c), z.at(c)).code;
      }
      for (int t = 0; t < nfull; ++t) {
        int c = full[t];
        out[c] = alg_.ndot_class_op((mask >> c) & 1, x.at(c), y.at(c), z.at(c)).code;
      }
      if (!sink(out, [&] { return ClosureWitness{Op::ndot, {tups_[rep], x, y, z}, out}; }))
        return false;
    }
    return true;
  }

  if (nsonly == 0 && nfull == 0)
    return sink(out, [&] { return ClosureWitness{Op::ndot, {tups_[rep], x, y, tups_[0]}, out}; });

  for (const Bucket& b : buckets_) {
    for (int t = 0; t < nsonly; ++t) {
      int c = sonly[t];
      out[c] = alg_.ndot_by_state((mask >> c) & 1, x.at(c), y.at(c), b.sv[c]).code;
    }
    if (nfull == 0) {
      const Tup& zrep = tups_[b.rep];
      if (!sink(out, [&] { return ClosureWitness{Op::ndot, {tups_[rep], x, y, zrep}, out}; }))
        return false;
      continue;
    }
    int k = full[0];
    int d = (mask >> k) & 1;
    for (uint8_t v : b.vals[k]) {
      out[k] = alg_.ndot_class_op(d, x.at(k), y.at(k), Element{v}).code;
      const Tup& zrep = tups_[(*b.vrep)[k][v] - 1];
      if (!sink(out, [&] { return ClosureWitness{Op::ndot, {tups_[rep], x, y, zrep}, out}; }))
        return false;
    }
  }
  return true;
}

template <class Sink>
bool ClosureContext::run_ops(unsigned ops_mask, size_t ib, size_t ie, Sink&& sink) {
  auto has = [&](Op op) { return (ops_mask >> static_cast<int>(op)) & 1u; };

  // unary: M' and H over the frontier slice of [ib, ie)
  {
    size_t ub = std::max(ib, old_n_);
    for (size_t i = ub; i < ie; ++i) {
      const Tup& x = tups_[i];
      if (has(Op::mp)) {
        Tup out{};
        for (int c = 0; c < m_; ++c) out[c] = alg_.mp_op(x.at(c)).code;
        if (!sink(out, [&] { return ClosureWitness{Op::mp, {x}, out}; })) return false;
      }
      if (has(Op::h)) {
        Tup out{};
        for (int c = 0; c < m_; ++c) out[c] = alg_.h_op(x.at(c)).code;
        if (!sink(out, [&] { return ClosureWitness{Op::h, {x}, out}; })) return false;
      }
    }
  }

  // plain binary operations
  for (Op op : {Op::meet, Op::m, Op::i}) {
    if (!has(op)) continue;
    bool ok = frontier_pairs(false, ib, ie, [&](size_t i, size_t j) {
      const Tup& x = tups_[i];
      const Tup& y = tups_[j];
      Tup out{};
      switch (op) {
        case Op::meet:
          for (int c = 0; c < m_; ++c) out[c] = alg_.meet(x.at(c), y.at(c)).code;
          break;
        case Op::m:
          for (int c = 0; c < m_; ++c) out[c] = alg_.m_op(x.at(c), y.at(c)).code;
          break;
        default:
          for (int c = 0; c < m_; ++c) out[c] = alg_.i_op(x.at(c), y.at(c)).code;
      }
      return sink(out, [&] { return ClosureWitness{op, {x, y}, out}; });
    });
    if (!ok) return false;
  }

  // N0 and S: first argument collapsed to a per-coordinate class
  if (has(Op::n0)) {
    for (size_t pi = 0; pi < n0cls_.size(); ++pi) {
      auto [key, rep] = n0cls_[pi];
      bool ok = frontier_pairs(pi >= n0_old_, ib, ie, [&](size_t i, size_t j) {
        const Tup& y = tups_[i];
        const Tup& z = tups_[j];
        Tup out{};
        for (int c = 0; c < m_; ++c)
          out[c] = alg_.n0_class_op((key >> (2 * c)) & 3, y.at(c), z.at(c)).code;
        return sink(out, [&] { return ClosureWitness{Op::n0, {tups_[rep], y, z}, out}; });
      });
      if (!ok) return false;
    }
  }
  if (has(Op::s)) {
    for (size_t pi = 0; pi < smask_.size(); ++pi) {
      auto [mask, rep] = smask_[pi];
      bool ok = frontier_pairs(pi >= s_old_, ib, ie, [&](size_t i, size_t j) {
        const Tup& y = tups_[i];
        const Tup& z = tups_[j];
        Tup out{};
        for (int c = 0; c < m_; ++c)
          out[c] = alg_.s_class_op((mask >> c) & 1, y.at(c), z.at(c)).code;
        return sink(out, [&] { return ClosureWitness{Op::s, {tups_[rep], y, z}, out}; });
      });
      if (!ok) return false;
    }
  }

  // P: first two arguments collapsed to a state-equality pattern
  if (has(Op::p)) {
    for (size_t pi = 0; pi < eqpat_.size(); ++pi) {
      const EqPat& ep = eqpat_[pi];
      bool ok = frontier_pairs(pi >= eq_old_, ib, ie, [&](size_t i, size_t j) {
        const Tup& x = tups_[i];
        const Tup& y = tups_[j];
        Tup out{};
        for (int c = 0; c < m_; ++c) out[c] = (ep.mask >> c) & 1 ? x[c] : y[c];
        return sink(out, [&] {
          return ClosureWitness{Op::p, {tups_[ep.rep_u], tups_[ep.rep_v], x, y}, out};
        });
      });
      if (!ok) return false;
    }
  }

  // Ndot
  if (has(Op::ndot)) {
    bool sweep_all = ndot_full_ || zctx_grew_accum_;
    for (size_t pi = 0; pi < dmask_.size(); ++pi) {
      bool ok = frontier_pairs(sweep_all || pi >= dmask_old_, ib, ie,
                               [&](size_t i, size_t j) { return ndot_pair(pi, i, j, sink); });
      if (!ok) return false;
    }
  }
  return true;
}

template <class Sink>
bool ClosureContext::enumerate(unsigned ops_mask, Sink&& sink) {
  return run_ops(ops_mask, 0, tups_.size(), sink);
}

inline std::vector<Tup> ClosureContext::enumerate_new(unsigned ops_mask, int workers) {
  size_t n = tups_.size();
  std::vector<Tup> fresh;
  std::unordered_set<Tup, TupHash> seen;
  if (workers <= 1 || n < 256) {
    run_ops(ops_mask, 0, n, [&](const Tup& out, auto&&) {
      if (!member_.count(out) && seen.insert(out).second) fresh.push_back(out);
      return true;
    });
    return fresh;
  }

  // Workers enumerate disjoint slices of the outer index into private
  // buffers; the merge dedupes, so the resulting set matches the sequential
  // run for any worker count.
  struct Buf {
    std::vector<Tup> hits;
    std::unordered_set<Tup, TupHash> local;
  };
  size_t chunks = std::min<size_t>(static_cast<size_t>(workers) * 4, n);
  std::vector<Buf> bufs(chunks);
  std::atomic<size_t> next{0};
  std::vector<std::thread> pool;
  for (int t = 0; t < workers; ++t)
    pool.emplace_back([&] {
      for (;;) {
        size_t c = next.fetch_add(1);
        if (c >= chunks) break;
        size_t ib = n * c / chunks, ie = n * (c + 1) / chunks;
        Buf& b = bufs[c];
        run_ops(ops_mask, ib, ie, [&](const Tup& out, auto&&) {
          if (!member_.count(out) && b.local.insert(out).second) b.hits.push_back(out);
          return true;
        });
      }
    });
  for (auto& th : pool) th.join();
  for (Buf& b : bufs)
    for (const Tup& out : b.hits)
      if (seen.insert(out).second) fresh.push_back(out);
  return fresh;
}

} // namespace cf
