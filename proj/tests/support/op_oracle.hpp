// Test-only second transcription of the nine fundamental operations, written
// independently of the library implementation: everything is phrased over
// (state, content) pairs and the raw instruction list, with no shared tables.
#pragma once

#include <optional>

#include "algebra.hpp"

namespace cf_oracle {

using cf::Content;
using cf::Element;
using cf::Instruction;
using cf::MinskyMachine;

struct E {
  int st;
  Content c;
};

inline E of(Element e) { return {e.state(), e.content()}; }
inline Element back(E e) { return Element::make(e.st, e.c); }

inline bool is_x(E e) { return e.c == Content::cross; }
inline bool is_dot(E e) { return e.c == Content::dot; }
inline bool is_c(E e) {
  return e.c == Content::zero || e.c == Content::reg_a || e.c == Content::reg_b;
}

inline E cross(E e) { return {e.st, Content::cross}; }

inline E meet(E x, E y) {
  if (x.st == y.st && x.c == y.c) return x;
  return {x.st < y.st ? x.st : y.st, Content::cross};
}

// instruction lookup straight off the list
inline std::optional<Instruction> ins_at(const MinskyMachine& m, int st) {
  for (const Instruction& i : m.instructions())
    if (i.state == st) return i;
  return std::nullopt;
}

inline Content reg_c(cf::Reg r) { return r == cf::Reg::A ? Content::reg_a : Content::reg_b; }

inline E m_of(const MinskyMachine& mm, E x, E y) {
  auto ins = ins_at(mm, x.st);
  bool inc = ins && ins->kind == Instruction::Kind::increment;
  bool dec = ins && ins->kind == Instruction::Kind::test_decrement;
  int i = x.st;
  if (dec || inc) {
    int j = ins->target;
    Content r = reg_c(ins->reg);
    if (x.st == i && y.st == i) {
      if (is_dot(x) && y.c == Content::zero && inc) return {j, r};
      if (is_dot(x) && y.c == r && dec) return {j, Content::zero};
      if (x.c == Content::zero && is_dot(y) && inc) return {j, Content::dot};
      if (x.c == r && is_dot(y) && dec) return {j, Content::dot};
      if (x.c == y.c && !is_dot(x)) return {j, x.c};
      return {j, Content::cross};
    }
  }
  return cross(y);
}

inline E mp_of(const MinskyMachine& mm, E x) {
  auto ins = ins_at(mm, x.st);
  if (ins && ins->kind == Instruction::Kind::test_decrement) {
    if (x.c != reg_c(ins->reg)) return {ins->zero_target, x.c};
    return {ins->zero_target, Content::cross};
  }
  return cross(x);
}

inline E i_of(E x, E y) {
  if (is_dot(x)) return {1, Content::dot};
  if (is_c(y)) return {1, Content::zero};
  return {1, Content::cross};
}

inline E h_of(E x) {
  if (x.st == 0 && (x.c == Content::zero || x.c == Content::dot)) return {0, Content::zero};
  return {0, Content::cross};
}

inline E n0_of(E x, E y, E z) {
  if (x.st == 0 && x.c == Content::dot && y.st == z.st) return y;
  if (x.st == 0 && x.c == Content::zero && !is_dot(z) && y.st == z.st) return z;
  return cross(meet(y, z));
}

inline E s_of(E x, E y, E z) {
  bool head = x.st == 1 && x.c == Content::zero;
  bool m1 = y.st == 1 && z.st == 1;
  bool pair = (is_dot(y) && z.c == Content::zero) || (y.c == Content::zero && is_dot(z)) ||
              (y.c == Content::zero && z.c == Content::zero);
  if (head && m1 && pair) return {1, Content::zero};
  return {1, Content::cross};
}

inline E ndot_of(E u, E x, E y, E z) {
  bool sync = x.st == y.st && y.st == z.st;
  bool same_xy = x.st == y.st && x.c == y.c;
  if (same_xy && !is_x(x) && sync) return x;
  if (is_dot(u) && is_x(y) && sync) return x;
  if (is_dot(u) && is_x(x) && sync) return y;
  bool z_is_x = z.st == x.st && z.c == x.c;
  bool z_is_y = z.st == y.st && z.c == y.c;
  if (is_dot(u) && (z_is_x || z_is_y) && sync) return z;
  return cross(meet(meet(x, y), z));
}

inline E p_of(E u, E v, E x, E y) { return u.st == v.st ? x : y; }

inline Element apply(const MinskyMachine& mm, cf::Op op, std::span<const Element> a) {
  switch (op) {
    case cf::Op::meet: return back(meet(of(a[0]), of(a[1])));
    case cf::Op::m: return back(m_of(mm, of(a[0]), of(a[1])));
    case cf::Op::mp: return back(mp_of(mm, of(a[0])));
    case cf::Op::i: return back(i_of(of(a[0]), of(a[1])));
    case cf::Op::h: return back(h_of(of(a[0])));
    case cf::Op::n0: return back(n0_of(of(a[0]), of(a[1]), of(a[2])));
    case cf::Op::s: return back(s_of(of(a[0]), of(a[1]), of(a[2])));
    case cf::Op::ndot: return back(ndot_of(of(a[0]), of(a[1]), of(a[2]), of(a[3])));
    case cf::Op::p: return back(p_of(of(a[0]), of(a[1]), of(a[2]), of(a[3])));
  }
  return a[0];
}

} // namespace cf_oracle
