#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "minsky.hpp"

namespace cf {

// Element of the derived algebra: a (state, content) pair packed as
// 5*state + content. The packing is fixed; relation files depend on it.
enum class Content : uint8_t { dot = 0, cross = 1, zero = 2, reg_a = 3, reg_b = 4 };

struct Element {
  uint8_t code = 0;

  static Element make(int state, Content c) {
    return Element{static_cast<uint8_t>(5 * state + static_cast<int>(c))};
  }
  int state() const { return code / 5; }
  Content content() const { return static_cast<Content>(code % 5); }

  bool in_X() const { return content() == Content::cross; }
  bool in_D() const { return content() == Content::dot; }
  bool in_C() const { return !in_X() && !in_D(); }
  bool in_Y() const { return !in_X(); }
  bool in_E() const { return !in_D(); }

  Element crossed() const { return make(state(), Content::cross); }

  bool operator==(const Element&) const = default;
  auto operator<=>(const Element&) const = default;
};

std::string element_text(Element e);                 // "(i,c)", c in {., x, 0, A, B}
Element parse_element(std::string_view text, int num_states);

enum class Op : uint8_t { meet = 0, m = 1, mp = 2, i = 3, h = 4, n0 = 5, s = 6, ndot = 7, p = 8 };
inline constexpr int kNumOps = 9;

constexpr int op_arity(Op op) {
  constexpr int a[kNumOps] = {2, 2, 1, 2, 1, 3, 3, 4, 4};
  return a[static_cast<int>(op)];
}
const char* op_name(Op op); // "meet","M","Mp","I","H","N0","S","Ndot","P"
std::optional<Op> op_from_name(std::string_view name);

// The algebra derived from a counter machine: domain {0..N} x {., x, 0, A, B}
// with the nine fundamental operations. Requires exactly one instruction per
// nonzero state (operations M and M' read the per-state instruction).
class Algebra {
public:
  explicit Algebra(MinskyMachine machine);

  const MinskyMachine& machine() const { return machine_; }
  int num_states() const { return machine_.num_states(); }
  int size() const { return 5 * num_states(); }

  Element element(uint8_t code) const;
  bool valid(Element e) const { return e.code < size(); }

  Element apply(Op op, std::span<const Element> args) const;
  // direct case-list evaluation, bypassing the tables (used for validation)
  Element apply_direct(Op op, std::span<const Element> args) const;

  Element meet(Element x, Element y) const { return Element{meet_tab_[idx2(x, y)]}; }
  Element m_op(Element x, Element y) const { return Element{m_tab_[idx2(x, y)]}; }
  Element mp_op(Element x) const { return Element{mp_tab_[x.code]}; }
  Element i_op(Element x, Element y) const { return Element{i_tab_[idx2(x, y)]}; }
  Element h_op(Element x) const { return Element{h_tab_[x.code]}; }
  Element n0_op(Element x, Element y, Element z) const {
    return Element{n0_tab_[(n0_class(x) * sz_ + y.code) * sz_ + z.code]};
  }
  Element s_op(Element x, Element y, Element z) const {
    return Element{s_tab_[(s_class(x) * sz_ + y.code) * sz_ + z.code]};
  }
  Element ndot_op(Element u, Element x, Element y, Element z) const {
    if (!ndot_tab_.empty())
      return Element{ndot_tab_[((ndot_class(u) * sz_ + x.code) * sz_ + y.code) * sz_ + z.code]};
    return apply_direct(Op::ndot, std::array<Element, 4>{u, x, y, z});
  }
  Element p_op(Element u, Element v, Element x, Element y) const {
    return u.state() == v.state() ? x : y;
  }

  // argument classes the big operations factor through
  static int n0_class(Element x) { // 0: (0,.)  1: (0,0)  2: anything else
    if (x.code == Element::make(0, Content::dot).code) return 0;
    if (x.code == Element::make(0, Content::zero).code) return 1;
    return 2;
  }
  static int s_class(Element x) { // 1 iff x == (1,0)
    return x.code == Element::make(1, Content::zero).code ? 1 : 0;
  }
  static int ndot_class(Element u) { return u.in_D() ? 1 : 0; }

  // class-indexed entry points used by the closure engine
  Element n0_class_op(int cls, Element y, Element z) const {
    return Element{n0_tab_[(static_cast<size_t>(cls) * sz_ + y.code) * sz_ + z.code]};
  }
  Element s_class_op(int cls, Element y, Element z) const {
    return Element{s_tab_[(static_cast<size_t>(cls) * sz_ + y.code) * sz_ + z.code]};
  }
  Element ndot_class_op(int d, Element x, Element y, Element z) const {
    return Element{
        ndot_tab_[((static_cast<size_t>(d) * sz_ + x.code) * sz_ + y.code) * sz_ + z.code]};
  }

  // Ndot tables are built for domains up to 160 elements (2*|A|^3 bytes);
  // larger algebras fall back to direct evaluation.
  bool has_ndot_tables() const { return !ndot_tab_.empty(); }

  // How the Ndot output at one coordinate depends on the fourth argument,
  // for a fixed class of u and fixed (x, y) there.
  enum ZClass : uint8_t {
    z_fixed = 0,      // not at all
    z_state_only = 1, // only through the state of z
    z_full = 2        // through the value of z
  };
  ZClass ndot_z_class(int d, Element x, Element y) const {
    return static_cast<ZClass>(ndot_zclass_[(d * sz_ + x.code) * sz_ + y.code]);
  }
  Element ndot_fixed(int d, Element x, Element y) const {
    return Element{ndot_tab_[((d * sz_ + x.code) * sz_ + y.code) * sz_ /* z=code 0 */]};
  }
  // representative evaluation for a state-only cell
  Element ndot_by_state(int d, Element x, Element y, int z_state) const {
    return ndot_class_op(d, x, y, Element::make(z_state, Content::cross));
  }

private:
  size_t idx2(Element a, Element b) const { return static_cast<size_t>(a.code) * sz_ + b.code; }
  void build_tables();

  MinskyMachine machine_;
  size_t sz_ = 0;
  std::vector<uint8_t> meet_tab_, m_tab_, i_tab_, mp_tab_, h_tab_;
  std::vector<uint8_t> n0_tab_; // [class][y][z]
  std::vector<uint8_t> s_tab_;  // [class][y][z]
  std::vector<uint8_t> ndot_tab_;   // [class][x][y][z]
  std::vector<uint8_t> ndot_zclass_; // [class][x][y]
};

// ---- terms ----------------------------------------------------------------

// Term tree over the nine operation symbols and variables x1..xk. Nodes are
// stored in evaluation order (children before parents), so shared subterms
// are evaluated once.
struct Term {
  struct Node {
    int op = -1; // -1: variable leaf, otherwise static_cast<int>(Op)
    int var = 0; // 1-based variable index when op == -1
    std::array<int, 4> child{-1, -1, -1, -1};
  };
  std::vector<Node> nodes;
  int root = -1;

  int add_var(int var);
  int add(Op op, std::initializer_list<int> children);

  int max_var() const;
  bool uses(Op op) const;
  int op_count() const; // number of operation nodes
};

std::string term_text(const Term& t);
Term parse_term(const std::string& text);

Element eval_term(const Algebra& alg, const Term& t, std::span<const Element> env);

// Shortest composition of {M, M'} (applied diagonally) moving (from,0) to
// (to,0) along the state graph; prefers M on ties.
Term derive_state_term(const Algebra& alg, int from, int to);
// z_i: maps C to (i,0) and everything else to (i,x)
Term derive_z(const Algebra& alg, int i);
// w_i: maps (i,0) to (0,0) and (i,c) to (0,x) for c in {A,B,x}
Term derive_w(const Algebra& alg, int i);

} // namespace cf
