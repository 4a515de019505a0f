#include "algebra.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <sstream>

namespace cf {

namespace {

Content reg_content(Reg r) { return r == Reg::A ? Content::reg_a : Content::reg_b; }

char content_letter(Content c) {
  switch (c) {
    case Content::dot: return '.';
    case Content::cross: return 'x';
    case Content::zero: return '0';
    case Content::reg_a: return 'A';
    case Content::reg_b: return 'B';
  }
  return '?';
}

} // namespace

std::string element_text(Element e) {
  std::ostringstream out;
  out << '(' << e.state() << ',' << content_letter(e.content()) << ')';
  return out.str();
}

Element parse_element(std::string_view text, int num_states) {
  auto bad = [&]() {
    fail(ErrorCode::parse, "bad element `" + std::string(text) + "`, expected (i,c) with c in {., x, 0, A, B}");
  };
  size_t a = text.find('(');
  size_t comma = text.find(',');
  size_t b = text.find(')');
  if (a == std::string_view::npos || comma == std::string_view::npos ||
      b == std::string_view::npos || !(a < comma && comma < b))
    bad();
  std::string num(text.substr(a + 1, comma - a - 1));
  std::string cs(text.substr(comma + 1, b - comma - 1));
  // trim spaces
  auto trim = [](std::string& s) {
    while (!s.empty() && isspace(static_cast<unsigned char>(s.front()))) s.erase(s.begin());
    while (!s.empty() && isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
  };
  trim(num);
  trim(cs);
  int state = -1;
  try {
    size_t used = 0;
    state = std::stoi(num, &used);
    if (used != num.size()) bad();
  } catch (...) {
    bad();
  }
  if (state < 0 || state >= num_states)
    fail(ErrorCode::invalid, "element state " + std::to_string(state) + " out of range");
  if (cs.size() != 1) bad();
  Content c;
  switch (cs[0]) {
    case '.': c = Content::dot; break;
    case 'x': c = Content::cross; break;
    case '0': c = Content::zero; break;
    case 'A': c = Content::reg_a; break;
    case 'B': c = Content::reg_b; break;
    default: bad(); return {};
  }
  return Element::make(state, c);
}

const char* op_name(Op op) {
  static const char* names[kNumOps] = {"meet", "M", "Mp", "I", "H", "N0", "S", "Ndot", "P"};
  return names[static_cast<int>(op)];
}

std::optional<Op> op_from_name(std::string_view name) {
  for (int k = 0; k < kNumOps; ++k)
    if (name == op_name(static_cast<Op>(k))) return static_cast<Op>(k);
  if (name == "M'") return Op::mp;
  if (name == "^" || name == "and" || name == "wedge") return Op::meet;
  return std::nullopt;
}

Algebra::Algebra(MinskyMachine machine) : machine_(std::move(machine)) {
  if (!machine_.has_instruction_per_state())
    fail(ErrorCode::invalid,
         "algebra requires exactly one instruction per nonzero state (run normalize first)");
  if (machine_.num_states() > 51)
    fail(ErrorCode::budget, "algebra domain would exceed 255 elements");
  sz_ = static_cast<size_t>(size());
  build_tables();
}

Element Algebra::element(uint8_t code) const {
  Element e{code};
  if (!valid(e)) fail(ErrorCode::invalid, "element code out of range");
  return e;
}

Element Algebra::apply_direct(Op op, std::span<const Element> args) const {
  if (static_cast<int>(args.size()) != op_arity(op))
    fail(ErrorCode::invalid, std::string("operation ") + op_name(op) + " expects " +
                                 std::to_string(op_arity(op)) + " arguments");
  for (Element a : args)
    if (!valid(a)) fail(ErrorCode::invalid, "element code out of range");

  auto meet2 = [&](Element x, Element y) {
    if (x == y) return x;
    return Element::make(std::min(x.state(), y.state()), Content::cross);
  };

  switch (op) {
    case Op::meet:
      return meet2(args[0], args[1]);

    case Op::m: {
      Element x = args[0], y = args[1];
      int i = x.state();
      const Instruction* ins = i >= 1 ? machine_.instruction(i) : nullptr;
      if (ins && y.state() == i) {
        bool inc = ins->kind == Instruction::Kind::increment;
        Content rc = reg_content(ins->reg);
        if (x.content() == Content::dot && y.content() == Content::zero && inc)
          return Element::make(ins->target, rc);
        if (x.content() == Content::dot && y.content() == rc && !inc)
          return Element::make(ins->target, Content::zero);
        if (x.content() == Content::zero && y.content() == Content::dot && inc)
          return Element::make(ins->target, Content::dot);
        if (x.content() == rc && y.content() == Content::dot && !inc)
          return Element::make(ins->target, Content::dot);
        if (x == y && x.content() != Content::dot)
          return Element::make(ins->target, x.content());
        return Element::make(ins->target, Content::cross);
      }
      return y.crossed();
    }

    case Op::mp: {
      Element x = args[0];
      const Instruction* ins = x.state() >= 1 ? machine_.instruction(x.state()) : nullptr;
      if (ins && ins->kind == Instruction::Kind::test_decrement) {
        if (x.content() != reg_content(ins->reg))
          return Element::make(ins->zero_target, x.content());
        return Element::make(ins->zero_target, Content::cross);
      }
      return x.crossed();
    }

    case Op::i: {
      if (args[0].in_D()) return Element::make(1, Content::dot);
      if (args[1].in_C()) return Element::make(1, Content::zero);
      return Element::make(1, Content::cross);
    }

    case Op::h: {
      Element x = args[0];
      if (x == Element::make(0, Content::zero) || x == Element::make(0, Content::dot))
        return Element::make(0, Content::zero);
      return Element::make(0, Content::cross);
    }

    case Op::n0: {
      Element x = args[0], y = args[1], z = args[2];
      bool sync = y.state() == z.state();
      if (x == Element::make(0, Content::dot) && sync) return y;
      if (x == Element::make(0, Content::zero) && !z.in_D() && sync) return z;
      return meet2(y, z).crossed();
    }

    case Op::s: {
      Element x = args[0], y = args[1], z = args[2];
      if (x == Element::make(1, Content::zero) && y.state() == 1 && z.state() == 1) {
        Content cy = y.content(), cz = z.content();
        bool ok = (cy == Content::dot && cz == Content::zero) ||
                  (cy == Content::zero && cz == Content::dot) ||
                  (cy == Content::zero && cz == Content::zero);
        if (ok) return Element::make(1, Content::zero);
      }
      return Element::make(1, Content::cross);
    }

    case Op::ndot: {
      Element u = args[0], x = args[1], y = args[2], z = args[3];
      bool sync = x.state() == y.state() && y.state() == z.state();
      if (x == y && !x.in_X() && sync) return x;
      if (u.in_D() && y.in_X() && sync) return x;
      if (u.in_D() && x.in_X() && sync) return y;
      if (u.in_D() && (z == x || z == y) && sync) return z;
      return meet2(meet2(x, y), z).crossed();
    }

    case Op::p:
      return args[0].state() == args[1].state() ? args[2] : args[3];
  }
  fail(ErrorCode::invalid, "unknown operation");
}

void Algebra::build_tables() {
  size_t n = sz_;
  meet_tab_.resize(n * n);
  m_tab_.resize(n * n);
  i_tab_.resize(n * n);
  mp_tab_.resize(n);
  h_tab_.resize(n);
  for (size_t a = 0; a < n; ++a) {
    Element ea{static_cast<uint8_t>(a)};
    mp_tab_[a] = apply_direct(Op::mp, std::array{ea}).code;
    h_tab_[a] = apply_direct(Op::h, std::array{ea}).code;
    for (size_t b = 0; b < n; ++b) {
      Element eb{static_cast<uint8_t>(b)};
      meet_tab_[a * n + b] = apply_direct(Op::meet, std::array{ea, eb}).code;
      m_tab_[a * n + b] = apply_direct(Op::m, std::array{ea, eb}).code;
      i_tab_[a * n + b] = apply_direct(Op::i, std::array{ea, eb}).code;
    }
  }

  n0_tab_.resize(3 * n * n);
  s_tab_.resize(2 * n * n);
  const Element n0_rep[3] = {Element::make(0, Content::dot), Element::make(0, Content::zero),
                             Element::make(0, Content::cross)};
  const Element s_rep[2] = {Element::make(0, Content::zero), Element::make(1, Content::zero)};
  for (size_t b = 0; b < n; ++b)
    for (size_t c = 0; c < n; ++c) {
      Element eb{static_cast<uint8_t>(b)}, ec{static_cast<uint8_t>(c)};
      for (int cls = 0; cls < 3; ++cls)
        n0_tab_[(cls * n + b) * n + c] = apply_direct(Op::n0, std::array{n0_rep[cls], eb, ec}).code;
      for (int cls = 0; cls < 2; ++cls)
        s_tab_[(cls * n + b) * n + c] = apply_direct(Op::s, std::array{s_rep[cls], eb, ec}).code;
    }

  if (n > 160) return; // direct evaluation beyond this; see has_ndot_tables()
  ndot_tab_.resize(2 * n * n * n);
  ndot_zclass_.resize(2 * n * n);
  const Element d_rep[2] = {Element::make(0, Content::cross), Element::make(0, Content::dot)};
  for (int d = 0; d < 2; ++d)
    for (size_t a = 0; a < n; ++a)
      for (size_t b = 0; b < n; ++b) {
        Element ea{static_cast<uint8_t>(a)}, eb{static_cast<uint8_t>(b)};
        for (size_t c = 0; c < n; ++c) {
          Element ec{static_cast<uint8_t>(c)};
          ndot_tab_[((static_cast<size_t>(d) * n + a) * n + b) * n + c] =
              apply_direct(Op::ndot, std::array{d_rep[d], ea, eb, ec}).code;
        }
        // classify the z-dependence of this cell: constant, a function of the
        // state of z alone, or arbitrary
        const uint8_t* row = &ndot_tab_[((static_cast<size_t>(d) * n + a) * n + b) * n];
        bool varies = false, state_only = true;
        for (size_t c = 0; c < n; ++c) {
          if (row[c] != row[0]) varies = true;
          if (row[c] != row[(c / 5) * 5]) state_only = false; // compare within the state block
        }
        ndot_zclass_[(static_cast<size_t>(d) * n + a) * n + b] =
            !varies ? z_fixed : (state_only ? z_state_only : z_full);
      }
}

Element Algebra::apply(Op op, std::span<const Element> args) const {
  if (static_cast<int>(args.size()) != op_arity(op))
    fail(ErrorCode::invalid, std::string("operation ") + op_name(op) + " expects " +
                                 std::to_string(op_arity(op)) + " arguments");
  for (Element a : args)
    if (!valid(a)) fail(ErrorCode::invalid, "element code out of range");
  switch (op) {
    case Op::meet: return meet(args[0], args[1]);
    case Op::m: return m_op(args[0], args[1]);
    case Op::mp: return mp_op(args[0]);
    case Op::i: return i_op(args[0], args[1]);
    case Op::h: return h_op(args[0]);
    case Op::n0: return n0_op(args[0], args[1], args[2]);
    case Op::s: return s_op(args[0], args[1], args[2]);
    case Op::ndot: return ndot_op(args[0], args[1], args[2], args[3]);
    case Op::p: return p_op(args[0], args[1], args[2], args[3]);
  }
  fail(ErrorCode::invalid, "unknown operation");
}

// ---- terms ----------------------------------------------------------------

int Term::add_var(int var) {
  nodes.push_back(Node{-1, var, {}});
  root = static_cast<int>(nodes.size()) - 1;
  return root;
}

int Term::add(Op op, std::initializer_list<int> children) {
  Node n;
  n.op = static_cast<int>(op);
  int k = 0;
  for (int c : children) {
    if (c < 0 || c >= static_cast<int>(nodes.size()))
      fail(ErrorCode::invalid, "term child out of range");
    n.child[k++] = c;
  }
  if (k != op_arity(op)) fail(ErrorCode::invalid, "term arity mismatch");
  nodes.push_back(n);
  root = static_cast<int>(nodes.size()) - 1;
  return root;
}

int Term::max_var() const {
  int mv = 0;
  for (const Node& n : nodes)
    if (n.op == -1) mv = std::max(mv, n.var);
  return mv;
}

bool Term::uses(Op op) const {
  for (const Node& n : nodes)
    if (n.op == static_cast<int>(op)) return true;
  return false;
}

int Term::op_count() const {
  int c = 0;
  for (const Node& n : nodes)
    if (n.op != -1) ++c;
  return c;
}

static void term_text_rec(const Term& t, int at, std::string& out) {
  const Term::Node& n = t.nodes[at];
  if (n.op == -1) {
    out += "x" + std::to_string(n.var);
    return;
  }
  Op op = static_cast<Op>(n.op);
  out += op_name(op);
  out += '(';
  for (int k = 0; k < op_arity(op); ++k) {
    if (k) out += ',';
    term_text_rec(t, n.child[k], out);
  }
  out += ')';
}

std::string term_text(const Term& t) {
  if (t.root < 0) return "";
  std::string out;
  term_text_rec(t, t.root, out);
  return out;
}

namespace {

struct TermParser {
  std::string_view s;
  size_t pos = 0;

  void skip() {
    while (pos < s.size() && isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  }
  [[noreturn]] void bad(const std::string& why) {
    fail(ErrorCode::parse, "term: " + why + " at offset " + std::to_string(pos));
  }
  bool eat(char c) {
    skip();
    if (pos < s.size() && s[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }
  int parse(Term& t) {
    skip();
    size_t start = pos;
    while (pos < s.size() &&
           (isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '\'' || s[pos] == '_'))
      ++pos;
    if (start == pos) bad("expected operation or variable");
    std::string_view name = s.substr(start, pos - start);
    if (name[0] == 'x' && name.size() > 1 &&
        std::all_of(name.begin() + 1, name.end(),
                    [](char c) { return isdigit(static_cast<unsigned char>(c)); })) {
      int var = std::stoi(std::string(name.substr(1)));
      if (var < 1) bad("variable index must be >= 1");
      return t.add_var(var);
    }
    auto op = op_from_name(name);
    if (!op) bad("unknown operation `" + std::string(name) + "`");
    if (!eat('(')) bad("expected (");
    std::vector<int> children;
    if (!eat(')')) {
      for (;;) {
        children.push_back(parse(t));
        if (eat(')')) break;
        if (!eat(',')) bad("expected , or )");
      }
    }
    if (static_cast<int>(children.size()) != op_arity(*op))
      bad(std::string(op_name(*op)) + " takes " + std::to_string(op_arity(*op)) + " arguments");
    Term::Node n;
    n.op = static_cast<int>(*op);
    for (size_t k = 0; k < children.size(); ++k) n.child[k] = children[k];
    t.nodes.push_back(n);
    return static_cast<int>(t.nodes.size()) - 1;
  }
};

} // namespace

Term parse_term(const std::string& text) {
  Term t;
  TermParser p{text};
  t.root = p.parse(t);
  p.skip();
  if (p.pos != text.size()) p.bad("trailing input");
  return t;
}

Element eval_term(const Algebra& alg, const Term& t, std::span<const Element> env) {
  if (t.root < 0) fail(ErrorCode::invalid, "empty term");
  std::vector<Element> val(t.nodes.size());
  for (size_t k = 0; k < t.nodes.size(); ++k) {
    const Term::Node& n = t.nodes[k];
    if (n.op == -1) {
      if (n.var < 1 || static_cast<size_t>(n.var) > env.size())
        fail(ErrorCode::invalid, "unbound variable x" + std::to_string(n.var));
      val[k] = env[n.var - 1];
      continue;
    }
    Op op = static_cast<Op>(n.op);
    std::array<Element, 4> args;
    for (int c = 0; c < op_arity(op); ++c) {
      int ci = n.child[c];
      if (ci < 0 || static_cast<size_t>(ci) >= k)
        fail(ErrorCode::invalid, "term nodes out of evaluation order");
      args[c] = val[ci];
    }
    val[k] = alg.apply(op, std::span<const Element>(args.data(), op_arity(op)));
  }
  return val[t.root];
}

namespace {

// BFS over state-graph edges realised by diagonal M (to the instruction
// target) and M' (to the zero branch); M explored first so ties prefer it.
std::optional<std::vector<Op>> state_path(const MinskyMachine& m, int from, int to) {
  if (from == to) return std::vector<Op>{};
  int n = m.num_states();
  std::vector<int> prev(n, -1);
  std::vector<Op> via(n, Op::m);
  std::deque<int> work{from};
  std::vector<bool> seen(n, false);
  seen[from] = true;
  while (!work.empty()) {
    int s = work.front();
    work.pop_front();
    const Instruction* ins = s >= 1 ? m.instruction(s) : nullptr;
    if (!ins) continue;
    auto try_edge = [&](int t, Op op) {
      if (seen[t]) return false;
      seen[t] = true;
      prev[t] = s;
      via[t] = op;
      if (t == to) return true;
      work.push_back(t);
      return false;
    };
    if (try_edge(ins->target, Op::m)) break;
    if (ins->kind == Instruction::Kind::test_decrement && try_edge(ins->zero_target, Op::mp))
      break;
  }
  if (!seen[to]) return std::nullopt;
  std::vector<Op> path;
  for (int s = to; s != from; s = prev[s]) path.push_back(via[s]);
  std::reverse(path.begin(), path.end());
  return path;
}

int chain_ops(Term& t, int node, const std::vector<Op>& path) {
  for (Op op : path)
    node = op == Op::m ? t.add(Op::m, {node, node}) : t.add(Op::mp, {node});
  return node;
}

} // namespace

Term derive_state_term(const Algebra& alg, int from, int to) {
  auto path = state_path(alg.machine(), from, to);
  if (!path)
    fail(ErrorCode::unreachable, "state " + std::to_string(to) + " not reachable from " +
                                     std::to_string(from) + " in the state graph");
  Term t;
  int node = t.add_var(1);
  t.root = chain_ops(t, node, *path);
  return t;
}

Term derive_z(const Algebra& alg, int i) {
  auto path = state_path(alg.machine(), 1, i);
  if (!path)
    fail(ErrorCode::unreachable, "state " + std::to_string(i) + " not reachable from 1");
  Term t;
  int x = t.add_var(1);
  int ixx = t.add(Op::i, {x, x});
  int tx = t.add(Op::s, {ixx, ixx, ixx});
  t.root = chain_ops(t, tx, *path);
  return t;
}

Term derive_w(const Algebra& alg, int i) {
  auto path = state_path(alg.machine(), i, 0);
  if (!path)
    fail(ErrorCode::unreachable, "state 0 not reachable from " + std::to_string(i));
  Term t;
  int x = t.add_var(1);
  int f = chain_ops(t, x, *path);
  t.root = t.add(Op::h, {f});
  return t;
}

} // namespace cf
