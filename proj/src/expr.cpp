#include "confbound/expr.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <system_error>
#include <unordered_map>

namespace confbound {

namespace {

NodePtr make(Op op, NodePtr a = nullptr, NodePtr b = nullptr) {
  auto n = std::make_shared<ExprNode>();
  n->op = op;
  n->var_mask = (a ? a->var_mask : 0) | (b ? b->var_mask : 0);
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

NodePtr make_const(double v) {
  auto n = std::make_shared<ExprNode>();
  n->op = Op::Const;
  n->value = v;
  return n;
}

NodePtr make_var(int slot, std::string name) {
  if (slot < 0 || slot > 3) throw std::out_of_range("variable slot out of range");
  auto n = std::make_shared<ExprNode>();
  n->op = Op::Var;
  n->slot = slot;
  n->name = std::move(name);
  n->var_mask = 1 << slot;
  return n;
}

bool nodes_equal(const ExprNode& a, const ExprNode& b) {
  if (&a == &b) return true;
  if (a.op != b.op) return false;
  switch (a.op) {
    case Op::Const: return a.value == b.value || (std::isnan(a.value) && std::isnan(b.value));
    case Op::Pi: return true;
    case Op::Var: return a.slot == b.slot && a.name == b.name;
    default: break;
  }
  if (!nodes_equal(*a.a, *b.a)) return false;
  if (a.b || b.b) return a.b && b.b && nodes_equal(*a.b, *b.b);
  return true;
}

int precedence(Op op) {
  switch (op) {
    case Op::Add:
    case Op::Sub: return 1;
    case Op::Mul:
    case Op::Div: return 2;
    case Op::Neg: return 3;
    case Op::Pow: return 4;
    default: return 5;
  }
}

const char* func_name(Op op) {
  switch (op) {
    case Op::Sin: return "sin";
    case Op::Cos: return "cos";
    case Op::Tan: return "tan";
    case Op::Exp: return "exp";
    case Op::Log: return "log";
    case Op::Sqrt: return "sqrt";
    case Op::Abs: return "abs";
    default: return "";
  }
}

std::string format_number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void print(const ExprNode& n, std::string& out);

void print_child(const ExprNode& child, bool parens, std::string& out) {
  if (parens) out += '(';
  print(child, out);
  if (parens) out += ')';
}

void print(const ExprNode& n, std::string& out) {
  int p = precedence(n.op);
  switch (n.op) {
    case Op::Const: out += format_number(n.value); return;
    case Op::Pi: out += "pi"; return;
    case Op::Var: out += n.name; return;
    case Op::Add:
    case Op::Sub:
    case Op::Mul:
    case Op::Div: {
      static const char* sym[] = {" + ", " - ", "*", "/"};
      int k = n.op == Op::Add ? 0 : n.op == Op::Sub ? 1 : n.op == Op::Mul ? 2 : 3;
      print_child(*n.a, precedence(n.a->op) < p, out);
      out += sym[k];
      print_child(*n.b, precedence(n.b->op) <= p, out);
      return;
    }
    case Op::Neg:
      out += '-';
      print_child(*n.a, precedence(n.a->op) < 3, out);
      return;
    case Op::Pow:
      print_child(*n.a, precedence(n.a->op) < 5, out);
      out += '^';
      print_child(*n.b, precedence(n.b->op) < 3, out);
      return;
    default:
      out += func_name(n.op);
      out += '(';
      print(*n.a, out);
      out += ')';
      return;
  }
}

int count_nodes(const ExprNode& n, bool leaves_only) {
  if (!n.a) return 1;
  int c = leaves_only ? 0 : 1;
  c += count_nodes(*n.a, leaves_only);
  if (n.b) c += count_nodes(*n.b, leaves_only);
  return c;
}

NodePtr substitute_node(const NodePtr& n, int slot, const NodePtr& rep) {
  if (!(n->var_mask & (1 << slot))) return n;
  if (n->op == Op::Var) return rep;
  NodePtr a = substitute_node(n->a, slot, rep);
  NodePtr b = n->b ? substitute_node(n->b, slot, rep) : nullptr;
  return make(n->op, a, b);
}

// Recursive-descent parser with line/column tracking.
class Parser {
 public:
  Parser(std::string_view text, const std::array<std::string, 4>& names) : text_(text) {
    for (int k = 0; k < 4; ++k) {
      std::string name = names[k].empty() ? "x" + std::to_string(k) : names[k];
      vars_[name] = k;
      if (name != "x" + std::to_string(k)) vars_["x" + std::to_string(k)] = k;
    }
    if (!vars_.count("r")) vars_["r"] = 0;
  }

  Expr run() {
    if (text_.size() > kMaxExprBytes) throw SyntaxError("expression exceeds 64 KiB", 1, 1);
    skip_ws();
    if (at_end()) fail("empty expression");
    NodePtr e = expr();
    skip_ws();
    if (!at_end()) fail(std::string("unexpected '") + text_[pos_] + "'");
    return Expr(e);
  }

 private:
  static constexpr int kMaxDepth = 200;

  [[noreturn]] void fail(const std::string& msg) { throw SyntaxError(msg, line_, col_); }
  [[noreturn]] void fail_at(const std::string& msg, int line, int col) {
    throw SyntaxError(msg, line, col);
  }

  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return at_end() ? '\0' : text_[pos_]; }
  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }
  void skip_ws() {
    while (!at_end() && (peek() == ' ' || peek() == '\t' || peek() == '\n' || peek() == '\r')) advance();
  }
  bool accept(char c) {
    skip_ws();
    if (peek() == c) {
      advance();
      return true;
    }
    return false;
  }
  void expect(char c) {
    skip_ws();
    if (peek() != c) {
      if (at_end()) fail(std::string("expected '") + c + "' before end of input");
      fail(std::string("expected '") + c + "'");
    }
    advance();
  }

  struct DepthGuard {
    Parser& p;
    explicit DepthGuard(Parser& parser) : p(parser) {
      if (++p.depth_ > kMaxDepth) p.fail("expression nested too deeply");
    }
    ~DepthGuard() { --p.depth_; }
  };

  NodePtr expr() {
    DepthGuard guard(*this);
    NodePtr left = term();
    for (;;) {
      skip_ws();
      if (peek() == '+') {
        advance();
        left = make(Op::Add, left, term());
      } else if (peek() == '-') {
        advance();
        left = make(Op::Sub, left, term());
      } else {
        return left;
      }
    }
  }

  NodePtr term() {
    NodePtr left = unary();
    for (;;) {
      skip_ws();
      if (peek() == '*') {
        advance();
        left = make(Op::Mul, left, unary());
      } else if (peek() == '/') {
        advance();
        left = make(Op::Div, left, unary());
      } else {
        return left;
      }
    }
  }

  NodePtr unary() {
    DepthGuard guard(*this);
    skip_ws();
    if (peek() == '-') {
      advance();
      return make(Op::Neg, unary());
    }
    return power();
  }

  NodePtr power() {
    NodePtr base = atom();
    skip_ws();
    if (peek() == '^') {
      advance();
      return make(Op::Pow, base, unary());
    }
    return base;
  }

  NodePtr number() {
    std::size_t start = pos_;
    int l = line_, c = col_;
    while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) advance();
    if (peek() == '.') {
      advance();
      while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) advance();
    }
    if (peek() == 'e' || peek() == 'E') {
      std::size_t save = pos_;
      int sl = line_, sc = col_;
      advance();
      if (peek() == '+' || peek() == '-') advance();
      if (!std::isdigit(static_cast<unsigned char>(peek()))) {
        pos_ = save;
        line_ = sl;
        col_ = sc;
      } else {
        while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) advance();
      }
    }
    std::string_view lit = text_.substr(start, pos_ - start);
    if (lit == ".") fail_at("malformed number", l, c);
    double v = 0.0;
    auto res = std::from_chars(lit.data(), lit.data() + lit.size(), v);
    if (res.ec != std::errc() || res.ptr != lit.data() + lit.size() || !std::isfinite(v)) {
      fail_at("number out of range", l, c);
    }
    return make_const(v);
  }

  NodePtr atom() {
    skip_ws();
    if (at_end()) fail("unexpected end of input");
    char ch = peek();
    if (std::isdigit(static_cast<unsigned char>(ch)) || ch == '.') return number();
    if (ch == '(') {
      advance();
      NodePtr e = expr();
      expect(')');
      return e;
    }
    if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
      int l = line_, c = col_;
      std::size_t start = pos_;
      while (!at_end() &&
             (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_')) {
        advance();
      }
      std::string id(text_.substr(start, pos_ - start));
      static const std::unordered_map<std::string, Op> funcs = {
          {"sin", Op::Sin}, {"cos", Op::Cos},   {"tan", Op::Tan}, {"exp", Op::Exp},
          {"log", Op::Log}, {"sqrt", Op::Sqrt}, {"abs", Op::Abs}};
      if (auto f = funcs.find(id); f != funcs.end()) {
        expect('(');
        NodePtr arg = expr();
        expect(')');
        return make(f->second, arg);
      }
      if (id == "pi") return make(Op::Pi);
      if (auto v = vars_.find(id); v != vars_.end()) return make_var(v->second, id);
      throw UnknownIdentifier("unknown identifier '" + id + "'", l, c);
    }
    fail(std::string("unexpected '") + ch + "'");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
  int depth_ = 0;
  std::unordered_map<std::string, int> vars_;
};

}  // namespace

Expr Expr::constant(double v) {
  if (v < 0.0 || (v == 0.0 && std::signbit(v))) return Expr(make(Op::Neg, make_const(-v)));
  return Expr(make_const(v));
}
Expr Expr::pi() { return Expr(make(Op::Pi)); }
Expr Expr::var(int slot) { return Expr(make_var(slot, "x" + std::to_string(slot))); }
Expr Expr::var(int slot, std::string name) { return Expr(make_var(slot, std::move(name))); }

int Expr::node_count() const { return count_nodes(*n_, false); }
int Expr::leaf_count() const { return count_nodes(*n_, true); }
bool Expr::depends_on(int slot) const { return (n_->var_mask >> slot) & 1; }
bool Expr::is_constant() const { return n_->var_mask == 0; }

Expr Expr::substitute(int slot, const Expr& replacement) const {
  return Expr(substitute_node(n_, slot, replacement.ptr()));
}

std::string Expr::to_string() const {
  std::string out;
  print(*n_, out);
  return out;
}

double Expr::eval(const std::array<double, 4>& x) const {
  try {
    return expr_detail::eval_node(*n_, x);
  } catch (const JetDomainError& e) {
    expr_detail::throw_domain(e.what(), x.data());
  }
}

bool operator==(const Expr& a, const Expr& b) { return nodes_equal(*a.ptr(), *b.ptr()); }

namespace {
// Value of a literal, including a negated literal.
bool literal_value(const Expr& e, double& v) {
  if (e.op() == Op::Const) {
    v = e.node().value;
    return true;
  }
  if (e.op() == Op::Neg && e.node().a->op == Op::Const) {
    v = -e.node().a->value;
    return true;
  }
  return false;
}
}  // namespace

Expr operator+(const Expr& a, const Expr& b) {
  double x = 0.0, y = 0.0;
  bool la = literal_value(a, x), lb = literal_value(b, y);
  if (la && lb) return Expr::constant(x + y);
  if (la && x == 0.0) return b;
  if (lb && y == 0.0) return a;
  return Expr(make(Op::Add, a.ptr(), b.ptr()));
}

Expr operator-(const Expr& a, const Expr& b) {
  double x = 0.0, y = 0.0;
  bool la = literal_value(a, x), lb = literal_value(b, y);
  if (la && lb) return Expr::constant(x - y);
  if (lb && y == 0.0) return a;
  if (la && x == 0.0) return -b;
  return Expr(make(Op::Sub, a.ptr(), b.ptr()));
}

Expr operator*(const Expr& a, const Expr& b) {
  double x = 0.0, y = 0.0;
  bool la = literal_value(a, x), lb = literal_value(b, y);
  if (la && lb) return Expr::constant(x * y);
  if ((la && x == 0.0) || (lb && y == 0.0)) return Expr::constant(0.0);
  if (la && x == 1.0) return b;
  if (lb && y == 1.0) return a;
  return Expr(make(Op::Mul, a.ptr(), b.ptr()));
}

Expr operator/(const Expr& a, const Expr& b) {
  double x = 0.0, y = 0.0;
  bool la = literal_value(a, x), lb = literal_value(b, y);
  if (la && lb && y != 0.0) return Expr::constant(x / y);
  if (lb && y == 1.0) return a;
  if (la && x == 0.0 && !(lb && y == 0.0)) return Expr::constant(0.0);
  return Expr(make(Op::Div, a.ptr(), b.ptr()));
}

Expr operator-(const Expr& a) {
  double x = 0.0;
  if (literal_value(a, x)) return Expr::constant(-x);
  if (a.op() == Op::Neg) return Expr(a.node().a);
  return Expr(make(Op::Neg, a.ptr()));
}

Expr pow(const Expr& a, const Expr& b) {
  double y = 0.0;
  if (literal_value(b, y)) {
    if (y == 1.0) return a;
    if (y == 0.0) return Expr::constant(1.0);
  }
  return Expr(make(Op::Pow, a.ptr(), b.ptr()));
}

#define CONFBOUND_UNARY(fn, OP) \
  Expr fn(const Expr& a) { return Expr(make(Op::OP, a.ptr())); }
CONFBOUND_UNARY(sin, Sin)
CONFBOUND_UNARY(cos, Cos)
CONFBOUND_UNARY(tan, Tan)
CONFBOUND_UNARY(exp, Exp)
CONFBOUND_UNARY(log, Log)
CONFBOUND_UNARY(sqrt, Sqrt)
CONFBOUND_UNARY(abs, Abs)
#undef CONFBOUND_UNARY

Expr parse(std::string_view text, const std::array<std::string, 4>& names) {
  return Parser(text, names).run();
}

namespace expr_detail {

void throw_domain(const char* what, const double* x) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%s at (%.17g, %.17g, %.17g, %.17g)", what, x[0], x[1], x[2], x[3]);
  throw ExpressionDomainError(buf);
}

}  // namespace expr_detail

}  // namespace confbound
