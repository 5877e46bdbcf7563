#include <random>
#include <string>

#include "confbound/expr.hpp"
#include "confbound/program.hpp"
#include "doctest.h"

using namespace confbound;

namespace {

Expr random_expr(std::mt19937_64& rng, int depth) {
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 2 : 14);
  int k = pick(rng);
  switch (k) {
    case 0: return Expr::var(static_cast<int>(rng() % 4));
    case 1: {
      static const double lits[] = {0.0, 1.0, 2.0, 0.5, 3.25, 1e-5, 1234.5678, 0.1, 7e22};
      return Expr::constant(lits[rng() % 9]);
    }
    case 2: return Expr::pi();
    case 3: return random_expr(rng, depth - 1) + random_expr(rng, depth - 1);
    case 4: return Expr(std::make_shared<ExprNode>(ExprNode{Op::Sub, 0, 0, "", 0, random_expr(rng, depth - 1).ptr(),
                                                            random_expr(rng, depth - 1).ptr()}));
    case 5: return random_expr(rng, depth - 1) * random_expr(rng, depth - 1);
    case 6: return random_expr(rng, depth - 1) / random_expr(rng, depth - 1);
    case 7: return pow(random_expr(rng, depth - 1), random_expr(rng, depth - 1));
    case 8: return Expr(std::make_shared<ExprNode>(ExprNode{Op::Neg, 0, 0, "", 0, random_expr(rng, depth - 1).ptr(), nullptr}));
    case 9: return sin(random_expr(rng, depth - 1));
    case 10: return cos(random_expr(rng, depth - 1));
    case 11: return exp(random_expr(rng, depth - 1));
    case 12: return log(random_expr(rng, depth - 1));
    case 13: return sqrt(random_expr(rng, depth - 1));
    default: return abs(random_expr(rng, depth - 1));
  }
}

}  // namespace

TEST_CASE("parser examples") {
  Expr ball = parse("4/(1 - (x0^2+x1^2+x2^2+x3^2))^2");
  CHECK(ball.op() == Op::Div);
  CHECK(ball.leaf_count() == 11);
  CHECK(ball.node_count() == 21);

  Expr c = parse("cos(r)^2");
  REQUIRE(c.op() == Op::Pow);
  CHECK(c.node().a->op == Op::Cos);
  CHECK(c.node().a->a->op == Op::Var);
  CHECK(c.node().a->a->slot == 0);
  CHECK(c.node().b->op == Op::Const);
  CHECK(c.node().b->value == 2.0);

  try {
    parse("sin(");
    FAIL("expected a syntax error");
  } catch (const SyntaxError& e) {
    CHECK(e.line() == 1);
    CHECK(e.column() == 5);
  }
}

TEST_CASE("parser precedence") {
  CHECK(parse("-x0^2").op() == Op::Neg);
  CHECK(parse("2^3^2").eval({}) == 512.0);
  CHECK(parse("2^-1").eval({}) == 0.5);
  CHECK(parse("1 - 2 - 3").eval({}) == -4.0);
  CHECK(parse("8/4/2").eval({}) == 1.0);
  CHECK(parse("2*3 + 4*5").eval({}) == 26.0);
  CHECK(parse(" -(1+2) * 2 ").eval({}) == -6.0);
  CHECK(parse("1.5e1 + .5").eval({}) == 15.5);
}

TEST_CASE("parser errors carry locations") {
  try {
    parse("x0 + foo(1)");
    FAIL("expected an unknown identifier");
  } catch (const UnknownIdentifier& e) {
    CHECK(e.column() == 6);
  }
  try {
    parse("x0 +\n  * 2");
    FAIL("expected a syntax error");
  } catch (const SyntaxError& e) {
    CHECK(e.line() == 2);
    CHECK(e.column() == 3);
  }
  CHECK_THROWS_AS(parse(""), SyntaxError);
  CHECK_THROWS_AS(parse("(x0"), SyntaxError);
  CHECK_THROWS_AS(parse("x0)"), SyntaxError);
  CHECK_THROWS_AS(parse("1e999"), SyntaxError);
  CHECK_THROWS_AS(parse(std::string(70000, '1')), SyntaxError);
  CHECK_THROWS_AS(parse(std::string(5000, '(') + "1" + std::string(5000, ')')), SyntaxError);
}

TEST_CASE("named coordinates") {
  Expr e = parse("sin(psi)^2*cos(chi)", {"r", "psi", "chi", "phi"});
  CHECK(e.depends_on(1));
  CHECK(e.depends_on(2));
  CHECK_FALSE(e.depends_on(3));
  CHECK(e.to_string() == "sin(psi)^2*cos(chi)");
}

TEST_CASE("evaluation errors report the point") {
  Expr e = parse("log(x0)");
  try {
    e.eval({-1.0, 0, 0, 0});
    FAIL("expected a domain error");
  } catch (const ExpressionDomainError& err) {
    CHECK(std::string(err.what()).find("-1") != std::string::npos);
  }
}

TEST_CASE("print then parse round-trips random trees") {
  std::mt19937_64 rng(20240611);
  for (int t = 0; t < 100000; ++t) {
    Expr e = random_expr(rng, 1 + static_cast<int>(rng() % 5));
    std::string s = e.to_string();
    Expr back = parse(s);
    if (!(back == e)) {
      INFO("printed: ", s);
      CHECK(back == e);
      break;
    }
  }
}

TEST_CASE("mutated inputs never crash the parser") {
  std::mt19937_64 rng(99);
  const std::string alphabet = "x0123r+-*/^().e pisncoqrtlgab,\n\t#";
  int ok = 0, errors = 0;
  for (int t = 0; t < 100000; ++t) {
    std::string s = random_expr(rng, 3).to_string();
    int edits = 1 + static_cast<int>(rng() % 4);
    for (int k = 0; k < edits && !s.empty(); ++k) {
      std::size_t pos = rng() % s.size();
      switch (rng() % 3) {
        case 0: s.erase(pos, 1); break;
        case 1: s.insert(pos, 1, alphabet[rng() % alphabet.size()]); break;
        default: s[pos] = alphabet[rng() % alphabet.size()]; break;
      }
    }
    try {
      parse(s);
      ++ok;
    } catch (const SyntaxError&) {
      ++errors;
    }
  }
  CHECK(ok + errors == 100000);
  CHECK(errors > 0);
}

TEST_CASE("program shares subexpressions and matches tree evaluation") {
  Program p;
  Expr a = parse("sin(x1)^2*cos(x2) + sin(x1)");
  Expr b = parse("sin(x1)*exp(x3)");
  p.add(a);
  p.add(b);
  CHECK(p.size() < a.node_count() + b.node_count());
  std::vector<double> regs;
  std::array<double, 4> x{0.1, 0.7, -0.3, 0.25};
  p.run(x, regs);
  CHECK(p.output(regs, 0) == a.eval(x));
  CHECK(p.output(regs, 1) == b.eval(x));
  CHECK(p.var_mask() == 0b1110);
}
