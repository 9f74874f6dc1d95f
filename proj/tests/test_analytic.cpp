#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "bryant4/analytic.hpp"
#include "bryant4/errors.hpp"
#include "bryant4/grid.hpp"
#include "bryant4/poly.hpp"

using namespace bryant4;

namespace {

std::mt19937 rng(7250123u);

Complex random_point(double radius = 1.0) {
  std::uniform_real_distribution<double> u(-radius, radius);
  return {u(rng), u(rng)};
}

// Central difference oracle for the symbolic derivative.
Complex central_diff(const Expr& e, Complex z, double h = 1e-5) {
  return (e.eval(z + h) - e.eval(z - h)) / (2.0 * h);
}

}  // namespace

TEST_CASE("evaluation of basic expressions") {
  auto z2 = Expr::pow(Expr::variable(), 2);
  CHECK(std::abs(z2->eval({1, 1}) - Complex(0, 2)) < 1e-15);

  auto inv = Expr::div(Expr::constant(1.0), Expr::variable());
  CHECK(std::abs(inv->eval(2.0) - Complex(0.5, 0)) < 1e-15);

  auto ez = Expr::exp(Expr::variable());
  CHECK(std::abs(ez->eval(0.0) - Complex(1, 0)) < 1e-15);
}

TEST_CASE("pole proximity guard") {
  auto inv = Expr::div(Expr::constant(1.0), Expr::variable());
  CHECK_THROWS_AS(inv->eval({1e-14, 0}), Error);
}

TEST_CASE("symbolic derivatives match expected closed forms") {
  auto z = Expr::variable();

  auto d1 = Expr::pow(z, 2)->derivative();  // 2z
  auto d2 = Expr::div(Expr::constant(1.0), z)->derivative();  // -1/z^2
  auto d3 = Expr::mul(Expr::exp(z), z)->derivative();  // exp(z)(z+1)
  for (int k = 0; k < 50; ++k) {
    Complex p = random_point() + Complex(2.5, 0);  // stay away from 0
    CHECK(std::abs(d1->eval(p) - 2.0 * p) < 1e-12);
    CHECK(std::abs(d2->eval(p) + 1.0 / (p * p)) < 1e-12);
    CHECK(std::abs(d3->eval(p) - std::exp(p) * (p + 1.0)) < 1e-10);
  }
}

TEST_CASE("derivative agrees with central differences at random points") {
  std::vector<ExprPtr> exprs = {
      parse_expression("z^3 - 2*z + 1"),
      parse_expression("exp(2*z)*(z^2+1)"),
      parse_expression("(z^2+1)/(z-3)"),
      parse_expression("1/(z^2+4)"),
      Expr::poly({Complex(1, 1), Complex(0, -2), Complex(3, 0), Complex(0.5, 0.5)}),
  };
  for (const auto& e : exprs) {
    ExprPtr d = e->derivative();
    for (int k = 0; k < 100; ++k) {
      Complex p = random_point(0.9);
      Complex exact = d->eval(p);
      Complex approx = central_diff(*e, p);
      CHECK(std::abs(exact - approx) <= 1e-6 * (1.0 + std::abs(exact)));
    }
  }
}

TEST_CASE("parser handles the expression grammar") {
  auto e1 = parse_expression("z^2 + 1");
  CHECK(std::abs(e1->eval({2, 0}) - Complex(5, 0)) < 1e-15);

  auto e2 = parse_expression("1/(z-1)");
  CHECK(std::abs(e2->eval({3, 0}) - Complex(0.5, 0)) < 1e-15);

  auto e3 = parse_expression("exp(2*z)");
  CHECK(std::abs(e3->eval({0.5, 0}) - std::exp(Complex(1, 0))) < 1e-14);

  auto e4 = parse_expression(" 2.5e-1 * i - z ^ 3 ");
  CHECK(std::abs(e4->eval({1, 0}) - Complex(-1, 0.25)) < 1e-15);
}

TEST_CASE("parser reports errors with position") {
  CHECK_THROWS_WITH_AS(parse_expression("z +"), doctest::Contains("position"), Error);
  CHECK_THROWS_WITH_AS(parse_expression("sin(z)"), doctest::Contains("sin"), Error);
  try {
    parse_expression("foo");
  } catch (const Error& err) {
    CHECK(err.code() == "UnknownIdentifier");
  }
  try {
    parse_expression("(z");
  } catch (const Error& err) {
    CHECK(err.code() == "SyntaxError");
  }
}

TEST_CASE("print then parse reproduces evaluation") {
  std::vector<ExprPtr> exprs = {
      parse_expression("(1+2*i)*z^2 - exp(z/2) + 3/(z+2)"),
      parse_expression("-z^4 + 0.125*z - i"),
      Expr::poly({Complex(0, 1), Complex(2, 0), Complex(-1, 0.5)}),
  };
  for (const auto& e : exprs) {
    ExprPtr round = parse_expression(e->to_string());
    for (int k = 0; k < 100; ++k) {
      Complex p = random_point(0.9);
      CHECK(std::abs(e->eval(p) - round->eval(p)) <= 1e-13 * (1.0 + std::abs(e->eval(p))));
    }
  }
}

TEST_CASE("rational orders: zeros, poles, multiplicities") {
  Rect rect{-3, 3, -3, 3};

  auto zeros = rational_orders(PolyC({0.0, 1.0}), PolyC::constant(1.0), rect);
  REQUIRE(zeros.size() == 1);
  CHECK(zeros[0].order == 1);
  CHECK(!zeros[0].is_pole);
  CHECK(std::abs(zeros[0].location) < 1e-9);

  // (z-1)^2 in the denominator: double pole at 1.
  auto poles = rational_orders(PolyC::constant(1.0), PolyC({1.0, -2.0, 1.0}), rect);
  REQUIRE(poles.size() == 1);
  CHECK(poles[0].order == 2);
  CHECK(poles[0].is_pole);
  CHECK(std::abs(poles[0].location - Complex(1, 0)) < 1e-6);

  auto pm = rational_orders(PolyC({-1.0, 0.0, 1.0}), PolyC::constant(1.0), rect);
  REQUIRE(pm.size() == 2);
  CHECK(pm[0].order == 1);
  CHECK(pm[1].order == 1);
  CHECK(std::abs(pm[0].location - Complex(-1, 0)) < 1e-9);
  CHECK(std::abs(pm[1].location - Complex(1, 0)) < 1e-9);
}

TEST_CASE("rational orders: degree bookkeeping and common factors") {
  Rect rect{-5, 5, -5, 5};
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    // Build p and q from known, well-separated roots.
    PolyC p = PolyC::constant(1.0), q = PolyC::constant(1.0);
    int dp = 1 + trial % 3, dq = 1 + (trial / 3) % 2;
    for (int k = 0; k < dp; ++k)
      p = p * PolyC({-Complex(u(rng) * 2, u(rng) * 2), 1.0});
    for (int k = 0; k < dq; ++k)
      q = q * PolyC({-Complex(3.0 + k, 1.5), 1.0});
    auto orders = rational_orders(p, q, rect);
    int zero_sum = 0, pole_sum = 0;
    for (const auto& ro : orders) (ro.is_pole ? pole_sum : zero_sum) += ro.order;
    CHECK(zero_sum - pole_sum == p.degree() - q.degree());
  }

  PolyC shared({-1.0, 1.0});  // z - 1
  CHECK_THROWS_AS(rational_orders(shared * PolyC({1.0, 1.0}), shared, rect), Error);
}

TEST_CASE("multiplicity four is resolved") {
  PolyC root({-0.5, 1.0});  // z - 1/2
  PolyC p = root * root * root * root * PolyC({2.0, 1.0});
  auto orders = rational_orders(p, PolyC::constant(1.0), Rect{-3, 3, -3, 3});
  REQUIRE(orders.size() == 2);
  bool found = false;
  for (const auto& ro : orders)
    if (ro.order == 4 && std::abs(ro.location - Complex(0.5, 0)) < 1e-3) found = true;
  CHECK(found);
}

TEST_CASE("path primitive on closed forms") {
  DomainGrid grid = DomainGrid::square(0.5, 17, {0, 0});
  SpanningTree tree = SpanningTree::build(grid, SpanningTree::Sweep::RowMajor);

  auto ident = [](Complex z) { return z; };
  auto res = path_primitive(ident, grid, tree);
  // integral of z from 0: z^2/2; at node (0.5, 0).
  CHECK(std::abs(res.values.at(16, 8) - Complex(0.125, 0)) < 1e-12);

  auto one = [](Complex) { return Complex(1.0); };
  auto res1 = path_primitive(one, grid, tree);
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i)
      CHECK(std::abs(res1.values.at(i, j) - grid.node(i, j)) < 1e-12);

  auto sq = [](Complex z) { return 3.0 * z * z; };
  auto res3 = path_primitive(sq, grid, tree);
  // Primitive z^3 at z = 0.5 + 0.5i equals (1+i)^3/8 = (-2+2i)/8.
  CHECK(std::abs(res3.values.at(16, 16) - Complex(-0.25, 0.25)) < 1e-12);
}

TEST_CASE("path primitive is path independent across trees") {
  DomainGrid grid = DomainGrid::square(0.5, 33, {0, 0});
  auto f = [](Complex z) { return std::exp(2.0 * z) * (z * z + 1.0); };
  auto a = path_primitive(f, grid, SpanningTree::build(grid, SpanningTree::Sweep::RowMajor));
  auto b = path_primitive(f, grid, SpanningTree::build(grid, SpanningTree::Sweep::ColMajor));
  double max_diff = 0;
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i)
      max_diff = std::max(max_diff, std::abs(a.values.at(i, j) - b.values.at(i, j)));
  CHECK(max_diff < 1e-9 * 64);  // tol_loop x path length in cells
}

TEST_CASE("derivative of the primitive reproduces the integrand") {
  auto f = [](Complex z) { return std::exp(2.0 * z) * (z * z * z + 0.5); };
  double errs[2];
  int sizes[2] = {17, 33};
  for (int t = 0; t < 2; ++t) {
    DomainGrid grid = DomainGrid::square(0.5, sizes[t], {0, 0});
    auto prim = path_primitive(f, grid, SpanningTree::build(grid, SpanningTree::Sweep::RowMajor));
    double err = 0;
    for (int j = 0; j < grid.ny; ++j) {
      for (int i = 0; i < grid.nx; ++i) {
        auto dx = fd_dx(grid, prim.values, i, j);
        if (!dx) continue;
        err = std::max(err, std::abs(*dx - f(grid.node(i, j))));
      }
    }
    errs[t] = err;
  }
  double order = std::log2(errs[0] / errs[1]);
  CHECK(order >= 1.9);
}

TEST_CASE("a pole inside a cell trips loop closure") {
  // Even node count: the origin falls strictly inside a cell, so 1/z is
  // finite at all nodes but the circulation around that cell is 2 pi i.
  DomainGrid grid = DomainGrid::rect(-0.5, 0.5, -0.5, 0.5, 16, 16, {-0.5, -0.5});
  auto f = [](Complex z) { return 1.0 / z; };
  CHECK_THROWS_AS(
      path_primitive(f, grid, SpanningTree::build(grid, SpanningTree::Sweep::RowMajor)), Error);
}

TEST_CASE("grid connectivity validation") {
  DomainGrid grid = DomainGrid::square(0.5, 21, {0, 0});
  grid.mask_disk({0.25, 0.25}, 0.08);  // interior island
  CHECK_THROWS_AS(grid.validate_connectivity(), Error);

  DomainGrid split = DomainGrid::square(0.5, 21, {0, 0});
  for (int j = 0; j < split.ny; ++j) split.mask_node(15, j);  // full vertical cut
  CHECK_THROWS_AS(split.validate_connectivity(), Error);

  DomainGrid ok = DomainGrid::square(0.5, 21, {0, 0});
  ok.mask_disk({0.5, 0.5}, 0.12);  // corner bite keeps the region simply connected
  CHECK_NOTHROW(ok.validate_connectivity());
}

TEST_CASE("to_polynomial and to_rational extraction") {
  auto p = to_polynomial(*parse_expression("(z+1)*(z-1) + 1"));
  REQUIRE(p.has_value());
  CHECK(p->degree() == 2);
  CHECK(std::abs(p->coeff(0)) < 1e-14);
  CHECK(std::abs(p->coeff(2) - Complex(1, 0)) < 1e-14);

  auto r = to_rational(*parse_expression("1/(z-2)"));
  REQUIRE(r.has_value());
  CHECK(r->first.degree() == 0);
  CHECK(r->second.degree() == 1);

  CHECK(!to_polynomial(*parse_expression("exp(z)")).has_value());
  CHECK(!to_polynomial(*parse_expression("1/(z-2)")).has_value());
}
