#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "switchcert/poly.hpp"

using namespace switchcert;

namespace {

Polynomial parse_terms(int n, const std::vector<std::pair<std::vector<int>, double>>& terms) {
  Polynomial p(n);
  for (const auto& [e, c] : terms) p.add_to_coefficient(Exponents(e), c);
  return p;
}

// x1^2*x2^2 + x1^2 + x2^2
Polynomial bilinear_bump() {
  return parse_terms(2, {{{2, 2}, 1.0}, {{2, 0}, 1.0}, {{0, 2}, 1.0}});
}

// 19.14 x1^4 + 10.57 x1^3 x2 + 47.88 x1^2 x2^2 + 16.47 x1 x2^3 + 10.49 x2^4
Polynomial certified_quartic() {
  return parse_terms(2, {{{4, 0}, 19.14},
                         {{3, 1}, 10.57},
                         {{2, 2}, 47.88},
                         {{1, 3}, 16.47},
                         {{0, 4}, 10.49}});
}

Polynomial random_poly(std::mt19937_64& rng, int n, int max_deg) {
  std::uniform_real_distribution<double> coeff(-2.0, 2.0);
  std::uniform_int_distribution<int> num_terms(1, 8);
  std::uniform_int_distribution<int> deg(0, max_deg);
  Polynomial p(n);
  const int t = num_terms(rng);
  for (int i = 0; i < t; ++i) {
    std::vector<int> e(n, 0);
    int budget = deg(rng);
    for (int v = 0; v < n && budget > 0; ++v) {
      std::uniform_int_distribution<int> part(0, budget);
      e[v] = part(rng);
      budget -= e[v];
    }
    p.add_to_coefficient(Exponents(e), coeff(rng));
  }
  return p;
}

std::vector<double> random_point(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  std::vector<double> x(n);
  for (auto& v : x) v = u(rng);
  return x;
}

}  // namespace

TEST_CASE("eval at fixed points") {
  const Polynomial circle = sum_of_squares_of_variables(2);
  CHECK(circle.eval(std::vector<double>{0.0, 0.0}) == 0.0);

  CHECK(bilinear_bump().eval(std::vector<double>{1.0, 1.0}) == doctest::Approx(3.0));

  CHECK(certified_quartic().eval(std::vector<double>{1.0, 0.0}) == doctest::Approx(19.14));

  CHECK_THROWS_AS(circle.eval(std::vector<double>{1.0, 2.0, 3.0}), Error);
}

TEST_CASE("compose") {
  const Polynomial circle = sum_of_squares_of_variables(2);

  const PolynomialMap id = PolynomialMap::identity(2);
  CHECK(circle.compose(id.components()) == circle);

  // f1(x) = (x1*x2, 0)
  Polynomial f11(2);
  f11.set_coefficient(Exponents({1, 1}), 1.0);
  const PolynomialMap f1({f11, Polynomial::zero(2)});
  const Polynomial vc = circle.compose(f1.components());
  Polynomial expect(2);
  expect.set_coefficient(Exponents({2, 2}), 1.0);
  CHECK(vc == expect);

  // First row of [[1,0],[1,0]] is (1, 0), so x1^2 pulls back to x1^2.
  const PolynomialMap a1 = PolynomialMap::linear({{1, 0}, {1, 0}});
  Polynomial x1sq(2);
  x1sq.set_coefficient(Exponents({2, 0}), 1.0);
  CHECK(x1sq.compose(a1.components()) == x1sq);

  CHECK_THROWS_AS(x1sq.compose({f11}), Error);
}

TEST_CASE("gradient and hessian") {
  const Polynomial circle = sum_of_squares_of_variables(2);
  const PolyMatrix h = hessian(circle);
  CHECK(h.at(0, 0) == Polynomial::constant(2, 2.0));
  CHECK(h.at(1, 1) == Polynomial::constant(2, 2.0));
  CHECK(h.at(0, 1).is_zero());

  const PolyMatrix hb = hessian(bilinear_bump());
  const std::vector<double> pt{2.0, 2.0};
  const double h00 = hb.at(0, 0).eval(pt);
  const double h01 = hb.at(0, 1).eval(pt);
  const double h11 = hb.at(1, 1).eval(pt);
  CHECK(h00 == doctest::Approx(10.0));
  CHECK(h01 == doctest::Approx(16.0));
  CHECK(h11 == doctest::Approx(10.0));
  CHECK(h00 * h11 - h01 * h01 == doctest::Approx(-156.0));
  CHECK(hb.is_symmetric());

  // (x1 + x2)^2: gradient components both equal 2(x1 + x2).
  Polynomial lin(2);
  lin.set_coefficient(Exponents({1, 0}), 1.0);
  lin.set_coefficient(Exponents({0, 1}), 1.0);
  const Polynomial sq = lin * lin;
  const auto g = gradient(sq);
  CHECK(g[0] == lin.scaled(2.0));
  CHECK(g[1] == lin.scaled(2.0));
}

TEST_CASE("monomial_basis") {
  const auto homog = monomial_basis(2, 2, true);
  REQUIRE(homog.size() == 3);
  CHECK(homog[0] == Exponents({2, 0}));
  CHECK(homog[1] == Exponents({1, 1}));
  CHECK(homog[2] == Exponents({0, 2}));

  CHECK(monomial_basis(3, 2, false).size() == 10);

  const auto constant = monomial_basis(2, 0, false);
  REQUIRE(constant.size() == 1);
  CHECK(constant[0] == Exponents({0, 0}));
}

TEST_CASE("homogeneity and ring ops") {
  CHECK_FALSE(bilinear_bump().is_homogeneous());
  CHECK(certified_quartic().is_homogeneous());

  Polynomial a(2), b(2);
  a.set_coefficient(Exponents({1, 0}), 1.0);
  a.set_coefficient(Exponents({0, 1}), 1.0);
  b.set_coefficient(Exponents({1, 0}), 1.0);
  b.set_coefficient(Exponents({0, 1}), -1.0);
  Polynomial expect(2);
  expect.set_coefficient(Exponents({2, 0}), 1.0);
  expect.set_coefficient(Exponents({0, 2}), -1.0);
  CHECK(a * b == expect);
}

TEST_CASE("zero polynomial conventions") {
  const Polynomial z = Polynomial::zero(3);
  CHECK(z.degree() == -1);
  CHECK(z.is_zero());
  CHECK(z.is_homogeneous());
  Polynomial p(2);
  p.set_coefficient(Exponents({1, 1}), 1.0);
  p.add_to_coefficient(Exponents({1, 1}), -1.0);
  CHECK(p.is_zero());
  CHECK(p.term_count() == 0);
}

TEST_CASE("ring axioms at random points") {
  std::mt19937_64 rng(12345);
  for (int trial = 0; trial < 25; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 3);
    const Polynomial p = random_poly(rng, n, 4);
    const Polynomial q = random_poly(rng, n, 4);
    const Polynomial sum = p + q;
    const Polynomial prod = p * q;
    for (int i = 0; i < 4; ++i) {
      const auto x = random_point(rng, n);
      const double pv = p.eval(x), qv = q.eval(x);
      const double scale = 1 + std::abs(pv) + std::abs(qv) + std::abs(pv * qv);
      CHECK(std::abs(sum.eval(x) - (pv + qv)) <= 1e-12 * scale);
      CHECK(std::abs(prod.eval(x) - pv * qv) <= 1e-12 * scale);
    }
  }
}

TEST_CASE("compose respects evaluation") {
  std::mt19937_64 rng(777);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 2);
    const Polynomial p = random_poly(rng, n, 3);
    std::vector<Polynomial> f;
    for (int i = 0; i < n; ++i) f.push_back(random_poly(rng, n, 2));
    const Polynomial comp = p.compose(f);
    for (int i = 0; i < 5; ++i) {
      const auto x = random_point(rng, n);
      std::vector<double> fx(n);
      for (int j = 0; j < n; ++j) fx[j] = f[j].eval(x);
      const double lhs = comp.eval(x);
      const double rhs = p.eval(fx);
      CHECK(std::abs(lhs - rhs) <= 1e-10 * (1 + std::abs(rhs)));
    }
  }
}

TEST_CASE("hessian matches central differences") {
  std::mt19937_64 rng(4242);
  const double h = 1e-5;
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2;
    const Polynomial p = random_poly(rng, n, 4);
    const PolyMatrix hess = hessian(p);
    auto x = random_point(rng, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        auto xpp = x, xpm = x, xmp = x, xmm = x;
        xpp[i] += h; xpp[j] += h;
        xpm[i] += h; xpm[j] -= h;
        xmp[i] -= h; xmp[j] += h;
        xmm[i] -= h; xmm[j] -= h;
        const double fd = (p.eval(xpp) - p.eval(xpm) - p.eval(xmp) + p.eval(xmm)) / (4 * h * h);
        const double exact = hess.at(i, j).eval(x);
        CHECK(std::abs(fd - exact) <= 1e-4 * (1 + std::abs(exact)));
      }
    }
  }
}

TEST_CASE("Euler identity for forms") {
  std::mt19937_64 rng(99);
  for (int d : {2, 3, 4, 6}) {
    const int n = 2;
    Polynomial p(n);
    for (const auto& e : monomial_basis(n, d, true)) {
      p.set_coefficient(e, std::uniform_real_distribution<double>(-1, 1)(rng));
    }
    const auto g = gradient(p);
    for (int i = 0; i < 10; ++i) {
      const auto x = random_point(rng, n);
      double xg = 0;
      for (int j = 0; j < n; ++j) xg += x[j] * g[j].eval(x);
      const double dp = d * p.eval(x);
      CHECK(std::abs(xg - dp) <= 1e-10 * (1 + std::abs(dp)));
    }
  }
}

TEST_CASE("switched system validation") {
  Polynomial f11(2);
  f11.set_coefficient(Exponents({1, 1}), 1.0);
  const PolynomialMap f1({f11, Polynomial::zero(2)});
  Polynomial f22(2);
  f22.set_coefficient(Exponents({1, 1}), 1.0);
  const PolynomialMap f2({Polynomial::zero(2), f22});
  const SwitchedSystem sys(2, {f1, f2});
  CHECK(sys.num_modes() == 2);
  CHECK_FALSE(sys.is_linear());

  const SwitchedSystem lin = SwitchedSystem::from_matrices({{{1, 0}, {1, 0}}, {{0, 1}, {0, -1}}});
  CHECK(lin.is_linear());
  const auto mats = lin.mode_matrices();
  CHECK(mats[1][1][1] == -1.0);

  Polynomial bad(1);
  bad.set_coefficient(Exponents({0}), 1.0);
  CHECK_THROWS_AS(SwitchedSystem(1, {PolynomialMap({bad})}), Error);
}

TEST_CASE("exact rational mode") {
  Polynomial p(2);
  p.set_coefficient(Exponents({2, 0}), 0.1);
  p.set_coefficient(Exponents({0, 2}), 0.2);
  const RationalPolynomial rp = to_rational(p);
  const RationalPolynomial prod = rp * rp;
  // (0.1 x1^2 + 0.2 x2^2)^2 recovered exactly from its rational expansion.
  const Polynomial back = to_double(prod);
  CHECK(back.coefficient(Exponents({2, 2})) == doctest::Approx(2 * 0.1 * 0.2).epsilon(1e-15));
  const Rational v = rp.eval(std::vector<Rational>{Rational(1), Rational(2)});
  CHECK(v == Rational(0.1) + Rational(0.2) * 4);
}
