#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>

#include "doctest.h"
#include "polydpg/errors.hpp"
#include "polydpg/quadrature.hpp"

using namespace polydpg;

namespace {

double integrate(const QuadRule& rule, int a, int b) {
  double s = 0.0;
  for (size_t i = 0; i < rule.points.size(); ++i)
    s += rule.weights[i] * std::pow(rule.points[i].x, a) * std::pow(rule.points[i].y, b);
  return s;
}

/// Green's theorem oracle: integral of x^a y^b over the polygon equals
/// the boundary integral of x^(a+1)/(a+1) y^b dy, done edge by edge with
/// 1D Gauss rules. Independent of the 2D quadrature construction.
double greens_oracle(const Polygon& poly, int a, int b) {
  double total = 0.0;
  std::vector<double> t, w;
  gauss_legendre01(((a + 1 + b) / 2) + 2, t, w);
  const int n = poly.n();
  for (int e = 0; e < n; ++e) {
    const Point p = poly.v[e], q = poly.v[(e + 1) % n];
    const double dy = q.y - p.y;
    for (size_t i = 0; i < t.size(); ++i) {
      const double x = p.x + t[i] * (q.x - p.x);
      const double y = p.y + t[i] * (q.y - p.y);
      total += w[i] * std::pow(x, a + 1) / (a + 1) * std::pow(y, b) * dy;
    }
  }
  return total;
}

Polygon random_polygon(std::mt19937& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int n = 3 + static_cast<int>(u(rng) * 6);
  std::vector<double> ang;
  // Largest angular gap must stay below pi, otherwise the closing chord
  // can pass on the far side of the star center and the polygon
  // self-intersects.
  for (;;) {
    ang.clear();
    for (int i = 0; i < n; ++i) ang.push_back(2.0 * M_PI * u(rng));
    std::sort(ang.begin(), ang.end());
    double gap = ang.front() + 2.0 * M_PI - ang.back();
    for (int i = 1; i < n; ++i) gap = std::max(gap, ang[i] - ang[i - 1]);
    if (gap < 3.0) break;
  }
  Polygon poly;
  for (double a : ang) {
    const double r = 0.5 + 0.5 * u(rng);  // star-shaped wrt origin, may be concave
    poly.v.push_back({0.3 + r * std::cos(a), 0.4 + r * std::sin(a)});
  }
  Polygon out;
  for (const Point& p : poly.v)
    if (out.v.empty() || dist(out.v.back(), p) > 1e-2) out.v.push_back(p);
  if (out.n() < 3) out = {{{0, 0}, {1, 0}, {0, 1}}};
  return out;
}

}  // namespace

TEST_CASE("1D Gauss rules") {
  std::vector<double> t, w;
  gauss_legendre01(4, t, w);
  double s0 = 0.0, s7 = 0.0;
  for (size_t i = 0; i < t.size(); ++i) {
    s0 += w[i];
    s7 += w[i] * std::pow(t[i], 7);
  }
  CHECK(s0 == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(s7 == doctest::Approx(1.0 / 8.0).epsilon(1e-14));  // exact at 4 points
}

TEST_CASE("triangle rule exactness") {
  const Triangle ref{{{0, 0}, {1, 0}, {0, 1}}};
  auto rule = triangle_rule(ref, 3);
  CHECK(integrate(rule, 0, 0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(integrate(rule, 2, 1) == doctest::Approx(1.0 / 60.0).epsilon(1e-14));
  // Exact monomial values on the reference triangle: a! b! / (a+b+2)!.
  auto factorial = [](int n) { double f = 1; for (int i = 2; i <= n; ++i) f *= i; return f; };
  for (int deg = 0; deg <= 8; ++deg) {
    auto r = triangle_rule(ref, deg);
    for (int a = 0; a + 0 <= deg; ++a)
      for (int b = 0; a + b <= deg; ++b) {
        const double exact = factorial(a) * factorial(b) / factorial(a + b + 2);
        CHECK(integrate(r, a, b) == doctest::Approx(exact).epsilon(1e-13));
      }
  }
  // Weights positive, sum to the area; affine mapped triangle.
  const Triangle tri{{{0.2, 0.1}, {1.4, 0.5}, {0.3, 1.2}}};
  auto r2 = triangle_rule(tri, 6);
  double sum = 0.0;
  for (double w : r2.weights) {
    CHECK(w > 0.0);
    sum += w;
  }
  CHECK(sum == doctest::Approx(triangle_area(tri)).epsilon(1e-13));
  CHECK_THROWS_AS(triangle_rule({{{0, 0}, {1, 0}, {2, 0}}}, 2), InvalidPolygon);
}

TEST_CASE("rule-vs-rule consistency") {
  const Triangle tri{{{0.0, 0.0}, {1.1, 0.2}, {0.4, 0.9}}};
  for (int p = 1; p <= 4; ++p) {
    auto lo = triangle_rule(tri, 2 * p);
    auto hi = triangle_rule(tri, 2 * p + 4);
    for (int a = 0; a + 0 <= 2 * p; ++a)
      for (int b = 0; a + b <= 2 * p; ++b)
        CHECK(integrate(lo, a, b) == doctest::Approx(integrate(hi, a, b)).epsilon(1e-13));
  }
}

TEST_CASE("polygon rule matches Green's theorem oracle") {
  const Polygon square{{{0, 0}, {1, 0}, {1, 1}, {0, 1}}};
  auto r = polygon_rule(square, 4);
  CHECK(integrate(r, 0, 0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(integrate(r, 1, 0) == doctest::Approx(0.5).epsilon(1e-14));

  const Polygon lhex{{{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}}};
  auto rl = polygon_rule(lhex, 5);
  CHECK(integrate(rl, 3, 2) == doctest::Approx(greens_oracle(lhex, 3, 2)).epsilon(1e-13));

  std::mt19937 rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    const Polygon poly = random_polygon(rng);
    auto rule = polygon_rule(poly, 10);
    const double scale = std::abs(signed_area(poly));
    for (int a = 0; a + 0 <= 10; ++a)
      for (int b = 0; a + b <= 10; ++b) {
        const double oracle = greens_oracle(poly, a, b);
        CHECK(integrate(rule, a, b) ==
              doctest::Approx(oracle).epsilon(1e-12).scale(std::max(scale, std::abs(oracle))));
      }
  }
}

TEST_CASE("refined polygon rule agrees with plain rule") {
  const Polygon square{{{0, 0}, {1, 0}, {1, 1}, {0, 1}}};
  auto fine = polygon_rule_refined(square, 6, 0.2);
  CHECK(fine.points.size() > polygon_rule(square, 6).points.size());
  for (int a = 0; a <= 6; ++a)
    for (int b = 0; a + b <= 6; ++b)
      CHECK(integrate(fine, a, b) == doctest::Approx(greens_oracle(square, a, b)).epsilon(1e-12));
}

TEST_CASE("edge rules") {
  auto r = edge_rule({0, 0}, {1, 0}, 7);
  double s0 = 0, s1 = 0;
  for (size_t i = 0; i < r.points.size(); ++i) {
    s0 += r.weights[i];
    s1 += r.weights[i] * r.points[i].x;
  }
  CHECK(s0 == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(s1 == doctest::Approx(0.5).epsilon(1e-14));
  auto r2 = edge_rule({1, 2}, {4, 6}, 2);
  double len = 0;
  for (double w : r2.weights) len += w;
  CHECK(len == doctest::Approx(5.0).epsilon(1e-14));
  CHECK_THROWS_AS(edge_rule({1, 1}, {1, 1}, 2), InvalidPolygon);
}

TEST_CASE("determinism") {
  const Polygon poly{{{0, 0}, {1.3, 0.1}, {0.9, 1.2}, {0.1, 0.8}}};
  auto a = polygon_rule(poly, 7);
  auto b = polygon_rule(poly, 7);
  REQUIRE(a.points.size() == b.points.size());
  for (size_t i = 0; i < a.points.size(); ++i) {
    CHECK(a.points[i].x == b.points[i].x);
    CHECK(a.points[i].y == b.points[i].y);
    CHECK(a.weights[i] == b.weights[i]);
  }
}
