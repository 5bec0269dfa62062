#include "polydpg/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>

#include "polydpg/errors.hpp"

namespace polydpg {

namespace {

// Newton iteration on the Legendre polynomial, nodes on [-1,1].
void gauss_legendre_impl(int n, std::vector<double>& x, std::vector<double>& w) {
  x.resize(n);
  w.resize(n);
  for (int i = 0; i < n; ++i) {
    double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    x[i] = z;
    w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
  }
}

std::mutex g_cache_mutex;
std::map<int, std::pair<std::vector<double>, std::vector<double>>> g_gauss01_cache;

}  // namespace

void gauss_legendre01(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  if (n < 1) throw Error("gauss rule needs at least one point");
  {
    std::lock_guard<std::mutex> lock(g_cache_mutex);
    auto it = g_gauss01_cache.find(n);
    if (it != g_gauss01_cache.end()) {
      nodes = it->second.first;
      weights = it->second.second;
      return;
    }
  }
  std::vector<double> x, w;
  gauss_legendre_impl(n, x, w);
  nodes.resize(n);
  weights.resize(n);
  for (int i = 0; i < n; ++i) {
    nodes[i] = 0.5 * (x[i] + 1.0);
    weights[i] = 0.5 * w[i];
  }
  std::lock_guard<std::mutex> lock(g_cache_mutex);
  g_gauss01_cache.emplace(n, std::make_pair(nodes, weights));
}

QuadRule triangle_rule(const Triangle& tri, int degree) {
  if (degree < 0) degree = 0;
  const double area2 = 2.0 * triangle_area(tri);
  if (!(std::abs(area2) > 0.0)) throw InvalidPolygon("degenerate triangle in quadrature");
  // Duffy map from the unit square: (u,v) -> (u, v(1-u)); the Jacobian
  // (1-u) raises the u-degree by one, so take one extra point there.
  const int nu = degree / 2 + 2;
  const int nv = degree / 2 + 1;
  std::vector<double> xu, wu, xv, wv;
  gauss_legendre01(nu, xu, wu);
  gauss_legendre01(nv, xv, wv);
  QuadRule rule;
  rule.degree = degree;
  rule.points.reserve(nu * nv);
  rule.weights.reserve(nu * nv);
  for (int i = 0; i < nu; ++i) {
    for (int j = 0; j < nv; ++j) {
      const double a = xu[i];
      const double b = xv[j] * (1.0 - xu[i]);
      // Reference triangle (0,0),(1,0),(0,1) mapped affinely to tri.
      Point p = tri[0] + a * (tri[1] - tri[0]) + b * (tri[2] - tri[0]);
      rule.points.push_back(p);
      rule.weights.push_back(wu[i] * wv[j] * (1.0 - xu[i]) * area2);
    }
  }
  return rule;
}

QuadRule polygon_rule(const Polygon& poly, int degree) {
  QuadRule rule;
  rule.degree = degree;
  for (const Triangle& tri : fan_triangulate(poly)) {
    QuadRule tr = triangle_rule(tri, degree);
    rule.points.insert(rule.points.end(), tr.points.begin(), tr.points.end());
    rule.weights.insert(rule.weights.end(), tr.weights.begin(), tr.weights.end());
  }
  return rule;
}

namespace {

double tri_diam(const Triangle& t) {
  return std::max({dist(t[0], t[1]), dist(t[1], t[2]), dist(t[2], t[0])});
}

void refine_tri(const Triangle& t, double max_h, std::vector<Triangle>& out, int depth) {
  if (tri_diam(t) <= max_h || depth > 12) {
    out.push_back(t);
    return;
  }
  const Point m01 = 0.5 * (t[0] + t[1]);
  const Point m12 = 0.5 * (t[1] + t[2]);
  const Point m20 = 0.5 * (t[2] + t[0]);
  refine_tri({t[0], m01, m20}, max_h, out, depth + 1);
  refine_tri({m01, t[1], m12}, max_h, out, depth + 1);
  refine_tri({m20, m12, t[2]}, max_h, out, depth + 1);
  refine_tri({m01, m12, m20}, max_h, out, depth + 1);
}

}  // namespace

QuadRule polygon_rule_refined(const Polygon& poly, int degree, double max_h) {
  QuadRule rule;
  rule.degree = degree;
  std::vector<Triangle> tris;
  for (const Triangle& tri : fan_triangulate(poly)) refine_tri(tri, max_h, tris, 0);
  for (const Triangle& tri : tris) {
    QuadRule tr = triangle_rule(tri, degree);
    rule.points.insert(rule.points.end(), tr.points.begin(), tr.points.end());
    rule.weights.insert(rule.weights.end(), tr.weights.begin(), tr.weights.end());
  }
  return rule;
}

EdgeRule edge_rule(Point a, Point b, int degree) {
  const double len = dist(a, b);
  if (!(len > 0.0)) throw InvalidPolygon("zero-length edge in quadrature");
  const int n = degree / 2 + 1;
  std::vector<double> x, w;
  gauss_legendre01(n, x, w);
  EdgeRule rule;
  rule.degree = degree;
  rule.points.resize(n);
  rule.t = x;
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    rule.points[i] = a + x[i] * (b - a);
    rule.weights[i] = w[i] * len;
  }
  return rule;
}

}  // namespace polydpg
