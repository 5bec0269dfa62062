#include "polydpg/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "polydpg/errors.hpp"

namespace polydpg {

double norm(Point a) { return std::sqrt(a.x * a.x + a.y * a.y); }
double dist(Point a, Point b) { return norm(a - b); }

double signed_area(const Polygon& poly) {
  double s = 0.0;
  const int n = poly.n();
  for (int i = 0; i < n; ++i) {
    const Point& a = poly.v[i];
    const Point& b = poly.v[(i + 1) % n];
    s += a.x * b.y - b.x * a.y;
  }
  return 0.5 * s;
}

double triangle_area(const Triangle& tri) {
  return 0.5 * cross(tri[1] - tri[0], tri[2] - tri[0]);
}

double diameter(const Polygon& poly) {
  double d = 0.0;
  const int n = poly.n();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) d = std::max(d, dist(poly.v[i], poly.v[j]));
  return d;
}

namespace {

bool segments_properly_intersect(Point a, Point b, Point c, Point d) {
  const double d1 = cross(b - a, c - a);
  const double d2 = cross(b - a, d - a);
  const double d3 = cross(d - c, a - c);
  const double d4 = cross(d - c, b - c);
  return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0));
}

}  // namespace

void validate(const Polygon& poly) {
  const int n = poly.n();
  if (n < 3) throw InvalidPolygon("fewer than 3 vertices");
  const double diam = diameter(poly);
  if (!(diam > 0.0)) throw InvalidPolygon("all vertices coincide");
  for (int i = 0; i < n; ++i) {
    if (dist(poly.v[i], poly.v[(i + 1) % n]) <= 1e-14 * diam)
      throw InvalidPolygon("consecutive vertices coincide at index " + std::to_string(i));
  }
  if (!(signed_area(poly) > 0.0)) throw InvalidPolygon("not counterclockwise (area <= 0)");
  // Non-adjacent edge crossings.
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (j == i || (j + 1) % n == i || (i + 1) % n == j) continue;
      if (segments_properly_intersect(poly.v[i], poly.v[(i + 1) % n], poly.v[j],
                                      poly.v[(j + 1) % n]))
        throw InvalidPolygon("self-intersection between edges " + std::to_string(i) + " and " +
                             std::to_string(j));
    }
  }
}

Point centroid(const Polygon& poly) {
  const double area = signed_area(poly);
  if (!(area > 0.0)) throw InvalidPolygon("degenerate polygon (area <= 0)");
  double cx = 0.0, cy = 0.0;
  const int n = poly.n();
  for (int i = 0; i < n; ++i) {
    const Point& a = poly.v[i];
    const Point& b = poly.v[(i + 1) % n];
    const double w = a.x * b.y - b.x * a.y;
    cx += (a.x + b.x) * w;
    cy += (a.y + b.y) * w;
  }
  return {cx / (6.0 * area), cy / (6.0 * area)};
}

bool is_convex(const Polygon& poly) {
  const int n = poly.n();
  const double d = diameter(poly);
  const double tol = 1e-12 * d * d;
  for (int i = 0; i < n; ++i) {
    const Point& a = poly.v[(i + n - 1) % n];
    const Point& b = poly.v[i];
    const Point& c = poly.v[(i + 1) % n];
    if (cross(b - a, c - b) < -tol) return false;
  }
  return true;
}

BoundingTriangle bounding_triangle(const Polygon& poly) {
  validate(poly);
  const Point c = centroid(poly);
  // Furthest vertex; ties broken by lowest index (strict > keeps the first).
  double r_max = 0.0;
  int far_idx = 0;
  for (int i = 0; i < poly.n(); ++i) {
    const double r = dist(poly.v[i], c);
    if (r > r_max) {
      r_max = r;
      far_idx = i;
    }
  }
  if (!(r_max > 0.0)) throw InvalidPolygon("all vertices coincide with centroid");
  // Unit direction to the furthest vertex; that vertex is the midpoint of
  // the tangent edge, the opposite triangle vertex sits at distance
  // 2*r_max on the other side (circumradius of an equilateral triangle is
  // twice its inradius).
  const Point d = (1.0 / r_max) * (poly.v[far_idx] - c);
  const Point t{-d.y, d.x};
  const double s = std::sqrt(3.0) * r_max;
  BoundingTriangle bt;
  bt.center = c;
  bt.r_max = r_max;
  bt.v[0] = c + r_max * d + s * t;
  bt.v[1] = c + r_max * d - s * t;
  bt.v[2] = c - 2.0 * r_max * d;
  if (triangle_area(bt.v) < 0.0) std::swap(bt.v[0], bt.v[1]);
  return bt;
}

BoundingBox bounding_box(const Polygon& poly) {
  BoundingBox bb;
  bb.lo = {std::numeric_limits<double>::max(), std::numeric_limits<double>::max()};
  bb.hi = {-std::numeric_limits<double>::max(), -std::numeric_limits<double>::max()};
  for (const Point& p : poly.v) {
    bb.lo.x = std::min(bb.lo.x, p.x);
    bb.lo.y = std::min(bb.lo.y, p.y);
    bb.hi.x = std::max(bb.hi.x, p.x);
    bb.hi.y = std::max(bb.hi.y, p.y);
  }
  return bb;
}

bool point_in_triangle(Point p, const Triangle& tri, double tol) {
  const double a = triangle_area(tri);
  const double s0 = cross(tri[1] - tri[0], p - tri[0]);
  const double s1 = cross(tri[2] - tri[1], p - tri[1]);
  const double s2 = cross(tri[0] - tri[2], p - tri[2]);
  const double eps = -tol * 2.0 * std::abs(a);
  return s0 >= eps && s1 >= eps && s2 >= eps;
}

namespace {

std::vector<Triangle> ear_clip(const Polygon& poly) {
  const int n0 = poly.n();
  const double scale2 = diameter(poly) * diameter(poly);
  std::vector<Point> pts = poly.v;
  std::vector<Triangle> tris;
  int guard = 0;
  while (pts.size() > 3) {
    const int n = static_cast<int>(pts.size());
    bool clipped = false;
    // First pass: drop exactly collinear vertices (zero-area ears).
    for (int i = 0; i < n; ++i) {
      const Point a = pts[(i + n - 1) % n], b = pts[i], c = pts[(i + 1) % n];
      if (std::abs(cross(b - a, c - b)) <= 1e-14 * scale2 && dot(b - a, c - b) > 0) {
        pts.erase(pts.begin() + i);
        clipped = true;
        break;
      }
    }
    if (clipped) continue;
    for (int i = 0; i < n && !clipped; ++i) {
      const Point a = pts[(i + n - 1) % n], b = pts[i], c = pts[(i + 1) % n];
      if (cross(b - a, c - b) <= 1e-14 * scale2) continue;  // reflex or flat
      Triangle ear{a, b, c};
      bool empty = true;
      for (int j = 0; j < n && empty; ++j) {
        if (j == i || j == (i + n - 1) % n || j == (i + 1) % n) continue;
        // Points on the ear boundary must block it too, otherwise a
        // diagonal can pass through another (reflex) vertex.
        if (point_in_triangle(pts[j], ear, 1e-12)) empty = false;
      }
      if (!empty) continue;
      tris.push_back(ear);
      pts.erase(pts.begin() + i);
      clipped = true;
    }
    if (!clipped) throw InvalidPolygon("ear clipping failed (self-intersecting input?)");
    if (++guard > 4 * n0) throw InvalidPolygon("ear clipping did not terminate");
  }
  tris.push_back(Triangle{pts[0], pts[1], pts[2]});
  return tris;
}

}  // namespace

std::vector<Triangle> fan_triangulate(const Polygon& poly) {
  validate(poly);
  if (!is_convex(poly)) return ear_clip(poly);
  const Point c = centroid(poly);
  std::vector<Triangle> tris;
  const int n = poly.n();
  tris.reserve(n);
  for (int i = 0; i < n; ++i) {
    Triangle t{c, poly.v[i], poly.v[(i + 1) % n]};
    if (triangle_area(t) > 0.0) tris.push_back(t);
  }
  return tris;
}

}  // namespace polydpg
