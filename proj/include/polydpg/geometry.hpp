#ifndef POLYDPG_GEOMETRY_HPP
#define POLYDPG_GEOMETRY_HPP

#include <array>
#include <vector>

namespace polydpg {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

inline Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
inline Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
inline Point operator*(double s, Point a) { return {s * a.x, s * a.y}; }
inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
double norm(Point a);
double dist(Point a, Point b);

/// A simple polygon with counterclockwise vertex order. Consecutive
/// collinear vertices are allowed (they arise as hanging nodes).
struct Polygon {
  std::vector<Point> v;

  int n() const { return static_cast<int>(v.size()); }
};

using Triangle = std::array<Point, 3>;

/// Equilateral triangle whose incircle is the polygon's bounding circle
/// (centered at the centroid, radius = distance to the furthest vertex).
struct BoundingTriangle {
  Triangle v;
  Point center;
  double r_max = 0.0;
};

struct BoundingBox {
  Point lo;
  Point hi;
};

double signed_area(const Polygon& poly);
double triangle_area(const Triangle& tri);

/// Throws InvalidPolygon unless poly is simple, CCW and nondegenerate.
void validate(const Polygon& poly);

Point centroid(const Polygon& poly);
double diameter(const Polygon& poly);

/// True if no vertex is reflex (collinear vertices count as convex).
bool is_convex(const Polygon& poly);

BoundingTriangle bounding_triangle(const Polygon& poly);
BoundingBox bounding_box(const Polygon& poly);

/// Exact partition of the polygon into triangles. Convex polygons are
/// fanned from the centroid (edge-compatible); concave ones fall back to
/// ear clipping.
std::vector<Triangle> fan_triangulate(const Polygon& poly);

bool point_in_triangle(Point p, const Triangle& tri, double tol = 1e-12);

}  // namespace polydpg

#endif
