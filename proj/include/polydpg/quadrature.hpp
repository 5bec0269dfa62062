#ifndef POLYDPG_QUADRATURE_HPP
#define POLYDPG_QUADRATURE_HPP

#include <vector>

#include "polydpg/geometry.hpp"

namespace polydpg {

struct QuadRule {
  std::vector<Point> points;
  std::vector<double> weights;
  int degree = 0;  // exact for total polynomial degree <= degree
};

struct EdgeRule {
  std::vector<Point> points;    // physical coordinates on the segment
  std::vector<double> t;        // parameter along the segment, in [0,1]
  std::vector<double> weights;  // include the segment length
  int degree = 0;
};

/// Gauss-Legendre nodes/weights on [0,1]; cached per point count.
void gauss_legendre01(int n, std::vector<double>& nodes, std::vector<double>& weights);

/// Tensor Gauss rule collapsed onto the triangle (Duffy transform).
QuadRule triangle_rule(const Triangle& tri, int degree);

/// Concatenation of triangle rules over fan_triangulate(poly).
QuadRule polygon_rule(const Polygon& poly, int degree);

/// Like polygon_rule, but fan triangles are bisected recursively until
/// their diameter is below max_h. Used to integrate sharp non-polynomial
/// data on coarse elements.
QuadRule polygon_rule_refined(const Polygon& poly, int degree, double max_h);

EdgeRule edge_rule(Point a, Point b, int degree);

}  // namespace polydpg

#endif
