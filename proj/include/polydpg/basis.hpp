#ifndef POLYDPG_BASIS_HPP
#define POLYDPG_BASIS_HPP

#include <Eigen/Dense>
#include <vector>

#include "polydpg/geometry.hpp"
#include "polydpg/quadrature.hpp"

namespace polydpg {

/// Scalar shape functions evaluated at a point set; one column per
/// function, one row per point.
struct ScalarBasis {
  Eigen::MatrixXd val, dx, dy;

  int count() const { return static_cast<int>(val.cols()); }
};

/// Vector-valued (H(div)) shape functions with divergences.
struct VectorBasis {
  Eigen::MatrixXd x, y, div;

  int count() const { return static_cast<int>(x.cols()); }
};

/// Hierarchical H1 family on a physical triangle: 3 barycentric vertex
/// functions, 3(q-1) edge functions (Legendre-weighted edge bubbles) and
/// (q-1)(q-2)/2 interior bubbles; spans P^q.
ScalarBasis eval_h1_triangle(const Triangle& tri, int order, const std::vector<Point>& pts);

/// Orthonormal (on the triangle) polynomials of total degree <= order-1.
ScalarBasis eval_l2_triangle(const Triangle& tri, int order, const std::vector<Point>& pts);

/// Raviart-Thomas family RT^q = (P^{q-1})^2 + x P^{q-1} built from the
/// orthonormal scalar polynomials.
VectorBasis eval_hdiv_triangle(const Triangle& tri, int order, const std::vector<Point>& pts);

enum class SequenceKind { H1, Hdiv, L2 };

/// Tensor-product sequence on a bounding box: Q^{q,q} -> Q^{q,q-1} x
/// Q^{q-1,q} -> Q^{q-1,q-1}.
struct BoxBasis {
  ScalarBasis h1;   // filled for SequenceKind::H1
  VectorBasis hdiv; // filled for SequenceKind::Hdiv
  ScalarBasis l2;   // filled for SequenceKind::L2
};
BoxBasis eval_box_sequence(const BoundingBox& box, int order, const std::vector<Point>& pts,
                           SequenceKind kind);

enum class TraceKind { SkeletonU, SkeletonQn };

/// Skeleton shape functions on the boundary of a polygon, evaluated at
/// per-edge parameter points. Edge-interior functions are parametrized by
/// the *global* edge direction so that both incident elements see the
/// same function; `edge_forward[e]` says whether the element's CCW
/// traversal of edge e agrees with the global direction.
///
/// DOF order for SkeletonU: n vertex functions (by vertex index), then
/// p-1 bubbles per edge. For SkeletonQn: p functions per edge.
struct TraceBasis {
  int count = 0;
  std::vector<Eigen::MatrixXd> edge_val;  // per edge: npts_e x count
};
TraceBasis eval_trace(const Polygon& poly, int order, TraceKind kind,
                      const std::vector<std::vector<double>>& edge_tloc,
                      const std::vector<char>& edge_forward);

/// 1D building blocks of the trace spaces, in the global edge parameter.
double trace_bubble(int k, double t);   // k = 2..p, vanishes at t=0,1
double trace_qn(int m, double t);       // Legendre P_m(2t-1)

int dim_trial(int n_sides, int p);
int dim_test(int p, int dp);
/// Smallest dp >= 1 with dim_test(p,dp) > dim_trial(n_sides,p).
int auto_dp(int n_sides, int p);

/// Condition number of the H1 mass matrix restricted to the polygon;
/// throws IllConditionedBasis above 1e14.
double h1_mass_condition(const Triangle& tri, int order, const Polygon& poly);

}  // namespace polydpg

#endif
