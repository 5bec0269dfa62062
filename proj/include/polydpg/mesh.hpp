#ifndef POLYDPG_MESH_HPP
#define POLYDPG_MESH_HPP

#include <map>
#include <string>
#include <vector>

#include "polydpg/geometry.hpp"

namespace polydpg {

constexpr int kBoundary = -1;

/// Oriented mesh edge: direction is v_lo -> v_hi with v_lo < v_hi.
struct MeshEdge {
  int v_lo = 0;
  int v_hi = 0;
  int left = kBoundary;   // element traversing lo->hi
  int right = kBoundary;  // element traversing hi->lo

  bool boundary() const { return left == kBoundary || right == kBoundary; }
};

struct PolygonalMesh {
  std::vector<Point> vertices;
  std::vector<std::vector<int>> elements;  // CCW vertex-index loops
  std::vector<int> material;               // per element material id
  std::map<int, double> materials;         // material id -> conductivity k

  // Derived topology (rebuilt by finalize()).
  std::vector<MeshEdge> edges;
  std::vector<std::vector<int>> elem_edges;   // per element, per side: edge id
  std::vector<std::vector<char>> elem_signs;  // true = traversal agrees with lo->hi

  int num_elements() const { return static_cast<int>(elements.size()); }
  int num_vertices() const { return static_cast<int>(vertices.size()); }
  int num_edges() const { return static_cast<int>(edges.size()); }

  Polygon element_polygon(int e) const;

  /// Builds the edge table and checks all mesh invariants; throws
  /// TopologyError / InvalidPolygon on violation.
  void finalize();
};

PolygonalMesh load_mesh(const std::string& path);
void save_mesh(const PolygonalMesh& mesh, const std::string& path);

PolygonalMesh uniform_grid(int nx, int ny, Point lo = {0.0, 0.0}, Point hi = {1.0, 1.0});

/// Fixed 4-quad pattern on (0,1)^2 with one strongly concave quad, scaled
/// and tiled 2^level x 2^level.
PolygonalMesh distorted_tessellation(int level);

/// Cuts a uniform grid along the line through (x0, 0) with direction
/// (cos theta, sin theta). Elements left of the line get material 2,
/// right get material 1. Sliver triangles with area below
/// collapse_fraction times the background cell area are collapsed onto
/// the interface.
PolygonalMesh interface_cut(const PolygonalMesh& grid, double x0, double theta,
                            double collapse_fraction = 0.01);

/// Splits each marked (convex) element into quadrilaterals through its
/// centroid and combined-edge midpoints; unmarked neighbors gain the new
/// midpoints as collinear vertices.
PolygonalMesh refine_polygonal(const PolygonalMesh& mesh, const std::vector<char>& marked);

double max_diameter(const PolygonalMesh& mesh);
double total_area(const PolygonalMesh& mesh);

/// Element count per side count, e.g. {3: 10, 4: 20}.
std::map<int, int> side_histogram(const PolygonalMesh& mesh);

}  // namespace polydpg

#endif
