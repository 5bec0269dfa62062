#include "polydpg/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "polydpg/errors.hpp"

namespace polydpg {

Polygon PolygonalMesh::element_polygon(int e) const {
  Polygon poly;
  poly.v.reserve(elements[e].size());
  for (int vi : elements[e]) poly.v.push_back(vertices[vi]);
  return poly;
}

void PolygonalMesh::finalize() {
  const int ne = num_elements();
  if (static_cast<int>(material.size()) != ne) material.assign(ne, 1);
  if (materials.empty()) materials[1] = 1.0;
  edges.clear();
  elem_edges.assign(ne, {});
  elem_signs.assign(ne, {});
  std::map<std::pair<int, int>, int> edge_ids;
  for (int e = 0; e < ne; ++e) {
    const auto& loop = elements[e];
    const int n = static_cast<int>(loop.size());
    validate(element_polygon(e));
    for (int i = 0; i < n; ++i) {
      const int a = loop[i], b = loop[(i + 1) % n];
      if (a < 0 || b < 0 || a >= num_vertices() || b >= num_vertices())
        throw TopologyError("element " + std::to_string(e) + " references missing vertex");
      const bool forward = a < b;
      const std::pair<int, int> key{std::min(a, b), std::max(a, b)};
      auto it = edge_ids.find(key);
      int id;
      if (it == edge_ids.end()) {
        id = static_cast<int>(edges.size());
        edge_ids.emplace(key, id);
        edges.push_back({key.first, key.second, kBoundary, kBoundary});
      } else {
        id = it->second;
      }
      MeshEdge& ed = edges[id];
      int& slot = forward ? ed.left : ed.right;
      if (slot != kBoundary)
        throw TopologyError("edge " + std::to_string(id) + " has more than two incident elements");
      slot = e;
      elem_edges[e].push_back(id);
      elem_signs[e].push_back(forward ? 1 : 0);
    }
  }
}

namespace {

std::string format_coord(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace

void save_mesh(const PolygonalMesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open for writing: " + path);
  out << "# polydpg mesh\n";
  out << "counts " << mesh.num_vertices() << " " << mesh.num_elements() << " "
      << mesh.materials.size() << "\n";
  for (const Point& p : mesh.vertices)
    out << "v " << format_coord(p.x) << " " << format_coord(p.y) << "\n";
  for (int e = 0; e < mesh.num_elements(); ++e) {
    out << "e " << mesh.elements[e].size() << " " << mesh.material[e];
    for (int vi : mesh.elements[e]) out << " " << vi;
    out << "\n";
  }
  for (const auto& [id, k] : mesh.materials) out << "mat " << id << " " << format_coord(k) << "\n";
}

PolygonalMesh load_mesh(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open mesh file: " + path);
  PolygonalMesh mesh;
  std::string line;
  int lineno = 0;
  int nv = -1, ne = -1, nmat = -1;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ss(line);
    std::string tag;
    ss >> tag;
    if (tag == "counts") {
      if (!(ss >> nv >> ne >> nmat)) throw ParseError("bad counts header", lineno);
    } else if (tag == "v") {
      Point p;
      if (!(ss >> p.x >> p.y)) throw ParseError("bad vertex line", lineno);
      mesh.vertices.push_back(p);
    } else if (tag == "e") {
      int n = 0, mat = 0;
      if (!(ss >> n >> mat) || n < 3) throw ParseError("bad element header", lineno);
      std::vector<int> loop(n);
      for (int i = 0; i < n; ++i) {
        if (!(ss >> loop[i])) throw ParseError("element is missing vertex indices", lineno);
        if (loop[i] < 0 || (nv >= 0 && loop[i] >= nv))
          throw ParseError("element references missing vertex " + std::to_string(loop[i]), lineno);
      }
      mesh.elements.push_back(std::move(loop));
      mesh.material.push_back(mat);
    } else if (tag == "mat") {
      int id = 0;
      double k = 0.0;
      if (!(ss >> id >> k)) throw ParseError("bad material line", lineno);
      mesh.materials[id] = k;
    } else {
      throw ParseError("unknown record '" + tag + "'", lineno);
    }
  }
  if (nv >= 0 && nv != mesh.num_vertices()) throw ParseError("vertex count mismatch", lineno);
  if (ne >= 0 && ne != mesh.num_elements()) throw ParseError("element count mismatch", lineno);
  mesh.finalize();
  return mesh;
}

PolygonalMesh uniform_grid(int nx, int ny, Point lo, Point hi) {
  if (nx < 1 || ny < 1) throw Error("uniform_grid: nx, ny must be >= 1");
  PolygonalMesh mesh;
  const auto vid = [&](int i, int j) { return j * (nx + 1) + i; };
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i)
      mesh.vertices.push_back({lo.x + (hi.x - lo.x) * i / nx, lo.y + (hi.y - lo.y) * j / ny});
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
      mesh.elements.push_back({vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)});
  mesh.material.assign(mesh.num_elements(), 1);
  mesh.materials[1] = 1.0;
  mesh.finalize();
  return mesh;
}

namespace {

/// Merges vertices closer than tol; lookups check neighboring grid keys.
class VertexMerger {
 public:
  explicit VertexMerger(double tol) : tol_(tol) {}

  int add(Point p) {
    const long long kx = std::llround(p.x / tol_);
    const long long ky = std::llround(p.y / tol_);
    for (long long dx = -1; dx <= 1; ++dx) {
      for (long long dy = -1; dy <= 1; ++dy) {
        auto it = map_.find({kx + dx, ky + dy});
        if (it != map_.end() && dist(pts_[it->second], p) <= tol_) return it->second;
      }
    }
    const int id = static_cast<int>(pts_.size());
    pts_.push_back(p);
    map_[{kx, ky}] = id;
    return id;
  }

  const std::vector<Point>& points() const { return pts_; }

  void move(int id, Point p) { pts_[id] = p; }

 private:
  double tol_;
  std::map<std::pair<long long, long long>, int> map_;
  std::vector<Point> pts_;
};

std::vector<int> strip_consecutive_duplicates(const std::vector<int>& loop,
                                              const std::vector<Point>& pts, double tol) {
  std::vector<int> out;
  for (int vi : loop) {
    if (!out.empty() && dist(pts[out.back()], pts[vi]) <= tol) continue;
    out.push_back(vi);
  }
  while (out.size() > 1 && dist(pts[out.front()], pts[out.back()]) <= tol) out.pop_back();
  return out;
}

}  // namespace

PolygonalMesh distorted_tessellation(int level) {
  if (level < 0) throw Error("distorted_tessellation: level must be >= 0");
  // 4-quad pattern on the unit square; the spoke point sits close to the
  // origin corner which makes the first quad strongly concave (reflex
  // angle about 224 degrees).
  const Point C{0.15, 0.15};
  const std::vector<std::vector<Point>> pattern = {
      {{0, 0}, {0.5, 0}, C, {0, 0.5}},
      {{0.5, 0}, {1, 0}, {1, 0.5}, C},
      {{1, 0.5}, {1, 1}, {0.5, 1}, C},
      {{0.5, 1}, {0, 1}, {0, 0.5}, C},
  };
  const int tiles = 1 << level;
  const double s = 1.0 / tiles;
  PolygonalMesh mesh;
  VertexMerger merger(1e-12);
  for (int j = 0; j < tiles; ++j) {
    for (int i = 0; i < tiles; ++i) {
      for (const auto& quad : pattern) {
        std::vector<int> loop;
        for (const Point& p : quad) loop.push_back(merger.add({(i + p.x) * s, (j + p.y) * s}));
        mesh.elements.push_back(loop);
      }
    }
  }
  mesh.vertices = merger.points();
  mesh.material.assign(mesh.num_elements(), 1);
  mesh.materials[1] = 1.0;
  mesh.finalize();
  return mesh;
}

namespace {

// Signed distance to the cut line: positive right of the travel
// direction (cos theta, sin theta) through (x0, 0).
double cut_side(Point p, double x0, double theta) {
  return std::sin(theta) * (p.x - x0) - std::cos(theta) * p.y;
}

}  // namespace

PolygonalMesh interface_cut(const PolygonalMesh& grid, double x0, double theta,
                            double collapse_fraction) {
  const double domain_area = total_area(grid);
  const double cell_area = domain_area / grid.num_elements();
  const double cell_h = std::sqrt(cell_area);
  const double tol = 1e-12;

  // The line must separate the domain's corners.
  BoundingBox bb = bounding_box({grid.vertices});
  {
    int neg = 0, pos = 0;
    for (Point c : {bb.lo, Point{bb.hi.x, bb.lo.y}, bb.hi, Point{bb.lo.x, bb.hi.y}}) {
      (cut_side(c, x0, theta) < 0 ? neg : pos)++;
    }
    if (neg == 0 || pos == 0) throw InvalidCut("line does not pass through the domain");
  }

  VertexMerger merger(1e-9 * cell_h);
  PolygonalMesh out;
  auto emit = [&](const std::vector<Point>& pts, int mat) {
    if (pts.size() < 3) return;
    Polygon poly{pts};
    if (signed_area(poly) < 1e-12 * cell_area) return;
    std::vector<int> loop;
    for (const Point& p : pts) loop.push_back(merger.add(p));
    loop = strip_consecutive_duplicates(loop, merger.points(), 1e-9 * cell_h);
    if (loop.size() < 3) return;
    out.elements.push_back(loop);
    out.material.push_back(mat);
  };

  for (int e = 0; e < grid.num_elements(); ++e) {
    const Polygon poly = grid.element_polygon(e);
    const int n = poly.n();
    std::vector<double> s(n);
    bool any_neg = false, any_pos = false;
    for (int i = 0; i < n; ++i) {
      s[i] = cut_side(poly.v[i], x0, theta);
      if (s[i] < -tol * cell_h) any_neg = true;
      if (s[i] > tol * cell_h) any_pos = true;
    }
    if (!any_neg || !any_pos) {
      const int mat = cut_side(centroid(poly), x0, theta) < 0 ? 2 : 1;
      emit(poly.v, mat);
      continue;
    }
    // Split along the line (Sutherland-Hodgman against each half-plane).
    std::vector<Point> left, right;
    for (int i = 0; i < n; ++i) {
      const int j = (i + 1) % n;
      if (s[i] <= 0) left.push_back(poly.v[i]);
      if (s[i] >= 0) right.push_back(poly.v[i]);
      if ((s[i] < 0 && s[j] > 0) || (s[i] > 0 && s[j] < 0)) {
        const double t = s[i] / (s[i] - s[j]);
        const Point cut = poly.v[i] + t * (poly.v[j] - poly.v[i]);
        left.push_back(cut);
        right.push_back(cut);
      }
    }
    emit(left, 2);
    emit(right, 1);
  }
  out.vertices = merger.points();

  // Collapse sliver triangles onto the interface.
  const double area_threshold = collapse_fraction * cell_area;
  const double on_tol = 1e-9 * cell_h;
  for (int pass = 0; pass < 4; ++pass) {
    bool changed = false;
    for (size_t e = 0; e < out.elements.size(); ++e) {
      const auto& loop = out.elements[e];
      if (loop.size() != 3) continue;
      Polygon poly;
      for (int vi : loop) poly.v.push_back(out.vertices[vi]);
      const double area = signed_area(poly);
      if (area <= 0.0 || area >= area_threshold) continue;
      int off_idx = -1;
      int on_count = 0;
      for (int i = 0; i < 3; ++i) {
        if (std::abs(cut_side(poly.v[i], x0, theta)) <= on_tol)
          ++on_count;
        else
          off_idx = i;
      }
      if (on_count != 2 || off_idx < 0) continue;
      const Point c = poly.v[off_idx];
      const auto on_domain_edge = [&](Point p) {
        return std::abs(p.x - bb.lo.x) <= on_tol || std::abs(p.x - bb.hi.x) <= on_tol ||
               std::abs(p.y - bb.lo.y) <= on_tol || std::abs(p.y - bb.hi.y) <= on_tol;
      };
      const auto on_domain_corner = [&](Point p) {
        return (std::abs(p.x - bb.lo.x) <= on_tol || std::abs(p.x - bb.hi.x) <= on_tol) &&
               (std::abs(p.y - bb.lo.y) <= on_tol || std::abs(p.y - bb.hi.y) <= on_tol);
      };
      if (on_domain_corner(c)) continue;  // never move a domain corner
      Point target;
      if (on_domain_edge(c)) {
        // Keep the domain boundary straight: collapse onto the interface
        // point that lies on the same boundary edge.
        int pick = -1;
        for (int i = 0; i < 3; ++i)
          if (i != off_idx && on_domain_edge(poly.v[i])) pick = i;
        if (pick < 0) continue;
        target = poly.v[pick];
      } else {
        const Point d{std::cos(theta), std::sin(theta)};
        const Point p0{x0, 0.0};
        target = p0 + dot(c - p0, d) * d;
      }
      for (int vi : loop) merger.move(vi, target);
      out.vertices = merger.points();
      changed = true;
    }
    if (!changed) break;
    // Drop degenerate loops and duplicated vertices.
    std::vector<std::vector<int>> kept_elems;
    std::vector<int> kept_mat;
    for (size_t e = 0; e < out.elements.size(); ++e) {
      auto loop = strip_consecutive_duplicates(out.elements[e], out.vertices, on_tol);
      if (loop.size() < 3) continue;
      Polygon poly;
      for (int vi : loop) poly.v.push_back(out.vertices[vi]);
      if (signed_area(poly) <= 1e-12 * cell_area) continue;
      kept_elems.push_back(std::move(loop));
      kept_mat.push_back(out.material[e]);
    }
    out.elements = std::move(kept_elems);
    out.material = std::move(kept_mat);
  }

  out.materials = grid.materials;
  out.materials[1] = out.materials.count(1) ? out.materials[1] : 1.0;
  out.materials[2] = out.materials.count(2) ? out.materials[2] : 1.0;
  out.finalize();
  return out;
}

PolygonalMesh refine_polygonal(const PolygonalMesh& mesh, const std::vector<char>& marked) {
  if (static_cast<int>(marked.size()) != mesh.num_elements())
    throw Error("refine_polygonal: mark vector size mismatch");
  const double h = max_diameter(mesh);
  VertexMerger merger(1e-10 * h);
  for (const Point& p : mesh.vertices) merger.add(p);
  const int n_old_vertices = mesh.num_vertices();

  // Reject concave marked elements up front.
  for (int e = 0; e < mesh.num_elements(); ++e)
    if (marked[e] && !is_convex(mesh.element_polygon(e))) throw ConcaveRefineUnsupported(e);

  struct MarkedPlan {
    std::vector<int> corners;    // positions in the element loop
    std::vector<int> midpoints;  // vertex id per combined edge
    int centroid_id = -1;
  };
  std::map<int, MarkedPlan> plans;
  // New vertices inserted on original mesh edges: key (lo,hi) -> ids.
  std::map<std::pair<int, int>, std::vector<int>> edge_insertions;

  for (int e = 0; e < mesh.num_elements(); ++e) {
    if (!marked[e]) continue;
    const auto& loop = mesh.elements[e];
    const int n = static_cast<int>(loop.size());
    const Polygon poly = mesh.element_polygon(e);
    const double tol = 1e-9 * diameter(poly) * diameter(poly);
    MarkedPlan plan;
    for (int i = 0; i < n; ++i) {
      const Point a = poly.v[(i + n - 1) % n], b = poly.v[i], c = poly.v[(i + 1) % n];
      if (std::abs(cross(b - a, c - b)) > tol) plan.corners.push_back(i);
    }
    if (plan.corners.size() < 3)
      throw InvalidPolygon("marked element " + std::to_string(e) + " has fewer than 3 corners");
    const int m = static_cast<int>(plan.corners.size());
    for (int ci = 0; ci < m; ++ci) {
      const int i0 = plan.corners[ci];
      const int i1 = plan.corners[(ci + 1) % m];
      const Point mid = 0.5 * (poly.v[i0] + poly.v[i1]);
      const int before = static_cast<int>(merger.points().size());
      const int mid_id = merger.add(mid);
      plan.midpoints.push_back(mid_id);
      if (mid_id >= before || mid_id >= n_old_vertices) {
        // Genuinely new on the boundary: find the original sub-edge it
        // falls on (walk the chain from corner i0 to corner i1).
        if (mid_id >= n_old_vertices) {
          const Point dir = poly.v[i1] - poly.v[i0];
          const double len2 = dot(dir, dir);
          for (int k = i0;; k = (k + 1) % n) {
            const int k1 = (k + 1) % n;
            const double ta = dot(poly.v[k] - poly.v[i0], dir) / len2;
            const double tb = dot(poly.v[k1] - poly.v[i0], dir) / len2;
            if (ta <= 0.5 + 1e-12 && 0.5 <= tb + 1e-12 && ta < tb) {
              const std::pair<int, int> key{std::min(loop[k], loop[k1]),
                                            std::max(loop[k], loop[k1])};
              auto& list = edge_insertions[key];
              if (std::find(list.begin(), list.end(), mid_id) == list.end())
                list.push_back(mid_id);
              break;
            }
            if (k1 == i1) break;
          }
        }
      }
    }
    plan.centroid_id = merger.add(centroid(poly));
    plans[e] = std::move(plan);
  }

  const auto& pts = merger.points();
  // Expands the original edge a->b into [a, inserted...] sorted along it.
  const auto expand = [&](int a, int b) {
    std::vector<int> path{a};
    const std::pair<int, int> key{std::min(a, b), std::max(a, b)};
    auto it = edge_insertions.find(key);
    if (it != edge_insertions.end()) {
      std::vector<int> ins = it->second;
      const Point dir = pts[b] - pts[a];
      const double len2 = dot(dir, dir);
      std::sort(ins.begin(), ins.end(), [&](int u, int w) {
        return dot(pts[u] - pts[a], dir) / len2 < dot(pts[w] - pts[a], dir) / len2;
      });
      path.insert(path.end(), ins.begin(), ins.end());
    }
    return path;
  };

  PolygonalMesh out;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const auto& loop = mesh.elements[e];
    const int n = static_cast<int>(loop.size());
    // Full expanded boundary loop with every inserted vertex.
    std::vector<int> expanded;
    std::vector<int> orig_pos;  // position of loop[i] within expanded
    for (int i = 0; i < n; ++i) {
      orig_pos.push_back(static_cast<int>(expanded.size()));
      auto part = expand(loop[i], loop[(i + 1) % n]);
      expanded.insert(expanded.end(), part.begin(), part.end());
    }
    if (!marked[e]) {
      out.elements.push_back(expanded);
      out.material.push_back(mesh.material[e]);
      continue;
    }
    const MarkedPlan& plan = plans.at(e);
    const int m = static_cast<int>(plan.corners.size());
    const int ne = static_cast<int>(expanded.size());
    // Positions of the combined-edge midpoints within the expanded loop.
    std::vector<int> mid_pos(m, -1);
    for (int ci = 0; ci < m; ++ci) {
      for (int k = 0; k < ne; ++k)
        if (expanded[k] == plan.midpoints[ci]) {
          mid_pos[ci] = k;
          break;
        }
      if (mid_pos[ci] < 0)
        throw TopologyError("refinement midpoint missing from expanded boundary of element " +
                            std::to_string(e));
    }
    for (int ci = 0; ci < m; ++ci) {
      const int from = mid_pos[(ci + m - 1) % m];
      const int to = mid_pos[ci];
      std::vector<int> sub{plan.centroid_id};
      for (int k = from;; k = (k + 1) % ne) {
        sub.push_back(expanded[k]);
        if (k == to) break;
      }
      out.elements.push_back(sub);
      out.material.push_back(mesh.material[e]);
    }
  }
  out.vertices = pts;
  out.materials = mesh.materials;
  out.finalize();
  return out;
}

double max_diameter(const PolygonalMesh& mesh) {
  double h = 0.0;
  for (int e = 0; e < mesh.num_elements(); ++e) h = std::max(h, diameter(mesh.element_polygon(e)));
  return h;
}

double total_area(const PolygonalMesh& mesh) {
  double a = 0.0;
  for (int e = 0; e < mesh.num_elements(); ++e) a += signed_area(mesh.element_polygon(e));
  return a;
}

std::map<int, int> side_histogram(const PolygonalMesh& mesh) {
  std::map<int, int> hist;
  for (const auto& loop : mesh.elements) hist[static_cast<int>(loop.size())]++;
  return hist;
}

}  // namespace polydpg
