#include "polydpg/assembly.hpp"

#include <cmath>
#include <exception>

#include "polydpg/errors.hpp"
#include "polydpg/parallel.hpp"
#include "polydpg/quadrature.hpp"

namespace polydpg {

DofMap build_dofmap(const PolygonalMesh& mesh, int p) {
  if (p < 1) throw ConfigError("trial order p must be >= 1");
  DofMap dofs;
  dofs.p = p;
  dofs.n_vertices = mesh.num_vertices();
  dofs.n_edges = mesh.num_edges();
  dofs.total = dofs.n_vertices + dofs.n_edges * (p - 1) + dofs.n_edges * p;
  dofs.fixed.assign(dofs.total, 0);
  for (int e = 0; e < mesh.num_edges(); ++e) {
    if (!mesh.edges[e].boundary()) continue;
    dofs.fixed[dofs.uhat_vertex(mesh.edges[e].v_lo)] = 1;
    dofs.fixed[dofs.uhat_vertex(mesh.edges[e].v_hi)] = 1;
    for (int k = 2; k <= p; ++k) dofs.fixed[dofs.uhat_bubble(e, k)] = 1;
  }
  return dofs;
}

LocalSystem local_system(const PolygonalMesh& mesh, int e, const ManufacturedProblem& problem,
                         const DpgOptions& opt) {
  const Polygon poly = mesh.element_polygon(e);
  const int n = poly.n();
  const int p = opt.p;
  const double k = problem.materials.at(mesh.material[e]);
  const int r = p + (opt.dp > 0 ? opt.dp : auto_dp(n, p));
  const BoundingTriangle btri = bounding_triangle(poly);

  const QuadRule vol = polygon_rule(poly, 2 * r + 2);
  const Eigen::Map<const Eigen::VectorXd> w(vol.weights.data(),
                                            static_cast<Eigen::Index>(vol.weights.size()));
  const auto W = w.asDiagonal();

  const ScalarBasis V = eval_h1_triangle(btri.v, r, vol.points);
  const VectorBasis T = eval_hdiv_triangle(btri.v, r, vol.points);
  const ScalarBasis U = eval_l2_triangle(btri.v, p, vol.points);
  const int nv = V.count(), nt = T.count(), nu = U.count();

  LocalSystem sys;
  sys.n_u = nu;
  sys.n_interior = 3 * nu;
  sys.n_trace = n + n * (p - 1) + n * p;
  sys.test_order = r;
  const int ntest = nv + nt;
  const int ncols = sys.n_interior + sys.n_trace;

  // Adjoint graph norm Gram:
  //   |(1/k) tau - grad v|^2 + |div tau|^2 + eps^2 (|v|^2 + |tau|^2)
  const double eps2 = opt.eps * opt.eps;
  sys.G.setZero(ntest, ntest);
  sys.G.topLeftCorner(nv, nv) =
      V.dx.transpose() * W * V.dx + V.dy.transpose() * W * V.dy + eps2 * V.val.transpose() * W * V.val;
  sys.G.topRightCorner(nv, nt) =
      -(1.0 / k) * (V.dx.transpose() * W * T.x + V.dy.transpose() * W * T.y);
  sys.G.bottomLeftCorner(nt, nv) = sys.G.topRightCorner(nv, nt).transpose();
  sys.G.bottomRightCorner(nt, nt) =
      (1.0 / (k * k) + eps2) * (T.x.transpose() * W * T.x + T.y.transpose() * W * T.y) +
      T.div.transpose() * W * T.div;

  // Ultraweak bilinear form:
  //   b0 = -(q, grad v) + ((1/k) q, tau) - (u, div tau)
  sys.B.setZero(ntest, ncols);
  sys.B.block(nv, 0, nt, nu) = -T.div.transpose() * W * U.val;           // (u, div tau)
  sys.B.block(0, nu, nv, nu) = -V.dx.transpose() * W * U.val;            // q_x against grad v
  sys.B.block(0, 2 * nu, nv, nu) = -V.dy.transpose() * W * U.val;        // q_y against grad v
  sys.B.block(nv, nu, nt, nu) = (1.0 / k) * T.x.transpose() * W * U.val; // q_x against tau
  sys.B.block(nv, 2 * nu, nt, nu) = (1.0 / k) * T.y.transpose() * W * U.val;

  // Boundary pairings: <q-hat-n, v> + <u-hat, tau . n>.
  std::vector<std::vector<double>> edge_tloc(n);
  std::vector<EdgeRule> erules(n);
  std::vector<char> forward(n);
  for (int s = 0; s < n; ++s) {
    erules[s] = edge_rule(poly.v[s], poly.v[(s + 1) % n], 2 * r + 1);
    edge_tloc[s] = erules[s].t;
    forward[s] = mesh.elem_signs[e][s];
  }
  const TraceBasis uhat = eval_trace(poly, p, TraceKind::SkeletonU, edge_tloc, forward);
  const TraceBasis qhat = eval_trace(poly, p, TraceKind::SkeletonQn, edge_tloc, forward);
  const int c_uhat = sys.n_interior;
  const int c_qhat = c_uhat + uhat.count;
  for (int s = 0; s < n; ++s) {
    const Point a = poly.v[s], b = poly.v[(s + 1) % n];
    const double len = dist(a, b);
    const Point nrm{(b.y - a.y) / len, (a.x - b.x) / len};  // outward for CCW
    const ScalarBasis Ve = eval_h1_triangle(btri.v, r, erules[s].points);
    const VectorBasis Te = eval_hdiv_triangle(btri.v, r, erules[s].points);
    const int npt = static_cast<int>(erules[s].points.size());
    Eigen::VectorXd we(npt);
    for (int i = 0; i < npt; ++i) we[i] = erules[s].weights[i];
    // tau . n at the edge points.
    const Eigen::MatrixXd tn = nrm.x * Te.x + nrm.y * Te.y;
    sys.B.block(nv, c_uhat, nt, uhat.count) += tn.transpose() * we.asDiagonal() * uhat.edge_val[s];
    // q-hat-n is stored in the global edge orientation: flip the sign
    // when the element's outward normal opposes it.
    const double sgn = forward[s] ? 1.0 : -1.0;
    sys.B.block(0, c_qhat, nv, qhat.count) +=
        sgn * Ve.val.transpose() * we.asDiagonal() * qhat.edge_val[s];
  }

  // Load (r, v); sharp sources use a refined integration mesh.
  sys.load.setZero(ntest);
  if (problem.quad_max_h > 0.0 && problem.quad_max_h < diameter(poly)) {
    const QuadRule fine = polygon_rule_refined(poly, 2 * r + 2, problem.quad_max_h);
    const ScalarBasis Vf = eval_h1_triangle(btri.v, r, fine.points);
    Eigen::VectorXd fw(static_cast<Eigen::Index>(fine.points.size()));
    for (size_t i = 0; i < fine.points.size(); ++i)
      fw[static_cast<Eigen::Index>(i)] = fine.weights[i] * problem.forcing(fine.points[i]);
    sys.load.head(nv) = Vf.val.transpose() * fw;
  } else {
    Eigen::VectorXd fw(w.size());
    for (Eigen::Index i = 0; i < w.size(); ++i) fw[i] = w[i] * problem.forcing(vol.points[i]);
    sys.load.head(nv) = V.val.transpose() * fw;
  }
  return sys;
}

void condense(ElementData& ed, int elem) {
  const LocalSystem& sys = ed.sys;
  Eigen::LLT<Eigen::MatrixXd> gllt(sys.G);
  if (gllt.info() != Eigen::Success)
    throw IllConditionedBasis("test Gram matrix is not SPD on element " + std::to_string(elem));
  const Eigen::MatrixXd Wmat = gllt.solve(sys.B);
  Eigen::MatrixXd A = sys.B.transpose() * Wmat;
  A = 0.5 * (A + A.transpose()).eval();
  const Eigen::VectorXd b = Wmat.transpose() * sys.load;
  const int ni = sys.n_interior, nt = sys.n_trace;
  ed.Aii_llt.compute(A.topLeftCorner(ni, ni));
  if (ed.Aii_llt.info() != Eigen::Success)
    throw SingularInteriorBlock(elem);
  ed.A_it = A.topRightCorner(ni, nt);
  ed.b_i = b.head(ni);
  const Eigen::MatrixXd X = ed.Aii_llt.solve(ed.A_it);
  ed.S = A.bottomRightCorner(nt, nt) - ed.A_it.transpose() * X;
  ed.S = 0.5 * (ed.S + ed.S.transpose()).eval();
  ed.g = b.tail(nt) - X.transpose() * ed.b_i;
}

Eigen::VectorXd dirichlet_values(const PolygonalMesh& mesh, const DofMap& dofs,
                                 const ManufacturedProblem& problem) {
  Eigen::VectorXd d = Eigen::VectorXd::Zero(dofs.total);
  const int p = dofs.p;
  const int nb = p - 1;
  for (int e = 0; e < mesh.num_edges(); ++e) {
    const MeshEdge& ed = mesh.edges[e];
    if (!ed.boundary()) continue;
    const Point a = mesh.vertices[ed.v_lo], b = mesh.vertices[ed.v_hi];
    const double ua = problem.u(a), ub = problem.u(b);
    d[dofs.uhat_vertex(ed.v_lo)] = ua;
    d[dofs.uhat_vertex(ed.v_hi)] = ub;
    if (nb == 0) continue;
    // L2 projection (in the edge parameter) of u minus its linear
    // interpolant onto the bubble span.
    std::vector<double> t, w;
    gauss_legendre01(p + 10, t, w);
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(nb, nb);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nb);
    for (size_t q = 0; q < t.size(); ++q) {
      const Point x = a + t[q] * (b - a);
      const double res = problem.u(x) - ((1.0 - t[q]) * ua + t[q] * ub);
      for (int i = 0; i < nb; ++i) {
        const double bi = trace_bubble(i + 2, t[q]);
        rhs[i] += w[q] * res * bi;
        for (int j = 0; j < nb; ++j) M(i, j) += w[q] * bi * trace_bubble(j + 2, t[q]);
      }
    }
    const Eigen::VectorXd c = M.ldlt().solve(rhs);
    for (int i = 0; i < nb; ++i) d[dofs.uhat_bubble(e, i + 2)] = c[i];
  }
  return d;
}

Assembly assemble(const PolygonalMesh& mesh, const ManufacturedProblem& problem,
                  const DpgOptions& opt) {
  Assembly out;
  out.dofs = build_dofmap(mesh, opt.p);
  out.dirichlet = dirichlet_values(mesh, out.dofs, problem);
  const int ne = mesh.num_elements();
  out.elems.resize(ne);

  std::vector<std::exception_ptr> errors(ne);
  parallel_for(ne, [&](int e) {
    try {
      ElementData& ed = out.elems[e];
      ed.btri = bounding_triangle(mesh.element_polygon(e));
      ed.sys = local_system(mesh, e, problem, opt);
      condense(ed, e);
      const auto& loop = mesh.elements[e];
      const auto& eids = mesh.elem_edges[e];
      const int n = static_cast<int>(loop.size());
      ed.gdofs.clear();
      for (int i = 0; i < n; ++i) ed.gdofs.push_back(out.dofs.uhat_vertex(loop[i]));
      for (int i = 0; i < n; ++i)
        for (int k = 2; k <= opt.p; ++k) ed.gdofs.push_back(out.dofs.uhat_bubble(eids[i], k));
      for (int i = 0; i < n; ++i)
        for (int m = 0; m < opt.p; ++m) ed.gdofs.push_back(out.dofs.qn(eids[i], m));
    } catch (...) {
      errors[e] = std::current_exception();
    }
  });
  for (int e = 0; e < ne; ++e)
    if (errors[e]) std::rethrow_exception(errors[e]);

  const int ndof = out.dofs.total;
  out.rhs = Eigen::VectorXd::Zero(ndof);
  std::vector<Eigen::Triplet<double>> trips;
  for (int e = 0; e < ne; ++e) {
    const ElementData& ed = out.elems[e];
    const int nt = static_cast<int>(ed.gdofs.size());
    for (int a = 0; a < nt; ++a) {
      const int gi = ed.gdofs[a];
      if (out.dofs.fixed[gi]) continue;
      out.rhs[gi] += ed.g[a];
      for (int b = 0; b < nt; ++b) {
        const int gj = ed.gdofs[b];
        if (out.dofs.fixed[gj])
          out.rhs[gi] -= ed.S(a, b) * out.dirichlet[gj];
        else
          trips.emplace_back(gi, gj, ed.S(a, b));
      }
    }
  }
  for (int i = 0; i < ndof; ++i) {
    if (out.dofs.fixed[i]) {
      trips.emplace_back(i, i, 1.0);
      out.rhs[i] = out.dirichlet[i];
    }
  }
  out.A.resize(ndof, ndof);
  out.A.setFromTriplets(trips.begin(), trips.end());
  return out;
}

}  // namespace polydpg
