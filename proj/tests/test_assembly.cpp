#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>

#include "doctest.h"
#include "polydpg/assembly.hpp"
#include "polydpg/errors.hpp"
#include "polydpg/solver.hpp"

using namespace polydpg;

namespace {

PolygonalMesh single_element(std::vector<Point> pts) {
  PolygonalMesh m;
  m.vertices = std::move(pts);
  m.elements = {{}};
  for (size_t i = 0; i < m.vertices.size(); ++i) m.elements[0].push_back(static_cast<int>(i));
  m.material = {1};
  m.materials = {{1, 1.0}};
  m.finalize();
  return m;
}

/// Independent evaluation of the DPG bilinear form
///   b(U, V) = -(q, grad v) + ((1/k) q, tau) - (u, div tau)
///           + <q_n-hat, v> + <u-hat, tau . n>
/// and of the adjoint-graph-norm inner product, by direct quadrature
/// with the same basis conventions the assembler documents.
struct FormOracle {
  Polygon poly;
  BoundingTriangle btri;
  QuadRule vol;
  ScalarBasis h1, l2;
  VectorBasis hdiv;
  int p, r, n_u;
  double k;

  FormOracle(const PolygonalMesh& mesh, int e, int p_, int r_, double k_)
      : poly(mesh.element_polygon(e)), btri(bounding_triangle(poly)),
        vol(polygon_rule(poly, 2 * r_ + 2)), p(p_), r(r_), k(k_) {
    h1 = eval_h1_triangle(btri.v, r, vol.points);
    hdiv = eval_hdiv_triangle(btri.v, r, vol.points);
    l2 = eval_l2_triangle(btri.v, p, vol.points);
    n_u = p * (p + 1) / 2;
  }

  // Test vector V = (v, tau) from stacked coefficients [cv; ctau].
  // Trial vector U from [cu; cqx; cqy; c_uhat; c_qhat].
  double bilinear(const PolygonalMesh& mesh, int e, const Eigen::VectorXd& ct,
                  const Eigen::VectorXd& cu_full) const {
    const int nh = h1.count(), nd = hdiv.count();
    const Eigen::VectorXd cv = ct.head(nh), ctau = ct.tail(nd);
    const Eigen::VectorXd cu = cu_full.segment(0, n_u);
    const Eigen::VectorXd cqx = cu_full.segment(n_u, n_u);
    const Eigen::VectorXd cqy = cu_full.segment(2 * n_u, n_u);
    double s = 0.0;
    for (size_t i = 0; i < vol.points.size(); ++i) {
      const double w = vol.weights[i];
      const double u = l2.val.row(i).dot(cu);
      const double qx = l2.val.row(i).dot(cqx), qy = l2.val.row(i).dot(cqy);
      const double vdx = h1.dx.row(i).dot(cv), vdy = h1.dy.row(i).dot(cv);
      const double tx = hdiv.x.row(i).dot(ctau), ty = hdiv.y.row(i).dot(ctau);
      const double tdiv = hdiv.div.row(i).dot(ctau);
      s += w * (-(qx * vdx + qy * vdy) + (qx * tx + qy * ty) / k - u * tdiv);
    }
    // Boundary pairings via edge quadrature in the global parameter.
    const int n = poly.n();
    const int n_uhat = n + n * (p - 1), n_qhat = n * p;
    const Eigen::VectorXd cuh = cu_full.segment(3 * n_u, n_uhat);
    const Eigen::VectorXd cqh = cu_full.segment(3 * n_u + n_uhat, n_qhat);
    std::vector<double> tq, wq;
    gauss_legendre01(r + p + 2, tq, wq);
    std::vector<std::vector<double>> tloc(n, tq);
    std::vector<char> fwd(n);
    for (int s2 = 0; s2 < n; ++s2) fwd[s2] = mesh.elem_signs[e][s2];
    const TraceBasis tu = eval_trace(poly, p, TraceKind::SkeletonU, tloc, fwd);
    const TraceBasis tqn = eval_trace(poly, p, TraceKind::SkeletonQn, tloc, fwd);
    for (int s2 = 0; s2 < n; ++s2) {
      const Point a = poly.v[s2], b = poly.v[(s2 + 1) % n];
      const double len = dist(a, b);
      const Point nrm{(b.y - a.y) / len, (a.x - b.x) / len};  // outward for CCW
      const double sgn = fwd[s2] ? 1.0 : -1.0;
      for (size_t i = 0; i < tq.size(); ++i) {
        const Point pt{a.x + tq[i] * (b.x - a.x), a.y + tq[i] * (b.y - a.y)};
        std::vector<Point> one{pt};
        const ScalarBasis vv = eval_h1_triangle(btri.v, r, one);
        const VectorBasis tt = eval_hdiv_triangle(btri.v, r, one);
        const double v = vv.val.row(0).dot(cv);
        const double taun = nrm.x * (tt.x.row(0).dot(ctau)) + nrm.y * (tt.y.row(0).dot(ctau));
        const double uhat = tu.edge_val[s2].row(i).dot(cuh);
        const double qhat = tqn.edge_val[s2].row(i).dot(cqh);
        s += wq[i] * len * (sgn * qhat * v + uhat * taun);
      }
    }
    return s;
  }

  double gram(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double eps) const {
    const int nh = h1.count(), nd = hdiv.count();
    const Eigen::VectorXd av = a.head(nh), at = a.tail(nd);
    const Eigen::VectorXd bv = b.head(nh), bt = b.tail(nd);
    double s = 0.0;
    for (size_t i = 0; i < vol.points.size(); ++i) {
      const double w = vol.weights[i];
      // (1/k tau - grad v, .) + (div tau, .) + eps^2 ((v, .) + (tau, .))
      const double ax = (hdiv.x.row(i).dot(at)) / k - h1.dx.row(i).dot(av);
      const double ay = (hdiv.y.row(i).dot(at)) / k - h1.dy.row(i).dot(av);
      const double bx = (hdiv.x.row(i).dot(bt)) / k - h1.dx.row(i).dot(bv);
      const double by = (hdiv.y.row(i).dot(bt)) / k - h1.dy.row(i).dot(bv);
      s += w * (ax * bx + ay * by);
      s += w * (hdiv.div.row(i).dot(at)) * (hdiv.div.row(i).dot(bt));
      s += w * eps * eps *
           ((h1.val.row(i).dot(av)) * (h1.val.row(i).dot(bv)) +
            (hdiv.x.row(i).dot(at)) * (hdiv.x.row(i).dot(bt)) +
            (hdiv.y.row(i).dot(at)) * (hdiv.y.row(i).dot(bt)));
    }
    return s;
  }
};

}  // namespace

TEST_CASE("dofmap layout and counts") {
  PolygonalMesh m = uniform_grid(2, 1);  // 6 vertices, 7 edges
  for (int p = 1; p <= 3; ++p) {
    DofMap d = build_dofmap(m, p);
    CHECK(d.total == 6 + 7 * (p - 1) + 7 * p);
    // All vertices and 6 of 7 edges are on the boundary.
    int fixed = 0;
    for (char f : d.fixed) fixed += f;
    CHECK(fixed == 6 + 6 * (p - 1));
    // q-hat dofs are never fixed.
    for (int e = 0; e < 7; ++e)
      for (int mo = 0; mo < p; ++mo) CHECK_FALSE(d.fixed[d.qn(e, mo)]);
  }
}

TEST_CASE("local Gram matrix: SPD, oracle agreement, constant entry") {
  PolygonalMesh sq = single_element({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
  const ManufacturedProblem prob = problem_polynomial(1);
  for (double eps : {1.0, 0.5}) {
    DpgOptions opt;
    opt.p = 1;
    opt.eps = eps;
    LocalSystem sys = local_system(sq, 0, prob, opt);
    const int r = sys.test_order;
    const int nh = (r + 1) * (r + 2) / 2, nd = r * (r + 2);
    REQUIRE(sys.G.rows() == nh + nd);
    CHECK((sys.G - sys.G.transpose()).cwiseAbs().maxCoeff() < 1e-12 * sys.G.cwiseAbs().maxCoeff());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sys.G);
    CHECK(es.eigenvalues().minCoeff() > 0.0);
    // Quadratic form for v = 1, tau = 0 is eps^2 * area: the constant is
    // the sum of the three vertex functions.
    Eigen::VectorXd c1 = Eigen::VectorXd::Zero(nh + nd);
    c1(0) = c1(1) = c1(2) = 1.0;
    CHECK(c1.dot(sys.G * c1) == doctest::Approx(eps * eps * 1.0).epsilon(1e-12));
    // Random-vector oracle agreement.
    FormOracle oracle(sq, 0, opt.p, r, 1.0);
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 5; ++trial) {
      Eigen::VectorXd a = Eigen::VectorXd::NullaryExpr(nh + nd, [&] { return u(rng); });
      Eigen::VectorXd b = Eigen::VectorXd::NullaryExpr(nh + nd, [&] { return u(rng); });
      const double via_G = a.dot(sys.G * b);
      CHECK(via_G == doctest::Approx(oracle.gram(a, b, eps)).epsilon(1e-10).scale(1.0));
    }
  }
}

TEST_CASE("local stiffness matches the bilinear-form oracle") {
  // A convex quad, a concave quad, and a pentagon; k = 1 and k = 5.
  std::vector<std::vector<Point>> shapes{
      {{0, 0}, {1, 0}, {1, 1}, {0, 1}},
      {{0, 0}, {0.5, 0}, {0.15, 0.15}, {0, 0.5}},
      {{0, 0}, {1, 0}, {1.3, 0.8}, {0.5, 1.3}, {-0.2, 0.6}}};
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> un(-1.0, 1.0);
  for (size_t si = 0; si < shapes.size(); ++si) {
    PolygonalMesh m = single_element(shapes[si]);
    const double k = si == 2 ? 5.0 : 1.0;
    ManufacturedProblem prob = problem_polynomial(2);
    prob.materials[1] = k;
    for (int p = 1; p <= 2; ++p) {
      DpgOptions opt;
      opt.p = p;
      LocalSystem sys = local_system(m, 0, prob, opt);
      const int r = sys.test_order;
      REQUIRE(r == p + auto_dp(m.elements[0].size(), p));
      const int n_test = (r + 1) * (r + 2) / 2 + r * (r + 2);
      REQUIRE(sys.B.rows() == n_test);
      REQUIRE(sys.B.cols() == sys.n_interior + sys.n_trace);
      FormOracle oracle(m, 0, p, r, k);
      for (int trial = 0; trial < 4; ++trial) {
        Eigen::VectorXd ct = Eigen::VectorXd::NullaryExpr(n_test, [&] { return un(rng); });
        Eigen::VectorXd cu =
            Eigen::VectorXd::NullaryExpr(sys.B.cols(), [&] { return un(rng); });
        const double via_B = ct.dot(sys.B * cu);
        const double direct = oracle.bilinear(m, 0, ct, cu);
        CHECK(via_B == doctest::Approx(direct).epsilon(1e-9).scale(1.0 + std::abs(direct)));
      }
    }
  }
}

TEST_CASE("stiffness block structure for constant test functions") {
  PolygonalMesh sq = single_element({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
  DpgOptions opt;
  opt.p = 2;
  LocalSystem sys = local_system(sq, 0, problem_polynomial(2), opt);
  const int nh = (sys.test_order + 1) * (sys.test_order + 2) / 2;
  Eigen::VectorXd cv = Eigen::VectorXd::Zero(sys.B.rows());
  cv(0) = cv(1) = cv(2) = 1.0;  // v = 1, tau = 0
  const Eigen::VectorXd row = sys.B.transpose() * cv;
  const int n_uhat = 4 + 4 * (opt.p - 1);
  // u and q interior columns vanish (grad v = 0, no tau).
  for (int j = 0; j < sys.n_interior; ++j) CHECK(std::abs(row(j)) < 1e-12);
  // u-hat columns vanish (tau . n = 0).
  for (int j = 0; j < n_uhat; ++j) CHECK(std::abs(row(sys.n_interior + j)) < 1e-12);
  // q-hat columns: signed edge integrals; mode 0 integrates to sgn*len,
  // higher Legendre modes to 0.
  for (int e = 0; e < 4; ++e) {
    const double sgn = sq.elem_signs[0][e] ? 1.0 : -1.0;
    const int base = sys.n_interior + n_uhat + e * opt.p;
    CHECK(row(base) == doctest::Approx(sgn * 1.0).epsilon(1e-12));
    CHECK(std::abs(row(base + 1)) < 1e-12);
  }
  // Load vanishes for zero forcing (harmonic polynomial problem).
  CHECK(sys.load.cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("load vector matches quadrature oracle") {
  PolygonalMesh sq = single_element({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
  const ManufacturedProblem prob = problem_sinsin();
  DpgOptions opt;
  opt.p = 2;
  LocalSystem sys = local_system(sq, 0, prob, opt);
  const int r = sys.test_order;
  auto rule = polygon_rule(sq.element_polygon(0), 2 * r + 8);
  ScalarBasis h1 = eval_h1_triangle(bounding_triangle(sq.element_polygon(0)).v, r, rule.points);
  for (int j = 0; j < h1.count(); ++j) {
    double s = 0.0;
    for (size_t i = 0; i < rule.points.size(); ++i)
      s += rule.weights[i] * prob.forcing(rule.points[i]) * h1.val(i, j);
    CHECK(sys.load(j) == doctest::Approx(s).epsilon(1e-6).scale(1.0));
  }
  // H(div) rows carry no load.
  for (int j = h1.count(); j < sys.load.size(); ++j) CHECK(sys.load(j) == 0.0);
}

TEST_CASE("condensation: normal equations symmetric, Schur PSD with constant kernel") {
  PolygonalMesh sq = single_element({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
  ElementData ed;
  DpgOptions opt;
  opt.p = 1;
  ed.sys = local_system(sq, 0, problem_polynomial(1), opt);
  ed.btri = bounding_triangle(sq.element_polygon(0));
  condense(ed, 0);
  // B^nopt = B^T G^-1 B symmetry via its blocks.
  Eigen::LLT<Eigen::MatrixXd> gllt(ed.sys.G);
  const Eigen::MatrixXd Bn = ed.sys.B.transpose() * gllt.solve(ed.sys.B);
  CHECK((Bn - Bn.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * Bn.cwiseAbs().maxCoeff());
  // Schur complement: PSD, exactly one (near) zero eigenvalue whose
  // eigenvector is constant u-hat with zero q-hat.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(ed.sys.n_trace == ed.S.rows()
                                                        ? ed.S
                                                        : Eigen::MatrixXd(ed.S));
  const double scale = es.eigenvalues().maxCoeff();
  CHECK(es.eigenvalues().minCoeff() > -1e-12 * scale);
  CHECK(es.eigenvalues()(0) < 1e-12 * scale);
  CHECK(es.eigenvalues()(1) > 1e-8 * scale);
  Eigen::VectorXd kervec = Eigen::VectorXd::Zero(ed.S.rows());
  for (int v = 0; v < 4; ++v) kervec(v) = 0.5;  // constant u-hat (p=1: vertices only)
  CHECK((ed.S * kervec).norm() < 1e-11 * scale);
}

TEST_CASE("dirichlet values: zero, linear, and projection orthogonality") {
  PolygonalMesh sq = single_element({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
  ManufacturedProblem zero;
  zero.u = [](Point) { return 0.0; };
  zero.materials = {{1, 1.0}};
  DofMap d3 = build_dofmap(sq, 3);
  CHECK(dirichlet_values(sq, d3, zero).cwiseAbs().maxCoeff() == 0.0);

  // Linear g reproduced exactly: bubbles vanish, vertices interpolate.
  ManufacturedProblem lin = zero;
  lin.u = [](Point p) { return 1.0 + 2.0 * p.x - 0.5 * p.y; };
  Eigen::VectorXd dv = dirichlet_values(sq, d3, lin);
  for (int v = 0; v < 4; ++v)
    CHECK(dv(d3.uhat_vertex(v)) == doctest::Approx(lin.u(sq.vertices[v])).epsilon(1e-13));
  for (int e = 0; e < 4; ++e)
    for (int k = 2; k <= 3; ++k) CHECK(std::abs(dv(d3.uhat_bubble(e, k))) < 1e-12);

  // g = sin(pi t) on the bottom edge, p = 3: the projection residual is
  // orthogonal to the bubble span (1D quadrature oracle).
  ManufacturedProblem sine = zero;
  sine.u = [](Point p) { return std::sin(M_PI * p.x); };
  Eigen::VectorXd ds = dirichlet_values(sq, d3, sine);
  int bottom = -1;
  for (int e = 0; e < sq.num_edges(); ++e)
    if (sq.vertices[sq.edges[e].v_lo].y == 0.0 && sq.vertices[sq.edges[e].v_hi].y == 0.0)
      bottom = e;
  REQUIRE(bottom >= 0);
  std::vector<double> t, w;
  gauss_legendre01(16, t, w);
  for (int j = 2; j <= 3; ++j) {
    double ip = 0.0;
    for (size_t i = 0; i < t.size(); ++i) {
      double res = std::sin(M_PI * t[i]);  // vertex interpolant is 0 here
      for (int k = 2; k <= 3; ++k) res -= ds(d3.uhat_bubble(bottom, k)) * trace_bubble(k, t[i]);
      ip += w[i] * res * trace_bubble(j, t[i]);
    }
    CHECK(std::abs(ip) < 1e-12);
  }
}

TEST_CASE("assemble: single element leaves only q-hat free and is SPD") {
  PolygonalMesh sq = single_element({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
  DpgOptions opt;
  opt.p = 2;
  Assembly asem = assemble(sq, problem_sinsin(), opt);
  int free = 0;
  for (char f : asem.dofs.fixed) free += !f;
  CHECK(free == 4 * opt.p);  // all u-hat dofs are on the boundary
  Solution sol = solve(std::move(asem), opt);
  CHECK(sol.report.residual < 1e-10);
}

TEST_CASE("orientation-flip invariance") {
  // Relabel two vertices so the interior edge of a 2x1 grid flips its
  // global direction; all recovered fields must be unchanged.
  PolygonalMesh a = uniform_grid(2, 1);
  int mid_lo = -1, mid_hi = -1;
  for (const MeshEdge& e : a.edges)
    if (!e.boundary()) {
      mid_lo = e.v_lo;
      mid_hi = e.v_hi;
    }
  REQUIRE(mid_lo >= 0);
  PolygonalMesh b;
  b.vertices = a.vertices;
  std::swap(b.vertices[mid_lo], b.vertices[mid_hi]);
  for (const auto& elem : a.elements) {
    std::vector<int> remapped;
    for (int v : elem)
      remapped.push_back(v == mid_lo ? mid_hi : (v == mid_hi ? mid_lo : v));
    b.elements.push_back(remapped);
  }
  b.material = a.material;
  b.materials = a.materials;
  b.finalize();
  // The flip must actually have happened.
  bool flipped = false;
  for (size_t s = 0; s < a.elem_edges[0].size(); ++s) {
    const MeshEdge& ea = a.edges[a.elem_edges[0][s]];
    if (!ea.boundary()) {
      const MeshEdge& eb = b.edges[b.elem_edges[0][s]];
      flipped = (a.elem_signs[0][s] != b.elem_signs[0][s]);
      CHECK(dist(a.vertices[ea.v_lo], b.vertices[eb.v_hi]) < 1e-15);
    }
  }
  CHECK(flipped);
  const ManufacturedProblem prob = problem_sinsin();
  DpgOptions opt;
  opt.p = 2;
  Solution sa = solve(assemble(a, prob, opt), opt);
  Solution sb = solve(assemble(b, prob, opt), opt);
  for (int e = 0; e < 2; ++e) {
    const Eigen::VectorXd& ia = sa.assembly.elems[e].interior;
    const Eigen::VectorXd& ib = sb.assembly.elems[e].interior;
    CHECK((ia - ib).cwiseAbs().maxCoeff() < 1e-12 * (1.0 + ia.cwiseAbs().maxCoeff()));
  }
  CHECK(relative_error(a, sa, prob) ==
        doctest::Approx(relative_error(b, sb, prob)).epsilon(1e-12));
}

TEST_CASE("assemble is deterministic") {
  PolygonalMesh m = uniform_grid(3, 3);
  DpgOptions opt;
  opt.p = 2;
  Assembly a1 = assemble(m, problem_sinsin(), opt);
  Assembly a2 = assemble(m, problem_sinsin(), opt);
  CHECK((a1.rhs - a2.rhs).cwiseAbs().maxCoeff() == 0.0);
  Eigen::SparseMatrix<double> diff = a1.A - a2.A;
  CHECK(diff.coeffs().cwiseAbs().maxCoeff() == 0.0);
}
