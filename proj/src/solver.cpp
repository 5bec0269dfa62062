#include "polydpg/solver.hpp"

#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <exception>

#include "polydpg/errors.hpp"
#include "polydpg/parallel.hpp"
#include "polydpg/quadrature.hpp"

namespace polydpg {

Solution solve(Assembly assembly, const DpgOptions& opt) {
  Solution sol;
  sol.opt = opt;
  sol.assembly = std::move(assembly);
  Assembly& as = sol.assembly;

  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> chol;
  chol.compute(as.A);
  if (chol.info() != Eigen::Success)
    throw NotSPD("sparse Cholesky factorization of the condensed system failed");
  sol.x = chol.solve(as.rhs);

  sol.report.n_dof = as.dofs.total;
  sol.report.n_free =
      as.dofs.total - static_cast<int>(std::count(as.dofs.fixed.begin(), as.dofs.fixed.end(), 1));
  sol.report.residual = (as.A * sol.x - as.rhs).norm() / (as.rhs.norm() + 1.0);

  // Interior recovery from the condensation artifacts.
  const int ne = static_cast<int>(as.elems.size());
  parallel_for(ne, [&](int e) {
    ElementData& ed = as.elems[e];
    const int nt = static_cast<int>(ed.gdofs.size());
    ed.trace.resize(nt);
    for (int a = 0; a < nt; ++a) ed.trace[a] = sol.x[ed.gdofs[a]];
    ed.interior = ed.Aii_llt.solve(ed.b_i - ed.A_it * ed.trace);
  });
  return sol;
}

ErrorEstimate estimate(const Solution& sol) {
  const auto& elems = sol.assembly.elems;
  ErrorEstimate est;
  est.eta2.assign(elems.size(), 0.0);
  parallel_for(static_cast<int>(elems.size()), [&](int e) {
    const ElementData& ed = elems[e];
    Eigen::VectorXd c(ed.sys.n_interior + ed.sys.n_trace);
    c << ed.interior, ed.trace;
    const Eigen::VectorXd r = ed.sys.B * c - ed.sys.load;
    const double eta2 = r.dot(Eigen::LLT<Eigen::MatrixXd>(ed.sys.G).solve(r));
    est.eta2[e] = std::max(eta2, 0.0);
  });
  for (double v : est.eta2) est.total2 += v;
  return est;
}

std::vector<char> mark(const ErrorEstimate& est, double fraction) {
  double max2 = 0.0;
  for (double v : est.eta2) max2 = std::max(max2, v);
  const double threshold2 = fraction * fraction * max2;
  std::vector<char> marked(est.eta2.size(), 0);
  for (size_t e = 0; e < est.eta2.size(); ++e) marked[e] = est.eta2[e] >= threshold2 && max2 > 0.0;
  return marked;
}

double relative_error(const PolygonalMesh& mesh, const Solution& sol,
                      const ManufacturedProblem& problem) {
  const int p = sol.opt.p;
  const int ne = mesh.num_elements();
  std::vector<double> err2(ne, 0.0), norm2(ne, 0.0);
  parallel_for(ne, [&](int e) {
    const ElementData& ed = sol.assembly.elems[e];
    const Polygon poly = mesh.element_polygon(e);
    const int degree = std::max(2 * (p + 3), 2 * p + 2);
    const QuadRule rule = (problem.quad_max_h > 0.0 && problem.quad_max_h < diameter(poly))
                              ? polygon_rule_refined(poly, degree, problem.quad_max_h)
                              : polygon_rule(poly, degree);
    const ScalarBasis U = eval_l2_triangle(ed.btri.v, p, rule.points);
    const int nu = ed.sys.n_u;
    const Eigen::VectorXd uh = U.val * ed.interior.segment(0, nu);
    const Eigen::VectorXd qxh = U.val * ed.interior.segment(nu, nu);
    const Eigen::VectorXd qyh = U.val * ed.interior.segment(2 * nu, nu);
    for (size_t i = 0; i < rule.points.size(); ++i) {
      const Point pt = rule.points[i];
      const double w = rule.weights[i];
      const double ue = problem.u(pt);
      const Point qe = problem.flux(pt);
      const Eigen::Index ii = static_cast<Eigen::Index>(i);
      const double du = ue - uh[ii];
      const double dqx = qe.x - qxh[ii];
      const double dqy = qe.y - qyh[ii];
      err2[e] += w * (du * du + dqx * dqx + dqy * dqy);
      norm2[e] += w * (ue * ue + qe.x * qe.x + qe.y * qe.y);
    }
  });
  double te = 0.0, tn = 0.0;
  for (int e = 0; e < ne; ++e) {
    te += err2[e];
    tn += norm2[e];
  }
  return std::sqrt(te / tn);
}

AdaptiveResult adaptive_loop(PolygonalMesh mesh, const ManufacturedProblem& problem,
                             const DpgOptions& opt, int steps, double mark_fraction) {
  if (steps < 1) throw ConfigError("adaptive loop needs at least one step");
  AdaptiveResult out;
  for (int s = 0; s < steps; ++s) {
    Solution sol = solve(assemble(mesh, problem, opt), opt);
    const ErrorEstimate est = estimate(sol);
    StepRecord rec;
    rec.step = s;
    rec.n_elements = mesh.num_elements();
    rec.n_dof = sol.report.n_dof;
    rec.h_max = max_diameter(mesh);
    rec.eta = std::sqrt(est.total2);
    rec.rel_error = relative_error(mesh, sol, problem);
    out.history.push_back(rec);
    if (s + 1 == steps) {
      out.mesh = std::move(mesh);
      out.solution = std::move(sol);
      break;
    }
    mesh = refine_polygonal(mesh, mark(est, mark_fraction));
  }
  return out;
}

}  // namespace polydpg
