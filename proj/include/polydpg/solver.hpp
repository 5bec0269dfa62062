#ifndef POLYDPG_SOLVER_HPP
#define POLYDPG_SOLVER_HPP

#include <vector>

#include "polydpg/assembly.hpp"

namespace polydpg {

struct SolveReport {
  int n_dof = 0;
  int n_free = 0;
  double residual = 0.0;  // |A x - rhs| / (|rhs| + 1)
};

struct Solution {
  Assembly assembly;  // element data with trace/interior filled in
  Eigen::VectorXd x;  // global skeleton coefficients
  DpgOptions opt;
  SolveReport report;
};

/// Sparse Cholesky solve of the condensed skeleton system followed by
/// per-element interior recovery. Throws NotSPD if the factorization
/// fails.
Solution solve(Assembly assembly, const DpgOptions& opt);

struct ErrorEstimate {
  std::vector<double> eta2;  // squared residual per element
  double total2 = 0.0;
};

/// DPG residual estimator eta_K^2 = (B c - l)^T G^-1 (B c - l) using the
/// stored unreduced local systems.
ErrorEstimate estimate(const Solution& sol);

/// Bulk marking: flags elements with eta_K >= fraction * max eta.
std::vector<char> mark(const ErrorEstimate& est, double fraction = 0.25);

/// Relative error of (u, q) against the exact fields, measured in the
/// L2 x (L2)^2 group norm over the whole mesh.
double relative_error(const PolygonalMesh& mesh, const Solution& sol,
                      const ManufacturedProblem& problem);

struct StepRecord {
  int step = 0;
  int n_elements = 0;
  int n_dof = 0;
  double h_max = 0.0;
  double eta = 0.0;
  double rel_error = 0.0;
};

struct AdaptiveResult {
  PolygonalMesh mesh;  // final mesh
  Solution solution;   // solution on the final mesh
  std::vector<StepRecord> history;
};

/// Runs `steps` solve / estimate / mark / refine cycles (the last step
/// does not refine).
AdaptiveResult adaptive_loop(PolygonalMesh mesh, const ManufacturedProblem& problem,
                             const DpgOptions& opt, int steps, double mark_fraction = 0.25);

}  // namespace polydpg

#endif
