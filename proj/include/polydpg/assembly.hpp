#ifndef POLYDPG_ASSEMBLY_HPP
#define POLYDPG_ASSEMBLY_HPP

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <vector>

#include "polydpg/basis.hpp"
#include "polydpg/mesh.hpp"
#include "polydpg/problems.hpp"

namespace polydpg {

struct DpgOptions {
  int p = 2;        // trial order
  int dp = 0;       // test order enrichment; 0 = choose per element
  double eps = 1.0; // scaling of the L2 terms in the adjoint graph norm
};

/// Global numbering of the skeleton unknowns:
///   [0, nv)                               u-hat vertex values
///   nv + e*(p-1) + (k-2)                  u-hat bubble k on edge e
///   nv + ne*(p-1) + e*p + m               q-hat-n mode m on edge e
/// u-hat dofs on the Dirichlet boundary are flagged fixed; q-hat-n stays
/// free everywhere.
struct DofMap {
  int p = 1;
  int n_vertices = 0;
  int n_edges = 0;
  int total = 0;
  std::vector<char> fixed;

  int uhat_vertex(int v) const { return v; }
  int uhat_bubble(int edge, int k) const { return n_vertices + edge * (p - 1) + (k - 2); }
  int qn(int edge, int m) const { return n_vertices + n_edges * (p - 1) + edge * p + m; }
};

DofMap build_dofmap(const PolygonalMesh& mesh, int p);

/// Unreduced local DPG system on one element. Test dofs are rows of B
/// (H1 functions first, then H(div)); trial columns are interior u
/// (orthonormal polynomials of degree < p on the bounding triangle),
/// interior q (x-component pairs then y-component pairs of the same
/// polynomials), then the skeleton traces u-hat, q-hat-n.
struct LocalSystem {
  Eigen::MatrixXd G;     // test Gram (adjoint graph norm)
  Eigen::MatrixXd B;     // n_test x (n_interior + n_trace)
  Eigen::VectorXd load;  // n_test
  int n_interior = 0;
  int n_trace = 0;
  int n_u = 0;  // interior u coefficients; q uses 2*n_u
  int test_order = 0;
};

struct ElementData {
  LocalSystem sys;
  std::vector<int> gdofs;  // global dof per local trace column
  BoundingTriangle btri;
  // Static condensation artifacts (normal equations A = B^T G^-1 B).
  Eigen::LLT<Eigen::MatrixXd> Aii_llt;
  Eigen::MatrixXd A_it;
  Eigen::VectorXd b_i;
  Eigen::MatrixXd S;  // Schur complement on the trace block
  Eigen::VectorXd g;  // condensed right-hand side
  // Filled in after the global solve.
  Eigen::VectorXd trace;     // local trace coefficients
  Eigen::VectorXd interior;  // recovered interior coefficients
};

struct Assembly {
  DofMap dofs;
  std::vector<ElementData> elems;
  Eigen::SparseMatrix<double> A;
  Eigen::VectorXd rhs;
  Eigen::VectorXd dirichlet;  // full-length; nonzero only at fixed dofs
};

/// Builds the unreduced system (Gram, stiffness, load) for element e.
LocalSystem local_system(const PolygonalMesh& mesh, int e, const ManufacturedProblem& problem,
                         const DpgOptions& opt);

/// Forms the DPG normal equations from `ed.sys` and eliminates the
/// interior block; throws SingularInteriorBlock if it is not SPD.
void condense(ElementData& ed, int elem);

/// Boundary values for the fixed u-hat dofs: vertex interpolation plus
/// per-edge L2 projection onto the bubble span.
Eigen::VectorXd dirichlet_values(const PolygonalMesh& mesh, const DofMap& dofs,
                                 const ManufacturedProblem& problem);

/// Full pipeline: local systems, condensation, deterministic scatter
/// with symmetric elimination of the Dirichlet dofs.
Assembly assemble(const PolygonalMesh& mesh, const ManufacturedProblem& problem,
                  const DpgOptions& opt);

}  // namespace polydpg

#endif
