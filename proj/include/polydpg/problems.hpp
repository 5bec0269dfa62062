#ifndef POLYDPG_PROBLEMS_HPP
#define POLYDPG_PROBLEMS_HPP

#include <cmath>
#include <functional>
#include <map>
#include <string>

#include "polydpg/geometry.hpp"

namespace polydpg {

/// Manufactured problem for -div(k grad u) = r with Dirichlet data u on
/// the whole boundary. `u` and `flux` (q = -k grad u) are the exact
/// fields; the conductivity k is piecewise constant per material id.
struct ManufacturedProblem {
  std::string name;
  std::function<double(Point)> u;
  std::function<Point(Point)> flux;
  std::function<double(Point)> forcing;
  std::map<int, double> materials;
  /// Hint for integrating sharp features: refine integration cells to
  /// this diameter for load/error integrals. Zero disables.
  double quad_max_h = 0.0;
};

/// u = sin(pi x) sin(pi y) on the unit square, k = 1.
ManufacturedProblem problem_sinsin();

/// Piecewise-smooth solution across the line through (x0, 0) with
/// direction (cos theta, sin theta): in rotated coordinates
/// x' = sin(theta)(x - x0) - cos(theta) y, y' = cos(theta)(x - x0) + sin(theta) y,
///   u = k1 sin(pi x') sin(pi y')  where x' <= 0  (material 2, k = k2)
///   u = k2 sin(pi x') sin(pi y')  where x' >  0  (material 1, k = k1)
/// which makes both u and the normal flux continuous across the line.
ManufacturedProblem problem_interface(double k1 = 1.0, double k2 = 5.0, double x0 = 0.12,
                                      double theta = std::atan2(1.0, 0.65));

/// Sum of two sharp Gaussians (sigma^2 = 1e-3) centered at (0.25, 0.25)
/// and (0.75, 0.75), k = 1.
ManufacturedProblem problem_gaussians();

/// Polynomial solution u = (x + 0.5 y + 0.25)^(p-1); exactly
/// representable by the order-p trial space, so the discrete solution
/// should reproduce it to roundoff.
ManufacturedProblem problem_polynomial(int p);

ManufacturedProblem make_problem(const std::string& name, int p = 2);

}  // namespace polydpg

#endif
