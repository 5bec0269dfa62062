#include "polydpg/problems.hpp"

#include <array>
#include <cmath>

#include "polydpg/errors.hpp"

namespace polydpg {

ManufacturedProblem problem_sinsin() {
  ManufacturedProblem pb;
  pb.name = "sinsin";
  pb.materials = {{1, 1.0}};
  pb.u = [](Point p) { return std::sin(M_PI * p.x) * std::sin(M_PI * p.y); };
  pb.flux = [](Point p) {
    return Point{-M_PI * std::cos(M_PI * p.x) * std::sin(M_PI * p.y),
                 -M_PI * std::sin(M_PI * p.x) * std::cos(M_PI * p.y)};
  };
  pb.forcing = [](Point p) {
    return 2.0 * M_PI * M_PI * std::sin(M_PI * p.x) * std::sin(M_PI * p.y);
  };
  return pb;
}

ManufacturedProblem problem_interface(double k1, double k2, double x0, double theta) {
  ManufacturedProblem pb;
  pb.name = "interface";
  pb.materials = {{1, k1}, {2, k2}};
  const double st = std::sin(theta), ct = std::cos(theta);
  const auto rot = [st, ct, x0](Point p) {
    return Point{st * (p.x - x0) - ct * p.y, ct * (p.x - x0) + st * p.y};
  };
  pb.u = [rot, k1, k2](Point p) {
    const Point r = rot(p);
    const double amp = r.x <= 0.0 ? k1 : k2;
    return amp * std::sin(M_PI * r.x) * std::sin(M_PI * r.y);
  };
  pb.flux = [rot, st, ct, k1, k2](Point p) {
    const Point r = rot(p);
    // Left of the line the amplitude is k1 and the conductivity k2, and
    // vice versa; the flux prefactor is k1 k2 on both sides.
    const double pref = -k1 * k2 * M_PI;
    const double du_dxp = pref * std::cos(M_PI * r.x) * std::sin(M_PI * r.y);
    const double du_dyp = pref * std::sin(M_PI * r.x) * std::cos(M_PI * r.y);
    // x' axis direction (st, -ct); y' axis direction (ct, st).
    return Point{du_dxp * st + du_dyp * ct, -du_dxp * ct + du_dyp * st};
  };
  pb.forcing = [rot, k1, k2](Point p) {
    const Point r = rot(p);
    return 2.0 * M_PI * M_PI * k1 * k2 * std::sin(M_PI * r.x) * std::sin(M_PI * r.y);
  };
  return pb;
}

ManufacturedProblem problem_gaussians() {
  ManufacturedProblem pb;
  pb.name = "gaussians";
  pb.materials = {{1, 1.0}};
  const double sigma2 = 1e-3;
  pb.quad_max_h = std::sqrt(sigma2);
  const double amp = 1.0 / (2.0 * M_PI * sigma2);
  const std::array<Point, 2> mu = {Point{0.25, 0.25}, Point{0.75, 0.75}};
  const auto gauss = [amp, sigma2](Point p, Point m) {
    const double d2 = dot(p - m, p - m);
    return amp * std::exp(-d2 / (2.0 * sigma2));
  };
  pb.u = [gauss, mu](Point p) { return gauss(p, mu[0]) + gauss(p, mu[1]); };
  pb.flux = [gauss, mu, sigma2](Point p) {
    Point q{0.0, 0.0};
    for (const Point& m : mu) {
      const double g = gauss(p, m);
      q = q + (g / sigma2) * (p - m);  // -grad g = (p - m)/sigma^2 * g
    }
    return q;
  };
  pb.forcing = [gauss, mu, sigma2](Point p) {
    double r = 0.0;
    for (const Point& m : mu) {
      const double d2 = dot(p - m, p - m);
      r += gauss(p, m) * (2.0 / sigma2 - d2 / (sigma2 * sigma2));
    }
    return r;
  };
  return pb;
}

ManufacturedProblem problem_polynomial(int p) {
  if (p < 1) throw ConfigError("polynomial problem needs order p >= 1");
  ManufacturedProblem pb;
  pb.name = "polynomial";
  pb.materials = {{1, 1.0}};
  const int m = p - 1;
  const auto base = [](Point q) { return q.x + 0.5 * q.y + 0.25; };
  pb.u = [base, m](Point q) { return std::pow(base(q), m); };
  pb.flux = [base, m](Point q) {
    const double d = m > 0 ? m * std::pow(base(q), m - 1) : 0.0;
    return Point{-d, -0.5 * d};
  };
  pb.forcing = [base, m](Point q) {
    const double dd = m > 1 ? m * (m - 1) * std::pow(base(q), m - 2) : 0.0;
    return -1.25 * dd;  // Laplacian of base^m is m(m-1)(1 + 0.25) base^(m-2)
  };
  return pb;
}

ManufacturedProblem make_problem(const std::string& name, int p) {
  if (name == "sinsin") return problem_sinsin();
  if (name == "interface") return problem_interface();
  if (name == "gaussians") return problem_gaussians();
  if (name == "polynomial") return problem_polynomial(p);
  throw ConfigError("unknown problem '" + name + "'");
}

}  // namespace polydpg
