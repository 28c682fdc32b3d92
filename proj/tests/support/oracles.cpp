#include "oracles.hpp"

#include <cmath>
#include <stdexcept>

namespace oracle {

cplx rayleigh_shoot(const std::function<double(double)>& u, const std::function<double(double)>& d2u,
                    double a, double y1, double y2, cplx c, int steps) {
  const double h = (y2 - y1) / steps;
  auto f = [&](double y, cplx phi, cplx dphi, cplx& o_phi, cplx& o_dphi) {
    o_phi = dphi;
    o_dphi = (a * a + d2u(y) / (u(y) - c)) * phi;
  };
  cplx phi = 0.0, dphi = 1.0;
  double y = y1;
  for (int i = 0; i < steps; ++i) {
    cplx k1p, k1d, k2p, k2d, k3p, k3d, k4p, k4d;
    f(y, phi, dphi, k1p, k1d);
    f(y + h / 2, phi + h / 2 * k1p, dphi + h / 2 * k1d, k2p, k2d);
    f(y + h / 2, phi + h / 2 * k2p, dphi + h / 2 * k2d, k3p, k3d);
    f(y + h, phi + h * k3p, dphi + h * k3d, k4p, k4d);
    phi += h / 6 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
    dphi += h / 6 * (k1d + 2.0 * k2d + 2.0 * k3d + k4d);
    y = y1 + (i + 1) * h;
  }
  return phi;
}

cplx rayleigh_secant(const std::function<double(double)>& u, const std::function<double(double)>& d2u,
                     double a, double y1, double y2, cplx c0, cplx c1) {
  cplx f0 = rayleigh_shoot(u, d2u, a, y1, y2, c0);
  cplx f1 = rayleigh_shoot(u, d2u, a, y1, y2, c1);
  for (int it = 0; it < 100; ++it) {
    const cplx c2 = c1 - f1 * (c1 - c0) / (f1 - f0);
    if (std::abs(c2 - c1) < 1e-13) return c2;
    c0 = c1;
    f0 = f1;
    c1 = c2;
    f1 = rayleigh_shoot(u, d2u, a, y1, y2, c1);
  }
  throw std::runtime_error("rayleigh_secant: no convergence");
}

Eigen::MatrixXd bar_row_matrix(double a, int M) {
  // lambda w_m = -(a/2) (b_{m-1} - b_{m+1}),  b_m = (1 - 1/(a^2 + m^2)) w_m
  const int n = 2 * M + 1;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  auto b = [&](int m) { return 1.0 - 1.0 / (a * a + double(m) * m); };
  for (int m = -M; m <= M; ++m) {
    if (m - 1 >= -M) A(m + M, m - 1 + M) += -a / 2 * b(m - 1);
    if (m + 1 <= M) A(m + M, m + 1 + M) += a / 2 * b(m + 1);
  }
  return A;
}

double bar_row_growth(double a, int M) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(bar_row_matrix(a, M), false);
  double best = -1e300;
  for (int i = 0; i < es.eigenvalues().size(); ++i) best = std::max(best, es.eigenvalues()[i].real());
  return best;
}

}  // namespace oracle
