#pragma once

// Independent reference computations used only by the tests.

#include <complex>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using cplx = std::complex<double>;

/// Rayleigh equation phi'' = (a^2 + U''/(U - c)) phi on [y1, y2] with
/// phi(y1) = phi(y2) = 0, integrated by RK4 from y1 with phi'(y1) = 1; the
/// returned value is phi(y2).
cplx rayleigh_shoot(const std::function<double(double)>& u, const std::function<double(double)>& d2u,
                    double a, double y1, double y2, cplx c, int steps = 4000);

/// Secant iteration on rayleigh_shoot from two starting speeds.
cplx rayleigh_secant(const std::function<double(double)>& u, const std::function<double(double)>& d2u,
                     double a, double y1, double y2, cplx c0, cplx c1);

/// Fourier-Galerkin matrix of w -> -sin y d_x (w - psi) on the row exp(i a x),
/// modes m = -M..M (row and column index m + M). Real-valued.
Eigen::MatrixXd bar_row_matrix(double a, int M);

/// Largest real part of the spectrum of bar_row_matrix.
double bar_row_growth(double a, int M);

}  // namespace oracle
