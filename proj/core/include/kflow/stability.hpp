#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "kflow/field.hpp"
#include "kflow/flows.hpp"

namespace kflow {

enum class BoundaryKind { PeriodicTorus, DirichletChannel };

/// Dense operator on a 1-D y-grid. Periodic grids are y_j = y1 + j h
/// (j = 0..n-1, Fourier collocation); channel grids are the interior nodes
/// y_j = y1 + j h (j = 1..n, fourth-order differences).
struct Operator1D {
  Eigen::MatrixXcd matrix;
  std::vector<double> y;
  BoundaryKind bc = BoundaryKind::PeriodicTorus;
  std::vector<double> weight;  // kernel K at the nodes
  double h = 0.0;
  /// For J_l L_l: matrix = i * real_form, kept separately so the real
  /// eigenproblem can be solved (eigenvalues exactly closed under conjugation).
  Eigen::MatrixXd real_form;
  /// For J_l L_l: the symmetric energy matrix L_l.
  Eigen::MatrixXd energy;
};

/// Second-derivative matrix on the nodes of the given boundary kind.
Eigen::MatrixXd second_derivative(BoundaryKind bc, int n, double length);
/// Nodes of the 1-D grid for the flow's domain.
std::vector<double> stability_nodes(const Domain& domain, int n);

struct EigenReport {
  std::vector<std::complex<double>> eigenvalues;  // ascending for L0, by Re for JL
  Eigen::MatrixXcd eigenvectors;                  // columns
  int n_neg = 0;
  int n_zero = 0;
  int n_pos = 0;
  double zero_tolerance = 0.0;
  double alpha_max = 0.0;  // L0 only
  // J_l L_l only:
  double eps_unstable = 0.0;
  std::vector<std::complex<double>> unstable;  // Re > eps, with multiplicity
  int k_unstable = 0;
  /// Distinct unstable eigenvalues and their clustered multiplicities.
  std::vector<std::pair<std::complex<double>, int>> unstable_clusters;
  double max_abs_re = 0.0;
};

/// L0 = -d^2/dy^2 - K2(y). Class-1 flows and the dipole are rejected.
Operator1D build_L0(const BaseFlow& flow, int n, BoundaryKind bc);
Operator1D build_L0(const BaseFlow& flow, int n);  // bc from the flow's domain
/// Symmetric eigendecomposition of op + shift I; zero tolerance 1e-8 ||op||.
EigenReport eigen_L0(const Operator1D& op, double shift = 0.0);
/// n^-(L0 + l^2 alpha^2).
int neg_count(const BaseFlow& flow, double alpha, int l, int n);

/// J_l L_l for class K+ (J_l = i alpha l U'', L_l = 1/K2 - (-D^2 + a^2)^{-1})
/// and class 1 (J_l = -i alpha l U'', L_l = 1/K1 + (-D^2 + a^2)^{-1}).
Operator1D build_JlLl(const BaseFlow& flow, double alpha, int l, int n);

/// Threshold max(1e-6, 10 * max|Re lambda|) measured on the same flow at
/// alpha_cal = max(2, 2 alpha_max), l = 1, resolution n.
double unstable_threshold(const BaseFlow& flow, int n);
/// Full spectrum of J_l L_l with the unstable part. eps <= 0 calibrates.
EigenReport unstable_modes(const BaseFlow& flow, double alpha, int l, int n, double eps = 0.0);
/// Phase speed c with lambda = -i alpha l c (Im c > 0 for growth).
std::complex<double> phase_speed(std::complex<double> lambda, double alpha, int l);

struct IndexRow {
  int l = 0;
  int n_neg = 0;      // n^-(L0 + l^2 alpha^2)
  int n_zero = 0;     // n^0(L0 + l^2 alpha^2)
  int n_neg_Ll = 0;   // n^-(L_l) computed directly
  int k_ul = 0;
  double max_re_lambda = 0.0;
  bool match = false;
};

struct IndexReport {
  std::string flow;
  double alpha = 0.0;
  int n = 0;
  double eps_unstable = 0.0;
  std::vector<IndexRow> rows;
  int k_u = 0;       // 2 sum k_ul (both signs of l)
  int n_neg_L = 0;   // 2 sum n^-(L0 + l^2 alpha^2)
  int k_r = 0;
  int k_c = 0;
  int k_i_le0 = 0;
  int k_0_le0 = 0;
  bool identity_holds = false;  // k_r + 2k_c + 2k_i + k_0 == n_neg_L
  bool all_match = false;
};

IndexReport index_check(const BaseFlow& flow, double alpha, int l_max, int n);

struct CenterSpaceReport {
  Eigen::MatrixXcd basis_Es;
  Eigen::MatrixXcd basis_Eu;
  Eigen::MatrixXcd basis_Ec;      // orthonormal columns
  Eigen::MatrixXcd projector_Ec;  // I - B (B* L B)^{-1} B* L
  double min_L_quadratic_on_Ec = 0.0;
  double l_orthogonality = 0.0;   // max |<L e, e_c>| over unit basis vectors
  int kernel_dim = 0;
  int n_neg_on_Esu = 0;           // n^-(L restricted to E^s + E^u)
  double gram_condition = 0.0;
};

/// Center space of J_l L_l.
CenterSpaceReport center_space(const BaseFlow& flow, double alpha, int l, int n);
/// Center space of the block operator for +l and -l together.
CenterSpaceReport center_space_pm(const BaseFlow& flow, double alpha, int l, int n);

/// The discrete E^c projection applied row by row to a 2-D field: each
/// x-mode k with unstable modes is sampled on the y-grid, projected, and
/// transformed back. Rows without unstable modes pass through unchanged.
class CenterSpaceProjection {
 public:
  CenterSpaceProjection(const BaseFlow& flow, const TorusGrid& grid);
  SpectralField apply(const SpectralField& omega) const;
  /// x-modes k >= 1 whose rows are modified.
  std::vector<int> projected_modes() const;
  /// Leading unstable eigenvalue over all projected rows (0 if none).
  double leading_growth_rate() const { return leading_; }

 private:
  TorusGrid grid_;
  std::vector<std::pair<int, Eigen::MatrixXcd>> rows_;
  double leading_ = 0.0;
};

struct ScanRow {
  int n = 0;
  double max_abs_re = 0.0;
  double roundoff_floor = 0.0;  // 1e3 * eps * ||J_l L_l||
  int near_zero = 0;            // eigenvalues with |lambda| below the floor
};

struct ScanReport {
  std::vector<ScanRow> rows;
  bool strictly_decreasing = false;
  /// Every row at or below its roundoff floor: the spectrum is on the
  /// imaginary axis to machine precision and no trend can be resolved.
  bool at_roundoff = false;
  bool passed = false;  // decreasing or at roundoff, and final <= tolerance
  double tolerance = 1e-3;
};

ScanReport embedded_eigenvalue_scan(const BaseFlow& flow, double alpha, int l,
                                    const std::vector<int>& resolutions, double tolerance = 1e-3);

}  // namespace kflow
