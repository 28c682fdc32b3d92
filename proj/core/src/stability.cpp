#include "kflow/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "fft.hpp"
#include "kflow/error.hpp"
#include "kflow/operators.hpp"

namespace kflow {
namespace {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXd;
using cd = std::complex<double>;

BoundaryKind bc_of(const Domain& d) {
  return d.kind == Domain::Kind::Torus ? BoundaryKind::PeriodicTorus
                                       : BoundaryKind::DirichletChannel;
}

void require_shear(const BaseFlow& flow, const char* who) {
  if (flow.kind() == FlowKind::Dipole) {
    throw ValidationError(std::string(who) + ": the dipole is not a shear flow");
  }
}

std::vector<double> kernel_nodes(const BaseFlow& flow, const std::vector<double>& y) {
  std::vector<double> k(y.size());
  for (std::size_t j = 0; j < y.size(); ++j) {
    k[j] = flow.kernel(y[j]);
    if (!(k[j] > 0.0) || !std::isfinite(k[j])) {
      throw DomainError("kernel K is not positive at y = " + std::to_string(y[j]) +
                        "; flows must be in class K+ (or class 1)");
    }
  }
  return k;
}

double spectral_radius_sym(const MatrixXd& a) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(a, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

struct Spectrum {
  std::vector<cd> lambda;
  MatrixXcd vectors;
};

/// Eigenpairs of i M for real M, sorted by ascending Re lambda.
Spectrum spectrum_of(const MatrixXd& m) {
  Eigen::EigenSolver<MatrixXd> es(m, true);
  if (es.info() != Eigen::Success) throw NumericalError("eigensolver failed for J_l L_l");
  const auto mu = es.eigenvalues();
  const MatrixXcd vec = es.eigenvectors();
  std::vector<int> order(mu.size());
  for (int i = 0; i < mu.size(); ++i) order[i] = i;
  std::vector<cd> lam(mu.size());
  for (int i = 0; i < mu.size(); ++i) lam[i] = cd(0.0, 1.0) * mu[i];
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (lam[a].real() != lam[b].real()) return lam[a].real() < lam[b].real();
    return lam[a].imag() < lam[b].imag();
  });
  Spectrum s;
  s.vectors.resize(m.rows(), m.cols());
  for (std::size_t i = 0; i < order.size(); ++i) {
    s.lambda.push_back(lam[order[i]]);
    s.vectors.col(static_cast<Eigen::Index>(i)) = vec.col(order[i]);
  }
  return s;
}

/// Center-space construction for i M with energy matrix L.
CenterSpaceReport center_space_of(const MatrixXd& m, const MatrixXd& l, double eps) {
  const Spectrum s = spectrum_of(m);
  std::vector<Eigen::Index> su, ss;
  for (std::size_t i = 0; i < s.lambda.size(); ++i) {
    if (s.lambda[i].real() > eps) su.push_back(static_cast<Eigen::Index>(i));
    if (s.lambda[i].real() < -eps) ss.push_back(static_cast<Eigen::Index>(i));
  }
  const Eigen::Index n = m.rows();
  CenterSpaceReport r;
  r.basis_Eu.resize(n, static_cast<Eigen::Index>(su.size()));
  r.basis_Es.resize(n, static_cast<Eigen::Index>(ss.size()));
  for (std::size_t i = 0; i < su.size(); ++i) {
    r.basis_Eu.col(i) = s.vectors.col(su[i]).normalized();
  }
  for (std::size_t i = 0; i < ss.size(); ++i) {
    r.basis_Es.col(i) = s.vectors.col(ss[i]).normalized();
  }
  const Eigen::Index p = r.basis_Es.cols() + r.basis_Eu.cols();
  MatrixXcd b(n, p);
  b << r.basis_Es, r.basis_Eu;
  const MatrixXcd lc = l.cast<cd>();
  const double lnorm = spectral_radius_sym(l);
  const double ltol = 1e-8 * lnorm;

  if (p > 0) {
    const MatrixXcd gram = b.adjoint() * lc * b;
    Eigen::JacobiSVD<MatrixXcd> svd(gram);
    const auto sv = svd.singularValues();
    r.gram_condition = sv(p - 1) > 0.0 ? sv(0) / sv(p - 1) : std::numeric_limits<double>::infinity();
    if (!(r.gram_condition < 1e12)) {
      std::ostringstream os;
      os << "L restricted to E^s + E^u is numerically degenerate (condition number "
         << r.gram_condition << ")";
      throw NumericalError(os.str());
    }
    const MatrixXcd herm = 0.5 * (gram + gram.adjoint());
    Eigen::SelfAdjointEigenSolver<MatrixXcd> ges(herm, Eigen::EigenvaluesOnly);
    for (Eigen::Index i = 0; i < p; ++i) {
      if (ges.eigenvalues()(i) < -ltol) ++r.n_neg_on_Esu;
    }
    r.projector_Ec = MatrixXcd::Identity(n, n) - b * gram.lu().solve(b.adjoint() * lc);
    Eigen::HouseholderQR<MatrixXcd> qr(lc * b);
    const MatrixXcd q = qr.householderQ() * MatrixXcd::Identity(n, n);
    r.basis_Ec = q.rightCols(n - p);
  } else {
    r.gram_condition = 1.0;
    r.projector_Ec = MatrixXcd::Identity(n, n);
    r.basis_Ec = MatrixXcd::Identity(n, n);
  }
  r.l_orthogonality = p > 0 ? (b.adjoint() * lc * r.basis_Ec).cwiseAbs().maxCoeff() : 0.0;

  // Deflate ker L (which lies in E^c) before taking the minimum.
  Eigen::SelfAdjointEigenSolver<MatrixXd> les(l);
  std::vector<Eigen::Index> kidx;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(les.eigenvalues()(i)) <= ltol) kidx.push_back(i);
  }
  r.kernel_dim = static_cast<int>(kidx.size());
  MatrixXcd ec = r.basis_Ec;
  if (!kidx.empty() && ec.cols() > r.kernel_dim) {
    MatrixXcd kv(n, r.kernel_dim);
    for (int i = 0; i < r.kernel_dim; ++i) kv.col(i) = les.eigenvectors().col(kidx[i]).cast<cd>();
    const MatrixXcd c = ec.adjoint() * kv;
    Eigen::HouseholderQR<MatrixXcd> qr(c);
    const MatrixXcd qc = qr.householderQ() * MatrixXcd::Identity(c.rows(), c.rows());
    ec = ec * qc.rightCols(c.rows() - r.kernel_dim);
  }
  if (ec.cols() > 0) {
    const MatrixXcd form = ec.adjoint() * lc * ec;
    Eigen::SelfAdjointEigenSolver<MatrixXcd> fes(0.5 * (form + form.adjoint()),
                                                 Eigen::EigenvaluesOnly);
    r.min_L_quadratic_on_Ec = fes.eigenvalues()(0);
  }
  return r;
}

}  // namespace

Eigen::MatrixXd second_derivative(BoundaryKind bc, int n, double length) {
  if (!(length > 0.0)) throw ValidationError("second derivative: length must be positive");
  MatrixXd d = MatrixXd::Zero(n, n);
  if (bc == BoundaryKind::PeriodicTorus) {
    if (n < 4 || n % 2 != 0) throw ValidationError("periodic collocation needs even n >= 4");
    const double h = 2.0 * std::numbers::pi / n;
    const double scale = std::pow(2.0 * std::numbers::pi / length, 2);
    for (int j = 0; j < n; ++j) {
      double row = 0.0;
      for (int k = 0; k < n; ++k) {
        if (k == j) continue;
        const int diff = j - k;
        const double s = std::sin(0.5 * diff * h);
        const double v = -((diff % 2 == 0) ? 1.0 : -1.0) / (2.0 * s * s);
        d(j, k) = scale * v;
        row += v;
      }
      // equals -pi^2/(3h^2) - 1/6; the row sum keeps constants exact
      d(j, j) = -scale * row;
    }
    return d;
  }
  if (n < 3) throw ValidationError("channel differences need n >= 3 interior nodes");
  const double h = length / (n + 1);
  const double c = 1.0 / (12.0 * h * h);
  const double stencil[5] = {-1.0, 16.0, -30.0, 16.0, -1.0};
  for (int j = 0; j < n; ++j) {
    for (int o = -2; o <= 2; ++o) {
      const int k = j + o;
      const double w = stencil[o + 2] * c;
      if (k >= 0 && k < n) {
        d(j, k) += w;
      } else if (k == -2) {
        d(j, 0) -= w;  // odd ghost u_{-1} = -u_1
      } else if (k == n + 1) {
        d(j, n - 1) -= w;
      }
      // k == -1 or k == n is the wall node, u = 0
    }
  }
  return d;
}

std::vector<double> stability_nodes(const Domain& domain, int n) {
  std::vector<double> y(n);
  if (domain.kind == Domain::Kind::Torus) {
    const double h = domain.length() / n;
    for (int j = 0; j < n; ++j) y[j] = domain.y1 + j * h;
  } else {
    const double h = domain.length() / (n + 1);
    for (int j = 0; j < n; ++j) y[j] = domain.y1 + (j + 1) * h;
  }
  return y;
}

Operator1D build_L0(const BaseFlow& flow, int n, BoundaryKind bc) {
  require_shear(flow, "build_L0");
  if (flow.class_one()) {
    throw DomainError("build_L0: L0 = -D^2 - K2 is defined for class K+ flows only");
  }
  if (n < 16) throw ValidationError("build_L0: n must be >= 16");
  if (bc != bc_of(flow.domain())) {
    throw ValidationError("build_L0: boundary kind does not match the flow's domain");
  }
  Operator1D op;
  op.bc = bc;
  op.y = stability_nodes(flow.domain(), n);
  op.h = bc == BoundaryKind::PeriodicTorus ? flow.domain().length() / n
                                           : flow.domain().length() / (n + 1);
  op.weight = kernel_nodes(flow, op.y);
  MatrixXd a = -second_derivative(bc, n, flow.domain().length());
  for (int j = 0; j < n; ++j) a(j, j) -= op.weight[j];
  op.real_form = a;
  op.matrix = a.cast<cd>();
  return op;
}

Operator1D build_L0(const BaseFlow& flow, int n) { return build_L0(flow, n, bc_of(flow.domain())); }

EigenReport eigen_L0(const Operator1D& op, double shift) {
  MatrixXd a = op.matrix.real();
  a = 0.5 * (a + a.transpose());
  a.diagonal().array() += shift;
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(a);
  if (es.info() != Eigen::Success) throw NumericalError("eigensolver failed for L0");
  const VectorXd ev = es.eigenvalues();
  EigenReport r;
  r.zero_tolerance = 1e-8 * ev.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    r.eigenvalues.emplace_back(ev(i), 0.0);
    if (ev(i) < -r.zero_tolerance) {
      ++r.n_neg;
    } else if (ev(i) <= r.zero_tolerance) {
      ++r.n_zero;
    } else {
      ++r.n_pos;
    }
  }
  r.eigenvectors = es.eigenvectors().cast<cd>();
  if (shift == 0.0 && ev(0) < -r.zero_tolerance) r.alpha_max = std::sqrt(-ev(0));
  return r;
}

int neg_count(const BaseFlow& flow, double alpha, int l, int n) {
  if (!(alpha > 0.0) || l == 0) throw ValidationError("neg_count: need alpha > 0 and l != 0");
  return eigen_L0(build_L0(flow, n), alpha * alpha * l * l).n_neg;
}

Operator1D build_JlLl(const BaseFlow& flow, double alpha, int l, int n) {
  require_shear(flow, "build_JlLl");
  if (!(alpha > 0.0) || l == 0) throw ValidationError("build_JlLl: need alpha > 0 and l != 0");
  if (n < 16) throw ValidationError("build_JlLl: n must be >= 16");
  Operator1D op;
  op.bc = bc_of(flow.domain());
  op.y = stability_nodes(flow.domain(), n);
  op.h = op.bc == BoundaryKind::PeriodicTorus ? flow.domain().length() / n
                                              : flow.domain().length() / (n + 1);
  op.weight = kernel_nodes(flow, op.y);
  const double a2 = alpha * alpha * l * l;
  MatrixXd elliptic = -second_derivative(op.bc, n, flow.domain().length());
  elliptic.diagonal().array() += a2;
  Eigen::LDLT<MatrixXd> ldlt(elliptic);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
    throw NumericalError("build_JlLl: singular elliptic solve");
  }
  MatrixXd inv = ldlt.solve(MatrixXd::Identity(n, n));
  inv = 0.5 * (inv + inv.transpose());
  const double sign = flow.class_one() ? 1.0 : -1.0;
  MatrixXd lmat = sign * inv;
  for (int j = 0; j < n; ++j) lmat(j, j) += 1.0 / op.weight[j];
  MatrixXd m(n, n);
  const double jsign = flow.class_one() ? -1.0 : 1.0;
  for (int j = 0; j < n; ++j) {
    m.row(j) = jsign * alpha * l * flow.profile().d2u(op.y[j]) * lmat.row(j);
  }
  op.energy = lmat;
  op.real_form = m;
  op.matrix = cd(0.0, 1.0) * m.cast<cd>();
  return op;
}

double unstable_threshold(const BaseFlow& flow, int n) {
  double amax = 0.0;
  if (!flow.class_one()) amax = eigen_L0(build_L0(flow, n)).alpha_max;
  const double acal = std::max(2.0, 2.0 * amax);
  const Spectrum s = spectrum_of(build_JlLl(flow, acal, 1, n).real_form);
  double spurious = 0.0;
  for (const auto& z : s.lambda) spurious = std::max(spurious, std::abs(z.real()));
  return std::max(1e-6, 10.0 * spurious);
}

EigenReport unstable_modes(const BaseFlow& flow, double alpha, int l, int n, double eps) {
  if (eps <= 0.0) eps = unstable_threshold(flow, n);
  const Operator1D op = build_JlLl(flow, alpha, l, n);
  const Spectrum s = spectrum_of(op.real_form);
  EigenReport r;
  r.eigenvalues = s.lambda;
  r.eigenvectors = s.vectors;
  r.eps_unstable = eps;
  double scale = 1.0;
  for (const auto& z : s.lambda) scale = std::max(scale, std::abs(z));
  r.zero_tolerance = 1e-8 * scale;
  for (const auto& z : s.lambda) {
    r.max_abs_re = std::max(r.max_abs_re, std::abs(z.real()));
    if (z.real() > eps) r.unstable.push_back(z);
    if (std::abs(z) <= r.zero_tolerance) {
      ++r.n_zero;
    } else if (z.real() < -eps) {
      ++r.n_neg;
    } else if (z.real() > eps) {
      ++r.n_pos;
    }
  }
  r.k_unstable = static_cast<int>(r.unstable.size());
  const double radius = 1e-6 * scale;
  for (const auto& z : r.unstable) {
    bool placed = false;
    for (auto& [c, mult] : r.unstable_clusters) {
      if (std::abs(z - c) <= radius) {
        ++mult;
        placed = true;
        break;
      }
    }
    if (!placed) r.unstable_clusters.emplace_back(z, 1);
  }
  return r;
}

std::complex<double> phase_speed(std::complex<double> lambda, double alpha, int l) {
  return cd(0.0, 1.0) * lambda / (alpha * l);
}

IndexReport index_check(const BaseFlow& flow, double alpha, int l_max, int n) {
  require_shear(flow, "index_check");
  if (flow.class_one()) throw DomainError("index_check: needs a class K+ flow");
  if (l_max < 1) throw ValidationError("index_check: l_max must be >= 1");
  IndexReport rep;
  rep.flow = flow.description();
  rep.alpha = alpha;
  rep.n = n;
  rep.eps_unstable = unstable_threshold(flow, n);
  const Operator1D l0 = build_L0(flow, n);
  rep.all_match = true;
  for (int l = 1; l <= l_max; ++l) {
    IndexRow row;
    row.l = l;
    const EigenReport e0 = eigen_L0(l0, alpha * alpha * l * l);
    row.n_neg = e0.n_neg;
    row.n_zero = e0.n_zero;
    const Operator1D op = build_JlLl(flow, alpha, l, n);
    Eigen::SelfAdjointEigenSolver<MatrixXd> les(op.energy, Eigen::EigenvaluesOnly);
    const double ltol = 1e-8 * les.eigenvalues().cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < les.eigenvalues().size(); ++i) {
      if (les.eigenvalues()(i) < -ltol) ++row.n_neg_Ll;
    }
    const EigenReport ej = unstable_modes(flow, alpha, l, n, rep.eps_unstable);
    row.k_ul = ej.k_unstable;
    row.max_re_lambda = -std::numeric_limits<double>::infinity();
    for (const auto& z : ej.eigenvalues) row.max_re_lambda = std::max(row.max_re_lambda, z.real());
    row.match = row.k_ul == row.n_neg;
    rep.all_match = rep.all_match && row.match;
    rep.k_u += 2 * row.k_ul;
    rep.n_neg_L += 2 * row.n_neg;

    const MatrixXcd lc = op.energy.cast<cd>();
    for (std::size_t i = 0; i < ej.eigenvalues.size(); ++i) {
      const cd z = ej.eigenvalues[i];
      const auto v = ej.eigenvectors.col(static_cast<Eigen::Index>(i));
      if (z.real() > rep.eps_unstable) {
        if (std::abs(z.imag()) <= rep.eps_unstable) {
          rep.k_r += 2;
        } else {
          rep.k_c += 1;
        }
        continue;
      }
      if (std::abs(z.real()) > rep.eps_unstable) continue;  // stable partner
      const double krein = (v.adjoint() * lc * v)(0, 0).real() / v.squaredNorm();
      if (std::abs(z) <= ej.zero_tolerance) {
        if (krein < -ltol) rep.k_0_le0 += 2;
      } else if (krein <= ltol) {
        rep.k_i_le0 += 1;
      }
    }
    rep.rows.push_back(row);
  }
  rep.identity_holds =
      rep.k_r + 2 * rep.k_c + 2 * rep.k_i_le0 + rep.k_0_le0 == rep.n_neg_L;
  return rep;
}

CenterSpaceReport center_space(const BaseFlow& flow, double alpha, int l, int n) {
  const Operator1D op = build_JlLl(flow, alpha, l, n);
  return center_space_of(op.real_form, op.energy, unstable_threshold(flow, n));
}

CenterSpaceReport center_space_pm(const BaseFlow& flow, double alpha, int l, int n) {
  const Operator1D op = build_JlLl(flow, alpha, l, n);
  MatrixXd m = MatrixXd::Zero(2 * n, 2 * n);
  MatrixXd e = MatrixXd::Zero(2 * n, 2 * n);
  m.topLeftCorner(n, n) = op.real_form;
  m.bottomRightCorner(n, n) = -op.real_form;  // J_{-l} L_{-l} = -J_l L_l
  e.topLeftCorner(n, n) = op.energy;
  e.bottomRightCorner(n, n) = op.energy;
  return center_space_of(m, e, unstable_threshold(flow, n));
}

CenterSpaceProjection::CenterSpaceProjection(const BaseFlow& flow, const TorusGrid& grid)
    : grid_(grid) {
  require_shear(flow, "center space projection");
  check_compatible(flow, grid);
  const int n = grid.ny();
  const double eps = unstable_threshold(flow, n);
  for (int k = 1; k <= grid.kmax_dealiased(); ++k) {
    const EigenReport rep = unstable_modes(flow, grid.alpha(), k, n, eps);
    if (rep.k_unstable == 0) continue;
    for (const auto& z : rep.unstable) leading_ = std::max(leading_, z.real());
    const Operator1D op = build_JlLl(flow, grid.alpha(), k, n);
    rows_.emplace_back(k, center_space_of(op.real_form, op.energy, eps).projector_Ec);
  }
}

std::vector<int> CenterSpaceProjection::projected_modes() const {
  std::vector<int> ks;
  for (const auto& [k, p] : rows_) ks.push_back(k);
  return ks;
}

SpectralField CenterSpaceProjection::apply(const SpectralField& omega) const {
  if (!(omega.grid() == grid_)) throw ValidationError("center space projection: grid mismatch");
  const int nx = grid_.nx();
  const int ny = grid_.ny();
  SpectralField out = omega;
  std::vector<cd> col(ny), phys(ny);
  for (const auto& [k, p] : rows_) {
    for (int kk : {k, -k}) {
      const int ix = kk >= 0 ? kk : kk + nx;
      for (int iy = 0; iy < ny; ++iy) col[iy] = omega[static_cast<std::size_t>(iy) * nx + ix];
      detail::dft2d(1, ny, col, phys, +1);
      Eigen::Map<Eigen::VectorXcd> pv(phys.data(), ny);
      const Eigen::VectorXcd projected = p * pv;
      std::vector<cd> pin(projected.data(), projected.data() + ny);
      detail::dft2d(1, ny, pin, col, -1);
      for (int iy = 0; iy < ny; ++iy) {
        out[static_cast<std::size_t>(iy) * nx + ix] = col[iy] / static_cast<double>(ny);
      }
    }
  }
  out.dealias();
  out.zero_mean();
  return out;
}

ScanReport embedded_eigenvalue_scan(const BaseFlow& flow, double alpha, int l,
                                    const std::vector<int>& resolutions, double tolerance) {
  if (resolutions.empty()) throw ValidationError("embedded eigenvalue scan: no resolutions");
  ScanReport rep;
  rep.tolerance = tolerance;
  for (int n : resolutions) {
    const Operator1D op = build_JlLl(flow, alpha, l, n);
    const Spectrum s = spectrum_of(op.real_form);
    ScanRow row;
    row.n = n;
    row.roundoff_floor =
        1e3 * std::numeric_limits<double>::epsilon() * op.real_form.lpNorm<Eigen::Infinity>();
    for (const auto& z : s.lambda) {
      row.max_abs_re = std::max(row.max_abs_re, std::abs(z.real()));
      if (std::abs(z) <= row.roundoff_floor) ++row.near_zero;
    }
    rep.rows.push_back(row);
  }
  rep.strictly_decreasing = true;
  rep.at_roundoff = true;
  for (std::size_t i = 0; i < rep.rows.size(); ++i) {
    if (i > 0 && !(rep.rows[i].max_abs_re < rep.rows[i - 1].max_abs_re)) {
      rep.strictly_decreasing = false;
    }
    if (rep.rows[i].max_abs_re > rep.rows[i].roundoff_floor) rep.at_roundoff = false;
  }
  rep.passed = (rep.strictly_decreasing || rep.at_roundoff) &&
               rep.rows.back().max_abs_re <= tolerance;
  return rep;
}

}  // namespace kflow
