#include "kflow/projection.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <tuple>

#include "kflow/error.hpp"

namespace kflow {
namespace {

int sign(int v) { return (v > 0) - (v < 0); }

bool unit_x_wavenumber(const TorusGrid& g, int k) {
  return std::abs(std::abs(g.alpha() * k) - 1.0) < 1e-12;
}

std::vector<char> membership(const TorusGrid& g, const ProjectionTag& tag) {
  std::vector<char> in(g.size(), 0);
  if (tag.kind == ProjectionTag::Kind::PN || tag.kind == ProjectionTag::Kind::PNX1) {
    const bool x1 = tag.kind == ProjectionTag::Kind::PNX1;
    for (const auto& [k, m] : pn_modes(g, tag.n, x1)) in[*g.index_of(k, m)] = 1;
    return in;
  }
  for (int iy = 0; iy < g.ny(); ++iy) {
    for (int ix = 0; ix < g.nx(); ++ix) {
      const int k = g.k_of(ix);
      const int m = g.m_of(iy);
      const bool p1 = m == 0 && unit_x_wavenumber(g, k);
      const bool p2 = k == 0 && std::abs(m) == 1;
      bool member = false;
      switch (tag.kind) {
        case ProjectionTag::Kind::Shear: member = k == 0; break;
        case ProjectionTag::Kind::NonShear: member = k != 0; break;
        case ProjectionTag::Kind::P1: member = p1; break;
        case ProjectionTag::Kind::P2: member = p2; break;
        case ProjectionTag::Kind::P3: member = p1 || p2; break;
        case ProjectionTag::Kind::PN:
        case ProjectionTag::Kind::PNX1: break;
      }
      in[static_cast<std::size_t>(iy) * g.nx() + ix] = member ? 1 : 0;
    }
  }
  return in;
}

}  // namespace

std::string ProjectionTag::name() const {
  switch (kind) {
    case Kind::Shear: return "P0";
    case Kind::NonShear: return "Pneq0";
    case Kind::P1: return "P1";
    case Kind::P2: return "P2";
    case Kind::P3: return "P3";
    case Kind::PN: return "PN:" + std::to_string(n);
    case Kind::PNX1: return "PNX1:" + std::to_string(n);
  }
  return "?";
}

ProjectionTag ProjectionTag::parse(const std::string& s) {
  if (s == "P0") return shear();
  if (s == "Pneq0") return non_shear();
  if (s == "P1") return p1();
  if (s == "P2") return p2();
  if (s == "P3") return p3();
  for (const auto& [prefix, kind] : {std::pair{std::string("PN:"), Kind::PN},
                                     std::pair{std::string("PNX1:"), Kind::PNX1}}) {
    if (s.rfind(prefix, 0) != 0) continue;
    try {
      std::size_t used = 0;
      const int n = std::stoi(s.substr(prefix.size()), &used);
      if (used == s.size() - prefix.size()) return {kind, n};
    } catch (const std::exception&) {
    }
  }
  throw ValidationError("unknown projection tag '" + s + "'");
}

int retained_nonshear_count(const TorusGrid& g, bool exclude_p1) {
  const int kmax = g.kmax_dealiased();
  const int mmax = g.mmax_dealiased();
  int count = 2 * kmax * (2 * mmax + 1);
  if (exclude_p1) {
    for (int k = -kmax; k <= kmax; ++k) {
      if (k != 0 && unit_x_wavenumber(g, k)) --count;
    }
  }
  return count;
}

std::vector<std::pair<int, int>> pn_modes(const TorusGrid& g, int n, bool exclude_p1) {
  const int available = retained_nonshear_count(g, exclude_p1);
  if (n < 1 || n > available) {
    throw ValidationError("PN: N = " + std::to_string(n) + " outside [1, " +
                          std::to_string(available) + "]");
  }
  using Key = std::tuple<double, int, int, int, int>;
  std::vector<Key> keys;
  const int kmax = g.kmax_dealiased();
  const int mmax = g.mmax_dealiased();
  for (int k = -kmax; k <= kmax; ++k) {
    if (k == 0) continue;
    for (int m = -mmax; m <= mmax; ++m) {
      if (exclude_p1 && m == 0 && unit_x_wavenumber(g, k)) continue;
      const double a = g.alpha() * k;
      keys.emplace_back(a * a + double(m) * m, std::abs(k), std::abs(m), sign(k), sign(m));
    }
  }
  std::sort(keys.begin(), keys.end());
  std::vector<std::pair<int, int>> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) {
    const auto& [lam, ak, am, sk, sm] = keys[i];
    out.emplace_back(sk * ak, sm * am);
  }
  return out;
}

SpectralField project(const SpectralField& omega, const ProjectionTag& tag) {
  const auto in = membership(omega.grid(), tag);
  SpectralField out(omega.grid());
  for (std::size_t i = 0; i < in.size(); ++i) {
    if (in[i]) out[i] = omega[i];
  }
  return out;
}

SpectralField project_complement(const SpectralField& omega, const ProjectionTag& tag) {
  return omega - project(omega, tag);
}

}  // namespace kflow
