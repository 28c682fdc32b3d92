#include "kflow/initial_conditions.hpp"

#include <cmath>
#include <cstdlib>
#include <numbers>
#include <random>
#include <set>

#include "kflow/error.hpp"
#include "kflow/projection.hpp"
#include "kflow/spectral.hpp"

namespace kflow {
namespace {

class Gaussian {
 public:
  explicit Gaussian(std::uint64_t seed) : engine_(seed) {}
  double operator()() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * std::numbers::pi * u2);
    has_spare_ = true;
    return r * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace

Subspace parse_subspace(const std::string& s) {
  if (s == "full") return Subspace::Full;
  if (s == "shear") return Subspace::Shear;
  if (s == "nonshear") return Subspace::NonShear;
  if (s == "x1") return Subspace::X1;
  if (s == "pn") return Subspace::PN;
  if (s == "pnx1") return Subspace::PNX1;
  throw ValidationError("unknown subspace '" + s + "' (full|shear|nonshear|x1|pn|pnx1)");
}

std::string to_string(Subspace s) {
  switch (s) {
    case Subspace::Full: return "full";
    case Subspace::Shear: return "shear";
    case Subspace::NonShear: return "nonshear";
    case Subspace::X1: return "x1";
    case Subspace::PN: return "pn";
    case Subspace::PNX1: return "pnx1";
  }
  return "?";
}

SpectralField restrict_to(const SpectralField& f, Subspace s, int pn) {
  SpectralField out = f;
  out.zero_mean();
  switch (s) {
    case Subspace::Full: break;
    case Subspace::Shear: out = project(out, ProjectionTag::shear()); break;
    case Subspace::NonShear: out = project(out, ProjectionTag::non_shear()); break;
    case Subspace::X1:
      out = project_complement(project(out, ProjectionTag::non_shear()), ProjectionTag::p1());
      break;
    case Subspace::PN:
    case Subspace::PNX1: {
      const auto modes = pn_modes(f.grid(), pn, s == Subspace::PNX1);
      const std::set<std::pair<int, int>> in(modes.begin(), modes.end());
      SpectralField r(f.grid());
      for (const auto& [k, m] : modes) {
        if (in.count({-k, -m})) r.set(k, m, out.at(k, m));
      }
      out = r;
      break;
    }
  }
  return out;
}

SpectralField random_field(const TorusGrid& g, const RandomFieldSpec& spec) {
  if (!(spec.k0 > 0.0)) throw ValidationError("random field: k0 must be positive");
  Gaussian rng(spec.seed);
  SpectralField f(g);
  const int kmax = g.kmax_dealiased();
  const int mmax = g.mmax_dealiased();
  for (int k = 0; k <= kmax; ++k) {
    for (int m = -mmax; m <= mmax; ++m) {
      if (k == 0 && m <= 0) continue;
      const double a = g.alpha() * k;
      const double env = std::exp(-(a * a + double(m) * m) / (spec.k0 * spec.k0));
      const double re = rng();
      const double im = rng();
      const cplx c = env * cplx(re, im);
      f.set(k, m, c);
      f.set(-k, -m, std::conj(c));
    }
  }
  f = restrict_to(f, spec.subspace, spec.pn);
  if (spec.l2_norm > 0.0) {
    const double n = norm_l2(f);
    if (n == 0.0) throw ValidationError("random field: projected field is zero");
    f *= spec.l2_norm / n;
  }
  return f;
}

SpectralField cosine_field(const TorusGrid& g, const std::vector<CosineTerm>& terms) {
  SpectralField f(g);
  for (const auto& t : terms) {
    const cplx half = 0.5 * t.amplitude * std::exp(cplx(0.0, t.phase));
    if (t.k == 0 && t.m == 0) {
      f.set(0, 0, f.at(0, 0) + t.amplitude * std::cos(t.phase));
      continue;
    }
    f.set(t.k, t.m, f.at(t.k, t.m) + half);
    f.set(-t.k, -t.m, f.at(-t.k, -t.m) + std::conj(half));
  }
  return f;
}

}  // namespace kflow
