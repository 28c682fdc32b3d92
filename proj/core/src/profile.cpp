#include <boost/math/interpolators/cardinal_quintic_b_spline.hpp>

#include <cmath>
#include <complex>
#include <memory>
#include <numbers>

#include "fft.hpp"
#include "kflow/error.hpp"
#include "kflow/flows.hpp"

namespace kflow {

Profile sin_profile(double amplitude) {
  return {"sinY",
          [=](double y) { return amplitude * std::sin(y); },
          [=](double y) { return amplitude * std::cos(y); },
          [=](double y) { return -amplitude * std::sin(y); },
          [=](double y) { return -amplitude * std::cos(y); }};
}

Profile tanh_profile(double width) {
  if (!(width > 0.0)) throw ValidationError("tanh profile: width must be positive");
  const double s = 1.0 / width;
  // With t = tanh(s y), q = sech^2(s y): U' = s q, U'' = -2 s^2 t q,
  // U''' = s^3 (4 t^2 q - 2 q^2).
  return {"tanh",
          [=](double y) { return std::tanh(s * y); },
          [=](double y) {
            const double c = std::cosh(s * y);
            return s / (c * c);
          },
          [=](double y) {
            const double t = std::tanh(s * y);
            const double c = std::cosh(s * y);
            return -2.0 * s * s * t / (c * c);
          },
          [=](double y) {
            const double t = std::tanh(s * y);
            const double c = std::cosh(s * y);
            const double q = 1.0 / (c * c);
            return s * s * s * (4.0 * t * t * q - 2.0 * q * q);
          }};
}

Profile couette_profile(double slope) {
  return {"couette",
          [=](double y) { return slope * y; },
          [=](double) { return slope; },
          [](double) { return 0.0; },
          [](double) { return 0.0; }};
}

Profile poiseuille_profile() {
  return {"poiseuille",
          [](double y) { return 1.0 - y * y; },
          [](double y) { return -2.0 * y; },
          [](double) { return -2.0; },
          [](double) { return 0.0; }};
}

Profile periodic_samples_profile(std::vector<double> values, double y0, double period) {
  const int n = static_cast<int>(values.size());
  if (n < 8) throw ValidationError("periodic profile: need at least 8 samples");
  if (!(period > 0.0)) throw ValidationError("periodic profile: period must be positive");
  std::vector<std::complex<double>> in(values.begin(), values.end());
  std::vector<std::complex<double>> c(in.size());
  detail::dft2d(1, n, in, c, -1);
  for (auto& z : c) z /= static_cast<double>(n);
  // Pairs (wavenumber, coefficient); an even-n Nyquist term is split evenly.
  struct Term {
    double q;
    std::complex<double> c;
  };
  auto terms = std::make_shared<std::vector<Term>>();
  const double base = 2.0 * std::numbers::pi / period;
  for (int j = 0; j < n; ++j) {
    const int m = j <= n / 2 ? j : j - n;
    if (n % 2 == 0 && j == n / 2) {
      terms->push_back({base * m, 0.5 * c[j]});
      terms->push_back({-base * m, 0.5 * c[j]});
    } else {
      terms->push_back({base * m, c[j]});
    }
  }
  auto eval = [terms, y0](int order) {
    return [terms, y0, order](double y) {
      std::complex<double> s{};
      for (const auto& t : *terms) {
        std::complex<double> f = std::pow(std::complex<double>(0.0, t.q), order);
        s += t.c * f * std::exp(std::complex<double>(0.0, t.q * (y - y0)));
      }
      return s.real();
    };
  };
  return {"samples-periodic", eval(0), eval(1), eval(2), eval(3)};
}

Profile channel_samples_profile(std::vector<double> values, double y1, double y2) {
  if (values.size() < 8) throw ValidationError("channel profile: need at least 8 samples");
  if (!(y2 > y1)) throw ValidationError("channel profile: y2 must exceed y1");
  const double h = (y2 - y1) / static_cast<double>(values.size() - 1);
  using Spline = boost::math::interpolators::cardinal_quintic_b_spline<double>;
  auto spline = std::make_shared<Spline>(values, y1, h);
  const double fd = 1e-4 * (y2 - y1);
  auto clamp = [y1, y2](double y) { return std::min(std::max(y, y1), y2); };
  return {"samples-channel",
          [spline, clamp](double y) { return (*spline)(clamp(y)); },
          [spline, clamp](double y) { return spline->prime(clamp(y)); },
          [spline, clamp](double y) { return spline->double_prime(clamp(y)); },
          [spline, clamp, fd, y1, y2](double y) {
            // The quintic spline exposes two derivatives; the third is a
            // centered difference of the second, one-sided at the ends.
            const double a = std::max(y - fd, y1);
            const double b = std::min(y + fd, y2);
            return (spline->double_prime(clamp(b)) - spline->double_prime(clamp(a))) / (b - a);
          }};
}

Profile builtin_profile(const std::string& name, double parameter) {
  if (name == "sinY") return sin_profile(parameter);
  if (name == "tanh") return tanh_profile(parameter);
  if (name == "couette") return couette_profile(parameter);
  if (name == "poiseuille") return poiseuille_profile();
  throw ValidationError("unknown profile '" + name + "'");
}

}  // namespace kflow
