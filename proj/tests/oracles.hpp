#pragma once

// Independent reference computations used by the unit tests. None of them
// goes through the library's FFT or multiplier code.

#include <cmath>
#include <complex>
#include <functional>
#include <random>
#include <vector>

#include "hypsym/spectral.hpp"

namespace oracle {

using hypsym::Complex;
using hypsym::Index;

/// O(N^2) DFT with the 1/N normalisation, slot order as the library.
inline std::vector<Complex> naive_dft(const Eigen::VectorXcd& x) {
  const Index n = x.size();
  std::vector<Complex> out(n);
  for (Index k = 0; k < n; ++k) {
    Complex acc = 0.0;
    for (Index j = 0; j < n; ++j) {
      const double ang = -hypsym::kTwoPi * static_cast<double>((k * j) % n) / static_cast<double>(n);
      acc += x[j] * Complex(std::cos(ang), std::sin(ang));
    }
    out[k] = acc / static_cast<double>(n);
  }
  return out;
}

/// Composite trapezoid rule for fn over [a, b] with n panels.
inline double trapezoid(const std::function<double(double)>& fn, double a, double b, int n) {
  const double h = (b - a) / n;
  double acc = 0.5 * (fn(a) + fn(b));
  for (int i = 1; i < n; ++i) acc += fn(a + i * h);
  return acc * h;
}

/// Periodic fourth-order central difference of samples.
inline Eigen::VectorXd fd_derivative(const Eigen::VectorXd& v, double h) {
  const Index n = v.size();
  Eigen::VectorXd d(n);
  for (Index i = 0; i < n; ++i) {
    auto at = [&](Index k) { return v[((i + k) % n + n) % n]; };
    d[i] = (-at(2) + 8.0 * at(1) - 8.0 * at(-1) + at(-2)) / (12.0 * h);
  }
  return d;
}

/// Random trigonometric polynomial with `modes` random wavenumbers below kmax.
inline hypsym::RealFunction random_trig(const hypsym::Grid& g, std::mt19937_64& rng, int modes,
                                        int kmax) {
  std::uniform_int_distribution<int> kd(0, kmax);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<int> ks;
  std::vector<double> as, bs;
  for (int i = 0; i < modes; ++i) {
    ks.push_back(kd(rng));
    as.push_back(u(rng));
    bs.push_back(u(rng));
  }
  const double w = hypsym::kTwoPi / g.period;
  return hypsym::RealFunction::sample(g, [&](double t) {
    double acc = 0.0;
    for (int i = 0; i < modes; ++i) acc += as[i] * std::cos(ks[i] * w * t) + bs[i] * std::sin(ks[i] * w * t);
    return acc;
  });
}

inline hypsym::RealFunction random_samples(const hypsym::Grid& g, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  Eigen::VectorXd v(g.size);
  for (Index i = 0; i < g.size; ++i) v[i] = nd(rng);
  return hypsym::RealFunction(g, v);
}

}  // namespace oracle
