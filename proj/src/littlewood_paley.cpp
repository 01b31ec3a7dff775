#include "hypsym/littlewood_paley.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace hypsym {

namespace {

double gluing(double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; }

double weight(int j, double s, double alpha) {
  return std::pow(2.0, j * s) * std::pow(1.0 + j, alpha);
}

double lr_sum(const std::vector<double>& terms, double r) {
  if (std::isinf(r)) return terms.empty() ? 0.0 : *std::max_element(terms.begin(), terms.end());
  double acc = 0.0;
  for (double t : terms) acc += std::pow(t, r);
  return std::pow(acc, 1.0 / r);
}

/// Applies a real radial symbol supported in lo < |xi| < hi, visiting only
/// the slots inside that band.
template <typename Scalar, typename Symbol>
SampledFunction<Scalar> band_filter(const SampledFunction<Scalar>& f, double lo, double hi,
                                    Symbol&& symbol) {
  const VectorXc spec = transform(f);
  const Grid& g = f.grid();
  VectorXc out = VectorXc::Zero(g.size);
  const double unit = kTwoPi / g.period;
  const Index kmax = std::min<Index>(g.size / 2, static_cast<Index>(std::ceil(hi / unit)));
  const Index kmin = std::max<Index>(0, static_cast<Index>(std::floor(lo / unit)));
  for (Index k = kmin; k <= kmax; ++k) {
    const double w = symbol(unit * static_cast<double>(k));
    if (w == 0.0) continue;
    out[k] = w * spec[k];
    if (k != 0 && k != g.size / 2) out[g.size - k] = w * spec[g.size - k];
  }
  ComplexFunction back = inverse_transform(g, out);
  if constexpr (is_complex_v<Scalar>) {
    return back;
  } else {
    return real_part(back);
  }
}

template <typename Scalar>
SampledFunction<Scalar> block_impl(const SampledFunction<Scalar>& f, int j,
                                   const DyadicFilterBank& bank) {
  if (j < 0 || j > bank.j_max())
    throw RangeError("block index " + std::to_string(j) + " outside [0, j_max]");
  const double lo = j == 0 ? 0.0 : std::ldexp(1.0, j - 1);
  return band_filter(f, lo, std::ldexp(1.0, j + 1),
                     [&](double xi) { return bank.block_symbol(j, xi); });
}

template <typename Scalar>
SampledFunction<Scalar> low_cut_impl(const SampledFunction<Scalar>& f, int j,
                                     const DyadicFilterBank& bank) {
  if (j < 0 || j > bank.j_max() + 1)
    throw RangeError("cut-off index " + std::to_string(j) + " outside [0, j_max + 1]");
  return band_filter(f, 0.0, std::ldexp(1.0, j + 1),
                     [&](double xi) { return bank.low_cut_symbol(j, xi); });
}

}  // namespace

DyadicFilterBank::DyadicFilterBank(const Grid& grid) : grid_(grid) {
  validate(grid_);
  // Smallest J with chi(2^-J xi) = 1 on every grid frequency, i.e.
  // 2^J >= Nyquist.
  j_max_ = std::max(0, static_cast<int>(std::ceil(std::log2(grid_.nyquist_frequency()) - 1e-12)));
}

double DyadicFilterBank::chi(double xi) {
  const double a = std::abs(xi);
  if (a <= 1.0) return 1.0;
  if (a >= 2.0) return 0.0;
  const double s = a - 1.0;
  const double left = gluing(1.0 - s);
  return left / (left + gluing(s));
}

double DyadicFilterBank::block_symbol(int j, double xi) const {
  if (j == 0) return chi(xi);
  return phi(std::ldexp(xi, -j));
}

double DyadicFilterBank::low_cut_symbol(int j, double xi) const { return chi(std::ldexp(xi, -j)); }

RealFunction block(const RealFunction& f, int j, const DyadicFilterBank& bank) {
  return block_impl(f, j, bank);
}
ComplexFunction block(const ComplexFunction& f, int j, const DyadicFilterBank& bank) {
  return block_impl(f, j, bank);
}
RealFunction low_cut(const RealFunction& f, int j, const DyadicFilterBank& bank) {
  return low_cut_impl(f, j, bank);
}
ComplexFunction low_cut(const ComplexFunction& f, int j, const DyadicFilterBank& bank) {
  return low_cut_impl(f, j, bank);
}

RealFunction low_cut_or_zero(const RealFunction& f, int j, const DyadicFilterBank& bank) {
  if (j < 0) return RealFunction::constant(f.grid(), 0.0);
  return low_cut(f, std::min(j, bank.j_max() + 1), bank);
}

std::vector<RealFunction> all_blocks(const RealFunction& f, const DyadicFilterBank& bank) {
  const RealFunction fs = f.with_spectrum();
  std::vector<RealFunction> out;
  out.reserve(bank.j_max() + 1);
  for (int j = 0; j <= bank.j_max(); ++j) out.push_back(block(fs, j, bank));
  return out;
}

BesovNorm besov_norm(const RealFunction& f, const BesovSpec& spec, const DyadicFilterBank& bank) {
  if (!(spec.p >= 1.0) || !(spec.r >= 1.0)) throw DomainError("Besov exponents must be >= 1");
  BesovNorm out;
  const auto blocks = all_blocks(f, bank);
  for (int j = 0; j <= bank.j_max(); ++j)
    out.weighted_terms.push_back(weight(j, spec.s, spec.alpha) * lp_norm(blocks[j], spec.p));
  out.value = lr_sum(out.weighted_terms, spec.r);
  out.tail_term = out.weighted_terms.back();
  return out;
}

double besov_surrogate_norm(const RealFunction& f, double s, const DyadicFilterBank& bank) {
  const VectorXc spec = transform(f);
  const Grid& g = f.grid();
  const double unit = kTwoPi / g.period;
  double best = 0.0;
  for (int j = 0; j <= bank.j_max(); ++j) {
    const Index kmin = j == 0 ? 0 : static_cast<Index>(std::floor(std::ldexp(1.0, j - 1) / unit));
    const Index kmax = std::min<Index>(g.size / 2, static_cast<Index>(std::ceil(std::ldexp(1.0, j + 1) / unit)));
    double acc = 0.0;
    for (Index k = kmin; k <= kmax; ++k) {
      const double w = bank.block_symbol(j, unit * static_cast<double>(k));
      if (w == 0.0) continue;
      acc += w * std::abs(spec[k]);
      if (k != 0 && k != g.size / 2) acc += w * std::abs(spec[g.size - k]);
    }
    best = std::max(best, weight(j, s, 0.0) * acc);
  }
  return best;
}

double sobolev_norm(const RealFunction& f, double s) {
  const VectorXc spec = transform(f);
  const Grid& g = f.grid();
  double acc = 0.0;
  for (Index n = 0; n < g.size; ++n) {
    const double xi = g.frequency(n);
    acc += std::pow(1.0 + xi * xi, s) * std::norm(spec[n]);
  }
  // Parseval over the window length keeps the scale of the L^2 block norms.
  return std::sqrt(acc * g.window);
}

double primitive_cutoff(double tau) { return 1.0 - DyadicFilterBank::chi(2.0 * tau); }

ApproximatePrimitive approximate_primitive(const RealFunction& g, int mu) {
  if (mu < 0) throw DomainError("cut-off level mu must be nonnegative");
  const RealFunction gs = g.with_spectrum();
  const double scale = std::ldexp(1.0, -mu);
  const double nyquist = g.grid().nyquist_frequency();
  RealFunction f = filter(gs, [&](double tau) -> Complex {
    const double th = primitive_cutoff(scale * tau);
    if (th == 0.0 || tau == nyquist) return 0.0;
    return th / Complex(0.0, tau);
  });
  RealFunction r = filter(gs, [&](double tau) -> Complex {
    const double th = (tau == nyquist) ? 0.0 : primitive_cutoff(scale * tau);
    return th - 1.0;
  });
  return {std::move(f), std::move(r)};
}

}  // namespace hypsym
