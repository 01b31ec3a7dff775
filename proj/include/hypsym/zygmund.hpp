#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "hypsym/spectral.hpp"

namespace hypsym {

enum class RegularityKind { zygmund, log_zygmund };

/// Integral (log-)Zygmund class: exponent p and log power ell (0 or 1).
struct RegularityClass {
  RegularityKind kind = RegularityKind::zygmund;
  double p = kInfinity;
  int ell = 0;

  static RegularityClass zygmund(double p = kInfinity) { return {RegularityKind::zygmund, p, 0}; }
  static RegularityClass log_zygmund(double p = kInfinity) {
    return {RegularityKind::log_zygmund, p, 1};
  }
};

void validate(const RegularityClass& cls);

/// Quotients of a difference sweep over the dyadic shifts tau = 2^i h.
struct ModulusSweep {
  std::vector<double> taus;       ///< increasing
  std::vector<double> quotients;  ///< one per tau
  double value = 0.0;             ///< max quotient (lower bound of the sup over all tau)
  /// Slope of log(quotient) against log(1/tau) on the finest half of the
  /// sweep; about 0 for members, about 1 for a jump.
  double growth_exponent = 0.0;
  bool member = true;
};

/// sup_tau ||f(.+tau) + f(.-tau) - 2 f||_{L^p([tau, T-tau])} / (tau log^ell(1 + 1/tau)).
ModulusSweep second_difference_sweep(const RealFunction& f, const RegularityClass& cls);
double second_difference_seminorm(const RealFunction& f, const RegularityClass& cls);

/// sup_tau ||f(.+tau) - f||_{L^p([0, T-tau])} / (tau log^{1+ell}(1 + 1/tau)).
ModulusSweep first_difference_sweep(const RealFunction& f, const RegularityClass& cls);
double first_difference_modulus(const RealFunction& f, const RegularityClass& cls);

/// Even, nonnegative, unit-mass kernel supported in [-1, 1]; the profile is
/// the polynomial bump (15/16)(1 - s^2)^2.
class MollifierKernel {
 public:
  double operator()(double s) const;

  /// rho_eps(t) = rho(t/eps)/eps on the grid (periodic, centred at t = 0),
  /// rescaled to unit discrete mass. Exactly even on the grid.
  RealFunction sample(const Grid& grid, double eps) const;

  /// Fourier coefficients of the discrete kernel scaled so that the
  /// circular convolution is a plain spectral product.
  VectorXc convolution_symbol(const Grid& grid, double eps) const;
};

/// Grid-resolvability rule for mollification: eps >= 4 grid spacings.
bool resolvable(const Grid& grid, double eps);

/// f_eps = rho_eps * f (circular convolution on the grid).
RealFunction mollify(const RealFunction& f, double eps, const MollifierKernel& kernel = {});

/// The three mollifier quotients on a sweep of scales eps, each normalised by
/// its predicted rate (L = log(1 + 1/eps)):
///   ||f_eps - f||_p / (eps L^ell),  ||f_eps'||_p / L^(1+ell),  eps ||f_eps''||_p / L^ell.
struct MollifierRates {
  std::vector<double> eps;
  std::vector<double> approximation;
  std::vector<double> first;
  std::vector<double> second;

  /// Largest quotient over all three sequences.
  double max_quotient() const;
  /// True if some sequence increases at every step and ends at least twice
  /// its starting value, the signature of a wrong rate.
  bool blows_up() const;
};

/// Sweep over eps = 2^-k, k = k_min..k_max. Every eps must be resolvable.
MollifierRates mollifier_rates(const RealFunction& f, const RegularityClass& cls, int k_min, int k_max,
                               const MollifierKernel& kernel = {});

enum class RoughKind { weierstrass, log_weierstrass, lipschitz, smooth, constant, step };
enum class PhaseMode { zero, random };

RoughKind parse_rough_kind(const std::string& name);
std::string to_string(RoughKind kind);

struct RoughParams {
  double amplitude = 1.0;
  int depth = 12;   ///< last index K of the lacunary series
  int start = 0;    ///< first index of the lacunary series
  double offset = 0.0;
  PhaseMode phases = PhaseMode::zero;
  std::uint64_t seed = 0;
  bool require_positive = false;
};

/// Corpus generator. With base angular frequency w = 2 pi / period:
///   weierstrass     c0 + A sum_{j=start}^{K} 2^-j cos(2^j w t + psi_j)
///   log_weierstrass c0 + A sum 2^-j (1 + j) cos(2^j w t + psi_j)
///   lipschitz       c0 + A tri(w t)        (triangle wave, one kink per half period)
///   smooth          c0 + A sin(w t + psi_0)
///   constant        c0
///   step            c0 + A sign(sin(w t))
/// When positivity is required, a nonpositive offset or a nonpositive sample
/// is a DomainError.
RealFunction generate_rough(RoughKind kind, const RoughParams& params, const Grid& grid);

/// Writes "t,f" rows over the window.
void export_csv(const RealFunction& f, std::ostream& out);

}  // namespace hypsym
