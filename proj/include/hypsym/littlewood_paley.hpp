#pragma once

#include <vector>

#include "hypsym/spectral.hpp"

namespace hypsym {

/// Radial cut-off chi and annulus profile phi(x) = chi(x) - chi(2x).
///
/// chi is identically 1 on |x| <= 1, identically 0 on |x| >= 2, and on the
/// transition band uses the exp(-1/x) gluing, which is C-infinity and
/// nonincreasing in |x|.
class DyadicFilterBank {
 public:
  explicit DyadicFilterBank(const Grid& grid);

  static double chi(double xi);
  static double phi(double xi) { return chi(xi) - chi(2.0 * xi); }

  /// Symbol of Delta_j: chi for j = 0, phi(2^-j .) for j >= 1.
  double block_symbol(int j, double xi) const;
  /// Symbol of S_j = chi(2^-j D) = sum_{k <= j} Delta_k.
  double low_cut_symbol(int j, double xi) const;

  /// Largest block index; blocks 0..j_max sum to the identity on the grid.
  int j_max() const { return j_max_; }
  const Grid& grid() const { return grid_; }

 private:
  Grid grid_;
  int j_max_ = 0;
};

/// Indices (s, alpha, p, r) of the logarithmic Besov space with weights
/// 2^{js} (1+j)^alpha.
struct BesovSpec {
  double s = 0.0;
  double alpha = 0.0;
  double p = kInfinity;
  double r = kInfinity;
};

struct BesovNorm {
  double value = 0.0;
  /// Weighted term of the last available block; a large value signals that
  /// truncating the l^r sum at j_max underestimates the norm.
  double tail_term = 0.0;
  std::vector<double> weighted_terms;
};

/// Delta_j f. Throws RangeError for j outside [0, j_max].
RealFunction block(const RealFunction& f, int j, const DyadicFilterBank& bank);
ComplexFunction block(const ComplexFunction& f, int j, const DyadicFilterBank& bank);

/// S_j f. Throws RangeError for j outside [0, j_max + 1].
RealFunction low_cut(const RealFunction& f, int j, const DyadicFilterBank& bank);
ComplexFunction low_cut(const ComplexFunction& f, int j, const DyadicFilterBank& bank);
/// S_j with S_j = 0 for j < 0, as used by the paraproduct.
RealFunction low_cut_or_zero(const RealFunction& f, int j, const DyadicFilterBank& bank);

/// All blocks Delta_0 .. Delta_{j_max} from a single forward transform.
std::vector<RealFunction> all_blocks(const RealFunction& f, const DyadicFilterBank& bank);

/// l^r over j of 2^{js}(1+j)^alpha ||Delta_j f||_{L^p([0,T])}.
BesovNorm besov_norm(const RealFunction& f, const BesovSpec& spec, const DyadicFilterBank& bank);

/// Same weighted sequence with the L^p block norm replaced by the l^1 norm of
/// the block's Fourier coefficients (an upper bound for the L^infinity block
/// norm). One transform in total, so cheap enough for iteration control.
double besov_surrogate_norm(const RealFunction& f, double s, const DyadicFilterBank& bank);

/// Weighted-spectrum H^s norm (sum (1 + xi^2)^s |c_k|^2 * period)^{1/2}.
double sobolev_norm(const RealFunction& f, double s);

/// Cut-off theta(tau) = 1 - chi(2 tau): 0 on |tau| <= 1/2, 1 on |tau| >= 1.
double primitive_cutoff(double tau);

struct ApproximatePrimitive {
  RealFunction f;  ///< spectrum (1/(i tau)) theta(2^-mu tau) g^
  RealFunction r;  ///< d/dt f - g = (theta_mu - 1) g, supported in |tau| < 2^mu
};

/// Fourier-multiplier antiderivative with low frequencies cut away.
ApproximatePrimitive approximate_primitive(const RealFunction& g, int mu);

}  // namespace hypsym
