#pragma once

#include <iosfwd>
#include <vector>

#include "hypsym/hyperbolic.hpp"
#include "hypsym/littlewood_paley.hpp"

namespace hypsym {

/// Theta = (d/dt Q_eps) P_eps, sample by sample.
struct ThetaMatrix {
  RealMatrixFunction theta;
  /// Largest relative gap between theta_jk and l_j A' r_k / (lambda_j - lambda_k)
  /// over entries in distinct blocks (0 for a single block).
  double formula_mismatch = 0.0;
};

ThetaMatrix compute_theta(const MollifiedStructure& ms);

/// Diagonal factor Sigma^0 in the eigenbasis and what it leaves behind.
struct Sigma0Result {
  RealMatrixFunction sigma0;
  std::vector<RealFunction> omega;  ///< log sigma_j for blocks of size one (empty functions otherwise)
  RealMatrixFunction rho;           ///< d/dt Sigma^0 + Sigma^0 Theta + Theta^T Sigma^0 on diagonal blocks
  int mu = 0;
  int iterations = 0;               ///< Picard iterations of the slowest block
  double contraction = 0.0;         ///< largest ratio of successive Picard differences
  double min_eigenvalue = 0.0;      ///< K with Sigma^0 >= K Id
};

/// Strict hyperbolicity: omega_j = J_mu(-2 theta_jj) shifted to omega_j(0) = 0.
Sigma0Result sigma0_strict(const ThetaMatrix& theta, const EigenStructure& es, int mu);

struct PicardOptions {
  double p = kInfinity;      ///< integrability exponent; the contraction norm uses s = (1 + 1/p) / 2
  double tol = 1e-10;        ///< stop when successive iterates differ by less
  int max_iterations = 200;
};

/// Constant multiplicity: per diagonal block, Picard iteration for
/// X' = -(X Theta_b + Theta_b^T X), X(0) = Id. Blocks of size one use the
/// exponential formula. Throws ConvergenceError if an iteration does not
/// contract.
Sigma0Result sigma0_blocks(const ThetaMatrix& theta, const EigenStructure& es, int mu,
                           const PicardOptions& options = {});

struct Sigma0Options {
  int mu = -1;         ///< fixed level; negative selects it automatically
  int mu_start = 5;
  int mu_max = 14;
  PicardOptions picard;
};

/// Picks the construction by block structure. With automatic mu the level
/// rises from mu_start until Picard contracts and Sigma^0 >= Id / 2.
Sigma0Result build_sigma0(const ThetaMatrix& theta, const EigenStructure& es,
                          const Sigma0Options& options = {});

/// Smallest eigenvalue gap between distinct blocks allowed by sigma1, as a
/// fraction of the eigenvalue spread.
inline constexpr double kDefaultGapFraction = 1e-3;

/// Off-diagonal-block factor Sigma^1, Hermitian and purely imaginary.
/// dA is d/dt A_eps and xi_norm = |xi|. Throws NearDegenerateError when two
/// blocks come closer than gap_fraction times the eigenvalue spread.
ComplexMatrixFunction sigma1(const RealMatrixFunction& sigma0, const EigenStructure& es,
                             const RealMatrixFunction& dA, double xi_norm,
                             double gap_fraction = kDefaultGapFraction);

struct SymmetrizerReport {
  double hermitian_defect_s0 = 0.0;
  double hermitian_defect_s1 = 0.0;
  double hermitian_defect_s = 0.0;
  double k1 = 0.0;               ///< min over t of the smallest eigenvalue of S
  double k2 = 0.0;               ///< max over t of the largest eigenvalue of S
  double k1_s0 = 0.0;            ///< same for S^0 alone
  double s0a_defect = 0.0;       ///< max_t |S^0 A - (S^0 A)^*|
  /// Smallest dyadic rho <= |xi| down to which S^0 + rho^-1 S^1 stays
  /// positive, certified per sample by lambda_min(S^0) > |S^1| / rho.
  double r0 = 0.0;
  double sup_r = 0.0;            ///< sup_t |R_eps| (Frobenius)
  double sup_s1 = 0.0;
  double sigma1_diag_block = 0.0;
  double theta_mismatch = 0.0;
  int mu = 0;
  int picard_iterations = 0;
  double contraction = 0.0;
};

struct Symmetrizer {
  RealMatrixFunction S0;
  ComplexMatrixFunction S1;
  RealMatrixFunction Sigma0;
  ComplexMatrixFunction Sigma1;
  RealMatrixFunction R;  ///< R_eps = Q^T G Q
  std::vector<RealFunction> omega;
  RealMatrixFunction rho;
  double eps = 0.0;
  Eigen::VectorXd xi;
  double xi_norm = 0.0;
  SymmetrizerReport report;

  /// S = S^0 + |xi|^-1 S^1.
  ComplexMatrixFunction S() const;
  /// S^0 + rho^-1 S^1 for another frequency size rho.
  ComplexMatrixFunction S_at(double rho) const;
};

/// S^0 = Q^T Sigma^0 Q, S^1 = Q^T Sigma^1 Q and the checks (a)-(c). Throws
/// BelowR0Error if S is not positive definite at |xi|.
Symmetrizer assemble_and_validate(Sigma0Result sigma0, ComplexMatrixFunction sigma1,
                                  const MollifiedStructure& ms);

/// G = Sigma^0' + Sigma^0 Theta + Theta^T Sigma^0 + i |xi|^-1 [Lambda, Sigma^1]
/// (real), returned as R_eps = Q^T G Q.
RealMatrixFunction g_residual(const RealMatrixFunction& sigma0, const ComplexMatrixFunction& sigma1,
                              const ThetaMatrix& theta, const EigenStructure& es, double xi_norm);

struct SymmetrizerOptions {
  Sigma0Options sigma0;
  double gap_fraction = kDefaultGapFraction;
};

/// Full construction at the mollified structure ms (normally eps = 1/|xi|).
Symmetrizer build_symmetrizer(const MollifiedStructure& ms, const SymmetrizerOptions& options = {});

/// Largest |d/dt S^0 u.u + 2 Re(-i |xi|^-1 S^1 A_eps u.u) - R_eps u.u| / |u|^2
/// over `trials` random u per sample, with d/dt S^0 taken spectrally from
/// the samples of S^0.
double energy_identity_defect(const Symmetrizer& symm, const MollifiedStructure& ms,
                              int trials = 4, unsigned long long seed = 1);

/// Writes the validation report as key,value CSV rows.
void export_report(const Symmetrizer& symm, std::ostream& out);

}  // namespace hypsym
