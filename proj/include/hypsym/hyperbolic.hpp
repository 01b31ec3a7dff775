#pragma once

#include <vector>

#include "hypsym/zygmund.hpp"

namespace hypsym {

/// A(t, xi) = sum_j xi_j A_j(t) for real m x m matrices A_j(t).
struct CoefficientMatrices {
  std::vector<RealMatrixFunction> a;
  RegularityClass regularity;

  Index dim() const { return a.empty() ? 0 : a.front().dim(); }
  Index space_dim() const { return static_cast<Index>(a.size()); }
  const Grid& grid() const { return a.front().grid(); }

  /// K_0 = max_j sup_t |A_j(t)| (Frobenius).
  double bound() const;
  /// Shapes agree, entries finite, and bound() <= k0.
  void validate(double k0 = kInfinity) const;
};

RealMatrixFunction assemble_symbol(const CoefficientMatrices& coeffs, const Eigen::VectorXd& xi);

/// One-dimensional system A(t) = P(t) diag(d(t) w) P(t)^-1 with
/// P(t) = p0 + phi(t) e. Repeated weights give eigenvalues of constant
/// multiplicity; the block eigenspaces move with phi.
CoefficientMatrices similarity_system(const RealFunction& d, const RealFunction& phi,
                                      const Eigen::MatrixXd& p0, const Eigen::MatrixXd& e,
                                      const Eigen::VectorXd& weights,
                                      RegularityClass regularity = {});

/// The 3 x 3 template used by the experiments: weights (1, 1, 2) and fixed
/// well-conditioned p0, e.
CoefficientMatrices block3_system(const RealFunction& d, const RealFunction& phi,
                                  RegularityClass regularity = {});

/// Eigen-decomposition of A(t, xi) continuous in t.
struct EigenStructure {
  Eigen::MatrixXd lambdas;  ///< samples x m, column j = lambda_j(t), decreasing in j
  RealMatrixFunction P;     ///< columns r_j, unit norm
  RealMatrixFunction Q;     ///< P^-1, rows l_j
  std::vector<Index> multiplicities;
  std::vector<Index> block_start;
  Eigen::VectorXd xi;
  double max_angle_jump = 0.0;  ///< largest angle between a column at successive samples
  double max_condition = 0.0;   ///< largest 2-norm condition number of P

  const Grid& grid() const { return P.grid(); }
  Index dim() const { return P.dim(); }
  Index blocks() const { return static_cast<Index>(multiplicities.size()); }
  bool strict() const { return blocks() == dim(); }
  Index block_of(Index j) const;
  RealFunction lambda(Index j) const { return RealFunction(grid(), lambdas.col(j)); }
  /// Lambda as a diagonal matrix function.
  RealMatrixFunction Lambda() const;
};

struct EigenOptions {
  double imag_tol = 1e-8;       ///< |Im lambda| <= imag_tol (1 + |xi|) |A|
  double cluster_tol = 1e-6;    ///< same block when the gap < cluster_tol * spread
  double max_condition = 1e8;   ///< cond(P) above this is IllConditionedError
  double max_angle_jump = 0.5;  ///< radians between successive samples
};

/// Per-sample eigensolve, decreasing order, constant multiplicity pattern,
/// and t-continuous eigenvectors obtained by projecting the t = 0 basis
/// through the eigenprojectors at t (falling back to the previous sample's
/// basis if that projection degenerates), orthonormalised inside each block.
/// At t = 0 each simple eigenvector has its first nonzero component positive.
EigenStructure eigendecompose(const RealMatrixFunction& symbol, const Eigen::VectorXd& xi,
                              const EigenOptions& options = {});

/// Structure at gamma * xi: eigenvalues scale by gamma, eigenvectors do not
/// change (degree-1 homogeneity of the symbol).
EigenStructure scale_frequency(const EigenStructure& es, double gamma);

/// max_t |A P - P Lambda|, max_t |Q P - I|, max_t |P Lambda Q - A|, max_t |Q A - Lambda Q|.
double eigen_residual(const EigenStructure& es, const RealMatrixFunction& symbol);
double biorthogonality_error(const EigenStructure& es);
double reconstruction_error(const EigenStructure& es, const RealMatrixFunction& symbol);
double left_eigen_residual(const EigenStructure& es, const RealMatrixFunction& symbol);

struct MollifiedStructure {
  EigenStructure es;       ///< Lambda_eps, P_eps (not renormalised), Q_eps = P_eps^-1
  RealMatrixFunction a;    ///< A_eps = P_eps Lambda_eps Q_eps
  double eps = 0.0;
};

/// Mollifies Lambda (block means, so multiplicities are kept exactly) and P
/// entrywise. A singular P_eps is EpsilonTooLargeError.
MollifiedStructure mollify_eigenstructure(const EigenStructure& es, double eps,
                                          const MollifierKernel& kernel = {},
                                          double max_condition = 1e8);

}  // namespace hypsym
