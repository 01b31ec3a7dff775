#include "hypsym/hyperbolic.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <limits>
#include <numeric>

namespace hypsym {

namespace {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXd;

double condition_number(const MatrixXd& m) {
  const Eigen::JacobiSVD<MatrixXd> svd(m);
  const auto& s = svd.singularValues();
  const double smin = s[s.size() - 1];
  return smin > 0.0 ? s[0] / smin : kInfinity;
}

/// C (C^T C)^{-1/2}: the orthonormal basis of range(C) closest to C.
MatrixXd lowdin(const MatrixXd& c) {
  if (c.cols() == 1) return c / c.norm();
  const Eigen::SelfAdjointEigenSolver<MatrixXd> es(c.transpose() * c);
  return c * es.operatorInverseSqrt();
}

double smallest_singular_value(const MatrixXd& c) {
  const Eigen::JacobiSVD<MatrixXd> svd(c);
  return svd.singularValues()[svd.singularValues().size() - 1];
}

void fix_signs(MatrixXd& b) {
  for (Index c = 0; c < b.cols(); ++c)
    for (Index r = 0; r < b.rows(); ++r)
      if (std::abs(b(r, c)) > 1e-12) {
        if (b(r, c) < 0.0) b.col(c) *= -1.0;
        break;
      }
}

/// Block sizes of sorted eigenvalues.
std::vector<Index> cluster(const VectorXd& lam, double anorm, double tol) {
  const Index m = lam.size();
  const double spread = lam[0] - lam[m - 1];
  const double floor = 1e3 * std::numeric_limits<double>::epsilon() * anorm;
  std::vector<Index> sizes{1};
  for (Index j = 1; j < m; ++j) {
    const double gap = lam[j - 1] - lam[j];
    if (gap < tol * spread || gap <= floor)
      ++sizes.back();
    else
      sizes.push_back(1);
  }
  return sizes;
}

}  // namespace

double CoefficientMatrices::bound() const {
  double k0 = 0.0;
  for (const auto& aj : a) k0 = std::max(k0, sup_norm(aj));
  return k0;
}

void CoefficientMatrices::validate(double k0) const {
  if (a.empty()) throw DomainError("system needs at least one coefficient matrix");
  for (const auto& aj : a) {
    if (!(aj.grid() == a.front().grid()) || aj.dim() != a.front().dim())
      throw DomainError("coefficient matrices must share grid and size");
    if (!aj.data().allFinite()) throw DomainError("coefficient entries must be finite");
  }
  hypsym::validate(regularity);
  if (bound() > k0) throw DomainError("coefficient bound K_0 exceeded");
}

RealMatrixFunction assemble_symbol(const CoefficientMatrices& coeffs, const Eigen::VectorXd& xi) {
  if (xi.size() != coeffs.space_dim()) throw DomainError("frequency dimension mismatch");
  if (xi.cwiseAbs().maxCoeff() == 0.0) throw DomainError("symbol needs xi != 0");
  RealMatrixFunction out(coeffs.grid(), coeffs.dim());
  for (Index j = 0; j < coeffs.space_dim(); ++j) out.data() += xi[j] * coeffs.a[j].data();
  return out;
}

CoefficientMatrices similarity_system(const RealFunction& d, const RealFunction& phi,
                                      const Eigen::MatrixXd& p0, const Eigen::MatrixXd& e,
                                      const Eigen::VectorXd& weights, RegularityClass regularity) {
  d.check_same_grid(phi);
  const Index m = weights.size();
  if (p0.rows() != m || p0.cols() != m || e.rows() != m || e.cols() != m)
    throw DomainError("similarity system shape mismatch");
  RealMatrixFunction a(d.grid(), m);
  for (Index i = 0; i < d.size(); ++i) {
    const MatrixXd p = p0 + phi(i) * e;
    const Eigen::PartialPivLU<MatrixXd> lu(p);
    if (!(condition_number(p) < 1e8)) throw DomainError("similarity matrix is singular");
    a.at(i) = p * (d(i) * weights).asDiagonal() * lu.inverse();
  }
  CoefficientMatrices out{{std::move(a)}, regularity};
  out.validate();
  return out;
}

CoefficientMatrices block3_system(const RealFunction& d, const RealFunction& phi,
                                  RegularityClass regularity) {
  MatrixXd p0(3, 3), e(3, 3);
  p0 << 1.0, 0.3, 0.2,
        0.1, 1.0, 0.4,
        0.2, -0.3, 1.0;
  e << 0.0, 1.0, 0.0,
       0.0, 0.0, 1.0,
       1.0, 0.0, 0.0;
  e *= 0.25;
  return similarity_system(d, phi, p0, e, Eigen::Vector3d(1.0, 1.0, 2.0), regularity);
}

Index EigenStructure::block_of(Index j) const {
  for (Index h = blocks() - 1; h >= 0; --h)
    if (j >= block_start[h]) return h;
  return 0;
}

RealMatrixFunction EigenStructure::Lambda() const {
  RealMatrixFunction out(grid(), dim());
  for (Index j = 0; j < dim(); ++j) out.data().col(j + j * dim()) = lambdas.col(j);
  return out;
}

EigenStructure eigendecompose(const RealMatrixFunction& symbol, const Eigen::VectorXd& xi,
                              const EigenOptions& opt) {
  const Index n = symbol.samples();
  const Index m = symbol.dim();
  const double xi_norm = xi.norm();
  if (!(xi_norm > 0.0)) throw DomainError("eigendecomposition needs xi != 0");

  EigenStructure es;
  es.lambdas.resize(n, m);
  es.P = RealMatrixFunction(symbol.grid(), m);
  es.Q = RealMatrixFunction(symbol.grid(), m);
  es.xi = xi;

  Eigen::EigenSolver<MatrixXd> solver(m);
  std::vector<MatrixXd> basis0, prev;
  MatrixXd p_prev;
  std::vector<Index> order(m);

  for (Index i = 0; i < n; ++i) {
    const MatrixXd a = symbol.at(i);
    const double anorm = a.norm();
    solver.compute(a, true);
    const auto& ev = solver.eigenvalues();
    for (Index j = 0; j < m; ++j)
      if (std::abs(ev[j].imag()) > opt.imag_tol * (1.0 + xi_norm) * anorm)
        throw NotHyperbolicError("complex eigenvalue at sample " + std::to_string(i));

    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Index x, Index y) { return ev[x].real() > ev[y].real(); });
    VectorXd lam(m);
    MatrixXcd v(m, m);
    for (Index j = 0; j < m; ++j) {
      lam[j] = ev[order[j]].real();
      v.col(j) = solver.eigenvectors().col(order[j]);
    }

    const std::vector<Index> sizes = cluster(lam, anorm, opt.cluster_tol);
    if (i == 0) {
      es.multiplicities = sizes;
      Index start = 0;
      for (Index s : sizes) {
        es.block_start.push_back(start);
        start += s;
      }
    } else if (sizes != es.multiplicities) {
      throw MultiplicityError("multiplicity pattern changes at sample " + std::to_string(i));
    }

    const Eigen::JacobiSVD<MatrixXcd> vsvd(v);
    const auto& sv = vsvd.singularValues();
    if (!(sv[m - 1] > 1e-12 * sv[0]))
      throw NotHyperbolicError("eigenvalue is not semi-simple (Jordan block) at sample " +
                               std::to_string(i));
    const MatrixXcd w = v.inverse();

    MatrixXd p(m, m);
    for (Index h = 0; h < es.blocks(); ++h) {
      const Index j0 = es.block_start[h];
      const Index mh = es.multiplicities[h];
      const MatrixXd proj = (v.middleCols(j0, mh) * w.middleRows(j0, mh)).real();
      MatrixXd b;
      if (i == 0) {
        const Eigen::JacobiSVD<MatrixXd> psvd(proj, Eigen::ComputeThinU);
        b = psvd.matrixU().leftCols(mh);
        fix_signs(b);
        basis0.push_back(b);
        prev.push_back(b);
      } else {
        b = proj * basis0[h];
        if (smallest_singular_value(b) < 1e-3) b = proj * prev[h];
        // The eigenspace turned away from the previous one: two eigenvalues
        // crossed between samples.
        if (smallest_singular_value(b) < 1e-3)
          throw MultiplicityError("eigenvalues cross between samples " + std::to_string(i - 1) +
                                  " and " + std::to_string(i));
        b = lowdin(b);
        prev[h] = b;
      }
      p.middleCols(j0, mh) = b;
    }

    if (i > 0)
      for (Index j = 0; j < m; ++j) {
        const double c = std::min(1.0, std::abs(p.col(j).dot(p_prev.col(j))));
        es.max_angle_jump = std::max(es.max_angle_jump, std::acos(c));
      }
    if (es.max_angle_jump > opt.max_angle_jump)
      throw IllConditionedError("eigenvector continuity lost at sample " + std::to_string(i));

    const double cond = condition_number(p);
    if (!(cond <= opt.max_condition))
      throw IllConditionedError("eigenvector matrix ill-conditioned at sample " + std::to_string(i));
    es.max_condition = std::max(es.max_condition, cond);

    es.lambdas.row(i) = lam.transpose();
    es.P.at(i) = p;
    es.Q.at(i) = p.inverse();
    p_prev = p;
  }
  return es;
}

EigenStructure scale_frequency(const EigenStructure& es, double gamma) {
  if (!(gamma > 0.0)) throw DomainError("frequency scaling must be positive");
  EigenStructure out = es;
  out.lambdas *= gamma;
  out.xi *= gamma;
  return out;
}

double eigen_residual(const EigenStructure& es, const RealMatrixFunction& symbol) {
  double worst = 0.0;
  for (Index i = 0; i < symbol.samples(); ++i) {
    const MatrixXd p = es.P.at(i);
    const MatrixXd r = symbol.at(i) * p - p * es.lambdas.row(i).asDiagonal();
    worst = std::max(worst, r.norm());
  }
  return worst;
}

double biorthogonality_error(const EigenStructure& es) {
  double worst = 0.0;
  const MatrixXd id = MatrixXd::Identity(es.dim(), es.dim());
  for (Index i = 0; i < es.grid().size; ++i)
    worst = std::max(worst, (es.Q.at(i) * es.P.at(i) - id).norm());
  return worst;
}

double reconstruction_error(const EigenStructure& es, const RealMatrixFunction& symbol) {
  double worst = 0.0;
  for (Index i = 0; i < symbol.samples(); ++i) {
    const MatrixXd r =
        es.P.at(i) * es.lambdas.row(i).asDiagonal() * es.Q.at(i) - symbol.at(i);
    worst = std::max(worst, r.norm());
  }
  return worst;
}

double left_eigen_residual(const EigenStructure& es, const RealMatrixFunction& symbol) {
  double worst = 0.0;
  for (Index i = 0; i < symbol.samples(); ++i) {
    const MatrixXd q = es.Q.at(i);
    const MatrixXd r = q * symbol.at(i) - es.lambdas.row(i).asDiagonal() * q;
    worst = std::max(worst, r.norm());
  }
  return worst;
}

MollifiedStructure mollify_eigenstructure(const EigenStructure& es, double eps,
                                          const MollifierKernel& kernel, double max_condition) {
  const Grid& g = es.grid();
  const Index m = es.dim();
  MollifiedStructure out;
  out.eps = eps;
  out.es = es;

  for (Index h = 0; h < es.blocks(); ++h) {
    const Index j0 = es.block_start[h];
    const Index mh = es.multiplicities[h];
    const VectorXd mean = es.lambdas.middleCols(j0, mh).rowwise().mean();
    const RealFunction smooth = mollify(RealFunction(g, mean), eps, kernel);
    for (Index j = j0; j < j0 + mh; ++j) out.es.lambdas.col(j) = smooth.values();
  }

  out.es.P = es.P.map_entries([&](const RealFunction& f) { return mollify(f, eps, kernel); });
  out.es.max_condition = 0.0;
  out.es.max_angle_jump = 0.0;
  out.a = RealMatrixFunction(g, m);
  for (Index i = 0; i < g.size; ++i) {
    const MatrixXd p = out.es.P.at(i);
    const double cond = condition_number(p);
    if (!(cond <= max_condition))
      throw EpsilonTooLargeError("mollified eigenvector matrix is singular at sample " +
                                 std::to_string(i));
    out.es.max_condition = std::max(out.es.max_condition, cond);
    const MatrixXd q = p.inverse();
    out.es.Q.at(i) = q;
    out.a.at(i) = p * out.es.lambdas.row(i).asDiagonal() * q;
  }
  return out;
}

}  // namespace hypsym
