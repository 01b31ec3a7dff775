#include "hypsym/symmetrizer.hpp"

#include "hypsym/csv.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>
#include <string>

namespace hypsym {

namespace {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;

/// J_mu g shifted to vanish at t = 0, together with the remainder r.
ApproximatePrimitive anchored_primitive(const RealFunction& g, int mu) {
  ApproximatePrimitive ap = approximate_primitive(g, mu);
  const double f0 = ap.f(0);
  ap.f.mutable_values().array() -= f0;
  return ap;
}

double min_eigenvalue(const RealMatrixFunction& a) {
  double k = kInfinity;
  Eigen::SelfAdjointEigenSolver<MatrixXd> solver;
  for (Index i = 0; i < a.samples(); ++i) {
    solver.compute(MatrixXd(a.at(i)), Eigen::EigenvaluesOnly);
    k = std::min(k, solver.eigenvalues()[0]);
  }
  return k;
}

/// Strict formula for the one-dimensional block starting at j.
void exponential_block(const ThetaMatrix& theta, Index j, int mu, Sigma0Result& out) {
  const Index m = theta.theta.dim();
  const ApproximatePrimitive ap = anchored_primitive(theta.theta.entry(j, j) * -2.0, mu);
  RealFunction sigma = ap.f;
  sigma.mutable_values() = ap.f.values().array().exp().matrix();
  out.sigma0.data().col(j + j * m) = sigma.values();
  out.rho.data().col(j + j * m) = ap.r.values();
  out.omega[j] = ap.f;
}

/// -(X T + T^T X) for every sample of the block.
RealMatrixFunction picard_rhs(const RealMatrixFunction& x, const RealMatrixFunction& t) {
  RealMatrixFunction out(x.grid(), x.dim());
  for (Index i = 0; i < x.samples(); ++i) {
    const MatrixXd xt = x.at(i) * t.at(i);
    out.at(i) = -(xt + xt.transpose());
  }
  return out;
}

RealMatrixFunction sub_block(const RealMatrixFunction& a, Index start, Index size) {
  RealMatrixFunction out(a.grid(), size);
  for (Index c = 0; c < size; ++c)
    for (Index r = 0; r < size; ++r)
      out.data().col(r + c * size) = a.data().col(start + r + (start + c) * a.dim());
  return out;
}

struct BlockSolution {
  RealMatrixFunction x;
  int iterations = 0;
  double contraction = 0.0;
};

BlockSolution picard_block(const RealMatrixFunction& tb, int mu, const PicardOptions& opt,
                           const DyadicFilterBank& bank) {
  const Grid& g = tb.grid();
  const Index b = tb.dim();
  const double s = 0.5 * (1.0 + 1.0 / opt.p);
  RealMatrixFunction x = RealMatrixFunction::generate(g, b, [b](Index) { return MatrixXd::Identity(b, b); });
  BlockSolution out;
  double previous = 0.0;
  for (int n = 1; n <= opt.max_iterations; ++n) {
    const RealMatrixFunction rhs = picard_rhs(x, tb);
    RealMatrixFunction next(g, b);
    double diff = 0.0;
    for (Index c = 0; c < b; ++c)
      for (Index r = 0; r <= c; ++r) {
        RealFunction e = anchored_primitive(rhs.entry(r, c), mu).f;
        if (r == c) e.mutable_values().array() += 1.0;
        next.set_entry(r, c, e);
        if (r != c) next.set_entry(c, r, e);
        diff = std::max(diff, besov_surrogate_norm(e - x.entry(r, c), s, bank));
      }
    x = std::move(next);
    out.iterations = n;
    if (!std::isfinite(diff)) throw ConvergenceError("Picard iterate is not finite");
    if (n >= 2 && previous > 0.0) {
      const double ratio = diff / previous;
      if (previous > 1e3 * opt.tol) out.contraction = std::max(out.contraction, ratio);
      if (ratio >= 1.0 && diff > opt.tol)
        throw ConvergenceError("Picard iteration does not contract at mu = " + std::to_string(mu));
    }
    if (diff < opt.tol) {
      out.x = std::move(x);
      return out;
    }
    previous = diff;
  }
  throw ConvergenceError("Picard iteration did not reach tolerance at mu = " + std::to_string(mu));
}

Sigma0Result empty_result(const ThetaMatrix& theta, int mu) {
  const Grid& g = theta.theta.grid();
  const Index m = theta.theta.dim();
  Sigma0Result out;
  out.sigma0 = RealMatrixFunction(g, m);
  out.rho = RealMatrixFunction(g, m);
  out.omega.assign(static_cast<std::size_t>(m), RealFunction());
  out.mu = mu;
  return out;
}

}  // namespace

ThetaMatrix compute_theta(const MollifiedStructure& ms) {
  const EigenStructure& es = ms.es;
  ThetaMatrix out;
  out.theta = pointwise_product(derivative(es.Q), es.P);
  if (es.blocks() < 2) return out;

  const RealMatrixFunction dA = derivative(ms.a);
  const Index m = es.dim();
  double gap = 0.0, scale = 0.0;
  for (Index i = 0; i < es.grid().size; ++i) {
    const MatrixXd mm = es.Q.at(i) * dA.at(i) * es.P.at(i);
    const auto th = out.theta.at(i);
    for (Index j = 0; j < m; ++j)
      for (Index k = 0; k < m; ++k) {
        if (es.block_of(j) == es.block_of(k)) continue;
        const double formula = mm(j, k) / (es.lambdas(i, j) - es.lambdas(i, k));
        gap = std::max(gap, std::abs(th(j, k) - formula));
        scale = std::max(scale, std::abs(th(j, k)));
      }
  }
  out.formula_mismatch = scale > 0.0 ? gap / scale : gap;
  return out;
}

Sigma0Result sigma0_strict(const ThetaMatrix& theta, const EigenStructure& es, int mu) {
  if (!es.strict()) throw DomainError("sigma0_strict needs simple eigenvalues");
  Sigma0Result out = empty_result(theta, mu);
  for (Index j = 0; j < es.dim(); ++j) exponential_block(theta, j, mu, out);
  out.min_eigenvalue = kInfinity;
  for (Index j = 0; j < es.dim(); ++j)
    out.min_eigenvalue = std::min(out.min_eigenvalue, out.sigma0.entry(j, j).values().minCoeff());
  return out;
}

Sigma0Result sigma0_blocks(const ThetaMatrix& theta, const EigenStructure& es, int mu,
                           const PicardOptions& options) {
  Sigma0Result out = empty_result(theta, mu);
  const Grid& g = es.grid();
  const Index m = es.dim();
  const DyadicFilterBank bank(g);
  for (Index h = 0; h < es.blocks(); ++h) {
    const Index j0 = es.block_start[h];
    const Index b = es.multiplicities[h];
    if (b == 1) {
      exponential_block(theta, j0, mu, out);
      continue;
    }
    const RealMatrixFunction tb = sub_block(theta.theta, j0, b);
    BlockSolution sol = picard_block(tb, mu, options, bank);
    out.iterations = std::max(out.iterations, sol.iterations);
    out.contraction = std::max(out.contraction, sol.contraction);
    const RealMatrixFunction resid = derivative(sol.x) - picard_rhs(sol.x, tb);
    for (Index c = 0; c < b; ++c)
      for (Index r = 0; r < b; ++r) {
        out.sigma0.data().col(j0 + r + (j0 + c) * m) = sol.x.data().col(r + c * b);
        out.rho.data().col(j0 + r + (j0 + c) * m) = resid.data().col(r + c * b);
      }
  }
  out.min_eigenvalue = min_eigenvalue(out.sigma0);
  return out;
}

Sigma0Result build_sigma0(const ThetaMatrix& theta, const EigenStructure& es,
                          const Sigma0Options& options) {
  auto attempt = [&](int mu) {
    return es.strict() ? sigma0_strict(theta, es, mu) : sigma0_blocks(theta, es, mu, options.picard);
  };
  if (options.mu >= 0) return attempt(options.mu);

  // Beyond log2 of the Nyquist frequency J_mu vanishes and nothing is gained.
  const int ceiling =
      std::min(options.mu_max, static_cast<int>(std::floor(std::log2(es.grid().nyquist_frequency()))));
  std::string last = "no admissible level";
  for (int mu = options.mu_start; mu <= ceiling; ++mu) {
    try {
      Sigma0Result r = attempt(mu);
      if (r.min_eigenvalue >= 0.5) return r;
      last = "Sigma0 not above Id/2 (min eigenvalue " + std::to_string(r.min_eigenvalue) + ")";
    } catch (const ConvergenceError& e) {
      last = e.what();
    }
  }
  throw ConvergenceError("no cut-off level up to mu = " + std::to_string(ceiling) + " works: " + last);
}

ComplexMatrixFunction sigma1(const RealMatrixFunction& sigma0, const EigenStructure& es,
                             const RealMatrixFunction& dA, double xi_norm, double gap_fraction) {
  const Grid& g = es.grid();
  const Index m = es.dim();
  ComplexMatrixFunction out(g, m);
  if (es.blocks() < 2) return out;

  const double spread = (es.lambdas.col(0) - es.lambdas.col(m - 1)).maxCoeff();
  for (Index h = 0; h + 1 < es.blocks(); ++h) {
    const Index a = es.block_start[h], b = es.block_start[h + 1];
    const double gap = (es.lambdas.col(a) - es.lambdas.col(b)).cwiseAbs().minCoeff();
    if (!(gap >= gap_fraction * spread))
      throw NearDegenerateError("eigenvalue blocks " + std::to_string(h) + " and " +
                                std::to_string(h + 1) + " come within " + std::to_string(gap));
  }

  const Complex i_xi(0.0, xi_norm);
  for (Index i = 0; i < g.size; ++i) {
    const MatrixXd sm = sigma0.at(i) * es.Q.at(i) * dA.at(i) * es.P.at(i);
    auto s1 = out.at(i);
    for (Index j = 0; j < m; ++j)
      for (Index k = 0; k < m; ++k) {
        if (es.block_of(j) == es.block_of(k)) continue;
        const double d = es.lambdas(i, j) - es.lambdas(i, k);
        s1(j, k) = i_xi * (sm(j, k) - sm(k, j)) / (d * d);
      }
  }
  return out;
}

ComplexMatrixFunction Symmetrizer::S() const { return S_at(xi_norm); }

ComplexMatrixFunction Symmetrizer::S_at(double rho) const {
  ComplexMatrixFunction out = S0.cast<Complex>();
  out.data() += S1.data() / rho;
  return out;
}

Symmetrizer assemble_and_validate(Sigma0Result sigma0, ComplexMatrixFunction sigma1_,
                                  const MollifiedStructure& ms) {
  const EigenStructure& es = ms.es;
  const Grid& g = es.grid();
  const Index m = es.dim();
  Symmetrizer out;
  out.eps = ms.eps;
  out.xi = es.xi;
  out.xi_norm = es.xi.norm();
  out.S0 = RealMatrixFunction(g, m);
  out.S1 = ComplexMatrixFunction(g, m);
  SymmetrizerReport& rep = out.report;

  for (Index i = 0; i < g.size; ++i) {
    const MatrixXd q = es.Q.at(i);
    out.S0.at(i) = q.transpose() * sigma0.sigma0.at(i) * q;
    out.S1.at(i) = q.transpose().cast<Complex>() * sigma1_.at(i) * q.cast<Complex>();
  }
  const ComplexMatrixFunction s = out.S();
  rep.hermitian_defect_s0 = hermitian_defect(out.S0);
  rep.hermitian_defect_s1 = hermitian_defect(out.S1);
  rep.hermitian_defect_s = hermitian_defect(s);

  Eigen::SelfAdjointEigenSolver<MatrixXcd> csolver;
  Eigen::SelfAdjointEigenSolver<MatrixXd> rsolver;
  rep.k1 = kInfinity;
  rep.k1_s0 = kInfinity;
  rep.k2 = -kInfinity;
  double r0 = 0.0;  // max_t |S^1| / lambda_min(S^0)
  for (Index i = 0; i < g.size; ++i) {
    const MatrixXcd si = s.at(i);
    csolver.compute(0.5 * (si + si.adjoint()), Eigen::EigenvaluesOnly);
    rep.k1 = std::min(rep.k1, csolver.eigenvalues()[0]);
    rep.k2 = std::max(rep.k2, csolver.eigenvalues()[m - 1]);
    const MatrixXd s0 = out.S0.at(i);
    rsolver.compute(0.5 * (s0 + s0.transpose()), Eigen::EigenvaluesOnly);
    const double l0 = rsolver.eigenvalues()[0];
    rep.k1_s0 = std::min(rep.k1_s0, l0);
    const double n1 = MatrixXcd(out.S1.at(i)).norm();
    r0 = l0 > 0.0 ? std::max(r0, n1 / l0) : kInfinity;
    const MatrixXd s0a = s0 * ms.a.at(i);
    rep.s0a_defect = std::max(rep.s0a_defect, (s0a - s0a.transpose()).norm());
  }
  rep.sup_s1 = sup_norm(out.S1);

  // Halve rho while the per-sample certificate lambda_min(S^0) > |S^1| / rho holds.
  rep.r0 = kInfinity;
  for (double rho = out.xi_norm; rho >= 1.0 && rho > r0; rho *= 0.5) rep.r0 = rho;

  for (Index h = 0; h < es.blocks(); ++h) {
    const Index j0 = es.block_start[h], b = es.multiplicities[h];
    for (Index c = j0; c < j0 + b; ++c)
      for (Index r = j0; r < j0 + b; ++r)
        rep.sigma1_diag_block =
            std::max(rep.sigma1_diag_block, sigma1_.data().col(r + c * m).cwiseAbs().maxCoeff());
  }
  rep.mu = sigma0.mu;
  rep.picard_iterations = sigma0.iterations;
  rep.contraction = sigma0.contraction;

  out.Sigma0 = std::move(sigma0.sigma0);
  out.Sigma1 = std::move(sigma1_);
  out.omega = std::move(sigma0.omega);
  out.rho = std::move(sigma0.rho);
  if (!(rep.k1 > 0.0))
    throw BelowR0Error("symmetrizer is not positive definite at |xi| = " +
                       std::to_string(out.xi_norm) + " (K1 = " + std::to_string(rep.k1) + ")");
  return out;
}

RealMatrixFunction g_residual(const RealMatrixFunction& sigma0, const ComplexMatrixFunction& sigma1_,
                              const ThetaMatrix& theta, const EigenStructure& es, double xi_norm) {
  const Grid& g = es.grid();
  const Index m = es.dim();
  const RealMatrixFunction ds = derivative(sigma0);
  RealMatrixFunction out(g, m);
  for (Index i = 0; i < g.size; ++i) {
    const MatrixXd s0 = sigma0.at(i);
    const MatrixXd th = theta.theta.at(i);
    MatrixXd gm = ds.at(i) + s0 * th + th.transpose() * s0;
    const auto s1 = sigma1_.at(i);
    for (Index j = 0; j < m; ++j)
      for (Index k = 0; k < m; ++k)
        gm(j, k) += (Complex(0.0, 1.0 / xi_norm) * (es.lambdas(i, j) - es.lambdas(i, k)) * s1(j, k)).real();
    const MatrixXd q = es.Q.at(i);
    out.at(i) = q.transpose() * gm * q;
  }
  return out;
}

Symmetrizer build_symmetrizer(const MollifiedStructure& ms, const SymmetrizerOptions& options) {
  const double xi_norm = ms.es.xi.norm();
  const ThetaMatrix theta = compute_theta(ms);
  Sigma0Result s0 = build_sigma0(theta, ms.es, options.sigma0);
  ComplexMatrixFunction s1 = sigma1(s0.sigma0, ms.es, derivative(ms.a), xi_norm, options.gap_fraction);
  Symmetrizer symm = assemble_and_validate(std::move(s0), std::move(s1), ms);
  symm.R = g_residual(symm.Sigma0, symm.Sigma1, theta, ms.es, xi_norm);
  symm.report.sup_r = sup_norm(symm.R);
  symm.report.theta_mismatch = theta.formula_mismatch;
  return symm;
}

double energy_identity_defect(const Symmetrizer& symm, const MollifiedStructure& ms, int trials,
                              unsigned long long seed) {
  const Grid& g = symm.S0.grid();
  const Index m = symm.S0.dim();
  const RealMatrixFunction ds0 = derivative(symm.S0);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  double worst = 0.0;
  for (Index i = 0; i < g.size; ++i) {
    const MatrixXcd s1a = MatrixXcd(symm.S1.at(i)) * ms.a.at(i).cast<Complex>();
    for (int t = 0; t < trials; ++t) {
      VectorXcd u(m);
      for (Index j = 0; j < m; ++j) u[j] = Complex(normal(rng), normal(rng));
      const double lhs = (u.adjoint() * ds0.at(i).cast<Complex>() * u)(0).real() +
                         2.0 * (Complex(0.0, -1.0 / symm.xi_norm) * (u.adjoint() * s1a * u)(0)).real() -
                         (u.adjoint() * symm.R.at(i).cast<Complex>() * u)(0).real();
      worst = std::max(worst, std::abs(lhs) / u.squaredNorm());
    }
  }
  return worst;
}

void export_report(const Symmetrizer& symm, std::ostream& out) {
  const SymmetrizerReport& r = symm.report;
  out << "key,value\n";
  auto row = [&out](const char* k, double v) { out << k << ',' << format_number(v) << '\n'; };
  row("xi_norm", symm.xi_norm);
  row("eps", symm.eps);
  row("mu", r.mu);
  row("K1", r.k1);
  row("K2", r.k2);
  row("K1_S0", r.k1_s0);
  row("R0", r.r0);
  row("sup_R", r.sup_r);
  row("sup_S1", r.sup_s1);
  row("hermitian_defect_S0", r.hermitian_defect_s0);
  row("hermitian_defect_S1", r.hermitian_defect_s1);
  row("hermitian_defect_S", r.hermitian_defect_s);
  row("S0A_defect", r.s0a_defect);
  row("sigma1_diag_block", r.sigma1_diag_block);
  row("theta_mismatch", r.theta_mismatch);
  row("picard_iterations", r.picard_iterations);
  row("picard_contraction", r.contraction);
}

}  // namespace hypsym
