#include "hypsym/wave_example.hpp"

#include <algorithm>
#include <cmath>

namespace hypsym {

namespace {

using Eigen::MatrixXd;

double sup_abs(const Eigen::VectorXd& v) { return v.cwiseAbs().maxCoeff(); }

RealFunction map(const RealFunction& f, double (*fn)(double)) {
  RealFunction out = f;
  out.mutable_values() = f.values().unaryExpr(fn);
  return out;
}

}  // namespace

WaveCoefficient wave_coefficient(const RealFunction& alpha) {
  if (!alpha.values().allFinite()) throw DomainError("wave coefficient is not finite");
  WaveCoefficient out;
  out.alpha = alpha;
  out.alpha_min = alpha.values().minCoeff();
  out.alpha_max = alpha.values().maxCoeff();
  if (!(out.alpha_min > 0.0)) throw DomainError("wave coefficient alpha must be positive");
  out.a = map(alpha, [](double x) { return std::sqrt(x); });
  return out;
}

CoefficientMatrices wave_system(const RealFunction& alpha, RegularityClass regularity) {
  const WaveCoefficient w = wave_coefficient(alpha);
  RealMatrixFunction a(alpha.grid(), 2);
  a.set_entry(0, 1, RealFunction::constant(alpha.grid(), 1.0));
  a.set_entry(1, 0, w.alpha);
  return {{a}, regularity};
}

EigenStructure closed_form_eigenstructure(const RealFunction& a, double xi) {
  const Grid& g = a.grid();
  EigenStructure es;
  es.lambdas.resize(g.size, 2);
  es.lambdas.col(0) = a.values() * std::abs(xi);
  es.lambdas.col(1) = -a.values() * std::abs(xi);
  es.P = RealMatrixFunction(g, 2);
  es.Q = RealMatrixFunction(g, 2);
  for (Index i = 0; i < g.size; ++i) {
    const double ai = a(i), n = std::sqrt(1.0 + ai * ai);
    es.P.at(i) << 1.0 / n, 1.0 / n, ai / n, -ai / n;
    es.Q.at(i) << n / 2.0, n / (2.0 * ai), n / 2.0, -n / (2.0 * ai);
  }
  es.multiplicities = {1, 1};
  es.block_start = {0, 1};
  es.xi = Eigen::VectorXd::Constant(1, xi);
  es.max_condition = 0.0;
  return es;
}

ThetaMatrix closed_form_theta(const RealFunction& a) {
  const RealFunction da = derivative(a);
  ThetaMatrix out;
  out.theta = RealMatrixFunction(a.grid(), 2);
  for (Index i = 0; i < a.size(); ++i) {
    const double ai = a(i), d = da(i);
    const double diag = 0.5 * (2.0 * ai * d / (1.0 + ai * ai) - d / ai);
    const double off = d / (2.0 * ai);
    out.theta.at(i) << diag, off, off, diag;
  }
  return out;
}

ComplexFunction closed_form_sigma_tilde(const RealFunction& a, SigmaSign sign) {
  const RealFunction da = derivative(a);
  const double s = sign == SigmaSign::corrected ? 1.0 : -1.0;
  ComplexFunction out = ComplexFunction::constant(a.grid(), 0.0);
  for (Index i = 0; i < a.size(); ++i)
    out.mutable_values()[i] = Complex(0.0, s * da(i) / (2.0 * a(i) * (1.0 + a(i) * a(i))));
  return out;
}

Symmetrizer closed_form_symmetrizer(const RealFunction& a, double xi, SigmaSign sign) {
  const Grid& g = a.grid();
  const RealFunction alpha = a * a;
  const MollifiedStructure ms{closed_form_eigenstructure(a, xi),
                              assemble_symbol(wave_system(alpha), Eigen::VectorXd::Constant(1, xi)), 0.0};

  Sigma0Result s0;
  s0.sigma0 = RealMatrixFunction(g, 2);
  s0.rho = RealMatrixFunction(g, 2);
  RealFunction sigma = a;
  sigma.mutable_values() = a.values().array() / (1.0 + a.values().array().square());
  s0.sigma0.set_entry(0, 0, sigma);
  s0.sigma0.set_entry(1, 1, sigma);
  const RealFunction omega = map(sigma, [](double x) { return std::log(x); });
  s0.omega = {omega, omega};
  s0.min_eigenvalue = sigma.values().minCoeff();

  const ComplexFunction tilde = closed_form_sigma_tilde(a, sign);
  ComplexMatrixFunction s1(g, 2);
  s1.set_entry(0, 1, tilde);
  ComplexFunction conj = tilde;
  conj.mutable_values() = tilde.values().conjugate();
  s1.set_entry(1, 0, conj);

  Symmetrizer symm = assemble_and_validate(std::move(s0), std::move(s1), ms);
  symm.R = g_residual(symm.Sigma0, symm.Sigma1, closed_form_theta(a), ms.es, std::abs(xi));
  symm.report.sup_r = sup_norm(symm.R);
  return symm;
}

double tarama_energy(double a, double da, double xi, const Eigen::Vector2cd& u) {
  const Complex v = u[0] / Complex(0.0, -xi);
  const Complex vt = u[1];
  return 0.5 * (a * xi * xi * std::norm(v) + std::norm(vt) / a +
                da / (2.0 * a * a) * (vt * std::conj(v)).real());
}

WaveCrossCheck cross_check(const RealFunction& a, double xi, double eps, int mu) {
  const Grid& g = a.grid();
  const Eigen::VectorXd xv = Eigen::VectorXd::Constant(1, xi);
  const RealMatrixFunction symbol = assemble_symbol(wave_system(a * a), xv);
  const EigenStructure es = eigendecompose(symbol, xv);
  const MollifiedStructure ms = eps > 0.0 ? mollify_eigenstructure(es, eps) : MollifiedStructure{es, symbol, 0.0};
  SymmetrizerOptions opt;
  opt.sigma0.mu = mu;
  const Symmetrizer symm = build_symmetrizer(ms, opt);
  const ThetaMatrix theta = compute_theta(ms);

  // Coefficient carried by the eigenvectors, eigenvalue coefficient, column norm.
  RealFunction at = a, ae = a, rn = a;
  for (Index i = 0; i < g.size; ++i) {
    const auto p = ms.es.P.at(i);
    at.mutable_values()[i] = p(1, 0) / p(0, 0);
    ae.mutable_values()[i] = ms.es.lambdas(i, 0) / std::abs(xi);
    rn.mutable_values()[i] = std::hypot(p(0, 0), p(1, 0));
  }
  const ThetaMatrix th_c = closed_form_theta(at);
  const ComplexFunction st_c = closed_form_sigma_tilde(at);
  const ComplexFunction st_pub = closed_form_sigma_tilde(at, SigmaSign::published);

  WaveCrossCheck out;
  const double sc0 = at(0) / (1.0 + at(0) * at(0));
  out.normalization = 1.0 / (sc0 * rn(0) * rn(0));
  const double c = out.normalization;

  double ratio_dev = 0.0, s0_sup = 0.0;
  for (Index i = 0; i < g.size; ++i) {
    const auto tg = theta.theta.at(i);
    const auto tc = th_c.theta.at(i);
    out.theta_diagonal = std::max({out.theta_diagonal, std::abs(tg(0, 0) - tc(0, 0)), std::abs(tg(1, 1) - tc(1, 1))});
    out.theta_off = std::max({out.theta_off, std::abs(tg(0, 1) - tc(0, 1)), std::abs(tg(1, 0) - tc(1, 0))});
    out.sigma_tilde = std::max(out.sigma_tilde, std::abs(symm.Sigma1.at(i)(0, 1) - c * st_c(i)));
    out.published_sign_gap = std::max(out.published_sign_gap, std::abs(symm.Sigma1.at(i)(0, 1) - c * st_pub(i)));
    MatrixXd s0c(2, 2);
    s0c << 0.5 * at(i), 0.0, 0.0, 0.5 / at(i);
    s0_sup = std::max(s0_sup, s0c.norm());
    out.s0 = std::max(out.s0, (MatrixXd(symm.S0.at(i)) - c * s0c).norm());
    const double ai = at(i), n = std::sqrt(1.0 + ai * ai);
    MatrixXd qc(2, 2);
    qc << n / 2.0, n / (2.0 * ai), n / 2.0, -n / (2.0 * ai);
    out.q_rows = std::max(out.q_rows, (MatrixXd(ms.es.Q.at(i)) - qc).norm());
    ratio_dev = std::max(ratio_dev, std::abs(rn(i) * rn(i) * at(i) / ae(i) - 1.0));
  }

  out.theta_budget = sup_abs(derivative(map(rn, [](double x) { return std::log(x); })).values());
  out.rho_norm = std::max(sup_abs(symm.rho.entry(0, 0).values()), sup_abs(symm.rho.entry(1, 1).values()));
  const double drift = std::exp(g.window * out.rho_norm);
  out.sigma_budget = c * sup_abs(st_c.values().cwiseAbs()) * ((1.0 + ratio_dev) * drift - 1.0);
  const double s0_budget = c * s0_sup * (drift - 1.0);

  const double tol = out.tolerance;
  out.pass = out.theta_diagonal <= tol + out.theta_budget && out.theta_off <= tol &&
             out.sigma_tilde <= tol + out.sigma_budget && out.s0 <= tol + s0_budget;
  if (eps == 0.0) out.pass = out.pass && out.q_rows <= 1e-9 * (1.0 + s0_sup);
  return out;
}

}  // namespace hypsym
