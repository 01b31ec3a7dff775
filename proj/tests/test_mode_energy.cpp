#include "doctest.h"

#include <unsupported/Eigen/MatrixFunctions>

#include "hypsym/mode_energy.hpp"
#include "hypsym/wave_example.hpp"
#include "hypsym/zygmund.hpp"
#include "oracles.hpp"

using namespace hypsym;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

namespace {

VectorXd vec(double x) { return VectorXd::Constant(1, x); }

VectorXcd e1(Index m = 2) {
  VectorXcd u = VectorXcd::Zero(m);
  u[0] = 1.0;
  return u;
}

RealMatrixFunction wave_symbol(const RealFunction& alpha, double xi) {
  return assemble_symbol(wave_system(alpha), vec(xi));
}

RealFunction rough_alpha(const Grid& g, RoughKind kind = RoughKind::weierstrass) {
  RoughParams p;
  p.depth = 20;
  p.offset = 3.0;
  p.require_positive = true;
  return generate_rough(kind, p, g);
}

}  // namespace

TEST_CASE("periodic spline") {
  auto fn = [](double t) { return std::sin(3.0 * t) + 0.5 * std::cos(5.0 * t); };
  double prev = 0.0;
  for (Index n : {256, 512}) {
    const Grid g = Grid::periodic(n);
    const RealFunction f = RealFunction::sample(g, fn);
    const PeriodicSpline sp(g, MatrixXd(f.values()));
    CHECK(sp.columns() == 1);
    VectorXd out(1);
    double node = 0.0, mid = 0.0;
    for (Index i = 0; i < n; ++i) {
      sp.evaluate(g.time(i), out);
      node = std::max(node, std::abs(out[0] - f(i)));
      const double t = g.time(i) + 0.5 * g.spacing();
      sp.evaluate(t, out);
      mid = std::max(mid, std::abs(out[0] - fn(t)));
    }
    CHECK(node < 1e-13);
    CHECK(mid < 5e-6);
    // Fourth-order convergence.
    if (prev > 0.0) CHECK(prev / mid > 14.0);
    prev = mid;
    // Wraps around the period.
    sp.evaluate(kTwoPi + 0.3, out);
    CHECK(std::abs(out[0] - fn(0.3)) < 5e-6);
  }
}

TEST_CASE("scalar phase rotation") {
  const Grid g = Grid::periodic(512);
  const double xi = 64.0;
  const RealFunction lambda = RealFunction::sample(g, [](double t) { return 2.0 + std::sin(t); });
  RealMatrixFunction a(g, 2);
  a.set_entry(0, 0, lambda * xi);
  a.set_entry(1, 1, lambda * xi);
  VectorXcd u0(2);
  u0 << Complex(0.6, 0.0), Complex(0.0, 0.8);
  IntegratorOptions opt;
  opt.tol = 1e-10;
  const ModeState s = integrate_mode(a, xi, u0, opt);
  CHECK(s.samples() == g.size + 1);
  double worst = 0.0, modulus = 0.0;
  for (Index i = 0; i < s.samples(); ++i) {
    const double t = s.time(i);
    const Complex phase = std::exp(Complex(0.0, -xi * (2.0 * t + 1.0 - std::cos(t))));
    worst = std::max(worst, (VectorXcd(s.u.row(i).transpose()) - phase * u0).norm());
    modulus = std::max(modulus, std::abs(s.u.row(i).norm() - 1.0));
  }
  MESSAGE("phase error " << worst << " with " << s.substeps << " substeps per cell");
  CHECK(worst < 1e-8);
  CHECK(modulus < 1e-10);
}

TEST_CASE("zero symbol with constant forcing") {
  const Grid g = Grid::periodic(64);
  const RealMatrixFunction zero(g, 2);
  MatrixXcd f(g.size + 1, 2);
  f.col(0).setConstant(Complex(1.0, -2.0));
  f.col(1).setConstant(Complex(0.5, 0.0));
  const ModeState s = integrate_mode(zero, 1.0, e1(), {}, f);
  for (Index i = 0; i < s.samples(); ++i) {
    const VectorXcd expect = e1() + s.time(i) * VectorXcd(f.row(0).transpose());
    CHECK((VectorXcd(s.u.row(i).transpose()) - expect).norm() < 1e-12);
  }
}

TEST_CASE("piecewise-constant integration against the exponential product") {
  const Grid g = Grid::periodic(512);
  const double xi = 256.0;
  const RealMatrixFunction a = wave_symbol(rough_alpha(g), xi);
  IntegratorOptions opt;
  opt.interpolation = Interpolation::piecewise_constant;
  opt.tol = 1e-9;
  opt.max_substeps = 1 << 16;
  VectorXcd u0(2);
  u0 << Complex(0.3, 0.1), Complex(-0.2, 0.9);
  const ModeState s = integrate_mode(a, xi, u0, opt);

  const double h = g.spacing();
  VectorXcd u = u0;
  double worst = 0.0;
  for (Index i = 0; i < g.size; ++i) {
    const MatrixXcd step = (MatrixXcd(a.at(i).cast<Complex>()) * Complex(0.0, -h)).exp();
    u = step * u;
    worst = std::max(worst, (VectorXcd(s.u.row(i + 1).transpose()) - u).norm());
  }
  MESSAGE("expm oracle error " << worst << ", |u(T)| " << u.norm());
  CHECK(worst < 1e-8);
}

TEST_CASE("linearity and zero data") {
  const Grid g = Grid::periodic(1024);
  const RealMatrixFunction a =
      wave_symbol(RealFunction::sample(g, [](double t) { return 2.0 + std::sin(t); }), 32.0);
  IntegratorOptions opt;
  opt.tol = 1e-9;
  VectorXcd v(2), w(2);
  v << Complex(1.0, 0.5), Complex(0.0, -1.0);
  w << Complex(0.2, 0.0), Complex(0.7, 0.3);
  const Complex ca(0.4, -1.1), cb(2.0, 0.5);
  const ModeState sv = integrate_mode(a, 32.0, v, opt);
  const ModeState sw = integrate_mode(a, 32.0, w, opt);
  const ModeState sc = integrate_mode(a, 32.0, ca * v + cb * w, opt);
  CHECK((sc.u - (ca * sv.u + cb * sw.u)).cwiseAbs().maxCoeff() < 1e-12);

  const ModeState zero = integrate_mode(a, 32.0, VectorXcd::Zero(2), opt);
  CHECK(zero.u.cwiseAbs().maxCoeff() == 0.0);
  const EigenStructure es = eigendecompose(a, vec(32.0));
  const Symmetrizer symm = build_symmetrizer(mollify_eigenstructure(es, 1.0 / 32.0));
  const EnergyTrace tr = energy_trace(symm, zero);
  CHECK(tr.E.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("energy is conserved for constant coefficients") {
  const Grid g = Grid::periodic(4096);
  const double xi = 128.0;
  const RealMatrixFunction a = wave_symbol(RealFunction::constant(g, 4.0), xi);
  const EigenStructure es = eigendecompose(a, vec(xi));
  const MollifiedStructure ms = mollify_eigenstructure(es, 1.0 / xi);
  const Symmetrizer symm = build_symmetrizer(ms);
  IntegratorOptions opt;
  opt.tol = 1e-11;
  const ModeState s = integrate_mode(a, xi, e1(), opt);
  const EnergyTrace tr = energy_trace(symm, s);
  const double drift = (tr.E.array() - tr.E[0]).abs().maxCoeff() / tr.E[0];
  MESSAGE("relative energy drift " << drift);
  CHECK(drift < 1e-8);
  // |u|^2 itself oscillates since A is not symmetric.
  CHECK((tr.u2.array() - 1.0).abs().maxCoeff() > 0.1);
  CHECK(tr.band_lo > 0.0);
  CHECK(tr.band_hi >= tr.band_lo);

  const GronwallCheck gc = gronwall_check(symm, ms.a, a, s, tr);
  CHECK(gc.constant < 1e-6);
  CHECK(gc.en_part_violation < 1e-8);
}

TEST_CASE("energy derivative against finite differences") {
  const Grid g = Grid::periodic(8192);
  const double xi = 16.0;
  const RealFunction alpha = RealFunction::sample(g, [](double t) { return 2.0 + std::sin(t) + 0.3 * std::cos(3.0 * t); });
  const RealMatrixFunction a = wave_symbol(alpha, xi);
  const MollifiedStructure ms = mollify_eigenstructure(eigendecompose(a, vec(xi)), 1.0 / xi);
  const Symmetrizer symm = build_symmetrizer(ms);
  IntegratorOptions opt;
  opt.tol = 1e-11;
  const ModeState s = integrate_mode(a, xi, e1(), opt);
  const EnergyTrace tr = energy_trace(symm, s);
  const GronwallCheck gc = gronwall_check(symm, ms.a, a, s, tr);
  const VectorXd fd = oracle::fd_derivative(tr.E.head(g.size), g.spacing());
  const double scale = gc.dEdt.cwiseAbs().maxCoeff();
  double worst = 0.0;
  for (Index i = 2; i + 2 < g.size; ++i) worst = std::max(worst, std::abs(fd[i] - gc.dEdt[i]));
  MESSAGE("dE/dt scale " << scale << ", finite-difference gap " << worst);
  CHECK(worst < 1e-3 * scale);
  CHECK(gc.constant > 0.0);
  CHECK(gc.en_part_violation <= 1e-12);
}

TEST_CASE("Gronwall bound on a rough coefficient") {
  const Grid g = Grid::periodic(1 << 12);
  const double xi = 128.0;
  RoughParams p;
  p.depth = 9;
  p.offset = 3.0;
  p.require_positive = true;
  const RealMatrixFunction a = wave_symbol(generate_rough(RoughKind::weierstrass, p, g), xi);
  const MollifiedStructure ms = mollify_eigenstructure(eigendecompose(a, vec(xi)), 1.0 / xi);
  const Symmetrizer symm = build_symmetrizer(ms);
  const ModeState s = integrate_mode(a, xi, e1());
  const EnergyTrace tr = energy_trace(symm, s);
  const GronwallCheck gc = gronwall_check(symm, ms.a, a, s, tr);
  MESSAGE("C " << gc.constant << ", E band [" << tr.band_lo << ", " << tr.band_hi << "]");
  CHECK(std::isfinite(gc.constant));
  CHECK(gc.en_part_violation <= 1e-12);
}

TEST_CASE("loss fit") {
  const Grid g = Grid::periodic(1024);
  const CoefficientMatrices flat = wave_system(RealFunction::constant(g, 1.0));
  LadderOptions opt;
  opt.ks = {2, 3, 4, 5};
  opt.integrator.tol = 1e-10;
  const LadderResult r = run_energy_ladder(flat, opt);
  REQUIRE(r.rungs.size() == 4);
  CHECK(r.fit.betas.size() == 5);
  for (double b : r.fit.betas) CHECK(std::abs(b) < 1e-8);
  CHECK(std::abs(r.fit.beta_tilde) < 1e-8);
  CHECK(r.fit.gamma == 1.0);
  for (double phi : r.fit.phi) CHECK(std::abs(phi) < 1e-8);
  CHECK(r.gronwall_constant < 1e-6);

  // Synthetic ladder with |u(t, 2^k)| = 2^(0.3 k t^(1/2)): beta = 0.3 t^(1/2) for p = 2.
  std::vector<ModeState> states;
  for (int k : {3, 4, 5, 6}) {
    ModeState s;
    s.grid = g;
    s.xi = std::ldexp(1.0, k);
    s.u.resize(g.size + 1, 1);
    for (Index i = 0; i <= g.size; ++i) s.u(i, 0) = std::exp2(0.3 * k * std::sqrt(g.time(i)));
    states.push_back(s);
  }
  const LossFit fit = fit_loss(states, 2.0);
  CHECK(fit.gamma == doctest::Approx(0.5));
  CHECK(fit.beta_tilde == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(fit.residual < 1e-12);
  CHECK(fit.ks == std::vector<int>{3, 4, 5, 6});
  for (double r : fit.slope_residuals) CHECK(r < 1e-12);

  std::ostringstream csv;
  export_loss_csv(fit, csv);
  CHECK(csv.str().rfind("t,beta,beta_model,slope_residual,intercept\n", 0) == 0);

  states.resize(2);
  CHECK_THROWS_AS(fit_loss(states, 2.0), FitError);
}

TEST_CASE("integrator and energy errors") {
  const Grid g = Grid::periodic(512);
  const RealMatrixFunction rough = wave_symbol(rough_alpha(g), 16.0);
  CHECK_THROWS_AS(integrate_mode(rough, 16.0, e1()), ResolutionError);
  IntegratorOptions pc;
  pc.interpolation = Interpolation::piecewise_constant;
  CHECK_NOTHROW(integrate_mode(rough, 16.0, e1(), pc));

  const RealMatrixFunction smooth =
      wave_symbol(RealFunction::sample(g, [](double t) { return 2.0 + std::sin(t); }), 1 << 14);
  IntegratorOptions tight;
  tight.max_substeps = 8;
  CHECK_THROWS_AS(integrate_mode(smooth, 1 << 14, e1(), tight), ResolutionError);
  CHECK_THROWS_AS(integrate_mode(smooth, 1 << 14, e1(3)), DomainError);

  const RealMatrixFunction low =
      wave_symbol(RealFunction::sample(g, [](double t) { return 2.0 + std::sin(t); }), 1.0 / 64.0);
  const MollifiedStructure ms = mollify_eigenstructure(eigendecompose(low, vec(1.0 / 64.0)), 1.0);
  CHECK_THROWS_AS(build_symmetrizer(ms), BelowR0Error);

  const RealMatrixFunction a = wave_symbol(RealFunction::constant(g, 2.0), 8.0);
  const Symmetrizer symm = build_symmetrizer(mollify_eigenstructure(eigendecompose(a, vec(8.0)), 1.0 / 8.0));
  const ModeState other = integrate_mode(wave_symbol(RealFunction::constant(g, 2.0), 16.0), 16.0, e1());
  CHECK_THROWS_AS(energy_trace(symm, other), DomainError);

  std::ostringstream csv;
  export_energy_csv(energy_trace(symm, integrate_mode(a, 8.0, e1())), csv, 64);
  std::string line;
  std::istringstream in(csv.str());
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 1 + 9);
}
