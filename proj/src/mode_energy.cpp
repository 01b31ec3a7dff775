#include "hypsym/mode_energy.hpp"

#include "hypsym/csv.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

namespace hypsym {

namespace {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

/// Ratio of the l1 spectrum in the top quarter band to the whole l1 spectrum.
double top_band_fraction(const RealFunction& f) {
  const VectorXc s = transform(f);
  const Index n = f.size();
  double top = 0.0, all = 0.0;
  for (Index k = 0; k < n; ++k) {
    const double a = std::abs(s[k]);
    all += a;
    if (std::abs(f.grid().wavenumber(k)) >= n / 4) top += a;
  }
  return all > 0.0 ? top / all : 0.0;
}

/// Samples of an (N or window) x c array per cell, as seen by the integrator.
class CellInterpolant {
 public:
  CellInterpolant(const Grid& g, const MatrixXd& samples, Interpolation mode)
      : mode_(mode), samples_(samples) {
    if (mode_ == Interpolation::spline) spline_ = PeriodicSpline(g, samples);
  }
  /// Value at t = cell start + x.
  void at(Index cell, double x, double h, Eigen::Ref<VectorXd> out) const {
    if (mode_ == Interpolation::piecewise_constant) {
      out = samples_.row(cell % samples_.rows()).transpose();
      return;
    }
    spline_.evaluate(static_cast<double>(cell) * h + x, out);
  }

 private:
  Interpolation mode_;
  MatrixXd samples_;
  PeriodicSpline spline_;
};

}  // namespace

PeriodicSpline::PeriodicSpline(const Grid& grid, const Eigen::MatrixXd& samples)
    : grid_(grid), values_(samples) {
  validate(grid_);
  if (samples.rows() != grid.size) throw DomainError("spline samples do not match the grid");
  const double h = grid.spacing();
  moments_.resize(samples.rows(), samples.cols());
  for (Index c = 0; c < samples.cols(); ++c) {
    const RealFunction y(grid, samples.col(c));
    // (M_{i-1} + 4 M_i + M_{i+1}) / 6 = (y_{i+1} - 2 y_i + y_{i-1}) / h^2, diagonal in Fourier.
    moments_.col(c) = filter(y, [h](double w) {
                        const double cs = std::cos(w * h);
                        return 6.0 * (2.0 * cs - 2.0) / (h * h * (4.0 + 2.0 * cs));
                      }).values();
  }
}

void PeriodicSpline::evaluate(double t, Eigen::Ref<Eigen::VectorXd> out) const {
  const double h = grid_.spacing();
  const Index n = grid_.size;
  double cell = std::floor(t / h);
  double x = t - cell * h;
  if (x < 0.0) x = 0.0;
  if (x > h) x = h;
  const Index i = ((static_cast<Index>(cell) % n) + n) % n;
  const Index j = (i + 1) % n;
  const double a = h - x;
  const double wa = a * a * a / (6.0 * h), wb = x * x * x / (6.0 * h);
  for (Index c = 0; c < values_.cols(); ++c) {
    const double mi = moments_(i, c), mj = moments_(j, c);
    out[c] = mi * wa + mj * wb + (values_(i, c) - mi * h * h / 6.0) * a / h +
             (values_(j, c) - mj * h * h / 6.0) * x / h;
  }
}

ModeState integrate_mode(const RealMatrixFunction& symbol, double xi, const Eigen::VectorXcd& u0,
                         const IntegratorOptions& opt, const std::optional<Eigen::MatrixXcd>& forcing) {
  const Grid& g = symbol.grid();
  const Index m = symbol.dim();
  if (u0.size() != m) throw DomainError("initial vector does not match the system size");
  const double h = g.spacing();
  const double t_end = opt.t_end < 0.0 ? g.window : opt.t_end;
  const Index cells = static_cast<Index>(std::llround(t_end / h));
  if (cells < 1 || std::abs(static_cast<double>(cells) * h - t_end) > 1e-9 * t_end || t_end > g.window * (1.0 + 1e-12))
    throw DomainError("integration interval must be a positive multiple of the spacing inside the window");
  if (forcing && (forcing->rows() != cells + 1 || forcing->cols() != m))
    throw DomainError("forcing must have one row per output sample");

  if (opt.interpolation == Interpolation::spline)
    for (Index e = 0; e < m * m; ++e) {
      const RealFunction entry(g, symbol.data().col(e));
      if (top_band_fraction(entry) > 1e-8)
        throw ResolutionError("symbol is not resolved by the grid (energy near the Nyquist frequency)");
    }

  double omega = 0.0;
  for (Index i = 0; i < g.size; ++i) omega = std::max(omega, symbol.at(i).norm());
  Index sub = static_cast<Index>(std::ceil(h * (1.0 + omega) / opt.cfl));
  if (omega > 0.0 && opt.tol > 0.0) {
    // RK4 on an oscillation: global error about T w (h w)^4 / 120.
    const double hw = std::pow(120.0 * opt.tol / (t_end * omega), 0.25);
    sub = std::max(sub, static_cast<Index>(std::ceil(h * omega / hw)));
  }
  sub = std::max<Index>(sub, 1);
  if (sub > opt.max_substeps)
    throw ResolutionError("step rule needs " + std::to_string(sub) + " substeps per cell");

  const CellInterpolant a_of_t(g, symbol.data(), opt.interpolation);
  std::optional<CellInterpolant> fr, fi;
  if (forcing) {
    // Forcing rows cover [0, t_end]; pad to a full period for the spline.
    MatrixXd re = MatrixXd::Zero(g.size, m), im = MatrixXd::Zero(g.size, m);
    for (Index i = 0; i < g.size; ++i) {
      const Index r = std::min(i, cells);
      re.row(i) = forcing->row(r).real();
      im.row(i) = forcing->row(r).imag();
    }
    fr.emplace(g, re, opt.interpolation);
    fi.emplace(g, im, opt.interpolation);
  }

  ModeState out;
  out.grid = g;
  out.xi = xi;
  out.forcing = forcing;
  out.substeps = sub;
  out.u.resize(cells + 1, m);
  out.u.row(0) = u0.transpose();

  const double hs = h / static_cast<double>(sub);
  VectorXd ae(m * m), fre(m), fim(m);
  MatrixXcd a0(m, m), a1(m, m), a2(m, m);
  VectorXcd f0 = VectorXcd::Zero(m), f1 = VectorXcd::Zero(m), f2 = VectorXcd::Zero(m);
  auto load = [&](Index cell, double x, MatrixXcd& a, VectorXcd& f) {
    a_of_t.at(cell, x, h, ae);
    for (Index c = 0; c < m; ++c)
      for (Index r = 0; r < m; ++r) a(r, c) = Complex(0.0, -ae[r + c * m]);
    if (forcing) {
      fr->at(cell, x, h, fre);
      fi->at(cell, x, h, fim);
      for (Index r = 0; r < m; ++r) f[r] = Complex(fre[r], fim[r]);
    }
  };

  VectorXcd y = u0, k1(m), k2(m), k3(m), k4(m), tmp(m);
  for (Index cell = 0; cell < cells; ++cell) {
    load(cell, 0.0, a0, f0);
    for (Index s = 0; s < sub; ++s) {
      const double x = hs * static_cast<double>(s);
      load(cell, x + 0.5 * hs, a1, f1);
      if (s + 1 < sub) {
        load(cell, x + hs, a2, f2);
      } else if (opt.interpolation == Interpolation::piecewise_constant) {
        a2 = a1;
        f2 = f1;
      } else {
        load(cell + 1, 0.0, a2, f2);
      }
      k1.noalias() = a0 * y;
      k1 += f0;
      tmp = y + 0.5 * hs * k1;
      k2.noalias() = a1 * tmp;
      k2 += f1;
      tmp = y + 0.5 * hs * k2;
      k3.noalias() = a1 * tmp;
      k3 += f1;
      tmp = y + hs * k3;
      k4.noalias() = a2 * tmp;
      k4 += f2;
      y += (hs / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      a0 = a2;
      f0 = f2;
    }
    out.u.row(cell + 1) = y.transpose();
  }
  if (!out.u.allFinite()) throw ResolutionError("trajectory is not finite");
  return out;
}

EnergyTrace energy_trace(const Symmetrizer& symm, const ModeState& state) {
  if (!(state.grid == symm.S0.grid())) throw DomainError("state and symmetrizer grids differ");
  if (std::abs(state.xi - symm.xi_norm) > 1e-12 * symm.xi_norm)
    throw DomainError("state and symmetrizer frequencies differ");
  if (state.xi < symm.report.r0)
    throw BelowR0Error("|xi| is below R0; use |u|^2 as the energy there");
  const ComplexMatrixFunction s = symm.S();
  const Index n = state.samples(), size = state.grid.size;
  EnergyTrace out;
  out.t.resize(n);
  out.E.resize(n);
  out.e.resize(n);
  out.u2.resize(n);
  out.band_lo = kInfinity;
  out.band_hi = 0.0;
  for (Index i = 0; i < n; ++i) {
    const VectorXcd u = state.u.row(i).transpose();
    out.t[i] = state.time(i);
    out.E[i] = (u.adjoint() * s.at(i % size) * u)(0).real();
    out.e[i] = std::sqrt(std::max(out.E[i], 0.0));
    out.u2[i] = u.squaredNorm();
    if (out.u2[i] > 0.0) {
      out.band_lo = std::min(out.band_lo, out.E[i] / out.u2[i]);
      out.band_hi = std::max(out.band_hi, out.E[i] / out.u2[i]);
    }
  }
  return out;
}

GronwallCheck gronwall_check(const Symmetrizer& symm, const RealMatrixFunction& a_eps,
                             const RealMatrixFunction& symbol, const ModeState& state,
                             const EnergyTrace& trace) {
  const ComplexMatrixFunction s = symm.S();
  const ComplexMatrixFunction ds = derivative(s);
  const ComplexMatrixFunction ds1 = derivative(symm.S1);
  const Index n = state.samples(), size = state.grid.size;
  const double h = state.grid.spacing();
  GronwallCheck out;
  out.dEdt.resize(n);
  out.weight.resize(n);
  VectorXd fnorm = VectorXd::Zero(n), bracket(n);
  for (Index i = 0; i < n; ++i) {
    const Index j = i % size;
    const VectorXcd u = state.u.row(i).transpose();
    VectorXcd rhs = Complex(0.0, -1.0) * (symbol.at(j).cast<Complex>() * u);
    if (state.forcing) {
      const VectorXcd f = state.forcing->row(i).transpose();
      rhs += f;
      fnorm[i] = f.norm();
    }
    out.dEdt[i] = (u.adjoint() * ds.at(j) * u)(0).real() + 2.0 * (u.adjoint() * s.at(j) * rhs)(0).real();
    bracket[i] = 1.0 + (MatrixXd(symbol.at(j)) - MatrixXd(a_eps.at(j))).norm() +
                 MatrixXcd(ds1.at(j)).norm() / symm.xi_norm;
    out.weight[i] = fnorm[i] * trace.e[i] + bracket[i] * trace.E[i];
    if (out.weight[i] > 0.0) out.constant = std::max(out.constant, std::max(out.dEdt[i], 0.0) / out.weight[i]);
  }

  // e(t) <= exp(I(t)) (e(0) + int_0^t exp(-I) C |f| / 2), I = int (C/2) bracket (upper sums).
  const double c = out.constant;
  double integral = 0.0, forced = 0.0;
  for (Index i = 1; i < n; ++i) {
    const double step = 0.5 * c * h * std::max(bracket[i - 1], bracket[i]);
    forced += 0.5 * c * h * std::max(fnorm[i - 1] * std::exp(-integral), fnorm[i] * std::exp(-integral));
    integral += step;
    const double bound = std::exp(integral) * (trace.e[0] + forced);
    if (bound > 0.0) out.en_part_violation = std::max(out.en_part_violation, (trace.e[i] - bound) / bound);
  }
  return out;
}

int LossFit::increases() const {
  int n = 0;
  double prev = 0.0;
  for (double b : betas) {
    if (b > prev) ++n;
    prev = b;
  }
  return n;
}

LossFit fit_loss(const std::vector<ModeState>& states, double p, int samples) {
  if (samples < 1) throw FitError("need at least one sampled time");
  if (!(p >= 1.0)) throw DomainError("exponent p must be >= 1");
  LossFit fit;
  fit.gamma = std::isinf(p) ? 1.0 : 1.0 - 1.0 / p;
  std::vector<const ModeState*> usable;
  double t_end = kInfinity;
  for (const ModeState& s : states) {
    if (!(s.xi > 0.0) || s.samples() < 2 || !s.u.allFinite() || s.u.rowwise().norm().minCoeff() <= 0.0) continue;
    usable.push_back(&s);
    t_end = std::min(t_end, s.time(s.samples() - 1));
  }
  if (usable.size() < 3) throw FitError("fewer than three usable frequencies");
  std::sort(usable.begin(), usable.end(), [](auto* a, auto* b) { return a->xi < b->xi; });

  std::vector<double> ks;
  for (const ModeState* s : usable) {
    ks.push_back(std::log2(s->xi));
    fit.ks.push_back(static_cast<int>(std::lround(ks.back())));
    const Index last = std::min<Index>(s->samples() - 1, std::llround(t_end / s->grid.spacing()));
    fit.phi.push_back(std::log(s->u.row(last).norm() / s->u.row(0).norm()));
  }
  const double kn = static_cast<double>(ks.size());
  double kmean = 0.0;
  for (double k : ks) kmean += k / kn;
  double sxx = 0.0;
  for (double k : ks) sxx += (k - kmean) * (k - kmean);

  for (int i = 1; i <= samples; ++i) {
    // Snap to the nearest sample of the first rung so the fitted time is exact.
    const ModeState& first = *usable.front();
    const Index i0 = std::min<Index>(first.samples() - 1, std::llround(t_end * i / samples / first.grid.spacing()));
    const double t = first.time(i0);
    double ymean = 0.0;
    std::vector<double> ys;
    for (const ModeState* s : usable) {
      const Index idx = std::min<Index>(s->samples() - 1, std::llround(t / s->grid.spacing()));
      ys.push_back(std::log2(s->u.row(idx).norm()));
      ymean += ys.back() / kn;
    }
    double sxy = 0.0;
    for (std::size_t q = 0; q < ks.size(); ++q) sxy += (ks[q] - kmean) * (ys[q] - ymean);
    const double slope = sxy / sxx;
    const double icept = ymean - slope * kmean;
    double res = 0.0;
    for (std::size_t q = 0; q < ks.size(); ++q) res += std::pow(ys[q] - icept - slope * ks[q], 2) / kn;
    fit.times.push_back(t);
    fit.betas.push_back(slope);
    fit.intercepts.push_back(icept);
    fit.slope_residuals.push_back(std::sqrt(res));
  }

  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < fit.times.size(); ++i) {
    const double w = std::pow(fit.times[i], fit.gamma);
    num += fit.betas[i] * w;
    den += w * w;
  }
  fit.beta_tilde = num / den;
  double res = 0.0;
  for (std::size_t i = 0; i < fit.times.size(); ++i)
    res += std::pow(fit.betas[i] - fit.beta_tilde * std::pow(fit.times[i], fit.gamma), 2);
  fit.residual = std::sqrt(res / static_cast<double>(fit.times.size()));
  return fit;
}

void export_loss_csv(const LossFit& fit, std::ostream& out) {
  out << "t,beta,beta_model,slope_residual,intercept\n";
  for (std::size_t i = 0; i < fit.times.size(); ++i)
    write_csv_row(out, {fit.times[i], fit.betas[i], fit.beta_tilde * std::pow(fit.times[i], fit.gamma),
                        fit.slope_residuals[i], fit.intercepts[i]});
}

void export_energy_csv(const EnergyTrace& trace, std::ostream& out, Index stride) {
  out << "t,E,u2,e\n";
  stride = std::max<Index>(stride, 1);
  for (Index i = 0; i < trace.t.size(); i += stride)
    write_csv_row(out, {trace.t[i], trace.E[i], trace.u2[i], trace.e[i]});
}

LadderResult run_energy_ladder(const CoefficientMatrices& coeffs, const LadderOptions& opt) {
  const Index m = coeffs.dim();
  VectorXd dir = VectorXd::Zero(coeffs.space_dim());
  dir[0] = 1.0;
  const RealMatrixFunction unit = assemble_symbol(coeffs, dir);
  VectorXcd u0 = opt.u0;
  if (u0.size() == 0) {
    u0 = VectorXcd::Zero(m);
    u0[0] = 1.0;
  }
  u0 /= u0.norm();

  std::optional<EigenStructure> es1;
  if (opt.energy) es1 = eigendecompose(unit, dir);

  LadderResult out;
  std::vector<ModeState> states;
  for (int k : opt.ks) {
    LadderRung rung;
    rung.k = k;
    rung.xi = std::ldexp(1.0, k);
    const RealMatrixFunction symbol = unit * rung.xi;
    rung.state = integrate_mode(symbol, rung.xi, u0, opt.integrator);
    if (opt.energy) {
      const MollifiedStructure ms = mollify_eigenstructure(scale_frequency(*es1, rung.xi), 1.0 / rung.xi);
      const Symmetrizer symm = build_symmetrizer(ms, opt.symmetrizer);
      rung.trace = energy_trace(symm, rung.state);
      rung.gronwall = gronwall_check(symm, ms.a, symbol, rung.state, rung.trace);
      rung.report = symm.report;
      out.gronwall_constant = std::max(out.gronwall_constant, rung.gronwall.constant);
    }
    states.push_back(rung.state);
    out.rungs.push_back(std::move(rung));
  }
  out.fit = fit_loss(states, opt.p);
  return out;
}

}  // namespace hypsym
