#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include "hypsym/symmetrizer.hpp"

namespace hypsym {

/// Periodic cubic spline through the columns of an N x c sample array. The
/// moments come from the circulant tridiagonal system, solved by FFT.
class PeriodicSpline {
 public:
  PeriodicSpline() = default;
  PeriodicSpline(const Grid& grid, const Eigen::MatrixXd& samples);

  /// Writes the interpolated row at time t into out (size c).
  void evaluate(double t, Eigen::Ref<Eigen::VectorXd> out) const;
  Index columns() const { return values_.cols(); }

 private:
  Grid grid_;
  Eigen::MatrixXd values_;
  Eigen::MatrixXd moments_;
};

enum class Interpolation { spline, piecewise_constant };

struct IntegratorOptions {
  double t_end = -1.0;       ///< negative: the grid window
  double tol = 1e-6;         ///< target global error, used to pick the substep
  double cfl = 1.0 / 16.0;   ///< h <= cfl / (1 + |A|)
  Interpolation interpolation = Interpolation::spline;
  Index max_substeps = 1 << 12;  ///< per grid cell
};

/// Trajectory of one Fourier mode on the grid samples 0..steps.
struct ModeState {
  Grid grid;
  double xi = 0.0;
  Eigen::MatrixXcd u;                       ///< (samples + 1) x m
  std::optional<Eigen::MatrixXcd> forcing;  ///< same layout as u, if any
  Index substeps = 0;                       ///< RK4 steps per grid cell

  Index samples() const { return u.rows(); }
  double time(Index i) const { return grid.time(i); }
};

/// Classical RK4 for u' = -i A(t) u + f(t) where `symbol` is A(t, xi)
/// sampled on the grid (xi already included). Forcing, if given, is
/// (window samples + 1) x m and interpolated like A. Throws ResolutionError
/// if the symbol has energy near the Nyquist frequency or the step rule
/// needs more than max_substeps per cell.
ModeState integrate_mode(const RealMatrixFunction& symbol, double xi, const Eigen::VectorXcd& u0,
                         const IntegratorOptions& options = {},
                         const std::optional<Eigen::MatrixXcd>& forcing = std::nullopt);

struct EnergyTrace {
  Eigen::VectorXd t;
  Eigen::VectorXd E;       ///< S u . u
  Eigen::VectorXd e;       ///< sqrt(E)
  Eigen::VectorXd u2;      ///< |u|^2
  double band_lo = 0.0;    ///< min E / |u|^2
  double band_hi = 0.0;    ///< max E / |u|^2
};

/// E(t) = S(t) u(t) . u(t). Throws BelowR0Error when |xi| < R0 of symm and
/// DomainError if the state and symmetrizer disagree on xi or grid.
EnergyTrace energy_trace(const Symmetrizer& symm, const ModeState& state);

/// dE/dt <= C (|f| E^1/2 + (1 + |A - A_eps| + |xi|^-1 |S^1'|) E), with dE/dt
/// evaluated from the equation: u^* S' u + 2 Re(u^* S (-i A u + f)).
struct GronwallCheck {
  Eigen::VectorXd dEdt;
  Eigen::VectorXd weight;       ///< the bracket on the right-hand side
  double constant = 0.0;        ///< smallest C that works at every sample
  double en_part_violation = 0.0;  ///< max_t (e - bound)_+ / bound for the integrated form
};

GronwallCheck gronwall_check(const Symmetrizer& symm, const RealMatrixFunction& a_eps,
                             const RealMatrixFunction& symbol, const ModeState& state,
                             const EnergyTrace& trace);

struct LossFit {
  std::vector<int> ks;
  std::vector<double> times;
  std::vector<double> betas;       ///< slope of log2 |u(t, 2^k)| in k
  std::vector<double> intercepts;
  std::vector<double> slope_residuals;  ///< rms misfit of each per-time regression
  double gamma = 1.0;              ///< 1 - 1/p
  double beta_tilde = 0.0;         ///< least squares for beta(t) = beta_tilde t^gamma
  double residual = 0.0;           ///< rms of beta - beta_tilde t^gamma
  std::vector<double> phi;         ///< log(|u(T)| / |u(0)|) per k

  /// Sampled times at which beta exceeds its previous value, counting from
  /// beta(0) = 0 (all rungs start at |u| = 1).
  int increases() const;
};

/// States on a dyadic ladder xi = 2^k, all with |u(0)| = 1 and no forcing.
/// `samples` equally spaced times in (0, T]. Throws FitError with fewer than
/// three usable frequencies.
LossFit fit_loss(const std::vector<ModeState>& states, double p, int samples = 5);

/// Times t_i, the model, and the per-time slopes as CSV.
void export_loss_csv(const LossFit& fit, std::ostream& out);
/// t, E, |u|^2, e on every `stride`-th sample.
void export_energy_csv(const EnergyTrace& trace, std::ostream& out, Index stride = 1);

struct LadderOptions {
  std::vector<int> ks{6, 7, 8, 9, 10, 11, 12, 13};
  double p = kInfinity;
  IntegratorOptions integrator;
  SymmetrizerOptions symmetrizer;
  Eigen::VectorXcd u0;   ///< empty: first unit vector
  bool energy = true;    ///< build symmetrizers, energy traces and Gronwall checks
};

struct LadderRung {
  int k = 0;
  double xi = 0.0;
  ModeState state;
  EnergyTrace trace;
  GronwallCheck gronwall;
  SymmetrizerReport report;
};

struct LadderResult {
  std::vector<LadderRung> rungs;
  LossFit fit;
  double gronwall_constant = 0.0;
};

/// Integrates every rung with xi = 2^k along the first coordinate axis and
/// fits the loss. The eigenstructure is computed once at |xi| = 1 and
/// rescaled.
LadderResult run_energy_ladder(const CoefficientMatrices& coeffs, const LadderOptions& options = {});

}  // namespace hypsym
