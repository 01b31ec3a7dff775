#pragma once

// The one-dimensional wave equation v'' - alpha(t) v_xx = 0 written for
// U = (-v_x, v_t) as U_t + A(t) U_x = 0 with A = [[0, 1], [alpha, 0]].
// Everything here is in closed form in terms of a = sqrt(alpha).

#include "hypsym/symmetrizer.hpp"

namespace hypsym {

struct WaveCoefficient {
  RealFunction alpha;
  RealFunction a;  ///< sqrt(alpha)
  double alpha_min = 0.0;
  double alpha_max = 0.0;
};

/// Throws DomainError unless alpha is finite and positive everywhere.
WaveCoefficient wave_coefficient(const RealFunction& alpha);

CoefficientMatrices wave_system(const RealFunction& alpha, RegularityClass regularity = {});

/// Sign of the off-diagonal entry of Sigma^1. `corrected` solves G = 0;
/// `published` is the opposite sign, kept for comparison only.
enum class SigmaSign { corrected, published };

/// lambda = +-a|xi|, r = (1, +-a) / sqrt(1 + a^2), l = (sqrt(1 + a^2) / 2)(1, +-1/a).
EigenStructure closed_form_eigenstructure(const RealFunction& a, double xi);

/// theta_11 = theta_22 = (1/2) d/dt log((1 + a^2)/a), theta_12 = theta_21 = a'/(2a).
ThetaMatrix closed_form_theta(const RealFunction& a);

/// sigma~_12 = +-i a' / (2a(1 + a^2)).
ComplexFunction closed_form_sigma_tilde(const RealFunction& a, SigmaSign sign = SigmaSign::corrected);

/// Sigma^0 = a/(1+a^2) Id, S^0 = diag(a, 1/a)/2, S^1 = (i a'/(4a^2)) [[0, -1], [1, 0]]
/// for the corrected sign, with R_eps from g_residual. a must be smooth.
Symmetrizer closed_form_symmetrizer(const RealFunction& a, double xi,
                                    SigmaSign sign = SigmaSign::corrected);

/// (1/2)(a xi^2 |v|^2 + |v_t|^2 / a + (a'/(2a^2)) Re(v_t conj v)) with v
/// recovered from u = (-i xi v, v_t).
double tarama_energy(double a, double da, double xi, const Eigen::Vector2cd& u);

/// Generic construction against the closed forms. The closed forms are
/// evaluated at the coefficient a~ = P_eps(1,0) / P_eps(0,0) carried by the
/// mollified eigenvectors. Two effects separate the paths and give the
/// budgets: the columns of P_eps are not unit vectors, and the mollified
/// eigenvalue a_eps differs from a~.
struct WaveCrossCheck {
  double theta_diagonal = 0.0;   ///< max_t |theta_jj generic - closed|
  double theta_off = 0.0;        ///< max_t |theta_12, theta_21 generic - closed|
  double sigma_tilde = 0.0;      ///< max_t |sigma~_12 generic - c sigma~_12 closed|
  double s0 = 0.0;               ///< max_t |S^0 generic - c S^0 closed|
  double q_rows = 0.0;           ///< max_t |Q generic - closed rows|
  double theta_budget = 0.0;     ///< sup_t |d/dt log |r_eps||
  double sigma_budget = 0.0;     ///< c sup|sigma~ closed| sup| |r_eps|^2 a~ / a_eps - 1 |
  double rho_norm = 0.0;         ///< sup_t |rho_j|
  double published_sign_gap = 0.0;  ///< max_t |sigma~_12 generic - c sigma~_12 published|
  double normalization = 1.0;    ///< c, from omega_j(0) = 0
  double tolerance = 1e-5;
  bool pass = false;
};

/// eps = 0 skips mollification (smooth a only); otherwise eps is the
/// mollification scale, normally 1/xi. mu is the cut-off level of omega.
WaveCrossCheck cross_check(const RealFunction& a, double xi, double eps, int mu = 0);

}  // namespace hypsym
