#include "hypsym/zygmund.hpp"

#include "hypsym/csv.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <random>

namespace hypsym {

namespace {

struct Shift {
  Index samples;
  double tau;
};

std::vector<Shift> dyadic_shifts(const Grid& grid) {
  const double T = grid.window;
  std::vector<Shift> out;
  for (Index s = 1; static_cast<double>(s) * grid.spacing() < 0.5 * T; s *= 2)
    out.push_back({s, static_cast<double>(s) * grid.spacing()});
  if (out.empty()) throw DomainError("window too short for any admissible shift tau < T/2");
  return out;
}

/// Samples index M of t = T on the (possibly periodic) window.
Index window_end(const Grid& g) { return g.is_periodic_window() ? g.size : g.window_last(); }

double log_weight(double tau, double power) {
  return power == 0.0 ? 1.0 : std::pow(std::log1p(1.0 / tau), power);
}

double growth_slope(const std::vector<double>& taus, const std::vector<double>& q) {
  // Least-squares slope of log q against log(1/tau) over the finest half.
  const std::size_t n = std::max<std::size_t>(3, taus.size() / 2);
  const std::size_t m = std::min(n, taus.size());
  if (m < 2) return 0.0;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const double x = -std::log(taus[i]);
    const double y = std::log(std::max(q[i], 1e-300));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double den = m * sxx - sx * sx;
  return den == 0.0 ? 0.0 : (m * sxy - sx * sy) / den;
}

ModulusSweep finish(ModulusSweep s) {
  s.value = *std::max_element(s.quotients.begin(), s.quotients.end());
  s.growth_exponent = growth_slope(s.taus, s.quotients);
  s.member = std::isfinite(s.value) && s.growth_exponent < 0.5;
  return s;
}

}  // namespace

void validate(const RegularityClass& cls) {
  if (!(cls.p >= 1.0)) throw DomainError("regularity exponent p must be >= 1");
  const int expected = cls.kind == RegularityKind::zygmund ? 0 : 1;
  if (cls.ell != expected) throw DomainError("log power inconsistent with the regularity kind");
}

ModulusSweep second_difference_sweep(const RealFunction& f, const RegularityClass& cls) {
  validate(cls);
  const Grid& g = f.grid();
  const Index N = g.size;
  const Index M = window_end(g);
  const auto& v = f.values();
  ModulusSweep out;
  Eigen::VectorXd d(N);
  for (const Shift& sh : dyadic_shifts(g)) {
    for (Index i = 0; i < N; ++i)
      d[i] = v[(i + sh.samples) % N] + v[(i - sh.samples + N) % N] - 2.0 * v[i];
    const double norm = lp_norm(d, g, cls.p, sh.samples, M - sh.samples, false);
    out.taus.push_back(sh.tau);
    out.quotients.push_back(norm / (sh.tau * log_weight(sh.tau, cls.ell)));
  }
  return finish(std::move(out));
}

double second_difference_seminorm(const RealFunction& f, const RegularityClass& cls) {
  return second_difference_sweep(f, cls).value;
}

ModulusSweep first_difference_sweep(const RealFunction& f, const RegularityClass& cls) {
  validate(cls);
  const Grid& g = f.grid();
  const Index N = g.size;
  const Index M = window_end(g);
  const auto& v = f.values();
  ModulusSweep out;
  Eigen::VectorXd d(N);
  for (const Shift& sh : dyadic_shifts(g)) {
    for (Index i = 0; i < N; ++i) d[i] = v[(i + sh.samples) % N] - v[i];
    const double norm = lp_norm(d, g, cls.p, 0, M - sh.samples, false);
    out.taus.push_back(sh.tau);
    out.quotients.push_back(norm / (sh.tau * log_weight(sh.tau, 1.0 + cls.ell)));
  }
  return finish(std::move(out));
}

double first_difference_modulus(const RealFunction& f, const RegularityClass& cls) {
  return first_difference_sweep(f, cls).value;
}

double MollifierKernel::operator()(double s) const {
  if (std::abs(s) >= 1.0) return 0.0;
  const double u = 1.0 - s * s;
  return (15.0 / 16.0) * u * u;
}

bool resolvable(const Grid& grid, double eps) { return eps >= 4.0 * grid.spacing() * (1 - 1e-12); }

RealFunction MollifierKernel::sample(const Grid& grid, double eps) const {
  if (!(eps > 0.0) || eps > 1.0) throw DomainError("mollification scale must lie in (0, 1]");
  if (!resolvable(grid, eps))
    throw ResolutionError("mollification scale below 4 grid spacings");
  const Index N = grid.size;
  const double h = grid.spacing();
  Eigen::VectorXd w = Eigen::VectorXd::Zero(N);
  double mass = 0.0;
  for (Index i = 0; i <= N / 2; ++i) {
    const double val = (*this)(static_cast<double>(i) * h / eps) / eps;
    if (val == 0.0) break;
    w[i] = val;
    mass += val;
    if (i != 0 && i != N - i) {
      w[N - i] = val;
      mass += val;
    }
  }
  w /= mass * h;
  return RealFunction(grid, std::move(w));
}

VectorXc MollifierKernel::convolution_symbol(const Grid& grid, double eps) const {
  // (rho_eps * f)_i = h sum_j rho_j f_{i-j}  <=>  c_k = N h rho^_k f^_k.
  VectorXc spec = transform(sample(grid, eps));
  spec *= static_cast<double>(grid.size) * grid.spacing();
  return spec;
}

RealFunction mollify(const RealFunction& f, double eps, const MollifierKernel& kernel) {
  const VectorXc k = kernel.convolution_symbol(f.grid(), eps);
  VectorXc spec = transform(f);
  spec.array() *= k.array();
  return real_part(inverse_transform(f.grid(), spec));
}

RoughKind parse_rough_kind(const std::string& name) {
  if (name == "weierstrass") return RoughKind::weierstrass;
  if (name == "log_weierstrass") return RoughKind::log_weierstrass;
  if (name == "lipschitz") return RoughKind::lipschitz;
  if (name == "smooth") return RoughKind::smooth;
  if (name == "constant") return RoughKind::constant;
  if (name == "step") return RoughKind::step;
  throw ConfigError("unknown coefficient kind '" + name + "'");
}

std::string to_string(RoughKind kind) {
  switch (kind) {
    case RoughKind::weierstrass: return "weierstrass";
    case RoughKind::log_weierstrass: return "log_weierstrass";
    case RoughKind::lipschitz: return "lipschitz";
    case RoughKind::smooth: return "smooth";
    case RoughKind::constant: return "constant";
    case RoughKind::step: return "step";
  }
  return "unknown";
}

RealFunction generate_rough(RoughKind kind, const RoughParams& params, const Grid& grid) {
  if (params.require_positive && !(params.offset > 0.0))
    throw DomainError("positive coefficient requested with a nonpositive offset");
  if (params.start < 0 || params.depth < params.start)
    throw DomainError("lacunary series needs 0 <= start <= depth");

  std::vector<double> psi(params.depth + 1, 0.0);
  if (params.phases == PhaseMode::random) {
    std::mt19937_64 rng(params.seed);
    std::uniform_real_distribution<double> u(0.0, kTwoPi);
    for (double& x : psi) x = u(rng);
  }

  const double w = kTwoPi / grid.period;
  const double A = params.amplitude;
  const double c0 = params.offset;
  auto lacunary = [&](double t, bool log_weight) {
    double acc = 0.0;
    for (int j = params.start; j <= params.depth; ++j) {
      const double amp = std::ldexp(1.0, -j) * (log_weight ? 1.0 + j : 1.0);
      acc += amp * std::cos(std::ldexp(w, j) * t + psi[j]);
    }
    return acc;
  };

  RealFunction f;
  switch (kind) {
    case RoughKind::weierstrass:
      f = RealFunction::sample(grid, [&](double t) { return c0 + A * lacunary(t, false); });
      break;
    case RoughKind::log_weierstrass:
      f = RealFunction::sample(grid, [&](double t) { return c0 + A * lacunary(t, true); });
      break;
    case RoughKind::lipschitz:
      f = RealFunction::sample(grid, [&](double t) {
        const double x = std::fmod(w * t, kTwoPi);
        return c0 + A * (2.0 * std::abs(x - std::numbers::pi) / std::numbers::pi - 1.0);
      });
      break;
    case RoughKind::smooth:
      f = RealFunction::sample(grid, [&](double t) { return c0 + A * std::sin(w * t + psi[0]); });
      break;
    case RoughKind::constant:
      f = RealFunction::constant(grid, c0);
      break;
    case RoughKind::step:
      f = RealFunction::sample(grid, [&](double t) {
        const double s = std::sin(w * t);
        return c0 + A * (s > 0.0 ? 1.0 : (s < 0.0 ? -1.0 : 0.0));
      });
      break;
  }
  if (params.require_positive && !(f.values().minCoeff() > 0.0))
    throw DomainError("generated coefficient is not strictly positive");
  return f;
}

double MollifierRates::max_quotient() const {
  double m = 0.0;
  for (const auto* seq : {&approximation, &first, &second})
    for (double q : *seq) m = std::max(m, q);
  return m;
}

bool MollifierRates::blows_up() const {
  for (const auto* seq : {&approximation, &first, &second}) {
    if (seq->size() < 3) continue;
    bool rising = true;
    for (std::size_t i = 1; i < seq->size(); ++i) rising = rising && (*seq)[i] > (*seq)[i - 1];
    if (rising && seq->back() >= 2.0 * seq->front()) return true;
  }
  return false;
}

MollifierRates mollifier_rates(const RealFunction& f, const RegularityClass& cls, int k_min, int k_max,
                               const MollifierKernel& kernel) {
  validate(cls);
  if (k_min > k_max) throw DomainError("empty mollifier sweep");
  MollifierRates out;
  for (int k = k_min; k <= k_max; ++k) {
    const double eps = std::ldexp(1.0, -k);
    const RealFunction fe = mollify(f, eps, kernel);
    const RealFunction d1 = derivative(fe);
    const RealFunction d2 = derivative(d1);
    const double w = log_weight(eps, cls.ell);
    out.eps.push_back(eps);
    out.approximation.push_back(lp_norm(fe - f, cls.p) / (eps * w));
    out.first.push_back(lp_norm(d1, cls.p) / (w * std::log1p(1.0 / eps)));
    out.second.push_back(eps * lp_norm(d2, cls.p) / w);
  }
  return out;
}

void export_csv(const RealFunction& f, std::ostream& out) {
  const WindowRange w = window_range(f.grid());
  out << "t,f\n";
  for (Index i = w.first; i <= w.last; ++i) write_csv_row(out, {f.grid().time(i), f(i % f.size())});
}

}  // namespace hypsym
