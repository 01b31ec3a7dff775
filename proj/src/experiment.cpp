#include "hypsym/experiment.hpp"

#include "hypsym/csv.hpp"
#include "hypsym/paradiff.hpp"
#include "hypsym/wave_example.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace hypsym {

namespace {

namespace fs = std::filesystem;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const char* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end) throw ConfigError(key + ": not a number: '" + v + "'");
  return out;
}

long long parse_int(const std::string& key, const std::string& v) {
  long long out = 0;
  const char* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end) throw ConfigError(key + ": not an integer: '" + v + "'");
  return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(key + ": expected true or false");
}

/// "a..b" or "a,b,c".
std::vector<int> parse_int_list(const std::string& key, const std::string& v) {
  std::vector<int> out;
  const auto dots = v.find("..");
  if (dots != std::string::npos) {
    const long long a = parse_int(key, trim(v.substr(0, dots)));
    const long long b = parse_int(key, trim(v.substr(dots + 2)));
    if (a > b) throw ConfigError(key + ": empty range");
    for (long long k = a; k <= b; ++k) out.push_back(static_cast<int>(k));
    return out;
  }
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(static_cast<int>(parse_int(key, trim(item))));
  if (out.empty()) throw ConfigError(key + ": empty list");
  return out;
}

std::vector<double> parse_double_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(key, trim(item)));
  if (out.empty()) throw ConfigError(key + ": empty list");
  return out;
}

void apply_coefficient(CoefficientSpec& c, const std::string& field, const std::string& key,
                       const std::string& v) {
  if (field == "coefficient") c.kind = parse_rough_kind(v);
  else if (field == "amplitude") c.params.amplitude = parse_double(key, v);
  else if (field == "offset") c.params.offset = parse_double(key, v);
  else if (field == "start") c.params.start = static_cast<int>(parse_int(key, v));
  else if (field == "depth") c.params.depth = static_cast<int>(parse_int(key, v));
  else if (field == "phases") {
    if (v == "zero") c.params.phases = PhaseMode::zero;
    else if (v == "random") c.params.phases = PhaseMode::random;
    else throw ConfigError(key + ": expected zero or random");
  } else {
    throw ConfigError("unknown key '" + key + "'");
  }
}

std::string p_label(double p) { return std::isinf(p) ? "inf" : format_number(p); }

// ---------------------------------------------------------------- output

class Output {
 public:
  Output(fs::path dir, RunResult& result) : dir_(std::move(dir)), result_(result) {
    fs::create_directories(dir_);
  }

  /// Opens dir/name and writes the schema line, then the header unless the
  /// caller's exporter writes its own.
  std::ofstream csv(const std::string& name, const std::string& schema, const std::string& header) {
    const fs::path path = dir_ / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << "# schema: " << schema << "/v1\n";
    if (!header.empty()) out << header << '\n';
    result_.files.push_back(path);
    return out;
  }

  void script(const std::string& name, const std::string& body) {
    const fs::path path = dir_ / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path.string());
    const std::string stem = fs::path(name).stem().string();
    out << "# gnuplot script; run from this directory\n"
        << "set datafile separator ','\n"
        << "set datafile commentschars '#'\n"
        << "set key autotitle columnhead\n"
        << "set terminal pngcairo size 900,600\n"
        << "set output '" << stem << ".png'\n"
        << body;
    result_.files.push_back(path);
  }

 private:
  fs::path dir_;
  RunResult& result_;
};

void check(RunResult& r, bool ok, const std::string& what) {
  if (!ok) r.failures.push_back(what);
}

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(4);
  s << v;
  return s.str();
}

// ---------------------------------------------------------------- subcommands

void run_decompose(const ExperimentConfig& cfg, Output& out, RunResult& res) {
  const RealFunction f = cfg.primary();
  const Grid& g = f.grid();
  const DyadicFilterBank bank(g);
  const std::vector<RealFunction> blocks = all_blocks(f, bank);
  RealFunction sum = RealFunction::constant(g, 0.0);
  for (const RealFunction& b : blocks) sum = sum + b;
  const double recon = sup_norm(sum - f);
  const double scale = std::max(1.0, sup_norm(f));

  const BesovSpec spec{1.0, -static_cast<double>(cfg.regularity.ell), cfg.regularity.p, kInfinity};
  const BesovNorm norm = besov_norm(f, spec, bank);

  {
    std::string header = "t,f";
    for (std::size_t j = 0; j < blocks.size(); ++j) header += ",block_" + std::to_string(j);
    auto csv = out.csv("decompose_blocks.csv", "decompose_blocks", header);
    for (Index i = 0; i <= g.window_last(); ++i) {
      csv << format_number(g.time(i)) << ',' << format_number(f(i % g.size));
      for (const RealFunction& b : blocks) csv << ',' << format_number(b(i % g.size));
      csv << '\n';
    }
  }
  {
    auto csv = out.csv("decompose_norms.csv", "decompose_norms", "j,block_l2,block_lp,weighted");
    for (std::size_t j = 0; j < blocks.size(); ++j)
      write_csv_row(csv, {static_cast<double>(j), lp_norm(blocks[j], 2.0), lp_norm(blocks[j], spec.p),
                          norm.weighted_terms[j]});
  }
  out.script("decompose.gp",
             "set logscale y\nset xlabel 'j'\n"
             "plot 'decompose_norms.csv' using 1:4 with linespoints, '' using 1:3 with linespoints\n");

  res.summary.push_back("blocks 0.." + std::to_string(bank.j_max()) + ", reconstruction error " + fmt(recon) +
                        ", Besov norm " + fmt(norm.value) + " (p = " + p_label(spec.p) + ")");
  check(res, recon <= 1e-12 * scale, "partition of unity: reconstruction error " + fmt(recon) + " > 1e-12");
  check(res, std::isfinite(norm.value), "Besov norm is not finite");
}

void run_zygmund(const ExperimentConfig& cfg, Output& out, RunResult& res) {
  const RealFunction f = cfg.primary();
  const DyadicFilterBank bank(f.grid());
  const int k_min = *std::min_element(cfg.eps_levels.begin(), cfg.eps_levels.end());
  const int k_max = *std::max_element(cfg.eps_levels.begin(), cfg.eps_levels.end());

  auto sweep_csv = out.csv("zygmund_sweep.csv", "zygmund_sweep", "p,tau,second_quotient,first_quotient");
  auto moll_csv = out.csv("zygmund_mollifier.csv", "zygmund_mollifier", "p,eps,approximation,first,second");
  auto sum_csv = out.csv("zygmund_summary.csv", "zygmund_summary",
                         "p,seminorm,growth_exponent,member,first_modulus,besov,ratio,mollifier_max,mollifier_blowup");
  for (double p : cfg.p_values) {
    const RegularityClass cls{cfg.regularity.kind, p, cfg.regularity.ell};
    const ModulusSweep s2 = second_difference_sweep(f, cls);
    const ModulusSweep s1 = first_difference_sweep(f, cls);
    const double besov = besov_norm(f, {1.0, -static_cast<double>(cls.ell), p, kInfinity}, bank).value;
    const double ratio = besov > 0.0 ? s2.value / besov : (s2.value == 0.0 ? 1.0 : kInfinity);
    const MollifierRates rates = mollifier_rates(f, cls, k_min, k_max);

    for (std::size_t i = 0; i < s2.taus.size(); ++i)
      write_csv_row(sweep_csv, {p, s2.taus[i], s2.quotients[i], s1.quotients[i]});
    for (std::size_t i = 0; i < rates.eps.size(); ++i)
      write_csv_row(moll_csv, {p, rates.eps[i], rates.approximation[i], rates.first[i], rates.second[i]});
    write_csv_row(sum_csv, {p, s2.value, s2.growth_exponent, s2.member ? 1.0 : 0.0, s1.value, besov, ratio,
                            rates.max_quotient(), rates.blows_up() ? 1.0 : 0.0});

    const std::string tag = "p = " + p_label(p) + ": ";
    res.summary.push_back(tag + "seminorm " + fmt(s2.value) + ", Besov " + fmt(besov) + ", mollifier max " +
                          fmt(rates.max_quotient()));
    check(res, s2.member,
          tag + "not a member of the class: second-difference quotient grows like tau^-" +
              fmt(s2.growth_exponent));
    if (s2.member) {
      check(res, ratio >= 1.0 / cfg.norm_band && ratio <= cfg.norm_band,
            tag + "seminorm / Besov norm " + fmt(ratio) + " outside [1/" + fmt(cfg.norm_band) + ", " +
                fmt(cfg.norm_band) + "]");
      check(res, rates.max_quotient() <= cfg.rate_factor * s2.value,
            tag + "mollifier quotient " + fmt(rates.max_quotient()) + " exceeds " + fmt(cfg.rate_factor) +
                " x seminorm");
    }
    check(res, !rates.blows_up(), tag + "mollifier quotients grow monotonically (wrong rate)");
  }
  out.script("zygmund.gp",
             "set logscale xy\nset xlabel 'tau'\n"
             "plot 'zygmund_sweep.csv' using 2:3 with linespoints title 'second difference', "
             "'' using 2:4 with linespoints title 'first difference'\n");
}

void run_paradiff(const ExperimentConfig& cfg, Output& out, RunResult& res) {
  const RealFunction u = cfg.primary();
  const RealFunction v = cfg.secondary();
  const Grid& g = u.grid();
  const DyadicFilterBank bank(g);
  const BonySplit b = bony_decomposition(u, v, bank);
  const double scale = sup_norm(u) * sup_norm(v);
  const double ell = static_cast<double>(cfg.regularity.ell);
  const BesovSpec spec{1.0, -ell, cfg.regularity.p, kInfinity};
  const double pp = paraproduct_bound_ratio(u, v, spec, bank);
  const double rr = remainder_bound_ratio(u, v, {0.5, 0.0, kInfinity, kInfinity}, {0.5, 0.0, 2.0, kInfinity}, bank);

  {
    auto csv = out.csv("paradiff.csv", "paradiff", "t,u,v,tuv,tvu,r,residual");
    const RealFunction prod = u * v;
    for (Index i = 0; i <= g.window_last(); ++i) {
      const Index j = i % g.size;
      write_csv_row(csv, {g.time(i), u(j), v(j), b.tuv(j), b.tvu(j), b.r(j),
                          b.tuv(j) + b.tvu(j) + b.r(j) - prod(j)});
    }
  }
  {
    auto csv = out.csv("paradiff_summary.csv", "paradiff_summary", "quantity,value");
    csv << "identity_residual," << format_number(b.identity_residual) << '\n'
        << "paraproduct_ratio," << format_number(pp) << '\n'
        << "remainder_ratio," << format_number(rr) << '\n';
  }
  out.script("paradiff.gp",
             "set xlabel 't'\n"
             "plot 'paradiff.csv' using 1:4 with lines, '' using 1:5 with lines, '' using 1:6 with lines\n");

  res.summary.push_back("Bony residual " + fmt(b.identity_residual) + ", paraproduct ratio " + fmt(pp) +
                        ", remainder ratio " + fmt(rr));
  check(res, b.identity_residual <= 1e-11 * std::max(scale, 1.0),
        "Bony identity residual " + fmt(b.identity_residual) + " too large");
  check(res, pp <= cfg.rate_factor, "paraproduct bound ratio " + fmt(pp) + " > " + fmt(cfg.rate_factor));
  check(res, rr <= cfg.rate_factor, "remainder bound ratio " + fmt(rr) + " > " + fmt(cfg.rate_factor));
}

void run_symmetrize(const ExperimentConfig& cfg, Output& out, RunResult& res) {
  const CoefficientMatrices coeffs = cfg.system_matrices();
  Eigen::VectorXd dir = Eigen::VectorXd::Zero(coeffs.space_dim());
  dir[0] = 1.0;
  const EigenStructure es1 = eigendecompose(assemble_symbol(coeffs, dir), dir);
  SymmetrizerOptions opt;
  opt.sigma0.mu = cfg.mu;

  auto csv = out.csv("symmetrize.csv", "symmetrize",
                     "k,xi,mu,picard_iterations,K1,K2,R0,sup_R,sup_S1,hermitian_defect_S0,hermitian_defect_S1,"
                     "hermitian_defect_S,S0A_defect");
  double r_lo = kInfinity, r_hi = 0.0;
  std::optional<Symmetrizer> top;
  for (int k : cfg.ladder) {
    const double xi = std::ldexp(1.0, k);
    const MollifiedStructure ms = mollify_eigenstructure(scale_frequency(es1, xi), 1.0 / xi);
    Symmetrizer symm = build_symmetrizer(ms, opt);
    const SymmetrizerReport& r = symm.report;
    write_csv_row(csv, {static_cast<double>(k), xi, static_cast<double>(r.mu),
                        static_cast<double>(r.picard_iterations), r.k1, r.k2, r.r0, r.sup_r, r.sup_s1,
                        r.hermitian_defect_s0, r.hermitian_defect_s1, r.hermitian_defect_s, r.s0a_defect});
    const std::string tag = "k = " + std::to_string(k) + ": ";
    const double herm = std::max({r.hermitian_defect_s0, r.hermitian_defect_s1, r.hermitian_defect_s});
    check(res, herm <= 1e-10, tag + "self-adjointness defect " + fmt(herm) + " > 1e-10");
    check(res, r.k1 > 0.0, tag + "K1 = " + fmt(r.k1) + " is not positive");
    check(res, r.s0a_defect <= 1e-8 * xi, tag + "S0 A_eps defect " + fmt(r.s0a_defect) + " > 1e-8 |xi|");
    r_lo = std::min(r_lo, r.sup_r);
    r_hi = std::max(r_hi, r.sup_r);
    top = std::move(symm);
  }
  if (top) {
    auto rep = out.csv("symmetrize_report.csv", "symmetrize_report", "");
    export_report(*top, rep);
  }
  out.script("symmetrize.gp",
             "set logscale y\nset xlabel 'k'\n"
             "plot 'symmetrize.csv' using 1:8 with linespoints, '' using 1:5 with linespoints, "
             "'' using 1:6 with linespoints\n");
  const double ratio = r_hi <= 1e-12 ? 1.0 : r_hi / r_lo;
  res.summary.push_back(cfg.system + " symmetrizer over k = " + std::to_string(cfg.ladder.front()) + ".." +
                        std::to_string(cfg.ladder.back()) + ": sup|R| in [" + fmt(r_lo) + ", " + fmt(r_hi) + "]");
  check(res, ratio <= cfg.sup_r_ratio,
        "sup|R| max/min over the ladder " + fmt(ratio) + " > " + fmt(cfg.sup_r_ratio));
}

void run_energy(const ExperimentConfig& cfg, Output& out, RunResult& res) {
  LadderOptions opt;
  opt.ks = cfg.ladder;
  opt.p = cfg.regularity.p;
  opt.integrator = cfg.integrator;
  opt.symmetrizer.sigma0.mu = cfg.mu;
  const LadderResult lr = run_energy_ladder(cfg.system_matrices(), opt);
  // fit_loss was called with the default sample count; refit if configured.
  LossFit fit = lr.fit;
  if (cfg.fit_samples != 5) {
    std::vector<ModeState> states;
    for (const LadderRung& r : lr.rungs) states.push_back(r.state);
    fit = fit_loss(states, cfg.regularity.p, cfg.fit_samples);
  }

  {
    auto csv = out.csv("energy_loss.csv", "energy_loss", "");
    export_loss_csv(fit, csv);
    csv << "# beta_tilde " << format_number(fit.beta_tilde) << " gamma " << format_number(fit.gamma)
        << " residual " << format_number(fit.residual) << '\n';
  }
  {
    auto csv = out.csv("energy_rungs.csv", "energy_rungs",
                       "k,xi,substeps,u_final,phi,band_lo,band_hi,K1,K2,gronwall_C,en_part_violation");
    for (std::size_t i = 0; i < lr.rungs.size(); ++i) {
      const LadderRung& r = lr.rungs[i];
      write_csv_row(csv, {static_cast<double>(r.k), r.xi, static_cast<double>(r.state.substeps),
                          r.state.u.row(r.state.samples() - 1).norm(), fit.phi[i], r.trace.band_lo,
                          r.trace.band_hi, r.report.k1, r.report.k2, r.gronwall.constant,
                          r.gronwall.en_part_violation});
    }
  }
  {
    auto csv = out.csv("energy_trace.csv", "energy_trace", "k,t,E,u2,e");
    for (const LadderRung& r : lr.rungs) {
      const Index stride = std::max<Index>(1, (r.trace.t.size() + cfg.trace_rows - 1) / cfg.trace_rows);
      for (Index i = 0; i < r.trace.t.size(); i += stride)
        write_csv_row(csv, {static_cast<double>(r.k), r.trace.t[i], r.trace.E[i], r.trace.u2[i], r.trace.e[i]});
    }
  }
  out.script("energy.gp",
             "set xlabel 't'\nset ylabel 'beta'\n"
             "plot 'energy_loss.csv' using 1:2 with linespoints, '' using 1:3 with lines\n");

  std::ostringstream betas;
  for (double b : fit.betas) betas << ' ' << fmt(b);
  res.summary.push_back("beta(t):" + betas.str() + "; beta~ " + fmt(fit.beta_tilde) + " (gamma " +
                        fmt(fit.gamma) + ", residual " + fmt(fit.residual) + "); Gronwall C " +
                        fmt(lr.gronwall_constant));

  for (const LadderRung& r : lr.rungs) {
    const std::string tag = "k = " + std::to_string(r.k) + ": ";
    const double slack = 1e-9 * std::max(1.0, r.report.k2);
    check(res, r.trace.band_lo >= r.report.k1 - slack && r.trace.band_hi <= r.report.k2 + slack,
          tag + "E/|u|^2 band [" + fmt(r.trace.band_lo) + ", " + fmt(r.trace.band_hi) + "] leaves [K1, K2]");
    check(res, r.gronwall.en_part_violation <= 1e-9,
          tag + "integrated energy bound violated by " + fmt(r.gronwall.en_part_violation));
  }
  check(res, lr.gronwall_constant <= cfg.gronwall_max,
        "Gronwall constant " + fmt(lr.gronwall_constant) + " > " + fmt(cfg.gronwall_max));

  double beta_max = cfg.beta_max;
  const bool two_sided = cfg.coefficient.kind == RoughKind::constant;
  if (beta_max < 0.0) {
    if (two_sided) beta_max = 0.02;
    else if (cfg.regularity.kind == RegularityKind::zygmund) beta_max = 0.05;
  }
  if (beta_max >= 0.0) {
    double worst = 0.0;
    for (double b : fit.betas) worst = std::max(worst, two_sided ? std::abs(b) : b);
    check(res, worst <= beta_max, "loss of derivatives: max beta " + fmt(worst) + " > " + fmt(beta_max));
  }
  if (cfg.expect_loss) {
    const int need = std::max(1, static_cast<int>(fit.betas.size()) - 1);
    check(res, fit.increases() >= need,
          "beta(t) increases at " + std::to_string(fit.increases()) + " of " + std::to_string(fit.betas.size()) +
              " sampled times");
    check(res, fit.beta_tilde > 0.0, "fitted beta~ " + fmt(fit.beta_tilde) + " is not positive");
  }
}

void run_wave(const ExperimentConfig& cfg, Output& out, RunResult& res) {
  const WaveCoefficient w = wave_coefficient(cfg.primary());
  auto csv = out.csv("wave.csv", "wave",
                     "k,xi,theta_diagonal,theta_budget,theta_off,sigma_tilde,sigma_budget,s0,q_rows,rho_norm,"
                     "published_sign_gap,normalization,pass");
  double gap = 0.0;
  for (int k : cfg.ladder) {
    const double xi = std::ldexp(1.0, k);
    const WaveCrossCheck c = cross_check(w.a, xi, 1.0 / xi, cfg.mu);
    write_csv_row(csv, {static_cast<double>(k), xi, c.theta_diagonal, c.theta_budget, c.theta_off, c.sigma_tilde,
                        c.sigma_budget, c.s0, c.q_rows, c.rho_norm, c.published_sign_gap, c.normalization,
                        c.pass ? 1.0 : 0.0});
    gap = std::max(gap, c.published_sign_gap);
    check(res, c.pass,
          "k = " + std::to_string(k) + ": generic and closed forms differ beyond the budget (theta " +
              fmt(c.theta_diagonal) + ", sigma~ " + fmt(c.sigma_tilde) + ", S0 " + fmt(c.s0) + ")");
  }
  res.summary.push_back("closed-form cross-check over " + std::to_string(cfg.ladder.size()) +
                        " rungs; largest distance to the published sign of sigma~_12: " + fmt(gap));
  out.script("wave.gp",
             "set logscale y\nset xlabel 'k'\n"
             "plot 'wave.csv' using 1:3 with linespoints, '' using 1:4 with linespoints, "
             "'' using 1:6 with linespoints, '' using 1:7 with linespoints\n");
}

}  // namespace

// ---------------------------------------------------------------- config

Grid ExperimentConfig::grid() const {
  return interval > 0.0 ? Grid::reflected(n, interval) : Grid::periodic(n, period);
}

RealFunction ExperimentConfig::primary() const {
  RoughParams p = coefficient.params;
  p.seed = seed;
  return generate_rough(coefficient.kind, p, grid());
}

RealFunction ExperimentConfig::secondary() const {
  RoughParams p = second.params;
  p.seed = seed + 1;
  return generate_rough(second.kind, p, grid());
}

CoefficientMatrices ExperimentConfig::system_matrices() const {
  if (system == "wave") return wave_system(primary(), regularity);
  return block3_system(primary(), secondary(), regularity);
}

void ExperimentConfig::validate(const std::string& subcommand) const {
  if (system != "wave" && system != "block3") throw ConfigError("system must be wave or block3");
  if (n < 8 || (n & (n - 1)) != 0) throw ConfigError("n must be a power of two >= 8");
  try {
    hypsym::validate(grid());
    hypsym::validate(regularity);
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  if (subcommand == "symmetrize" || subcommand == "energy" || subcommand == "wave") {
    if (subcommand == "wave" && system != "wave") throw ConfigError("wave needs system = wave");
    if (ladder.empty()) throw ConfigError("empty ladder");
    for (int k : ladder)
      if (k < 0 || !resolvable(grid(), std::ldexp(1.0, -k)))
        throw ConfigError("ladder rung k = " + std::to_string(k) + " is not resolvable: need n >= " +
                          std::to_string(static_cast<long long>(std::ceil(4.0 * grid().period * std::ldexp(1.0, k)))));
  }
  if (subcommand == "energy" && (ladder.size() < 3 || fit_samples < 1))
    throw ConfigError("energy needs at least three rungs and one fit sample");
  if (subcommand == "zygmund") {
    for (int k : eps_levels)
      if (!resolvable(grid(), std::ldexp(1.0, -k)))
        throw ConfigError("eps level " + std::to_string(k) + " is below four grid spacings");
    for (double p : p_values)
      if (!(p >= 1.0)) throw ConfigError("p values must be >= 1");
  }
  if (trace_rows < 1) throw ConfigError("trace_rows must be positive");
}

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig c;
  c.second.kind = RoughKind::smooth;
  c.second.params.amplitude = 0.5;
  std::map<std::string, int> seen;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string v = trim(line.substr(eq + 1));
    if (key.empty() || v.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key or value");
    if (seen[key]++) throw ConfigError("duplicate key '" + key + "'");

    if (key == "system") c.system = v;
    else if (key == "regularity") {
      if (v == "zygmund") { c.regularity.kind = RegularityKind::zygmund; c.regularity.ell = 0; }
      else if (v == "log_zygmund") { c.regularity.kind = RegularityKind::log_zygmund; c.regularity.ell = 1; }
      else throw ConfigError("regularity must be zygmund or log_zygmund");
    }
    else if (key == "p") c.regularity.p = parse_double(key, v);
    else if (key == "n") c.n = parse_int(key, v);
    else if (key == "period") c.period = parse_double(key, v);
    else if (key == "interval") c.interval = parse_double(key, v);
    else if (key == "ladder") c.ladder = parse_int_list(key, v);
    else if (key == "eps_levels") c.eps_levels = parse_int_list(key, v);
    else if (key == "p_values") c.p_values = parse_double_list(key, v);
    else if (key == "tol") c.integrator.tol = parse_double(key, v);
    else if (key == "cfl") c.integrator.cfl = parse_double(key, v);
    else if (key == "max_substeps") c.integrator.max_substeps = parse_int(key, v);
    else if (key == "interpolation") {
      if (v == "spline") c.integrator.interpolation = Interpolation::spline;
      else if (v == "piecewise_constant") c.integrator.interpolation = Interpolation::piecewise_constant;
      else throw ConfigError("interpolation must be spline or piecewise_constant");
    }
    else if (key == "mu") c.mu = static_cast<int>(parse_int(key, v));
    else if (key == "fit_samples") c.fit_samples = static_cast<int>(parse_int(key, v));
    else if (key == "trace_rows") c.trace_rows = parse_int(key, v);
    else if (key == "seed") c.seed = static_cast<std::uint64_t>(parse_int(key, v));
    else if (key == "check.beta_max") c.beta_max = parse_double(key, v);
    else if (key == "check.loss") c.expect_loss = parse_bool(key, v);
    else if (key == "check.gronwall_max") c.gronwall_max = parse_double(key, v);
    else if (key == "check.sup_r_ratio") c.sup_r_ratio = parse_double(key, v);
    else if (key == "check.norm_band") c.norm_band = parse_double(key, v);
    else if (key == "check.rate_factor") c.rate_factor = parse_double(key, v);
    else if (key.rfind("second.", 0) == 0) apply_coefficient(c.second, key.substr(7), key, v);
    else apply_coefficient(c.coefficient, key, key, v);
  }
  if (c.integrator.cfl <= 0.0 || c.integrator.cfl > 0.125) throw ConfigError("cfl must lie in (0, 1/8]");
  if (c.integrator.tol <= 0.0) throw ConfigError("tol must be positive");
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  return parse_config(in);
}

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names{"decompose", "zygmund", "paradiff", "symmetrize", "energy", "wave"};
  return names;
}

RunResult run_experiment(const std::string& subcommand, const ExperimentConfig& config,
                         const std::filesystem::path& out_dir) {
  config.validate(subcommand);
  RunResult res;
  Output out(out_dir, res);
  try {
    if (subcommand == "decompose") run_decompose(config, out, res);
    else if (subcommand == "zygmund") run_zygmund(config, out, res);
    else if (subcommand == "paradiff") run_paradiff(config, out, res);
    else if (subcommand == "symmetrize") run_symmetrize(config, out, res);
    else if (subcommand == "energy") run_energy(config, out, res);
    else if (subcommand == "wave") run_wave(config, out, res);
    else throw ConfigError("unknown subcommand '" + subcommand + "'");
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    res.failures.push_back(std::string(e.what()));
  }
  return res;
}

}  // namespace hypsym
