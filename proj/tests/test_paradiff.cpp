#include "doctest.h"

#include "hypsym/paradiff.hpp"
#include "hypsym/zygmund.hpp"
#include "oracles.hpp"

using namespace hypsym;

namespace {

double max_abs(const RealFunction& f) { return f.values().cwiseAbs().maxCoeff(); }

std::vector<RealFunction> corpus(const Grid& g) {
  std::vector<RealFunction> out;
  RoughParams p;
  p.depth = 10;
  p.offset = 0.5;
  for (RoughKind k : {RoughKind::weierstrass, RoughKind::log_weierstrass, RoughKind::lipschitz,
                      RoughKind::smooth}) {
    out.push_back(generate_rough(k, p, g));
    p.phases = PhaseMode::random;
    p.seed += 17;
    out.push_back(generate_rough(k, p, g));
    p.phases = PhaseMode::zero;
  }
  std::mt19937_64 rng(99);
  for (int i = 0; i < 4; ++i) out.push_back(oracle::random_trig(g, rng, 12, 800));
  return out;
}

}  // namespace

TEST_CASE("paraproduct examples") {
  const Grid g = Grid::periodic(2048);
  const DyadicFilterBank bank(g);
  std::mt19937_64 rng(1);
  const RealFunction v = oracle::random_samples(g, rng);
  const RealFunction one = RealFunction::constant(g, 1.0);
  const RealFunction expected = v - block(v, 0, bank) - block(v, 1, bank);
  CHECK(max_abs(paraproduct(one, v, bank) - expected) < 1e-12);
  CHECK(max_abs(paraproduct(RealFunction::constant(g, 0.0), v, bank)) == 0.0);

  const RealFunction mode = RealFunction::sample(g, [](double t) { return std::cos(256.0 * t); });
  const RealFunction low = oracle::random_trig(g, rng, 6, 40);
  const VectorXc s = transform(paraproduct(low, mode, bank));
  for (Index n = 0; n < g.size; ++n) {
    const double xi = std::abs(g.frequency(n));
    if (xi < 128.0 || xi > 384.0) CHECK(std::abs(s[n]) < 1e-13);
  }
}

TEST_CASE("remainder examples") {
  const Grid g = Grid::periodic(2048);
  const DyadicFilterBank bank(g);
  std::mt19937_64 rng(2);
  const RealFunction v = oracle::random_samples(g, rng);
  const RealFunction one = RealFunction::constant(g, 1.0);
  CHECK(max_abs(remainder(one, v, bank) - block(v, 0, bank) - block(v, 1, bank)) < 1e-12);
  CHECK(max_abs(remainder(RealFunction::constant(g, 0.0), v, bank)) == 0.0);

  const RealFunction mode = RealFunction::sample(g, [](double t) { return std::cos(256.0 * t); });
  const RealFunction r = remainder(mode, mode, bank);
  const VectorXc s = transform(r);
  CHECK(std::abs(s[0] - 0.5) < 1e-13);
  CHECK(std::abs(s[512] - 0.25) < 1e-13);
  CHECK(max_abs(r - mode * mode) < 1e-13);
}

TEST_CASE("Bony identity on the corpus") {
  const Grid g = Grid::periodic(4096);
  const DyadicFilterBank bank(g);
  const auto c = corpus(g);
  for (const auto& u : c)
    for (const auto& v : c) {
      const BonySplit b = bony_decomposition(u, v, bank);
      CHECK(b.identity_residual <= 1e-11 * sup_norm(u) * sup_norm(v));
    }
}

TEST_CASE("paraproduct and remainder bounds") {
  const Grid g = Grid::periodic(4096);
  const DyadicFilterBank bank(g);
  const auto c = corpus(g);
  double worst_pp = 0.0, worst_r = 0.0;
  for (std::size_t iu = 0; iu < c.size(); ++iu)
    for (std::size_t iv = iu % 3; iv < c.size(); iv += 3) {
      const RealFunction& u = c[iu];
      const RealFunction& v = c[iv];
      for (const BesovSpec spec : {BesovSpec{1.0, 0.0, kInfinity, kInfinity},
                                   BesovSpec{0.5, -1.0, 2.0, kInfinity},
                                   BesovSpec{1.0, 0.0, 1.0, 2.0}})
        worst_pp = std::max(worst_pp, paraproduct_bound_ratio(u, v, spec, bank));
      worst_r = std::max(worst_r, remainder_bound_ratio(u, v, {0.5, 0.0, kInfinity, kInfinity},
                                                        {0.5, 0.0, 2.0, kInfinity}, bank));
      worst_r = std::max(worst_r, remainder_bound_ratio(u, v, {1.0, -1.0, 2.0, kInfinity},
                                                        {-0.5, 1.0, 2.0, kInfinity}, bank));
    }
  MESSAGE("paraproduct constant " << worst_pp << ", remainder constant " << worst_r);
  CHECK(worst_pp <= 32.0);
  CHECK(worst_r <= 32.0);

  // Borderline remainder case is accepted only with alpha + beta >= 0 and r = 1.
  const RealFunction u = c.front();
  CHECK_NOTHROW(remainder_bound_ratio(u, u, {0.5, 0.0, kInfinity, 1.0}, {-0.5, 0.0, kInfinity, kInfinity}, bank));
  CHECK_THROWS_AS(remainder_bound_ratio(u, u, {0.5, 0.0, kInfinity, 2.0}, {-0.5, 0.0, kInfinity, kInfinity}, bank),
                  DomainError);
  CHECK_THROWS_AS(remainder_bound_ratio(u, u, {0.5, 0.0, kInfinity, 1.0}, {-1.0, 0.0, kInfinity, 1.0}, bank),
                  DomainError);
}

TEST_CASE("composition") {
  const Grid g = Grid::periodic(1 << 14);
  const DyadicFilterBank bank(g);
  RoughParams p;
  p.depth = 12;
  const RealFunction w = generate_rough(RoughKind::weierstrass, p, g);
  const BesovSpec spec{1.0, 0.0, kInfinity, kInfinity};

  CHECK(composition_check([](double x) { return x; }, w, spec, bank).ratio == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(composition_check([](double) { return 3.0; }, w, spec, bank).ratio == 0.0);
  const double sq = composition_check([](double x) { return x * x; }, w, spec, bank).ratio;
  CHECK(sq <= 8.0 * (1.0 + 2.0 * sup_norm(w)));
  CHECK(composition_check([](double x) { return std::exp(x); }, w, spec, bank).ratio <= 8.0 * std::exp(sup_norm(w)));
  CHECK(composition_check([](double x) { return 1.0 / (1.0 + x * x); }, w, spec, bank).ratio <= 8.0);

  CHECK_THROWS_AS(composition_check([](double x) { return x; }, w, {0.0, 0.5, kInfinity, kInfinity}, bank),
                  DomainError);
  CHECK_NOTHROW(composition_check([](double x) { return x; }, w, {0.0, 1.5, 2.0, kInfinity}, bank));
  Eigen::VectorXd bad = w.values();
  bad[3] = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(composition_check([](double x) { return x; }, RealFunction(g, bad), spec, bank), DomainError);
}
