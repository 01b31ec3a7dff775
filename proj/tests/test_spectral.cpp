#include "doctest.h"

#include "hypsym/spectral.hpp"
#include "oracles.hpp"

using namespace hypsym;

TEST_CASE("grid validation") {
  CHECK_THROWS_AS(Grid::periodic(6), DomainError);
  CHECK_THROWS_AS(Grid::periodic(4), DomainError);
  CHECK_THROWS_AS(Grid::periodic(16, -1.0), DomainError);
  const Grid g = Grid::periodic(16);
  CHECK(g.wavenumber(8) == 8);
  CHECK(g.wavenumber(9) == -7);
  CHECK(g.frequency(3) == doctest::Approx(3.0));
  const Grid r = Grid::reflected(16, 1.0);
  CHECK(r.period == 2.0);
  CHECK(r.window_last() == 8);
}

TEST_CASE("transform of a constant and of a pure mode") {
  const Grid g = Grid::periodic(1024);
  const VectorXc c = transform(RealFunction::constant(g, 1.0));
  CHECK(std::abs(c[0] - 1.0) < 1e-14);
  CHECK(c.tail(1023).cwiseAbs().maxCoeff() < 1e-14);

  const RealFunction f = RealFunction::sample(g, [](double t) { return std::cos(32.0 * t); });
  const VectorXc s = transform(f);
  CHECK(std::abs(s[32]) == doctest::Approx(0.5).epsilon(1e-13));
  CHECK(std::abs(s[1024 - 32]) == doctest::Approx(0.5).epsilon(1e-13));
  VectorXc rest = s;
  rest[32] = rest[1024 - 32] = 0.0;
  CHECK(rest.cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("transform matches the naive DFT oracle") {
  std::mt19937_64 rng(7);
  const Grid g = Grid::periodic(64, 3.0);
  const RealFunction f = oracle::random_samples(g, rng);
  const VectorXc s = transform(f);
  const auto ref = oracle::naive_dft(f.values().cast<Complex>());
  for (Index k = 0; k < 64; ++k) CHECK(std::abs(s[k] - ref[k]) < 1e-13);
}

TEST_CASE("round trip, Parseval and conjugate symmetry") {
  std::mt19937_64 rng(11);
  for (Index n : {8, 256, 4096}) {
    const Grid g = Grid::periodic(n);
    const RealFunction f = oracle::random_samples(g, rng);
    const VectorXc s = transform(f);
    const Eigen::VectorXd back = inverse_transform(g, s).values().real();
    CHECK((back - f.values()).norm() <= 1e-12 * f.values().norm());
    const double lhs = f.values().squaredNorm() / static_cast<double>(n);
    CHECK(std::abs(lhs - s.squaredNorm()) <= 1e-10 * lhs);
    for (Index k = 1; k < n; ++k) CHECK(std::abs(s[k] - std::conj(s[n - k])) < 1e-13);
  }
}

TEST_CASE("multipliers") {
  const Grid g = Grid::periodic(256, 5.0);
  const double w = kTwoPi / 5.0;
  const RealFunction f = RealFunction::sample(g, [&](double t) { return std::cos(8 * w * t); });

  SUBCASE("identity") {
    const RealFunction id = filter(f, [](double) { return 1.0; });
    CHECK((id.values() - f.values()).cwiseAbs().maxCoeff() < 1e-14);
  }
  SUBCASE("i xi is the exact derivative") {
    const ComplexFunction d = apply_multiplier(f, [](double xi) { return Complex(0.0, xi); });
    for (Index i = 0; i < g.size; ++i)
      CHECK(std::abs(d(i) - Complex(-8 * w * std::sin(8 * w * g.time(i)), 0.0)) < 1e-11);
    const RealFunction d2 = derivative(f, 2);
    for (Index i = 0; i < g.size; ++i)
      CHECK(std::abs(d2(i) + 64 * w * w * f(i)) < 1e-9);
  }
  SUBCASE("composition") {
    std::mt19937_64 rng(3);
    const RealFunction r = oracle::random_samples(g, rng);
    auto a = [](double xi) { return Complex(1.0 / (1.0 + xi * xi), xi); };
    auto b = [](double xi) { return Complex(std::cos(xi), 0.3); };
    const ComplexFunction ab = apply_multiplier(apply_multiplier(r, a), b);
    const ComplexFunction direct = apply_multiplier(r, [&](double xi) { return a(xi) * b(xi); });
    CHECK((ab.values() - direct.values()).cwiseAbs().maxCoeff() <= 1e-12 * r.values().cwiseAbs().maxCoeff() * 10);
  }
  SUBCASE("non-finite symbol at an occupied frequency") {
    CHECK_THROWS_AS(filter(f, [](double xi) { return 1.0 / xi; }), DomainError);
    // A pure mode has no energy at xi = 0, so 1/xi is acceptable there.
    CHECK_NOTHROW(filter(f - RealFunction::constant(g, 0.0), [](double xi) { return xi == 0 ? 0.0 : 1.0 / xi; }));
  }
}

TEST_CASE("windowed norms") {
  const Grid g = Grid::reflected(1024, 1.0);
  const RealFunction f = RealFunction::sample_reflected(g, [](double t) { return t; });
  CHECK(lp_norm(f, 1.0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(lp_norm(f, 2.0) == doctest::Approx(std::sqrt(1.0 / 3.0)).epsilon(1e-6));
  CHECK(sup_norm(f) == doctest::Approx(1.0));
  const Grid p = Grid::periodic(64);
  CHECK(lp_norm(RealFunction::constant(p, 1.0), 1.0) == doctest::Approx(kTwoPi));
}

TEST_CASE("matrix functions") {
  const Grid g = Grid::periodic(32);
  const auto a = RealMatrixFunction::generate(g, 2, [&](Index i) {
    Eigen::Matrix2d m;
    m << 1.0, g.time(i), 0.0, 2.0;
    return m;
  });
  CHECK(a.entry(0, 1)(5) == doctest::Approx(g.time(5)));
  const auto aa = pointwise_product(a, a);
  CHECK(aa.at(5)(0, 1) == doctest::Approx(3.0 * g.time(5)));
  CHECK(hermitian_defect(pointwise_product(pointwise_adjoint(a), a)) < 1e-14);
  CHECK(hermitian_defect(a) > 0.0);
}
