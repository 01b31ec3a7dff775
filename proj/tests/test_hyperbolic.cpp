#include "doctest.h"

#include "hypsym/hyperbolic.hpp"
#include "oracles.hpp"

using namespace hypsym;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

CoefficientMatrices wave_like(const RealFunction& alpha) {
  RealMatrixFunction a(alpha.grid(), 2);
  a.set_entry(0, 1, RealFunction::constant(alpha.grid(), 1.0));
  a.set_entry(1, 0, alpha);
  return {{a}, RegularityClass::zygmund()};
}

CoefficientMatrices constant_system(const Grid& g, const MatrixXd& m) {
  return {{RealMatrixFunction::generate(g, m.rows(), [&](Index) { return m; })}, {}};
}

VectorXd one() { return VectorXd::Constant(1, 1.0); }

RealFunction weierstrass(const Grid& g, double c0, double amp = 1.0) {
  RoughParams p;
  p.amplitude = amp;
  p.depth = 10;
  p.offset = c0;
  p.require_positive = true;
  return generate_rough(RoughKind::weierstrass, p, g);
}

}  // namespace

TEST_CASE("symbol assembly") {
  const Grid g = Grid::periodic(256);
  const RealFunction alpha = weierstrass(g, 3.0);
  const CoefficientMatrices c = wave_like(alpha);
  const RealMatrixFunction a = assemble_symbol(c, one());
  for (Index i = 0; i < g.size; i += 17) {
    CHECK(a.at(i)(0, 0) == 0.0);
    CHECK(a.at(i)(0, 1) == 1.0);
    CHECK(a.at(i)(1, 0) == alpha(i));
  }
  const RealMatrixFunction a2 = assemble_symbol(c, VectorXd::Constant(1, 2.0));
  CHECK((a2.data() - 2.0 * a.data()).cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(assemble_symbol(c, VectorXd::Zero(1)), DomainError);
  CHECK_THROWS_AS(assemble_symbol(c, VectorXd::Zero(2)), DomainError);

  const CoefficientMatrices z = constant_system(g, MatrixXd::Zero(2, 2));
  CHECK(assemble_symbol(z, one()).data().cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(c.validate(1.0), DomainError);
  CHECK_NOTHROW(c.validate(10.0));
}

TEST_CASE("wave eigenstructure") {
  const Grid g = Grid::periodic(1024);
  const RealFunction alpha = weierstrass(g, 3.0);
  const RealMatrixFunction a = assemble_symbol(wave_like(alpha), one());
  const EigenStructure es = eigendecompose(a, one());
  CHECK(es.strict());
  CHECK(es.multiplicities == std::vector<Index>{1, 1});
  for (Index i = 0; i < g.size; ++i) {
    const double s = std::sqrt(alpha(i));
    CHECK(es.lambdas(i, 0) == doctest::Approx(s).epsilon(1e-12));
    CHECK(es.lambdas(i, 1) == doctest::Approx(-s).epsilon(1e-12));
    const double nrm = std::sqrt(1.0 + alpha(i));
    CHECK(std::abs(es.P.at(i)(0, 0) - 1.0 / nrm) < 1e-12);
    CHECK(std::abs(es.P.at(i)(1, 0) - s / nrm) < 1e-12);
    CHECK(std::abs(es.P.at(i)(0, 1) - 1.0 / nrm) < 1e-12);
    CHECK(std::abs(es.P.at(i)(1, 1) + s / nrm) < 1e-12);
  }
  CHECK(eigen_residual(es, a) < 1e-9);
  CHECK(biorthogonality_error(es) < 1e-9);
  CHECK(reconstruction_error(es, a) < 1e-9);
  CHECK(es.max_angle_jump < 0.1);

  // Homogeneity: eigenvalues scale, eigenvectors do not.
  const RealMatrixFunction a4 = assemble_symbol(wave_like(alpha), VectorXd::Constant(1, 4.0));
  const EigenStructure direct = eigendecompose(a4, VectorXd::Constant(1, 4.0));
  const EigenStructure scaled = scale_frequency(es, 4.0);
  CHECK((direct.lambdas - scaled.lambdas).cwiseAbs().maxCoeff() < 1e-12 * 4.0 * 3.0);
  CHECK((direct.P.data() - scaled.P.data()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(reconstruction_error(scaled, a4) < 1e-9 * 4.0);
}

TEST_CASE("constant and rejected symbols") {
  const Grid g = Grid::periodic(16);
  MatrixXd d(2, 2);
  d << 1.0, 0.0, 0.0, 2.0;
  const EigenStructure es = eigendecompose(assemble_symbol(constant_system(g, d), one()), one());
  CHECK(es.lambdas(3, 0) == 2.0);
  CHECK(es.lambdas(3, 1) == 1.0);
  MatrixXd swap(2, 2);
  swap << 0.0, 1.0, 1.0, 0.0;
  CHECK((MatrixXd(es.P.at(5)) - swap).norm() < 1e-14);

  MatrixXd jordan(2, 2);
  jordan << 0.0, 1.0, 0.0, 0.0;
  CHECK_THROWS_AS(eigendecompose(assemble_symbol(constant_system(g, jordan), one()), one()),
                  NotHyperbolicError);
  MatrixXd rot(2, 2);
  rot << 0.0, 1.0, -1.0, 0.0;
  CHECK_THROWS_AS(eigendecompose(assemble_symbol(constant_system(g, rot), one()), one()),
                  NotHyperbolicError);

  // Eigenvalues 1 and 1 + sin t collide at t = 0 and t = pi.
  RealMatrixFunction crossing(g, 2);
  crossing.set_entry(0, 0, RealFunction::constant(g, 1.0));
  crossing.set_entry(1, 1, RealFunction::sample(g, [](double t) { return 1.0 + 0.5 * std::sin(t + 0.3); }));
  CHECK_THROWS_AS(eigendecompose(crossing, one()), MultiplicityError);

  MatrixXd id = 3.0 * MatrixXd::Identity(3, 3);
  const EigenStructure iso = eigendecompose(assemble_symbol(constant_system(g, id), one()), one());
  CHECK(iso.multiplicities == std::vector<Index>{3});
}

TEST_CASE("constant multiplicity 3 x 3 system") {
  const Grid g = Grid::periodic(2048);
  const RealFunction d = weierstrass(g, 2.0, 0.5);
  RoughParams p;
  p.depth = 10;
  p.amplitude = 0.5;
  p.phases = PhaseMode::random;
  p.seed = 5;
  const RealFunction phi = generate_rough(RoughKind::weierstrass, p, g);
  const CoefficientMatrices sys = block3_system(d, phi);
  const RealMatrixFunction a = assemble_symbol(sys, one());
  const EigenStructure es = eigendecompose(a, one());
  CHECK(es.multiplicities == std::vector<Index>{1, 2});
  CHECK(es.block_start == std::vector<Index>{0, 1});
  CHECK(es.block_of(2) == 1);
  for (Index i = 0; i < g.size; i += 31) {
    CHECK(es.lambdas(i, 0) == doctest::Approx(2.0 * d(i)).epsilon(1e-10));
    CHECK(es.lambdas(i, 1) == doctest::Approx(d(i)).epsilon(1e-10));
  }
  CHECK(eigen_residual(es, a) < 1e-9);
  CHECK(biorthogonality_error(es) < 1e-9);
  CHECK(es.max_angle_jump < 0.2);
  // Periodic in t: the projected t = 0 basis comes back to itself.
  CHECK((MatrixXd(es.P.at(g.size - 1)) - MatrixXd(es.P.at(0))).norm() < 0.2);
}

TEST_CASE("mollified structure") {
  const Grid g = Grid::periodic(1 << 12);
  MatrixXd s(2, 2);
  s << 2.0, 1.0, 1.0, 3.0;
  const RealMatrixFunction ac = assemble_symbol(constant_system(g, s), one());
  const MollifiedStructure mc = mollify_eigenstructure(eigendecompose(ac, one()), 0.05);
  CHECK((mc.a.data() - ac.data()).cwiseAbs().maxCoeff() < 1e-13);

  const RealFunction alpha = weierstrass(g, 3.0);
  const RealMatrixFunction a = assemble_symbol(wave_like(alpha), one());
  const EigenStructure es = eigendecompose(a, one());
  double worst = 0.0;
  for (int k = 3; k <= 7; ++k) {
    const double eps = std::ldexp(1.0, -k);
    const MollifiedStructure m = mollify_eigenstructure(es, eps);
    CHECK(m.es.multiplicities == es.multiplicities);
    CHECK(left_eigen_residual(m.es, m.a) < 1e-9);
    CHECK(biorthogonality_error(m.es) < 1e-9);
    for (Index i = 0; i < g.size; ++i) CHECK(m.es.lambdas(i, 0) > m.es.lambdas(i, 1));
    double l1 = 0.0;
    for (Index e = 0; e < 4; ++e)
      l1 = std::max(l1, lp_norm(RealFunction(g, m.a.data().col(e) - a.data().col(e)), 1.0));
    worst = std::max(worst, l1 / eps);
  }
  MESSAGE("max_eps |A_eps - A|_L1 / eps = " << worst);
  CHECK(worst < 10.0);
  CHECK_THROWS_AS(mollify_eigenstructure(es, g.spacing()), ResolutionError);
}
