#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <focal/linalg.hpp>
#include <focal/riccati.hpp>

#include <cmath>
#include <random>

using focal::LagrangianFamily;
using focal::Matrix;
using focal::ModelSolution;
using focal::SubmanifoldData;

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kHalfPi = 0.5 * kPi;
}  // namespace

TEST_CASE("comparison solutions: values") {
  CHECK(ModelSolution(1, 0, 1).value(kHalfPi) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(ModelSolution(0, 1, 1).value(2.0) == doctest::Approx(3.0));
  CHECK(ModelSolution(-1, 1, 0).value(1.0) == doctest::Approx(std::sinh(1.0)));
  CHECK_THROWS_AS(ModelSolution(2, 1, 0), std::invalid_argument);
  CHECK_THROWS_AS(ModelSolution(1, 0, 0), std::invalid_argument);
}

TEST_CASE("comparison solutions: logarithmic derivative and poles") {
  SUBCASE("shifted sine gives cot(t + pi/2)") {
    auto sol = ModelSolution::sphere_phase(kHalfPi);
    CHECK(*sol.riccati(0.0) == doctest::Approx(0.0));
    CHECK(*sol.riccati(0.7) == doctest::Approx(1.0 / std::tan(0.7 + kHalfPi)));
  }
  SUBCASE("flat pole at the root of t - c") {
    ModelSolution sol(0, 1.0, -2.0);  // f = t - 2
    CHECK(*sol.riccati(1.0) == doctest::Approx(-1.0));
    CHECK(!sol.riccati(2.0).has_value());
    CHECK(sol.pole_distance(1.5) == doctest::Approx(0.5));
  }
  SUBCASE("sine pole near zero") {
    ModelSolution sol(1, 1.0, 0.0);  // f = sin t
    CHECK(!sol.riccati(1e-15).has_value());
    CHECK(*sol.riccati(1e-3) > 999.0);  // cot is huge on the positive side
  }
  SUBCASE("pole enumeration") {
    auto poles = ModelSolution(1, 1.0, 0.0).poles_in({-0.5, 7.0});
    REQUIRE(poles.size() == 3);
    CHECK(poles[0] == doctest::Approx(0.0));
    CHECK(poles[1] == doctest::Approx(kPi));
    CHECK(poles[2] == doctest::Approx(2 * kPi));
    CHECK(ModelSolution(-1, 0.0, 1.0).poles_in({-10.0, 10.0}).empty());  // cosh
  }
}

TEST_CASE("comparison solutions satisfy their defining equation") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  const double fd = 1e-5;
  for (int trial = 0; trial < 50; ++trial) {
    int kappa = trial % 3 - 1;
    double c1 = u(rng), c2 = u(rng);
    if (c1 == 0.0 && c2 == 0.0) continue;
    ModelSolution sol(kappa, c1, c2);
    std::uniform_real_distribution<double> tu(-1.5, 1.5);
    double t = tu(rng);
    if (sol.pole_distance(t) < 0.15) continue;
    auto lm = sol.riccati(t - fd), l0 = sol.riccati(t), lp = sol.riccati(t + fd);
    REQUIRE(lm);
    REQUIRE(lp);
    double dlam = (*lp - *lm) / (2 * fd);
    CHECK(std::abs(dlam + (*l0) * (*l0) + kappa) <= 1e-6);
  }
}

TEST_CASE("Riccati operator of a family") {
  auto s3 = focal::constant_curvature_model(3, 1.0);
  SUBCASE("point family: cot t times the identity") {
    auto fam = submanifold_lagrangian(s3, SubmanifoldData::point());
    Matrix s = riccati_operator(fam, kPi / 4);
    CHECK((s - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-8);
  }
  SUBCASE("equator family: -tan t times the identity") {
    auto fam = submanifold_lagrangian(s3, SubmanifoldData::totally_geodesic(2));
    Matrix s = riccati_operator(fam, kPi / 4);
    CHECK((s + Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-8);
  }
  SUBCASE("flat point family: id/t") {
    auto fam = submanifold_lagrangian(focal::constant_curvature_model(3, 0.0),
                                      SubmanifoldData::point());
    Matrix s = riccati_operator(fam, 2.0);
    CHECK((s - 0.5 * Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-9);
  }
  SUBCASE("singular at a focal time") {
    auto fam = submanifold_lagrangian(s3, SubmanifoldData::totally_geodesic(2));
    CHECK_THROWS_AS(riccati_operator(fam, kHalfPi), focal::SingularEvaluation);
  }
}

TEST_CASE("self-adjointness holds exactly for Lagrangian seeds and fails otherwise") {
  auto model = focal::product_space_form_model(2, 2.0, 2, 1.0, focal::ProductDirection(0.9));
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Matrix a(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) a(i, k) = u(rng);
  Matrix sym = 0.5 * (a + a.transpose());

  auto lag = LagrangianFamily::from_seed(model, 0.0, Matrix::Identity(3, 3), sym);
  for (double t : {0.3, 0.8, 1.4})
    CHECK(focal::symmetry_defect(riccati_operator(lag, t)) <= 1e-8);

  Matrix skew = a - a.transpose() + Matrix::Identity(3, 3);
  auto bad = LagrangianFamily::from_seed(model, 0.0, Matrix::Identity(3, 3), skew);
  CHECK_FALSE(bad.is_lagrangian());
  CHECK(focal::symmetry_defect(riccati_operator(bad, 0.5)) > 1e-3);
}

TEST_CASE("Riccati equation residual by finite differences") {
  auto model = focal::product_space_form_model(3, 1.3, 2, 0.6, focal::ProductDirection(0.4));
  auto fam = submanifold_lagrangian(model, SubmanifoldData::totally_geodesic(2));
  const double fd = 1e-4;
  for (double t : {0.3, 0.7, 1.1}) {
    Matrix sm = riccati_operator(fam, t - fd);
    Matrix s0 = riccati_operator(fam, t);
    Matrix sp = riccati_operator(fam, t + fd);
    Matrix resid = (sp - sm) / (2 * fd) + s0 * s0 + fam.model().curvature(t);
    CHECK(focal::spectral_norm(resid) <= 1e-5);
  }
}

TEST_CASE("scalar comparison check") {
  SUBCASE("model against itself: equality everywhere, rigidity holds") {
    ModelSolution sol(1, 1.0, 0.0);  // cot t
    std::vector<std::pair<double, double>> samples;
    for (double t = 0.2; t <= 2.0; t += 0.01) samples.emplace_back(t, *sol.riccati(t));
    auto rep = scalar_comparison_check(samples, sol, {0.2, 2.0});
    CHECK(rep.hypothesis_ok);
    CHECK(rep.violation_times.empty());
    CHECK(rep.equality_times.size() == samples.size());
    CHECK(rep.rigidity_ok);
  }
  SUBCASE("cot t stays below 1/t") {
    ModelSolution flat(0, 1.0, 0.0);  // 1/t
    std::vector<std::pair<double, double>> samples;
    for (double t = 0.05; t <= 3.0; t += 0.01) samples.emplace_back(t, 1.0 / std::tan(t));
    auto rep = scalar_comparison_check(samples, flat, {0.05, 3.0});
    CHECK(rep.hypothesis_ok);
    CHECK(rep.violation_times.empty());
    CHECK(rep.equality_times.empty());
  }
  SUBCASE("hypothesis failure is recorded, not reported as a violation") {
    ModelSolution sol(0, 0.0, 1.0);  // lambda = 0
    std::vector<std::pair<double, double>> samples{{0.0, 1.0}, {0.5, 1.0}};
    auto rep = scalar_comparison_check(samples, sol, {0.0, 1.0});
    CHECK_FALSE(rep.hypothesis_ok);
    CHECK(rep.violation_times.empty());
  }
}

TEST_CASE("restricted traces") {
  auto s3 = focal::constant_curvature_model(3, 1.0);
  SUBCASE("whole family of the point: 2 cot t") {
    auto fam = submanifold_lagrangian(s3, SubmanifoldData::point());
    CHECK(trace_restricted(fam, kPi / 4, Matrix::Identity(2, 2)) ==
          doctest::Approx(2.0).epsilon(1e-8));
  }
  SUBCASE("single flat field (t+1)E2") {
    auto flat = focal::constant_curvature_model(3, 0.0);
    Matrix j0(2, 2), dj0(2, 2);
    j0 << 0, 0, 0, 1;
    dj0 << 1, 0, 0, 1;
    auto fam = LagrangianFamily::from_seed(flat, 0.0, j0, dj0);
    Matrix w(2, 1);
    w << 0, 1;
    CHECK(trace_restricted(fam, 1.0, w) == doctest::Approx(0.5).epsilon(1e-10));
  }
  SUBCASE("zero-dimensional subfamily") {
    auto fam = submanifold_lagrangian(s3, SubmanifoldData::point());
    CHECK(trace_restricted(fam, 1.0, Matrix(2, 0)) == 0.0);
  }
  SUBCASE("vanishing field is an error") {
    auto fam = submanifold_lagrangian(s3, SubmanifoldData::point());
    Matrix w(2, 1);
    w << 1, 0;
    CHECK_THROWS_AS(trace_restricted(fam, kPi, w), focal::SingularEvaluation);
  }
}
