#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "generators.hpp"

#include <focal/linalg.hpp>
#include <focal/riccati.hpp>
#include <focal/transverse.hpp>

#include <cmath>
#include <random>

using focal::LagrangianFamily;
using focal::Matrix;
using focal::SubmanifoldData;
using focal::TransverseSplit;
using focal::Vector;

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kHalfPi = 0.5 * kPi;

// span{t E1, (t+1) E2} in flat space.
LagrangianFamily shifted_flat_pair() {
  auto model = focal::constant_curvature_model(3, 0.0, {-3.0, 3.0});
  Matrix j0(2, 2), dj0(2, 2);
  j0 << 0, 0, 0, 1;
  dj0 << 1, 0, 0, 1;
  return LagrangianFamily::from_seed(model, 0.0, j0, dj0);
}

// span{sin t E1, cos t E2} in the unit 3-sphere.
LagrangianFamily mixed_sphere_pair() {
  auto model = focal::constant_curvature_model(3, 1.0, {-4.0, 4.0});
  Matrix j0(2, 2), dj0(2, 2);
  j0 << 0, 0, 0, 1;
  dj0 << 1, 0, 0, 0;
  return LagrangianFamily::from_seed(model, 0.0, j0, dj0);
}

Matrix column(std::initializer_list<double> vals) {
  Matrix m(static_cast<int>(vals.size()), 1);
  int i = 0;
  for (double v : vals) m(i++, 0) = v;
  return m;
}
}  // namespace

TEST_CASE("evaluated spans keep their dimension across zeros") {
  auto fam = shifted_flat_pair();
  Matrix v = column({1, 0});  // the field t E1, vanishing at 0
  Matrix at0 = evaluated_span(fam, 0.0, v);
  REQUIRE(at0.cols() == 1);
  CHECK(std::abs(std::abs(at0(0, 0)) - 1.0) <= 1e-9);  // derivative lift: e1
  Matrix at1 = evaluated_span(fam, 1.0, v);
  CHECK(std::abs(std::abs(at1(0, 0)) - 1.0) <= 1e-9);
}

TEST_CASE("full index checks") {
  auto s3 = focal::constant_curvature_model(3, 1.0);
  SUBCASE("everything vanishing at pi/2 is inside the full subfamily") {
    auto fam = submanifold_lagrangian(s3, SubmanifoldData::totally_geodesic(2));
    TransverseSplit split(fam, Matrix::Identity(2, 2));
    auto rep = full_index_check(split, {0.0, kHalfPi});
    CHECK(rep.ok);
    REQUIRE(rep.kernel_times.size() == 1);
    CHECK(rep.kernel_times[0] == doctest::Approx(kHalfPi).epsilon(1e-8));
  }
  SUBCASE("trivial subfamily fails at the conjugate point") {
    auto fam = submanifold_lagrangian(s3, SubmanifoldData::point());
    TransverseSplit split(fam, Matrix(2, 0));
    auto rep = full_index_check(split, {0.1, 3.2});
    CHECK_FALSE(rep.ok);
    REQUIRE_FALSE(rep.failing_times.empty());
    CHECK(rep.failing_times[0] == doctest::Approx(kPi).epsilon(1e-8));
    // Short of the conjugate point there is nothing to contain.
    CHECK(full_index_check(split, {0.1, 3.0}).ok);
  }
  SUBCASE("no zeros on the open interval means full index") {
    TransverseSplit split(mixed_sphere_pair(), column({1, 0}));
    auto rep = full_index_check(split, {1e-3, kHalfPi - 1e-3});
    CHECK(rep.ok);
    CHECK(rep.kernel_times.empty());
  }
}

TEST_CASE("transverse Riccati operator") {
  SUBCASE("trivial split reduces to the full Riccati operator") {
    auto fam = submanifold_lagrangian(focal::constant_curvature_model(3, 1.0),
                                      SubmanifoldData::point());
    TransverseSplit split(fam, Matrix(2, 0));
    Matrix shat = split.transverse_riccati(kPi / 4);
    CHECK((shat - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-8);
  }
  SUBCASE("shifted flat pair: 1/(t+1) on the second axis") {
    TransverseSplit split(shifted_flat_pair(), column({1, 0}));
    Matrix shat = split.transverse_riccati(1.0);
    REQUIRE(shat.rows() == 1);
    CHECK(shat(0, 0) == doctest::Approx(0.5).epsilon(1e-9));
    // At t = 0 the evaluation map is rank deficient but the split still has
    // full index, so the operator remains available.
    Matrix shat0 = split.transverse_riccati(0.0);
    CHECK(shat0(0, 0) == doctest::Approx(1.0).epsilon(1e-9));
  }
  SUBCASE("mixed sphere pair: -tan t on the cos direction") {
    TransverseSplit split(mixed_sphere_pair(), column({1, 0}));
    Matrix shat = split.transverse_riccati(kPi / 4);
    CHECK(shat(0, 0) == doctest::Approx(-1.0).epsilon(1e-8));
  }
}

TEST_CASE("A-tensor") {
  SUBCASE("factor subfamilies of a product are parallel") {
    auto model = focal::product_space_form_model(3, 2.0, 2, 4.0, focal::ProductDirection(0.0));
    auto fam = submanifold_lagrangian(model, SubmanifoldData::block(2, Matrix::Zero(2, 2), 2, 4));
    Matrix v(4, 2);
    v.setZero();
    v(0, 0) = 1;
    v(1, 1) = 1;  // the two curved-factor fields
    TransverseSplit split(fam, v);
    for (double t : {0.3, 0.9, 1.5}) CHECK(split.a_norm(t) <= 1e-12);
  }
  SUBCASE("derivative staying inside the subfamily direction") {
    TransverseSplit split(shifted_flat_pair(), column({1, 0}));
    for (double t : {0.5, 1.0, 2.0}) CHECK(split.a_norm(t) <= 1e-12);
    TransverseSplit hopf(mixed_sphere_pair(), column({1, 0}));
    for (double t : {0.3, 0.8, 1.2}) CHECK(hopf.a_norm(t) <= 1e-12);
  }
  SUBCASE("vanishing subfamily field blocks evaluation") {
    TransverseSplit split(shifted_flat_pair(), column({1, 0}));
    CHECK_THROWS_AS(split.a_tensor(0.0), focal::SingularEvaluation);
  }
  SUBCASE("a rotating subfamily has a nonzero A-tensor with the exact value") {
    // V = span{t E1 + (t+1) E2}: at t, A = 1/(t^2 + (t+1)^2).
    TransverseSplit split(shifted_flat_pair(), column({1, 1}));
    CHECK(split.a_norm(1.0) == doctest::Approx(0.2).epsilon(1e-9));
    Matrix shat = split.transverse_riccati(1.0);
    CHECK(shat(0, 0) == doctest::Approx(0.9).epsilon(1e-9));
  }
}

TEST_CASE("transverse equation residual") {
  SUBCASE("trivial split: the plain Riccati equation") {
    auto fam = submanifold_lagrangian(focal::constant_curvature_model(4, 1.0),
                                      SubmanifoldData::totally_geodesic(2));
    TransverseSplit split(fam, Matrix(3, 0));
    for (double t : {0.4, 1.0}) CHECK(transverse_residual(split, t) <= 1e-5);
  }
  SUBCASE("one-dimensional horizontal bundle, flat closed form") {
    TransverseSplit split(shifted_flat_pair(), column({1, 0}));
    CHECK(transverse_residual(split, 1.0) <= 1e-8);
  }
  SUBCASE("rotating split with nonvanishing A-tensor") {
    TransverseSplit split(shifted_flat_pair(), column({1, 1}));
    // d/dt S_hat at t = 1 is -93/100; the equation balances it against
    // S_hat^2 + 3 A A^* = 81/100 + 12/100.
    CHECK(transverse_residual(split, 1.0) <= 1e-6);
  }
  SUBCASE("random subfamilies in a mixed-angle product") {
    auto model =
        focal::product_space_form_model(2, 1.0, 2, 1.0, focal::ProductDirection(kPi / 4));
    auto fam = submanifold_lagrangian(model, SubmanifoldData::point());
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> tu(0.3, 1.6);
    for (int trial = 0; trial < 50; ++trial) {
      int m = 1 + trial % 2;
      Matrix v = gen::gaussian(rng, 3, m);
      TransverseSplit split(fam, v);
      double t = tu(rng);
      if (!split.v_regular(t)) continue;
      CHECK(transverse_residual(split, t) <= 1e-5);
    }
  }
}

TEST_CASE("trace transfer between the transverse operator and restrictions") {
  SUBCASE("shifted flat pair at t = 1: both traces are 1/2") {
    TransverseSplit split(shifted_flat_pair(), column({1, 0}));
    auto res = eigenvalue_transfer_check(split, 1.0, column({0, 1}));
    CHECK(res.subspace_match);
    CHECK(res.trace_transverse == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(std::abs(res.difference) <= 1e-9);
  }
  SUBCASE("trivial split transfers the whole trace") {
    auto fam = submanifold_lagrangian(focal::constant_curvature_model(3, 1.0),
                                      SubmanifoldData::point());
    TransverseSplit split(fam, Matrix(2, 0));
    auto res = eigenvalue_transfer_check(split, 0.9, Matrix::Identity(2, 2));
    CHECK(res.subspace_match);
    CHECK(std::abs(res.difference) <= 1e-8);
  }
  SUBCASE("equator family split into the two cosine fields") {
    auto fam = submanifold_lagrangian(focal::constant_curvature_model(3, 1.0),
                                      SubmanifoldData::totally_geodesic(2));
    TransverseSplit split(fam, column({1, 0}));
    auto res = eigenvalue_transfer_check(split, kPi / 4, column({0, 1}));
    CHECK(res.subspace_match);
    CHECK(res.trace_transverse == doctest::Approx(-1.0).epsilon(1e-8));
    CHECK(std::abs(res.difference) <= 1e-8);
  }
  SUBCASE("subspace mismatch is reported") {
    TransverseSplit split(shifted_flat_pair(), column({1, 0}));
    auto res = eigenvalue_transfer_check(split, 1.0, column({1, 1}));
    CHECK_FALSE(res.subspace_match);
  }
}

TEST_CASE("transverse operator is self-adjoint across random splits") {
  std::mt19937 rng(29);
  std::uniform_real_distribution<double> tu(0.2, 1.4);
  for (int trial = 0; trial < 40; ++trial) {
    int n = 3 + trial % 4;
    auto model = gen::random_model(rng, n);
    auto fam = gen::random_lagrangian(rng, model);
    std::uniform_int_distribution<int> md(0, n - 2);
    Matrix v = gen::gaussian(rng, n - 1, md(rng));
    TransverseSplit split(fam, v);
    double t = tu(rng);
    auto ker = evaluation_kernel(fam, t);
    if (ker.rank < n - 1 || !split.v_regular(t)) continue;
    Matrix shat = split.transverse_riccati(t);
    if (shat.size() > 0) CHECK(focal::symmetry_defect(shat) <= 1e-7);
  }
}

TEST_CASE("splitting detector") {
  SUBCASE("product factor split is confirmed") {
    auto model = focal::product_space_form_model(3, 2.0, 2, 4.0, focal::ProductDirection(0.0));
    auto fam = submanifold_lagrangian(model, SubmanifoldData::block(2, Matrix::Zero(2, 2), 2, 4));
    Matrix v(4, 2);
    v.setZero();
    v(0, 0) = 1;
    v(1, 1) = 1;
    TransverseSplit split(fam, v);
    auto rep = splitting_detector(split, {0.2, 1.8});
    CHECK(rep.a_vanishes);
    CHECK(rep.v_parallel);
    CHECK(rep.h_subfamily);
    CHECK(rep.splitting);
  }
  SUBCASE("mixed sphere pair splits into the sin and cos fields") {
    TransverseSplit split(mixed_sphere_pair(), column({1, 0}));
    auto rep = splitting_detector(split, {0.05, kHalfPi - 0.05});
    CHECK(rep.splitting);
  }
  SUBCASE("a subfamily mixing curvature blocks is rejected") {
    auto model =
        focal::product_space_form_model(2, 1.0, 2, 1.0, focal::ProductDirection(kPi / 4));
    auto fam = submanifold_lagrangian(model, SubmanifoldData::point());
    // R = diag(1/2, 1/2, 0); mix the first and third eigendirections.
    TransverseSplit split(fam, column({1, 0, 1}));
    auto rep = splitting_detector(split, {0.3, 1.5});
    CHECK_FALSE(rep.splitting);
    CHECK((rep.max_a_norm > 1e-3 || rep.max_v_drift > 1e-3));
  }
}
