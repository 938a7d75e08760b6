#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <focal/linalg.hpp>
#include <focal/models.hpp>

#include <cmath>

using focal::Matrix;

namespace {
double max_abs_diff(const Matrix& a, const Matrix& b) {
  return (a - b).cwiseAbs().maxCoeff();
}
}  // namespace

TEST_CASE("constant curvature operators") {
  auto s3 = focal::constant_curvature_model(3, 1.0);
  CHECK(max_abs_diff(s3.curvature(0.7), Matrix::Identity(2, 2)) == 0.0);

  auto flat = focal::constant_curvature_model(3, 0.0);
  CHECK(flat.curvature(-1.2).cwiseAbs().maxCoeff() == 0.0);

  auto hyp = focal::constant_curvature_model(4, -1.0);
  CHECK(max_abs_diff(hyp.curvature(2.0), -Matrix::Identity(3, 3)) == 0.0);

  CHECK_THROWS_AS(focal::constant_curvature_model(1, 1.0), std::invalid_argument);
}

TEST_CASE("product models: eigenvalue layout") {
  auto m1 = focal::product_space_form_model(3, 2.0, 2, 4.0, focal::ProductDirection(0.0));
  Matrix expect1 = Matrix::Zero(4, 4);
  expect1.diagonal() << 2, 2, 0, 0;
  CHECK(max_abs_diff(m1.curvature(0.0), expect1) <= 1e-12);

  const double quarter = std::atan(1.0);  // pi/4
  auto m2 = focal::product_space_form_model(2, 3.0, 2, 3.0, focal::ProductDirection(quarter));
  Matrix expect2 = Matrix::Zero(3, 3);
  expect2.diagonal() << 1.5, 1.5, 0;
  CHECK(max_abs_diff(m2.curvature(1.0), expect2) <= 1e-12);

  auto m3 = focal::product_space_form_model(2, 1.0, 2, 1.0, focal::ProductDirection(0.0));
  Matrix expect3 = Matrix::Zero(3, 3);
  expect3.diagonal() << 1, 0, 0;
  CHECK(max_abs_diff(m3.curvature(0.0), expect3) <= 1e-12);

  CHECK_THROWS_AS(
      focal::product_space_form_model(1, 1.0, 1, 1.0, focal::ProductDirection(0.0)),
      std::invalid_argument);
  CHECK_THROWS_AS(focal::ProductDirection(-0.1), std::invalid_argument);
  CHECK_THROWS_AS(focal::ProductDirection(2.0), std::invalid_argument);
}

TEST_CASE("product models: generic angle keeps one flat mixed direction") {
  const double alpha = 0.6;
  auto m = focal::product_space_form_model(3, 2.5, 3, 1.5, focal::ProductDirection(alpha));
  Eigen::SelfAdjointEigenSolver<Matrix> es(m.curvature(0.0));
  auto ev = es.eigenvalues();
  const double c2 = std::cos(alpha) * std::cos(alpha);
  const double s2 = std::sin(alpha) * std::sin(alpha);
  std::vector<double> expect{0.0, 1.5 * s2, 1.5 * s2, 2.5 * c2, 2.5 * c2};
  std::sort(expect.begin(), expect.end());
  for (int i = 0; i < 5; ++i) CHECK(std::abs(ev(i) - expect[i]) <= 1e-12);
}

TEST_CASE("symmetric-space models are constant in t") {
  auto models = {focal::constant_curvature_model(4, -1.0),
                 focal::product_space_form_model(3, 2.0, 2, 4.0, focal::ProductDirection(0.4))};
  for (const auto& m : models) {
    Matrix r0 = m.curvature(0.0);
    for (double t = -2.0; t <= 2.0; t += 0.37) CHECK(max_abs_diff(m.curvature(t), r0) <= 1e-12);
  }
}

TEST_CASE("custom diagonal models") {
  auto same = focal::custom_diagonal_model(
      3, {[](double) { return 1.0; }, [](double) { return 1.0; }});
  CHECK(max_abs_diff(same.curvature(0.5),
                     focal::constant_curvature_model(3, 1.0).curvature(0.5)) == 0.0);

  auto wavy = focal::custom_diagonal_model(4, {[](double) { return 1.0; },
                                               [](double t) { return 1.0 + 0.1 * std::sin(t); },
                                               [](double) { return 4.0; }});
  Matrix r = wavy.curvature(0.9);
  CHECK(focal::symmetry_defect(r) == 0.0);
  CHECK(max_abs_diff(wavy.curvature(0.0), wavy.curvature(1.0)) > 1e-3);

  CHECK_THROWS_AS(focal::custom_diagonal_model(3, {[](double) { return 0.0; }}),
                  std::invalid_argument);
}

TEST_CASE("asymmetric curvature operators are rejected on evaluation") {
  focal::GeodesicModel bad(3,
                           [](double) {
                             Matrix r(2, 2);
                             r << 0, 1, 0, 0;
                             return r;
                           },
                           {-1.0, 1.0});
  CHECK_THROWS_AS(bad.curvature(0.0), focal::Error);
}

TEST_CASE("radial intermediate Ricci minimum") {
  auto s4 = focal::constant_curvature_model(4, 1.0);
  CHECK(focal::radial_ric_k_min(s4, 0.0, 2) == doctest::Approx(2.0).epsilon(1e-12));

  // k = 6, p = 4 normalization: four zeros plus two eigenvalues k/(k-p) = 3.
  auto kp = focal::product_space_form_model(5, 3.0, 4, 6.0, focal::ProductDirection(0.0));
  CHECK(std::abs(focal::radial_ric_k_min(kp, 0.0, 6) - 6.0) <= 1e-12);

  // Full Ricci trace of the Ricci-normalized product at n = 3.
  auto gr = focal::product_space_form_model(3, 2.0, 2, 4.0, focal::ProductDirection(0.0));
  CHECK(std::abs(focal::radial_ric_k_min(gr, 0.0, 4) - 4.0) <= 1e-12);

  CHECK_THROWS_AS(focal::radial_ric_k_min(s4, 0.0, 0), std::invalid_argument);
  CHECK_THROWS_AS(focal::radial_ric_k_min(s4, 0.0, 4), std::invalid_argument);
}

TEST_CASE("radial minimum increments by the next smallest eigenvalue") {
  auto m = focal::product_space_form_model(3, 2.2, 3, 0.7, focal::ProductDirection(0.5));
  Eigen::SelfAdjointEigenSolver<Matrix> es(m.curvature(0.0));
  for (int k = 1; k < m.normal_dim(); ++k) {
    double inc = focal::radial_ric_k_min(m, 0.0, k + 1) - focal::radial_ric_k_min(m, 0.0, k);
    CHECK(std::abs(inc - es.eigenvalues()(k)) <= 1e-10);
  }
}
