#pragma once

// Seeded random scenario generators shared by the property suites.

#include <focal/jacobi.hpp>
#include <focal/linalg.hpp>

#include <optional>
#include <random>

namespace gen {

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr double kHalfPi = 0.5 * kPi;

inline focal::Matrix gaussian(std::mt19937& rng, int rows, int cols) {
  std::normal_distribution<double> g(0.0, 1.0);
  focal::Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = g(rng);
  return m;
}

inline focal::Matrix random_symmetric(std::mt19937& rng, int n, double scale) {
  focal::Matrix a = gaussian(rng, n, n);
  return scale * 0.5 * (a + a.transpose());
}

inline focal::Matrix random_orthonormal(std::mt19937& rng, int rows, int cols) {
  return focal::orthonormalize(gaussian(rng, rows, cols));
}

// A model from the in-scope pool: space forms and sphere products, any
// direction angle.  Domain [-4, 4].
inline focal::GeodesicModel random_model(std::mt19937& rng, int n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const focal::Interval dom{-4.0, 4.0};
  if (u(rng) < 0.35 || n < 3) {
    std::uniform_real_distribution<double> kap(-1.0, 4.0);
    return focal::constant_curvature_model(n, kap(rng), dom);
  }
  std::uniform_int_distribution<int> ad(1, n - 1);
  int a = ad(rng);
  int b = n - a;
  std::uniform_real_distribution<double> kap(0.5, 5.0);
  double alpha;
  double pick = u(rng);
  if (pick < 0.4) {
    alpha = 0.0;
  } else if (pick < 0.7) {
    alpha = kHalfPi;
  } else {
    alpha = 0.3 + u(rng) * (kHalfPi - 0.6);
  }
  return focal::product_space_form_model(a, kap(rng), b, kap(rng),
                                         focal::ProductDirection(alpha), dom);
}

// A Lagrangian family with invertible evaluation at the anchor:
// J(0) = Id, J'(0) symmetric.
inline focal::LagrangianFamily random_lagrangian(std::mt19937& rng,
                                                 const focal::GeodesicModel& model) {
  const int m = model.normal_dim();
  return focal::LagrangianFamily::from_seed(model, 0.0, focal::Matrix::Identity(m, m),
                                            random_symmetric(rng, m, 0.7));
}

struct CurvedScenario {
  focal::GeodesicModel model;
  focal::SubmanifoldData n_data;
  int k = 1;
};

// Model with radial Ric_k >= k along the geodesic, plus a submanifold of
// dimension >= k seeded with an arbitrary symmetric shape operator.
inline CurvedScenario random_ric_k_scenario(std::mt19937& rng) {
  std::uniform_int_distribution<int> nd(3, 8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (;;) {
    const int n = nd(rng);
    const int nm1 = n - 1;
    std::optional<focal::GeodesicModel> model;
    if (u(rng) < 0.4) {
      std::uniform_real_distribution<double> kap(1.0, 4.0);
      model = focal::constant_curvature_model(n, kap(rng), {-4.0, 4.0});
    } else {
      model = random_model(rng, n);
    }
    std::uniform_int_distribution<int> kd(1, nm1);
    const int k = kd(rng);
    if (focal::radial_ric_k_min(*model, 0.0, k) < k) continue;

    std::uniform_int_distribution<int> dd(k, nm1);
    const int d = dd(rng);
    focal::Matrix basis = random_orthonormal(rng, nm1, d);
    focal::Matrix shape = u(rng) < 0.5 ? focal::Matrix::Zero(d, d)
                                       : random_symmetric(rng, d, 0.6);
    return CurvedScenario{std::move(*model), focal::SubmanifoldData{d, shape, basis}, k};
  }
}

}  // namespace gen
