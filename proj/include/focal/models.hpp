#pragma once

#include "focal/types.hpp"

#include <functional>
#include <map>
#include <vector>

namespace focal {

// Angle splitting a unit velocity between the two factors of a product:
// cos(alpha) in factor 1, sin(alpha) in factor 2.
struct ProductDirection {
  double alpha = 0.0;
  ProductDirection() = default;
  explicit ProductDirection(double a);
};

// Curvature operator R(t) = R(., gamma')gamma' restricted to the normal space
// of a unit-speed geodesic, written in a fixed parallel orthonormal frame, so
// operators are plain (n-1)x(n-1) symmetric matrices and covariant
// derivatives along the geodesic are ordinary t-derivatives.
class GeodesicModel {
 public:
  using CurvatureFn = std::function<Matrix(double)>;

  GeodesicModel(int ambient_dim, CurvatureFn op, Interval domain,
                std::string label = {}, std::map<std::string, double> params = {});

  int ambient_dim() const { return n_; }
  int normal_dim() const { return n_ - 1; }

  // R(t); throws if the supplied operator is not symmetric to 1e-12 at t.
  Matrix curvature(double t) const;

  const Interval& domain() const { return domain_; }
  const std::string& label() const { return label_; }
  const std::map<std::string, double>& params() const { return params_; }

 private:
  int n_;
  CurvatureFn op_;
  Interval domain_;
  std::string label_;
  std::map<std::string, double> params_;
};

inline constexpr Interval kDefaultDomain{-7.0, 7.0};

// Space form of curvature kappa: R(t) = kappa * Id.
GeodesicModel constant_curvature_model(int n, double kappa,
                                       Interval domain = kDefaultDomain);

// Product of two space forms S^a_{kappa1} x S^b_{kappa2} along a geodesic
// whose velocity makes angle `dir.alpha` with factor 1.  Frame ordering:
// [factor-1 directions normal to the velocity | factor-2 directions normal to
// the velocity | mixed direction (only for 0 < alpha < pi/2)].
GeodesicModel product_space_form_model(int a, double kappa1, int b, double kappa2,
                                       ProductDirection dir,
                                       Interval domain = kDefaultDomain);

// R(t) = diag(eig_fns[0](t), ..., eig_fns[n-2](t)).
GeodesicModel custom_diagonal_model(int n,
                                    std::vector<std::function<double(double)>> eig_fns,
                                    Interval domain = kDefaultDomain);

// Minimum of sum_{i=1..k} sec(gamma', E_i) over orthonormal k-frames normal to
// the geodesic, i.e. the sum of the k smallest eigenvalues of R(t).  The model
// satisfies a radial intermediate Ricci bound Ric_k >= k*kappa iff this stays
// >= k*kappa on the domain.
double radial_ric_k_min(const GeodesicModel& model, double t, int k);

}  // namespace focal
