#include "focal/models.hpp"

#include "focal/linalg.hpp"

#include <cmath>
#include <memory>
#include <utility>

namespace focal {

namespace {
constexpr double kSymTol = 1e-12;
constexpr double kHalfPi = 1.5707963267948966;
}  // namespace

ProductDirection::ProductDirection(double a) : alpha(a) {
  if (!(a >= 0.0 && a <= kHalfPi))
    throw std::invalid_argument("ProductDirection: alpha must lie in [0, pi/2]");
}

GeodesicModel::GeodesicModel(int ambient_dim, CurvatureFn op, Interval domain,
                             std::string label, std::map<std::string, double> params)
    : n_(ambient_dim),
      op_(std::move(op)),
      domain_(domain),
      label_(std::move(label)),
      params_(std::move(params)) {
  if (n_ < 2) throw std::invalid_argument("GeodesicModel: ambient dimension must be >= 2");
  if (!domain_.valid()) throw std::invalid_argument("GeodesicModel: inverted domain");
  if (!op_) throw std::invalid_argument("GeodesicModel: missing curvature operator");
}

Matrix GeodesicModel::curvature(double t) const {
  Matrix r = op_(t);
  if (r.rows() != n_ - 1 || r.cols() != n_ - 1)
    throw Error("curvature operator has wrong shape for model '" + label_ + "'");
  double scale = std::max(1.0, r.cwiseAbs().maxCoeff());
  if (symmetry_defect(r) > kSymTol * scale)
    throw Error("curvature operator is not symmetric at t=" + std::to_string(t));
  return r;
}

GeodesicModel constant_curvature_model(int n, double kappa, Interval domain) {
  if (n < 2) throw std::invalid_argument("constant_curvature_model: n must be >= 2");
  Matrix r = kappa * Matrix::Identity(n - 1, n - 1);
  return GeodesicModel(
      n, [r](double) { return r; }, domain,
      "space form (n=" + std::to_string(n) + ", kappa=" + std::to_string(kappa) + ")",
      {{"kappa", kappa}, {"n", static_cast<double>(n)}});
}

GeodesicModel product_space_form_model(int a, double kappa1, int b, double kappa2,
                                       ProductDirection dir, Interval domain) {
  if (a < 1 || b < 1 || a + b < 3)
    throw std::invalid_argument("product_space_form_model: need a,b >= 1 and a+b >= 3");
  const int n = a + b;
  const double alpha = dir.alpha;
  const double c2 = std::cos(alpha) * std::cos(alpha);
  const double s2 = std::sin(alpha) * std::sin(alpha);

  // Eigenvalues in frame order.  The velocity-aligned direction of each factor
  // is removed; if the velocity lies entirely in one factor, the whole other
  // factor is normal and its mixed planes with the velocity are flat.
  std::vector<double> eig;
  if (alpha == 0.0) {
    eig.assign(a - 1, kappa1);
    eig.insert(eig.end(), b, 0.0);
  } else if (alpha == kHalfPi) {
    eig.assign(a, 0.0);
    eig.insert(eig.end(), b - 1, kappa2);
  } else {
    eig.assign(a - 1, kappa1 * c2);
    eig.insert(eig.end(), b - 1, kappa2 * s2);
    eig.push_back(0.0);
  }

  Matrix r = Matrix::Zero(n - 1, n - 1);
  for (int i = 0; i < n - 1; ++i) r(i, i) = eig[i];
  return GeodesicModel(
      n, [r](double) { return r; }, domain,
      "sphere product (a=" + std::to_string(a) + ", b=" + std::to_string(b) + ")",
      {{"a", static_cast<double>(a)},
       {"b", static_cast<double>(b)},
       {"kappa1", kappa1},
       {"kappa2", kappa2},
       {"alpha", alpha}});
}

GeodesicModel custom_diagonal_model(int n,
                                    std::vector<std::function<double(double)>> eig_fns,
                                    Interval domain) {
  if (n < 2) throw std::invalid_argument("custom_diagonal_model: n must be >= 2");
  if (static_cast<int>(eig_fns.size()) != n - 1)
    throw std::invalid_argument("custom_diagonal_model: expected " + std::to_string(n - 1) +
                                " eigenvalue functions, got " + std::to_string(eig_fns.size()));
  auto fns = std::make_shared<std::vector<std::function<double(double)>>>(std::move(eig_fns));
  return GeodesicModel(
      n,
      [n, fns](double t) {
        Matrix r = Matrix::Zero(n - 1, n - 1);
        for (int i = 0; i < n - 1; ++i) r(i, i) = (*fns)[i](t);
        return r;
      },
      domain, "custom diagonal (n=" + std::to_string(n) + ")");
}

double radial_ric_k_min(const GeodesicModel& model, double t, int k) {
  const int m = model.normal_dim();
  if (k < 1 || k > m)
    throw std::invalid_argument("radial_ric_k_min: k must lie in [1, n-1]");
  Eigen::SelfAdjointEigenSolver<Matrix> es(model.curvature(t), Eigen::EigenvaluesOnly);
  return es.eigenvalues().head(k).sum();
}

}  // namespace focal
