#include "focal/riccati.hpp"

#include "focal/linalg.hpp"

#include <cmath>
#include <limits>

namespace focal {

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kRankTol = 1e-8;
constexpr double kInf = std::numeric_limits<double>::infinity();
}  // namespace

ModelSolution::ModelSolution(int kappa, double c1, double c2)
    : kappa_(kappa), c1_(c1), c2_(c2) {
  if (kappa != -1 && kappa != 0 && kappa != 1)
    throw std::invalid_argument(
        "ModelSolution: curvature must be rescaled to -1, 0 or 1 by the caller");
  if (c1 == 0.0 && c2 == 0.0)
    throw std::invalid_argument("ModelSolution: coefficients must not both vanish");
}

ModelSolution ModelSolution::from_initial(int kappa, double t0, double lambda0) {
  switch (kappa) {
    case 1:
      return ModelSolution(1, std::sin(t0) + lambda0 * std::cos(t0),
                           std::cos(t0) - lambda0 * std::sin(t0));
    case 0:
      return ModelSolution(0, lambda0, 1.0 - lambda0 * t0);
    case -1:
      return ModelSolution(-1, lambda0 * std::cosh(t0) - std::sinh(t0),
                           std::cosh(t0) - lambda0 * std::sinh(t0));
    default:
      throw std::invalid_argument("ModelSolution::from_initial: bad curvature");
  }
}

ModelSolution ModelSolution::sphere_phase(double alpha) {
  return ModelSolution(1, std::cos(alpha), std::sin(alpha));
}

ModelSolution ModelSolution::blowdown_at(int kappa, double t_max) {
  switch (kappa) {
    case 1:  // sin(t - t_max + pi)
      return ModelSolution(1, std::cos(kPi - t_max), std::sin(kPi - t_max));
    case 0:  // t - t_max
      return ModelSolution(0, 1.0, -t_max);
    case -1:  // sinh(t - t_max)
      return ModelSolution(-1, std::cosh(t_max), -std::sinh(t_max));
    default:
      throw std::invalid_argument("ModelSolution::blowdown_at: bad curvature");
  }
}

double ModelSolution::value(double t) const {
  switch (kappa_) {
    case 1:
      return c1_ * std::sin(t) + c2_ * std::cos(t);
    case 0:
      return c1_ * t + c2_;
    default:
      return c1_ * std::sinh(t) + c2_ * std::cosh(t);
  }
}

double ModelSolution::derivative(double t) const {
  switch (kappa_) {
    case 1:
      return c1_ * std::cos(t) - c2_ * std::sin(t);
    case 0:
      return c1_;
    default:
      return c1_ * std::cosh(t) + c2_ * std::sinh(t);
  }
}

double ModelSolution::pole_distance(double t) const {
  switch (kappa_) {
    case 1: {
      // f = A sin(t + phi); zeros at m*pi - phi
      double phi = std::atan2(c2_, c1_);
      double x = t + phi;
      double m = std::round(x / kPi);
      return std::abs(x - m * kPi);
    }
    case 0:
      return c1_ == 0.0 ? kInf : std::abs(t + c2_ / c1_);
    default: {
      if (std::abs(c2_) >= std::abs(c1_)) return kInf;  // includes c1 = 0
      return std::abs(t - std::atanh(-c2_ / c1_));
    }
  }
}

std::optional<double> ModelSolution::riccati(double t) const {
  if (pole_distance(t) <= kPoleTol) return std::nullopt;
  return derivative(t) / value(t);
}

std::vector<double> ModelSolution::poles_in(Interval window) const {
  std::vector<double> out;
  switch (kappa_) {
    case 1: {
      double phi = std::atan2(c2_, c1_);
      double m = std::ceil((window.lo + phi) / kPi);
      for (double z = m * kPi - phi; z <= window.hi; z += kPi) out.push_back(z);
      break;
    }
    case 0: {
      if (c1_ != 0.0) {
        double z = -c2_ / c1_;
        if (window.contains(z, 0.0)) out.push_back(z);
      }
      break;
    }
    default: {
      if (std::abs(c2_) < std::abs(c1_)) {
        double z = std::atanh(-c2_ / c1_);
        if (window.contains(z, 0.0)) out.push_back(z);
      }
      break;
    }
  }
  return out;
}

Matrix riccati_operator(const LagrangianFamily& fam, double t) {
  auto [j, p] = fam.integrate(t);
  Matrix stacked(2 * j.rows(), j.cols());
  stacked << j, p;
  const double scale = spectral_norm(stacked);
  Eigen::JacobiSVD<Matrix> svd(j);
  if (svd.singularValues()(j.cols() - 1) <= kRankTol * scale)
    throw SingularEvaluation(
        "riccati_operator: evaluation map singular at t=" + std::to_string(t), t);
  // S J = J'  <=>  J^T S^T = J'^T
  return j.transpose().partialPivLu().solve(p.transpose()).transpose();
}

ScalarComparisonReport scalar_comparison_check(
    std::span<const std::pair<double, double>> s_samples, const ModelSolution& sol,
    Interval interval, double tol) {
  ScalarComparisonReport rep;
  bool first = true;
  for (const auto& [t, s] : s_samples) {
    if (!interval.contains(t)) continue;
    auto lam = sol.riccati(t);
    if (!lam) continue;  // sample at a pole carries no information
    ++rep.samples_used;
    if (first) {
      rep.hypothesis_lhs = s;
      rep.hypothesis_rhs = *lam;
      rep.hypothesis_ok = s <= *lam + tol;
      first = false;
      if (!rep.hypothesis_ok) return rep;  // hypothesis failure, not a violation
    }
    if (s > *lam + tol) rep.violation_times.push_back(t);
    if (std::abs(s - *lam) <= tol) rep.equality_times.push_back(t);
  }
  if (!rep.equality_times.empty()) {
    // Equality at t1 must propagate back to the start of the interval.
    double t1 = rep.equality_times.back();
    for (const auto& [t, s] : s_samples) {
      if (!interval.contains(t) || t > t1) continue;
      auto lam = sol.riccati(t);
      if (!lam) continue;
      if (std::abs(s - *lam) > tol) {
        rep.rigidity_ok = false;
        break;
      }
    }
  }
  return rep;
}

double trace_restricted(const LagrangianFamily& fam, double t, const Matrix& w_coeffs) {
  const int m = static_cast<int>(w_coeffs.cols());
  if (m == 0) return 0.0;
  if (w_coeffs.rows() != fam.size())
    throw std::invalid_argument("trace_restricted: coefficient vectors have wrong length");

  auto [j, p] = fam.integrate(t);
  Matrix values = j * w_coeffs;       // W(t) columns
  Matrix derivs = p * w_coeffs;       // S applied to them
  Matrix stacked(2 * values.rows(), m);
  stacked << values, derivs;
  const double scale = spectral_norm(stacked);

  Eigen::JacobiSVD<Matrix> svd(values);
  if (svd.singularValues()(m - 1) <= kRankTol * scale)
    throw SingularEvaluation(
        "trace_restricted: a field of the subfamily vanishes at t=" + std::to_string(t), t);

  // Trace(P_W S|_W) over an orthonormal basis Q = values * R^{-1}.
  Eigen::HouseholderQR<Matrix> qr(values);
  Matrix q = Matrix(qr.householderQ()).leftCols(m);
  Matrix r = qr.matrixQR().topRows(m).triangularView<Eigen::Upper>();
  Matrix g = r.triangularView<Eigen::Upper>().solve(Matrix::Identity(m, m));
  return (q.transpose() * derivs * g).trace();
}

}  // namespace focal
