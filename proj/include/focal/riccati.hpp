#pragma once

#include "focal/jacobi.hpp"

#include <optional>
#include <span>

namespace focal {

// Scalar comparison solution: f(t) is c1*sin t + c2*cos t (kappa = 1),
// c1*t + c2 (kappa = 0) or c1*sinh t + c2*cosh t (kappa = -1), and the
// comparison function lambda(t) = f'(t)/f(t) solves
// lambda' + lambda^2 + kappa = 0 away from the zeros of f.
class ModelSolution {
 public:
  static constexpr double kPoleTol = 1e-12;

  ModelSolution(int kappa, double c1, double c2);

  // f(t0) = 1, f'(t0) = lambda0.
  static ModelSolution from_initial(int kappa, double t0, double lambda0);
  // kappa = 1, f = sin(t + alpha), lambda = cot(t + alpha).
  static ModelSolution sphere_phase(double alpha);
  // lambda -> -infinity as t -> t_max from the left:
  // cot(pi + t - t_max), 1/(t - t_max), coth(t - t_max).
  static ModelSolution blowdown_at(int kappa, double t_max);

  int curvature_sign() const { return kappa_; }
  double c1() const { return c1_; }
  double c2() const { return c2_; }

  double value(double t) const;       // f(t)
  double derivative(double t) const;  // f'(t)

  // lambda(t) = f'(t)/f(t); empty within kPoleTol of a zero of f.
  std::optional<double> riccati(double t) const;

  // Distance from t to the nearest zero of f (+infinity if f never vanishes).
  double pole_distance(double t) const;
  std::vector<double> poles_in(Interval window) const;

 private:
  int kappa_;
  double c1_, c2_;
};

// S(t) = J'(t) J(t)^{-1}.  Self-adjoint for Lagrangian families; throws
// SingularEvaluation at focal times of the family.
Matrix riccati_operator(const LagrangianFamily& fam, double t);

struct ScalarComparisonReport {
  bool hypothesis_ok = false;        // s(t0) <= lambda(t0)
  double hypothesis_lhs = 0.0;
  double hypothesis_rhs = 0.0;
  std::vector<double> violation_times;  // s(t) > lambda(t) + tol
  std::vector<double> equality_times;   // |s(t) - lambda(t)| <= tol
  bool rigidity_ok = true;  // equality at t1 forces s == lambda back to t0
  int samples_used = 0;
  bool pass() const { return hypothesis_ok && violation_times.empty() && rigidity_ok; }
};

// Pointwise check of s(t) <= lambda(t) on the sampled series, with the
// equality-propagation consequence: any equality time t1 requires equality on
// all of [t0, t1].
ScalarComparisonReport scalar_comparison_check(
    std::span<const std::pair<double, double>> s_samples, const ModelSolution& sol,
    Interval interval, double tol = 1e-7);

// Trace of P_W o S restricted to W(t) for the subfamily spanned by the
// coefficient columns of w_coeffs, computed from <S J, J> = <J', J> on
// evaluated fields so the full evaluation map need not be invertible.
// Throws if a nonzero field of the subfamily vanishes at t.
double trace_restricted(const LagrangianFamily& fam, double t, const Matrix& w_coeffs);

}  // namespace focal
