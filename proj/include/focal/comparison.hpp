#pragma once

#include "focal/riccati.hpp"
#include "focal/transverse.hpp"

#include <optional>

namespace focal {

struct ComparisonOptions {
  double tol = 1e-6;            // pointwise slack on the trace bound
  double equality_tol = 1e-7;   // |margin| below this counts as equality
  int equality_hysteresis = 3;  // consecutive grid points before rigidity fires
  double fit_tol = 1e-6;        // sup-norm residual of the f*E fit
  double a_tol = 1e-7;
  std::optional<ModelSolution> model;  // default: anchored with equality at t0
  int splitting_samples = 200;
};

struct RigidityFindings {
  bool checked = false;
  double a_norm = 0.0;
  double fit_residual = 0.0;
  bool splitting_ok = false;
  bool ok = false;
};

// Time-sampled record of a trace comparison run; margins are model - trace.
struct ComparisonReport {
  int k = 0;
  int kappa = 0;
  std::vector<double> times;
  std::vector<double> trace_h;       // Trace S|_H(t)
  std::vector<double> model_values;  // k * lambda(t)
  std::vector<double> margins;
  bool curvature_hypothesis_ok = true;  // radial Ric_k >= k*kappa along the geodesic
  bool hypothesis_ok = false;           // Trace S|_W(t0) <= k*lambda(t0)
  double hypothesis_lhs = 0.0;
  double hypothesis_rhs = 0.0;
  std::vector<double> violation_times;
  std::vector<double> equality_times;
  bool equality_detected = false;
  double equality_time = 0.0;
  RigidityFindings rigidity;
  std::vector<FocalEvent> focal_events;
  bool truncated_at_pole = false;
  double effective_hi = 0.0;

  bool bound_ok() const { return violation_times.empty(); }
  bool pass() const {
    return curvature_hypothesis_ok && hypothesis_ok && bound_ok() &&
           (!equality_detected || rigidity.ok);
  }
};

// Coefficients of the subfamily {J : J(t0) perp W(t0)}, the transverse choice
// every comparison below makes internally.
Matrix orthogonal_complement_subfamily(const LagrangianFamily& fam, double t0,
                                       const Matrix& w_coeffs);

// Trace comparison for a k-dimensional start subspace W at t0 = interval.lo:
// builds V = {J : J(t0) perp W(t0)}, verifies full index, and checks
// Trace S|_H(t) <= k*lambda(t) on the interval.  On sustained equality the
// rigidity consequences (vanishing A, parallel splitting, fields of the form
// f*E) are verified as well.
ComparisonReport intermediate_ricci_comparison(const LagrangianFamily& fam,
                                               const Matrix& w_coeffs, int k, int kappa,
                                               Interval interval,
                                               ComparisonOptions opts = {});

struct WitnessReport {
  Vector witness_coeffs;  // field of the family spanning H(t1)
  bool hypothesis_ok = false;
  double hypothesis_lhs = 0.0;
  double hypothesis_rhs = 0.0;
  double witness_lhs = 0.0;  // <S J1, J1> at t1
  double witness_rhs = 0.0;  // lambda(t1) |J1(t1)|^2
  bool inequality_ok = false;
  bool equality = false;
};

// One-dimensional comparison: given a start field J0 satisfying
// <S J0, J0> <= lambda |J0|^2 at t0, produces the field whose value spans
// H(t1) and verifies the same inequality for it at t1.
WitnessReport sectional_comparison_witness(const LagrangianFamily& fam,
                                           const Vector& j0_coeffs, int kappa, double t1,
                                           std::optional<double> t0 = std::nullopt,
                                           std::optional<ModelSolution> sol = std::nullopt,
                                           double tol = 1e-8);

struct SingularityForcingReport {
  bool curvature_ok = false;   // radial sectional curvature >= 1 along the geodesic
  bool hypothesis_ok = false;  // some field satisfies the start inequality
  double deadline = 0.0;       // pi - alpha
  std::optional<FocalEvent> event;
  bool pass() const { return curvature_ok && hypothesis_ok && event.has_value(); }
};

// In curvature >= 1 with comparison function cot(t + alpha), the family must
// develop a kernel by time pi - alpha.
SingularityForcingReport singularity_forcing_check(const LagrangianFamily& fam, double alpha,
                                                   double t0, double time_tol = 1e-6);

struct AsymptoticRigidityOptions {
  double a_tol = 1e-7;
  double fit_tol = 1e-6;
  double cross_tol = 1e-8;
  double flat_tol = 1e-6;  // kappa = 0: bounds on S_hat and R^h
  double end_margin = 1e-2;
  int samples = 200;
};

struct AsymptoticRigidityReport {
  bool hypothesis_ok = false;
  double hypothesis_lhs = 0.0;
  double hypothesis_rhs = 0.0;
  bool full_index_ok = false;
  double max_a_norm = 0.0;
  double fit_residual = 0.0;
  double max_cross = 0.0;  // orthogonality defect between V(t) and the H-fields
  double max_shat = 0.0;   // kappa = 0 branch
  double max_rh = 0.0;     // kappa = 0 branch
  bool splitting_ok = false;
  bool ok = false;
};

// Rigidity forced by comparison solutions that blow down to -infinity at
// t_max (kappa != 0), or by a nonpositive start trace over a long horizon
// (kappa = 0): the family splits orthogonally into V and a subfamily of
// fields f*E with parallel E.
AsymptoticRigidityReport asymptotic_rigidity_check(const LagrangianFamily& fam,
                                                   const Matrix& w_coeffs, int k, int kappa,
                                                   double t_max,
                                                   AsymptoticRigidityOptions opts = {});

}  // namespace focal
