#pragma once

#include "focal/jacobi.hpp"

#include <vector>

namespace focal {

// Evaluated span of a subfamily at time t, as an orthonormal basis of
//   W(t) = {J(t) | J in W}  (+)  {J'(t) | J in W, J(t) = 0},
// the derivative lift keeping the dimension constant across zeros.
Matrix evaluated_span(const LagrangianFamily& fam, double t, const Matrix& coeffs,
                      double rank_tol = 1e-8);

// A choice of subfamily V inside a Lagrangian family, together with the
// induced horizontal bundle H(t) = V(t)^perp, the transverse Riccati operator
// S_hat (the H-projection of S restricted to H), and the A-tensor measuring
// how far the V/H split is from parallel.
class TransverseSplit {
 public:
  // v_coeffs: (n-1) x m coefficient matrix of full column rank selecting V.
  TransverseSplit(LagrangianFamily family, Matrix v_coeffs, double rank_tol = 1e-8);

  const LagrangianFamily& family() const { return family_; }
  const Matrix& v_coeffs() const { return v_coeffs_; }
  int v_dim() const { return static_cast<int>(v_coeffs_.cols()); }
  int h_dim() const { return family_.size() - v_dim(); }

  Matrix v_basis(double t) const;  // orthonormal basis of V(t)
  Matrix h_basis(double t) const;  // orthonormal basis of H(t)

  // True when no nonzero field of V vanishes at t.
  bool v_regular(double t) const;

  // sigma_min of the evaluated V-fields relative to their stacked scale;
  // 1 for an empty subfamily.
  double v_margin(double t) const;

  // S_hat at t in the given orthonormal H(t)-frame (columns), or in the
  // canonical h_basis(t) frame.  Requires full index at t: every vector of
  // H(t) must be hit by some field of the family; otherwise throws.
  Matrix transverse_riccati(double t) const;
  Matrix transverse_riccati(double t, const Matrix& h_frame) const;

  // Matrix of A_t : V(t) -> H(t) in the given (or canonical) orthonormal
  // frames; defined only at regular points of V.
  Matrix a_tensor(double t) const;
  Matrix a_tensor(double t, const Matrix& h_frame) const;
  double a_norm(double t) const;

  // A^* x for x in H(t); basis independent.
  Vector a_star_apply(double t, const Vector& x) const;

  double rank_tol() const { return rank_tol_; }

 private:
  LagrangianFamily family_;
  Matrix v_coeffs_;  // orthonormalized columns
  double rank_tol_;
};

struct FullIndexReport {
  bool ok = true;
  std::vector<double> kernel_times;    // all zeros of the family in the interval
  std::vector<double> failing_times;   // zeros whose kernel escapes V
  double worst_residual = 0.0;         // largest out-of-V component seen
};

// At every kernel time of the family inside the interval, the vanishing
// fields must lie in the chosen subfamily.
FullIndexReport full_index_check(const TransverseSplit& split, Interval interval,
                                 FocalSearchConfig cfg = {});

// Operator norm of S_hat' + S_hat^2 + R^h + 3 A A^* at t.  S_hat' is a
// centered difference in frames transported by the horizontal connection
// (X' = -A^* X), so the quotient measures the covariant derivative and not
// the rotation of H(t).
double transverse_residual(const TransverseSplit& split, double t, double fd_step = 1e-4);

struct EigenvalueTransferResult {
  double trace_transverse = 0.0;  // Trace S_hat_t
  double trace_restricted = 0.0;  // Trace S_t |_W
  double difference = 0.0;
  bool subspace_match = false;  // W(t) = H(t)
};

// Trace S_hat_t equals Trace S_t|_W whenever W(t) = H(t).
EigenvalueTransferResult eigenvalue_transfer_check(const TransverseSplit& split, double t,
                                                   const Matrix& w_coeffs,
                                                   double match_tol = 1e-6);

struct SplittingReport {
  double max_a_norm = 0.0;
  bool a_vanishes = false;      // max ||A|| <= a_tol on the interval
  double max_v_drift = 0.0;     // time-derivative scale of the V(t) projector
  double max_h_defect = 0.0;    // leakage of the candidate H-subfamily into V(t)
  bool v_parallel = false;
  bool h_subfamily = false;     // exists H in the family with H(t) = H(t) throughout
  bool splitting = false;
  int irregular_samples = 0;
};

// Checks the consequences of a vanishing A-tensor: V(t) and H(t) are parallel
// distributions and H(t) is realized by a subfamily of Jacobi fields.
SplittingReport splitting_detector(const TransverseSplit& split, Interval interval,
                                   int samples = 200, double a_tol = 1e-7,
                                   double parallel_tol = 1e-6);

}  // namespace focal
