#include "focal/transverse.hpp"

#include "focal/linalg.hpp"
#include "focal/riccati.hpp"

#include <algorithm>
#include <cmath>

namespace focal {

namespace {

double stacked_scale(const Matrix& a, const Matrix& b) {
  Matrix stacked(a.rows() + b.rows(), a.cols());
  stacked << a, b;
  return spectral_norm(stacked);
}

}  // namespace

Matrix evaluated_span(const LagrangianFamily& fam, double t, const Matrix& coeffs,
                      double rank_tol) {
  const int nm1 = fam.size();
  const int m = static_cast<int>(coeffs.cols());
  if (m == 0) return Matrix(nm1, 0);
  auto [j, p] = fam.integrate(t);
  Matrix values = j * coeffs;
  Matrix derivs = p * coeffs;
  const double scale = stacked_scale(values, derivs);
  if (scale == 0.0) throw Error("evaluated_span: subfamily is identically degenerate");

  Eigen::JacobiSVD<Matrix> svd(values, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  int vanished = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) <= rank_tol * scale) ++vanished;

  Matrix gens(nm1, m + vanished);
  gens.leftCols(m) = values;
  if (vanished > 0)
    gens.rightCols(vanished) = derivs * svd.matrixV().rightCols(vanished);

  // The span has dimension exactly m; take the m dominant directions.
  Eigen::JacobiSVD<Matrix> svd2(gens, Eigen::ComputeThinU);
  if (svd2.singularValues()(m - 1) <= rank_tol * svd2.singularValues()(0))
    throw Error("evaluated_span: span collapsed at t=" + std::to_string(t));
  return svd2.matrixU().leftCols(m);
}

TransverseSplit::TransverseSplit(LagrangianFamily family, Matrix v_coeffs, double rank_tol)
    : family_(std::move(family)), rank_tol_(rank_tol) {
  if (v_coeffs.rows() != family_.size())
    throw std::invalid_argument("TransverseSplit: coefficient vectors have wrong length");
  if (v_coeffs.cols() > family_.size())
    throw std::invalid_argument("TransverseSplit: subfamily larger than the family");
  v_coeffs_ = v_coeffs.cols() == 0 ? Matrix(family_.size(), 0) : orthonormalize(v_coeffs);
}

Matrix TransverseSplit::v_basis(double t) const {
  return evaluated_span(family_, t, v_coeffs_, rank_tol_);
}

Matrix TransverseSplit::h_basis(double t) const {
  return complement_basis(v_basis(t), family_.size());
}

bool TransverseSplit::v_regular(double t) const {
  if (v_dim() == 0) return true;
  return v_margin(t) > rank_tol_;
}

double TransverseSplit::v_margin(double t) const {
  if (v_dim() == 0) return 1.0;
  auto [j, p] = family_.integrate(t);
  Matrix values = j * v_coeffs_;
  Matrix derivs = p * v_coeffs_;
  Eigen::JacobiSVD<Matrix> svd(values);
  double scale = stacked_scale(values, derivs);
  return scale > 0.0 ? svd.singularValues()(v_dim() - 1) / scale : 0.0;
}

Matrix TransverseSplit::transverse_riccati(double t) const {
  return transverse_riccati(t, h_basis(t));
}

Matrix TransverseSplit::transverse_riccati(double t, const Matrix& h_frame) const {
  const int h = static_cast<int>(h_frame.cols());
  auto [j, p] = family_.integrate(t);
  const double scale = stacked_scale(j, p);
  const double cut = rank_tol_ * scale;

  Matrix shat(h, h);
  for (int col = 0; col < h; ++col) {
    // A field hitting the frame vector; any two choices differ by a kernel
    // field whose derivative lands in V(t), so the H-projection is unambiguous.
    Vector c = pinv_solve(j, h_frame.col(col), cut);
    if ((j * c - h_frame.col(col)).norm() > 1e-7 * h_frame.col(col).norm())
      throw FullIndexViolation(
          "transverse_riccati: no field of the family reaches H(t) at t=" + std::to_string(t),
          t);
    shat.col(col) = h_frame.transpose() * (p * c);
  }
  return shat;
}

Matrix TransverseSplit::a_tensor(double t) const { return a_tensor(t, h_basis(t)); }

Matrix TransverseSplit::a_tensor(double t, const Matrix& h_frame) const {
  const int m = v_dim();
  if (m == 0) return Matrix(h_frame.cols(), 0);
  auto [j, p] = family_.integrate(t);
  Matrix values = j * v_coeffs_;
  Matrix derivs = p * v_coeffs_;
  Eigen::JacobiSVD<Matrix> svd(values, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  if (sv(m - 1) <= rank_tol_ * stacked_scale(values, derivs))
    throw SingularEvaluation(
        "a_tensor: a field of the subfamily vanishes at t=" + std::to_string(t), t);

  // Columns indexed by the orthonormal basis U of V(t); the field hitting
  // U.col(i) has coefficients v_coeffs * V * Sigma^{-1} e_i.
  Matrix a(h_frame.cols(), m);
  for (int i = 0; i < m; ++i) {
    Vector c = v_coeffs_ * (svd.matrixV().col(i) / sv(i));
    a.col(i) = h_frame.transpose() * (p * c);
  }
  return a;
}

double TransverseSplit::a_norm(double t) const { return spectral_norm(a_tensor(t)); }

Vector TransverseSplit::a_star_apply(double t, const Vector& x) const {
  if (v_dim() == 0) return Vector::Zero(family_.size());
  Matrix hb = h_basis(t);

  auto [j, p] = family_.integrate(t);
  Matrix values = j * v_coeffs_;
  Matrix derivs = p * v_coeffs_;
  Eigen::JacobiSVD<Matrix> svd(values, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const int m = v_dim();
  if (sv(m - 1) <= rank_tol_ * stacked_scale(values, derivs))
    throw SingularEvaluation(
        "a_star_apply: a field of the subfamily vanishes at t=" + std::to_string(t), t);

  Matrix a(hb.cols(), m);
  for (int i = 0; i < m; ++i) {
    Vector c = v_coeffs_ * (svd.matrixV().col(i) / sv(i));
    a.col(i) = hb.transpose() * (p * c);
  }
  // A^* = U A^T (hb^T x): post-image in V(t), pre-projection onto H(t).
  return svd.matrixU() * (a.transpose() * (hb.transpose() * x));
}

FullIndexReport full_index_check(const TransverseSplit& split, Interval interval,
                                 FocalSearchConfig cfg) {
  cfg.exclusion = 0.0;  // kernels at the anchor count here
  FullIndexReport rep;
  const Matrix& vc = split.v_coeffs();
  auto events = focal_events(split.family(), interval, cfg);
  for (const auto& ev : events) {
    rep.kernel_times.push_back(ev.time);
    for (int i = 0; i < ev.kernel.cols(); ++i) {
      Vector k = ev.kernel.col(i);
      double resid = (k - vc * (vc.transpose() * k)).norm();
      rep.worst_residual = std::max(rep.worst_residual, resid);
      if (resid > 1e-8) {
        rep.ok = false;
        if (rep.failing_times.empty() || rep.failing_times.back() != ev.time)
          rep.failing_times.push_back(ev.time);
      }
    }
  }
  return rep;
}

namespace {

// Transport an orthonormal H-frame from t to `target` with one fourth-order
// step of X' = -A^* X, then re-project onto H(target) and re-orthonormalize.
Matrix transport_h_frame(const TransverseSplit& split, double t, double target,
                         const Matrix& frame) {
  const double dt = target - t;
  Matrix x = frame;
  if (split.v_dim() > 0) {
    auto rhs = [&](double s, const Matrix& y) {
      Matrix out(y.rows(), y.cols());
      for (int c = 0; c < y.cols(); ++c) out.col(c) = -split.a_star_apply(s, y.col(c));
      return out;
    };
    Matrix k1 = rhs(t, x);
    Matrix k2 = rhs(t + 0.5 * dt, x + 0.5 * dt * k1);
    Matrix k3 = rhs(t + 0.5 * dt, x + 0.5 * dt * k2);
    Matrix k4 = rhs(target, x + dt * k3);
    x += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  Matrix vb = split.v_basis(target);
  if (vb.cols() > 0) x -= vb * (vb.transpose() * x);
  return orthonormalize(x);
}

}  // namespace

double transverse_residual(const TransverseSplit& split, double t, double fd_step) {
  if (!(fd_step > 0.0)) throw std::invalid_argument("transverse_residual: bad step");
  if (split.h_dim() == 0) return 0.0;

  const Matrix x0 = split.h_basis(t);
  const Matrix xp = transport_h_frame(split, t, t + fd_step, x0);
  const Matrix xm = transport_h_frame(split, t, t - fd_step, x0);

  const Matrix m0 = split.transverse_riccati(t, x0);
  const Matrix mp = split.transverse_riccati(t + fd_step, xp);
  const Matrix mm = split.transverse_riccati(t - fd_step, xm);

  Matrix ds = (mp - mm) / (2.0 * fd_step);
  Matrix rh = x0.transpose() * split.family().model().curvature(t) * x0;
  Matrix a = split.a_tensor(t, x0);
  Matrix residual = ds + m0 * m0 + rh + 3.0 * a * a.transpose();
  return spectral_norm(residual);
}

EigenvalueTransferResult eigenvalue_transfer_check(const TransverseSplit& split, double t,
                                                   const Matrix& w_coeffs, double match_tol) {
  EigenvalueTransferResult out;
  Matrix w_span = evaluated_span(split.family(), t, w_coeffs, split.rank_tol());
  Matrix h = split.h_basis(t);
  out.subspace_match =
      w_span.cols() == h.cols() &&
      spectral_norm(w_span * w_span.transpose() - h * h.transpose()) <= match_tol;
  out.trace_transverse = split.transverse_riccati(t).trace();
  out.trace_restricted = focal::trace_restricted(split.family(), t, w_coeffs);
  out.difference = out.trace_transverse - out.trace_restricted;
  return out;
}

SplittingReport splitting_detector(const TransverseSplit& split, Interval interval,
                                   int samples, double a_tol, double parallel_tol) {
  if (samples < 2) throw std::invalid_argument("splitting_detector: need >= 2 samples");
  SplittingReport rep;
  const LagrangianFamily& fam = split.family();
  const int nm1 = fam.size();
  const double dt = interval.length() / (samples - 1);

  // Sample projectors of V(t); in a parallel frame a parallel distribution is
  // a constant subspace, so parallelism is constancy of the projector.
  std::vector<double> ts;
  std::vector<Matrix> projectors;
  for (int i = 0; i < samples; ++i) {
    double t = interval.lo + i * dt;
    if (!split.v_regular(t)) {
      ++rep.irregular_samples;
      continue;
    }
    if (split.v_dim() > 0) rep.max_a_norm = std::max(rep.max_a_norm, split.a_norm(t));
    Matrix vb = split.v_basis(t);
    ts.push_back(t);
    projectors.push_back(vb * vb.transpose());
  }
  rep.a_vanishes = rep.max_a_norm <= a_tol;

  for (size_t i = 1; i < projectors.size(); ++i) {
    double gap = ts[i] - ts[i - 1];
    rep.max_v_drift =
        std::max(rep.max_v_drift, spectral_norm(projectors[i] - projectors[i - 1]) / gap);
  }
  rep.v_parallel = rep.max_v_drift <= parallel_tol;

  // Seed a candidate subfamily in H at a regular reference time and watch it.
  if (!ts.empty() && split.h_dim() > 0) {
    double t_ref = ts[ts.size() / 2];
    auto [jr, pr] = fam.integrate(t_ref);
    Matrix h_ref = split.h_basis(t_ref);
    const double cut = split.rank_tol() * stacked_scale(jr, pr);
    Matrix coeffs(nm1, h_ref.cols());
    bool seeded = true;
    for (int c = 0; c < h_ref.cols(); ++c) {
      Vector x = pinv_solve(jr, h_ref.col(c), cut);
      if ((jr * x - h_ref.col(c)).norm() > 1e-7) seeded = false;
      coeffs.col(c) = x;
    }
    if (seeded) {
      for (size_t i = 0; i < ts.size(); ++i) {
        Matrix y = fam.value(ts[i]) * coeffs;
        Matrix yo = orthonormalize(y);
        Matrix vb = split.v_basis(ts[i]);
        if (vb.cols() > 0)
          rep.max_h_defect = std::max(rep.max_h_defect, spectral_norm(vb.transpose() * yo));
      }
      rep.h_subfamily = rep.max_h_defect <= parallel_tol;
    }
  } else if (split.h_dim() == 0) {
    rep.h_subfamily = true;
  }

  rep.splitting = rep.a_vanishes && rep.v_parallel && rep.h_subfamily;
  return rep;
}

}  // namespace focal
