#include "focal/comparison.hpp"

#include "focal/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace focal {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kHypTol = 1e-7;

double stacked_scale(const Matrix& a, const Matrix& b) {
  Matrix stacked(a.rows() + b.rows(), a.cols());
  stacked << a, b;
  return spectral_norm(stacked);
}

// Coefficients of V = {J : J(t0) perp W(t0)} for the start subspace spanned
// by the values of the w_coeffs fields at t0.
Matrix perp_subfamily(const LagrangianFamily& fam, double t0, const Matrix& w_coeffs,
                      int expected_dim) {
  auto [j, p] = fam.integrate(t0);
  Matrix w_values = j * w_coeffs;
  Eigen::JacobiSVD<Matrix> wsvd(w_values);
  const int k = static_cast<int>(w_coeffs.cols());
  if (wsvd.singularValues()(k - 1) <= 1e-10 * stacked_scale(w_values, p * w_coeffs))
    throw SingularEvaluation("start subspace degenerates at t0: a field vanishes", t0);

  Matrix w_on = orthonormalize(w_values);
  Matrix m = w_on.transpose() * j;  // k x (n-1)
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > 1e-10 * sv(0)) ++rank;
  Matrix v = svd.matrixV().rightCols(fam.size() - rank);
  if (v.cols() != expected_dim)
    throw Error("orthogonal subfamily has unexpected dimension " +
                std::to_string(v.cols()) + " (expected " + std::to_string(expected_dim) + ")");
  return v;
}

// Least-squares fit of each field (column of coeffs) to f(t)*E with E a
// constant vector; returns the worst relative sup-norm residual.
double fit_fields_to_model(const LagrangianFamily& fam, const Matrix& coeffs,
                           const ModelSolution& sol, Interval window, int samples) {
  if (coeffs.cols() == 0) return 0.0;
  const double dt = samples > 1 ? window.length() / (samples - 1) : 0.0;
  double worst = 0.0;
  for (int c = 0; c < coeffs.cols(); ++c) {
    std::vector<double> fs;
    std::vector<Vector> ys;
    double ff = 0.0;
    Vector fy = Vector::Zero(fam.size());
    for (int i = 0; i < samples; ++i) {
      double t = window.lo + i * dt;
      double f = sol.value(t);
      Vector y = fam.value(t) * coeffs.col(c);
      ff += f * f;
      fy += f * y;
      fs.push_back(f);
      ys.push_back(std::move(y));
    }
    if (ff == 0.0) throw Error("fit_fields_to_model: comparison function vanishes identically");
    Vector e = fy / ff;
    double resid = 0.0, scale = 0.0;
    for (size_t i = 0; i < ys.size(); ++i) {
      resid = std::max(resid, (ys[i] - fs[i] * e).norm());
      scale = std::max(scale, ys[i].norm());
    }
    if (scale > 0.0) worst = std::max(worst, resid / scale);
  }
  return worst;
}

// H-subfamily coefficients at a reference time where the evaluation is usable.
Matrix h_subfamily_coeffs(const TransverseSplit& split, double t_ref) {
  const LagrangianFamily& fam = split.family();
  auto [j, p] = fam.integrate(t_ref);
  Matrix h = split.h_basis(t_ref);
  const double cut = split.rank_tol() * stacked_scale(j, p);
  Matrix coeffs(fam.size(), h.cols());
  for (int c = 0; c < h.cols(); ++c) {
    Vector x = pinv_solve(j, h.col(c), cut);
    if ((j * x - h.col(c)).norm() > 1e-7)
      throw FullIndexViolation("no field of the family spans H at t=" + std::to_string(t_ref),
                               t_ref);
    coeffs.col(c) = x;
  }
  return coeffs;
}

}  // namespace

Matrix orthogonal_complement_subfamily(const LagrangianFamily& fam, double t0,
                                       const Matrix& w_coeffs) {
  return perp_subfamily(fam, t0, w_coeffs, fam.size() - static_cast<int>(w_coeffs.cols()));
}

ComparisonReport intermediate_ricci_comparison(const LagrangianFamily& fam,
                                               const Matrix& w_coeffs, int k, int kappa,
                                               Interval interval, ComparisonOptions opts) {
  const int nm1 = fam.size();
  if (k < 1 || k > nm1) throw std::invalid_argument("comparison: k out of range");
  if (w_coeffs.rows() != nm1 || w_coeffs.cols() != k)
    throw std::invalid_argument("comparison: W coefficients must be (n-1) x k");
  if (!interval.valid()) throw std::invalid_argument("comparison: inverted interval");

  ComparisonReport rep;
  rep.k = k;
  rep.kappa = kappa;
  const double t0 = interval.lo;

  // Radial curvature hypothesis along the geodesic.
  {
    const int probes = 33;
    for (int i = 0; i < probes && rep.curvature_hypothesis_ok; ++i) {
      double t = interval.lo + interval.length() * i / (probes - 1);
      if (radial_ric_k_min(fam.model(), t, k) < k * kappa - 1e-9)
        rep.curvature_hypothesis_ok = false;
    }
  }

  const double start_trace = trace_restricted(fam, t0, w_coeffs);
  ModelSolution sol = opts.model ? *opts.model
                                 : ModelSolution::from_initial(kappa, t0, start_trace / k);
  {
    auto lam0 = sol.riccati(t0);
    if (!lam0) throw Error("comparison: model solution has a pole at t0");
    rep.hypothesis_lhs = start_trace;
    rep.hypothesis_rhs = k * (*lam0);
    rep.hypothesis_ok = rep.hypothesis_lhs <= rep.hypothesis_rhs + kHypTol;
  }

  Matrix v_coeffs = perp_subfamily(fam, t0, w_coeffs, nm1 - k);
  TransverseSplit split(fam, v_coeffs);

  // The comparison function may blow down inside the window (a forced
  // singularity); the sweep stops just short of it.
  rep.effective_hi = interval.hi;
  for (double pole : sol.poles_in({t0 + 1e-12, interval.hi})) {
    rep.effective_hi = std::min(rep.effective_hi, pole - 10 * fam.step());
    rep.truncated_at_pole = true;
  }

  Interval sweep{t0, rep.effective_hi};
  auto fir = full_index_check(split, sweep);
  if (!fir.ok)
    throw FullIndexViolation("comparison: subfamily loses full index at t=" +
                                 std::to_string(fir.failing_times.front()),
                             fir.failing_times.front());

  // Sample the trace bound on the integration grid.
  const double h = fam.step();
  const double anchor = fam.anchor_time();
  long i_lo = static_cast<long>(std::ceil((sweep.lo - anchor) / h - 1e-9));
  long i_hi = static_cast<long>(std::floor((sweep.hi - anchor) / h + 1e-9));
  std::vector<double> ts;
  ts.push_back(sweep.lo);
  for (long i = i_lo; i <= i_hi; ++i) {
    double t = anchor + i * h;
    if (t > ts.back() + 0.5 * h) ts.push_back(t);
  }
  if (sweep.hi > ts.back() + 0.5 * h) ts.push_back(sweep.hi);

  int eq_run = 0;
  int best_run = 0;
  for (double t : ts) {
    auto lam = sol.riccati(t);
    if (!lam) continue;
    double trace = split.transverse_riccati(t).trace();
    double model_val = k * (*lam);
    double margin = model_val - trace;
    rep.times.push_back(t);
    rep.trace_h.push_back(trace);
    rep.model_values.push_back(model_val);
    rep.margins.push_back(margin);
    if (rep.curvature_hypothesis_ok && rep.hypothesis_ok && margin < -opts.tol)
      rep.violation_times.push_back(t);
    if (std::abs(margin) <= opts.equality_tol) {
      rep.equality_times.push_back(t);
      ++eq_run;
      if (eq_run >= opts.equality_hysteresis) {
        rep.equality_detected = true;
        rep.equality_time = t;
      }
      best_run = std::max(best_run, eq_run);
    } else {
      eq_run = 0;
    }
  }

  rep.focal_events = focal_events(fam, sweep);

  if (rep.equality_detected) {
    rep.rigidity.checked = true;
    Interval rigid{t0, rep.equality_time};
    auto srep = splitting_detector(split, rigid, opts.splitting_samples, opts.a_tol);
    rep.rigidity.a_norm = srep.max_a_norm;
    rep.rigidity.splitting_ok = srep.splitting;
    double t_ref = 0.5 * (rigid.lo + rigid.hi);
    Matrix hc = h_subfamily_coeffs(split, t_ref);
    rep.rigidity.fit_residual = fit_fields_to_model(fam, hc, sol, rigid, opts.splitting_samples);
    rep.rigidity.ok = srep.splitting && rep.rigidity.a_norm <= opts.a_tol &&
                      rep.rigidity.fit_residual <= opts.fit_tol;
  }
  return rep;
}

WitnessReport sectional_comparison_witness(const LagrangianFamily& fam,
                                           const Vector& j0_coeffs, int kappa, double t1,
                                           std::optional<double> t0_opt,
                                           std::optional<ModelSolution> sol_opt, double tol) {
  const int nm1 = fam.size();
  if (j0_coeffs.size() != nm1)
    throw std::invalid_argument("witness: start coefficients have wrong length");
  const double t0 = t0_opt.value_or(fam.anchor_time());

  WitnessReport rep;
  auto [j, p] = fam.integrate(t0);
  Vector y0 = j * j0_coeffs;
  Vector dy0 = p * j0_coeffs;
  const double norm2 = y0.squaredNorm();
  if (norm2 <= 1e-20)
    throw SingularEvaluation("witness: start field vanishes at t0", t0);

  ModelSolution sol =
      sol_opt ? *sol_opt : ModelSolution::from_initial(kappa, t0, dy0.dot(y0) / norm2);
  auto lam0 = sol.riccati(t0);
  if (!lam0) throw Error("witness: comparison function has a pole at t0");
  rep.hypothesis_lhs = dy0.dot(y0);
  rep.hypothesis_rhs = *lam0 * norm2;
  rep.hypothesis_ok = rep.hypothesis_lhs <= rep.hypothesis_rhs + kHypTol;
  if (!rep.hypothesis_ok) return rep;

  Matrix w(nm1, 1);
  w.col(0) = j0_coeffs;
  Matrix v_coeffs = perp_subfamily(fam, t0, w, nm1 - 1);
  TransverseSplit split(fam, v_coeffs);

  Matrix h1 = split.h_basis(t1);
  if (h1.cols() != 1) throw Error("witness: horizontal space is not one-dimensional at t1");

  auto [j1m, p1m] = fam.integrate(t1);
  const double cut = 1e-8 * stacked_scale(j1m, p1m);
  Vector c1 = pinv_solve(j1m, h1.col(0), cut);
  if ((j1m * c1 - h1.col(0)).norm() > 1e-7)
    throw SingularEvaluation("witness: evaluation cannot reach H(t1)", t1);

  auto lam1 = sol.riccati(t1);
  if (!lam1) throw Error("witness: comparison function has a pole at t1");
  Vector y1 = j1m * c1;
  Vector dy1 = p1m * c1;
  rep.witness_coeffs = c1;
  rep.witness_lhs = dy1.dot(y1);
  rep.witness_rhs = *lam1 * y1.squaredNorm();
  rep.inequality_ok = rep.witness_lhs <= rep.witness_rhs + tol;
  rep.equality = std::abs(rep.witness_lhs - rep.witness_rhs) <= tol;
  return rep;
}

SingularityForcingReport singularity_forcing_check(const LagrangianFamily& fam, double alpha,
                                                   double t0, double time_tol) {
  if (!(alpha >= 0.0 && alpha < kPi))
    throw std::invalid_argument("singularity_forcing_check: alpha must lie in [0, pi)");
  if (!(t0 >= 0.0 && t0 < kPi - alpha))
    throw std::invalid_argument("singularity_forcing_check: t0 must lie in [0, pi - alpha)");

  SingularityForcingReport rep;
  rep.deadline = kPi - alpha;

  rep.curvature_ok = true;
  const int probes = 33;
  for (int i = 0; i < probes && rep.curvature_ok; ++i) {
    double t = t0 + (rep.deadline - t0) * i / (probes - 1);
    if (radial_ric_k_min(fam.model(), t, 1) < 1.0 - 1e-9) rep.curvature_ok = false;
  }

  ModelSolution sol = ModelSolution::sphere_phase(alpha);
  auto rayleigh_min = [&](double t) {
    auto [j, p] = fam.integrate(t);
    Matrix g = j.transpose() * j;
    Matrix m = 0.5 * (p.transpose() * j + j.transpose() * p);
    Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> es(m, g, Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
  };

  auto [j0, p0] = fam.integrate(t0);
  Eigen::JacobiSVD<Matrix> svd(j0);
  bool regular = svd.singularValues()(fam.size() - 1) > 1e-8 * stacked_scale(j0, p0);
  if (regular) {
    auto lam = sol.riccati(t0);
    rep.hypothesis_ok = lam && rayleigh_min(t0) <= *lam + kHypTol;
  } else {
    // Kernel at t0: the start inequality is asymptotic; test it on a
    // shrinking sequence approaching t0.
    rep.hypothesis_ok = true;
    double delta = 1e-2;
    for (int i = 0; i < 6 && rep.hypothesis_ok; ++i, delta *= 0.5) {
      double t = t0 + delta;
      auto lam = sol.riccati(t);
      if (!lam || rayleigh_min(t) > *lam + 1e-6) rep.hypothesis_ok = false;
    }
  }

  FocalSearchConfig cfg;
  rep.event = first_focal_time(fam, {t0 + cfg.exclusion, rep.deadline + time_tol}, cfg);
  return rep;
}

AsymptoticRigidityReport asymptotic_rigidity_check(const LagrangianFamily& fam,
                                                   const Matrix& w_coeffs, int k, int kappa,
                                                   double t_max,
                                                   AsymptoticRigidityOptions opts) {
  const int nm1 = fam.size();
  if (w_coeffs.rows() != nm1 || w_coeffs.cols() != k || k < 1 || k > nm1)
    throw std::invalid_argument("asymptotic_rigidity_check: bad W coefficients");
  const double t0 = fam.anchor_time();
  if (!(t_max > t0)) throw std::invalid_argument("asymptotic_rigidity_check: t_max <= t0");

  AsymptoticRigidityReport rep;
  ModelSolution sol = kappa != 0 ? ModelSolution::blowdown_at(kappa, t_max)
                                 : ModelSolution(0, 0.0, 1.0);

  rep.hypothesis_lhs = trace_restricted(fam, t0, w_coeffs);
  if (kappa != 0) {
    auto lam0 = sol.riccati(t0);
    if (!lam0) throw Error("asymptotic_rigidity_check: comparison pole at t0");
    rep.hypothesis_rhs = k * (*lam0);
  } else {
    rep.hypothesis_rhs = 0.0;
  }
  rep.hypothesis_ok = rep.hypothesis_lhs <= rep.hypothesis_rhs + kHypTol;

  Interval sweep{t0, kappa != 0 ? t_max - opts.end_margin : t_max};
  if (!sweep.valid()) throw std::invalid_argument("asymptotic_rigidity_check: empty interval");

  Matrix v_coeffs = perp_subfamily(fam, t0, w_coeffs, nm1 - k);
  TransverseSplit split(fam, v_coeffs);

  auto fir = full_index_check(split, sweep);
  rep.full_index_ok = fir.ok;
  if (!rep.full_index_ok) return rep;

  auto srep = splitting_detector(split, sweep, opts.samples, opts.a_tol);
  rep.max_a_norm = srep.max_a_norm;
  rep.splitting_ok = srep.splitting;

  double t_ref = 0.5 * (sweep.lo + sweep.hi);
  Matrix hc = h_subfamily_coeffs(split, t_ref);
  rep.fit_residual = fit_fields_to_model(fam, hc, sol, sweep, opts.samples);

  // Orthogonality of the two blocks, and the flat-branch operator bounds.
  const double dt = sweep.length() / (opts.samples - 1);
  for (int i = 0; i < opts.samples; ++i) {
    double t = sweep.lo + i * dt;
    if (!split.v_regular(t)) continue;
    Matrix y = fam.value(t) * hc;
    if (split.v_dim() > 0 && y.cols() > 0) {
      Matrix yo = orthonormalize(y);
      rep.max_cross =
          std::max(rep.max_cross, spectral_norm(split.v_basis(t).transpose() * yo));
    }
    if (kappa == 0) {
      Matrix x = split.h_basis(t);
      rep.max_shat = std::max(rep.max_shat, spectral_norm(split.transverse_riccati(t, x)));
      rep.max_rh = std::max(
          rep.max_rh, spectral_norm(x.transpose() * fam.model().curvature(t) * x));
    }
  }

  rep.ok = rep.hypothesis_ok && rep.full_index_ok && rep.splitting_ok &&
           rep.max_a_norm <= opts.a_tol && rep.fit_residual <= opts.fit_tol &&
           rep.max_cross <= opts.cross_tol &&
           (kappa != 0 || (rep.max_shat <= opts.flat_tol && rep.max_rh <= opts.flat_tol));
  return rep;
}

}  // namespace focal
