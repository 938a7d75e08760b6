#include "focal/jacobi.hpp"

#include "focal/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace focal {

namespace {
constexpr double kSeedSymTol = 1e-12;
constexpr double kSeedRankTol = 1e-10;
}  // namespace

// ---------------------------------------------------------------------------
// SubmanifoldData

SubmanifoldData SubmanifoldData::point() { return SubmanifoldData{0, Matrix(0, 0), Matrix()}; }

SubmanifoldData SubmanifoldData::totally_geodesic(int d) {
  return SubmanifoldData{d, Matrix::Zero(d, d), Matrix()};
}

SubmanifoldData SubmanifoldData::block(int d, const Matrix& shape, int start, int normal_dim) {
  if (start < 0 || start + d > normal_dim)
    throw std::invalid_argument("SubmanifoldData::block: tangent block out of range");
  Matrix basis = Matrix::Zero(normal_dim, d);
  for (int j = 0; j < d; ++j) basis(start + j, j) = 1.0;
  return SubmanifoldData{d, shape, basis};
}

// ---------------------------------------------------------------------------
// LagrangianFamily

struct LagrangianFamily::State {
  GeodesicModel model;
  double t0;
  double h;
  Matrix j0, dj0;
  bool lagrangian;
  long lo = 0, hi = 0;          // node index range, node i at t0 + i*h
  std::vector<Matrix> j, dj;    // index i - lo

  State(GeodesicModel m, double t0_, Matrix j0_, Matrix dj0_, double h_)
      : model(std::move(m)), t0(t0_), h(h_), j0(std::move(j0_)), dj0(std::move(dj0_)),
        lagrangian(false) {}

  const Matrix& jat(long i) const { return j[static_cast<size_t>(i - lo)]; }
  const Matrix& djat(long i) const { return dj[static_cast<size_t>(i - lo)]; }
  double tat(long i) const { return t0 + static_cast<double>(i) * h; }
};

namespace {

// One classic fourth-order step of (J, P)' = (P, -R(t) J) from t by dt.
void rk4_step(const GeodesicModel& model, double t, double dt, Matrix& j, Matrix& p) {
  const Matrix r1 = model.curvature(t);
  const Matrix r2 = model.curvature(t + 0.5 * dt);
  const Matrix r4 = model.curvature(t + dt);

  Matrix k1j = p;
  Matrix k1p = -(r1 * j);
  Matrix k2j = p + 0.5 * dt * k1p;
  Matrix k2p = -(r2 * (j + 0.5 * dt * k1j));
  Matrix k3j = p + 0.5 * dt * k2p;
  Matrix k3p = -(r2 * (j + 0.5 * dt * k2j));
  Matrix k4j = p + dt * k3p;
  Matrix k4p = -(r4 * (j + dt * k3j));

  j += dt / 6.0 * (k1j + 2.0 * k2j + 2.0 * k3j + k4j);
  p += dt / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
}

}  // namespace

LagrangianFamily LagrangianFamily::from_seed(GeodesicModel model, double t0, Matrix j0,
                                             Matrix dj0, IntegrationConfig cfg) {
  const int m = model.normal_dim();
  if (j0.rows() != m || j0.cols() != m || dj0.rows() != m || dj0.cols() != m)
    throw std::invalid_argument("LagrangianFamily: seed matrices must be (n-1)x(n-1)");
  if (!(cfg.step > 0.0)) throw std::invalid_argument("LagrangianFamily: step must be positive");
  if (!model.domain().contains(t0))
    throw std::invalid_argument("LagrangianFamily: anchor time outside model domain");

  // The columns must be independent as Jacobi fields.
  Matrix stacked(2 * m, m);
  stacked << j0, dj0;
  Eigen::JacobiSVD<Matrix> svd(stacked);
  if (svd.singularValues()(m - 1) <= kSeedRankTol * svd.singularValues()(0))
    throw std::invalid_argument("LagrangianFamily: seed columns are not independent fields");

  auto st = std::make_shared<State>(std::move(model), t0, std::move(j0), std::move(dj0), cfg.step);

  Matrix omega = st->dj0.transpose() * st->j0 - st->j0.transpose() * st->dj0;
  double scale = std::max(1.0, svd.singularValues()(0) * svd.singularValues()(0));
  st->lagrangian = omega.cwiseAbs().maxCoeff() <= kSeedSymTol * scale;

  const Interval dom = st->model.domain();
  const double h = st->h;
  // Two padding nodes beyond each end keep root bracketing valid at the
  // domain boundary.
  st->hi = static_cast<long>(std::floor((dom.hi - t0) / h)) + 2;
  st->lo = -(static_cast<long>(std::floor((t0 - dom.lo) / h)) + 2);

  const size_t count = static_cast<size_t>(st->hi - st->lo + 1);
  st->j.resize(count);
  st->dj.resize(count);

  Matrix j = st->j0, p = st->dj0;
  st->j[static_cast<size_t>(-st->lo)] = j;
  st->dj[static_cast<size_t>(-st->lo)] = p;
  for (long i = 0; i < st->hi; ++i) {
    rk4_step(st->model, st->tat(i), h, j, p);
    st->j[static_cast<size_t>(i + 1 - st->lo)] = j;
    st->dj[static_cast<size_t>(i + 1 - st->lo)] = p;
  }
  j = st->j0;
  p = st->dj0;
  for (long i = 0; i > st->lo; --i) {
    rk4_step(st->model, st->tat(i), -h, j, p);
    st->j[static_cast<size_t>(i - 1 - st->lo)] = j;
    st->dj[static_cast<size_t>(i - 1 - st->lo)] = p;
  }

  return LagrangianFamily(std::move(st));
}

std::pair<Matrix, Matrix> LagrangianFamily::integrate(double t) const {
  const State& st = *s_;
  if (!st.model.domain().contains(t))
    throw Error("integrate: t=" + std::to_string(t) + " outside model domain");

  double x = (t - st.t0) / st.h;
  long i = static_cast<long>(std::floor(x));
  i = std::clamp(i, st.lo, st.hi - 1);
  const double theta = x - static_cast<double>(i);

  if (std::abs(theta) < 1e-12) return {st.jat(i), st.djat(i)};
  if (std::abs(theta - 1.0) < 1e-12) return {st.jat(i + 1), st.djat(i + 1)};

  // Cubic Hermite in each matrix entry; J uses J' as slope, J' uses
  // J'' = -R J at the nodes.
  const double th2 = theta * theta, th3 = th2 * theta;
  const double h00 = 2 * th3 - 3 * th2 + 1;
  const double h10 = th3 - 2 * th2 + theta;
  const double h01 = -2 * th3 + 3 * th2;
  const double h11 = th3 - th2;
  const double h = st.h;

  const Matrix& j0 = st.jat(i);
  const Matrix& j1 = st.jat(i + 1);
  const Matrix& p0 = st.djat(i);
  const Matrix& p1 = st.djat(i + 1);
  const Matrix q0 = -(st.model.curvature(st.tat(i)) * j0);
  const Matrix q1 = -(st.model.curvature(st.tat(i + 1)) * j1);

  Matrix j = h00 * j0 + (h10 * h) * p0 + h01 * j1 + (h11 * h) * p1;
  Matrix p = h00 * p0 + (h10 * h) * q0 + h01 * p1 + (h11 * h) * q1;
  return {std::move(j), std::move(p)};
}

Matrix LagrangianFamily::symplectic_form(double t) const {
  auto [j, p] = integrate(t);
  return p.transpose() * j - j.transpose() * p;
}

bool LagrangianFamily::is_lagrangian() const { return s_->lagrangian; }
int LagrangianFamily::size() const { return s_->model.normal_dim(); }
double LagrangianFamily::anchor_time() const { return s_->t0; }
double LagrangianFamily::step() const { return s_->h; }
const GeodesicModel& LagrangianFamily::model() const { return s_->model; }
const Matrix& LagrangianFamily::seed_value() const { return s_->j0; }
const Matrix& LagrangianFamily::seed_derivative() const { return s_->dj0; }

long LagrangianFamily::grid_lo() const { return s_->lo; }
long LagrangianFamily::grid_hi() const { return s_->hi; }
double LagrangianFamily::grid_time(long i) const { return s_->tat(i); }
const Matrix& LagrangianFamily::grid_value(long i) const { return s_->jat(i); }
const Matrix& LagrangianFamily::grid_derivative(long i) const { return s_->djat(i); }

LagrangianFamily LagrangianFamily::time_reversed() const {
  const State& st = *s_;
  GeodesicModel fwd = st.model;
  Interval dom{-fwd.domain().hi, -fwd.domain().lo};
  GeodesicModel rev(fwd.ambient_dim(),
                    [fwd](double s) { return fwd.curvature(-s); }, dom,
                    fwd.label() + " (time reversed)", fwd.params());
  IntegrationConfig cfg{st.h};
  return from_seed(std::move(rev), -st.t0, st.j0, -st.dj0, cfg);
}

LagrangianFamily submanifold_lagrangian(const GeodesicModel& model,
                                        const SubmanifoldData& n_data,
                                        IntegrationConfig cfg) {
  const int m = model.normal_dim();
  const int d = n_data.dim;
  if (d < 0 || d > m)
    throw std::invalid_argument("submanifold_lagrangian: need 0 <= dim N <= n-1");
  if (n_data.shape_op.rows() != d || n_data.shape_op.cols() != d)
    throw std::invalid_argument("submanifold_lagrangian: shape operator must be dim x dim");
  if (d > 0 && symmetry_defect(n_data.shape_op) >
                   kSeedSymTol * std::max(1.0, n_data.shape_op.cwiseAbs().maxCoeff()))
    throw std::invalid_argument("submanifold_lagrangian: shape operator is not symmetric");

  Matrix basis;
  if (n_data.tangent_basis.size() == 0) {
    basis = Matrix::Identity(m, m).leftCols(d);
  } else {
    if (n_data.tangent_basis.rows() != m || n_data.tangent_basis.cols() != d)
      throw std::invalid_argument("submanifold_lagrangian: tangent basis must be (n-1) x dim");
    basis = orthonormalize(n_data.tangent_basis);
  }
  Matrix normal = complement_basis(basis, m);

  Matrix j0 = Matrix::Zero(m, m);
  Matrix dj0 = Matrix::Zero(m, m);
  j0.leftCols(d) = basis;
  dj0.leftCols(d) = basis * n_data.shape_op;
  dj0.rightCols(m - d) = normal;
  return LagrangianFamily::from_seed(model, 0.0, std::move(j0), std::move(dj0), cfg);
}

// ---------------------------------------------------------------------------
// Evaluation kernel and focal detection

namespace {

double stacked_scale(const Matrix& j, const Matrix& p) {
  Matrix stacked(j.rows() + p.rows(), j.cols());
  stacked << j, p;
  return spectral_norm(stacked);
}

}  // namespace

EvaluationKernel evaluation_kernel(const LagrangianFamily& fam, double t, double rank_tol) {
  auto [j, p] = fam.integrate(t);
  const double scale = stacked_scale(j, p);
  Eigen::JacobiSVD<Matrix> svd(j, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double cut = rank_tol * scale;
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > cut) ++rank;
  EvaluationKernel out;
  out.rank = rank;
  out.kernel = svd.matrixV().rightCols(fam.size() - rank);
  return out;
}

double evaluation_margin(const LagrangianFamily& fam, double t) {
  auto [j, p] = fam.integrate(t);
  Eigen::JacobiSVD<Matrix> svd(j);
  double scale = stacked_scale(j, p);
  return scale > 0.0 ? svd.singularValues()(j.cols() - 1) / scale : 0.0;
}

namespace {

struct NodeSample {
  double t;
  double det;
  double sigma_min;
  double scale;
};

NodeSample sample_node(const LagrangianFamily& fam, long i) {
  const Matrix& j = fam.grid_value(i);
  const Matrix& p = fam.grid_derivative(i);
  NodeSample s;
  s.t = fam.grid_time(i);
  s.det = Eigen::PartialPivLU<Matrix>(j).determinant();
  Eigen::JacobiSVD<Matrix> svd(j);
  s.sigma_min = svd.singularValues()(svd.singularValues().size() - 1);
  s.scale = stacked_scale(j, p);
  return s;
}

double det_at(const LagrangianFamily& fam, double t) {
  return Eigen::PartialPivLU<Matrix>(fam.value(t)).determinant();
}

double sigma_min_at(const LagrangianFamily& fam, double t) {
  Eigen::JacobiSVD<Matrix> svd(fam.value(t));
  return svd.singularValues()(svd.singularValues().size() - 1);
}

double bisect_det(const LagrangianFamily& fam, double a, double b, double fa, double tol) {
  while (b - a > tol) {
    double mid = 0.5 * (a + b);
    double fm = det_at(fam, mid);
    if (fm == 0.0) return mid;
    if ((fa < 0) != (fm < 0)) {
      b = mid;
    } else {
      a = mid;
      fa = fm;
    }
  }
  return 0.5 * (a + b);
}

double golden_min(const LagrangianFamily& fam, double a, double b, double tol) {
  constexpr double inv_phi = 0.6180339887498949;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = sigma_min_at(fam, x1);
  double f2 = sigma_min_at(fam, x2);
  while (b - a > tol) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = sigma_min_at(fam, x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = sigma_min_at(fam, x2);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

std::vector<FocalEvent> focal_events(const LagrangianFamily& fam, Interval window,
                                     FocalSearchConfig cfg) {
  if (!window.valid()) throw std::invalid_argument("focal_events: inverted window");
  const Interval dom = fam.model().domain();
  if (!dom.contains(window.lo) || !dom.contains(window.hi))
    throw Error("focal_events: window extends outside model domain");

  const double t0 = fam.anchor_time();
  const double h = fam.step();
  // Scan two nodes past the window so roots at the edge still get a bracket.
  long i_lo = std::max(fam.grid_lo(), static_cast<long>(std::floor((window.lo - t0) / h)) - 2);
  long i_hi = std::min(fam.grid_hi(), static_cast<long>(std::ceil((window.hi - t0) / h)) + 2);

  std::vector<NodeSample> s;
  s.reserve(static_cast<size_t>(i_hi - i_lo + 1));
  for (long i = i_lo; i <= i_hi; ++i) s.push_back(sample_node(fam, i));

  // Refinement may only look at brackets that could hold an in-window root and
  // that stay inside the model domain (the grid carries padding nodes past it).
  auto bracket_ok = [&](double lo_t, double hi_t) {
    return hi_t >= window.lo - cfg.endpoint_tol && lo_t <= window.hi + cfg.endpoint_tol &&
           dom.contains(lo_t) && dom.contains(hi_t);
  };

  std::vector<double> candidates;
  for (size_t idx = 0; idx < s.size(); ++idx) {
    // node-exact zero
    if (s[idx].sigma_min <= cfg.sv_ratio * s[idx].scale) {
      candidates.push_back(s[idx].t);
      continue;
    }
    // determinant sign change across the cell
    if (idx + 1 < s.size() && bracket_ok(s[idx].t, s[idx + 1].t) && s[idx].det != 0.0 &&
        s[idx + 1].det != 0.0 && (s[idx].det < 0) != (s[idx + 1].det < 0)) {
      candidates.push_back(bisect_det(fam, s[idx].t, s[idx + 1].t, s[idx].det, cfg.root_tol));
    }
    // interior minimum of sigma_min, catches zeros of even multiplicity
    if (idx > 0 && idx + 1 < s.size() && bracket_ok(s[idx - 1].t, s[idx + 1].t) &&
        s[idx].sigma_min < s[idx - 1].sigma_min && s[idx].sigma_min <= s[idx + 1].sigma_min &&
        s[idx].sigma_min < cfg.min_trigger * s[idx].scale) {
      double t_star = golden_min(fam, s[idx - 1].t, s[idx + 1].t, cfg.root_tol);
      Eigen::JacobiSVD<Matrix> svd(fam.value(t_star));
      auto [jj, pp] = fam.integrate(t_star);
      double sc = stacked_scale(jj, pp);
      if (svd.singularValues()(svd.singularValues().size() - 1) < cfg.sv_ratio * sc)
        candidates.push_back(t_star);
    }
  }

  std::sort(candidates.begin(), candidates.end());
  std::vector<FocalEvent> events;
  for (double t : candidates) {
    if (t < window.lo - cfg.endpoint_tol || t > window.hi + cfg.endpoint_tol) continue;
    if (std::abs(t - t0) < cfg.exclusion) continue;  // anchor kernel
    if (!events.empty() && std::abs(t - events.back().time) < 10 * cfg.root_tol + 1e-7) continue;
    EvaluationKernel ker = evaluation_kernel(fam, t, cfg.rank_tol);
    if (ker.multiplicity() == 0) continue;
    events.push_back(FocalEvent{t, ker.multiplicity(), ker.kernel});
  }
  return events;
}

std::optional<FocalEvent> first_focal_time(const LagrangianFamily& fam, Interval window,
                                           FocalSearchConfig cfg) {
  auto evs = focal_events(fam, window, cfg);
  if (evs.empty()) return std::nullopt;
  return evs.front();
}

int count_focal_points(const LagrangianFamily& fam, Interval interval,
                       bool with_multiplicity, FocalSearchConfig cfg) {
  if (!interval.valid()) throw std::invalid_argument("count_focal_points: inverted interval");
  const Interval dom = fam.model().domain();
  if (!dom.contains(interval.lo) || !dom.contains(interval.hi))
    throw Error("count_focal_points: interval outside model domain");

  const double t0 = fam.anchor_time();
  int total = 0;
  auto tally = [&](const std::vector<FocalEvent>& evs) {
    for (const auto& e : evs) total += with_multiplicity ? e.multiplicity : 1;
  };

  if (interval.hi > t0) {
    Interval fwd{std::max(interval.lo, t0), interval.hi};
    tally(focal_events(fam, fwd, cfg));
  }
  if (interval.lo < t0) {
    // Negative side: run the geodesic backwards and count on the mirrored window.
    LagrangianFamily rev = fam.time_reversed();
    Interval bwd{std::max(-interval.hi, -t0), -interval.lo};
    tally(focal_events(rev, bwd, cfg));
  }
  return total;
}

double focal_radius(const std::function<GeodesicModel(double)>& model_factory,
                    const SubmanifoldData& n_data, std::span<const double> directions,
                    Interval window, FocalSearchConfig cfg, IntegrationConfig icfg) {
  if (directions.empty())
    throw std::invalid_argument("focal_radius: need at least one direction sample");
  double best = std::numeric_limits<double>::infinity();
  for (double dir : directions) {
    LagrangianFamily fam = submanifold_lagrangian(model_factory(dir), n_data, icfg);
    auto ev = first_focal_time(fam, window, cfg);
    if (ev) best = std::min(best, ev->time);
  }
  return best;
}

}  // namespace focal
