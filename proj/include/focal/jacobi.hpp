#pragma once

#include "focal/models.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace focal {

// Initial data of a submanifold N at the foot point of the geodesic: its
// dimension and the shape operator determined by the geodesic's velocity,
// expressed in the parallel frame.  By default the first `dim` frame vectors
// are tangent to N; `tangent_basis` ((n-1) x dim, orthonormal columns)
// overrides that when N's tangent space sits elsewhere in the frame, e.g. a
// factor block of a product model.
struct SubmanifoldData {
  int dim = 0;
  Matrix shape_op;       // dim x dim, symmetric
  Matrix tangent_basis;  // (n-1) x dim or empty

  static SubmanifoldData point();
  static SubmanifoldData totally_geodesic(int d);
  // Tangent block [start, start+d) of the frame, with the given shape operator.
  static SubmanifoldData block(int d, const Matrix& shape, int start, int normal_dim);
};

struct IntegrationConfig {
  double step = 1e-3;
};

// A basis of an (n-1)-dimensional family of normal Jacobi fields, carried as
// the pair (J(t), J'(t)) of (n-1)x(n-1) matrices whose columns are the basis
// fields.  The trajectory is integrated once over the model domain with a
// fixed-step classic fourth-order scheme and is immutable afterwards; copies
// share it.  Values between grid nodes come from cubic Hermite interpolation.
class LagrangianFamily {
 public:
  static LagrangianFamily from_seed(GeodesicModel model, double t0, Matrix j0,
                                    Matrix dj0, IntegrationConfig cfg = {});

  // (J(t), J'(t)); throws if t is outside the model domain.
  std::pair<Matrix, Matrix> integrate(double t) const;
  Matrix value(double t) const { return integrate(t).first; }
  Matrix derivative(double t) const { return integrate(t).second; }

  // J'(t)^T J(t) - J(t)^T J'(t); constant in t, zero iff the family is
  // Lagrangian.
  Matrix symplectic_form(double t) const;
  bool is_lagrangian() const;

  int size() const;  // n-1
  double anchor_time() const;
  double step() const;
  const GeodesicModel& model() const;
  const Matrix& seed_value() const;
  const Matrix& seed_derivative() const;

  // The same geodesic run backwards: curvature s -> R(-s), anchor -t0,
  // seeds (J0, -J0').
  LagrangianFamily time_reversed() const;

  // Grid access for scanners: nodes i in [grid_lo, grid_hi] at t0 + i*step.
  long grid_lo() const;
  long grid_hi() const;
  double grid_time(long i) const;
  const Matrix& grid_value(long i) const;
  const Matrix& grid_derivative(long i) const;

 private:
  struct State;
  explicit LagrangianFamily(std::shared_ptr<const State> s) : s_(std::move(s)) {}
  std::shared_ptr<const State> s_;
};

// The family of N-Jacobi fields: columns 1..d seeded with J(0) running over
// the tangent space of N and J'(0) = S_v J(0); columns d+1..n-1 with J(0) = 0
// and J'(0) running over the normal complement.
LagrangianFamily submanifold_lagrangian(const GeodesicModel& model,
                                        const SubmanifoldData& n_data,
                                        IntegrationConfig cfg = {});

struct EvaluationKernel {
  int rank = 0;
  Matrix kernel;  // (n-1) x multiplicity, coefficient vectors of vanishing fields
  int multiplicity() const { return static_cast<int>(kernel.cols()); }
};

// Rank and kernel of the evaluation map at t via SVD of J(t).  Singular values
// are compared against rank_tol times the top singular value of the stacked
// matrix [J(t); J'(t)], whose scale never collapses (the flow is invertible).
EvaluationKernel evaluation_kernel(const LagrangianFamily& fam, double t,
                                   double rank_tol = 1e-8);

// sigma_min(J(t)) relative to the stacked scale: 0 at a focal time, O(1) well
// away from one.
double evaluation_margin(const LagrangianFamily& fam, double t);

struct FocalEvent {
  double time = 0.0;
  int multiplicity = 0;
  Matrix kernel;  // coefficient vectors of the vanishing fields
};

struct FocalSearchConfig {
  double exclusion = 1e-3;    // half-width of the skip zone around the anchor kernel
  double root_tol = 1e-9;     // time resolution of root refinement
  double sv_ratio = 1e-7;     // sigma_min below this (relative) declares a zero
  double min_trigger = 1e-2;  // relative sigma_min level that triggers refinement
  double endpoint_tol = 1e-7; // window endpoints are inclusive up to this
  double rank_tol = 1e-8;
};

// All zeros of fields of the family in the window, with multiplicities.
// Detection walks the integration grid watching both sign changes of det J and
// local minima of the smallest singular value (even-multiplicity zeros do not
// flip the determinant's sign), then refines by bisection / golden section.
std::vector<FocalEvent> focal_events(const LagrangianFamily& fam, Interval window,
                                     FocalSearchConfig cfg = {});

std::optional<FocalEvent> first_focal_time(const LagrangianFamily& fam, Interval window,
                                           FocalSearchConfig cfg = {});

// Focal points in the interval, the negative side counted along the reversed
// geodesic; the kernel at the anchor itself is excluded.
int count_focal_points(const LagrangianFamily& fam, Interval interval,
                       bool with_multiplicity = true, FocalSearchConfig cfg = {});

// Infimum of first focal times over the sampled normal directions; directions
// without a focal time in the window count as +infinity.
double focal_radius(const std::function<GeodesicModel(double)>& model_factory,
                    const SubmanifoldData& n_data, std::span<const double> directions,
                    Interval window, FocalSearchConfig cfg = {},
                    IntegrationConfig icfg = {});

}  // namespace focal
