#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "lbsvm/inference.hpp"
#include "lbsvm/objective.hpp"
#include "lbsvm/types.hpp"

namespace lbsvm {

/// Linear under-estimator a . w + b of the risk.
struct CuttingPlane {
  Vector a;
  double b = 0.0;

  double value_at(const Vector& w) const { return a.dot(w) + b; }
};

struct Iterate {
  Vector w;
  double risk = 0.0;
  double objective = 0.0;
};

/// Master problem of the bundle method: min_w 0.5 |w|^2 + max(0, max_k a_k . w + b_k).
///
/// The implicit zero plane keeps the model non-negative. Dual variables are
/// stored with the zero plane at index 0, followed by the planes in insertion
/// order; the Gram matrix of the slopes is maintained incrementally.
struct BundleState {
  explicit BundleState(int dim = 0);

  int dim = 0;
  std::vector<CuttingPlane> planes;
  Matrix gram;    // (planes + 1) x (planes + 1), row/col 0 is the zero plane
  Vector lambda;  // warm start for the master dual, sums to 1

  std::vector<Iterate> history;
  Vector best_w;
  double best_risk = 0.0;
  double best_objective = 0.0;
  double gap = 0.0;

  /// Number of times a plane offset was lowered to resolve a conflict at best_w.
  int adjustments = 0;

  /// 0.5 |w|^2 + max(0, max_k plane_k(w)).
  double model_value(const Vector& w) const;
  /// max(0, max_k plane_k(w)).
  double model_risk(const Vector& w) const;
};

struct MasterSolution {
  Vector w;
  double lower_bound = 0.0;  // model value at w
  double dual_value = 0.0;
  Vector lambda;
  int iterations = 0;
};

/// Records the iterate (updating best_w) and appends the plane anchored at
/// w_t. A plane that overestimates R(best_w) has its offset lowered to pass
/// through R(best_w); when best_w moves, earlier planes are re-checked the same
/// way. For convex risks this never triggers.
void add_plane(BundleState& state, const Vector& w_t, double risk, const Vector& subgrad);

/// Solves the master dual by pairwise coordinate ascent over the simplex
/// (zero plane included) to a KKT violation below 1e-10. Updates the warm start.
MasterSolution solve_master(BundleState& state);

/// best_objective - lower_bound, clamped to zero within 1e-9.
double compute_gap(const BundleState& state, const MasterSolution& master);

/// Risk oracle: returns R(w) and writes a subgradient.
using RiskOracle = std::function<double(const Vector& w, Vector& subgrad)>;

struct BundleOptions {
  double epsilon = 0.01;
  int max_iter = 300;
};

struct BundleStep {
  int iteration = 0;  // 1-based
  double objective = 0.0;
  double risk = 0.0;
  double lower_bound = 0.0;
  double gap = 0.0;
};

struct BundleResult {
  Vector best_w;
  double best_objective = 0.0;
  double gap = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Generic driver; `observer` sees the state after each master solve.
BundleResult minimize_bundle(const RiskOracle& oracle, const Vector& w0,
                             const BundleOptions& options,
                             const std::function<void(const BundleState&, const BundleStep&)>&
                                 observer = {});

struct IterationLog {
  int iteration = 0;
  double objective = 0.0;
  double risk = 0.0;
  double best_objective = 0.0;
  double lower_bound = 0.0;
  double gap = 0.0;
  int active_r1 = 0;
  int active_r2 = 0;
  int r2_terms = 0;
};

struct TrainResult {
  ModelParams model;
  std::vector<IterationLog> log;
  bool converged = false;
};

/// Alternating latent inference + bundle training. Returns the best iterate.
TrainResult train(const Dataset& train_set, const SamplingScheme& scheme,
                  const VariantFlags& flags, const Hyperparams& hp, std::uint64_t seed);

TrainResult train_on_set(const TrainingSet& set, const VariantFlags& flags,
                         const Hyperparams& hp, std::uint64_t seed);

/// w1, uniform in [-0.01, 0.01] per coordinate.
Vector initial_weights(int size, std::uint64_t seed);

}  // namespace lbsvm
