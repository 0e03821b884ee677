#include "lbsvm/nrbm.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "lbsvm/errors.hpp"

namespace lbsvm {

namespace {

constexpr double kKktTolerance = 1e-10;
constexpr double kConflictTolerance = 1e-12;
constexpr double kGapClamp = 1e-9;

}  // namespace

BundleState::BundleState(int dim_)
    : dim(dim_), gram(Matrix::Zero(1, 1)), lambda(Vector::Ones(1)), best_w(Vector::Zero(dim_)) {}

double BundleState::model_risk(const Vector& w) const {
  double r = 0.0;
  for (const auto& p : planes) r = std::max(r, p.value_at(w));
  return r;
}

double BundleState::model_value(const Vector& w) const {
  return 0.5 * w.squaredNorm() + model_risk(w);
}

void add_plane(BundleState& state, const Vector& w_t, double risk, const Vector& subgrad) {
  if (w_t.size() != state.dim || subgrad.size() != state.dim) {
    throw DomainError("add_plane: dimension mismatch");
  }
  const double objective = 0.5 * w_t.squaredNorm() + risk;
  state.history.push_back({w_t, risk, objective});
  const bool moved = state.history.size() == 1 || objective < state.best_objective;
  if (moved) {
    state.best_w = w_t;
    state.best_risk = risk;
    state.best_objective = objective;
  }

  state.planes.push_back({subgrad, risk - subgrad.dot(w_t)});
  const Eigen::Index n = static_cast<Eigen::Index>(state.planes.size()) + 1;
  state.gram.conservativeResize(n, n);
  state.gram(n - 1, 0) = state.gram(0, n - 1) = 0.0;
  for (Eigen::Index k = 1; k < n; ++k) {
    const double q = state.planes[k - 1].a.dot(subgrad);
    state.gram(n - 1, k) = state.gram(k, n - 1) = q;
  }
  state.lambda.conservativeResize(n);
  state.lambda[n - 1] = 0.0;

  auto lower_if_conflicting = [&](CuttingPlane& p) {
    if (p.value_at(state.best_w) > state.best_risk + kConflictTolerance) {
      p.b = state.best_risk - p.a.dot(state.best_w);
      ++state.adjustments;
    }
  };
  if (moved) {
    for (auto& p : state.planes) lower_if_conflicting(p);
  } else {
    lower_if_conflicting(state.planes.back());
  }
}

MasterSolution solve_master(BundleState& state) {
  const Eigen::Index n = static_cast<Eigen::Index>(state.planes.size()) + 1;
  MasterSolution out;
  if (n == 1) {
    out.w = Vector::Zero(state.dim);
    out.lambda = Vector::Ones(1);
    state.lambda = out.lambda;
    return out;
  }
  const Matrix& Q = state.gram;
  Vector b(n);
  b[0] = 0.0;
  for (Eigen::Index k = 1; k < n; ++k) b[k] = state.planes[k - 1].b;

  Vector lambda = state.lambda;
  if (lambda.size() != n || (lambda.array() < 0.0).any() || std::abs(lambda.sum() - 1.0) > 1e-9) {
    lambda = Vector::Zero(n);
    lambda[0] = 1.0;
  }
  Vector g = b - Q * lambda;

  const int max_iter = 200000;
  int iter = 0;
  for (; iter < max_iter; ++iter) {
    Eigen::Index up = 0;
    g.maxCoeff(&up);
    Eigen::Index down = -1;
    for (Eigen::Index k = 0; k < n; ++k) {
      if (lambda[k] > 0.0 && (down < 0 || g[k] < g[down])) down = k;
    }
    const double violation = g[up] - g[down];
    if (violation <= kKktTolerance || up == down) break;
    const double eta = Q(up, up) + Q(down, down) - 2.0 * Q(up, down);
    double step = lambda[down];
    if (eta > 1e-18) step = std::min(step, violation / eta);
    lambda[up] += step;
    lambda[down] -= step;
    if (lambda[down] < 1e-300) lambda[down] = 0.0;
    g -= step * (Q.col(up) - Q.col(down));
    if ((iter + 1) % 1000 == 0) g = b - Q * lambda;
  }
  lambda = lambda.cwiseMax(0.0);
  lambda /= lambda.sum();

  out.w = Vector::Zero(state.dim);
  for (Eigen::Index k = 1; k < n; ++k) {
    if (lambda[k] != 0.0) out.w.noalias() -= lambda[k] * state.planes[k - 1].a;
  }
  out.lower_bound = state.model_value(out.w);
  out.dual_value = -0.5 * out.w.squaredNorm() + lambda.dot(b);
  out.lambda = lambda;
  out.iterations = iter;
  state.lambda = lambda;
  return out;
}

double compute_gap(const BundleState& state, const MasterSolution& master) {
  const double gap = state.best_objective - master.lower_bound;
  return std::abs(gap) <= kGapClamp ? std::max(gap, 0.0) : gap;
}

BundleResult minimize_bundle(const RiskOracle& oracle, const Vector& w0,
                             const BundleOptions& options,
                             const std::function<void(const BundleState&, const BundleStep&)>&
                                 observer) {
  BundleState state(static_cast<int>(w0.size()));
  BundleResult result;
  Vector w = w0;
  Vector g(w0.size());
  for (int it = 1; it <= options.max_iter; ++it) {
    g.setZero();
    const double risk = oracle(w, g);
    if (!std::isfinite(risk) || !g.allFinite() || !w.allFinite()) {
      std::ostringstream msg;
      msg << "non-finite objective at iteration " << it << ": R = " << risk << ", w = ["
          << w.transpose() << "]";
      throw NumericalError(msg.str());
    }
    add_plane(state, w, risk, g);
    const MasterSolution master = solve_master(state);
    state.gap = compute_gap(state, master);
    result.iterations = it;
    if (observer) {
      observer(state, {it, 0.5 * w.squaredNorm() + risk, risk, master.lower_bound, state.gap});
    }
    if (state.gap < options.epsilon) {
      result.converged = true;
      break;
    }
    w = master.w;
  }
  result.best_w = state.best_w;
  result.best_objective = state.best_objective;
  result.gap = state.gap;
  return result;
}

Vector initial_weights(int size, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-0.01, 0.01);
  Vector w(size);
  for (int i = 0; i < size; ++i) w[i] = dist(rng);
  return w;
}

TrainResult train_on_set(const TrainingSet& set, const VariantFlags& flags,
                         const Hyperparams& hp, std::uint64_t seed) {
  hp.validate();
  if (set.num_classes < 2) throw DomainError("train: needs K >= 2 classes");
  const int K = set.num_classes;
  const int d = set.dim;

  TrainResult result;
  RiskTerms last;
  RiskOracle oracle = [&](const Vector& w, Vector& subgrad) {
    RiskEvaluation eval = evaluate_risk(ModelParams(K, d, w), set, flags, hp, false);
    subgrad = std::move(eval.subgradient);
    last = std::move(eval.terms);
    return eval.weighted_risk;
  };
  auto observer = [&](const BundleState& state, const BundleStep& step) {
    result.log.push_back({step.iteration, step.objective, step.risk, state.best_objective,
                          step.lower_bound, step.gap, last.active1, last.active2,
                          last.r2_terms});
  };
  const BundleResult br = minimize_bundle(oracle, initial_weights(K * d, seed),
                                          {hp.epsilon, hp.max_iter}, observer);
  result.model = ModelParams(K, d, br.best_w);
  result.converged = br.converged;
  return result;
}

TrainResult train(const Dataset& train_set, const SamplingScheme& scheme,
                  const VariantFlags& flags, const Hyperparams& hp, std::uint64_t seed) {
  train_set.validate();
  if (train_set.num_classes < 2) throw DomainError("train: needs K >= 2 classes");
  return train_on_set(build_training_set(train_set, scheme, flags, hp), flags, hp, seed);
}

}  // namespace lbsvm
