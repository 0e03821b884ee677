#pragma once

#include <string>
#include <vector>

#include "lbsvm/featmap.hpp"
#include "lbsvm/inference.hpp"
#include "lbsvm/seqdata.hpp"
#include "lbsvm/subseq.hpp"

namespace lbsvm {

struct VariantFlags {
  bool monotonicity_on = true;
  bool latent_on = true;

  static constexpr VariantFlags lbsvm() { return {true, true}; }
  static constexpr VariantFlags bsvm() { return {true, false}; }
  static constexpr VariantFlags scsvm() { return {false, false}; }

  friend bool operator==(const VariantFlags&, const VariantFlags&) = default;
};

enum class Variant { kScsvm, kBsvm, kLbsvm, kAvgFrame };

const char* to_string(Variant v);
Variant variant_from_string(const std::string& s);
/// Avg-Frame shares the SCSVM flags; its difference is the frame-level pool.
VariantFlags flags_for(Variant v);

struct Hyperparams {
  double c1 = 0.5e-4;
  double c2 = 0.5e-4;
  double epsilon = 0.01;
  int frames = 10;  // l
  int select = 5;   // k
  int max_iter = 300;
  PoolingKind pooling = PoolingKind::kMax;

  void validate() const;

  /// Candidate-view settings for a variant; without latents every sampled frame is pooled.
  ViewConfig views(const VariantFlags& flags) const {
    return {frames, flags.latent_on ? select : frames, pooling};
  }
};

/// One training video expanded into its subsequence pool, with the pooled
/// feature of every (subsequence, mask) precomputed.
struct TrainingVideo {
  int label = 0;
  std::vector<SubseqSpec> pool;
  std::vector<std::vector<int>> children;
  std::vector<Matrix> pooled;  // per subsequence: num_masks x d
};

struct TrainingSet {
  int num_classes = 0;
  int dim = 0;
  ViewConfig views;
  std::vector<SelectionMask> masks;
  std::vector<TrainingVideo> videos;

  std::size_t num_terms() const;
};

/// Pools from `scheme`; a scheme without scales means SamplingScheme::proportional per video.
TrainingSet build_training_set(const Dataset& train, const SamplingScheme& scheme,
                               const VariantFlags& flags, const Hyperparams& hp);
/// Explicit per-video pools (one vector per video of `train`).
TrainingSet build_training_set(const Dataset& train,
                               const std::vector<std::vector<SubseqSpec>>& pools,
                               const VariantFlags& flags, const Hyperparams& hp);

struct TermRecord {
  int video = 0;
  int subseq = 0;
  double r1 = 0.0;
  bool has_r2 = false;  // false when the subsequence has no contained child
  double r2 = 0.0;
  bool active1 = false;
  bool active2 = false;
  double alpha = 0.0;  // max(0, r1)
  double beta = 0.0;   // max(0, r2)
};

struct RiskTerms {
  double r1_sum = 0.0;
  double r2_sum = 0.0;
  int active1 = 0;
  int active2 = 0;
  int r2_terms = 0;  // terms with a non-empty child set
  int r2_skipped = 0;
  std::vector<TermRecord> terms;

  double weighted(const Hyperparams& hp) const { return hp.c1 * r1_sum + hp.c2 * r2_sum; }
};

struct RiskEvaluation {
  RiskTerms terms;
  Vector subgradient;  // of c1 * r1_sum + c2 * r2_sum
  double weighted_risk = 0.0;
};

/// Runs the three inferences for every (video, subsequence) at `model` and
/// accumulates hinge terms and the subgradient. Videos are processed in
/// parallel and reduced in index order, so the result does not depend on the
/// thread count.
RiskEvaluation evaluate_risk(const ModelParams& model, const TrainingSet& set,
                             const VariantFlags& flags, const Hyperparams& hp,
                             bool keep_records = true);

RiskTerms risk_terms(const ModelParams& model, const TrainingSet& set, const VariantFlags& flags,
                     const Hyperparams& hp);

Vector subgradient(const ModelParams& model, const TrainingSet& set, const VariantFlags& flags,
                   const Hyperparams& hp);

/// 0.5 * |w|^2 + c1 * r1_sum + c2 * r2_sum
double objective_value(const ModelParams& model, const RiskTerms& terms, const Hyperparams& hp);

}  // namespace lbsvm
