#pragma once

#include <optional>
#include <vector>

#include "lbsvm/featmap.hpp"
#include "lbsvm/seqdata.hpp"
#include "lbsvm/subseq.hpp"
#include "lbsvm/types.hpp"

namespace lbsvm {

/// Linear weights, one contiguous block of `dim` entries per class.
class ModelParams {
 public:
  ModelParams() = default;
  ModelParams(int num_classes, int dim);
  ModelParams(int num_classes, int dim, Vector w);

  int num_classes() const { return num_classes_; }
  int dim() const { return dim_; }

  const Vector& weights() const { return w_; }
  Vector& weights() { return w_; }

  auto block(int label) const { return w_.segment(static_cast<Eigen::Index>(label) * dim_, dim_); }

  /// d x K view; column y is block y.
  Eigen::Map<const Matrix> as_matrix() const { return {w_.data(), dim_, num_classes_}; }

  friend bool operator==(const ModelParams& a, const ModelParams& b) {
    return a.num_classes_ == b.num_classes_ && a.dim_ == b.dim_ && a.w_ == b.w_;
  }

 private:
  int num_classes_ = 0;
  int dim_ = 0;
  Vector w_;
};

/// How a sequence or subsequence is turned into latent candidates:
/// `frames` (l) uniformly sampled frames, of which `select` (k) are pooled.
struct ViewConfig {
  int frames = 10;
  int select = 5;
  PoolingKind pooling = PoolingKind::kMax;

  void validate() const;
};

struct LatentScore {
  double score = 0.0;
  SelectionMask mask;
};

struct ScoredPrediction {
  int label = 0;
  SelectionMask mask;
  double score = 0.0;
};

struct ContainedChoice {
  int child_index = 0;
  SubseqSpec child;
  SelectionMask mask;
  /// Child score plus the adaptive margin.
  double value = 0.0;
};

/// Candidate views of one interval: the l sampled frames pooled under every mask.
struct CandidateViews {
  std::vector<int> frame_indices;
  Matrix pooled;  // num_masks x d
};

CandidateViews candidate_views(const FrameSequence& video, const SubseqSpec& spec,
                               const std::vector<SelectionMask>& masks, const ViewConfig& views);

// Argmax helpers over a (num_masks x K) score table. Ties resolve to the
// smallest label, then the smallest (lexicographic) mask index.
struct TableArgmax {
  int label = 0;
  int mask = 0;
  double value = 0.0;
};

/// Best mask for a fixed label.
TableArgmax best_for_label(const Matrix& table, int label);
/// Best (label, mask) with label != excluded; pass excluded = -1 to allow every label.
TableArgmax best_excluding(const Matrix& table, int excluded);

/// Score table pooled * W, num_masks x K.
Matrix score_table(const ModelParams& model, const Matrix& pooled);

/// max over masks of w . psi(x, y, h), with `sampled` holding the l frames.
LatentScore score(const ModelParams& model, const FrameMatrix& sampled, int label,
                  const ViewConfig& views);

/// Joint (label, mask) argmax over the whole video.
ScoredPrediction predict(const ModelParams& model, const FrameSequence& video,
                         const ViewConfig& views);

/// Loss-augmented inference: best (label, mask) among labels != true_label.
ScoredPrediction best_wrong_label(const ModelParams& model, const FrameMatrix& sampled,
                                  int true_label, const ViewConfig& views);

/// Best strictly contained child of `parent` (by score plus margin) and its mask.
/// Empty when `pool` holds no child of `parent`.
std::optional<ContainedChoice> best_contained_subseq(const ModelParams& model,
                                                     const FrameSequence& video,
                                                     const SubseqSpec& parent,
                                                     const std::vector<SubseqSpec>& pool,
                                                     int true_label, const ViewConfig& views);

/// Latent completion for the true label; same as score().
LatentScore best_mask_true(const ModelParams& model, const FrameMatrix& sampled, int true_label,
                           const ViewConfig& views);

}  // namespace lbsvm
