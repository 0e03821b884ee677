#include "lbsvm/inference.hpp"

#include <limits>
#include <string>

#include "lbsvm/errors.hpp"

namespace lbsvm {

ModelParams::ModelParams(int num_classes, int dim)
    : ModelParams(num_classes, dim, Vector::Zero(static_cast<Eigen::Index>(num_classes) * dim)) {}

ModelParams::ModelParams(int num_classes, int dim, Vector w)
    : num_classes_(num_classes), dim_(dim), w_(std::move(w)) {
  if (num_classes < 1 || dim < 1) throw DomainError("ModelParams: K and d must be positive");
  if (w_.size() != static_cast<Eigen::Index>(num_classes) * dim) {
    throw DomainError("ModelParams: weight length " + std::to_string(w_.size()) +
                      " != K * d = " + std::to_string(num_classes * dim));
  }
}

void ViewConfig::validate() const {
  if (frames < 2) throw DomainError("view config: l must be >= 2");
  if (select < 1 || select > frames) throw DomainError("view config: need 1 <= k <= l");
}

namespace {

void check_dims(const ModelParams& model, Eigen::Index cols) {
  if (cols != model.dim()) {
    throw DomainError("dimension mismatch: features have " + std::to_string(cols) +
                      " columns, model expects " + std::to_string(model.dim()));
  }
}

void check_label(const ModelParams& model, int label) {
  if (label < 0 || label >= model.num_classes()) {
    throw DomainError("label " + std::to_string(label) + " outside [0, " +
                      std::to_string(model.num_classes()) + ")");
  }
}

std::vector<SelectionMask> masks_for(const FrameMatrix& sampled, const ViewConfig& views) {
  views.validate();
  if (sampled.rows() != views.frames) {
    throw DomainError("expected " + std::to_string(views.frames) + " sampled frames, got " +
                      std::to_string(sampled.rows()));
  }
  return enumerate_masks(views.frames, views.select);
}

}  // namespace

CandidateViews candidate_views(const FrameSequence& video, const SubseqSpec& spec,
                               const std::vector<SelectionMask>& masks, const ViewConfig& views) {
  if (spec.start < 0 || spec.length < 1 || spec.end() > video.num_frames()) {
    throw DomainError("candidate_views: subsequence outside the video");
  }
  CandidateViews out;
  out.frame_indices = sample_frames_uniform(spec, views.frames);
  const FrameMatrix sampled = gather_rows(video.frames(), out.frame_indices);
  out.pooled = pool_all(sampled, masks, views.pooling);
  return out;
}

TableArgmax best_for_label(const Matrix& table, int label) {
  TableArgmax best{label, 0, table(0, label)};
  for (Eigen::Index m = 1; m < table.rows(); ++m) {
    if (table(m, label) > best.value) {
      best.mask = static_cast<int>(m);
      best.value = table(m, label);
    }
  }
  return best;
}

TableArgmax best_excluding(const Matrix& table, int excluded) {
  TableArgmax best{-1, 0, -std::numeric_limits<double>::infinity()};
  for (int y = 0; y < table.cols(); ++y) {
    if (y == excluded) continue;
    const TableArgmax cand = best_for_label(table, y);
    if (best.label < 0 || cand.value > best.value) best = cand;
  }
  if (best.label < 0) throw DomainError("best_excluding: no admissible label");
  return best;
}

Matrix score_table(const ModelParams& model, const Matrix& pooled) {
  check_dims(model, pooled.cols());
  return pooled * model.as_matrix();
}

LatentScore score(const ModelParams& model, const FrameMatrix& sampled, int label,
                  const ViewConfig& views) {
  check_dims(model, sampled.cols());
  check_label(model, label);
  const auto masks = masks_for(sampled, views);
  const Matrix table = score_table(model, pool_all(sampled, masks, views.pooling));
  const TableArgmax best = best_for_label(table, label);
  return {best.value, masks[best.mask]};
}

ScoredPrediction predict(const ModelParams& model, const FrameSequence& video,
                         const ViewConfig& views) {
  if (video.empty()) throw DomainError("predict: empty video");
  check_dims(model, video.dim());
  views.validate();
  const auto masks = enumerate_masks(views.frames, views.select);
  const CandidateViews cand = candidate_views(video, {0, video.num_frames()}, masks, views);
  const TableArgmax best = best_excluding(score_table(model, cand.pooled), -1);
  return {best.label, masks[best.mask], best.value};
}

ScoredPrediction best_wrong_label(const ModelParams& model, const FrameMatrix& sampled,
                                  int true_label, const ViewConfig& views) {
  if (model.num_classes() < 2) throw DomainError("best_wrong_label: needs K >= 2");
  check_dims(model, sampled.cols());
  check_label(model, true_label);
  const auto masks = masks_for(sampled, views);
  const Matrix table = score_table(model, pool_all(sampled, masks, views.pooling));
  const TableArgmax best = best_excluding(table, true_label);
  return {best.label, masks[best.mask], best.value};
}

std::optional<ContainedChoice> best_contained_subseq(const ModelParams& model,
                                                     const FrameSequence& video,
                                                     const SubseqSpec& parent,
                                                     const std::vector<SubseqSpec>& pool,
                                                     int true_label, const ViewConfig& views) {
  check_dims(model, video.dim());
  check_label(model, true_label);
  views.validate();
  const auto masks = enumerate_masks(views.frames, views.select);
  std::optional<ContainedChoice> best;
  for (std::size_t j = 0; j < pool.size(); ++j) {
    if (!strictly_contains(parent, pool[j])) continue;
    const CandidateViews cand = candidate_views(video, pool[j], masks, views);
    const TableArgmax s = best_for_label(score_table(model, cand.pooled), true_label);
    const double value = s.value + adaptive_margin(parent.length, pool[j].length);
    if (!best || value > best->value) {
      best = ContainedChoice{static_cast<int>(j), pool[j], masks[s.mask], value};
    }
  }
  return best;
}

LatentScore best_mask_true(const ModelParams& model, const FrameMatrix& sampled, int true_label,
                           const ViewConfig& views) {
  return score(model, sampled, true_label, views);
}

}  // namespace lbsvm
