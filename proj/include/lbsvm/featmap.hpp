#pragma once

#include <string>
#include <vector>

#include "lbsvm/errors.hpp"
#include "lbsvm/subseq.hpp"
#include "lbsvm/types.hpp"

namespace lbsvm {

/// Latent view selection: sorted distinct indices into the l sampled frames.
struct SelectionMask {
  std::vector<int> selected;

  int size() const { return static_cast<int>(selected.size()); }

  friend bool operator==(const SelectionMask&, const SelectionMask&) = default;
  friend auto operator<=>(const SelectionMask&, const SelectionMask&) = default;
};

enum class PoolingKind { kMax, kMean };

const char* to_string(PoolingKind kind);
PoolingKind pooling_from_string(const std::string& s);

/// l frame indices start + floor(j * (length - 1) / (l - 1)), j = 0..l-1.
std::vector<int> sample_frames_uniform(const SubseqSpec& spec, int l);

/// All C(l, k) masks in lexicographic order.
std::vector<SelectionMask> enumerate_masks(int l, int k);

/// Elementwise max or mean of the selected rows of `frames`.
template <typename Derived>
VectorX<typename Derived::Scalar> pool(const Eigen::MatrixBase<Derived>& frames,
                                       const SelectionMask& mask, PoolingKind kind) {
  using Scalar = typename Derived::Scalar;
  if (mask.selected.empty()) throw DomainError("pool: empty selection");
  for (int i : mask.selected) {
    if (i < 0 || i >= frames.rows()) throw DomainError("pool: mask index out of range");
  }
  VectorX<Scalar> out = frames.row(mask.selected.front()).transpose();
  for (std::size_t s = 1; s < mask.selected.size(); ++s) {
    const auto row = frames.row(mask.selected[s]).transpose();
    if (kind == PoolingKind::kMax) {
      out = out.cwiseMax(row);
    } else {
      out += row;
    }
  }
  if (kind == PoolingKind::kMean) out /= static_cast<Scalar>(mask.selected.size());
  return out;
}

/// Class-blocked embedding: zeros except block `label`, which holds `pooled`.
template <typename Derived>
VectorX<typename Derived::Scalar> joint_feature(const Eigen::MatrixBase<Derived>& pooled,
                                                int label, int num_classes) {
  if (label < 0 || label >= num_classes) throw DomainError("joint_feature: label out of range");
  const Eigen::Index d = pooled.size();
  VectorX<typename Derived::Scalar> psi = VectorX<typename Derived::Scalar>::Zero(num_classes * d);
  psi.segment(label * d, d) = pooled;
  return psi;
}

/// Rows `indices` of `frames`, in order (repeats allowed).
template <typename Derived>
FrameMatrixX<typename Derived::Scalar> gather_rows(const Eigen::MatrixBase<Derived>& frames,
                                                   const std::vector<int>& indices) {
  FrameMatrixX<typename Derived::Scalar> out(static_cast<Eigen::Index>(indices.size()),
                                             frames.cols());
  for (std::size_t j = 0; j < indices.size(); ++j) out.row(j) = frames.row(indices[j]);
  return out;
}

/// Pooled feature of every mask, one mask per row (num_masks x d).
Matrix pool_all(const FrameMatrix& sampled, const std::vector<SelectionMask>& masks,
                PoolingKind kind);

}  // namespace lbsvm
