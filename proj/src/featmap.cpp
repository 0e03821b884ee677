#include "lbsvm/featmap.hpp"

#include <string>

namespace lbsvm {

const char* to_string(PoolingKind kind) { return kind == PoolingKind::kMax ? "max" : "mean"; }

PoolingKind pooling_from_string(const std::string& s) {
  if (s == "max") return PoolingKind::kMax;
  if (s == "mean") return PoolingKind::kMean;
  throw DomainError("unknown pooling kind '" + s + "'");
}

std::vector<int> sample_frames_uniform(const SubseqSpec& spec, int l) {
  if (l < 2) throw DomainError("sample_frames_uniform: l must be >= 2");
  if (spec.start < 0 || spec.length < 1) throw DomainError("sample_frames_uniform: bad interval");
  std::vector<int> idx(l);
  const long span = spec.length - 1;
  for (int j = 0; j < l; ++j) idx[j] = spec.start + static_cast<int>(j * span / (l - 1));
  return idx;
}

std::vector<SelectionMask> enumerate_masks(int l, int k) {
  if (l < 1 || k < 1 || k > l) {
    throw DomainError("enumerate_masks: need 1 <= k <= l, got k = " + std::to_string(k) +
                      ", l = " + std::to_string(l));
  }
  std::vector<SelectionMask> out;
  std::vector<int> cur(k);
  for (int i = 0; i < k; ++i) cur[i] = i;
  while (true) {
    out.push_back({cur});
    int i = k - 1;
    while (i >= 0 && cur[i] == l - k + i) --i;
    if (i < 0) break;
    ++cur[i];
    for (int j = i + 1; j < k; ++j) cur[j] = cur[j - 1] + 1;
  }
  return out;
}

Matrix pool_all(const FrameMatrix& sampled, const std::vector<SelectionMask>& masks,
                PoolingKind kind) {
  Matrix out(static_cast<Eigen::Index>(masks.size()), sampled.cols());
  for (std::size_t m = 0; m < masks.size(); ++m) {
    out.row(static_cast<Eigen::Index>(m)) = pool(sampled, masks[m], kind).transpose();
  }
  return out;
}

}  // namespace lbsvm
