#pragma once

#include <utility>
#include <vector>

namespace lbsvm {

/// Contiguous frame interval [start, start + length) of a video.
struct SubseqSpec {
  int start = 0;
  int length = 1;

  int end() const { return start + length; }

  friend bool operator==(const SubseqSpec&, const SubseqSpec&) = default;
  friend auto operator<=>(const SubseqSpec&, const SubseqSpec&) = default;
};

/// Window lengths and start stride used to cut a video into subsequences.
struct SamplingScheme {
  std::vector<int> scales;
  int start_stride = 2;

  /// Ten scales round(n * k / 10), k = 1..10, deduplicated; for n = 100 this is
  /// {10, 20, ..., 100}.
  static SamplingScheme proportional(int num_frames, int start_stride = 2);

  void validate() const;
};

/// All windows ordered by (scale, start). Throws DomainError when no scale fits.
std::vector<SubseqSpec> enumerate_subsequences(int num_frames, const SamplingScheme& scheme);

/// Strict interval containment: child lies inside parent and is shorter.
bool strictly_contains(const SubseqSpec& parent, const SubseqSpec& child);

/// Every (parent, child) index pair of `pool` with strict containment.
std::vector<std::pair<int, int>> contained_pairs(const std::vector<SubseqSpec>& pool);

/// children[t] lists the pool indices strictly contained in pool[t], ascending.
std::vector<std::vector<int>> contained_children(const std::vector<SubseqSpec>& pool);

/// 1 - child_len / parent_len; requires 0 < child_len < parent_len.
double adaptive_margin(int parent_len, int child_len);

}  // namespace lbsvm
