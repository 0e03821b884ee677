#include "lbsvm/subseq.hpp"

#include <algorithm>
#include <string>

#include "lbsvm/errors.hpp"

namespace lbsvm {

SamplingScheme SamplingScheme::proportional(int num_frames, int start_stride) {
  if (num_frames < 1) throw DomainError("proportional scheme: num_frames must be >= 1");
  SamplingScheme scheme;
  scheme.start_stride = start_stride;
  for (int k = 1; k <= 10; ++k) {
    const int s = std::max(1, (num_frames * k + 5) / 10);
    if (scheme.scales.empty() || scheme.scales.back() != s) scheme.scales.push_back(s);
  }
  return scheme;
}

void SamplingScheme::validate() const {
  if (scales.empty()) throw DomainError("sampling scheme: no scales");
  if (start_stride < 1) throw DomainError("sampling scheme: stride must be >= 1");
  for (std::size_t i = 0; i < scales.size(); ++i) {
    if (scales[i] < 1) throw DomainError("sampling scheme: scales must be >= 1");
    if (i && scales[i] <= scales[i - 1]) {
      throw DomainError("sampling scheme: scales must be strictly ascending");
    }
  }
}

std::vector<SubseqSpec> enumerate_subsequences(int num_frames, const SamplingScheme& scheme) {
  scheme.validate();
  std::vector<SubseqSpec> out;
  for (int s : scheme.scales) {
    for (int start = 0; start + s <= num_frames; start += scheme.start_stride) {
      out.push_back({start, s});
    }
  }
  if (out.empty()) {
    throw DomainError("enumerate_subsequences: " + std::to_string(num_frames) +
                      " frames is shorter than every scale");
  }
  return out;
}

bool strictly_contains(const SubseqSpec& parent, const SubseqSpec& child) {
  return parent.start <= child.start && child.end() <= parent.end() &&
         child.length < parent.length;
}

std::vector<std::pair<int, int>> contained_pairs(const std::vector<SubseqSpec>& pool) {
  std::vector<std::pair<int, int>> pairs;
  const int n = static_cast<int>(pool.size());
  for (int t = 0; t < n; ++t) {
    for (int j = 0; j < n; ++j) {
      if (strictly_contains(pool[t], pool[j])) pairs.emplace_back(t, j);
    }
  }
  return pairs;
}

std::vector<std::vector<int>> contained_children(const std::vector<SubseqSpec>& pool) {
  const int n = static_cast<int>(pool.size());
  std::vector<std::vector<int>> children(n);
  for (int t = 0; t < n; ++t) {
    for (int j = 0; j < n; ++j) {
      if (strictly_contains(pool[t], pool[j])) children[t].push_back(j);
    }
  }
  return children;
}

double adaptive_margin(int parent_len, int child_len) {
  if (child_len <= 0 || child_len >= parent_len) {
    throw DomainError("adaptive_margin: need 0 < child_len < parent_len, got " +
                      std::to_string(child_len) + " and " + std::to_string(parent_len));
  }
  return 1.0 - static_cast<double>(child_len) / static_cast<double>(parent_len);
}

}  // namespace lbsvm
