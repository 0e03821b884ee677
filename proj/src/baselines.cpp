#include "lbsvm/baselines.hpp"

#include <algorithm>
#include <numeric>

#include "lbsvm/errors.hpp"

namespace lbsvm {

const char* to_string(VoteScheme v) {
  switch (v) {
    case VoteScheme::kHard: return "hard";
    case VoteScheme::kSoft: return "soft";
    case VoteScheme::kKnn: return "knn";
  }
  return "?";
}

VoteScheme vote_from_string(const std::string& s) {
  if (s == "hard") return VoteScheme::kHard;
  if (s == "soft") return VoteScheme::kSoft;
  if (s == "knn") return VoteScheme::kKnn;
  throw ConfigError("unknown vote scheme '" + s + "'");
}

TrainResult train_frame_svm_logged(const Dataset& train_set, const Hyperparams& hp,
                                   std::uint64_t seed) {
  train_set.validate();
  if (train_set.num_classes < 2) throw DomainError("train_frame_svm: needs K >= 2 classes");
  std::vector<std::vector<SubseqSpec>> pools;
  pools.reserve(train_set.videos.size());
  for (const auto& v : train_set.videos) {
    std::vector<SubseqSpec> pool;
    pool.reserve(v.sequence.num_frames());
    for (int t = 0; t < v.sequence.num_frames(); ++t) pool.push_back({t, 1});
    pools.push_back(std::move(pool));
  }
  const VariantFlags flags = VariantFlags::scsvm();
  return train_on_set(build_training_set(train_set, pools, flags, hp), flags, hp, seed);
}

FrameModel train_frame_svm(const Dataset& train_set, const Hyperparams& hp, std::uint64_t seed) {
  return {train_frame_svm_logged(train_set, hp, seed).model};
}

Matrix frame_scores(const FrameModel& model, const FrameSequence& video) {
  if (video.dim() != model.params.dim()) throw DomainError("frame_scores: dimension mismatch");
  return video.frames() * model.params.as_matrix();
}

int argmax_label(const Eigen::Ref<const Vector>& scores) {
  int best = 0;
  for (int y = 1; y < scores.size(); ++y) {
    if (scores[y] > scores[best]) best = y;
  }
  return best;
}

double avg_frame_accuracy(const FrameModel& model, const Dataset& test_set) {
  long correct = 0;
  long total = 0;
  for (const auto& v : test_set.videos) {
    const Matrix s = frame_scores(model, v.sequence);
    for (Eigen::Index t = 0; t < s.rows(); ++t) {
      correct += argmax_label(s.row(t).transpose()) == v.label;
      ++total;
    }
  }
  return total ? static_cast<double>(correct) / static_cast<double>(total) : 0.0;
}

namespace {

int hard_vote(const Matrix& scores, const std::vector<Eigen::Index>& rows) {
  std::vector<int> counts(scores.cols(), 0);
  for (Eigen::Index t : rows) ++counts[argmax_label(scores.row(t).transpose())];
  return static_cast<int>(std::max_element(counts.begin(), counts.end()) - counts.begin());
}

}  // namespace

int vote_from_scores(const Matrix& scores, VoteScheme scheme, int knn) {
  if (scores.rows() == 0 || scores.cols() == 0) throw DomainError("vote: no frames");
  std::vector<Eigen::Index> rows(scores.rows());
  std::iota(rows.begin(), rows.end(), Eigen::Index{0});
  switch (scheme) {
    case VoteScheme::kHard:
      return hard_vote(scores, rows);
    case VoteScheme::kSoft: {
      Vector mean = Vector::Zero(scores.cols());
      for (Eigen::Index t = 0; t < scores.rows(); ++t) {
        const Eigen::ArrayXd e = (scores.row(t).array() - scores.row(t).maxCoeff()).exp();
        mean += (e / e.sum()).matrix().transpose();
      }
      return argmax_label(mean);
    }
    case VoteScheme::kKnn: {
      if (knn < 1) throw DomainError("vote: knn must be >= 1");
      const Vector best = scores.rowwise().maxCoeff();
      std::stable_sort(rows.begin(), rows.end(),
                       [&](Eigen::Index a, Eigen::Index b) { return best[a] > best[b]; });
      rows.resize(std::min<std::size_t>(rows.size(), static_cast<std::size_t>(knn)));
      return hard_vote(scores, rows);
    }
  }
  return 0;
}

int vote_video(const FrameModel& model, const FrameSequence& video, VoteScheme scheme, int knn) {
  return vote_from_scores(frame_scores(model, video), scheme, knn);
}

}  // namespace lbsvm
