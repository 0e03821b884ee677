#pragma once

#include <cstdint>
#include <string>

#include "lbsvm/inference.hpp"
#include "lbsvm/nrbm.hpp"
#include "lbsvm/objective.hpp"
#include "lbsvm/seqdata.hpp"

namespace lbsvm {

/// Multiclass linear SVM over single frames.
struct FrameModel {
  ModelParams params;
};

enum class VoteScheme { kHard, kSoft, kKnn };

const char* to_string(VoteScheme v);
VoteScheme vote_from_string(const std::string& s);

inline constexpr int kKnnFrames = 20;

/// Every frame becomes a one-frame subsequence; trained with SCSVM flags.
TrainResult train_frame_svm_logged(const Dataset& train_set, const Hyperparams& hp,
                                   std::uint64_t seed);
FrameModel train_frame_svm(const Dataset& train_set, const Hyperparams& hp, std::uint64_t seed);

/// num_frames x K matrix of per-frame class scores.
Matrix frame_scores(const FrameModel& model, const FrameSequence& video);

/// First index of the row maximum.
int argmax_label(const Eigen::Ref<const Vector>& scores);

/// Fraction of all test frames classified as their video's label.
double avg_frame_accuracy(const FrameModel& model, const Dataset& test_set);

/// Video label from per-frame scores. Ties go to the smallest label.
int vote_from_scores(const Matrix& scores, VoteScheme scheme, int knn = kKnnFrames);

int vote_video(const FrameModel& model, const FrameSequence& video, VoteScheme scheme,
               int knn = kKnnFrames);

}  // namespace lbsvm
