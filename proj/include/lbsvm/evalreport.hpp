#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "lbsvm/baselines.hpp"
#include "lbsvm/inference.hpp"
#include "lbsvm/seqdata.hpp"
#include "lbsvm/subseq.hpp"

namespace lbsvm {

/// Rows are true labels, columns predicted labels.
struct ConfusionMatrix {
  Eigen::MatrixXi counts;

  explicit ConfusionMatrix(int num_classes = 0)
      : counts(Eigen::MatrixXi::Zero(num_classes, num_classes)) {}

  void add(int truth, int predicted) { ++counts(truth, predicted); }
  int total() const { return counts.sum(); }
  double accuracy() const;
  /// Row-normalized rates; empty rows stay zero.
  Matrix rates() const;
};

struct Evaluation {
  double accuracy = 0.0;
  ConfusionMatrix confusion;
  std::vector<int> predicted;
};

/// Maps a (possibly truncated) video to a label.
using VideoClassifier = std::function<int(const FrameSequence&)>;

Evaluation evaluate_with(const VideoClassifier& classify, const Dataset& test_set);

/// Latent joint prediction on each full test video.
Evaluation evaluate(const ModelParams& model, const Dataset& test_set, const ViewConfig& views);

/// Accum-Frame: video label by voting over frame predictions.
Evaluation evaluate_votes(const FrameModel& model, const Dataset& test_set, VoteScheme scheme);

struct PrefixCurve {
  std::vector<double> fractions;
  std::vector<double> accuracy;

  /// Adjacent pairs where accuracy drops.
  int decreases() const;
};

std::vector<double> default_prefix_fractions();

/// Accuracy when classifying only the first ceil(f * n) frames of each video.
PrefixCurve prefix_curve(const VideoClassifier& classify, const Dataset& test_set,
                         const std::vector<double>& fractions);
PrefixCurve prefix_curve(const ModelParams& model, const Dataset& test_set,
                         const std::vector<double>& fractions, const ViewConfig& views);

struct MonotonicityReport {
  long pairs = 0;
  long violations = 0;
  double rate = 0.0;
};

/// Over every contained pair of each test video's pool, counts
/// f(child, y) > f(parent, y) + tol at the video's predicted label y (or at
/// every label when `all_labels`). Empty scheme scales mean proportional.
MonotonicityReport monotonicity_report(const ModelParams& model, const Dataset& test_set,
                                       const SamplingScheme& scheme, const ViewConfig& views,
                                       double tol = 1e-6, bool all_labels = false);

std::string format_confusion(const ConfusionMatrix& cm);
void write_curve_csv(const PrefixCurve& curve, const std::filesystem::path& file);

}  // namespace lbsvm
