#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "lbsvm/types.hpp"

namespace lbsvm {

/// An ordered list of fixed-dimension frame feature vectors (one video).
/// Frames are the rows of an n x d matrix; n >= 1 and d >= 1.
class FrameSequence {
 public:
  FrameSequence() = default;
  explicit FrameSequence(FrameMatrix frames);

  int num_frames() const { return static_cast<int>(frames_.rows()); }
  int dim() const { return static_cast<int>(frames_.cols()); }
  bool empty() const { return frames_.rows() == 0; }

  const FrameMatrix& frames() const { return frames_; }
  auto frame(int i) const { return frames_.row(i); }

  /// Frames [start, start + length) as a new sequence.
  FrameSequence slice(int start, int length) const;

  friend bool operator==(const FrameSequence& a, const FrameSequence& b) {
    return a.frames_.rows() == b.frames_.rows() && a.frames_.cols() == b.frames_.cols() &&
           a.frames_ == b.frames_;
  }

 private:
  FrameMatrix frames_;
};

enum class Split { kTrain, kTest };

const char* to_string(Split split);
Split split_from_string(const std::string& s);

struct LabeledVideo {
  std::string id;
  FrameSequence sequence;
  int label = 0;
  Split split = Split::kTrain;

  friend bool operator==(const LabeledVideo&, const LabeledVideo&) = default;
};

struct Dataset {
  int num_classes = 0;
  int dim = 0;
  std::vector<LabeledVideo> videos;

  /// Throws DomainError when a label or a video dimension is inconsistent.
  void validate() const;

  /// Copy of the videos carrying the given split tag.
  Dataset subset(Split split) const;

  std::size_t size() const { return videos.size(); }

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

/// Synthetic video generator settings.
///
/// Each class owns a circular trajectory center + radius * (cos t * u + sin t * v)
/// in a random 2-plane of the feature space; a training video sweeps the full
/// circle, a test video a random partial arc. Every frame gets isotropic
/// Gaussian noise, and with probability `bad_frame_rate` is replaced by a draw
/// from one occluder cluster shared by all classes.
struct GeneratorConfig {
  int num_classes = 10;
  int dim = 20;
  int train_per_class = 1;
  int test_per_class = 20;
  int frames_train = 100;
  int frames_test_min = 60;
  int frames_test_max = 100;
  // Feature-space scale is large on purpose: with C1 = C2 = 0.5e-4 the
  // regularizer dominates unless features are O(10).
  double noise_sigma = 2.0;
  /// Lag-one correlation of the frame noise (AR(1)); the per-frame std stays noise_sigma.
  double noise_correlation = 0.8;
  double bad_frame_rate = 0.3;
  std::uint64_t seed = 1;

  double center_scale = 6.0;
  double radius = 40.0;
  double occluder_scale = 45.0;
  double occluder_sigma = 5.0;
  /// Per-video perturbation of the class center (other object instances).
  double instance_jitter = 5.0;
  /// Test arc length as a fraction of the full circle, drawn uniformly.
  double test_arc_min = 0.5;
  double test_arc_max = 1.0;

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

Dataset generate_synthetic(const GeneratorConfig& config);

/// Text format: first line "num_frames d", then one row per frame.
void write_sequence_file(const FrameSequence& seq, const std::filesystem::path& file);
FrameSequence read_sequence_file(const std::filesystem::path& file);

/// Writes `manifest.json` plus one sequence file per video under `dir`.
void save_dataset(const Dataset& ds, const std::filesystem::path& dir);
Dataset load_dataset(const std::filesystem::path& dir);

/// Shortest round-trip decimal form, independent of the global locale.
std::string format_double(double v);

}  // namespace lbsvm
