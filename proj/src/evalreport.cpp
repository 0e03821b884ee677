#include "lbsvm/evalreport.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "lbsvm/errors.hpp"
#include "lbsvm/parallel.hpp"

namespace lbsvm {

double ConfusionMatrix::accuracy() const {
  const int n = total();
  return n ? static_cast<double>(counts.trace()) / n : 0.0;
}

Matrix ConfusionMatrix::rates() const {
  Matrix r = Matrix::Zero(counts.rows(), counts.cols());
  for (Eigen::Index i = 0; i < counts.rows(); ++i) {
    const int row = counts.row(i).sum();
    if (row > 0) r.row(i) = counts.row(i).cast<double>() / row;
  }
  return r;
}

Evaluation evaluate_with(const VideoClassifier& classify, const Dataset& test_set) {
  Evaluation out;
  out.confusion = ConfusionMatrix(test_set.num_classes);
  out.predicted.resize(test_set.videos.size());
  parallel_for(test_set.videos.size(),
               [&](std::size_t i) { out.predicted[i] = classify(test_set.videos[i].sequence); });
  for (std::size_t i = 0; i < test_set.videos.size(); ++i) {
    const int p = out.predicted[i];
    if (p < 0 || p >= test_set.num_classes) throw DomainError("evaluate: predicted label out of range");
    out.confusion.add(test_set.videos[i].label, p);
  }
  out.accuracy = out.confusion.accuracy();
  return out;
}

Evaluation evaluate(const ModelParams& model, const Dataset& test_set, const ViewConfig& views) {
  if (model.dim() != test_set.dim || model.num_classes() != test_set.num_classes) {
    throw DomainError("evaluate: model and dataset dimensions differ");
  }
  return evaluate_with(
      [&](const FrameSequence& v) { return predict(model, v, views).label; }, test_set);
}

Evaluation evaluate_votes(const FrameModel& model, const Dataset& test_set, VoteScheme scheme) {
  if (model.params.dim() != test_set.dim || model.params.num_classes() != test_set.num_classes) {
    throw DomainError("evaluate: model and dataset dimensions differ");
  }
  return evaluate_with(
      [&](const FrameSequence& v) { return vote_video(model, v, scheme); }, test_set);
}

int PrefixCurve::decreases() const {
  int n = 0;
  for (std::size_t i = 1; i < accuracy.size(); ++i) n += accuracy[i] < accuracy[i - 1];
  return n;
}

std::vector<double> default_prefix_fractions() {
  std::vector<double> f;
  for (int k = 1; k <= 10; ++k) f.push_back(k / 10.0);
  return f;
}

PrefixCurve prefix_curve(const VideoClassifier& classify, const Dataset& test_set,
                         const std::vector<double>& fractions) {
  for (std::size_t i = 0; i < fractions.size(); ++i) {
    if (!(fractions[i] > 0.0 && fractions[i] <= 1.0) || (i && fractions[i] <= fractions[i - 1])) {
      throw DomainError("prefix_curve: fractions must be ascending in (0, 1]");
    }
  }
  PrefixCurve curve;
  curve.fractions = fractions;
  for (double f : fractions) {
    const auto prefix = [&](const FrameSequence& v) {
      const int n = v.num_frames();
      // Guard against 0.3 * 100 = 30.000000000000004.
      const int len = std::clamp(static_cast<int>(std::ceil(f * n - 1e-9)), 1, n);
      return classify(len == n ? v : v.slice(0, len));
    };
    curve.accuracy.push_back(evaluate_with(prefix, test_set).accuracy);
  }
  return curve;
}

PrefixCurve prefix_curve(const ModelParams& model, const Dataset& test_set,
                         const std::vector<double>& fractions, const ViewConfig& views) {
  return prefix_curve([&](const FrameSequence& v) { return predict(model, v, views).label; },
                      test_set, fractions);
}

MonotonicityReport monotonicity_report(const ModelParams& model, const Dataset& test_set,
                                       const SamplingScheme& scheme, const ViewConfig& views,
                                       double tol, bool all_labels) {
  views.validate();
  const auto masks = enumerate_masks(views.frames, views.select);
  std::vector<std::pair<long, long>> per_video(test_set.videos.size(), {0, 0});
  parallel_for(test_set.videos.size(), [&](std::size_t i) {
    const FrameSequence& video = test_set.videos[i].sequence;
    const int n = video.num_frames();
    const SamplingScheme s =
        scheme.scales.empty() ? SamplingScheme::proportional(n, scheme.start_stride) : scheme;
    if (n < s.scales.front()) return;
    const auto pool = enumerate_subsequences(n, s);
    const auto children = contained_children(pool);

    std::vector<int> labels;
    if (all_labels) {
      for (int y = 0; y < model.num_classes(); ++y) labels.push_back(y);
    } else {
      labels.push_back(predict(model, video, views).label);
    }
    Matrix f(pool.size(), labels.size());
    for (std::size_t t = 0; t < pool.size(); ++t) {
      const Matrix table = score_table(model, candidate_views(video, pool[t], masks, views).pooled);
      for (std::size_t c = 0; c < labels.size(); ++c) {
        f(t, c) = best_for_label(table, labels[c]).value;
      }
    }
    long pairs = 0;
    long violations = 0;
    for (std::size_t t = 0; t < pool.size(); ++t) {
      for (int j : children[t]) {
        for (std::size_t c = 0; c < labels.size(); ++c) {
          ++pairs;
          violations += f(j, c) > f(t, c) + tol;
        }
      }
    }
    per_video[i] = {pairs, violations};
  });
  MonotonicityReport out;
  for (const auto& [p, v] : per_video) {
    out.pairs += p;
    out.violations += v;
  }
  out.rate = out.pairs ? static_cast<double>(out.violations) / out.pairs : 0.0;
  return out;
}

std::string format_confusion(const ConfusionMatrix& cm) {
  std::ostringstream os;
  const Matrix rates = cm.rates();
  os << "true\\pred";
  for (Eigen::Index j = 0; j < cm.counts.cols(); ++j) os << ' ' << std::setw(6) << j;
  os << '\n';
  for (Eigen::Index i = 0; i < cm.counts.rows(); ++i) {
    os << std::setw(9) << i;
    for (Eigen::Index j = 0; j < cm.counts.cols(); ++j) {
      os << ' ' << std::setw(6) << std::fixed << std::setprecision(3) << rates(i, j);
    }
    os << "   (n=" << cm.counts.row(i).sum() << ")\n";
  }
  return os.str();
}

void write_curve_csv(const PrefixCurve& curve, const std::filesystem::path& file) {
  std::ofstream os(file, std::ios::binary);
  if (!os) throw ParseError("cannot open '" + file.string() + "' for writing");
  os << "fraction,accuracy\n";
  for (std::size_t i = 0; i < curve.fractions.size(); ++i) {
    os << format_double(curve.fractions[i]) << ',' << format_double(curve.accuracy[i]) << '\n';
  }
}

}  // namespace lbsvm
