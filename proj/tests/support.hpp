#pragma once

// Test helpers and brute-force oracles. The oracles deliberately avoid the
// library's enumeration code: masks come from bitmask scans, pooling from
// plain loops.

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <limits>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "lbsvm/featmap.hpp"
#include "lbsvm/inference.hpp"
#include "lbsvm/nrbm.hpp"
#include "lbsvm/objective.hpp"
#include "lbsvm/seqdata.hpp"
#include "lbsvm/subseq.hpp"

namespace testing {

namespace fs = std::filesystem;

class TempDir {
 public:
  explicit TempDir(const std::string& tag = "lbsvm") {
    static std::atomic<int> counter{0};
    path_ = fs::temp_directory_path() /
            (tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

inline std::string slurp(const fs::path& file) {
  std::ifstream is(file, std::ios::binary);
  return {std::istreambuf_iterator<char>(is), {}};
}

inline void spit(const fs::path& file, const std::string& text) {
  std::ofstream os(file, std::ios::binary);
  os << text;
}

inline lbsvm::FrameMatrix random_frames(std::mt19937_64& rng, int n, int d, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  lbsvm::FrameMatrix m(n, d);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = g(rng);
  return m;
}

inline lbsvm::Vector random_vector(std::mt19937_64& rng, int n, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  lbsvm::Vector v(n);
  for (int i = 0; i < n; ++i) v(i) = g(rng);
  return v;
}

inline lbsvm::Dataset random_dataset(std::mt19937_64& rng, int K, int d, int per_class, int n_min,
                                     int n_max, lbsvm::Split split = lbsvm::Split::kTrain) {
  std::uniform_int_distribution<int> len(n_min, n_max);
  lbsvm::Dataset ds;
  ds.num_classes = K;
  ds.dim = d;
  for (int c = 0; c < K; ++c) {
    for (int i = 0; i < per_class; ++i) {
      lbsvm::LabeledVideo v;
      v.id = "v" + std::to_string(c) + "_" + std::to_string(i);
      v.sequence = lbsvm::FrameSequence(random_frames(rng, len(rng), d));
      v.label = c;
      v.split = split;
      ds.videos.push_back(std::move(v));
    }
  }
  return ds;
}

/// Sorted index lists of every k-subset of {0..l-1}, found by scanning bitmasks.
inline std::vector<std::vector<int>> subsets_by_bitmask(int l, int k) {
  std::vector<std::vector<int>> out;
  for (unsigned bits = 0; bits < (1u << l); ++bits) {
    if (std::popcount(bits) != k) continue;
    std::vector<int> s;
    for (int i = 0; i < l; ++i)
      if (bits & (1u << i)) s.push_back(i);
    out.push_back(s);
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline lbsvm::Vector pool_loop(const lbsvm::FrameMatrix& frames, const std::vector<int>& sel,
                               lbsvm::PoolingKind kind) {
  const int d = static_cast<int>(frames.cols());
  lbsvm::Vector out(d);
  for (int j = 0; j < d; ++j) {
    double acc = kind == lbsvm::PoolingKind::kMax ? -std::numeric_limits<double>::infinity() : 0.0;
    for (int i : sel) {
      if (kind == lbsvm::PoolingKind::kMax) {
        acc = std::max(acc, frames(i, j));
      } else {
        acc += frames(i, j);
      }
    }
    out(j) = kind == lbsvm::PoolingKind::kMax ? acc : acc / static_cast<double>(sel.size());
  }
  return out;
}

inline double dot_block(const lbsvm::ModelParams& m, int y, const lbsvm::Vector& x) {
  double s = 0.0;
  for (int j = 0; j < m.dim(); ++j) s += m.weights()(y * m.dim() + j) * x(j);
  return s;
}

inline std::vector<int> sample_indices(int start, int length, int l) {
  std::vector<int> idx;
  for (int j = 0; j < l; ++j)
    idx.push_back(start + static_cast<int>((static_cast<long>(j) * (length - 1)) / (l - 1)));
  return idx;
}

inline lbsvm::FrameMatrix rows_of(const lbsvm::FrameMatrix& frames, const std::vector<int>& idx) {
  lbsvm::FrameMatrix out(static_cast<Eigen::Index>(idx.size()), frames.cols());
  for (std::size_t i = 0; i < idx.size(); ++i) out.row(i) = frames.row(idx[i]);
  return out;
}

struct BruteBest {
  int label = -1;
  std::vector<int> mask;
  double value = -std::numeric_limits<double>::infinity();
};

/// Exhaustive argmax over (label in labels) x (k-subsets). Labels and subsets
/// are scanned in ascending order; the first candidate within `tie` of the
/// maximum wins, so floating-point noise between equal pooled vectors does not
/// decide ties.
inline BruteBest brute_best(const lbsvm::ModelParams& m, const lbsvm::FrameMatrix& sampled,
                            const std::vector<int>& labels, int k, lbsvm::PoolingKind kind,
                            double tie = 1e-9) {
  const auto subsets = subsets_by_bitmask(static_cast<int>(sampled.rows()), k);
  std::vector<BruteBest> all;
  double top = -std::numeric_limits<double>::infinity();
  for (int y : labels) {
    for (const auto& s : subsets) {
      all.push_back({y, s, dot_block(m, y, pool_loop(sampled, s, kind))});
      top = std::max(top, all.back().value);
    }
  }
  for (const auto& c : all)
    if (c.value >= top - tie) return c;
  return {};
}


struct InferenceCheck {
  int instances = 0;
  int comparisons = 0;
  int mismatches = 0;
};

inline bool same_choice(int label_a, const std::vector<int>& mask_a, double value_a, int label_b,
                        const std::vector<int>& mask_b, double value_b) {
  return label_a == label_b && mask_a == mask_b && std::abs(value_a - value_b) <= 1e-9;
}

/// Random small instances (K <= 5, l <= 8); compares score, predict,
/// best_wrong_label, best_contained_subseq and best_mask_true with exhaustive
/// scans over their full domains.
inline InferenceCheck check_inference_against_brute_force(std::uint64_t seed, int instances) {
  std::mt19937_64 rng(seed);
  auto uni = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  InferenceCheck out;
  for (int inst = 0; inst < instances; ++inst) {
    const int K = uni(2, 5), d = uni(1, 4), l = uni(2, 8), k = uni(1, l), n = uni(l, 30);
    const auto kind = uni(0, 1) ? lbsvm::PoolingKind::kMax : lbsvm::PoolingKind::kMean;
    const lbsvm::ViewConfig views{l, k, kind};
    const lbsvm::ModelParams model(K, d, random_vector(rng, K * d));
    const lbsvm::FrameSequence video(random_frames(rng, n, d));
    const int y = uni(0, K - 1);
    std::vector<int> all_labels(K), wrong_labels;
    for (int c = 0; c < K; ++c) all_labels[c] = c;
    for (int c = 0; c < K; ++c)
      if (c != y) wrong_labels.push_back(c);
    auto tally = [&](bool ok) {
      ++out.comparisons;
      if (!ok) ++out.mismatches;
    };

    // A random subsequence and its sampled frames.
    const int len = uni(1, n), start = uni(0, n - len);
    const auto sampled = rows_of(video.frames(), sample_indices(start, len, l));

    const auto s = lbsvm::score(model, sampled, y, views);
    const auto bs = brute_best(model, sampled, {y}, k, kind);
    tally(same_choice(y, s.mask.selected, s.score, bs.label, bs.mask, bs.value));

    const auto t = lbsvm::best_mask_true(model, sampled, y, views);
    tally(same_choice(y, t.mask.selected, t.score, bs.label, bs.mask, bs.value));

    const auto w = lbsvm::best_wrong_label(model, sampled, y, views);
    const auto bw = brute_best(model, sampled, wrong_labels, k, kind);
    tally(same_choice(w.label, w.mask.selected, w.score, bw.label, bw.mask, bw.value));

    const auto p = lbsvm::predict(model, video, views);
    const auto bp = brute_best(model, rows_of(video.frames(), sample_indices(0, n, l)), all_labels,
                               k, kind);
    tally(same_choice(p.label, p.mask.selected, p.score, bp.label, bp.mask, bp.value));

    // Contained-child search over a random pool (children checked by hand).
    std::vector<lbsvm::SubseqSpec> pool;
    const int pool_size = uni(1, 12);
    for (int i = 0; i < pool_size; ++i) {
      const int cl = uni(1, n);
      pool.push_back({uni(0, n - cl), cl});
    }
    const lbsvm::SubseqSpec parent = pool[uni(0, pool_size - 1)];
    struct Cand {
      int child;
      std::vector<int> mask;
      double value;
    };
    std::vector<Cand> cands;
    double top = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < pool_size; ++j) {
      const auto& c = pool[j];
      const bool inside = c.start >= parent.start && c.start + c.length <= parent.start + parent.length &&
                          c.length < parent.length;
      if (!inside) continue;
      const auto cs = rows_of(video.frames(), sample_indices(c.start, c.length, l));
      const double margin = 1.0 - static_cast<double>(c.length) / parent.length;
      for (const auto& sub : subsets_by_bitmask(l, k)) {
        cands.push_back({j, sub, dot_block(model, y, pool_loop(cs, sub, kind)) + margin});
        top = std::max(top, cands.back().value);
      }
    }
    const auto got = lbsvm::best_contained_subseq(model, video, parent, pool, y, views);
    if (cands.empty()) {
      tally(!got.has_value());
    } else {
      const Cand* want = nullptr;
      for (const auto& c : cands)
        if (c.value >= top - 1e-9) {
          want = &c;
          break;
        }
      tally(got.has_value() && same_choice(got->child_index, got->mask.selected, got->value,
                                           want->child, want->mask, want->value));
    }
    ++out.instances;
  }
  return out;
}


/// Small random training problem: K classes, one or two videos each.
struct ToyProblem {
  lbsvm::Dataset data;
  lbsvm::TrainingSet set;
  lbsvm::VariantFlags flags;
  lbsvm::Hyperparams hp;
};

inline ToyProblem toy_problem(std::uint64_t seed, lbsvm::VariantFlags flags, int K = 3, int d = 4,
                              int l = 4, int k = 2) {
  std::mt19937_64 rng(seed);
  ToyProblem p;
  p.flags = flags;
  p.hp.frames = l;
  p.hp.select = k;
  p.data = random_dataset(rng, K, d, 2, 12, 20);
  p.set = lbsvm::build_training_set(p.data, lbsvm::SamplingScheme{{4, 8, 12}, 2}, flags, p.hp);
  return p;
}

struct GradientCheck {
  int points = 0;
  int resampled = 0;
  int failures = 0;
  double worst = 0.0;
};

/// Central differences (step 1e-5) of the C-weighted risk along random unit
/// directions vs. u . subgradient; points with any |R term| < 1e-3 are resampled.
inline GradientCheck check_subgradient(std::uint64_t seed, int points, double tol = 1e-4) {
  std::mt19937_64 rng(seed);
  GradientCheck out;
  const double h = 1e-5;
  while (out.points < points) {
    ToyProblem p = toy_problem(rng(), out.points % 2 ? lbsvm::VariantFlags::lbsvm()
                                                     : lbsvm::VariantFlags::bsvm());
    p.hp.c1 = 1.0;
    p.hp.c2 = 0.5;
    const int n = p.set.num_classes * p.set.dim;
    const lbsvm::ModelParams m(p.set.num_classes, p.set.dim, random_vector(rng, n));
    const auto eval = lbsvm::evaluate_risk(m, p.set, p.flags, p.hp);
    bool near_kink = false;
    for (const auto& t : eval.terms.terms)
      near_kink |= std::abs(t.r1) < 1e-3 || (t.has_r2 && std::abs(t.r2) < 1e-3);
    if (near_kink) {
      ++out.resampled;
      continue;
    }
    lbsvm::Vector u = random_vector(rng, n);
    u.normalize();
    auto risk_at = [&](const lbsvm::Vector& w) {
      return lbsvm::evaluate_risk(lbsvm::ModelParams(p.set.num_classes, p.set.dim, w), p.set,
                                  p.flags, p.hp, false)
          .weighted_risk;
    };
    const double fd = (risk_at(m.weights() + h * u) - risk_at(m.weights() - h * u)) / (2 * h);
    const double an = u.dot(eval.subgradient);
    const double rel = std::abs(fd - an) / std::max({std::abs(fd), std::abs(an), 1e-12});
    out.worst = std::max(out.worst, rel);
    if (rel > tol) ++out.failures;
    ++out.points;
  }
  return out;
}


inline lbsvm::RiskOracle risk_oracle(const ToyProblem& p) {
  return [&p](const lbsvm::Vector& w, lbsvm::Vector& g) {
    auto ev = lbsvm::evaluate_risk(lbsvm::ModelParams(p.set.num_classes, p.set.dim, w), p.set,
                                   p.flags, p.hp, false);
    g = ev.subgradient;
    return ev.weighted_risk;
  };
}

inline double objective_at(const ToyProblem& p, const lbsvm::Vector& w) {
  lbsvm::Vector g;
  return 0.5 * w.squaredNorm() + risk_oracle(p)(w, g);
}

/// Independent reference: projected subgradient descent on J with steps 1/t
/// (J is 1-strongly convex), projected onto the ball |w| <= sqrt(2 J(0)) that
/// must contain the minimizer. Returns the best objective seen.
inline double projected_subgradient_reference(const ToyProblem& p, int steps) {
  const int n = p.set.num_classes * p.set.dim;
  const auto oracle = risk_oracle(p);
  lbsvm::Vector w = lbsvm::Vector::Zero(n), g(n);
  const double radius = std::sqrt(2.0 * objective_at(p, w));
  double best = std::numeric_limits<double>::infinity();
  for (int t = 1; t <= steps; ++t) {
    const double r = oracle(w, g);
    best = std::min(best, 0.5 * w.squaredNorm() + r);
    w -= (w + g) / static_cast<double>(t);
    const double norm = w.norm();
    if (norm > radius) w *= radius / norm;
  }
  return best;
}

}  // namespace testing
