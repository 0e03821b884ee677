#include "lbsvm/objective.hpp"

#include <cmath>

#include "lbsvm/errors.hpp"
#include "lbsvm/parallel.hpp"

namespace lbsvm {

const char* to_string(Variant v) {
  switch (v) {
    case Variant::kScsvm: return "scsvm";
    case Variant::kBsvm: return "bsvm";
    case Variant::kLbsvm: return "lbsvm";
    case Variant::kAvgFrame: return "avg-frame";
  }
  return "?";
}

Variant variant_from_string(const std::string& s) {
  if (s == "scsvm") return Variant::kScsvm;
  if (s == "bsvm") return Variant::kBsvm;
  if (s == "lbsvm") return Variant::kLbsvm;
  if (s == "avg-frame") return Variant::kAvgFrame;
  throw ConfigError("unknown variant '" + s + "'");
}

VariantFlags flags_for(Variant v) {
  switch (v) {
    case Variant::kLbsvm: return VariantFlags::lbsvm();
    case Variant::kBsvm: return VariantFlags::bsvm();
    default: return VariantFlags::scsvm();
  }
}

void Hyperparams::validate() const {
  if (!(c1 >= 0.0) || !(c2 >= 0.0)) throw ConfigError("hyperparams: C1 and C2 must be >= 0");
  if (!(epsilon > 0.0)) throw ConfigError("hyperparams: epsilon must be > 0");
  if (frames < 2) throw ConfigError("hyperparams: l (--frames) must be >= 2");
  if (select < 1 || select > frames) throw ConfigError("hyperparams: need 1 <= k <= l");
  if (max_iter < 1) throw ConfigError("hyperparams: max_iter must be >= 1");
}

std::size_t TrainingSet::num_terms() const {
  std::size_t n = 0;
  for (const auto& v : videos) n += v.pool.size();
  return n;
}

TrainingSet build_training_set(const Dataset& train, const SamplingScheme& scheme,
                               const VariantFlags& flags, const Hyperparams& hp) {
  std::vector<std::vector<SubseqSpec>> pools;
  pools.reserve(train.videos.size());
  for (const auto& v : train.videos) {
    const int n = v.sequence.num_frames();
    const SamplingScheme s =
        scheme.scales.empty() ? SamplingScheme::proportional(n, scheme.start_stride) : scheme;
    pools.push_back(enumerate_subsequences(n, s));
  }
  return build_training_set(train, pools, flags, hp);
}

TrainingSet build_training_set(const Dataset& train,
                               const std::vector<std::vector<SubseqSpec>>& pools,
                               const VariantFlags& flags, const Hyperparams& hp) {
  hp.validate();
  train.validate();
  if (pools.size() != train.videos.size()) {
    throw DomainError("build_training_set: one pool per training video required");
  }
  TrainingSet set;
  set.num_classes = train.num_classes;
  set.dim = train.dim;
  set.views = hp.views(flags);
  set.masks = enumerate_masks(set.views.frames, set.views.select);
  set.videos.resize(train.videos.size());
  parallel_for(train.videos.size(), [&](std::size_t i) {
    const auto& src = train.videos[i];
    TrainingVideo& dst = set.videos[i];
    dst.label = src.label;
    dst.pool = pools[i];
    if (flags.monotonicity_on) dst.children = contained_children(dst.pool);
    dst.pooled.reserve(dst.pool.size());
    for (const auto& spec : dst.pool) {
      dst.pooled.push_back(candidate_views(src.sequence, spec, set.masks, set.views).pooled);
    }
  });
  return set;
}

namespace {

struct VideoRisk {
  RiskTerms terms;
  Matrix grad;  // d x K
};

VideoRisk video_risk(const Eigen::Map<const Matrix>& W, const TrainingVideo& video, int index,
                     const VariantFlags& flags, const Hyperparams& hp, bool keep_records) {
  const int n = static_cast<int>(video.pool.size());
  const int y = video.label;
  VideoRisk out;
  out.grad = Matrix::Zero(W.rows(), W.cols());

  std::vector<TableArgmax> truth(n);
  std::vector<TableArgmax> wrong(n);
  for (int t = 0; t < n; ++t) {
    const Matrix table = video.pooled[t] * W;
    truth[t] = best_for_label(table, y);
    wrong[t] = best_excluding(table, y);
  }

  if (keep_records) out.terms.terms.reserve(n);
  for (int t = 0; t < n; ++t) {
    TermRecord rec;
    rec.video = index;
    rec.subseq = t;
    const auto own = video.pooled[t].row(truth[t].mask);

    rec.r1 = wrong[t].value + 1.0 - truth[t].value;
    rec.active1 = rec.r1 >= 0.0;
    rec.alpha = std::max(0.0, rec.r1);
    if (rec.active1) {
      out.grad.col(wrong[t].label) += hp.c1 * video.pooled[t].row(wrong[t].mask).transpose();
      out.grad.col(y) -= hp.c1 * own.transpose();
      ++out.terms.active1;
    }
    out.terms.r1_sum += rec.alpha;

    if (flags.monotonicity_on) {
      const auto& kids = video.children[t];
      if (kids.empty()) {
        ++out.terms.r2_skipped;
      } else {
        int best_child = -1;
        double best_value = 0.0;
        for (int j : kids) {
          const double v =
              truth[j].value + adaptive_margin(video.pool[t].length, video.pool[j].length);
          if (best_child < 0 || v > best_value) {
            best_child = j;
            best_value = v;
          }
        }
        rec.has_r2 = true;
        rec.r2 = best_value - truth[t].value;
        rec.active2 = rec.r2 >= 0.0;
        rec.beta = std::max(0.0, rec.r2);
        ++out.terms.r2_terms;
        if (rec.active2) {
          out.grad.col(y) +=
              hp.c2 * (video.pooled[best_child].row(truth[best_child].mask) - own).transpose();
          ++out.terms.active2;
        }
        out.terms.r2_sum += rec.beta;
      }
    }
    if (keep_records) out.terms.terms.push_back(rec);
  }
  return out;
}

}  // namespace

RiskEvaluation evaluate_risk(const ModelParams& model, const TrainingSet& set,
                             const VariantFlags& flags, const Hyperparams& hp, bool keep_records) {
  if (model.num_classes() != set.num_classes || model.dim() != set.dim) {
    throw DomainError("evaluate_risk: model dimensions do not match the training set");
  }
  if (set.num_classes < 2) throw DomainError("evaluate_risk: needs K >= 2");
  const auto W = model.as_matrix();

  std::vector<VideoRisk> parts(set.videos.size());
  parallel_for(set.videos.size(), [&](std::size_t i) {
    parts[i] = video_risk(W, set.videos[i], static_cast<int>(i), flags, hp, keep_records);
  });

  RiskEvaluation out;
  Matrix grad = Matrix::Zero(set.dim, set.num_classes);
  for (auto& p : parts) {
    auto& t = out.terms;
    t.r1_sum += p.terms.r1_sum;
    t.r2_sum += p.terms.r2_sum;
    t.active1 += p.terms.active1;
    t.active2 += p.terms.active2;
    t.r2_terms += p.terms.r2_terms;
    t.r2_skipped += p.terms.r2_skipped;
    if (keep_records) {
      t.terms.insert(t.terms.end(), p.terms.terms.begin(), p.terms.terms.end());
    }
    grad += p.grad;
  }
  out.subgradient = Eigen::Map<const Vector>(grad.data(), grad.size());
  out.weighted_risk = out.terms.weighted(hp);
  if (!std::isfinite(out.weighted_risk) || !out.subgradient.allFinite()) {
    throw NumericalError("evaluate_risk: non-finite risk or subgradient");
  }
  return out;
}

RiskTerms risk_terms(const ModelParams& model, const TrainingSet& set, const VariantFlags& flags,
                     const Hyperparams& hp) {
  return evaluate_risk(model, set, flags, hp, true).terms;
}

Vector subgradient(const ModelParams& model, const TrainingSet& set, const VariantFlags& flags,
                   const Hyperparams& hp) {
  return evaluate_risk(model, set, flags, hp, false).subgradient;
}

double objective_value(const ModelParams& model, const RiskTerms& terms, const Hyperparams& hp) {
  return 0.5 * model.weights().squaredNorm() + terms.weighted(hp);
}

}  // namespace lbsvm
