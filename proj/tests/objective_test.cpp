#include <doctest.h>

#include "lbsvm/errors.hpp"
#include "lbsvm/objective.hpp"
#include "lbsvm/parallel.hpp"
#include "support.hpp"

using namespace lbsvm;

namespace {

// One video per class, constant frames, explicit pools.
Dataset constant_videos(const std::vector<double>& values, int frames) {
  Dataset ds{static_cast<int>(values.size()), 1, {}};
  for (std::size_t c = 0; c < values.size(); ++c) {
    ds.videos.push_back({"c" + std::to_string(c),
                         FrameSequence(FrameMatrix::Constant(frames, 1, values[c])),
                         static_cast<int>(c), Split::kTrain});
  }
  return ds;
}

}  // namespace

TEST_CASE("variant flags") {
  CHECK(VariantFlags::lbsvm() == VariantFlags{true, true});
  CHECK(VariantFlags::bsvm() == VariantFlags{true, false});
  CHECK(VariantFlags::scsvm() == VariantFlags{false, false});
  CHECK(flags_for(Variant::kAvgFrame) == VariantFlags::scsvm());
  CHECK(variant_from_string("bsvm") == Variant::kBsvm);
  CHECK(std::string(to_string(Variant::kAvgFrame)) == "avg-frame");
  CHECK_THROWS_AS(variant_from_string("svm"), ConfigError);
}

TEST_CASE("hyperparameter defaults and validation") {
  const Hyperparams hp;
  CHECK(hp.c1 == 0.5e-4);
  CHECK(hp.c2 == 0.5e-4);
  CHECK(hp.epsilon == 0.01);
  CHECK(hp.frames == 10);
  CHECK(hp.select == 5);
  CHECK(hp.max_iter == 300);
  CHECK(hp.views(VariantFlags::lbsvm()).select == 5);
  CHECK(hp.views(VariantFlags::bsvm()).select == 10);
  Hyperparams bad = hp;
  bad.c1 = -1;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = hp;
  bad.epsilon = 0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = hp;
  bad.select = 11;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("zero model: every R1 is 1 and every R2 is the shortest child's margin") {
  std::mt19937_64 rng(1);
  Dataset ds = testing::random_dataset(rng, 2, 3, 1, 20, 20);
  const std::vector<std::vector<SubseqSpec>> pools{
      {{0, 20}, {0, 10}, {4, 8}, {12, 4}},  // parent (0,20) holds three children
      {{0, 16}, {2, 6}, {10, 6}}};
  Hyperparams hp;
  hp.c1 = 0.3;
  hp.c2 = 0.7;
  hp.frames = 4;
  hp.select = 2;
  const auto set = build_training_set(ds, pools, VariantFlags::lbsvm(), hp);
  const auto t = risk_terms(ModelParams(2, 3), set, VariantFlags::lbsvm(), hp);

  // Hand sums. Video 0: (0,20) -> children (0,10),(4,8),(12,4); shortest 4 -> 1 - 4/20.
  // (0,10) -> child (4,8)? no, 4+8 = 12 > 10. Nothing else nests. Video 1: (0,16) -> 6-long
  // children, margin 1 - 6/16.
  const double r2 = (1.0 - 4.0 / 20.0) + (1.0 - 6.0 / 16.0);
  CHECK(t.r1_sum == doctest::Approx(7.0));
  CHECK(t.active1 == 7);
  CHECK(t.r2_terms == 2);
  CHECK(t.r2_skipped == 5);
  CHECK(t.r2_sum == doctest::Approx(r2));
  CHECK(objective_value(ModelParams(2, 3), t, hp) == doctest::Approx(0.3 * 7 + 0.7 * r2));

  Hyperparams twice = hp;
  twice.c1 *= 2;
  CHECK(t.weighted(twice) - t.weighted(hp) == doctest::Approx(hp.c1 * t.r1_sum));
}

TEST_CASE("R1 arithmetic and the Heaviside boundary") {
  // Class 0 frames are 1, class 1 frames are 2; w = (w0, w1) with d = 1.
  const Dataset ds = constant_videos({1.0, 2.0}, 4);
  Hyperparams hp;
  hp.frames = 2;
  hp.select = 2;
  hp.c1 = 1.0;
  const std::vector<std::vector<SubseqSpec>> pools{{{0, 4}}, {{0, 4}}};
  const auto set = build_training_set(ds, pools, VariantFlags::scsvm(), hp);

  SUBCASE("true score 2.0, best wrong 1.5: R1 = 0.5 active") {
    // video 0 (x = 1): true 1*w0 = 2, wrong 1*w1 = 1.5.
    const auto t = risk_terms(ModelParams(2, 1, Eigen::Vector2d(2.0, 1.5)), set,
                              VariantFlags::scsvm(), hp);
    CHECK(t.terms[0].r1 == doctest::Approx(0.5));
    CHECK(t.terms[0].active1);
    CHECK(t.terms[0].alpha == doctest::Approx(0.5));
  }
  SUBCASE("true score 3.0, best wrong 1.5: inactive") {
    const auto t = risk_terms(ModelParams(2, 1, Eigen::Vector2d(3.0, 1.5)), set,
                              VariantFlags::scsvm(), hp);
    CHECK(t.terms[0].r1 == doctest::Approx(-0.5));
    CHECK_FALSE(t.terms[0].active1);
    CHECK(t.terms[0].alpha == 0.0);
  }
  SUBCASE("R1 exactly 0 is active") {
    // video 0: true 1*1 = 1, wrong 0: R1 = 0 + 1 - 1 = 0.
    const ModelParams m(2, 1, Eigen::Vector2d(1.0, 0.0));
    const auto ev = evaluate_risk(m, set, VariantFlags::scsvm(), hp);
    CHECK(ev.terms.terms[0].r1 == 0.0);
    CHECK(ev.terms.terms[0].active1);
    // video 1 (x = 2): true 0, wrong 2: R1 = 3, also active. Gradient:
    // video 0 -> +x on block 1, -x on block 0; video 1 -> +x on block 0, -x on block 1.
    CHECK(ev.subgradient(0) == doctest::Approx(-1.0 + 2.0));
    CHECK(ev.subgradient(1) == doctest::Approx(1.0 - 2.0));
  }
}

TEST_CASE("single active R1 term fills two blocks") {
  const Dataset ds = constant_videos({3.0, 5.0}, 4);
  Hyperparams hp;
  hp.frames = 2;
  hp.select = 2;
  hp.c1 = 0.25;
  const auto set = build_training_set(ds, {{{0, 4}}, {{0, 4}}}, VariantFlags::scsvm(), hp);
  // Only video 1 violates: w = (0, 10) gives video 0: wrong 30 vs true 0 -> active;
  // video 1: true 50 vs wrong 0 -> inactive.
  const auto ev = evaluate_risk(ModelParams(2, 1, Eigen::Vector2d(0.0, 10.0)), set,
                                VariantFlags::scsvm(), hp);
  CHECK(ev.terms.active1 == 1);
  CHECK(ev.subgradient(1) == doctest::Approx(0.25 * 3.0));
  CHECK(ev.subgradient(0) == doctest::Approx(-0.25 * 3.0));
}

TEST_CASE("parent 1.0 vs best child 1.3 gives R2 = 0.3") {
  // Parent (0,4) scores 1.0, child (1,2) scores 0.8 with margin 0.5.
  Dataset ds{2, 1, {}};
  FrameMatrix f(4, 1);
  f << 1.0, 0.8, 0.8, 0.2;
  ds.videos.push_back({"v", FrameSequence(f), 0, Split::kTrain});
  Hyperparams hp;
  hp.frames = 2;
  hp.select = 2;
  const auto set = build_training_set(ds, {{{0, 4}, {1, 2}}}, VariantFlags::bsvm(), hp);
  const auto t = risk_terms(ModelParams(2, 1, Eigen::Vector2d(1.0, 0.0)), set,
                            VariantFlags::bsvm(), hp);
  REQUIRE(t.terms[0].has_r2);
  CHECK(t.terms[0].r2 == doctest::Approx(0.3));
  CHECK(t.terms[0].beta == doctest::Approx(0.3));
  CHECK_FALSE(t.terms[1].has_r2);
}

TEST_CASE("SCSVM never evaluates R2") {
  std::mt19937_64 rng(2);
  const auto p = testing::toy_problem(3, VariantFlags::scsvm());
  for (int i = 0; i < 5; ++i) {
    const ModelParams m(3, 4, testing::random_vector(rng, 12));
    const auto t = risk_terms(m, p.set, p.flags, p.hp);
    CHECK(t.r2_sum == 0.0);
    CHECK(t.r2_terms == 0);
    CHECK(t.r2_skipped == 0);
    CHECK(t.active2 == 0);
    for (const auto& rec : t.terms) CHECK_FALSE(rec.has_r2);
  }
}

TEST_CASE("slacks equal the minimal feasible slacks of the constraint scan") {
  std::mt19937_64 rng(3);
  for (auto flags : {VariantFlags::lbsvm(), VariantFlags::bsvm()}) {
    const auto p = testing::toy_problem(rng(), flags);
    const ModelParams m(3, 4, testing::random_vector(rng, 12));
    const auto t = risk_terms(m, p.set, flags, p.hp);
    const ViewConfig views = p.hp.views(flags);
    std::size_t r = 0;
    for (std::size_t i = 0; i < p.data.videos.size(); ++i) {
      const auto& video = p.data.videos[i];
      const auto& pool = p.set.videos[i].pool;
      auto f = [&](const SubseqSpec& s, int y) {
        return score(m, testing::rows_of(video.sequence.frames(),
                                         testing::sample_indices(s.start, s.length, views.frames)),
                     y, views)
            .score;
      };
      for (const auto& parent : pool) {
        const auto& rec = t.terms[r++];
        double alpha = 0.0;
        for (int y = 0; y < 3; ++y)
          if (y != video.label) alpha = std::max(alpha, f(parent, y) + 1.0 - f(parent, video.label));
        CHECK(rec.alpha == doctest::Approx(alpha).epsilon(1e-12));
        double beta = 0.0;
        bool any = false;
        for (const auto& child : pool) {
          if (!(child.start >= parent.start && child.end() <= parent.end() &&
                child.length < parent.length))
            continue;
          any = true;
          beta = std::max(beta, f(child, video.label) + 1.0 -
                                    static_cast<double>(child.length) / parent.length -
                                    f(parent, video.label));
        }
        CHECK(rec.has_r2 == any);
        CHECK(rec.beta == doctest::Approx(beta).epsilon(1e-12));
      }
    }
    CHECK(r == t.terms.size());
  }
}

TEST_CASE("finite differences match the subgradient") {
  const auto g = testing::check_subgradient(11, 20);
  CHECK(g.points == 20);
  CHECK(g.failures == 0);
}

TEST_CASE("objective is convex along segments when latents are frozen") {
  std::mt19937_64 rng(4);
  for (auto flags : {VariantFlags::bsvm(), VariantFlags::scsvm()}) {
    auto p = testing::toy_problem(rng(), flags);
    p.hp.c1 = 1.0;
    p.hp.c2 = 1.0;
    auto J = [&](const Vector& w) {
      const ModelParams m(3, 4, w);
      return objective_value(m, risk_terms(m, p.set, flags, p.hp), p.hp);
    };
    for (int i = 0; i < 30; ++i) {
      const Vector a = testing::random_vector(rng, 12), b = testing::random_vector(rng, 12);
      CHECK(J(0.5 * (a + b)) <= 0.5 * (J(a) + J(b)) + 1e-9);
      CHECK(J(a) >= 0.0);
    }
  }
}

TEST_CASE("results do not depend on the thread count") {
  std::mt19937_64 rng(5);
  const auto p = testing::toy_problem(9, VariantFlags::lbsvm());
  const ModelParams m(3, 4, testing::random_vector(rng, 12));
  const auto base = evaluate_risk(m, p.set, p.flags, p.hp);
  for (int threads : {1, 2, 3}) {
    set_max_threads(threads);
    const auto other = evaluate_risk(m, p.set, p.flags, p.hp);
    CHECK(other.subgradient == base.subgradient);
    CHECK(other.weighted_risk == base.weighted_risk);
  }
  set_max_threads(0);
}

TEST_CASE("mismatched model dimensions are rejected") {
  const auto p = testing::toy_problem(1, VariantFlags::lbsvm());
  CHECK_THROWS_AS(risk_terms(ModelParams(3, 5), p.set, p.flags, p.hp), DomainError);
}
