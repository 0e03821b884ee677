#include "lbsvm/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "lbsvm/baselines.hpp"
#include "lbsvm/errors.hpp"
#include "lbsvm/evalreport.hpp"
#include "lbsvm/model_file.hpp"
#include "lbsvm/nrbm.hpp"
#include "lbsvm/parallel.hpp"
#include "lbsvm/seqdata.hpp"

namespace lbsvm::cli {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

struct GenArgs {
  std::string out;
  GeneratorConfig config;
};

struct TrainArgs {
  std::string data;
  std::string variant = "lbsvm";
  Hyperparams hp;
  std::string pool = "max";
  int stride = 2;
  std::uint64_t seed = 1;
  std::string model;
  std::string log;
};

struct PredictArgs {
  std::string model;
  std::string video;
  std::string vote = "soft";
};

struct EvalArgs {
  std::string model;
  std::string data;
  std::string vote = "soft";
  std::string prefix_curve;
  std::string monotonicity;
  std::string report;
  int stride = 2;
  double tol = 1e-6;
  bool all_labels = false;
};

void write_json(const Json& j, const fs::path& file) {
  std::ofstream os(file, std::ios::binary);
  if (!os) throw ParseError("cannot write '" + file.string() + "'");
  os << j.dump(2) << '\n';
}

Json generator_json(const GeneratorConfig& c) {
  Json j;
  j["classes"] = c.num_classes;
  j["dim"] = c.dim;
  j["train_per_class"] = c.train_per_class;
  j["test_per_class"] = c.test_per_class;
  j["frames_train"] = c.frames_train;
  j["frames_test_min"] = c.frames_test_min;
  j["frames_test_max"] = c.frames_test_max;
  j["sigma"] = format_double(c.noise_sigma);
  j["noise_correlation"] = format_double(c.noise_correlation);
  j["bad_rate"] = format_double(c.bad_frame_rate);
  j["seed"] = c.seed;
  j["center_scale"] = format_double(c.center_scale);
  j["radius"] = format_double(c.radius);
  j["occluder_scale"] = format_double(c.occluder_scale);
  j["occluder_sigma"] = format_double(c.occluder_sigma);
  j["instance_jitter"] = format_double(c.instance_jitter);
  j["test_arc_min"] = format_double(c.test_arc_min);
  j["test_arc_max"] = format_double(c.test_arc_max);
  return j;
}

int cmd_gen(const GenArgs& a, std::ostream& out) {
  const Dataset ds = generate_synthetic(a.config);
  save_dataset(ds, a.out);
  Json run;
  run["command"] = "gen";
  run["out"] = a.out;
  run["generator"] = generator_json(a.config);
  write_json(run, fs::path(a.out) / "run.json");
  const auto train = ds.subset(Split::kTrain).size();
  out << "wrote " << ds.size() << " videos (" << train << " train, " << ds.size() - train
      << " test) to " << a.out << '\n';
  return 0;
}

int cmd_train(TrainArgs a, std::ostream& out) {
  if (a.model.empty()) throw ConfigError("train: --model is required");
  const Variant variant = variant_from_string(a.variant);
  a.hp.pooling = pooling_from_string(a.pool);
  a.hp.validate();
  const Dataset train_set = load_dataset(a.data).subset(Split::kTrain);
  if (train_set.videos.empty()) throw ConfigError("train: dataset has no training videos");

  const VariantFlags flags = flags_for(variant);
  TrainResult result;
  if (variant == Variant::kAvgFrame) {
    result = train_frame_svm_logged(train_set, a.hp, a.seed);
  } else {
    SamplingScheme scheme;
    scheme.start_stride = a.stride;
    result = train(train_set, scheme, flags, a.hp, a.seed);
  }
  TrainedModel model{result.model, variant, a.hp.views(flags)};
  save_model(model, a.model);

  const std::string log_path = a.log.empty() ? a.model + ".log" : a.log;
  {
    std::ofstream log(log_path, std::ios::binary);
    if (!log) throw ParseError("cannot write '" + log_path + "'");
    log << "iteration\tobjective\trisk\tbest_objective\tlower_bound\tgap\tactive_r1\tactive_r2"
           "\tr2_terms\n";
    for (const auto& it : result.log) {
      log << it.iteration << '\t' << format_double(it.objective) << '\t'
          << format_double(it.risk) << '\t' << format_double(it.best_objective) << '\t'
          << format_double(it.lower_bound) << '\t' << format_double(it.gap) << '\t'
          << it.active_r1 << '\t' << it.active_r2 << '\t' << it.r2_terms << '\n';
    }
  }

  Json run;
  run["command"] = "train";
  run["data"] = a.data;
  run["variant"] = to_string(variant);
  run["c1"] = format_double(a.hp.c1);
  run["c2"] = format_double(a.hp.c2);
  run["epsilon"] = format_double(a.hp.epsilon);
  run["max_iter"] = a.hp.max_iter;
  run["frames"] = a.hp.frames;
  run["select"] = a.hp.select;
  run["pool"] = to_string(a.hp.pooling);
  run["stride"] = a.stride;
  run["seed"] = a.seed;
  run["model"] = a.model;
  run["log"] = log_path;
  run["iterations"] = result.log.size();
  run["converged"] = result.converged;
  write_json(run, a.model + ".run.json");

  const auto& last = result.log.back();
  out << to_string(variant) << ": " << result.log.size() << " iterations, objective "
      << format_double(last.best_objective) << ", gap " << format_double(last.gap)
      << (result.converged ? "" : " (max-iter reached)") << '\n';
  return 0;
}

int cmd_predict(const PredictArgs& a, std::ostream& out) {
  const TrainedModel model = load_model(a.model);
  const FrameSequence video = read_sequence_file(a.video);
  if (video.dim() != model.params.dim()) {
    throw DomainError("predict: video dimension " + std::to_string(video.dim()) +
                      " does not match model dimension " + std::to_string(model.params.dim()));
  }
  if (model.variant == Variant::kAvgFrame) {
    const FrameModel fm{model.params};
    const VoteScheme scheme = vote_from_string(a.vote);
    const Matrix scores = frame_scores(fm, video);
    const int label = vote_from_scores(scores, scheme);
    int votes = 0;
    for (Eigen::Index t = 0; t < scores.rows(); ++t) {
      votes += argmax_label(scores.row(t).transpose()) == label;
    }
    out << label << ' ' << format_double(static_cast<double>(votes) / scores.rows()) << " -\n";
    return 0;
  }
  const ScoredPrediction p = predict(model.params, video, model.views);
  const auto sampled = sample_frames_uniform({0, video.num_frames()}, model.views.frames);
  out << p.label << ' ' << format_double(p.score) << ' ';
  for (std::size_t i = 0; i < p.mask.selected.size(); ++i) {
    out << (i ? "," : "") << sampled[p.mask.selected[i]];
  }
  out << '\n';
  return 0;
}

int cmd_eval(const EvalArgs& a, std::ostream& out) {
  if (a.report.empty()) throw ConfigError("eval: --report is required");
  const TrainedModel model = load_model(a.model);
  const Dataset test_set = load_dataset(a.data).subset(Split::kTest);
  if (test_set.dim != model.params.dim() || test_set.num_classes != model.params.num_classes()) {
    throw DomainError("eval: model (K=" + std::to_string(model.params.num_classes()) +
                      ", d=" + std::to_string(model.params.dim()) + ") does not match dataset (K=" +
                      std::to_string(test_set.num_classes) + ", d=" + std::to_string(test_set.dim) +
                      ")");
  }

  std::ostringstream report;
  report << "model\t" << a.model << "\nvariant\t" << to_string(model.variant) << "\ntest_videos\t"
         << test_set.size() << '\n';

  VideoClassifier classify;
  Evaluation main;
  const bool frame_model = model.variant == Variant::kAvgFrame;
  const FrameModel fm{model.params};
  const VoteScheme scheme = vote_from_string(a.vote);
  if (frame_model) {
    report << "avg_frame_accuracy\t" << format_double(avg_frame_accuracy(fm, test_set)) << '\n';
    for (VoteScheme s : {VoteScheme::kHard, VoteScheme::kSoft, VoteScheme::kKnn}) {
      report << "accum_frame_" << to_string(s) << "_accuracy\t"
             << format_double(evaluate_votes(fm, test_set, s).accuracy) << '\n';
    }
    classify = [&](const FrameSequence& v) { return vote_video(fm, v, scheme); };
    report << "vote\t" << to_string(scheme) << '\n';
  } else {
    classify = [&](const FrameSequence& v) { return predict(model.params, v, model.views).label; };
  }
  main = evaluate_with(classify, test_set);
  report << "accuracy\t" << format_double(main.accuracy) << "\n\nconfusion (row-normalized)\n"
         << format_confusion(main.confusion);

  if (!a.prefix_curve.empty()) {
    const PrefixCurve curve = prefix_curve(classify, test_set, default_prefix_fractions());
    write_curve_csv(curve, a.prefix_curve);
    report << "\nprefix_curve_decreases\t" << curve.decreases() << '\n';
  }
  if (!a.monotonicity.empty()) {
    SamplingScheme s;
    s.start_stride = a.stride;
    ViewConfig views = model.views;
    const MonotonicityReport m =
        monotonicity_report(model.params, test_set, s, views, a.tol, a.all_labels);
    std::ofstream os(a.monotonicity, std::ios::binary);
    if (!os) throw ParseError("cannot write '" + a.monotonicity + "'");
    os << "pairs\t" << m.pairs << "\nviolations\t" << m.violations << "\nviolation_rate\t"
       << format_double(m.rate) << "\ntolerance\t" << format_double(a.tol) << "\nlabels\t"
       << (a.all_labels ? "all" : "predicted") << '\n';
    report << "monotonicity_violation_rate\t" << format_double(m.rate) << '\n';
  }
  {
    std::ofstream os(a.report, std::ios::binary);
    if (!os) throw ParseError("cannot write '" + a.report + "'");
    os << report.str();
  }

  Json run;
  run["command"] = "eval";
  run["model"] = a.model;
  run["data"] = a.data;
  run["vote"] = a.vote;
  run["prefix_curve"] = a.prefix_curve;
  run["monotonicity"] = a.monotonicity;
  run["stride"] = a.stride;
  run["tolerance"] = format_double(a.tol);
  run["all_labels"] = a.all_labels;
  run["report"] = a.report;
  write_json(run, a.report + ".run.json");

  out << "accuracy " << format_double(main.accuracy) << '\n';
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Latent bi-constraint SVM for sequence classification"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "Worker thread cap (0 = all cores)")->check(CLI::NonNegativeNumber);

  GenArgs gen;
  auto* g = app.add_subcommand("gen", "Generate a synthetic dataset");
  g->add_option("--out", gen.out, "Output directory")->required();
  g->add_option("--classes", gen.config.num_classes, "Class count K");
  g->add_option("--dim", gen.config.dim, "Feature dimension d");
  g->add_option("--train-per-class", gen.config.train_per_class);
  g->add_option("--test-per-class", gen.config.test_per_class);
  g->add_option("--bad-rate", gen.config.bad_frame_rate, "Occluded frame probability");
  g->add_option("--sigma", gen.config.noise_sigma, "Frame noise std");
  g->add_option("--seed", gen.config.seed);
  g->add_option("--frames-train", gen.config.frames_train);
  g->add_option("--test-frames-min", gen.config.frames_test_min);
  g->add_option("--test-frames-max", gen.config.frames_test_max);
  g->add_option("--radius", gen.config.radius, "Trajectory radius");
  g->add_option("--instance-jitter", gen.config.instance_jitter);
  g->add_option("--noise-correlation", gen.config.noise_correlation, "AR(1) frame noise correlation");
  g->add_option("--center-scale", gen.config.center_scale);
  g->add_option("--occluder-scale", gen.config.occluder_scale);
  g->add_option("--occluder-sigma", gen.config.occluder_sigma);
  g->add_option("--test-arc-min", gen.config.test_arc_min, "Shortest test arc (fraction of a turn)");
  g->add_option("--test-arc-max", gen.config.test_arc_max, "Longest test arc (fraction of a turn)");

  TrainArgs tr;
  auto* t = app.add_subcommand("train", "Train a model");
  t->add_option("--data", tr.data, "Dataset directory")->required();
  t->add_option("--variant", tr.variant)
      ->check(CLI::IsMember({"scsvm", "bsvm", "lbsvm", "avg-frame"}));
  t->add_option("--c1", tr.hp.c1);
  t->add_option("--c2", tr.hp.c2);
  t->add_option("--epsilon", tr.hp.epsilon);
  t->add_option("--max-iter", tr.hp.max_iter);
  t->add_option("--frames", tr.hp.frames, "Sampled frames per subsequence (l)");
  t->add_option("--select", tr.hp.select, "Selected frames per view (k)");
  t->add_option("--pool", tr.pool)->check(CLI::IsMember({"max", "mean"}));
  t->add_option("--stride", tr.stride, "Subsequence start stride");
  t->add_option("--seed", tr.seed);
  t->add_option("--model", tr.model, "Output model file")->required();
  t->add_option("--log", tr.log, "Training log file");

  PredictArgs pr;
  auto* p = app.add_subcommand("predict", "Classify one video file");
  p->add_option("--model", pr.model)->required();
  p->add_option("--video", pr.video)->required();
  p->add_option("--vote", pr.vote)->check(CLI::IsMember({"hard", "soft", "knn"}));

  EvalArgs ev;
  auto* e = app.add_subcommand("eval", "Evaluate on the test split");
  e->add_option("--model", ev.model)->required();
  e->add_option("--data", ev.data)->required();
  e->add_option("--vote", ev.vote)->check(CLI::IsMember({"hard", "soft", "knn"}));
  e->add_option("--prefix-curve", ev.prefix_curve, "CSV output for the prefix-length curve");
  e->add_option("--monotonicity", ev.monotonicity, "Monotonicity report output");
  e->add_option("--report", ev.report)->required();
  e->add_option("--stride", ev.stride);
  e->add_option("--tolerance", ev.tol);
  e->add_flag("--all-labels", ev.all_labels, "Measure monotonicity at every label");

  std::vector<std::string> rev(args.begin() + (args.empty() ? 0 : 1), args.end());
  std::reverse(rev.begin(), rev.end());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& ex) {
    err << "lbsvm: " << ex.what() << '\n';
    return 2;
  }

  try {
    set_max_threads(threads);
    if (*g) return cmd_gen(gen, out);
    if (*t) return cmd_train(tr, out);
    if (*p) return cmd_predict(pr, out);
    if (*e) return cmd_eval(ev, out);
  } catch (const std::exception& ex) {
    std::string msg = ex.what();
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    err << "lbsvm: error: " << msg << '\n';
    return 1;
  }
  return 2;
}

}  // namespace lbsvm::cli
