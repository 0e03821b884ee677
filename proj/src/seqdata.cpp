#include "lbsvm/seqdata.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <string_view>

#include <json.hpp>

#include "lbsvm/errors.hpp"

namespace lbsvm {

namespace fs = std::filesystem;

FrameSequence::FrameSequence(FrameMatrix frames) : frames_(std::move(frames)) {
  if (frames_.rows() < 1) throw DomainError("FrameSequence: at least one frame required");
  if (frames_.cols() < 1) throw DomainError("FrameSequence: feature dimension must be positive");
}

FrameSequence FrameSequence::slice(int start, int length) const {
  if (start < 0 || length < 1 || start + length > num_frames()) {
    throw DomainError("FrameSequence::slice: interval outside the sequence");
  }
  return FrameSequence(frames_.middleRows(start, length));
}

const char* to_string(Split split) { return split == Split::kTrain ? "train" : "test"; }

Split split_from_string(const std::string& s) {
  if (s == "train") return Split::kTrain;
  if (s == "test") return Split::kTest;
  throw ParseError("unknown split tag '" + s + "'");
}

void Dataset::validate() const {
  if (num_classes < 1) throw DomainError("dataset: class count must be positive");
  if (dim < 1) throw DomainError("dataset: feature dimension must be positive");
  for (const auto& v : videos) {
    if (v.label < 0 || v.label >= num_classes) {
      throw DomainError("dataset: video '" + v.id + "' has label " + std::to_string(v.label) +
                        " outside [0, " + std::to_string(num_classes) + ")");
    }
    if (v.sequence.empty()) throw DomainError("dataset: video '" + v.id + "' has no frames");
    if (v.sequence.dim() != dim) {
      throw DomainError("dataset: video '" + v.id + "' has dimension " +
                        std::to_string(v.sequence.dim()) + ", expected " + std::to_string(dim));
    }
  }
}

Dataset Dataset::subset(Split split) const {
  Dataset out{num_classes, dim, {}};
  for (const auto& v : videos) {
    if (v.split == split) out.videos.push_back(v);
  }
  return out;
}

void GeneratorConfig::validate() const {
  auto fail = [](const std::string& field, const std::string& why) {
    throw ConfigError("generator config: " + field + " " + why);
  };
  if (num_classes < 1) fail("classes", "must be >= 1");
  if (dim < 2) fail("dim", "must be >= 2");
  if (train_per_class < 0) fail("train_per_class", "must be >= 0");
  if (test_per_class < 0) fail("test_per_class", "must be >= 0");
  if (frames_train < 1) fail("frames_train", "must be >= 1");
  if (frames_test_min < 1) fail("frames_test_min", "must be >= 1");
  if (frames_test_max < frames_test_min) fail("frames_test_max", "must be >= frames_test_min");
  if (!(noise_sigma >= 0.0)) fail("sigma", "must be >= 0");
  if (!(bad_frame_rate >= 0.0 && bad_frame_rate <= 1.0)) fail("bad_rate", "must lie in [0, 1]");
  if (!(noise_correlation >= 0.0 && noise_correlation < 1.0)) {
    fail("noise_correlation", "must lie in [0, 1)");
  }
  if (!(occluder_sigma >= 0.0)) fail("occluder_sigma", "must be >= 0");
  if (!(instance_jitter >= 0.0)) fail("instance_jitter", "must be >= 0");
  if (!(radius >= 0.0)) fail("radius", "must be >= 0");
  if (!(test_arc_min > 0.0 && test_arc_min <= test_arc_max && test_arc_max <= 1.0)) {
    fail("test_arc", "must satisfy 0 < min <= max <= 1");
  }
}

namespace {

Vector gaussian_vector(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector v(d);
  for (int i = 0; i < d; ++i) v[i] = normal(rng);
  return v;
}

}  // namespace

Dataset generate_synthetic(const GeneratorConfig& config) {
  config.validate();
  const int d = config.dim;
  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  constexpr double kTwoPi = 2.0 * std::numbers::pi;

  struct Trajectory {
    Vector center, u, v;
  };
  std::vector<Trajectory> classes;
  classes.reserve(config.num_classes);
  for (int c = 0; c < config.num_classes; ++c) {
    Trajectory t;
    t.center = config.center_scale * gaussian_vector(d, rng);
    t.u = gaussian_vector(d, rng).normalized();
    Vector v = gaussian_vector(d, rng);
    v -= v.dot(t.u) * t.u;
    t.v = v.normalized();
    classes.push_back(std::move(t));
  }
  const Vector occluder_center = config.occluder_scale * gaussian_vector(d, rng);

  auto make_video = [&](const Trajectory& traj, int n, double theta0, double sweep) {
    const Vector center = traj.center + config.instance_jitter * gaussian_vector(d, rng);
    FrameMatrix frames(n, d);
    const double phi = config.noise_correlation;
    const double innovation = std::sqrt(1.0 - phi * phi);
    Vector noise = Vector::Zero(d);
    for (int t = 0; t < n; ++t) {
      const double theta = theta0 + sweep * t;
      for (int j = 0; j < d; ++j) {
        noise[j] = (t == 0 ? 1.0 : innovation) * config.noise_sigma * normal(rng) +
                   (t == 0 ? 0.0 : phi * noise[j]);
      }
      Vector f = center + noise +
                 config.radius * (std::cos(theta) * traj.u + std::sin(theta) * traj.v);
      if (unit(rng) < config.bad_frame_rate) {
        f = occluder_center;
        for (int j = 0; j < d; ++j) f[j] += config.occluder_sigma * normal(rng);
      }
      frames.row(t) = f.transpose();
    }
    return FrameSequence(std::move(frames));
  };

  Dataset ds{config.num_classes, d, {}};
  for (int c = 0; c < config.num_classes; ++c) {
    for (int i = 0; i < config.train_per_class; ++i) {
      const int n = config.frames_train;
      const double theta0 = kTwoPi * unit(rng);
      ds.videos.push_back({"train_c" + std::to_string(c) + "_" + std::to_string(i),
                           make_video(classes[c], n, theta0, kTwoPi / n), c, Split::kTrain});
    }
  }
  std::uniform_int_distribution<int> test_len(config.frames_test_min, config.frames_test_max);
  for (int c = 0; c < config.num_classes; ++c) {
    for (int i = 0; i < config.test_per_class; ++i) {
      const int n = test_len(rng);
      const double arc =
          kTwoPi * (config.test_arc_min + (config.test_arc_max - config.test_arc_min) * unit(rng));
      const double theta0 = kTwoPi * unit(rng);
      const double sweep = n > 1 ? arc / (n - 1) : 0.0;
      ds.videos.push_back({"test_c" + std::to_string(c) + "_" + std::to_string(i),
                           make_video(classes[c], n, theta0, sweep), c, Split::kTest});
    }
  }
  return ds;
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw NumericalError("format_double: conversion failed");
  return std::string(buf, ptr);
}

void write_sequence_file(const FrameSequence& seq, const fs::path& file) {
  std::ofstream os(file, std::ios::binary);
  if (!os) throw ParseError("cannot open '" + file.string() + "' for writing");
  os << seq.num_frames() << ' ' << seq.dim() << '\n';
  std::string line;
  for (int t = 0; t < seq.num_frames(); ++t) {
    line.clear();
    for (int j = 0; j < seq.dim(); ++j) {
      if (j) line += ' ';
      line += format_double(seq.frames()(t, j));
    }
    line += '\n';
    os << line;
  }
  if (!os) throw ParseError("write failed for '" + file.string() + "'");
}

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) tokens.push_back(line.substr(i, j - i));
    i = j;
  }
  return tokens;
}

template <typename T>
bool parse_number(std::string_view tok, T& out) {
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  return ec == std::errc() && ptr == tok.data() + tok.size();
}

}  // namespace

FrameSequence read_sequence_file(const fs::path& file) {
  std::ifstream is(file, std::ios::binary);
  if (!is) throw ParseError("missing frame file '" + file.string() + "'");
  const std::string where = file.string();
  std::string line;
  if (!std::getline(is, line)) throw ParseError(where + ":1: empty file");
  auto header = split_ws(line);
  int n = 0;
  int d = 0;
  if (header.size() != 2 || !parse_number(header[0], n) || !parse_number(header[1], d) || n < 1 ||
      d < 1) {
    throw ParseError(where + ":1: expected header 'num_frames d'");
  }
  FrameMatrix frames(n, d);
  for (int t = 0; t < n; ++t) {
    const int lineno = t + 2;
    if (!std::getline(is, line)) {
      throw ParseError(where + ":" + std::to_string(lineno) + ": expected " + std::to_string(n) +
                       " frame rows, file ends early");
    }
    auto tokens = split_ws(line);
    if (static_cast<int>(tokens.size()) != d) {
      throw ParseError(where + ":" + std::to_string(lineno) + ": expected " + std::to_string(d) +
                       " columns, found " + std::to_string(tokens.size()));
    }
    for (int j = 0; j < d; ++j) {
      double v = 0.0;
      if (!parse_number(tokens[j], v)) {
        throw ParseError(where + ":" + std::to_string(lineno) + ": bad number '" +
                         std::string(tokens[j]) + "'");
      }
      frames(t, j) = v;
    }
  }
  while (std::getline(is, line)) {
    if (!split_ws(line).empty()) {
      throw ParseError(where + ": more than " + std::to_string(n) + " frame rows");
    }
  }
  return FrameSequence(std::move(frames));
}

void save_dataset(const Dataset& ds, const fs::path& dir) {
  ds.validate();
  fs::create_directories(dir / "videos");
  nlohmann::ordered_json manifest;
  manifest["K"] = ds.num_classes;
  manifest["d"] = ds.dim;
  manifest["videos"] = nlohmann::ordered_json::array();
  for (const auto& v : ds.videos) {
    const std::string rel = "videos/" + v.id + ".txt";
    write_sequence_file(v.sequence, dir / rel);
    nlohmann::ordered_json entry;
    entry["id"] = v.id;
    entry["label"] = v.label;
    entry["split"] = to_string(v.split);
    entry["path"] = rel;
    entry["num_frames"] = v.sequence.num_frames();
    manifest["videos"].push_back(std::move(entry));
  }
  std::ofstream os(dir / "manifest.json", std::ios::binary);
  if (!os) throw ParseError("cannot write '" + (dir / "manifest.json").string() + "'");
  os << manifest.dump(2) << '\n';
}

Dataset load_dataset(const fs::path& dir) {
  const fs::path manifest_path = dir / "manifest.json";
  std::ifstream is(manifest_path, std::ios::binary);
  if (!is) throw ParseError("missing manifest '" + manifest_path.string() + "'");
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(is);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(manifest_path.string() + ": " + e.what());
  }
  Dataset ds;
  try {
    ds.num_classes = manifest.at("K").get<int>();
    ds.dim = manifest.at("d").get<int>();
    for (const auto& entry : manifest.at("videos")) {
      LabeledVideo v;
      v.id = entry.at("id").get<std::string>();
      v.label = entry.at("label").get<int>();
      v.split = split_from_string(entry.at("split").get<std::string>());
      const fs::path file = dir / entry.at("path").get<std::string>();
      v.sequence = read_sequence_file(file);
      const int expected = entry.at("num_frames").get<int>();
      if (v.sequence.num_frames() != expected) {
        throw ParseError(file.string() + ": manifest lists " + std::to_string(expected) +
                         " frames, file has " + std::to_string(v.sequence.num_frames()));
      }
      if (v.sequence.dim() != ds.dim) {
        throw ParseError(file.string() + ":1: dimension " + std::to_string(v.sequence.dim()) +
                         " does not match manifest d = " + std::to_string(ds.dim));
      }
      ds.videos.push_back(std::move(v));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(manifest_path.string() + ": malformed manifest: " + e.what());
  }
  try {
    ds.validate();
  } catch (const DomainError& e) {
    throw ParseError(manifest_path.string() + ": " + e.what());
  }
  return ds;
}

}  // namespace lbsvm
