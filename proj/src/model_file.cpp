#include "lbsvm/model_file.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "lbsvm/errors.hpp"

namespace lbsvm {

void save_model(const TrainedModel& model, const std::filesystem::path& file) {
  std::ofstream os(file, std::ios::binary);
  if (!os) throw ParseError("cannot open '" + file.string() + "' for writing");
  const auto& p = model.params;
  os << p.num_classes() << ' ' << p.dim() << ' ' << to_string(model.variant) << ' '
     << model.views.frames << ' ' << model.views.select << ' ' << to_string(model.views.pooling)
     << '\n';
  for (Eigen::Index i = 0; i < p.weights().size(); ++i) os << format_double(p.weights()[i]) << '\n';
  if (!os) throw ParseError("write failed for '" + file.string() + "'");
}

TrainedModel load_model(const std::filesystem::path& file) {
  std::ifstream is(file, std::ios::binary);
  if (!is) throw ParseError("missing model file '" + file.string() + "'");
  const std::string where = file.string();
  std::string line;
  if (!std::getline(is, line)) throw ParseError(where + ":1: empty model file");
  std::istringstream header(line);
  int K = 0;
  int d = 0;
  std::string variant;
  TrainedModel out;
  std::string pooling = "max";
  if (!(header >> K >> d >> variant >> out.views.frames >> out.views.select) || K < 1 || d < 1) {
    throw ParseError(where + ":1: expected header 'K d variant l k [pool]'");
  }
  header >> pooling;
  try {
    out.variant = variant_from_string(variant);
    out.views.pooling = pooling_from_string(pooling);
    out.views.validate();
  } catch (const std::exception& e) {
    throw ParseError(where + ":1: " + e.what());
  }
  Vector w(static_cast<Eigen::Index>(K) * d);
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    const std::string lineno = std::to_string(i + 2);
    if (!std::getline(is, line)) {
      throw ParseError(where + ":" + lineno + ": expected " + std::to_string(w.size()) +
                       " weights, file ends early");
    }
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(line.data(), line.data() + line.size(), v);
    if (ec != std::errc() || ptr != line.data() + line.size()) {
      throw ParseError(where + ":" + lineno + ": bad weight '" + line + "'");
    }
    w[i] = v;
  }
  out.params = ModelParams(K, d, std::move(w));
  return out;
}

}  // namespace lbsvm
