#pragma once

#include <filesystem>

#include "lbsvm/inference.hpp"
#include "lbsvm/objective.hpp"

namespace lbsvm {

struct TrainedModel {
  ModelParams params;
  Variant variant = Variant::kLbsvm;
  ViewConfig views;
};

/// Header line "K d variant l k pool", then K*d weights one per line.
void save_model(const TrainedModel& model, const std::filesystem::path& file);
TrainedModel load_model(const std::filesystem::path& file);

}  // namespace lbsvm
