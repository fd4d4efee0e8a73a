#pragma once

#include <string>

#include "dphalf/trainers.hpp"

namespace dphalf {

// Persisted alongside the weights so evaluation can reproduce the
// training-time input representation.
struct ModelMetadata {
  std::string algo;
  std::string digest;                     // training config digest (hex)
  std::string preprocessing_mode = "pixel";  // "pixel" | "unit_ball" | "none"
  double unit_ball_scale = 1.0;
};

// Versioned JSON document. Weights are hex-float strings, so
// load(save(m)) reproduces every weight bit-exactly. Feature maps are
// stored by (d, d_hat, sigma_hat, seed) and regenerated on use.
std::string model_to_json(const MulticlassModel& model,
                          const ModelMetadata& meta);

struct LoadedModel {
  MulticlassModel model;
  ModelMetadata meta;
};

LoadedModel model_from_json(const std::string& text);

// FNV-1a over a canonical flag string; used as the config digest.
std::string config_digest(const std::string& canonical_config);

}  // namespace dphalf
