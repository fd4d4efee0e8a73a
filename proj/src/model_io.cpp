#include "dphalf/model_io.hpp"

#include <cstdio>
#include <cstdlib>
#include <stdexcept>

#include "json.hpp"

namespace dphalf {

namespace {

constexpr int kFormatVersion = 1;

std::string hex_float(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%a", v);
  return buf;
}

double parse_hex_float(const std::string& s) {
  const char* begin = s.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end != begin + s.size())
    throw std::runtime_error("model json: bad float literal '" + s + "'");
  return v;
}

}  // namespace

std::string model_to_json(const MulticlassModel& model,
                          const ModelMetadata& meta) {
  nlohmann::json doc;
  doc["format_version"] = kFormatVersion;
  doc["dimension"] = model.dimension;
  doc["num_classes"] = model.num_classes;

  nlohmann::json weights = nlohmann::json::array();
  for (const Halfspace& w : model.class_weights) {
    nlohmann::json row = nlohmann::json::array();
    for (double v : w.weights) row.push_back(hex_float(v));
    weights.push_back(std::move(row));
  }
  doc["weights"] = std::move(weights);

  if (model.kernel) {
    doc["kernel"] = {{"input_dim", model.kernel->input_dim},
                     {"d_hat", model.kernel->d_hat},
                     {"sigma_hat", model.kernel->sigma_hat},
                     {"seed", model.kernel->seed}};
  }
  doc["training"] = {{"algo", meta.algo},
                     {"digest", meta.digest},
                     {"mode", meta.preprocessing_mode},
                     {"scale", hex_float(meta.unit_ball_scale)}};
  return doc.dump(2) + "\n";
}

LoadedModel model_from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("model json: parse error: ") + e.what());
  }
  if (!doc.contains("format_version") ||
      doc["format_version"].get<int>() != kFormatVersion)
    throw std::runtime_error("model json: unsupported format_version");

  LoadedModel out;
  out.model.dimension = doc.at("dimension").get<std::size_t>();
  out.model.num_classes = doc.at("num_classes").get<int>();
  for (const auto& row : doc.at("weights")) {
    Halfspace w;
    w.weights.reserve(row.size());
    for (const auto& v : row)
      w.weights.push_back(parse_hex_float(v.get<std::string>()));
    if (w.weights.size() != out.model.dimension)
      throw std::runtime_error("model json: weight row has wrong dimension");
    out.model.class_weights.push_back(std::move(w));
  }
  if (static_cast<int>(out.model.class_weights.size()) != out.model.num_classes)
    throw std::runtime_error("model json: class count mismatch");

  if (doc.contains("kernel")) {
    const auto& k = doc["kernel"];
    out.model.kernel = KernelRef{k.at("input_dim").get<std::size_t>(),
                                 k.at("d_hat").get<std::size_t>(),
                                 k.at("sigma_hat").get<double>(),
                                 k.at("seed").get<std::uint64_t>()};
  }
  if (doc.contains("training")) {
    const auto& t = doc["training"];
    out.meta.algo = t.value("algo", "");
    out.meta.digest = t.value("digest", "");
    out.meta.preprocessing_mode = t.value("mode", "pixel");
    if (t.contains("scale"))
      out.meta.unit_ball_scale = parse_hex_float(t["scale"].get<std::string>());
    out.model.training_digest = out.meta.digest;
  }
  return out;
}

std::string config_digest(const std::string& canonical_config) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : canonical_config) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace dphalf
