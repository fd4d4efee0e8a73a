#include "dphalf/robust.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

namespace dphalf {

namespace {

// Shortest decimal that round-trips to the same double.
std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

RadiusEvaluator::RadiusEvaluator(const MulticlassModel& model,
                                 const FourierFeatureMap* map)
    : model_(model), map_(map) {
  const int k = model.num_classes;
  if (k < 2) throw std::invalid_argument("RadiusEvaluator: need K >= 2");
  if (map_ != nullptr) {
    if (map_->embedded_dim() != model.dimension)
      throw std::invalid_argument(
          "RadiusEvaluator: model not trained in this map's embedded space");
    multiplier_ = std::sqrt(static_cast<double>(map_->num_frequencies())) /
                  operator_norm(*map_);
  }
  pair_norm_.assign(static_cast<std::size_t>(k) * k, 0.0);
  for (int a = 0; a < k; ++a) {
    for (int b = a + 1; b < k; ++b) {
      double sq = 0;
      const auto& wa = model.class_weights[a].weights;
      const auto& wb = model.class_weights[b].weights;
      for (std::size_t j = 0; j < wa.size(); ++j) {
        const double d = wa[j] - wb[j];
        sq += d * d;
      }
      const double n = std::sqrt(sq);
      pair_norm_[a * k + b] = n;
      pair_norm_[b * k + a] = n;
    }
  }
}

double RadiusEvaluator::radius(const FeatureVector& x, int y_true) const {
  const int k = model_.num_classes;
  if (y_true < 0 || y_true >= k)
    throw std::invalid_argument("RadiusEvaluator: class out of range");

  const FeatureVector* phi = &x;
  std::vector<double> embedded;
  if (map_ != nullptr) {
    embedded = embed(*map_, x);
    phi = &embedded;
  }
  if (phi->size() != model_.dimension)
    throw std::invalid_argument("RadiusEvaluator: dimension mismatch");

  const double score_true = dot(model_.class_weights[y_true].weights, *phi);
  double best = std::numeric_limits<double>::infinity();
  for (int y = 0; y < k; ++y) {
    if (y == y_true) continue;
    const double denom = pair_norm_[y_true * k + y];
    // Identical weights: zero numerator over zero denominator counts as 0.
    const double term =
        denom == 0.0
            ? 0.0
            : (score_true - dot(model_.class_weights[y].weights, *phi)) / denom;
    best = std::min(best, term);
  }
  return multiplier_ * best;
}

double certified_radius_linear(const MulticlassModel& model,
                               const FeatureVector& x, int y_true) {
  return RadiusEvaluator(model).radius(x, y_true);
}

double certified_radius_kernel(const MulticlassModel& model,
                               const FourierFeatureMap& map,
                               const FeatureVector& x, int y_true) {
  return RadiusEvaluator(model, &map).radius(x, y_true);
}

std::vector<double> per_example_radii(const MulticlassModel& model,
                                      const MulticlassDataset& test,
                                      const FourierFeatureMap* map) {
  const RadiusEvaluator eval(model, map);
  std::vector<double> radii(test.size());
  for (std::size_t i = 0; i < test.size(); ++i)
    radii[i] = eval.radius(test.points[i], test.labels[i]);
  return radii;
}

RobustCurve robust_accuracy_curve(const MulticlassModel& model,
                                  const MulticlassDataset& test,
                                  const std::vector<double>& gammas,
                                  const FourierFeatureMap* map) {
  if (test.size() == 0)
    throw std::invalid_argument("robust_accuracy_curve: empty test set");
  for (std::size_t i = 0; i < gammas.size(); ++i) {
    if (gammas[i] < 0)
      throw std::invalid_argument("robust_accuracy_curve: negative gamma");
    if (i > 0 && !(gammas[i] > gammas[i - 1]))
      throw std::invalid_argument(
          "robust_accuracy_curve: gammas not strictly increasing");
  }
  const std::vector<double> radii = per_example_radii(model, test, map);
  RobustCurve curve;
  curve.gammas = gammas;
  curve.accuracies.reserve(gammas.size());
  for (double g : gammas) {
    std::size_t robust = 0;
    for (double r : radii)
      if (r > g) ++robust;
    curve.accuracies.push_back(static_cast<double>(robust) /
                               static_cast<double>(test.size()));
  }
  return curve;
}

void write_curve_csv(const RobustCurve& curve, std::ostream& out) {
  out << "gamma,robust_accuracy\n";
  for (std::size_t i = 0; i < curve.gammas.size(); ++i)
    out << format_double(curve.gammas[i]) << ','
        << format_double(curve.accuracies[i]) << '\n';
}

void write_radii_csv(const MulticlassModel& model,
                     const MulticlassDataset& test,
                     const std::vector<double>& radii,
                     const FourierFeatureMap* map, std::ostream& out) {
  out << "index,true_class,predicted_class,radius\n";
  for (std::size_t i = 0; i < test.size(); ++i)
    out << i << ',' << test.labels[i] << ','
        << predict(model, test.points[i], map) << ','
        << format_double(radii[i]) << '\n';
}

}  // namespace dphalf
