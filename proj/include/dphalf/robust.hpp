#pragma once

#include <iosfwd>
#include <vector>

#include "dphalf/kernel.hpp"
#include "dphalf/trainers.hpp"

namespace dphalf {

struct RobustCurve {
  std::vector<double> gammas;      // strictly increasing
  std::vector<double> accuracies;  // non-increasing
};

// Caches the K(K-1)/2 pairwise weight-difference norms (and, for kernel
// models, sqrt(d_hat)/sigma_max(Pi)) so per-example radii are cheap over
// large test sets.
class RadiusEvaluator {
 public:
  explicit RadiusEvaluator(const MulticlassModel& model,
                           const FourierFeatureMap* map = nullptr);

  // Certified L2 radius of (x, y_true): exact for linear models, a sound
  // lower bound for kernel models. Negative iff the point is classified
  // wrong by the margin rule; an exact score tie (identical class
  // weights) contributes 0.
  double radius(const FeatureVector& x, int y_true) const;

  double kernel_multiplier() const { return multiplier_; }

 private:
  const MulticlassModel& model_;
  const FourierFeatureMap* map_;
  std::vector<double> pair_norm_;  // K*K, ||w^(y) - w^(y')||
  double multiplier_ = 1.0;
};

// min over y' != y of <w^(y) - w^(y'), x> / ||w^(y) - w^(y')||.
double certified_radius_linear(const MulticlassModel& model,
                               const FeatureVector& x, int y_true);

// (sqrt(d_hat) / sigma_max(Pi)) * min over y' != y of
// <w^(y) - w^(y'), phi(x)> / ||w^(y) - w^(y')||.
double certified_radius_kernel(const MulticlassModel& model,
                               const FourierFeatureMap& map,
                               const FeatureVector& x, int y_true);

// Radii of every test example, in order.
std::vector<double> per_example_radii(const MulticlassModel& model,
                                      const MulticlassDataset& test,
                                      const FourierFeatureMap* map = nullptr);

// Robust accuracy at each gamma: the fraction of examples whose certified
// radius strictly exceeds gamma. Radii are computed once and reused.
RobustCurve robust_accuracy_curve(const MulticlassModel& model,
                                  const MulticlassDataset& test,
                                  const std::vector<double>& gammas,
                                  const FourierFeatureMap* map = nullptr);

// CSV with header `gamma,robust_accuracy`, shortest round-trip decimals.
void write_curve_csv(const RobustCurve& curve, std::ostream& out);

// CSV with header `index,true_class,predicted_class,radius`.
void write_radii_csv(const MulticlassModel& model,
                     const MulticlassDataset& test,
                     const std::vector<double>& radii,
                     const FourierFeatureMap* map, std::ostream& out);

}  // namespace dphalf
