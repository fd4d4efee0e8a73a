#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "dphalf/core.hpp"
#include "dphalf/kernel.hpp"
#include "dphalf/privacy.hpp"
#include "dphalf/rng.hpp"

namespace dphalf {

enum class PerceptronMode { kEarlyStop, kFixedT };

struct PerceptronConfig {
  double gamma_prime = 0;   // training margin
  double p = 1;             // Poisson subsampling rate
  std::int64_t iterations = 1;  // T
  // Laplace scale for the stopping count; +inf means "nu == 0", accepted
  // for noiseless tests only (the CLI refuses it under a privacy budget).
  double b = std::numeric_limits<double>::infinity();
  double sigma = 0;         // Gaussian std per coordinate
  double alpha = 0.5;       // target accuracy, drives the stop threshold
  PerceptronMode mode = PerceptronMode::kEarlyStop;
  std::uint64_t seed = 0;
};

struct TrainOutcome {
  std::optional<Halfspace> weights;  // empty == FAIL (early-stop mode only)
  std::optional<std::int64_t> stop_iteration;
  std::vector<std::int64_t> mistake_counts;  // |M_i| per executed iteration
  std::vector<double> noisy_counts;          // |M_i| + nu_i (early-stop mode)
  // Set when the stop fired with a zero weight vector, which is replaced
  // by the first standard basis vector.
  bool degenerate_stop = false;

  bool failed() const { return !weights.has_value(); }
};

struct MulticlassDataset {
  std::vector<FeatureVector> points;
  std::vector<int> labels;  // 0 .. num_classes-1
  int num_classes = 0;
  std::size_t dimension = 0;

  std::size_t size() const { return points.size(); }
};

// Identifies a feature map by the data needed to regenerate it.
struct KernelRef {
  std::size_t input_dim = 0;
  std::size_t d_hat = 0;
  double sigma_hat = 1;
  std::uint64_t seed = 0;
};

struct MulticlassModel {
  std::vector<Halfspace> class_weights;  // w^(0..K-1)
  std::size_t dimension = 0;
  int num_classes = 0;
  std::optional<KernelRef> kernel;
  std::string training_digest;
};

// ---- trainers ---------------------------------------------------------

// Subsampled, noised batch margin perceptron. Per iteration: Poisson
// batch S_i, margin-mistake set M_i against w_{i-1}/||w_{i-1}|| (the zero
// vector scores 0 on everything), Laplace-noised early stop when
// |M_i| + nu_i < 0.3 alpha p n, update w_i = w_{i-1} + sum y x + N(0, sigma^2 I).
// kFixedT skips the stop check and the Laplace draw entirely and returns
// w_T / ||w_T||; kEarlyStop returns FAIL after T iterations without a stop.
// Inputs are expected to lie in the unit ball for the privacy accounting
// to apply at sensitivity 1; the function itself does not reject larger
// vectors (pixel-space training runs this way on purpose).
TrainOutcome dp_batch_perceptron(const Dataset& data,
                                 const PerceptronConfig& cfg, SeededRng& rng);

// Index into `candidates` drawn with probability proportional to
// exp((epsilon/2) * -n * margin_error(candidate, data, 0.95 gamma)),
// via Gumbel-max over the log-weights.
std::size_t exponential_mechanism_select(const std::vector<Halfspace>& candidates,
                                         const Dataset& data, double gamma,
                                         double epsilon, SeededRng& rng);

// Draws num_candidates random unit vectors and selects one with the
// exponential mechanism.
Halfspace exponential_mechanism_learner(const Dataset& data, double gamma,
                                        double epsilon,
                                        std::size_t num_candidates,
                                        SeededRng& rng);

// Margin hinge loss: 0 if y<z,x> >= gamma, else (gamma - y<z,x>) / (0.1 gamma).
double hinge_loss(const std::vector<double>& z, const FeatureVector& x,
                  int label, double gamma);
// Gradient of the loss in z (zero or -(1/(0.1 gamma)) y x), unclipped.
std::vector<double> hinge_gradient(const std::vector<double>& z,
                                   const FeatureVector& x, int label,
                                   double gamma);
// v scaled down to Euclidean norm at most 1.
std::vector<double> clip_to_unit(std::vector<double> v);

struct DpSgdHingeConfig {
  double gamma = 0.1;        // hinge margin
  // +inf epsilon means no noise (sigma = 0), used for baselines.
  double epsilon = std::numeric_limits<double>::infinity();
  double delta = 1e-5;
  double sample_rate = 1;    // Poisson batch rate q
  double learning_rate = 0.1;
  double lambda_reg = 0;
  std::int64_t epochs = 1;
};

// Total iteration count epochs * ceil(1/q); shared with the accountant.
std::int64_t dp_sgd_steps(const DpSgdHingeConfig& cfg);

// DP-SGD on the margin hinge loss with per-example clipping at norm 1,
// Gaussian noise calibrated by the RDP accountant, and L2 regularization
// applied to the averaged update outside clipping. Returns the final
// iterate, unnormalized.
Halfspace dp_sgd_hinge(const Dataset& data, const DpSgdHingeConfig& cfg,
                       SeededRng& rng);

struct ExpMechConfig {
  double gamma = 0.1;
  double epsilon = 1;
  std::size_t num_candidates = 4096;
};

using TrainerSpec = std::variant<PerceptronConfig, DpSgdHingeConfig, ExpMechConfig>;

// Binary view of one class: label +1 iff class == positive_class.
Dataset to_binary(const MulticlassDataset& data, int positive_class);

struct OneVsRestResult {
  MulticlassModel model;
  // Perceptron diagnostics per class; empty for other trainers.
  std::vector<TrainOutcome> per_class;
};

// Trains one halfspace per class on the relabeled data. Class y trains
// with the child generator rng.child(y), so runs are reproducible bitwise
// and classes may train concurrently (threads > 1 keeps outputs
// order-fixed). Throws std::runtime_error naming the classes whose
// early-stop perceptron returned FAIL.
OneVsRestResult train_one_vs_rest(const MulticlassDataset& data,
                                  const TrainerSpec& trainer, SeededRng& rng,
                                  unsigned threads = 1);

// argmax_y <w^(y), phi(x)>, ties toward the smallest class index.
int predict(const MulticlassModel& model, const FeatureVector& x,
            const FourierFeatureMap* map = nullptr);

// Candidate minimizing the holdout margin error, ties toward the earliest.
const Halfspace& boost_select(const std::vector<Halfspace>& candidates,
                              const Dataset& holdout, double gamma);

}  // namespace dphalf
