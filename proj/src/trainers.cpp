#include "dphalf/trainers.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <stdexcept>

namespace dphalf {

namespace {

Halfspace unit_or_first_basis(const std::vector<double>& w, std::size_t d,
                              bool* degenerate) {
  if (is_zero(w)) {
    *degenerate = true;
    std::vector<double> e1(d, 0.0);
    e1[0] = 1.0;
    return Halfspace{std::move(e1)};
  }
  return Halfspace{normalized(w)};
}

}  // namespace

TrainOutcome dp_batch_perceptron(const Dataset& data,
                                 const PerceptronConfig& cfg, SeededRng& rng) {
  if (data.size() == 0)
    throw std::invalid_argument("dp_batch_perceptron: empty dataset");
  for (const LabeledExample& ex : data.examples)
    if (ex.x.size() != data.dimension)
      throw std::invalid_argument("dp_batch_perceptron: dimension mismatch");
  if (!(cfg.p > 0 && cfg.p <= 1))
    throw std::invalid_argument("dp_batch_perceptron: p out of (0,1]");
  if (cfg.iterations < 1)
    throw std::invalid_argument("dp_batch_perceptron: T < 1");
  if (cfg.sigma < 0 || !(cfg.b > 0) || cfg.gamma_prime < 0)
    throw std::invalid_argument("dp_batch_perceptron: bad noise parameters");

  const std::size_t d = data.dimension;
  const std::size_t n = data.size();
  const double stop_threshold =
      0.3 * cfg.alpha * cfg.p * static_cast<double>(n);
  const bool early_stop = cfg.mode == PerceptronMode::kEarlyStop;

  TrainOutcome out;
  std::vector<double> w(d, 0.0);
  double w_norm = 0.0;

  for (std::int64_t i = 1; i <= cfg.iterations; ++i) {
    // (a) Poisson batch; (b) margin mistakes against w_{i-1}/||w_{i-1}||,
    // with the zero vector scoring 0 on every example.
    std::vector<double> update(d, 0.0);
    std::int64_t mistakes = 0;
    for (const LabeledExample& ex : data.examples) {
      if (cfg.p < 1.0 && !rng.bernoulli(cfg.p)) continue;
      const double score =
          w_norm == 0.0 ? 0.0 : dot(w, ex.x) / w_norm;
      if (!(static_cast<double>(ex.label) * score > cfg.gamma_prime)) {
        ++mistakes;
        for (std::size_t j = 0; j < d; ++j)
          update[j] += static_cast<double>(ex.label) * ex.x[j];
      }
    }
    out.mistake_counts.push_back(mistakes);

    if (early_stop) {
      const double nu =
          std::isinf(cfg.b) ? 0.0 : sample_laplace(cfg.b, rng);
      const double noisy = static_cast<double>(mistakes) + nu;
      out.noisy_counts.push_back(noisy);
      if (noisy < stop_threshold) {
        out.stop_iteration = i;
        out.weights = unit_or_first_basis(w, d, &out.degenerate_stop);
        return out;
      }
    }

    if (cfg.sigma > 0) {
      for (std::size_t j = 0; j < d; ++j)
        update[j] += cfg.sigma * rng.gaussian();
    }
    for (std::size_t j = 0; j < d; ++j) w[j] += update[j];
    w_norm = norm(w);
  }

  if (early_stop) return out;  // FAIL: no weights
  out.weights = unit_or_first_basis(w, d, &out.degenerate_stop);
  return out;
}

std::size_t exponential_mechanism_select(const std::vector<Halfspace>& candidates,
                                         const Dataset& data, double gamma,
                                         double epsilon, SeededRng& rng) {
  if (candidates.empty())
    throw std::invalid_argument("exponential_mechanism_select: no candidates");
  if (data.size() == 0)
    throw std::invalid_argument("exponential_mechanism_select: empty dataset");
  const double n = static_cast<double>(data.size());
  std::size_t best = 0;
  double best_key = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < candidates.size(); ++j) {
    const double score = -n * margin_error(candidates[j], data, 0.95 * gamma);
    const double key = 0.5 * epsilon * score + rng.gumbel();
    if (key > best_key) {
      best_key = key;
      best = j;
    }
  }
  return best;
}

Halfspace exponential_mechanism_learner(const Dataset& data, double gamma,
                                        double epsilon,
                                        std::size_t num_candidates,
                                        SeededRng& rng) {
  if (num_candidates == 0)
    throw std::invalid_argument("exponential_mechanism_learner: no candidates");
  std::vector<Halfspace> candidates;
  candidates.reserve(num_candidates);
  for (std::size_t j = 0; j < num_candidates; ++j) {
    std::vector<double> v(data.dimension);
    for (double& c : v) c = rng.gaussian();
    if (is_zero(v)) v[0] = 1.0;  // unreachable in practice
    candidates.push_back(Halfspace{normalized(v)});
  }
  return candidates[exponential_mechanism_select(candidates, data, gamma,
                                                 epsilon, rng)];
}

double hinge_loss(const std::vector<double>& z, const FeatureVector& x,
                  int label, double gamma) {
  if (!(gamma > 0)) throw std::invalid_argument("hinge_loss: gamma <= 0");
  const double m = static_cast<double>(label) * dot(z, x);
  if (m >= gamma) return 0.0;
  return (gamma - m) / (0.1 * gamma);
}

std::vector<double> hinge_gradient(const std::vector<double>& z,
                                   const FeatureVector& x, int label,
                                   double gamma) {
  if (!(gamma > 0)) throw std::invalid_argument("hinge_gradient: gamma <= 0");
  const double m = static_cast<double>(label) * dot(z, x);
  std::vector<double> g(z.size(), 0.0);
  if (m >= gamma) return g;
  const double c = -static_cast<double>(label) / (0.1 * gamma);
  for (std::size_t j = 0; j < x.size(); ++j) g[j] = c * x[j];
  return g;
}

std::vector<double> clip_to_unit(std::vector<double> v) {
  const double n = norm(v);
  if (n > 1.0)
    for (double& c : v) c /= n;
  return v;
}

std::int64_t dp_sgd_steps(const DpSgdHingeConfig& cfg) {
  if (!(cfg.sample_rate > 0 && cfg.sample_rate <= 1))
    throw std::invalid_argument("dp_sgd_hinge: sample rate out of (0,1]");
  if (cfg.epochs < 1) throw std::invalid_argument("dp_sgd_hinge: epochs < 1");
  return cfg.epochs * static_cast<std::int64_t>(std::ceil(1.0 / cfg.sample_rate));
}

Halfspace dp_sgd_hinge(const Dataset& data, const DpSgdHingeConfig& cfg,
                       SeededRng& rng) {
  if (data.size() == 0) throw std::invalid_argument("dp_sgd_hinge: empty dataset");
  if (!(cfg.gamma > 0)) throw std::invalid_argument("dp_sgd_hinge: gamma <= 0");
  if (cfg.lambda_reg < 0)
    throw std::invalid_argument("dp_sgd_hinge: negative regularization");

  const std::size_t d = data.dimension;
  const std::size_t n = data.size();
  const double q = cfg.sample_rate;
  const std::int64_t steps = dp_sgd_steps(cfg);
  const double sigma =
      std::isinf(cfg.epsilon)
          ? 0.0
          : calibrate_sigma(cfg.epsilon, cfg.delta, q,
                            static_cast<std::uint64_t>(steps));

  std::vector<double> z(d, 0.0);
  const double denom = q * static_cast<double>(n);
  for (std::int64_t t = 0; t < steps; ++t) {
    std::vector<double> sum(d, 0.0);
    for (const LabeledExample& ex : data.examples) {
      if (q < 1.0 && !rng.bernoulli(q)) continue;
      const std::vector<double> g =
          clip_to_unit(hinge_gradient(z, ex.x, ex.label, cfg.gamma));
      for (std::size_t j = 0; j < d; ++j) sum[j] += g[j];
    }
    if (sigma > 0)
      for (std::size_t j = 0; j < d; ++j) sum[j] += sigma * rng.gaussian();
    for (std::size_t j = 0; j < d; ++j)
      z[j] -= cfg.learning_rate * (sum[j] / denom + 2.0 * cfg.lambda_reg * z[j]);
  }
  return Halfspace{std::move(z)};
}

Dataset to_binary(const MulticlassDataset& data, int positive_class) {
  Dataset out;
  out.dimension = data.dimension;
  out.examples.reserve(data.size());
  for (std::size_t i = 0; i < data.size(); ++i)
    out.examples.push_back(
        LabeledExample{data.points[i], data.labels[i] == positive_class ? 1 : -1});
  return out;
}

OneVsRestResult train_one_vs_rest(const MulticlassDataset& data,
                                  const TrainerSpec& trainer, SeededRng& rng,
                                  unsigned threads) {
  if (data.num_classes < 2)
    throw std::invalid_argument("train_one_vs_rest: need at least 2 classes");
  if (data.size() == 0)
    throw std::invalid_argument("train_one_vs_rest: empty dataset");

  const int k = data.num_classes;
  OneVsRestResult result;
  result.model.dimension = data.dimension;
  result.model.num_classes = k;
  result.model.class_weights.resize(k);
  result.per_class.resize(k);

  const auto train_class = [&](int y) {
    const Dataset binary = to_binary(data, y);
    SeededRng class_rng = rng.child(static_cast<std::uint64_t>(y));
    if (const auto* cfg = std::get_if<PerceptronConfig>(&trainer)) {
      TrainOutcome outcome = dp_batch_perceptron(binary, *cfg, class_rng);
      if (!outcome.failed()) result.model.class_weights[y] = *outcome.weights;
      result.per_class[y] = std::move(outcome);
    } else if (const auto* sgd = std::get_if<DpSgdHingeConfig>(&trainer)) {
      result.model.class_weights[y] = dp_sgd_hinge(binary, *sgd, class_rng);
    } else {
      const auto& em = std::get<ExpMechConfig>(trainer);
      result.model.class_weights[y] = exponential_mechanism_learner(
          binary, em.gamma, em.epsilon, em.num_candidates, class_rng);
    }
  };

  if (threads <= 1) {
    for (int y = 0; y < k; ++y) train_class(y);
  } else {
    std::vector<std::future<void>> jobs;
    for (int y = 0; y < k; ++y)
      jobs.push_back(std::async(std::launch::async, train_class, y));
    for (auto& j : jobs) j.get();
  }

  std::string failed;
  for (int y = 0; y < k; ++y)
    if (std::holds_alternative<PerceptronConfig>(trainer) &&
        result.per_class[y].failed())
      failed += (failed.empty() ? "" : ", ") + std::to_string(y);
  if (!failed.empty())
    throw std::runtime_error("train_one_vs_rest: training failed for class " +
                             failed);
  return result;
}

int predict(const MulticlassModel& model, const FeatureVector& x,
            const FourierFeatureMap* map) {
  const FeatureVector* phi = &x;
  std::vector<double> embedded;
  if (map != nullptr) {
    embedded = embed(*map, x);
    phi = &embedded;
  }
  if (phi->size() != model.dimension)
    throw std::invalid_argument("predict: dimension mismatch");
  int best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (int y = 0; y < model.num_classes; ++y) {
    const double s = dot(model.class_weights[y].weights, *phi);
    if (s > best_score) {
      best_score = s;
      best = y;
    }
  }
  return best;
}

const Halfspace& boost_select(const std::vector<Halfspace>& candidates,
                              const Dataset& holdout, double gamma) {
  if (candidates.empty())
    throw std::invalid_argument("boost_select: no candidates");
  std::size_t best = 0;
  double best_err = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const double err = margin_error(candidates[i], holdout, gamma);
    if (err < best_err) {
      best_err = err;
      best = i;
    }
  }
  return candidates[best];
}

}  // namespace dphalf
