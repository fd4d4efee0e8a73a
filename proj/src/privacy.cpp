#include "dphalf/privacy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace dphalf {

namespace {

double log_sum_exp(const std::vector<double>& log_terms) {
  double m = -std::numeric_limits<double>::infinity();
  for (double t : log_terms) m = std::max(m, t);
  if (std::isinf(m) && m < 0) return m;  // all terms are zero
  double s = 0;
  for (double t : log_terms) s += std::exp(t - m);
  return m + std::log(s);
}

double log_binomial(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

}  // namespace

std::vector<double> sample_gaussian_vector(std::size_t d, double sigma,
                                           SeededRng& rng) {
  if (d == 0) throw std::invalid_argument("sample_gaussian_vector: d == 0");
  if (sigma < 0) throw std::invalid_argument("sample_gaussian_vector: sigma < 0");
  std::vector<double> out(d, 0.0);
  if (sigma == 0.0) return out;
  for (std::size_t i = 0; i < d; ++i) out[i] = sigma * rng.gaussian();
  return out;
}

double sample_laplace(double b, SeededRng& rng) {
  if (!(b > 0)) throw std::invalid_argument("sample_laplace: b <= 0");
  return rng.laplace(b);
}

PrivacyBudget advanced_composition(double eps0, double delta0,
                                   std::uint64_t T) {
  if (!(eps0 > 0 && eps0 < 1))
    throw std::invalid_argument("advanced_composition: eps0 out of (0,1)");
  if (!(delta0 > 0 && delta0 < 1))
    throw std::invalid_argument("advanced_composition: delta0 out of (0,1)");
  const double t = static_cast<double>(T);
  return PrivacyBudget{
      std::sqrt(2.0 * t * std::log(1.0 / delta0)) * eps0 + 2.0 * t * eps0 * eps0,
      (t + 1.0) * delta0};
}

PrivacyBudget amplify_by_subsampling(double eps0, double delta0, double p) {
  if (!(eps0 > 0 && eps0 < 1))
    throw std::invalid_argument("amplify_by_subsampling: eps0 out of (0,1)");
  if (!(delta0 > 0 && delta0 < 1))
    throw std::invalid_argument("amplify_by_subsampling: delta0 out of (0,1)");
  if (!(p >= 0 && p <= 1))
    throw std::invalid_argument("amplify_by_subsampling: p out of [0,1]");
  return PrivacyBudget{2.0 * p * eps0, p * delta0};
}

NoiseParameters prescribed_noise_parameters(double epsilon, double delta,
                                       std::uint64_t T) {
  // The closed forms are well defined for any epsilon > 0; the DP
  // composition chain additionally needs epsilon in (0,1), which
  // perceptron_privacy_check enforces.
  if (!(epsilon > 0))
    throw std::invalid_argument("prescribed_noise_parameters: epsilon <= 0");
  if (!(delta > 0 && delta < 1))
    throw std::invalid_argument("prescribed_noise_parameters: delta out of (0,1)");
  if (T == 0) throw std::invalid_argument("prescribed_noise_parameters: T == 0");
  const double t = static_cast<double>(T);
  const double log_t_delta = std::log(t / delta);
  return NoiseParameters{100.0 * log_t_delta / epsilon,
                         100.0 * std::sqrt(log_t_delta) / epsilon,
                         1.0 / std::sqrt(t)};
}

std::pair<NoiseParameters, PrivacyBudget> perceptron_privacy_check(
    double epsilon, double delta, std::uint64_t T) {
  if (!(epsilon > 0 && epsilon < 1))
    throw std::invalid_argument("perceptron_privacy_check: epsilon out of (0,1)");
  const NoiseParameters noise = prescribed_noise_parameters(epsilon, delta, T);
  const double t = static_cast<double>(T);
  const double eps0 = epsilon / (20.0 * std::sqrt(std::log(t / delta)));
  const double delta0 = delta / (2.0 * std::sqrt(t));
  const PrivacyBudget per_iteration =
      amplify_by_subsampling(eps0, delta0, noise.p);
  const PrivacyBudget composed =
      advanced_composition(per_iteration.epsilon, per_iteration.delta, T);
  if (composed.epsilon > epsilon || composed.delta > delta)
    throw std::logic_error(
        "perceptron_privacy_check: composed budget exceeds target");
  return {noise, composed};
}

double rdp_subsampled_gaussian(double q, double sigma, int order) {
  if (!(q >= 0 && q <= 1))
    throw std::invalid_argument("rdp_subsampled_gaussian: q out of [0,1]");
  if (!(sigma > 0))
    throw std::invalid_argument("rdp_subsampled_gaussian: sigma <= 0");
  if (order < 2)
    throw std::invalid_argument("rdp_subsampled_gaussian: order < 2");
  if (q == 0) return 0.0;

  const double log_q = std::log(q);
  const double log_1mq = q < 1 ? std::log1p(-q) : -std::numeric_limits<double>::infinity();
  std::vector<double> log_terms;
  log_terms.reserve(order + 1);
  for (int k = 0; k <= order; ++k) {
    if (q == 1.0 && k < order) continue;  // (1-q)^(order-k) vanishes
    double t = log_binomial(order, k) + k * log_q +
               (order - k) * (k == order ? 0.0 : log_1mq) +
               0.5 * k * (k - 1.0) / (sigma * sigma);
    log_terms.push_back(t);
  }
  return log_sum_exp(log_terms) / (order - 1.0);
}

RdpCurve subsampled_gaussian_curve(double q, double sigma, int min_order,
                                   int max_order) {
  if (min_order < 2 || max_order < min_order)
    throw std::invalid_argument("subsampled_gaussian_curve: bad order range");
  RdpCurve curve;
  for (int a = min_order; a <= max_order; ++a) {
    curve.orders.push_back(a);
    curve.values.push_back(rdp_subsampled_gaussian(q, sigma, a));
  }
  return curve;
}

RdpCurve compose_rdp(const RdpCurve& curve, std::uint64_t T) {
  RdpCurve out = curve;
  for (double& v : out.values) v *= static_cast<double>(T);
  return out;
}

RdpEpsilon rdp_to_eps(const RdpCurve& curve, double delta) {
  if (curve.orders.empty())
    throw std::invalid_argument("rdp_to_eps: empty curve");
  if (curve.orders.size() != curve.values.size())
    throw std::invalid_argument("rdp_to_eps: orders/values size mismatch");
  if (!(delta > 0 && delta < 1))
    throw std::invalid_argument("rdp_to_eps: delta out of (0,1)");
  const double log_inv_delta = std::log(1.0 / delta);
  RdpEpsilon best{std::numeric_limits<double>::infinity(), 0};
  for (std::size_t i = 0; i < curve.orders.size(); ++i) {
    const double eps = curve.values[i] + log_inv_delta / (curve.orders[i] - 1.0);
    if (eps < best.epsilon) best = RdpEpsilon{eps, curve.orders[i]};
  }
  return best;
}

double calibrate_sigma(double epsilon, double delta, double q,
                       std::uint64_t T) {
  if (!(epsilon > 0)) throw std::invalid_argument("calibrate_sigma: epsilon <= 0");
  if (!(delta > 0 && delta < 1))
    throw std::invalid_argument("calibrate_sigma: delta out of (0,1)");
  if (!(q > 0 && q <= 1))
    throw std::invalid_argument("calibrate_sigma: q out of (0,1]");
  if (T == 0) throw std::invalid_argument("calibrate_sigma: T == 0");

  const auto accountant_eps = [&](double sigma) {
    return rdp_to_eps(compose_rdp(subsampled_gaussian_curve(q, sigma), T), delta)
        .epsilon;
  };

  double lo = 0.3, hi = 1e6;
  double eps_lo = accountant_eps(lo);
  if (eps_lo <= epsilon) return lo;  // already private at the bracket floor
  double eps_hi = accountant_eps(hi);
  if (eps_hi > epsilon)
    throw CalibrationError(
        "calibrate_sigma: budget unreachable within sigma in [0.3, 1e6]");

  for (int iter = 0; iter < 60 && (hi - lo) > 1e-3 * hi; ++iter) {
    const double mid = 0.5 * (lo + hi);
    const double eps_mid = accountant_eps(mid);
    // The accountant must be monotone non-increasing in sigma.
    if (eps_mid > eps_lo * (1 + 1e-12) || eps_mid < eps_hi * (1 - 1e-12))
      throw std::logic_error("calibrate_sigma: accountant non-monotone in sigma");
    if (eps_mid <= epsilon) {
      hi = mid;
      eps_hi = eps_mid;
    } else {
      lo = mid;
      eps_lo = eps_mid;
    }
  }
  return hi;
}

}  // namespace dphalf
