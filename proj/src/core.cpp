#include "dphalf/core.hpp"

#include <cmath>
#include <stdexcept>

#include "dphalf/privacy.hpp"

namespace dphalf {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("dot: dimension mismatch");
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double squared_norm(const std::vector<double>& v) {
  double s = 0;
  for (double c : v) s += c * c;
  return s;
}

double norm(const std::vector<double>& v) { return std::sqrt(squared_norm(v)); }

bool is_zero(const std::vector<double>& v) {
  for (double c : v)
    if (c != 0.0) return false;
  return true;
}

std::vector<double> normalized(const std::vector<double>& v) {
  const double n = norm(v);
  if (n == 0.0) throw std::invalid_argument("normalized: zero vector");
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] / n;
  return out;
}

double margin_error(const Halfspace& w, const Dataset& data, double gamma) {
  if (data.size() == 0) throw std::invalid_argument("margin_error: empty dataset");
  if (w.dimension() != data.dimension)
    throw std::invalid_argument("margin_error: dimension mismatch");
  if (gamma < 0) throw std::invalid_argument("margin_error: gamma < 0");
  std::size_t mistakes = 0;
  for (const LabeledExample& ex : data.examples) {
    const double m = static_cast<double>(ex.label) * dot(w.weights, ex.x);
    if (!(m > gamma)) ++mistakes;
  }
  return static_cast<double>(mistakes) / static_cast<double>(data.size());
}

double robust_risk(const Halfspace& w, const Dataset& data, double gamma) {
  if (is_zero(w.weights))
    throw std::invalid_argument("robust_risk: zero weight vector");
  return margin_error(Halfspace{normalized(w.weights)}, data, gamma);
}

double generalization_gap(std::size_t n, double gamma_hat, double xi) {
  if (n == 0) throw std::invalid_argument("generalization_gap: n == 0");
  if (!(gamma_hat > 0 && gamma_hat <= 1))
    throw std::invalid_argument("generalization_gap: gamma_hat out of (0,1]");
  if (!(xi > 0 && xi < 1))
    throw std::invalid_argument("generalization_gap: xi out of (0,1)");
  return 400.0 * std::sqrt(std::log(4.0 / xi) /
                           (static_cast<double>(n) * gamma_hat * gamma_hat));
}

double generalization_gap_covering_log(std::size_t n, double gamma_hat,
                                       double gamma_hat_prime, double eta,
                                       double alpha_prime) {
  if (!(gamma_hat > gamma_hat_prime && gamma_hat_prime > 0))
    throw std::invalid_argument(
        "generalization_gap_covering: need gamma_hat > gamma_hat_prime > 0");
  if (!(eta > 0))
    throw std::invalid_argument("generalization_gap_covering: eta <= 0");
  if (!(alpha_prime > 0 && alpha_prime < 0.5))
    throw std::invalid_argument(
        "generalization_gap_covering: alpha_prime out of (0, 0.5)");
  const double gap = gamma_hat - gamma_hat_prime;
  const double nn = static_cast<double>(n);
  const double cover_term = (36.0 / (gap * gap)) * std::log(20.0 * nn / gap);
  const double deviation_term =
      eta * eta * alpha_prime * nn / (4.0 * (1.0 + eta) * (1.0 + eta));
  return std::log(4.0) + cover_term - deviation_term;
}

double generalization_gap_covering(std::size_t n, double gamma_hat,
                                   double gamma_hat_prime, double eta,
                                   double alpha_prime) {
  return std::exp(generalization_gap_covering_log(n, gamma_hat,
                                                  gamma_hat_prime, eta,
                                                  alpha_prime));
}

TheoreticalPrescription prescribed_parameters(double epsilon, double delta,
                                              double alpha, double gamma,
                                              std::size_t d) {
  if (!(epsilon > 0)) throw std::invalid_argument("prescribed_parameters: epsilon <= 0");
  if (!(delta > 0 && delta < 1))
    throw std::invalid_argument("prescribed_parameters: delta out of (0,1)");
  if (!(alpha > 0 && alpha < 1))
    throw std::invalid_argument("prescribed_parameters: alpha out of (0,1)");
  if (!(gamma > 0 && gamma < 1))
    throw std::invalid_argument("prescribed_parameters: gamma out of (0,1)");
  if (d == 0) throw std::invalid_argument("prescribed_parameters: d == 0");

  TheoreticalPrescription out;
  out.gamma_prime = 0.95 * gamma;
  out.gamma_gap = 0.05 * gamma;
  out.iterations = std::ceil(1500.0 / (alpha * out.gamma_gap * out.gamma_gap));

  const NoiseParameters noise = prescribed_noise_parameters(
      epsilon, delta, static_cast<std::uint64_t>(out.iterations));
  out.p = noise.p;
  out.sigma = noise.sigma;
  out.b = noise.b;

  const double log_t = std::log(out.iterations);
  const double dd = static_cast<double>(d);
  out.n_perceptron =
      std::ceil(100.0 * std::sqrt(dd) * out.sigma * log_t / (out.p * std::sqrt(alpha)) +
                1000.0 * out.sigma * std::sqrt(log_t) / (out.p * alpha * gamma) +
                100.0 * log_t / alpha + 1e10 / (alpha * alpha * gamma * gamma));

  out.lambda_cap = 1e6 * std::sqrt(std::log(1.0 / alpha)) *
                   std::max(std::sqrt(dd), 1.0 / gamma);
  out.n_exp_mech =
      std::ceil(1e4 * out.lambda_cap * out.lambda_cap / (epsilon * alpha) +
                1e10 / (alpha * alpha * gamma * gamma));
  return out;
}

}  // namespace dphalf
