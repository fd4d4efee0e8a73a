#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dphalf/rng.hpp"

namespace dphalf {

// A requested privacy budget cannot be met by any mechanism parameters
// in the supported range.
struct CalibrationError : std::runtime_error {
  explicit CalibrationError(const std::string& what)
      : std::runtime_error(what) {}
};

struct PrivacyBudget {
  double epsilon = 0;
  double delta = 0;
};

// Mechanism parameters of one training run: Gaussian std per coordinate,
// Laplace scale (+inf means "no stopping noise", noiseless test mode
// only), and Poisson subsampling rate.
struct NoiseParameters {
  double sigma = 0;
  double b = 0;
  double p = 1;
};

// Renyi divergence bounds per order; orders strictly increasing.
struct RdpCurve {
  std::vector<double> orders;
  std::vector<double> values;
};

// ---- samplers --------------------------------------------------------

// d independent draws from N(0, sigma^2).
std::vector<double> sample_gaussian_vector(std::size_t d, double sigma,
                                           SeededRng& rng);

// One draw from Laplace with scale b > 0.
double sample_laplace(double b, SeededRng& rng);

// ---- analytic composition --------------------------------------------

// T-fold adaptive composition of an (eps0, delta0)-DP mechanism:
// (sqrt(2 T ln(1/delta0)) * eps0 + 2 T eps0^2, (T+1) * delta0).
PrivacyBudget advanced_composition(double eps0, double delta0, std::uint64_t T);

// Poisson subsampling at rate p turns (eps0, delta0)-DP into
// (2 p eps0, p delta0)-DP, for eps0, delta0 in (0, 1).
PrivacyBudget amplify_by_subsampling(double eps0, double delta0, double p);

// Prescribed mechanism parameters for T iterations under (eps, delta):
// p = 1/sqrt(T), sigma = 100 ln(T/delta) / eps, b = 100 sqrt(ln(T/delta)) / eps.
NoiseParameters prescribed_noise_parameters(double epsilon, double delta,
                                       std::uint64_t T);

// Evaluates the full composition chain for the prescribed parameters:
// per-iteration (eps/(20 sqrt(ln(T/delta))), delta/(2 sqrt(T))), amplified
// by subsampling at p, advanced-composed over T. Throws std::logic_error
// if the composed budget exceeds the target (arithmetic regression).
std::pair<NoiseParameters, PrivacyBudget> perceptron_privacy_check(
    double epsilon, double delta, std::uint64_t T);

// ---- RDP accounting ---------------------------------------------------

// Renyi divergence bound of the Poisson-subsampled Gaussian mechanism
// (sensitivity 1) at integer order >= 2, computed in log space:
//   1/(order-1) * ln( sum_k C(order,k) (1-q)^(order-k) q^k e^{k(k-1)/(2 sigma^2)} )
double rdp_subsampled_gaussian(double q, double sigma, int order);

// Curve over integer orders [min_order, max_order].
RdpCurve subsampled_gaussian_curve(double q, double sigma, int min_order = 2,
                                   int max_order = 128);

// RDP is additive under composition: every value multiplied by T.
RdpCurve compose_rdp(const RdpCurve& curve, std::uint64_t T);

struct RdpEpsilon {
  double epsilon = 0;
  double best_order = 0;
};

// Standard conversion: min over orders of value + ln(1/delta)/(order-1),
// ties broken toward the smaller order.
RdpEpsilon rdp_to_eps(const RdpCurve& curve, double delta);

// Smallest sigma in [0.3, 1e6] whose T-fold composed subsampled-Gaussian
// curve converts to at most epsilon at the given delta. Bisection with
// relative tolerance 1e-3; throws std::runtime_error if the budget is
// unreachable inside the bracket and std::logic_error if the accountant
// is observed non-monotone in sigma.
double calibrate_sigma(double epsilon, double delta, double q,
                       std::uint64_t T);

}  // namespace dphalf
