#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <cstdint>

#include "dphalf/core.hpp"
#include "dphalf/rng.hpp"

namespace dphalf {

// Random Fourier feature map for the Gaussian kernel
// k(x, x') = exp(-||x - x'||^2 / (2 sigma_hat^2)). Column i of rho is the
// frequency vector rho_i ~ N(0, (1/sigma_hat^2) I). The embedded dimension
// is 2 * d_hat (cosines then sines).
struct FourierFeatureMap {
  Eigen::MatrixXd rho;  // d x d_hat
  double sigma_hat = 1;
  std::uint64_t seed = 0;

  std::size_t input_dim() const { return static_cast<std::size_t>(rho.rows()); }
  std::size_t num_frequencies() const {
    return static_cast<std::size_t>(rho.cols());
  }
  std::size_t embedded_dim() const { return 2 * num_frequencies(); }
};

// Samples the frequency matrix. The map is a pure function of rng.seed()
// (a fresh stream is derived internally), so maps persisted by
// (d, d_hat, sigma_hat, seed) regenerate identically on load.
FourierFeatureMap sample_feature_map(std::size_t d, std::size_t d_hat,
                                     double sigma_hat, const SeededRng& rng);

// phi(x) = (1/sqrt(d_hat)) (cos<rho_1,x>, ..., sin<rho_1,x>, ...).
// ||phi(x)|| = 1 for every x.
std::vector<double> embed(const FourierFeatureMap& map, const FeatureVector& x);

double gaussian_kernel(const FeatureVector& x, const FeatureVector& x_prime,
                       double sigma_hat);

// Largest singular value of the frequency matrix, by power iteration on
// the smaller Gram matrix (deterministic all-ones start, relative
// tolerance 1e-6, at most 1e4 iterations).
double operator_norm(const FourierFeatureMap& map);

}  // namespace dphalf
