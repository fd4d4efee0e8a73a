#include "dphalf/kernel.hpp"

#include <cmath>
#include <stdexcept>

namespace dphalf {

FourierFeatureMap sample_feature_map(std::size_t d, std::size_t d_hat,
                                     double sigma_hat, const SeededRng& rng) {
  if (d == 0 || d_hat == 0)
    throw std::invalid_argument("sample_feature_map: zero dimension");
  if (!(sigma_hat > 0))
    throw std::invalid_argument("sample_feature_map: sigma_hat <= 0");
  FourierFeatureMap map;
  map.sigma_hat = sigma_hat;
  map.seed = rng.seed();
  map.rho.resize(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d_hat));
  // Fresh stream from the seed; column-major fill order is part of the
  // persistence contract.
  SeededRng local(rng.seed());
  for (Eigen::Index i = 0; i < map.rho.cols(); ++i)
    for (Eigen::Index j = 0; j < map.rho.rows(); ++j)
      map.rho(j, i) = local.gaussian() / sigma_hat;
  return map;
}

std::vector<double> embed(const FourierFeatureMap& map, const FeatureVector& x) {
  if (x.size() != map.input_dim())
    throw std::invalid_argument("embed: dimension mismatch");
  const Eigen::Map<const Eigen::VectorXd> xv(x.data(),
                                             static_cast<Eigen::Index>(x.size()));
  const Eigen::VectorXd t = map.rho.transpose() * xv;
  const std::size_t d_hat = map.num_frequencies();
  const double scale = 1.0 / std::sqrt(static_cast<double>(d_hat));
  std::vector<double> out(2 * d_hat);
  for (std::size_t i = 0; i < d_hat; ++i) {
    out[i] = std::cos(t[static_cast<Eigen::Index>(i)]) * scale;
    out[d_hat + i] = std::sin(t[static_cast<Eigen::Index>(i)]) * scale;
  }
  return out;
}

double gaussian_kernel(const FeatureVector& x, const FeatureVector& x_prime,
                       double sigma_hat) {
  if (x.size() != x_prime.size())
    throw std::invalid_argument("gaussian_kernel: dimension mismatch");
  if (!(sigma_hat > 0))
    throw std::invalid_argument("gaussian_kernel: sigma_hat <= 0");
  double sq = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - x_prime[i];
    sq += d * d;
  }
  return std::exp(-sq / (2.0 * sigma_hat * sigma_hat));
}

double operator_norm(const FourierFeatureMap& map) {
  const Eigen::MatrixXd& a = map.rho;
  if (a.size() == 0) throw std::invalid_argument("operator_norm: empty map");
  // Power iteration on the smaller of A^T A and A A^T.
  const Eigen::MatrixXd gram = a.rows() <= a.cols()
                                   ? Eigen::MatrixXd(a * a.transpose())
                                   : Eigen::MatrixXd(a.transpose() * a);
  Eigen::VectorXd v = Eigen::VectorXd::Ones(gram.rows());
  v /= v.norm();
  double lambda = 0;
  for (int iter = 0; iter < 10000; ++iter) {
    Eigen::VectorXd next = gram * v;
    const double next_norm = next.norm();
    if (next_norm == 0) return 0.0;  // zero matrix
    v = next / next_norm;
    if (std::abs(next_norm - lambda) <= 1e-6 * next_norm)
      return std::sqrt(next_norm);
    lambda = next_norm;
  }
  throw std::runtime_error("operator_norm: power iteration did not converge");
}

}  // namespace dphalf
