#include <cmath>

#include "doctest.h"
#include "dphalf/kernel.hpp"
#include "oracles.hpp"

using namespace dphalf;

namespace {

FeatureVector random_ball_point(std::size_t d, SeededRng& rng) {
  FeatureVector x(d);
  for (double& c : x) c = rng.gaussian();
  const double n = norm(x);
  const double r = std::pow(rng.uniform_open(), 1.0 / static_cast<double>(d));
  for (double& c : x) c *= r / n;
  return x;
}

}  // namespace

TEST_CASE("feature map sampling is a pure function of the seed") {
  const SeededRng rng(77);
  const auto a = sample_feature_map(8, 16, 5.0, rng);
  const auto b = sample_feature_map(8, 16, 5.0, SeededRng(77));
  CHECK((a.rho.array() == b.rho.array()).all());
  CHECK(a.seed == 77);

  // Halving comes from the same raw draws, so the ratio is exact.
  const auto wide = sample_feature_map(8, 16, 2.5, SeededRng(77));
  for (Eigen::Index i = 0; i < a.rho.size(); ++i)
    CHECK(a.rho(i) == 0.5 * wide.rho(i));
}

TEST_CASE("frequency variance matches 1/sigma_hat^2") {
  const double sigma_hat = 3.0;
  const auto map = sample_feature_map(1000, 1000, sigma_hat, SeededRng(5));
  double mean = 0;
  for (Eigen::Index i = 0; i < map.rho.size(); ++i) mean += map.rho(i);
  mean /= static_cast<double>(map.rho.size());
  double var = 0;
  for (Eigen::Index i = 0; i < map.rho.size(); ++i)
    var += (map.rho(i) - mean) * (map.rho(i) - mean);
  var /= static_cast<double>(map.rho.size() - 1);
  const double expected = 1.0 / (sigma_hat * sigma_hat);
  CHECK(var > 0.95 * expected);
  CHECK(var < 1.05 * expected);
}

TEST_CASE("embedding has unit norm and self-kernel one") {
  const auto map = sample_feature_map(6, 64, 4.0, SeededRng(3));
  SeededRng rng(8);
  for (int i = 0; i < 50; ++i) {
    const auto x = random_ball_point(6, rng);
    const auto phi = embed(map, x);
    CHECK(phi.size() == 128);
    CHECK(std::abs(norm(phi) - 1.0) <= 1e-9);
    CHECK(dot(phi, phi) == doctest::Approx(1.0).epsilon(1e-9));
  }
  CHECK_THROWS_AS(embed(map, FeatureVector(5, 0.0)), std::invalid_argument);
}

TEST_CASE("embedded inner products approximate the Gaussian kernel") {
  const std::size_t d = 12, d_hat = 4096;
  const double sigma_hat = 5.0;
  const auto map = sample_feature_map(d, d_hat, sigma_hat, SeededRng(41));
  SeededRng rng(42);
  double max_err = 0;
  for (int i = 0; i < 200; ++i) {
    const auto x = random_ball_point(d, rng);
    const auto y = random_ball_point(d, rng);
    const double approx = dot(embed(map, x), embed(map, y));
    CHECK(std::abs(approx) <= 1.0 + 1e-12);
    const double exact = gaussian_kernel(x, y, sigma_hat);
    max_err = std::max(max_err, std::abs(approx - exact));
  }
  CHECK(max_err <= 0.08);
}

TEST_CASE("kernel approximation improves with more frequencies") {
  const std::size_t d = 10;
  double total_small = 0, total_large = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto small = sample_feature_map(d, 256, 5.0, SeededRng(seed));
    const auto large = sample_feature_map(d, 4096, 5.0, SeededRng(seed));
    SeededRng rng(seed + 100);
    double err_small = 0, err_large = 0;
    for (int i = 0; i < 60; ++i) {
      const auto x = random_ball_point(d, rng);
      const auto y = random_ball_point(d, rng);
      const double exact = gaussian_kernel(x, y, 5.0);
      err_small =
          std::max(err_small, std::abs(dot(embed(small, x), embed(small, y)) -
                                       exact));
      err_large =
          std::max(err_large, std::abs(dot(embed(large, x), embed(large, y)) -
                                       exact));
    }
    total_small += err_small;
    total_large += err_large;
  }
  CHECK(total_large < total_small);
}

TEST_CASE("gaussian_kernel closed form") {
  const FeatureVector x{0.1, -0.2, 0.3};
  CHECK(gaussian_kernel(x, x, 2.0) == 1.0);

  const double sigma_hat = 1.7;
  const double dist = sigma_hat * std::sqrt(2.0 * std::log(2.0));
  const FeatureVector a{0.0, 0.0};
  const FeatureVector b{dist, 0.0};
  CHECK(gaussian_kernel(a, b, sigma_hat) == doctest::Approx(0.5).epsilon(1e-12));

  SeededRng rng(4);
  for (int i = 0; i < 20; ++i) {
    const auto u = random_ball_point(4, rng);
    const auto v = random_ball_point(4, rng);
    CHECK(gaussian_kernel(u, v, 3.0) == gaussian_kernel(v, u, 3.0));
  }
  CHECK_THROWS_AS(gaussian_kernel(a, FeatureVector{1.0, 2.0, 3.0}, 1.0),
                  std::invalid_argument);
}

TEST_CASE("operator_norm structured cases") {
  FourierFeatureMap single;
  single.rho.resize(3, 1);
  single.rho << 1.0, 2.0, -2.0;
  CHECK(operator_norm(single) == doctest::Approx(3.0).epsilon(1e-6));

  FourierFeatureMap ortho;
  ortho.rho.resize(2, 2);
  ortho.rho << 1.0, 0.0, 0.0, 3.0;
  CHECK(operator_norm(ortho) == doctest::Approx(3.0).epsilon(1e-6));
}

TEST_CASE("operator_norm matches the SVD oracle and scales") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto map = sample_feature_map(20, 50, 1.5, SeededRng(seed));
    const double got = operator_norm(map);
    const double expected = oracles::svd_sigma_max(map.rho);
    CHECK(std::abs(got - expected) <= 1e-5 * expected);

    FourierFeatureMap scaled = map;
    scaled.rho *= -2.5;
    CHECK(operator_norm(scaled) ==
          doctest::Approx(2.5 * got).epsilon(1e-5));
  }
}
