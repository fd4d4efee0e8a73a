#pragma once

#include <cstddef>
#include <vector>

namespace dphalf {

// A point in R^d. Dataset vectors built by the "theory" preprocessing
// path additionally satisfy ||x|| <= 1 + 1e-9.
using FeatureVector = std::vector<double>;

struct LabeledExample {
  FeatureVector x;
  int label = 1;  // exactly -1 or +1
};

struct Dataset {
  std::vector<LabeledExample> examples;
  std::size_t dimension = 0;

  std::size_t size() const { return examples.size(); }
};

// Linear classifier h_w(x) = sgn(<w, x>). A "normalized" halfspace has
// unit Euclidean norm within 1e-9.
struct Halfspace {
  std::vector<double> weights;

  std::size_t dimension() const { return weights.size(); }
};

// Closed-form sample-size and mechanism parameters for the theoretical
// learners. n_perceptron / n_exp_mech are ceil()'d but kept as doubles:
// they overflow 64-bit integers for small alpha * gamma.
struct TheoreticalPrescription {
  double iterations = 0;  // T, integral-valued
  double p = 0;           // subsampling rate 1/sqrt(T)
  double sigma = 0;       // Gaussian std per coordinate
  double b = 0;           // Laplace scale
  double n_perceptron = 0;
  double n_exp_mech = 0;
  double lambda_cap = 0;  // Lambda
  double gamma_prime = 0;
  double gamma_gap = 0;
};

// ---- vector helpers -------------------------------------------------

double dot(const std::vector<double>& a, const std::vector<double>& b);
double squared_norm(const std::vector<double>& v);
double norm(const std::vector<double>& v);
bool is_zero(const std::vector<double>& v);

// v / ||v||; throws std::invalid_argument on the zero vector.
std::vector<double> normalized(const std::vector<double>& v);

// ---- margin error and robust risk -----------------------------------

// Fraction of examples NOT satisfying the strict margin test
// y * <w, x> > gamma. The zero vector fails the test on every example.
double margin_error(const Halfspace& w, const Dataset& data, double gamma);

// Robust risk of a nonzero halfspace equals the margin error of its
// normalization: R_gamma(w, X) = margin_error(w / ||w||, X, gamma).
double robust_risk(const Halfspace& w, const Dataset& data, double gamma);

// ---- closed-form bound calculators -----------------------------------

// Additive generalization term 400 * sqrt(ln(4/xi) / (n * gamma_hat^2)).
double generalization_gap(std::size_t n, double gamma_hat, double xi);

// Covering-number failure-probability bound
//   4 * exp( 36/(gh-ghp)^2 * ln(20n/(gh-ghp)) - eta^2 * ap * n / (4(1+eta)^2) )
// May exceed 1 (vacuous) and overflows to +inf when the exponent does;
// the _log variant returns ln of the bound and is always finite here.
double generalization_gap_covering(std::size_t n, double gamma_hat,
                                   double gamma_hat_prime, double eta,
                                   double alpha_prime);
double generalization_gap_covering_log(std::size_t n, double gamma_hat,
                                       double gamma_hat_prime, double eta,
                                       double alpha_prime);

// Full parameter prescription for target accuracy alpha at margin gamma
// in dimension d under an (epsilon, delta) budget. All logarithms are
// natural.
TheoreticalPrescription prescribed_parameters(double epsilon, double delta,
                                              double alpha, double gamma,
                                              std::size_t d);

}  // namespace dphalf
