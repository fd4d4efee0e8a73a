// Acceptance suite: runs every acceptance criterion end to end and
// prints one PASS/FAIL line per criterion. Exits nonzero on any failure.
//
// Usage: acceptance <path-to-cli> [work-dir]
// Set MNIST_DIR to a directory holding the four standard MNIST IDX files
// to run the desk-scale experiment on real MNIST; otherwise a bundled
// synthetic digit-image generator produces an equivalent IDX dataset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "dphalf/core.hpp"
#include "dphalf/data.hpp"
#include "dphalf/kernel.hpp"
#include "dphalf/model_io.hpp"
#include "dphalf/privacy.hpp"
#include "dphalf/robust.hpp"
#include "dphalf/trainers.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace dphalf;

namespace {

std::string g_cli;
fs::path g_work;

struct Failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void expect(bool ok, const std::string& what) {
  if (!ok) throw Failure(what);
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

struct CliResult {
  int exit_code;
  std::string output;
};

CliResult run_cli(const std::string& args) {
  const fs::path out = g_work / "cli_stdout.txt";
  const std::string cmd =
      g_cli + " " + args + " > " + out.string() + " 2> /dev/null";
  const int status = std::system(cmd.c_str());
  std::ifstream in(out);
  std::ostringstream ss;
  ss << in.rdbuf();
  return CliResult{WEXITSTATUS(status), ss.str()};
}

double parse_field(const std::string& output, const std::string& key) {
  std::istringstream lines(output);
  std::string line;
  while (std::getline(lines, line))
    if (line.rfind(key + " ", 0) == 0)
      return std::stod(line.substr(key.size() + 1));
  throw Failure("missing field '" + key + "' in CLI output");
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---- criterion 1: noiseless convergence --------------------------------

void criterion_noiseless_convergence() {
  const double gamma = 0.5, gamma_prime = 0.25, alpha = 0.5;
  const double gamma_gap = gamma - gamma_prime;
  const std::size_t d = 100, n = 1000;
  const std::int64_t T = 48000;  // ceil(1500 / (alpha * gamma_gap^2))
  const double mistake_cap = 250.0 * static_cast<double>(n) /
                             (gamma_gap * gamma_gap);  // 4,000,000

  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto start = std::chrono::steady_clock::now();
    const auto synth = synth_margin_dataset(d, n, gamma, seed);
    PerceptronConfig cfg;
    cfg.gamma_prime = gamma_prime;
    cfg.p = 1.0;
    cfg.iterations = T;
    cfg.b = std::numeric_limits<double>::infinity();
    cfg.sigma = 0.0;
    cfg.alpha = alpha;
    cfg.mode = PerceptronMode::kEarlyStop;

    SeededRng rng(seed + 1000);
    const auto out = dp_batch_perceptron(synth.data, cfg, rng);
    expect(!out.failed(), "seed " + std::to_string(seed) + ": FAIL returned");
    expect(out.stop_iteration.has_value(),
           "seed " + std::to_string(seed) + ": no early stop");
    const double err = margin_error(*out.weights, synth.data, gamma_prime);
    expect(err <= 0.25, "seed " + std::to_string(seed) +
                            ": margin error " + std::to_string(err));
    double total = 0;
    for (std::int64_t m : out.mistake_counts) total += static_cast<double>(m);
    expect(total <= mistake_cap,
           "seed " + std::to_string(seed) + ": mistakes " +
               std::to_string(total) + " above the analysis ceiling");
    const double elapsed = seconds_since(start);
    expect(elapsed < 60.0, "seed " + std::to_string(seed) + ": took " +
                               std::to_string(elapsed) + " s");
  }
}

// ---- criterion 2: privacy arithmetic -------------------------------------

void criterion_privacy_arithmetic() {
  const auto start = std::chrono::steady_clock::now();

  for (double eps0 : {0.05, 0.3, 0.9}) {
    for (double delta0 : {1e-7, 1e-4}) {
      for (std::uint64_t t : {1ull, 50ull, 5000ull}) {
        const double got = advanced_composition(eps0, delta0, t).epsilon;
        const long double want = oracles::advanced_composition_eps_ld(
            eps0, delta0, static_cast<long double>(t));
        expect(std::abs(got - static_cast<double>(want)) <=
                   1e-12 * static_cast<double>(want),
               "advanced composition drifted from the closed form");
      }
      const auto amp = amplify_by_subsampling(eps0, delta0, 0.25);
      expect(amp.epsilon == 0.5 * eps0 && amp.delta == 0.25 * delta0,
             "subsampling amplification is not the closed form");
    }
  }

  for (double q : {0.01, 0.1}) {
    for (double sigma : {1.0, 2.0}) {
      for (int order = 2; order <= 32; ++order) {
        const double got = rdp_subsampled_gaussian(q, sigma, order);
        const double want =
            oracles::renyi_subsampled_gaussian_quadrature(q, sigma, order);
        expect(std::abs(got - want) <= 1e-6,
               "subsampled-Gaussian RDP drifted from quadrature at order " +
                   std::to_string(order));
      }
    }
  }

  for (std::uint64_t t : {1ull, 10ull, 100ull, 10000ull})
    for (double eps : {0.1, 0.5, 0.9})
      for (double delta : {1e-5, 1e-7}) {
        const auto composed = perceptron_privacy_check(eps, delta, t).second;
        expect(composed.epsilon <= eps && composed.delta <= delta,
               "composed budget exceeds the target");
      }

  const double elapsed = seconds_since(start);
  expect(elapsed < 30.0,
         "privacy arithmetic took " + std::to_string(elapsed) + " s");
}

// ---- criterion 3: random Fourier feature fidelity -------------------------

void criterion_rff_fidelity() {
  const auto start = std::chrono::steady_clock::now();

  const auto map = sample_feature_map(20, 512, 5.0, SeededRng(1));
  SeededRng rng(2);
  for (int i = 0; i < 1000; ++i) {
    FeatureVector x(20);
    for (double& c : x) c = rng.gaussian() * 0.2;
    expect(std::abs(norm(embed(map, x)) - 1.0) <= 1e-9,
           "embedding norm drifted from 1");
  }

  const auto wide = sample_feature_map(20, 4096, 5.0, SeededRng(3));
  double max_err = 0;
  for (int i = 0; i < 200; ++i) {
    FeatureVector x(20), y(20);
    for (double& c : x) c = rng.gaussian() * 0.2;
    for (double& c : y) c = rng.gaussian() * 0.2;
    max_err = std::max(max_err, std::abs(dot(embed(wide, x), embed(wide, y)) -
                                         gaussian_kernel(x, y, 5.0)));
  }
  expect(max_err <= 0.08, "kernel approximation error " +
                              std::to_string(max_err) + " above 0.08");

  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto m = sample_feature_map(20, 50, 1.5, SeededRng(seed));
    const double got = operator_norm(m);
    const double want = oracles::svd_sigma_max(m.rho);
    expect(std::abs(got - want) <= 1e-5 * want,
           "operator norm drifted from the SVD oracle");
  }

  const double elapsed = seconds_since(start);
  expect(elapsed < 60.0, "RFF fidelity took " + std::to_string(elapsed) + " s");
}

// ---- criterion 4: certified radii ------------------------------------------

void criterion_certified_radii() {
  const auto start = std::chrono::steady_clock::now();

  SeededRng rng(47);
  for (int trial = 0; trial < 50; ++trial) {
    MulticlassModel model;
    model.dimension = 2;
    model.num_classes = 3;
    for (int y = 0; y < 3; ++y) {
      std::vector<double> w{rng.gaussian(), rng.gaussian()};
      model.class_weights.push_back(Halfspace{w});
    }
    FeatureVector x{rng.gaussian(), rng.gaussian()};
    const int y = predict(model, x);
    const double radius = certified_radius_linear(model, x, y);
    expect(radius >= 0.0, "radius of the predicted class is negative");

    const auto flip = oracles::polar_flip_radius(
        [&](const std::vector<double>& z) { return predict(model, z); }, x, y,
        1e-3, 720, radius + 2e-3);
    expect(flip.has_value(),
           "no flip found just above the certified radius (not exact?)");
    expect(*flip >= radius - 2e-3, "flip found below the certified radius");
  }

  SeededRng krng(90);
  for (int trial = 0; trial < 30; ++trial) {
    const auto map =
        sample_feature_map(2, 8, 1.5 + krng.uniform(), SeededRng(500 + trial));
    MulticlassModel model;
    model.dimension = 16;
    model.num_classes = 2;
    for (int y = 0; y < 2; ++y) {
      std::vector<double> w(16);
      for (double& c : w) c = krng.gaussian();
      model.class_weights.push_back(Halfspace{w});
    }
    FeatureVector x{0.8 * krng.gaussian(), 0.8 * krng.gaussian()};
    const int y = predict(model, x, &map);
    const double radius = certified_radius_kernel(model, map, x, y);
    expect(radius >= 0.0, "kernel radius of the predicted class is negative");
    if (radius == 0.0) continue;
    const auto flip = oracles::polar_flip_radius(
        [&](const std::vector<double>& z) { return predict(model, z, &map); },
        x, y, 1e-3, 360, radius * (1.0 - 1e-9));
    expect(!flip.has_value(), "kernel certificate is unsound");
  }

  const double elapsed = seconds_since(start);
  expect(elapsed < 120.0,
         "certified radii took " + std::to_string(elapsed) + " s");
}

// ---- criterion 5: desk-scale digits experiment -----------------------------

struct DigitPaths {
  std::string train_images, train_labels, test_images, test_labels;
  bool real_mnist = false;
};

DigitPaths locate_digit_dataset() {
  DigitPaths paths;
  if (const char* env = std::getenv("MNIST_DIR")) {
    const fs::path dir(env);
    paths.train_images = (dir / "train-images-idx3-ubyte").string();
    paths.train_labels = (dir / "train-labels-idx1-ubyte").string();
    paths.test_images = (dir / "t10k-images-idx3-ubyte").string();
    paths.test_labels = (dir / "t10k-labels-idx1-ubyte").string();
    if (fs::exists(paths.train_images) && fs::exists(paths.train_labels) &&
        fs::exists(paths.test_images) && fs::exists(paths.test_labels)) {
      paths.real_mnist = true;
      return paths;
    }
    std::cout << "  (MNIST_DIR set but files missing; falling back to the "
                 "synthetic digit set)\n";
  }
  const auto files =
      fixtures::write_digit_dataset(g_work / "digits", 6000, 1000, 2024);
  paths.train_images = files.train_images;
  paths.train_labels = files.train_labels;
  paths.test_images = files.test_images;
  paths.test_labels = files.test_labels;
  return paths;
}

double train_and_score(const DigitPaths& data, const std::string& label,
                       const std::string& extra_args) {
  const fs::path model = g_work / ("model_" + label + ".json");
  const std::string train_args = "train --train-images " + data.train_images +
                                 " --train-labels " + data.train_labels +
                                 " --algo perceptron-fixed --mode pixel " +
                                 extra_args + " --out " + model.string();
  const auto train = run_cli(train_args);
  expect(train.exit_code == 0, "training run '" + label + "' exited " +
                                   std::to_string(train.exit_code));
  const auto eval = run_cli("evaluate --model " + model.string() +
                            " --test-images " + data.test_images +
                            " --test-labels " + data.test_labels);
  expect(eval.exit_code == 0, "evaluate '" + label + "' exited " +
                                  std::to_string(eval.exit_code));
  return parse_field(eval.output, "accuracy");
}

void criterion_desk_run() {
  const auto start = std::chrono::steady_clock::now();
  const DigitPaths data = locate_digit_dataset();
  std::cout << "  (dataset: " << (data.real_mnist ? "MNIST" : "synthetic digits")
            << ")\n";

  // (a) Noiseless baseline; this run defines the reference accuracy A0.
  const double a0 = train_and_score(
      data, "baseline",
      "--no-privacy --gamma-prime 0.01 --batch-size 500 --epochs 1 --seed 1");
  std::cout << "  (baseline accuracy " << a0 << ")\n";

  // (b) DP at epsilon 2: small batch/margin sweep, median over 5 seeds.
  double best_median = 0;
  std::string best_config;
  for (const int batch : {100, 500, 1000}) {
    for (const double gp : {0.01, 0.001}) {
      std::vector<double> scores;
      for (int seed = 1; seed <= 5; ++seed) {
        std::ostringstream extra;
        extra << "--epsilon 2 --delta 1e-5 --gamma-prime " << gp
              << " --batch-size " << batch << " --epochs 1 --seed " << seed;
        std::ostringstream label;
        label << "dp_b" << batch << "_g" << gp << "_s" << seed;
        scores.push_back(train_and_score(data, label.str(), extra.str()));
      }
      std::sort(scores.begin(), scores.end());
      const double median = scores[2];
      if (median > best_median) {
        best_median = median;
        std::ostringstream cfg;
        cfg << "batch=" << batch << " gamma_prime=" << gp;
        best_config = cfg.str();
      }
    }
  }
  std::cout << "  (best DP median accuracy " << best_median << " at "
            << best_config << ")\n";
  expect(best_median >= a0 - 0.10,
         "best DP median accuracy " + std::to_string(best_median) +
             " fell more than 10 points below the baseline " +
             std::to_string(a0));

  // (c) Curve properties on the baseline model.
  const fs::path model = g_work / "model_baseline.json";
  const fs::path radii_csv = g_work / "radii.csv";
  expect(run_cli("evaluate --model " + model.string() + " --test-images " +
                 data.test_images + " --test-labels " + data.test_labels +
                 " --radii-out " + radii_csv.string())
                 .exit_code == 0,
         "radii evaluation failed");

  std::vector<double> radii;
  {
    std::ifstream in(radii_csv);
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
      const auto last_comma = line.rfind(',');
      radii.push_back(std::stod(line.substr(last_comma + 1)));
    }
  }
  expect(!radii.empty(), "no radii emitted");
  double positive = 0;
  for (double r : radii)
    if (r > 0.0) positive += 1.0;
  const double positive_fraction = positive / static_cast<double>(radii.size());

  const fs::path curve_csv = g_work / "curve.csv";
  expect(run_cli("curve --model " + model.string() + " --test-images " +
                 data.test_images + " --test-labels " + data.test_labels +
                 " --gamma-max 2.0 --gamma-steps 50 --out " +
                 curve_csv.string())
                 .exit_code == 0,
         "curve generation failed");
  {
    std::ifstream in(curve_csv);
    std::string line;
    std::getline(in, line);
    double prev = 2.0;
    std::size_t rows = 0;
    while (std::getline(in, line)) {
      const auto comma = line.find(',');
      const double acc = std::stod(line.substr(comma + 1));
      expect(acc <= prev, "curve is not non-increasing");
      prev = acc;
      ++rows;
    }
    expect(rows == 50, "curve row count is wrong");
  }

  // At a vanishing grid point the curve equals the strictly-positive
  // radius fraction.
  const fs::path tiny_csv = g_work / "curve_tiny.csv";
  expect(run_cli("curve --model " + model.string() + " --test-images " +
                 data.test_images + " --test-labels " + data.test_labels +
                 " --gamma-max 5e-8 --gamma-steps 50 --out " +
                 tiny_csv.string())
                 .exit_code == 0,
         "tiny curve generation failed");
  {
    std::ifstream in(tiny_csv);
    std::string line;
    std::getline(in, line);
    std::getline(in, line);
    const double first = std::stod(line.substr(line.find(',') + 1));
    expect(first == positive_fraction,
           "curve at the smallest positive gamma (" + std::to_string(first) +
               ") differs from the positive-radius fraction (" +
               std::to_string(positive_fraction) + ")");
  }

  const double elapsed = seconds_since(start);
  expect(elapsed < 600.0, "desk run took " + std::to_string(elapsed) + " s");
}

// ---- criterion 6: exponential mechanism distribution -----------------------

void criterion_exp_mech_distribution() {
  Dataset data;
  data.dimension = 2;
  for (int i = 0; i < 12; ++i) data.examples.push_back({{0.5, 0.0}, 1});
  for (int i = 0; i < 8; ++i) data.examples.push_back({{0.0, 0.5}, 1});
  const std::vector<Halfspace> candidates = {
      Halfspace{{1.0, 0.0}}, Halfspace{{0.0, 1.0}}, Halfspace{{-1.0, 0.0}},
      Halfspace{{0.0, -1.0}}};

  std::vector<double> logits;
  for (const auto& c : candidates)
    logits.push_back(0.5 * -20.0 * margin_error(c, data, 0.95 * 0.4));
  const auto probs = oracles::softmax(logits);

  SeededRng rng(70);
  std::vector<std::int64_t> counts(4, 0);
  const int runs = 10000;
  for (int i = 0; i < runs; ++i)
    ++counts[exponential_mechanism_select(candidates, data, 0.4, 1.0, rng)];
  for (std::size_t j = 0; j < 4; ++j)
    expect(std::abs(static_cast<double>(counts[j]) / runs - probs[j]) <= 0.02,
           "selection frequency for candidate " + std::to_string(j) +
               " off the softmax law");

  SeededRng urng(101);
  std::vector<std::int64_t> uniform_counts(4, 0);
  for (int i = 0; i < runs; ++i)
    ++uniform_counts[exponential_mechanism_select(candidates, data, 0.4, 0.0,
                                                  urng)];
  const double stat = oracles::chi_square_statistic(
      uniform_counts, std::vector<double>(4, runs / 4.0));
  expect(stat < 16.266, "epsilon=0 selection failed the uniformity test "
                        "(chi-square " +
                            std::to_string(stat) + ")");
}

// ---- criterion 7: hinge gradient checks ------------------------------------

void criterion_hinge_gradient() {
  SeededRng rng(31);
  int checked = 0;
  while (checked < 20) {
    const double gamma = 0.05 + rng.uniform();
    std::vector<double> z{rng.gaussian(), rng.gaussian(), rng.gaussian()};
    FeatureVector x{rng.gaussian() * 0.5, rng.gaussian() * 0.5,
                    rng.gaussian() * 0.5};
    const int label = rng.uniform() < 0.5 ? 1 : -1;
    if (std::abs(label * dot(z, x) - gamma) <= 1e-3) continue;
    ++checked;
    const auto grad = hinge_gradient(z, x, label, gamma);
    const double h = 1e-6;
    for (std::size_t j = 0; j < z.size(); ++j) {
      std::vector<double> zp = z, zm = z;
      zp[j] += h;
      zm[j] -= h;
      const double fd =
          (hinge_loss(zp, x, label, gamma) - hinge_loss(zm, x, label, gamma)) /
          (2.0 * h);
      const bool ok = grad[j] == 0.0
                          ? std::abs(fd) <= 1e-5
                          : std::abs(fd - grad[j]) <= 1e-5 * std::abs(grad[j]);
      expect(ok, "finite differences disagree with the hinge gradient");
    }
  }

  SeededRng crng(3);
  for (int i = 0; i < 10000; ++i) {
    std::vector<double> v{crng.gaussian() * 3.0, crng.gaussian() * 3.0,
                          crng.gaussian() * 3.0};
    expect(norm(clip_to_unit(v)) <= 1.0 + 1e-12, "clipped norm above 1");
  }
}

// ---- criterion 8: determinism and persistence -------------------------------

void criterion_determinism() {
  const auto files =
      fixtures::write_digit_dataset(g_work / "det_digits", 300, 100, 5);
  const fs::path model = g_work / "det_model.json";
  const std::string train_args =
      "train --train-images " + files.train_images + " --train-labels " +
      files.train_labels +
      " --epsilon 1 --delta 1e-5 --algo perceptron-fixed --gamma-prime 0.01 "
      "--batch-size 100 --epochs 1 --mode pixel --seed 42 --out " +
      model.string();
  expect(run_cli(train_args).exit_code == 0, "first training run failed");
  const std::string first = slurp(model);
  expect(run_cli(train_args).exit_code == 0, "second training run failed");
  expect(slurp(model) == first, "same seed produced different model bytes");

  const auto loaded = model_from_json(first);
  expect(model_to_json(loaded.model, loaded.meta) == first,
         "model JSON does not round-trip bit-exactly");

  const fs::path curve = g_work / "det_curve.csv";
  const std::string curve_args =
      "curve --model " + model.string() + " --test-images " +
      files.test_images + " --test-labels " + files.test_labels +
      " --gamma-max 1.0 --gamma-steps 20 --out " + curve.string();
  expect(run_cli(curve_args).exit_code == 0, "first curve run failed");
  const std::string curve_bytes = slurp(curve);
  expect(run_cli(curve_args).exit_code == 0, "second curve run failed");
  expect(slurp(curve) == curve_bytes, "curve CSV is not byte-stable");
}

}  // namespace

int main(int argc, char** argv) {
  if (argc >= 2) {
    g_cli = argv[1];
  } else if (const char* env = std::getenv("DPHALF_CLI")) {
    g_cli = env;
  } else {
    std::cerr << "usage: acceptance <path-to-cli> [work-dir]\n";
    return 2;
  }
  g_work = argc >= 3 ? fs::path(argv[2])
                     : fs::temp_directory_path() / "dphalf_acceptance";
  fs::create_directories(g_work);

  struct Criterion {
    std::string name;
    std::function<void()> run;
  };
  const std::vector<Criterion> criteria = {
      {"noiseless perceptron convergence", criterion_noiseless_convergence},
      {"privacy arithmetic", criterion_privacy_arithmetic},
      {"random Fourier feature fidelity", criterion_rff_fidelity},
      {"certified radius exactness and soundness", criterion_certified_radii},
      {"desk-scale digits experiment", criterion_desk_run},
      {"exponential mechanism distribution", criterion_exp_mech_distribution},
      {"hinge gradient and clipping", criterion_hinge_gradient},
      {"determinism and persistence", criterion_determinism},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    std::string verdict = "PASS", detail;
    try {
      criteria[i].run();
    } catch (const std::exception& e) {
      verdict = "FAIL";
      detail = e.what();
      ++failures;
    }
    std::cout << verdict << " criterion " << i + 1 << ": " << criteria[i].name
              << " (" << std::fixed << std::setprecision(1)
              << seconds_since(start) << " s)";
    if (!detail.empty()) std::cout << ": " << detail;
    std::cout << "\n" << std::defaultfloat;
  }
  return failures == 0 ? 0 : 1;
}
