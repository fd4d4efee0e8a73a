// Command-line front end: privacy calibration, one-vs-rest training,
// evaluation, robust-accuracy curves, and synthetic data generation.
// Every command is a pure function of (flags, config file, input files,
// seed); repeated invocations produce byte-identical outputs.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "dphalf/core.hpp"
#include "dphalf/data.hpp"
#include "dphalf/kernel.hpp"
#include "dphalf/model_io.hpp"
#include "dphalf/privacy.hpp"
#include "dphalf/robust.hpp"
#include "dphalf/trainers.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCalibration = 2;
constexpr int kExitUsage = 64;
constexpr int kExitData = 65;
constexpr int kExitInternal = 70;

// Stream index for deriving the feature-map generator; anything above
// the class-index range works, the value is just fixed forever.
constexpr std::uint64_t kFeatureMapStream = 1u << 20;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::vector<std::uint8_t> read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in),
                                   std::istreambuf_iterator<char>());
}

std::string read_file_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  out << contents;
}

// Optional JSON config; flags given on the command line win.
class ConfigFile {
 public:
  ConfigFile(CLI::App* cmd, const std::string& path) : cmd_(cmd) {
    if (path.empty()) return;
    try {
      doc_ = nlohmann::json::parse(read_file_text(path));
    } catch (const nlohmann::json::exception& e) {
      throw UsageError("config file: " + std::string(e.what()));
    }
  }

  template <typename T>
  void fill(const char* key, T& var) const {
    if (!doc_.contains(key)) return;
    if (cmd_->count(std::string("--") + key) > 0) return;
    try {
      var = doc_[key].get<T>();
    } catch (const nlohmann::json::exception&) {
      throw UsageError(std::string("config file: bad value for '") + key + "'");
    }
  }

  template <typename T>
  void fill(const char* key, std::optional<T>& var) const {
    T v{};
    bool was_set = doc_.contains(key) &&
                   cmd_->count(std::string("--") + key) == 0;
    if (!was_set) return;
    try {
      v = doc_[key].get<T>();
    } catch (const nlohmann::json::exception&) {
      throw UsageError(std::string("config file: bad value for '") + key + "'");
    }
    var = v;
  }

 private:
  CLI::App* cmd_;
  nlohmann::json doc_ = nlohmann::json::object();
};

void require(bool present, const std::string& what) {
  if (!present) throw UsageError("missing required flag: " + what);
}

// ---- shared data loading ----------------------------------------------

struct DataFlags {
  std::string images, labels, libsvm;
  std::size_t dim = 0;
};

dphalf::PreprocessMode parse_mode(const std::string& mode) {
  if (mode == "pixel") return dphalf::PreprocessMode::kPixel;
  if (mode == "unit_ball") return dphalf::PreprocessMode::kUnitBall;
  throw UsageError("mode must be pixel or unit_ball");
}

// Loads IDX or libsvm input. For images, `mode` selects /255 pixel
// scaling or the additional global unit-ball rescale; libsvm vectors are
// taken as-is in pixel mode. `fixed_scale`, when set, replays a training
// split's unit-ball constant onto evaluation data.
dphalf::PreprocessedData load_input(const DataFlags& flags,
                                    dphalf::PreprocessMode mode,
                                    const double* fixed_scale) {
  const bool idx = !flags.images.empty() || !flags.labels.empty();
  const bool svm = !flags.libsvm.empty();
  if (idx == svm)
    throw UsageError(
        "provide either IDX --*-images/--*-labels or --*-libsvm, not both");
  try {
    if (idx) {
      require(!flags.images.empty() && !flags.labels.empty(),
              "both image and label files");
      const auto images = dphalf::load_idx_images(read_file_bytes(flags.images));
      const auto labels = dphalf::load_idx_labels(read_file_bytes(flags.labels));
      const auto raw = dphalf::make_image_set(images, labels);
      return fixed_scale ? dphalf::preprocess_with_scale(raw, mode, *fixed_scale)
                         : dphalf::preprocess(raw, mode);
    }
    if (flags.dim == 0) throw UsageError("--dim is required with libsvm input");
    auto loaded = dphalf::load_libsvm(read_file_text(flags.libsvm), flags.dim);
    dphalf::PreprocessedData out;
    out.data = std::move(loaded.data);
    if (mode == dphalf::PreprocessMode::kUnitBall) {
      double scale = 0;
      if (fixed_scale) {
        scale = *fixed_scale;
      } else {
        for (const auto& x : out.data.points)
          scale = std::max(scale, dphalf::norm(x));
        if (scale == 0) scale = 1;
      }
      out.scale = scale;
      for (auto& x : out.data.points) {
        for (double& c : x) c /= scale;
        const double n = dphalf::norm(x);
        if (n > 1.0) {
          for (double& c : x) c /= n;
          ++out.clamped;
        }
      }
    }
    return out;
  } catch (const std::runtime_error& e) {
    if (dynamic_cast<const UsageError*>(&e)) throw;
    throw DataError(e.what());
  }
}

// ---- calibrate ----------------------------------------------------------

struct CalibrateCommand {
  std::string config_path, accountant = "rdp";
  std::optional<double> epsilon, delta, rate;
  std::optional<std::size_t> batch, n;
  std::optional<std::uint64_t> steps;

  explicit CalibrateCommand(CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON config file; flags override");
    cmd->add_option("--epsilon", epsilon, "target epsilon");
    cmd->add_option("--delta", delta, "target delta");
    cmd->add_option("--sampling-rate", rate, "Poisson sampling rate q");
    cmd->add_option("--batch-size", batch, "expected batch size (with --n)");
    cmd->add_option("--n", n, "dataset size (with --batch-size)");
    cmd->add_option("--steps", steps, "number of iterations T");
    cmd->add_option("--accountant", accountant, "rdp | analytic");
    cmd->callback([this, cmd]() { run(cmd); });
  }

  void run(CLI::App* cmd) {
    const ConfigFile cfg(cmd, config_path);
    cfg.fill("epsilon", epsilon);
    cfg.fill("delta", delta);
    cfg.fill("sampling-rate", rate);
    cfg.fill("batch-size", batch);
    cfg.fill("n", n);
    cfg.fill("steps", steps);
    cfg.fill("accountant", accountant);

    require(epsilon.has_value(), "--epsilon");
    require(delta.has_value(), "--delta");
    require(steps.has_value(), "--steps");
    if (!rate && batch && n) {
      if (*n == 0) throw UsageError("--n must be positive");
      rate = std::min(1.0, static_cast<double>(*batch) / static_cast<double>(*n));
    }
    if (accountant == "rdp")
      require(rate.has_value(), "--sampling-rate or --batch-size with --n");

    std::ostringstream out;
    if (accountant == "rdp") {
      const double sigma = dphalf::calibrate_sigma(*epsilon, *delta, *rate, *steps);
      const auto achieved = dphalf::rdp_to_eps(
          dphalf::compose_rdp(dphalf::subsampled_gaussian_curve(*rate, sigma),
                              *steps),
          *delta);
      out << "accountant rdp\n"
          << "sigma " << format_double(sigma) << "\n"
          << "best_order " << format_double(achieved.best_order) << "\n"
          << "achieved_epsilon " << format_double(achieved.epsilon) << "\n";
    } else if (accountant == "analytic") {
      const auto noise = dphalf::prescribed_noise_parameters(*epsilon, *delta, *steps);
      out << "accountant analytic\n"
          << "p " << format_double(noise.p) << "\n"
          << "sigma " << format_double(noise.sigma) << "\n"
          << "b " << format_double(noise.b) << "\n";
      if (*epsilon < 1) {  // the composition chain needs eps in (0,1)
        const auto composed =
            dphalf::perceptron_privacy_check(*epsilon, *delta, *steps).second;
        out << "composed_epsilon " << format_double(composed.epsilon) << "\n"
            << "composed_delta " << format_double(composed.delta) << "\n";
      }
    } else {
      throw UsageError("--accountant must be rdp or analytic");
    }
    out << "target_epsilon " << format_double(*epsilon) << "\n"
        << "target_delta " << format_double(*delta) << "\n"
        << "steps " << *steps << "\n";
    if (rate) out << "sampling_rate " << format_double(*rate) << "\n";
    std::cout << out.str();
  }
};

// ---- train ---------------------------------------------------------------

struct TrainCommand {
  std::string config_path, algo = "perceptron-fixed", mode_str = "pixel",
              out_path;
  DataFlags data_flags;
  std::optional<double> epsilon, delta;
  bool no_privacy = false;
  double gamma_prime = 0.01, alpha = 0.5, learning_rate = 0.1, lambda_reg = 0;
  std::optional<double> kernel_width;
  std::size_t kernel_dim = 2048, candidates = 4096;
  std::size_t batch_size = 500;
  std::int64_t epochs = 1;
  std::uint64_t seed = 1;
  unsigned threads = 1;

  explicit TrainCommand(CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON config file; flags override");
    cmd->add_option("--train-images", data_flags.images, "IDX image file");
    cmd->add_option("--train-labels", data_flags.labels, "IDX label file");
    cmd->add_option("--train-libsvm", data_flags.libsvm, "libsvm text file");
    cmd->add_option("--dim", data_flags.dim, "dense dimension for libsvm input");
    cmd->add_option("--algo", algo,
                    "perceptron | perceptron-fixed | expmech | dpsgd-hinge");
    cmd->add_option("--epsilon", epsilon, "per-class epsilon");
    cmd->add_option("--delta", delta, "per-class delta");
    cmd->add_flag("--no-privacy", no_privacy, "train without noise");
    cmd->add_option("--gamma-prime", gamma_prime, "training margin");
    cmd->add_option("--alpha", alpha, "target accuracy (early-stop threshold)");
    cmd->add_option("--batch-size", batch_size, "expected Poisson batch size");
    cmd->add_option("--epochs", epochs,
                    "number of passes (T = epochs * ceil(n/B))");
    cmd->add_option("--kernel-width", kernel_width, "Gaussian kernel width");
    cmd->add_option("--kernel-dim", kernel_dim,
                    "random Fourier frequencies d_hat");
    cmd->add_option("--candidates", candidates,
                    "exponential-mechanism candidates");
    cmd->add_option("--learning-rate", learning_rate, "dpsgd-hinge learning rate");
    cmd->add_option("--lambda-reg", lambda_reg, "dpsgd-hinge L2 regularization");
    cmd->add_option("--mode", mode_str, "pixel | unit_ball");
    cmd->add_option("--seed", seed, "base seed");
    cmd->add_option("--threads", threads, "per-class training workers");
    cmd->add_option("--out", out_path, "model JSON output path");
    cmd->callback([this, cmd]() { run(cmd); });
  }

  void run(CLI::App* cmd) {
    const ConfigFile cfg(cmd, config_path);
    cfg.fill("train-images", data_flags.images);
    cfg.fill("train-labels", data_flags.labels);
    cfg.fill("train-libsvm", data_flags.libsvm);
    cfg.fill("dim", data_flags.dim);
    cfg.fill("algo", algo);
    cfg.fill("epsilon", epsilon);
    cfg.fill("delta", delta);
    cfg.fill("no-privacy", no_privacy);
    cfg.fill("gamma-prime", gamma_prime);
    cfg.fill("alpha", alpha);
    cfg.fill("batch-size", batch_size);
    cfg.fill("epochs", epochs);
    cfg.fill("kernel-width", kernel_width);
    cfg.fill("kernel-dim", kernel_dim);
    cfg.fill("candidates", candidates);
    cfg.fill("learning-rate", learning_rate);
    cfg.fill("lambda-reg", lambda_reg);
    cfg.fill("mode", mode_str);
    cfg.fill("seed", seed);
    cfg.fill("threads", threads);
    cfg.fill("out", out_path);

    require(!out_path.empty(), "--out");
    if (!no_privacy)
      require(epsilon.has_value() && delta.has_value(),
              "--epsilon and --delta (or --no-privacy)");

    const dphalf::PreprocessMode mode = parse_mode(mode_str);
    dphalf::PreprocessedData input = load_input(data_flags, mode, nullptr);
    dphalf::MulticlassDataset& train = input.data;
    if (train.num_classes < 2) throw DataError("need at least 2 classes");

    dphalf::SeededRng rng(seed);

    std::optional<dphalf::FourierFeatureMap> map;
    if (kernel_width) {
      map = dphalf::sample_feature_map(train.dimension, kernel_dim,
                                       *kernel_width,
                                       rng.child(kFeatureMapStream));
      dphalf::MulticlassDataset embedded;
      embedded.num_classes = train.num_classes;
      embedded.dimension = map->embedded_dim();
      embedded.labels = train.labels;
      embedded.points.reserve(train.size());
      for (const auto& x : train.points)
        embedded.points.push_back(dphalf::embed(*map, x));
      train = std::move(embedded);
    }

    const std::size_t n = train.size();
    const double p =
        std::min(1.0, static_cast<double>(batch_size) / static_cast<double>(n));
    const std::int64_t steps =
        epochs * static_cast<std::int64_t>(
                     std::ceil(static_cast<double>(n) /
                               static_cast<double>(std::min(batch_size, n))));

    std::ostringstream report;
    dphalf::TrainerSpec trainer = make_trainer(p, steps, report);

    dphalf::OneVsRestResult result =
        dphalf::train_one_vs_rest(train, trainer, rng, threads);
    if (map)
      result.model.kernel =
          dphalf::KernelRef{map->input_dim(), map->num_frequencies(),
                            map->sigma_hat, map->seed};

    std::ostringstream canon;
    canon << algo << '|' << mode_str << '|' << gamma_prime << '|' << alpha
          << '|' << batch_size << '|' << epochs << '|' << seed << '|'
          << (no_privacy
                  ? std::string("none")
                  : format_double(*epsilon) + "," + format_double(*delta))
          << '|'
          << (kernel_width ? format_double(*kernel_width) + "," +
                                 std::to_string(kernel_dim)
                           : std::string("none"));
    dphalf::ModelMetadata meta;
    meta.algo = algo;
    meta.digest = dphalf::config_digest(canon.str());
    meta.preprocessing_mode = mode_str;
    meta.unit_ball_scale = input.scale;
    result.model.training_digest = meta.digest;

    write_file(out_path, dphalf::model_to_json(result.model, meta));

    const double k = train.num_classes;
    std::cout << "classes " << train.num_classes << "\n"
              << "examples " << n << "\n"
              << "mode " << mode_str << "\n"
              << "scale " << format_double(input.scale) << "\n";
    if (input.clamped > 0)
      std::cout << "warning " << input.clamped
                << " vectors clamped to unit norm\n";
    std::cout << report.str();
    if (no_privacy) {
      std::cout << "per_class_budget none\n";
    } else {
      // Each one-vs-rest classifier spends (epsilon, delta) on the same
      // dataset; the naive K-fold basic composition is reported alongside.
      std::cout << "per_class_epsilon " << format_double(*epsilon)
                << "\nper_class_delta " << format_double(*delta)
                << "\ncomposed_epsilon " << format_double(k * *epsilon)
                << "\ncomposed_delta " << format_double(k * *delta) << "\n";
    }
    std::cout << "model " << out_path << "\n";
  }

  dphalf::TrainerSpec make_trainer(double p, std::int64_t steps,
                                   std::ostringstream& report) {
    if (algo == "perceptron" || algo == "perceptron-fixed") {
      dphalf::PerceptronConfig pc;
      pc.gamma_prime = gamma_prime;
      pc.p = p;
      pc.iterations = steps;
      pc.alpha = alpha;
      pc.seed = seed;
      pc.mode = algo == "perceptron" ? dphalf::PerceptronMode::kEarlyStop
                                     : dphalf::PerceptronMode::kFixedT;
      if (no_privacy) {
        pc.sigma = 0;  // b stays +inf: nu == 0
      } else if (algo == "perceptron-fixed") {
        // No stopping count to privatize; the Gaussian noise alone is
        // calibrated with the RDP accountant.
        pc.sigma = dphalf::calibrate_sigma(*epsilon, *delta, p,
                                           static_cast<std::uint64_t>(steps));
        const auto achieved = dphalf::rdp_to_eps(
            dphalf::compose_rdp(dphalf::subsampled_gaussian_curve(p, pc.sigma),
                                static_cast<std::uint64_t>(steps)),
            *delta);
        report << "sigma " << format_double(pc.sigma) << "\n"
               << "achieved_epsilon " << format_double(achieved.epsilon)
               << "\n";
      } else {
        // Early-stop variant: prescribed sigma and b for this T, then the
        // composition chain re-checked at the actual sampling rate p
        // (valid whenever p <= 1/sqrt(T); larger batches are refused).
        const auto noise = dphalf::prescribed_noise_parameters(*epsilon, *delta,
                                                          steps);
        const double t = static_cast<double>(steps);
        const double eps0 = *epsilon / (20.0 * std::sqrt(std::log(t / *delta)));
        const double delta0 = *delta / (2.0 * std::sqrt(t));
        const auto amplified = dphalf::amplify_by_subsampling(eps0, delta0, p);
        const auto composed = dphalf::advanced_composition(
            amplified.epsilon, amplified.delta, steps);
        if (composed.epsilon > *epsilon || composed.delta > *delta)
          throw dphalf::CalibrationError(
              "early-stop perceptron: composed budget exceeds target at this "
              "batch size; reduce --batch-size (need p <= 1/sqrt(T))");
        pc.sigma = noise.sigma;
        pc.b = noise.b;
        report << "sigma " << format_double(pc.sigma) << "\n"
               << "b " << format_double(pc.b) << "\n"
               << "composed_epsilon " << format_double(composed.epsilon) << "\n"
               << "composed_delta " << format_double(composed.delta) << "\n";
      }
      return pc;
    }
    if (algo == "expmech") {
      dphalf::ExpMechConfig em;
      // --gamma-prime is the margin the scores are computed at, i.e. the
      // learner's 0.95 * gamma.
      em.gamma = gamma_prime / 0.95;
      em.epsilon = no_privacy ? 0.0 : *epsilon;
      if (no_privacy)
        report << "note expmech with --no-privacy selects uniformly\n";
      em.num_candidates = candidates;
      return em;
    }
    if (algo == "dpsgd-hinge") {
      dphalf::DpSgdHingeConfig sgd;
      sgd.gamma = gamma_prime;
      sgd.sample_rate = p;
      sgd.learning_rate = learning_rate;
      sgd.lambda_reg = lambda_reg;
      sgd.epochs = epochs;
      if (!no_privacy) {
        sgd.epsilon = *epsilon;
        sgd.delta = *delta;
        const auto steps64 =
            static_cast<std::uint64_t>(dphalf::dp_sgd_steps(sgd));
        const double sigma =
            dphalf::calibrate_sigma(*epsilon, *delta, sgd.sample_rate, steps64);
        const auto achieved = dphalf::rdp_to_eps(
            dphalf::compose_rdp(
                dphalf::subsampled_gaussian_curve(sgd.sample_rate, sigma),
                steps64),
            *delta);
        report << "sigma " << format_double(sigma) << "\n"
               << "achieved_epsilon " << format_double(achieved.epsilon)
               << "\n";
      }
      return sgd;
    }
    throw UsageError("unknown --algo " + algo);
  }
};

// ---- evaluate / curve -----------------------------------------------------

struct EvalContext {
  dphalf::LoadedModel loaded;
  std::optional<dphalf::FourierFeatureMap> map;
  dphalf::PreprocessedData test;
};

EvalContext load_eval_context(const std::string& model_path,
                              const DataFlags& flags) {
  EvalContext ctx;
  try {
    ctx.loaded = dphalf::model_from_json(read_file_text(model_path));
  } catch (const std::runtime_error& e) {
    throw DataError(e.what());
  }
  if (ctx.loaded.model.kernel) {
    const auto& ref = *ctx.loaded.model.kernel;
    ctx.map = dphalf::sample_feature_map(ref.input_dim, ref.d_hat, ref.sigma_hat,
                                         dphalf::SeededRng(ref.seed));
  }
  const dphalf::PreprocessMode mode =
      ctx.loaded.meta.preprocessing_mode == "unit_ball"
          ? dphalf::PreprocessMode::kUnitBall
          : dphalf::PreprocessMode::kPixel;
  const double scale = ctx.loaded.meta.unit_ball_scale;
  ctx.test = load_input(flags, mode,
                        mode == dphalf::PreprocessMode::kUnitBall ? &scale
                                                                  : nullptr);
  const std::size_t expected_dim =
      ctx.map ? ctx.map->input_dim() : ctx.loaded.model.dimension;
  if (ctx.test.data.dimension != expected_dim)
    throw DataError("model expects dimension " + std::to_string(expected_dim) +
                    " but test data has " +
                    std::to_string(ctx.test.data.dimension));
  for (int label : ctx.test.data.labels)
    if (label < 0 || label >= ctx.loaded.model.num_classes)
      throw DataError("test label " + std::to_string(label) +
                      " out of the model's class range");
  return ctx;
}

struct EvaluateCommand {
  std::string config_path, model_path, radii_out;
  DataFlags data_flags;

  explicit EvaluateCommand(CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON config file; flags override");
    cmd->add_option("--model", model_path, "model JSON path");
    cmd->add_option("--test-images", data_flags.images, "IDX image file");
    cmd->add_option("--test-labels", data_flags.labels, "IDX label file");
    cmd->add_option("--test-libsvm", data_flags.libsvm, "libsvm text file");
    cmd->add_option("--dim", data_flags.dim, "dense dimension for libsvm input");
    cmd->add_option("--radii-out", radii_out, "per-example radii CSV path");
    cmd->callback([this, cmd]() { run(cmd); });
  }

  void run(CLI::App* cmd) {
    const ConfigFile cfg(cmd, config_path);
    cfg.fill("model", model_path);
    cfg.fill("test-images", data_flags.images);
    cfg.fill("test-labels", data_flags.labels);
    cfg.fill("test-libsvm", data_flags.libsvm);
    cfg.fill("dim", data_flags.dim);
    cfg.fill("radii-out", radii_out);
    require(!model_path.empty(), "--model");

    EvalContext ctx = load_eval_context(model_path, data_flags);
    const auto* map = ctx.map ? &*ctx.map : nullptr;
    const auto& test = ctx.test.data;
    if (ctx.test.clamped > 0)
      std::cout << "warning " << ctx.test.clamped
                << " vectors clamped to unit norm\n";

    std::size_t correct = 0;
    for (std::size_t i = 0; i < test.size(); ++i)
      if (dphalf::predict(ctx.loaded.model, test.points[i], map) ==
          test.labels[i])
        ++correct;
    const double accuracy =
        static_cast<double>(correct) / static_cast<double>(test.size());

    if (!radii_out.empty()) {
      const auto radii = dphalf::per_example_radii(ctx.loaded.model, test, map);
      std::ostringstream csv;
      dphalf::write_radii_csv(ctx.loaded.model, test, radii, map, csv);
      write_file(radii_out, csv.str());
    }
    std::cout << "examples " << test.size() << "\n"
              << "accuracy " << format_double(accuracy) << "\n";
  }
};

struct CurveCommand {
  std::string config_path, model_path, out_path;
  DataFlags data_flags;
  double gamma_max = 2.0;
  std::size_t gamma_steps = 50;

  explicit CurveCommand(CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON config file; flags override");
    cmd->add_option("--model", model_path, "model JSON path");
    cmd->add_option("--test-images", data_flags.images, "IDX image file");
    cmd->add_option("--test-labels", data_flags.labels, "IDX label file");
    cmd->add_option("--test-libsvm", data_flags.libsvm, "libsvm text file");
    cmd->add_option("--dim", data_flags.dim, "dense dimension for libsvm input");
    cmd->add_option("--gamma-max", gamma_max, "largest perturbation norm");
    cmd->add_option("--gamma-steps", gamma_steps, "number of grid points");
    cmd->add_option("--out", out_path, "curve CSV output path");
    cmd->callback([this, cmd]() { run(cmd); });
  }

  void run(CLI::App* cmd) {
    const ConfigFile cfg(cmd, config_path);
    cfg.fill("model", model_path);
    cfg.fill("test-images", data_flags.images);
    cfg.fill("test-labels", data_flags.labels);
    cfg.fill("test-libsvm", data_flags.libsvm);
    cfg.fill("dim", data_flags.dim);
    cfg.fill("gamma-max", gamma_max);
    cfg.fill("gamma-steps", gamma_steps);
    cfg.fill("out", out_path);
    require(!model_path.empty(), "--model");
    require(!out_path.empty(), "--out");
    if (gamma_steps == 0 || !(gamma_max > 0))
      throw UsageError("--gamma-max and --gamma-steps must be positive");

    EvalContext ctx = load_eval_context(model_path, data_flags);
    const auto* map = ctx.map ? &*ctx.map : nullptr;
    if (ctx.test.clamped > 0)
      std::cout << "warning " << ctx.test.clamped
                << " vectors clamped to unit norm\n";

    // Grid of strictly positive gammas: j * gamma_max / steps.
    std::vector<double> gammas(gamma_steps);
    for (std::size_t j = 0; j < gamma_steps; ++j)
      gammas[j] = static_cast<double>(j + 1) * gamma_max /
                  static_cast<double>(gamma_steps);

    const auto curve = dphalf::robust_accuracy_curve(ctx.loaded.model,
                                                     ctx.test.data, gammas, map);
    std::ostringstream csv;
    dphalf::write_curve_csv(curve, csv);
    write_file(out_path, csv.str());
    std::cout << "points " << curve.gammas.size() << "\n"
              << "curve " << out_path << "\n";
  }
};

// ---- synth ------------------------------------------------------------------

struct SynthCommand {
  std::string config_path, out_path, wstar_path;
  std::size_t d = 100, n = 1000;
  double gamma = 0.5;
  std::uint64_t seed = 1;

  explicit SynthCommand(CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON config file; flags override");
    cmd->add_option("--d", d, "dimension");
    cmd->add_option("--n", n, "number of examples");
    cmd->add_option("--gamma", gamma, "realizable margin");
    cmd->add_option("--seed", seed, "generator seed");
    cmd->add_option("--out", out_path, "libsvm output path");
    cmd->add_option("--wstar-out", wstar_path,
                    "w* JSON path (default: <out>.wstar.json)");
    cmd->callback([this, cmd]() { run(cmd); });
  }

  void run(CLI::App* cmd) {
    const ConfigFile cfg(cmd, config_path);
    cfg.fill("d", d);
    cfg.fill("n", n);
    cfg.fill("gamma", gamma);
    cfg.fill("seed", seed);
    cfg.fill("out", out_path);
    cfg.fill("wstar-out", wstar_path);
    require(!out_path.empty(), "--out");
    if (wstar_path.empty()) wstar_path = out_path + ".wstar.json";

    const dphalf::SynthData synth =
        dphalf::synth_margin_dataset(d, n, gamma, seed);

    std::ostringstream svm;
    for (const auto& ex : synth.data.examples) {
      svm << (ex.label > 0 ? "+1" : "-1");
      for (std::size_t j = 0; j < ex.x.size(); ++j)
        if (ex.x[j] != 0.0)
          svm << ' ' << (j + 1) << ':' << format_double(ex.x[j]);
      svm << '\n';
    }
    write_file(out_path, svm.str());

    nlohmann::json wdoc;
    wdoc["dimension"] = d;
    wdoc["gamma"] = gamma;
    wdoc["seed"] = seed;
    nlohmann::json weights = nlohmann::json::array();
    for (double v : synth.w_star.weights) {
      char buf[48];
      std::snprintf(buf, sizeof(buf), "%a", v);
      weights.push_back(std::string(buf));
    }
    wdoc["weights"] = std::move(weights);
    write_file(wstar_path, wdoc.dump(2) + "\n");

    std::cout << "examples " << n << "\n"
              << "data " << out_path << "\n"
              << "wstar " << wstar_path << "\n";
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Differentially private halfspace learning with certified L2 "
               "robustness"};
  app.require_subcommand(1);

  CalibrateCommand calibrate(
      app.add_subcommand("calibrate", "calibrate noise for a budget"));
  TrainCommand train(app.add_subcommand("train", "train a one-vs-rest model"));
  EvaluateCommand evaluate(
      app.add_subcommand("evaluate", "test accuracy and radii"));
  CurveCommand curve(app.add_subcommand("curve", "robust-accuracy curve CSV"));
  SynthCommand synth(
      app.add_subcommand("synth", "generate a margin-realizable dataset"));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return kExitUsage;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const dphalf::CalibrationError& e) {
    std::cerr << "calibration infeasible: " << e.what() << "\n";
    return kExitCalibration;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitOk;
}
