#include "dphalf/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <stdexcept>
#include <string>

namespace dphalf {

namespace {

constexpr std::uint32_t kImageMagic = 0x00000803;
constexpr std::uint32_t kLabelMagic = 0x00000801;

std::uint32_t read_be32(std::span<const std::uint8_t> bytes, std::size_t at) {
  return (static_cast<std::uint32_t>(bytes[at]) << 24) |
         (static_cast<std::uint32_t>(bytes[at + 1]) << 16) |
         (static_cast<std::uint32_t>(bytes[at + 2]) << 8) |
         static_cast<std::uint32_t>(bytes[at + 3]);
}

void append_be32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 24));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

}  // namespace

IdxImages load_idx_images(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 16) throw std::runtime_error("idx images: truncated header");
  if (read_be32(bytes, 0) != kImageMagic)
    throw std::runtime_error("idx images: wrong magic");
  IdxImages out;
  out.count = read_be32(bytes, 4);
  out.rows = read_be32(bytes, 8);
  out.cols = read_be32(bytes, 12);
  // Header fields are untrusted; the product must not wrap.
  if (out.rows != 0 && out.cols != 0 &&
      out.count > bytes.size() / (out.rows * out.cols))
    throw std::runtime_error("idx images: truncated payload");
  const std::size_t payload = out.count * out.rows * out.cols;
  if (bytes.size() < 16 + payload)
    throw std::runtime_error("idx images: truncated payload");
  if (bytes.size() > 16 + payload)
    throw std::runtime_error("idx images: trailing data");
  out.pixels.assign(bytes.begin() + 16, bytes.end());
  return out;
}

std::vector<int> load_idx_labels(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 8) throw std::runtime_error("idx labels: truncated header");
  if (read_be32(bytes, 0) != kLabelMagic)
    throw std::runtime_error("idx labels: wrong magic");
  const std::size_t count = read_be32(bytes, 4);
  if (bytes.size() < 8 + count)
    throw std::runtime_error("idx labels: truncated payload");
  if (bytes.size() > 8 + count)
    throw std::runtime_error("idx labels: trailing data");
  std::vector<int> labels;
  labels.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const int v = bytes[8 + i];
    if (v > 9)
      throw std::runtime_error("idx labels: label out of range at index " +
                               std::to_string(i));
    labels.push_back(v);
  }
  return labels;
}

std::vector<std::uint8_t> serialize_idx_images(const IdxImages& images) {
  if (images.pixels.size() != images.count * images.rows * images.cols)
    throw std::invalid_argument("serialize_idx_images: size mismatch");
  std::vector<std::uint8_t> out;
  out.reserve(16 + images.pixels.size());
  append_be32(out, kImageMagic);
  append_be32(out, static_cast<std::uint32_t>(images.count));
  append_be32(out, static_cast<std::uint32_t>(images.rows));
  append_be32(out, static_cast<std::uint32_t>(images.cols));
  out.insert(out.end(), images.pixels.begin(), images.pixels.end());
  return out;
}

std::vector<std::uint8_t> serialize_idx_labels(const std::vector<int>& labels) {
  std::vector<std::uint8_t> out;
  out.reserve(8 + labels.size());
  append_be32(out, kLabelMagic);
  append_be32(out, static_cast<std::uint32_t>(labels.size()));
  for (int v : labels) {
    if (v < 0 || v > 9)
      throw std::invalid_argument("serialize_idx_labels: label out of range");
    out.push_back(static_cast<std::uint8_t>(v));
  }
  return out;
}

RawImageSet make_image_set(const IdxImages& images,
                           const std::vector<int>& labels) {
  if (images.count != labels.size())
    throw std::runtime_error("image/label counts differ");
  RawImageSet out;
  out.rows = images.rows;
  out.cols = images.cols;
  out.labels = labels;
  const std::size_t stride = images.rows * images.cols;
  out.images.reserve(images.count);
  for (std::size_t i = 0; i < images.count; ++i)
    out.images.emplace_back(images.pixels.begin() + i * stride,
                            images.pixels.begin() + (i + 1) * stride);
  return out;
}

LibsvmData load_libsvm(std::string_view text, std::size_t dimension) {
  if (dimension == 0) throw std::invalid_argument("load_libsvm: dimension == 0");
  std::vector<double> raw_labels;
  std::vector<FeatureVector> points;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = std::min(text.find('\n', pos), text.size());
    std::string line(text.substr(pos, eol - pos));
    pos = eol + 1;
    ++line_no;
    if (line.empty() ||
        line.find_first_not_of(" \t\r") == std::string::npos)
      continue;

    const auto fail = [&](const std::string& what) {
      throw std::runtime_error("libsvm line " + std::to_string(line_no) + ": " +
                               what);
    };

    const char* cur = line.c_str();
    char* end = nullptr;
    const double label = std::strtod(cur, &end);
    if (end == cur) fail("missing label");
    cur = end;

    FeatureVector x(dimension, 0.0);
    long prev_index = 0;
    while (true) {
      while (*cur == ' ' || *cur == '\t' || *cur == '\r') ++cur;
      if (*cur == '\0') break;
      const long index = std::strtol(cur, &end, 10);
      if (end == cur || *end != ':') fail("malformed index:value pair");
      cur = end + 1;
      const double value = std::strtod(cur, &end);
      if (end == cur) fail("malformed value");
      cur = end;
      if (index < 1) fail("index must be 1-based");
      if (index == prev_index) fail("duplicate index");
      if (index < prev_index) fail("indices must be strictly increasing");
      if (static_cast<std::size_t>(index) > dimension)
        fail("index " + std::to_string(index) + " exceeds dimension " +
             std::to_string(dimension));
      x[index - 1] = value;
      prev_index = index;
    }
    raw_labels.push_back(label);
    points.push_back(std::move(x));
  }

  std::map<double, int> class_of;
  for (double l : raw_labels) class_of.emplace(l, 0);
  LibsvmData out;
  out.label_values.reserve(class_of.size());
  for (auto& [value, cls] : class_of) {
    cls = static_cast<int>(out.label_values.size());
    out.label_values.push_back(value);
  }
  out.data.points = std::move(points);
  out.data.labels.reserve(raw_labels.size());
  for (double l : raw_labels) out.data.labels.push_back(class_of[l]);
  out.data.num_classes = static_cast<int>(out.label_values.size());
  out.data.dimension = dimension;
  return out;
}

namespace {

PreprocessedData preprocess_impl(const RawImageSet& raw, PreprocessMode mode,
                                 const double* fixed_scale) {
  if (raw.images.empty()) throw std::runtime_error("preprocess: empty set");
  if (raw.images.size() != raw.labels.size())
    throw std::runtime_error("preprocess: image/label counts differ");

  PreprocessedData out;
  out.data.dimension = raw.rows * raw.cols;
  out.data.num_classes = 10;
  out.data.labels = raw.labels;
  out.data.points.reserve(raw.images.size());
  for (const auto& img : raw.images) {
    if (img.size() != out.data.dimension)
      throw std::runtime_error("preprocess: image size mismatch");
    FeatureVector x(img.size());
    for (std::size_t j = 0; j < img.size(); ++j)
      x[j] = static_cast<double>(img[j]) / 255.0;
    out.data.points.push_back(std::move(x));
  }

  if (mode == PreprocessMode::kPixel) return out;

  double scale;
  if (fixed_scale != nullptr) {
    scale = *fixed_scale;
  } else {
    scale = 0;
    for (const auto& x : out.data.points) scale = std::max(scale, norm(x));
    if (scale == 0) scale = 1;  // all-black set; nothing to rescale
  }
  out.scale = scale;
  for (auto& x : out.data.points) {
    for (double& c : x) c /= scale;
    const double n = norm(x);
    if (n > 1.0) {
      for (double& c : x) c /= n;
      ++out.clamped;
    }
  }
  return out;
}

}  // namespace

PreprocessedData preprocess(const RawImageSet& raw, PreprocessMode mode) {
  return preprocess_impl(raw, mode, nullptr);
}

PreprocessedData preprocess_with_scale(const RawImageSet& raw,
                                       PreprocessMode mode, double scale) {
  if (!(scale > 0)) throw std::invalid_argument("preprocess: scale <= 0");
  return preprocess_impl(raw, mode, &scale);
}

namespace {

// Inverse-CDF sampler for |<w*, x>| of a uniform unit-ball point
// conditioned on exceeding gamma. The marginal density of t = <w*, x> is
// proportional to (1 - t^2)^((d-1)/2) (each slice of the ball is a
// (d-1)-ball), so the conditional law on (gamma, 1) is tabulated once and
// inverted per draw. Weights are built in log space: at large d the
// density underflows long before the table loses shape.
class MarginComponentSampler {
 public:
  MarginComponentSampler(std::size_t d, double gamma) : gamma_(gamma) {
    const double exponent = 0.5 * (static_cast<double>(d) - 1.0);
    std::vector<double> log_density(kCells + 1);
    double log_max = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i <= kCells; ++i) {
      const double t = node(i);
      log_density[i] = t < 1.0 ? exponent * std::log1p(-t * t)
                               : -std::numeric_limits<double>::infinity();
      log_max = std::max(log_max, log_density[i]);
    }
    cdf_.resize(kCells + 1, 0.0);
    for (std::size_t i = 1; i <= kCells; ++i) {
      const double a = std::exp(log_density[i - 1] - log_max);
      const double b = std::exp(log_density[i] - log_max);
      cdf_[i] = cdf_[i - 1] + 0.5 * (a + b);
    }
    for (double& c : cdf_) c /= cdf_[kCells];
  }

  double sample(SeededRng& rng) const {
    const double u = rng.uniform_open();
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    const std::size_t hi = std::min<std::size_t>(it - cdf_.begin(), kCells);
    const std::size_t lo = hi - 1;
    const double span = cdf_[hi] - cdf_[lo];
    const double frac = span > 0 ? (u - cdf_[lo]) / span : 0.5;
    return node(lo) + frac * (node(hi) - node(lo));
  }

 private:
  static constexpr std::size_t kCells = 4096;

  double node(std::size_t i) const {
    return gamma_ + (1.0 - gamma_) * static_cast<double>(i) /
                        static_cast<double>(kCells);
  }

  double gamma_;
  std::vector<double> cdf_;
};

}  // namespace

SynthData synth_margin_dataset(std::size_t d, std::size_t n, double gamma,
                               std::uint64_t seed) {
  if (d == 0 || n == 0)
    throw std::invalid_argument("synth_margin_dataset: empty shape");
  if (!(gamma > 0 && gamma < 1))
    throw std::invalid_argument("synth_margin_dataset: gamma out of (0,1)");

  SeededRng rng(seed);
  std::vector<double> w(d);
  for (double& c : w) c = rng.gaussian();
  SynthData out;
  out.w_star = Halfspace{normalized(w)};
  const std::vector<double>& w_star = out.w_star.weights;
  out.data.dimension = d;
  out.data.examples.reserve(n);

  // Uniform ball point conditioned on |<w*, x>| > gamma, sampled exactly
  // by decomposition: the margin component t from its conditional
  // marginal, then a uniform point of the (d-1)-ball slice of radius
  // sqrt(1 - t^2) in the hyperplane orthogonal to w*. Naive
  // resample-until-margin has acceptance probability (1 - gamma^2)^O(d),
  // hopeless already at d = 100, gamma = 0.5.
  const MarginComponentSampler margin_sampler(d, gamma);
  for (std::size_t i = 0; i < n; ++i) {
    while (true) {
      const double t = margin_sampler.sample(rng);
      const int label = rng.bernoulli(0.5) ? 1 : -1;

      std::vector<double> x(d, 0.0);
      if (d > 1) {
        std::vector<double> perp(d);
        do {
          for (double& c : perp) c = rng.gaussian();
          const double along = dot(perp, w_star);
          for (std::size_t j = 0; j < d; ++j) perp[j] -= along * w_star[j];
        } while (is_zero(perp));
        const double perp_norm = norm(perp);
        const double s =
            std::sqrt(std::max(0.0, 1.0 - t * t)) *
            std::pow(rng.uniform_open(), 1.0 / static_cast<double>(d - 1));
        for (std::size_t j = 0; j < d; ++j) x[j] = s * perp[j] / perp_norm;
      }
      for (std::size_t j = 0; j < d; ++j) x[j] += label * t * w_star[j];

      // Rounding at the first table cell can land the realized margin on
      // gamma itself; the strict-margin guarantee is re-checked on the
      // final coordinates.
      if (label * dot(w_star, x) > gamma && norm(x) <= 1.0) {
        out.data.examples.push_back(LabeledExample{std::move(x), label});
        break;
      }
    }
  }
  return out;
}

}  // namespace dphalf
