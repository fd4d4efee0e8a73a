#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "dphalf/core.hpp"
#include "dphalf/rng.hpp"
#include "dphalf/trainers.hpp"

namespace dphalf {

// Raw byte images with class labels 0..9.
struct RawImageSet {
  std::vector<std::vector<std::uint8_t>> images;  // each rows*cols, row-major
  std::vector<int> labels;
  std::size_t rows = 0;
  std::size_t cols = 0;
};

struct IdxImages {
  std::size_t count = 0;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::uint8_t> pixels;  // count * rows * cols
};

// IDX binary containers (magic 0x00000803 for images, 0x00000801 for
// labels, all integers big-endian). Trailing bytes are an error.
IdxImages load_idx_images(std::span<const std::uint8_t> bytes);
std::vector<int> load_idx_labels(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> serialize_idx_images(const IdxImages& images);
std::vector<std::uint8_t> serialize_idx_labels(const std::vector<int>& labels);

RawImageSet make_image_set(const IdxImages& images,
                           const std::vector<int>& labels);

// libsvm text: `<label> <index>:<value> ...` per line, 1-based strictly
// increasing indices, densified to `dimension`. Observed labels are
// remapped to 0-based contiguous classes in sorted order.
struct LibsvmData {
  MulticlassDataset data;
  std::vector<double> label_values;  // class c came from label_values[c]
};
LibsvmData load_libsvm(std::string_view text, std::size_t dimension);

enum class PreprocessMode { kPixel, kUnitBall };

struct PreprocessedData {
  MulticlassDataset data;
  // Global L2 rescaling constant (1 in pixel mode); divided out of every
  // vector in unit-ball mode. Comes from the training split.
  double scale = 1.0;
  // Test vectors whose post-scaling norm exceeded 1 and were clamped.
  std::size_t clamped = 0;
};

// Pixel mode: divide by 255, flatten row-major. Unit-ball mode:
// additionally divide every vector by the largest L2 norm of the set.
PreprocessedData preprocess(const RawImageSet& raw, PreprocessMode mode);

// Same, but with a scale fixed by the training split. Vectors that still
// land above norm 1 are clamped back to the unit sphere and counted.
PreprocessedData preprocess_with_scale(const RawImageSet& raw,
                                       PreprocessMode mode, double scale);

struct SynthData {
  Dataset data;
  Halfspace w_star;  // unit norm
};

// Margin-realizable synthetic set: w* uniform on the sphere, x uniform in
// the unit ball resampled until |<w*, x>| > gamma, y = sign(<w*, x>).
SynthData synth_margin_dataset(std::size_t d, std::size_t n, double gamma,
                               std::uint64_t seed);

}  // namespace dphalf
