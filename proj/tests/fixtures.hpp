// Shared test fixtures: a procedurally generated 10-class digit-style
// image set in IDX form. Each class lights up its own two-row band of a
// 28x28 grid over a dim noisy background, which makes the task linearly
// separable with wide margins while still exercising the full
// image-ingestion and training pipeline.
#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "dphalf/data.hpp"
#include "dphalf/rng.hpp"

namespace fixtures {

inline dphalf::IdxImages synth_digit_images(const std::vector<int>& labels,
                                            dphalf::SeededRng& rng) {
  dphalf::IdxImages images;
  images.count = labels.size();
  images.rows = 28;
  images.cols = 28;
  images.pixels.reserve(images.count * 784);
  for (int label : labels) {
    const std::size_t band_start = 28 * (2 * label + 3);
    const std::size_t band_end = band_start + 2 * 28;
    for (std::size_t p = 0; p < 784; ++p) {
      const bool bright = p >= band_start && p < band_end;
      const int base = bright ? 185 : 8;
      const int jitter = static_cast<int>(rng.uniform() * (bright ? 70 : 25));
      images.pixels.push_back(static_cast<std::uint8_t>(base + jitter));
    }
  }
  return images;
}

struct DigitFiles {
  std::string train_images, train_labels, test_images, test_labels;
};

inline DigitFiles write_digit_dataset(const std::filesystem::path& dir,
                                      std::size_t n_train, std::size_t n_test,
                                      std::uint64_t seed) {
  std::filesystem::create_directories(dir);
  dphalf::SeededRng rng(seed);

  const auto make_split = [&](std::size_t n, const std::string& prefix) {
    std::vector<int> labels(n);
    for (std::size_t i = 0; i < n; ++i) labels[i] = static_cast<int>(i % 10);
    const auto images = synth_digit_images(labels, rng);
    const auto image_path = (dir / (prefix + "-images-idx3-ubyte")).string();
    const auto label_path = (dir / (prefix + "-labels-idx1-ubyte")).string();
    const auto image_bytes = dphalf::serialize_idx_images(images);
    const auto label_bytes = dphalf::serialize_idx_labels(labels);
    std::ofstream(image_path, std::ios::binary)
        .write(reinterpret_cast<const char*>(image_bytes.data()),
               static_cast<std::streamsize>(image_bytes.size()));
    std::ofstream(label_path, std::ios::binary)
        .write(reinterpret_cast<const char*>(label_bytes.data()),
               static_cast<std::streamsize>(label_bytes.size()));
    return std::pair{image_path, label_path};
  };

  DigitFiles files;
  std::tie(files.train_images, files.train_labels) =
      make_split(n_train, "train");
  std::tie(files.test_images, files.test_labels) = make_split(n_test, "t10k");
  return files;
}

}  // namespace fixtures
