#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace rapsa {

// Reader/writer for the big-endian IDX image and label containers used by
// the MNIST distribution (magic 0x00000803 for uint8 rank-3 images,
// 0x00000801 for uint8 rank-1 labels). Structural problems are reported as
// Error(parse) with the offending byte offset; a file that cannot be opened
// is Error(io).
struct IdxImages {
  std::size_t count = 0;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::uint8_t> pixels;  // count * rows * cols
};

struct IdxLabels {
  std::vector<std::uint8_t> labels;
};

IdxImages load_idx_images(const std::filesystem::path& path);
IdxLabels load_idx_labels(const std::filesystem::path& path);
void write_idx_images(const std::filesystem::path& path, const IdxImages& images);
void write_idx_labels(const std::filesystem::path& path, const IdxLabels& labels);

// Binary classification view of an image set: keeps only samples labeled
// digit_neg or digit_pos (order preserved), flattens each image to a row of
// pixels scaled to [0, 1], and maps digit_neg -> -1, digit_pos -> +1.
// Throws Error(invalid_argument) on image/label count mismatch or when
// either class ends up empty.
struct BinaryDataset {
  std::size_t dimension = 0;
  std::vector<double> rows;          // row-major, labels.size() x dimension
  std::vector<std::int8_t> labels;
};

BinaryDataset binary_filter(const IdxImages& images, const IdxLabels& labels, int digit_neg,
                            int digit_pos);

}  // namespace rapsa
