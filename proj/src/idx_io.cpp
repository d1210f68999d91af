#include "idx_io.hpp"

#include <fstream>
#include <string>

#include "errors.hpp"

namespace rapsa {

namespace {
constexpr std::uint32_t kImagesMagic = 0x00000803;
constexpr std::uint32_t kLabelsMagic = 0x00000801;

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw io_error("idx: cannot open " + path.string());
  }
  return std::vector<std::uint8_t>((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
}

std::uint32_t read_be32(const std::vector<std::uint8_t>& bytes, std::size_t offset,
                        const std::filesystem::path& path) {
  if (offset + 4 > bytes.size()) {
    throw parse_error("idx: " + path.string() + " truncated at byte offset " +
                      std::to_string(offset) + " (need 4 more bytes)");
  }
  return (static_cast<std::uint32_t>(bytes[offset]) << 24) |
         (static_cast<std::uint32_t>(bytes[offset + 1]) << 16) |
         (static_cast<std::uint32_t>(bytes[offset + 2]) << 8) |
         static_cast<std::uint32_t>(bytes[offset + 3]);
}

void write_be32(std::ofstream& out, std::uint32_t value) {
  const char bytes[4] = {static_cast<char>(value >> 24), static_cast<char>(value >> 16),
                         static_cast<char>(value >> 8), static_cast<char>(value)};
  out.write(bytes, 4);
}
}  // namespace

IdxImages load_idx_images(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  const std::uint32_t magic = read_be32(bytes, 0, path);
  if (magic != kImagesMagic) {
    throw parse_error("idx: " + path.string() + " has magic 0x" +
                      std::to_string(magic) + " at byte offset 0, expected image magic " +
                      std::to_string(kImagesMagic));
  }
  IdxImages images;
  images.count = read_be32(bytes, 4, path);
  images.rows = read_be32(bytes, 8, path);
  images.cols = read_be32(bytes, 12, path);
  const std::size_t expected = 16 + images.count * images.rows * images.cols;
  if (bytes.size() != expected) {
    throw parse_error("idx: " + path.string() + " has " + std::to_string(bytes.size()) +
                      " bytes, header promises " + std::to_string(expected) +
                      " (truncated or trailing data at byte offset " +
                      std::to_string(std::min(bytes.size(), expected)) + ")");
  }
  images.pixels.assign(bytes.begin() + 16, bytes.end());
  return images;
}

IdxLabels load_idx_labels(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  const std::uint32_t magic = read_be32(bytes, 0, path);
  if (magic != kLabelsMagic) {
    throw parse_error("idx: " + path.string() + " has magic 0x" +
                      std::to_string(magic) + " at byte offset 0, expected label magic " +
                      std::to_string(kLabelsMagic));
  }
  const std::uint32_t count = read_be32(bytes, 4, path);
  const std::size_t expected = 8 + static_cast<std::size_t>(count);
  if (bytes.size() != expected) {
    throw parse_error("idx: " + path.string() + " has " + std::to_string(bytes.size()) +
                      " bytes, header promises " + std::to_string(expected) +
                      " (truncated or trailing data at byte offset " +
                      std::to_string(std::min(bytes.size(), expected)) + ")");
  }
  IdxLabels labels;
  labels.labels.assign(bytes.begin() + 8, bytes.end());
  return labels;
}

void write_idx_images(const std::filesystem::path& path, const IdxImages& images) {
  if (images.pixels.size() != images.count * images.rows * images.cols) {
    throw invalid_argument_error("idx: pixel buffer does not match count*rows*cols");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw io_error("idx: cannot open " + path.string() + " for writing");
  }
  write_be32(out, kImagesMagic);
  write_be32(out, static_cast<std::uint32_t>(images.count));
  write_be32(out, static_cast<std::uint32_t>(images.rows));
  write_be32(out, static_cast<std::uint32_t>(images.cols));
  out.write(reinterpret_cast<const char*>(images.pixels.data()),
            static_cast<std::streamsize>(images.pixels.size()));
  if (!out) {
    throw io_error("idx: write failed for " + path.string());
  }
}

void write_idx_labels(const std::filesystem::path& path, const IdxLabels& labels) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw io_error("idx: cannot open " + path.string() + " for writing");
  }
  write_be32(out, kLabelsMagic);
  write_be32(out, static_cast<std::uint32_t>(labels.labels.size()));
  out.write(reinterpret_cast<const char*>(labels.labels.data()),
            static_cast<std::streamsize>(labels.labels.size()));
  if (!out) {
    throw io_error("idx: write failed for " + path.string());
  }
}

BinaryDataset binary_filter(const IdxImages& images, const IdxLabels& labels, int digit_neg,
                            int digit_pos) {
  if (images.count != labels.labels.size()) {
    throw invalid_argument_error("binary_filter: " + std::to_string(images.count) +
                                 " images but " + std::to_string(labels.labels.size()) +
                                 " labels");
  }
  if (digit_neg == digit_pos) {
    throw invalid_argument_error("binary_filter: the two digits must differ");
  }
  BinaryDataset dataset;
  dataset.dimension = images.rows * images.cols;
  std::size_t neg = 0, pos = 0;
  for (std::size_t n = 0; n < images.count; ++n) {
    const int digit = labels.labels[n];
    if (digit != digit_neg && digit != digit_pos) continue;
    const std::uint8_t* pixels = images.pixels.data() + n * dataset.dimension;
    for (std::size_t j = 0; j < dataset.dimension; ++j) {
      dataset.rows.push_back(static_cast<double>(pixels[j]) / 255.0);
    }
    if (digit == digit_pos) {
      dataset.labels.push_back(1);
      ++pos;
    } else {
      dataset.labels.push_back(-1);
      ++neg;
    }
  }
  if (neg == 0 || pos == 0) {
    throw invalid_argument_error("binary_filter: empty class (digit " +
                                 std::to_string(digit_neg) + ": " + std::to_string(neg) +
                                 " samples, digit " + std::to_string(digit_pos) + ": " +
                                 std::to_string(pos) + ")");
  }
  return dataset;
}

}  // namespace rapsa
