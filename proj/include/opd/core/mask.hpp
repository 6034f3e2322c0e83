#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "opd/core/error.hpp"
#include "opd/core/types.hpp"

namespace opd {

// Row-major dense boolean grid, index = y * width + x.
struct DenseMask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;

  DenseMask() = default;
  DenseMask(int w, int h) : width(w), height(h), data(static_cast<std::size_t>(w) * h, 0) {}

  bool at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x] != 0; }
  void set(int x, int y, bool v = true) { data[static_cast<std::size_t>(y) * width + x] = v; }
};

// Binary mask stored as column-major run lengths. The first run counts
// zeros and may be empty; every later run is strictly positive.
class BinaryMask {
 public:
  BinaryMask() = default;

  // Validates the run array against the dimensions.
  static BinaryMask from_counts(int width, int height, std::vector<std::uint32_t> counts);

  int width() const { return width_; }
  int height() const { return height_; }
  const std::vector<std::uint32_t>& counts() const { return counts_; }

  // Number of set pixels.
  std::size_t area() const;
  bool empty() const { return area() == 0; }

  DenseMask decode() const;

  bool operator==(const BinaryMask&) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint32_t> counts_;
};

// Encodes any (x, y) -> bool source by walking columns top to bottom.
template <typename IsSet>
BinaryMask rle_encode_columns(int width, int height, IsSet&& is_set) {
  if (width <= 0 || height <= 0) throw DimensionError("cannot encode an empty grid");
  std::vector<std::uint32_t> counts;
  bool current = false;
  std::uint32_t run = 0;
  for (int x = 0; x < width; ++x) {
    for (int y = 0; y < height; ++y) {
      const bool v = is_set(x, y);
      if (v != current) {
        counts.push_back(run);
        run = 0;
        current = v;
      }
      ++run;
    }
  }
  counts.push_back(run);
  return BinaryMask::from_counts(width, height, std::move(counts));
}

BinaryMask rle_encode(const DenseMask& grid);

// |a & b| / |a | b|, 0 when the union is empty.
double mask_iou(const BinaryMask& a, const BinaryMask& b);
std::size_t mask_intersection(const BinaryMask& a, const BinaryMask& b);

double bbox_iou(const BBox& a, const BBox& b);

// Minimal half-open box around the set pixels. Throws on an empty mask.
BBox tight_bbox(const BinaryMask& mask);

}  // namespace opd
