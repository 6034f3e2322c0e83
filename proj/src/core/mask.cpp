#include "opd/core/mask.hpp"

#include <algorithm>
#include <limits>

#include <fmt/format.h>

namespace opd {

BinaryMask BinaryMask::from_counts(int width, int height, std::vector<std::uint32_t> counts) {
  if (width <= 0 || height <= 0) {
    throw DimensionError(fmt::format("mask dimensions must be positive, got {}x{}", width, height));
  }
  if (counts.empty()) throw DimensionError("mask run array is empty");
  std::uint64_t total = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (i > 0 && counts[i] == 0) {
      throw DimensionError(fmt::format("mask run {} is zero; only the leading run may be empty", i));
    }
    total += counts[i];
  }
  const auto expected = static_cast<std::uint64_t>(width) * static_cast<std::uint64_t>(height);
  if (total != expected) {
    throw DimensionError(
        fmt::format("mask runs sum to {} but {}x{} has {} pixels", total, width, height, expected));
  }
  BinaryMask m;
  m.width_ = width;
  m.height_ = height;
  m.counts_ = std::move(counts);
  return m;
}

std::size_t BinaryMask::area() const {
  std::size_t n = 0;
  for (std::size_t i = 1; i < counts_.size(); i += 2) n += counts_[i];
  return n;
}

DenseMask BinaryMask::decode() const {
  DenseMask out(width_, height_);
  std::size_t pos = 0;
  for (std::size_t i = 0; i < counts_.size(); ++i) {
    if (i % 2 == 1) {
      for (std::size_t k = pos; k < pos + counts_[i]; ++k) {
        const int x = static_cast<int>(k / height_);
        const int y = static_cast<int>(k % height_);
        out.set(x, y);
      }
    }
    pos += counts_[i];
  }
  return out;
}

BinaryMask rle_encode(const DenseMask& grid) {
  if (grid.data.size() != static_cast<std::size_t>(grid.width) * std::max(grid.height, 0)) {
    throw DimensionError("dense grid data does not match its dimensions");
  }
  return rle_encode_columns(grid.width, grid.height,
                            [&](int x, int y) { return grid.at(x, y); });
}

std::size_t mask_intersection(const BinaryMask& a, const BinaryMask& b) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw DimensionError(fmt::format("mask dimensions differ: {}x{} vs {}x{}", a.width(),
                                     a.height(), b.width(), b.height()));
  }
  const auto& ca = a.counts();
  const auto& cb = b.counts();
  std::size_t ia = 0, ib = 0;
  std::uint64_t left_a = ca.empty() ? 0 : ca[0];
  std::uint64_t left_b = cb.empty() ? 0 : cb[0];
  std::size_t inter = 0;
  while (ia < ca.size() && ib < cb.size()) {
    // Skip exhausted (possibly empty leading) runs.
    if (left_a == 0) {
      if (++ia < ca.size()) left_a = ca[ia];
      continue;
    }
    if (left_b == 0) {
      if (++ib < cb.size()) left_b = cb[ib];
      continue;
    }
    const std::uint64_t step = std::min(left_a, left_b);
    if ((ia % 2 == 1) && (ib % 2 == 1)) inter += step;
    left_a -= step;
    left_b -= step;
  }
  return inter;
}

double mask_iou(const BinaryMask& a, const BinaryMask& b) {
  const std::size_t inter = mask_intersection(a, b);
  const std::size_t uni = a.area() + b.area() - inter;
  if (uni == 0) return 0.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

double bbox_iou(const BBox& a, const BBox& b) {
  const BBox inter{std::max(a.x_min, b.x_min), std::max(a.y_min, b.y_min),
                   std::min(a.x_max, b.x_max), std::min(a.y_max, b.y_max)};
  const double i = inter.area();
  const double u = a.area() + b.area() - i;
  if (u <= 0.0) return 0.0;
  return i / u;
}

BBox tight_bbox(const BinaryMask& mask) {
  const auto h = static_cast<std::uint64_t>(mask.height());
  const auto& counts = mask.counts();
  std::uint64_t x0 = std::numeric_limits<std::uint64_t>::max(), x1 = 0;
  std::uint64_t y0 = std::numeric_limits<std::uint64_t>::max(), y1 = 0;
  bool any = false;
  std::uint64_t pos = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (i % 2 == 1 && counts[i] > 0) {
      const std::uint64_t first = pos;
      const std::uint64_t last = pos + counts[i] - 1;
      const std::uint64_t col_first = first / h;
      const std::uint64_t col_last = last / h;
      x0 = std::min(x0, col_first);
      x1 = std::max(x1, col_last);
      if (col_first == col_last) {
        y0 = std::min(y0, first % h);
        y1 = std::max(y1, last % h);
      } else {
        // A run crossing a column boundary touches the bottom and top rows.
        y0 = 0;
        y1 = h - 1;
      }
      any = true;
    }
    pos += counts[i];
  }
  if (!any) throw DimensionError("tight_bbox of an empty mask");
  return {static_cast<double>(x0), static_cast<double>(y0), static_cast<double>(x1 + 1),
          static_cast<double>(y1 + 1)};
}

}  // namespace opd
