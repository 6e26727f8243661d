#pragma once

// Independent reference implementations used by the unit and acceptance tests.
// None of them calls into the library code they check.

#include <algorithm>
#include <array>
#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace oracle {

/// Box with coordinates k/den, kept as integers so every comparison is exact.
struct RationalBox {
  std::int64_t x0, y0, x1, y1, den;
  double x_min() const { return static_cast<double>(x0) / den; }
  double y_min() const { return static_cast<double>(y0) / den; }
  double x_max() const { return static_cast<double>(x1) / den; }
  double y_max() const { return static_cast<double>(y1) / den; }
};

/// Does the axis extent [lo, hi] / den claim cell c of n?  Positive extents take every
/// cell they overlap with positive length; a zero extent takes the cell containing it,
/// with the far edge belonging to the last cell.
inline bool claims(std::int64_t lo, std::int64_t hi, std::int64_t den, std::int64_t c, std::int64_t n) {
  if (lo == hi) {
    const std::int64_t cell = std::min(n - 1, lo * n / den);  // floor for non-negative lo
    return c == cell;
  }
  return lo * n < (c + 1) * den && hi * n > c * den;
}

/// Brute force over every cell of a rows x cols grid, row-major.
inline std::vector<std::uint32_t> refbind_cells(const RationalBox& b, std::int64_t rows, std::int64_t cols) {
  std::vector<std::uint32_t> out;
  for (std::int64_t r = 0; r < rows; ++r) {
    if (!claims(b.y0, b.y1, b.den, r, rows)) continue;
    for (std::int64_t c = 0; c < cols; ++c) {
      if (claims(b.x0, b.x1, b.den, c, cols)) out.push_back(static_cast<std::uint32_t>(r * cols + c));
    }
  }
  return out;
}

/// Random box with ordered integer numerators; a share of draws are degenerate or snap
/// to cell edges, which is where floor/ceil slips show up.
inline RationalBox random_rational_box(std::mt19937_64& rng, std::int64_t den) {
  std::uniform_int_distribution<std::int64_t> coord(0, den);
  std::uniform_int_distribution<int> kind(0, 9);
  std::int64_t a = coord(rng), b = coord(rng), c = coord(rng), d = coord(rng);
  if (a > b) std::swap(a, b);
  if (c > d) std::swap(c, d);
  const int k = kind(rng);
  if (k == 0) b = a;  // zero width
  if (k == 1) d = c;  // zero height
  return {a, c, b, d, den};
}

/// Fractional coverage of pixel i (of n) by [lo, hi] intersected with [lo2, hi2].
inline double coverage(double lo, double hi, double lo2, double hi2, int i, int n) {
  const double p0 = static_cast<double>(i) / n;
  const double p1 = static_cast<double>(i + 1) / n;
  const double a = std::max({lo, lo2, p0});
  const double b = std::min({hi, hi2, p1});
  return b > a ? (b - a) * n : 0.0;
}

/// IoU by rasterizing both boxes on an n x n pixel grid with per-pixel area coverage.
/// Pixel (i, j) covered by an axis-aligned box has coverage cx(i) * cy(j), so the grid
/// sum factors into row and column sums.
inline double raster_iou(const std::array<double, 4>& a, const std::array<double, 4>& b, int n = 1000) {
  double ax = 0, ay = 0, bx = 0, by = 0, ix = 0, iy = 0;
  for (int i = 0; i < n; ++i) {
    ax += coverage(a[0], a[2], 0, 1, i, n);
    bx += coverage(b[0], b[2], 0, 1, i, n);
    ix += coverage(a[0], a[2], b[0], b[2], i, n);
    ay += coverage(a[1], a[3], 0, 1, i, n);
    by += coverage(b[1], b[3], 0, 1, i, n);
    iy += coverage(a[1], a[3], b[1], b[3], i, n);
  }
  const double inter = ix * iy;
  const double uni = ax * ay + bx * by - inter;
  return uni > 0 ? inter / uni : 0.0;
}

/// Same quantity by pixel-center sampling on a coarse grid; only good to a few
/// hundredths, used as a sanity check that the factorized oracle agrees with a mask.
inline double mask_iou(const std::array<double, 4>& a, const std::array<double, 4>& b, int n) {
  long inter = 0, uni = 0;
  for (int j = 0; j < n; ++j) {
    const double y = (j + 0.5) / n;
    for (int i = 0; i < n; ++i) {
      const double x = (i + 0.5) / n;
      const bool ina = x >= a[0] && x < a[2] && y >= a[1] && y < a[3];
      const bool inb = x >= b[0] && x < b[2] && y >= b[1] && y < b[3];
      inter += ina && inb;
      uni += ina || inb;
    }
  }
  return uni ? static_cast<double>(inter) / static_cast<double>(uni) : 0.0;
}

/// FNV-1a 64-bit, for frozen-text fixtures.
inline std::uint64_t fnv1a64(const std::string_view s) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace oracle
