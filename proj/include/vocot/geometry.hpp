#pragma once

// Normalized box arithmetic, coordinate text and RefBind patch indexing.

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "vocot/error.hpp"

namespace vocot {

/// Box in fractions of image width/height, [x_min, y_min, x_max, y_max].
class BoundingBox {
 public:
  BoundingBox() = default;
  BoundingBox(double x_min, double y_min, double x_max, double y_max)
      : x_min_(x_min), y_min_(y_min), x_max_(x_max), y_max_(y_max) {
    // Negated comparisons so NaN is rejected too.
    if (!(0.0 <= x_min && x_min <= x_max && x_max <= 1.0) ||
        !(0.0 <= y_min && y_min <= y_max && y_max <= 1.0)) {
      throw InvalidInput("bounding box out of range or inverted: [" + std::to_string(x_min) +
                         ", " + std::to_string(y_min) + ", " + std::to_string(x_max) + ", " +
                         std::to_string(y_max) + "]");
    }
  }

  double x_min() const noexcept { return x_min_; }
  double y_min() const noexcept { return y_min_; }
  double x_max() const noexcept { return x_max_; }
  double y_max() const noexcept { return y_max_; }

  double width() const noexcept { return x_max_ - x_min_; }
  double height() const noexcept { return y_max_ - y_min_; }
  double area() const noexcept { return width() * height(); }

  std::array<double, 4> coords() const noexcept { return {x_min_, y_min_, x_max_, y_max_}; }

  bool contains(const BoundingBox& other) const noexcept {
    return x_min_ <= other.x_min_ && y_min_ <= other.y_min_ && other.x_max_ <= x_max_ &&
           other.y_max_ <= y_max_;
  }

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;

 private:
  double x_min_ = 0.0;
  double y_min_ = 0.0;
  double x_max_ = 1.0;
  double y_max_ = 1.0;
};

/// Scene-graph style pixel box: top-left corner plus size.
struct PixelBox {
  double x = 0;
  double y = 0;
  double w = 0;
  double h = 0;
  double image_width = 0;
  double image_height = 0;
};

struct PatchGrid {
  std::uint32_t rows = 24;
  std::uint32_t cols = 24;

  PatchGrid() = default;
  PatchGrid(std::uint32_t r, std::uint32_t c) : rows(r), cols(c) {
    if (rows == 0 || cols == 0) throw InvalidInput("patch grid needs at least one row and column");
  }
  std::uint32_t size() const noexcept { return rows * cols; }
  friend bool operator==(const PatchGrid&, const PatchGrid&) = default;
};

/// Inclusive patch ranges plus their row-major flat indices.
struct PatchSpan {
  std::uint32_t row_lo = 0;
  std::uint32_t row_hi = 0;
  std::uint32_t col_lo = 0;
  std::uint32_t col_hi = 0;
  std::vector<std::uint32_t> indices;

  std::uint32_t span_rows() const noexcept { return row_hi - row_lo + 1; }
  std::uint32_t span_cols() const noexcept { return col_hi - col_lo + 1; }
  friend bool operator==(const PatchSpan&, const PatchSpan&) = default;
};

enum class CoverRule {
  kInclusive,  // every cell whose interior the box touches
  kCenter,     // cells whose center lies inside the box
};

/// Clamps overflowing pixel boxes into the image; bumps `clamped` when it had to.
inline BoundingBox normalize_box(const PixelBox& p, std::size_t* clamped = nullptr) {
  if (!(p.image_width > 0) || !(p.image_height > 0)) {
    throw InvalidInput("image dimensions must be positive");
  }
  if (!(p.w > 0) || !(p.h > 0) || !std::isfinite(p.x) || !std::isfinite(p.y) ||
      !std::isfinite(p.w) || !std::isfinite(p.h)) {
    throw InvalidInput("pixel box needs positive finite width and height");
  }
  std::array<double, 4> raw = {p.x / p.image_width, p.y / p.image_height,
                               (p.x + p.w) / p.image_width, (p.y + p.h) / p.image_height};
  bool did_clamp = false;
  for (double& v : raw) {
    const double c = std::clamp(v, 0.0, 1.0);
    if (c != v) did_clamp = true;
    v = c;
  }
  if (did_clamp && clamped != nullptr) ++*clamped;
  return BoundingBox(raw[0], raw[1], raw[2], raw[3]);
}

inline PixelBox denormalize_box(const BoundingBox& b, double image_width, double image_height) {
  if (!(image_width > 0) || !(image_height > 0)) {
    throw InvalidInput("image dimensions must be positive");
  }
  return PixelBox{b.x_min() * image_width,  b.y_min() * image_height,
                  b.width() * image_width,  b.height() * image_height,
                  image_width,              image_height};
}

/// Intersection over union. Two zero-area boxes give 0.
inline double iou(const BoundingBox& a, const BoundingBox& b) noexcept {
  const double iw = std::max(0.0, std::min(a.x_max(), b.x_max()) - std::max(a.x_min(), b.x_min()));
  const double ih = std::max(0.0, std::min(a.y_max(), b.y_max()) - std::max(a.y_min(), b.y_min()));
  const double inter = iw * ih;
  const double uni = a.area() + b.area() - inter;
  if (uni <= 0.0) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

namespace detail {

// Products like (1/24)*24 land a few ulps off the integer they denote.
inline double snap_to_integer(double v) noexcept {
  const double r = std::round(v);
  return std::abs(v - r) < 1e-9 ? r : v;
}

inline std::pair<std::uint32_t, std::uint32_t> inclusive_range(double lo, double hi,
                                                               std::uint32_t n) noexcept {
  const auto last = static_cast<std::int64_t>(n) - 1;
  auto first = static_cast<std::int64_t>(std::floor(snap_to_integer(lo * n)));
  auto end = static_cast<std::int64_t>(std::ceil(snap_to_integer(hi * n))) - 1;
  first = std::clamp<std::int64_t>(first, 0, last);
  end = std::min(end, last);
  if (end < first) end = first;  // degenerate extent: containing cell
  return {static_cast<std::uint32_t>(first), static_cast<std::uint32_t>(end)};
}

inline std::pair<std::uint32_t, std::uint32_t> center_range(double lo, double hi,
                                                            std::uint32_t n) noexcept {
  // Cell c has center (c + 0.5) / n; keep those within [lo, hi].
  const auto last = static_cast<std::int64_t>(n) - 1;
  auto first = static_cast<std::int64_t>(std::ceil(snap_to_integer(lo * n - 0.5)));
  auto end = static_cast<std::int64_t>(std::floor(snap_to_integer(hi * n - 0.5)));
  first = std::clamp<std::int64_t>(first, 0, last);
  end = std::min(end, last);
  if (end < first) {
    const auto mid = static_cast<std::int64_t>(std::floor((lo + hi) * 0.5 * n));
    first = end = std::clamp<std::int64_t>(mid, 0, last);
  }
  return {static_cast<std::uint32_t>(first), static_cast<std::uint32_t>(end)};
}

}  // namespace detail

/// Patches an object occupies on the flattened feature grid. Always at least one.
inline PatchSpan refbind_indices(const BoundingBox& box, const PatchGrid& grid,
                                 CoverRule rule = CoverRule::kInclusive) {
  PatchSpan span;
  const auto range = rule == CoverRule::kInclusive ? detail::inclusive_range : detail::center_range;
  std::tie(span.col_lo, span.col_hi) = range(box.x_min(), box.x_max(), grid.cols);
  std::tie(span.row_lo, span.row_hi) = range(box.y_min(), box.y_max(), grid.rows);
  span.indices.reserve(static_cast<std::size_t>(span.span_rows()) * span.span_cols());
  for (std::uint32_t r = span.row_lo; r <= span.row_hi; ++r) {
    for (std::uint32_t c = span.col_lo; c <= span.col_hi; ++c) {
      span.indices.push_back(r * grid.cols + c);
    }
  }
  return span;
}

/// Rebuilds the span from flat indices; they must form a full row-major rectangle.
inline PatchSpan span_from_indices(const std::vector<std::uint32_t>& indices,
                                   const PatchGrid& grid) {
  if (indices.empty()) throw InvalidInput("empty patch index list");
  PatchSpan span;
  span.row_lo = indices.front() / grid.cols;
  span.col_lo = indices.front() % grid.cols;
  span.row_hi = indices.back() / grid.cols;
  span.col_hi = indices.back() % grid.cols;
  if (span.row_hi >= grid.rows || span.row_lo > span.row_hi || span.col_lo > span.col_hi) {
    throw InvalidInput("patch indices do not describe a rectangle on the grid");
  }
  span.indices.reserve(indices.size());
  for (std::uint32_t r = span.row_lo; r <= span.row_hi; ++r) {
    for (std::uint32_t c = span.col_lo; c <= span.col_hi; ++c) {
      span.indices.push_back(r * grid.cols + c);
    }
  }
  if (span.indices != indices) {
    throw InvalidInput("patch indices do not describe a rectangle on the grid");
  }
  return span;
}

/// Fixed-point text for v in [0, 1], rounding half up on the shortest decimal form
/// (so 0.2235 becomes 0.224 even though its binary value sits just below).
inline std::string format_fixed(double v, int precision) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed);
  if (ec != std::errc{}) throw InvalidInput("cannot format coordinate");
  std::string s(buf, end);
  const bool negative = !s.empty() && s.front() == '-';
  if (negative) s.erase(0, 1);

  std::string int_part = s;
  std::string frac;
  if (auto dot = s.find('.'); dot != std::string::npos) {
    int_part = s.substr(0, dot);
    frac = s.substr(dot + 1);
  }
  const auto p = static_cast<std::size_t>(precision);
  bool round_up = frac.size() > p && frac[p] >= '5';
  frac.resize(p, '0');
  std::string digits = int_part + frac;
  if (round_up) {
    std::size_t i = digits.size();
    while (i > 0) {
      --i;
      if (digits[i] == '9') {
        digits[i] = '0';
      } else {
        ++digits[i];
        round_up = false;
        break;
      }
    }
    if (round_up) digits.insert(digits.begin(), '1');
  }
  std::string out = digits.substr(0, digits.size() - p);
  if (p > 0) out += "." + digits.substr(digits.size() - p);
  return negative ? "-" + out : out;
}

/// "x_min, y_min, x_max, y_max" with fixed decimals.
inline std::string format_coords(const BoundingBox& box, int precision = 3) {
  if (precision < 0 || precision > 9) throw InvalidInput("precision out of range");
  std::string out;
  for (double v : box.coords()) {
    if (!out.empty()) out += ", ";
    out += format_fixed(v, precision);
  }
  return out;
}

/// Bracketed form used inside grounded thoughts: "[x_min, y_min, x_max, y_max]".
inline std::string format_box(const BoundingBox& box, int precision = 3) {
  return "[" + format_coords(box, precision) + "]";
}

namespace detail {

inline bool is_space(char c) noexcept {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

inline bool is_digit(char c) noexcept { return c >= '0' && c <= '9'; }

// Accepts "1", "0.5", "0.123"; no sign, no exponent.
inline std::size_t scan_number(std::string_view s, std::size_t pos, double& out) {
  const std::size_t start = pos;
  while (pos < s.size() && is_digit(s[pos])) ++pos;
  if (pos == start) throw ParseError("expected number", start);
  if (pos < s.size() && s[pos] == '.') {
    ++pos;
    const std::size_t frac = pos;
    while (pos < s.size() && is_digit(s[pos])) ++pos;
    if (pos == frac) throw ParseError("expected fraction digits", frac);
  }
  auto [ptr, ec] = std::from_chars(s.data() + start, s.data() + pos, out);
  if (ec != std::errc{} || ptr != s.data() + pos) throw ParseError("bad number", start);
  return pos;
}

inline std::size_t skip_space(std::string_view s, std::size_t pos) noexcept {
  while (pos < s.size() && is_space(s[pos])) ++pos;
  return pos;
}

}  // namespace detail

/// Inverse of format_coords/format_box. Whitespace around numbers and commas is ignored.
inline BoundingBox parse_coords(std::string_view text) {
  std::size_t pos = detail::skip_space(text, 0);
  const bool bracketed = pos < text.size() && text[pos] == '[';
  if (bracketed) pos = detail::skip_space(text, pos + 1);
  const std::size_t first_number = pos;
  std::array<double, 4> v{};
  for (std::size_t i = 0; i < 4; ++i) {
    if (i > 0) {
      pos = detail::skip_space(text, pos);
      if (pos >= text.size() || text[pos] != ',') throw ParseError("expected ','", pos);
      pos = detail::skip_space(text, pos + 1);
    }
    pos = detail::scan_number(text, pos, v[i]);
  }
  pos = detail::skip_space(text, pos);
  if (bracketed) {
    if (pos >= text.size() || text[pos] != ']') throw ParseError("expected ']'", pos);
    pos = detail::skip_space(text, pos + 1);
  }
  if (pos != text.size()) throw ParseError("trailing characters", pos);
  try {
    return BoundingBox(v[0], v[1], v[2], v[3]);
  } catch (const InvalidInput& e) {
    throw ParseError(e.what(), first_number);
  }
}

}  // namespace vocot
