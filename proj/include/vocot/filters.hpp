#pragma once

// Pre-training mixture filters over source metadata: interleaved documents,
// grounded captions and small visual-genome regions.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "vocot/geometry.hpp"

namespace vocot {

struct FilterDecision {
  bool keep = true;
  std::string reason;  // empty when kept

  static FilterDecision kept() { return {}; }
  static FilterDecision drop(std::string why) { return {false, std::move(why)}; }
};

struct InterleavedDocMeta {
  std::size_t image_count = 0;
  std::vector<double> similarities;  // sentence-before-image score per image
};

struct GroundedCaptionMeta {
  double clip_score = 0;
};

struct FilterThresholds {
  double min_doc_similarity = 0.3;
  std::size_t max_images = 6;
  bool per_image_minimum = false;  // gate on the weakest image instead of the mean
  double min_clip_score = 0.35;
  double min_region_side = 50;
};

namespace detail {

// Decimal thresholds compared against sums of decimal inputs: treat values within
// rounding noise of the threshold as equal to it.
inline bool strictly_above(double value, double threshold) noexcept {
  return value - threshold > 1e-12;
}

}  // namespace detail

/// Keep iff the mean similarity is above the threshold and there are at most
/// max_images images.
inline FilterDecision filter_interleaved(const InterleavedDocMeta& doc,
                                         const FilterThresholds& t = {}) {
  if (doc.similarities.empty() || doc.image_count != doc.similarities.size()) {
    return FilterDecision::drop("malformed");
  }
  for (double s : doc.similarities) {
    if (!std::isfinite(s)) return FilterDecision::drop("malformed");
  }
  if (doc.image_count > t.max_images) return FilterDecision::drop("too-many-images");
  const double score =
      t.per_image_minimum
          ? *std::min_element(doc.similarities.begin(), doc.similarities.end())
          : std::accumulate(doc.similarities.begin(), doc.similarities.end(), 0.0) /
                static_cast<double>(doc.similarities.size());
  if (!detail::strictly_above(score, t.min_doc_similarity)) return FilterDecision::drop("low-sim");
  return FilterDecision::kept();
}

inline FilterDecision filter_grounded_caption(const GroundedCaptionMeta& meta,
                                              const FilterThresholds& t = {}) {
  if (!(meta.clip_score >= 0.0 && meta.clip_score <= 1.0)) return FilterDecision::drop("malformed");
  if (!detail::strictly_above(meta.clip_score, t.min_clip_score)) return FilterDecision::drop("low-clip");
  return FilterDecision::kept();
}

/// Drops regions whose shorter side is under min_region_side pixels.
inline FilterDecision filter_small_region(const PixelBox& box, const FilterThresholds& t = {}) {
  if (!(box.w > 0) || !(box.h > 0)) return FilterDecision::drop("malformed");
  if (std::min(box.w, box.h) < t.min_region_side) return FilterDecision::drop("small-region");
  return FilterDecision::kept();
}

/// Kept count plus per-reason drops; merge() is associative.
struct FilterTally {
  std::size_t input = 0;
  std::size_t kept = 0;
  std::map<std::string, std::size_t> dropped;

  void add(const FilterDecision& d) {
    ++input;
    if (d.keep) {
      ++kept;
    } else {
      ++dropped[d.reason];
    }
  }

  void merge(const FilterTally& other) {
    input += other.input;
    kept += other.kept;
    for (const auto& [k, v] : other.dropped) dropped[k] += v;
  }

  std::size_t dropped_total() const {
    std::size_t n = 0;
    for (const auto& [_, v] : dropped) n += v;
    return n;
  }

  bool reconciles() const { return input == kept + dropped_total(); }
};

}  // namespace vocot
