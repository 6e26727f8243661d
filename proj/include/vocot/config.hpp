#pragma once

// Run configuration. Files are "key = value" lines; '#' starts a comment.

#include <cstdint>
#include <fstream>
#include <iterator>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "vocot/error.hpp"
#include "vocot/eval.hpp"
#include "vocot/filters.hpp"
#include "vocot/geometry.hpp"
#include "vocot/synthesis.hpp"
#include "vocot/text.hpp"

namespace vocot {

inline constexpr std::string_view kToolkitVersion = "0.1.0";
inline constexpr int kRecordSchemaVersion = 1;

/// Target instruction mix by source type, kept for manifest accounting.
struct ReferenceMix {
  std::size_t type1 = 72000;
  std::size_t type2 = 6000;
  std::size_t type3 = 2000;
};

struct Config {
  std::uint64_t seed = 17;
  int precision = 3;                // coordinates in emitted thoughts and sequences
  int object_info_precision = 2;    // coordinates shown to the generator
  int synthesis_precision = 2;      // coordinates of accepted generated thoughts
  PatchGrid grid{24, 24};
  CoverRule cover = CoverRule::kInclusive;
  RecOptions rec;
  FilterThresholds filters;
  SynthesisChecks synthesis;
  std::size_t per_category_cap = 0;  // 0 disables balanced sampling
  bool keep_unknown_ops = false;     // emit programs with unknown steps, skipping those steps
  ReferenceMix mix;

  nlohmann::json to_json() const {
    return {
        {"seed", seed},
        {"precision", precision},
        {"object_info_precision", object_info_precision},
        {"synthesis_precision", synthesis_precision},
        {"grid", {grid.rows, grid.cols}},
        {"cover", cover == CoverRule::kInclusive ? "inclusive" : "center"},
        {"iou_threshold", rec.threshold},
        {"iou_inclusive", rec.inclusive},
        {"mmc4_min_similarity", filters.min_doc_similarity},
        {"mmc4_max_images", filters.max_images},
        {"mmc4_per_image_minimum", filters.per_image_minimum},
        {"grit_min_clip", filters.min_clip_score},
        {"vg_min_side", filters.min_region_side},
        {"box_tolerance", synthesis.box_tolerance},
        {"error_patterns", synthesis.error_patterns},
        {"per_category_cap", per_category_cap},
        {"keep_unknown_ops", keep_unknown_ops},
        {"reference_mix", {{"type1", mix.type1}, {"type2", mix.type2}, {"type3", mix.type3}}},
    };
  }

  void set(std::string_view key, std::string_view value);
};

inline PatchGrid parse_grid(std::string_view s) {
  const auto x = s.find_first_of("xX");
  if (x == std::string_view::npos) throw ConfigError("grid must look like RxC: " + std::string(s));
  try {
    const auto rows = std::stoul(std::string(s.substr(0, x)));
    const auto cols = std::stoul(std::string(s.substr(x + 1)));
    return PatchGrid(static_cast<std::uint32_t>(rows), static_cast<std::uint32_t>(cols));
  } catch (const std::exception&) {
    throw ConfigError("grid must look like RxC: " + std::string(s));
  }
}

namespace detail {

inline double to_double(std::string_view key, std::string_view v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(std::string(v), &used);
    if (used != v.size()) throw std::invalid_argument("trailing");
    return d;
  } catch (const std::exception&) {
    throw ConfigError("bad number for " + std::string(key) + ": " + std::string(v));
  }
}

inline std::uint64_t to_uint(std::string_view key, std::string_view v) {
  if (v.empty() || v.find_first_not_of("0123456789") != std::string_view::npos) {
    throw ConfigError("bad integer for " + std::string(key) + ": " + std::string(v));
  }
  return std::stoull(std::string(v));
}

inline bool to_bool(std::string_view key, std::string_view v) {
  const auto l = text::to_lower(v);
  if (l == "true" || l == "1" || l == "yes") return true;
  if (l == "false" || l == "0" || l == "no") return false;
  throw ConfigError("bad boolean for " + std::string(key) + ": " + std::string(v));
}

inline int to_precision(std::string_view key, std::string_view v) {
  const auto p = to_uint(key, v);
  if (p < 1 || p > 6) throw ConfigError(std::string(key) + " must be between 1 and 6");
  return static_cast<int>(p);
}

}  // namespace detail

inline void Config::set(std::string_view key, std::string_view value) {
  const auto v = text::trim(value);
  if (key == "seed") {
    seed = detail::to_uint(key, v);
  } else if (key == "precision") {
    precision = detail::to_precision(key, v);
  } else if (key == "object_info_precision") {
    object_info_precision = detail::to_precision(key, v);
  } else if (key == "synthesis_precision") {
    synthesis_precision = detail::to_precision(key, v);
  } else if (key == "grid") {
    grid = parse_grid(v);
  } else if (key == "cover") {
    if (v == "inclusive") {
      cover = CoverRule::kInclusive;
    } else if (v == "center") {
      cover = CoverRule::kCenter;
    } else {
      throw ConfigError("cover must be inclusive or center");
    }
  } else if (key == "iou_threshold") {
    rec.threshold = detail::to_double(key, v);
    if (!(rec.threshold > 0 && rec.threshold <= 1)) throw ConfigError("iou_threshold must be in (0, 1]");
  } else if (key == "iou_inclusive") {
    rec.inclusive = detail::to_bool(key, v);
  } else if (key == "mmc4_min_similarity") {
    filters.min_doc_similarity = detail::to_double(key, v);
  } else if (key == "mmc4_max_images") {
    filters.max_images = detail::to_uint(key, v);
  } else if (key == "mmc4_per_image_minimum") {
    filters.per_image_minimum = detail::to_bool(key, v);
  } else if (key == "grit_min_clip") {
    filters.min_clip_score = detail::to_double(key, v);
  } else if (key == "vg_min_side") {
    filters.min_region_side = detail::to_double(key, v);
  } else if (key == "box_tolerance") {
    synthesis.box_tolerance = detail::to_double(key, v);
    if (synthesis.box_tolerance < 0) throw ConfigError("box_tolerance must be >= 0");
  } else if (key == "error_pattern") {
    // Repeatable: each line adds one pattern.
    synthesis.error_patterns.emplace_back(v);
  } else if (key == "per_category_cap") {
    per_category_cap = detail::to_uint(key, v);
  } else if (key == "keep_unknown_ops") {
    keep_unknown_ops = detail::to_bool(key, v);
  } else if (key == "mix_type1") {
    mix.type1 = detail::to_uint(key, v);
  } else if (key == "mix_type2") {
    mix.type2 = detail::to_uint(key, v);
  } else if (key == "mix_type3") {
    mix.type3 = detail::to_uint(key, v);
  } else {
    throw ConfigError("unknown config key: " + std::string(key));
  }
}

inline Config parse_config(std::string_view content) {
  Config cfg;
  std::size_t line_no = 0;
  for (const auto& raw : text::split(content, '\n')) {
    ++line_no;
    std::string_view line = raw;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = text::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    cfg.set(text::trim(line.substr(0, eq)), line.substr(eq + 1));
  }
  return cfg;
}

inline Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file: " + path);
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_config(content);
}

}  // namespace vocot
