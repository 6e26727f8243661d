#pragma once

// Finds coordinate boxes embedded in free text. Two spellings are recognized:
// bracketed tuples "[0.1, 0.2, 0.3, 0.4]" and sequence spans "[c] 0.1, 0.2, 0.3, 0.4 [/c]".

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "vocot/geometry.hpp"

namespace vocot {

struct BoxCandidate {
  std::size_t begin = 0;  // byte range of the whole candidate, brackets included
  std::size_t end = 0;
  bool coord_span = false;
  std::optional<BoundingBox> box;  // empty when the candidate is malformed
};

namespace detail {

// Bracket content that looks like an attempt at coordinates.
inline bool looks_numeric(std::string_view inner) noexcept {
  bool digit = false;
  for (char c : inner) {
    if (is_digit(c)) {
      digit = true;
    } else if (c != '.' && c != ',' && c != '-' && c != '+' && !is_space(c)) {
      return false;
    }
  }
  return digit;
}

inline std::optional<BoundingBox> try_parse_coords(std::string_view s) noexcept {
  try {
    return parse_coords(s);
  } catch (const Error&) {
    return std::nullopt;
  }
}

}  // namespace detail

inline constexpr std::string_view kCoordOpen = "[c]";
inline constexpr std::string_view kCoordClose = "[/c]";

/// All candidates in text order. Bracket content with letters is not a candidate.
inline std::vector<BoxCandidate> scan_box_candidates(std::string_view text) {
  std::vector<BoxCandidate> out;
  std::size_t pos = 0;
  while ((pos = text.find('[', pos)) != std::string_view::npos) {
    if (text.substr(pos, kCoordOpen.size()) == kCoordOpen) {
      // An unclosed "[c]", or one around non-numeric text, is plain text; it must not
      // hide the boxes after it.
      const auto close = text.find(kCoordClose, pos + kCoordOpen.size());
      const auto inner = close == std::string_view::npos
                             ? std::string_view()
                             : text.substr(pos + kCoordOpen.size(), close - pos - kCoordOpen.size());
      if (!detail::looks_numeric(inner)) {
        pos += kCoordOpen.size();
        continue;
      }
      out.push_back({pos, close + kCoordClose.size(), true, detail::try_parse_coords(inner)});
      pos = close + kCoordClose.size();
      continue;
    }
    const auto close = text.find(']', pos + 1);
    if (close == std::string_view::npos) break;
    const auto inner = text.substr(pos + 1, close - pos - 1);
    if (inner.find('[') != std::string_view::npos) {
      ++pos;
      continue;
    }
    if (detail::looks_numeric(inner)) {
      out.push_back({pos, close + 1, false, detail::try_parse_coords(text.substr(pos, close - pos + 1))});
    }
    pos = close + 1;
  }
  return out;
}

}  // namespace vocot
