#pragma once

// Reasoning text whose object mentions carry inline boxes: "Find the shelf [0.224, ...]."

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "vocot/box_scan.hpp"
#include "vocot/geometry.hpp"
#include "vocot/text.hpp"

namespace vocot {

struct ThoughtText {
  std::string text;
  friend bool operator==(const ThoughtText&, const ThoughtText&) = default;
};

struct ObjectMention {
  std::string name;
  BoundingBox box;
  friend bool operator==(const ObjectMention&, const ObjectMention&) = default;
};

using ThoughtSegment = std::variant<ThoughtText, ObjectMention>;

class GroundedThought {
 public:
  const std::vector<ThoughtSegment>& segments() const noexcept { return segments_; }
  bool empty() const noexcept { return segments_.empty(); }

  GroundedThought& append_text(std::string_view s) {
    if (s.empty()) return *this;
    if (!segments_.empty()) {
      if (auto* t = std::get_if<ThoughtText>(&segments_.back())) {
        t->text += s;
        return *this;
      }
    }
    segments_.emplace_back(ThoughtText{std::string(s)});
    return *this;
  }

  GroundedThought& append_mention(std::string name, const BoundingBox& box) {
    segments_.emplace_back(ObjectMention{std::move(name), box});
    return *this;
  }

  GroundedThought& append(const GroundedThought& other) {
    for (const auto& seg : other.segments_) {
      if (const auto* t = std::get_if<ThoughtText>(&seg)) {
        append_text(t->text);
      } else {
        segments_.push_back(seg);
      }
    }
    return *this;
  }

  std::vector<ObjectMention> mentions() const {
    std::vector<ObjectMention> out;
    for (const auto& seg : segments_) {
      if (const auto* m = std::get_if<ObjectMention>(&seg)) out.push_back(*m);
    }
    return out;
  }

  std::vector<BoundingBox> boxes() const {
    std::vector<BoundingBox> out;
    for (const auto& m : mentions()) out.push_back(m.box);
    return out;
  }

  /// Each mention renders as "name [x1, y1, x2, y2]".
  std::string render(int precision = 3) const {
    std::string out;
    for (const auto& seg : segments_) {
      if (const auto* t = std::get_if<ThoughtText>(&seg)) {
        out += t->text;
      } else {
        const auto& m = std::get<ObjectMention>(seg);
        if (!m.name.empty()) out += m.name + " ";
        out += format_box(m.box, precision);
      }
    }
    return out;
  }

  friend bool operator==(const GroundedThought&, const GroundedThought&) = default;

 private:
  std::vector<ThoughtSegment> segments_;
};

namespace detail {

inline bool is_name_char(char c) noexcept {
  return text::is_word_char(c) || c == '-' || c == '\'';
}

}  // namespace detail

/// Splits rendered text back into text and mentions. The mention name is the word
/// directly before the box; whitespace between them is absorbed.
/// Throws ParseError on a malformed coordinate candidate.
inline GroundedThought parse_thought(std::string_view s) {
  GroundedThought out;
  std::size_t cursor = 0;
  for (const auto& cand : scan_box_candidates(s)) {
    if (cand.coord_span) continue;  // sequence spans belong to the sequence layer
    if (!cand.box) throw ParseError("malformed box", cand.begin);
    std::size_t name_end = cand.begin;
    while (name_end > cursor && text::is_space(s[name_end - 1])) --name_end;
    std::size_t name_begin = name_end;
    while (name_begin > cursor && detail::is_name_char(s[name_begin - 1])) --name_begin;
    if (name_begin == name_end) name_end = name_begin = cand.begin;
    out.append_text(s.substr(cursor, name_begin - cursor));
    out.append_mention(std::string(s.substr(name_begin, name_end - name_begin)), *cand.box);
    cursor = cand.end;
  }
  out.append_text(s.substr(cursor));
  return out;
}

}  // namespace vocot
