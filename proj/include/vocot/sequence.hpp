#pragma once

// Interleaved VoCoT sequences: text, "[c] coords [/c]" spans and the RefBind visual
// reference that follows each span. Visual references carry patch indices only; feature
// gathering happens in the trainer.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <type_traits>
#include <variant>
#include <vector>

#include "vocot/error.hpp"
#include "vocot/geometry.hpp"
#include "vocot/prompts.hpp"
#include "vocot/text.hpp"
#include "vocot/thought.hpp"

namespace vocot {

namespace seg {

struct Text {
  std::string text;
  friend bool operator==(const Text&, const Text&) = default;
};
struct ImageSlot {
  std::uint32_t patch_count = 0;
  friend bool operator==(const ImageSlot&, const ImageSlot&) = default;
};
struct CoordOpen {
  friend bool operator==(const CoordOpen&, const CoordOpen&) = default;
};
struct CoordText {
  std::string text;
  friend bool operator==(const CoordText&, const CoordText&) = default;
};
struct CoordClose {
  friend bool operator==(const CoordClose&, const CoordClose&) = default;
};
struct VisualRef {
  PatchSpan span;
  friend bool operator==(const VisualRef&, const VisualRef&) = default;
};
struct GroundingTrigger {
  friend bool operator==(const GroundingTrigger&, const GroundingTrigger&) = default;
};
struct CoTTrigger {
  friend bool operator==(const CoTTrigger&, const CoTTrigger&) = default;
};

}  // namespace seg

using TokenSegment = std::variant<seg::Text, seg::ImageSlot, seg::CoordOpen, seg::CoordText,
                                  seg::CoordClose, seg::VisualRef, seg::GroundingTrigger,
                                  seg::CoTTrigger>;

struct VoCoTSequence {
  std::vector<TokenSegment> segments;
  PatchGrid grid;

  /// Appends text, merging into a trailing Text segment.
  void push_text(std::string_view s) {
    if (s.empty()) return;
    if (!segments.empty()) {
      if (auto* t = std::get_if<seg::Text>(&segments.back())) {
        t->text += s;
        return;
      }
    }
    segments.emplace_back(seg::Text{std::string(s)});
  }

  friend bool operator==(const VoCoTSequence&, const VoCoTSequence&) = default;
};

inline std::string_view cot_trigger_text() noexcept { return prompts::kCoTTrigger; }

/// Ordering violations, or nullopt when the sequence is well formed.
inline std::optional<std::string> check_well_formed(const VoCoTSequence& seq) {
  enum class State { kFree, kOpened, kHasText, kClosed };
  State state = State::kFree;
  for (std::size_t i = 0; i < seq.segments.size(); ++i) {
    const auto& s = seq.segments[i];
    const auto where = " at segment " + std::to_string(i);
    const bool in_coord = state == State::kOpened || state == State::kHasText;
    if (std::holds_alternative<seg::GroundingTrigger>(s)) {
      if (i != 0) return "grounding trigger not at position 0" + where;
    } else if (std::holds_alternative<seg::CoordOpen>(s)) {
      if (in_coord) return "nested coordinate open" + where;
      state = State::kOpened;
      continue;
    } else if (std::holds_alternative<seg::CoordText>(s)) {
      if (state != State::kOpened) return "coordinate text outside [c] ... [/c]" + where;
      state = State::kHasText;
      continue;
    } else if (std::holds_alternative<seg::CoordClose>(s)) {
      if (state != State::kHasText) return "coordinate close without open and text" + where;
      state = State::kClosed;
      continue;
    } else if (const auto* v = std::get_if<seg::VisualRef>(&s)) {
      if (state != State::kClosed) return "visual reference not right after [/c]" + where;
      if (v->span.indices.empty()) return "empty visual reference" + where;
      for (auto idx : v->span.indices) {
        if (idx >= seq.grid.size()) return "patch index outside grid" + where;
      }
    } else if (in_coord) {
      return "segment inside coordinate span" + where;
    }
    state = State::kFree;
  }
  if (state == State::kOpened || state == State::kHasText) return std::string("unterminated coordinate span");
  return std::nullopt;
}

/// Each mention becomes: text "name ", [c], coordinate text, [/c], visual reference.
inline VoCoTSequence assemble(const GroundedThought& thought, const PatchGrid& grid,
                              int precision = 3, CoverRule rule = CoverRule::kInclusive) {
  VoCoTSequence seq;
  seq.grid = grid;
  for (const auto& s : thought.segments()) {
    if (const auto* t = std::get_if<ThoughtText>(&s)) {
      seq.push_text(t->text);
      continue;
    }
    const auto& m = std::get<ObjectMention>(s);
    if (!m.name.empty()) seq.push_text(m.name + " ");
    seq.segments.emplace_back(seg::CoordOpen{});
    seq.segments.emplace_back(seg::CoordText{format_coords(m.box, precision)});
    seq.segments.emplace_back(seg::CoordClose{});
    seq.segments.emplace_back(seg::VisualRef{refbind_indices(m.box, grid, rule)});
  }
  return seq;
}

struct InstructionLayout {
  bool grounding = true;
  bool image_slot = true;
  bool cot_trigger = true;
};

/// Full training sequence: [<grounding>] [image] question [CoT trigger] thought.
inline VoCoTSequence assemble_instruction(std::string_view question, const GroundedThought& thought,
                                          const PatchGrid& grid, int precision = 3,
                                          const InstructionLayout& layout = {},
                                          CoverRule rule = CoverRule::kInclusive) {
  VoCoTSequence seq;
  seq.grid = grid;
  if (layout.grounding) seq.segments.emplace_back(seg::GroundingTrigger{});
  if (layout.image_slot) seq.segments.emplace_back(seg::ImageSlot{grid.size()});
  if (!question.empty()) seq.push_text(std::string(question) + " ");
  if (layout.cot_trigger) {
    seq.segments.emplace_back(seg::CoTTrigger{});
    seq.push_text(" ");
  }
  for (auto& s : assemble(thought, grid, precision, rule).segments) {
    if (auto* t = std::get_if<seg::Text>(&s)) {
      seq.push_text(t->text);
    } else {
      seq.segments.push_back(std::move(s));
    }
  }
  return seq;
}

/// Visual tokens the sequence will occupy: image slots plus every RefBind span.
inline std::size_t visual_token_count(const VoCoTSequence& seq) {
  std::size_t n = 0;
  for (const auto& s : seq.segments) {
    if (const auto* v = std::get_if<seg::VisualRef>(&s)) n += v->span.indices.size();
    if (const auto* im = std::get_if<seg::ImageSlot>(&s)) n += im->patch_count;
  }
  return n;
}

// ---------------------------------------------------------------------------
// Training-text serialization.
//
//   [c] / [/c]       coordinate delimiters, written "[c] 0.1, ... [/c]"
//   <obj_i:n>        i-th visual reference with n patches; indices travel side-band
//   <grounding>      grounding control token
//   <image:n>        image placeholder of n patches
//   CoT trigger      the trigger sentence itself
//
// A backslash in text escapes the next character, so literal markers survive.
// ---------------------------------------------------------------------------

struct RenderedRef {
  std::size_t pos = 0;  // byte offset of the marker in the text
  std::vector<std::uint32_t> indices;
  friend bool operator==(const RenderedRef&, const RenderedRef&) = default;
};

struct RenderedSequence {
  std::string text;
  std::vector<RenderedRef> visual_refs;
  friend bool operator==(const RenderedSequence&, const RenderedSequence&) = default;
};

namespace detail {

inline constexpr std::string_view kReserved[] = {
    "[c]", "[/c]", "<obj_", "<grounding>", "<image:", prompts::kCoTTrigger,
};

inline bool starts_reserved(std::string_view s, std::size_t i) {
  for (auto r : kReserved) {
    if (s.substr(i, r.size()) == r) return true;
  }
  return false;
}

inline void escape_into(std::string& out, std::string_view s) {
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '\\' || starts_reserved(s, i)) out.push_back('\\');
    out.push_back(s[i]);
  }
}

// "<tag" digits [":" digits] ">" at i; returns end or npos.
inline std::size_t scan_marker(std::string_view s, std::size_t i, std::string_view tag,
                               std::uint64_t& a, std::uint64_t* b) {
  if (s.substr(i, tag.size()) != tag) return std::string_view::npos;
  std::size_t p = i + tag.size();
  const auto number = [&](std::uint64_t& v) {
    const std::size_t start = p;
    v = 0;
    while (p < s.size() && is_digit(s[p])) v = v * 10 + static_cast<std::uint64_t>(s[p++] - '0');
    return p > start;
  };
  if (!number(a)) return std::string_view::npos;
  if (b != nullptr) {
    if (p >= s.size() || s[p] != ':') return std::string_view::npos;
    ++p;
    if (!number(*b)) return std::string_view::npos;
  }
  if (p >= s.size() || s[p] != '>') return std::string_view::npos;
  return p + 1;
}

}  // namespace detail

inline RenderedSequence render_training_text(const VoCoTSequence& seq) {
  RenderedSequence out;
  for (const auto& s : seq.segments) {
    std::visit(
        [&](const auto& v) {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, seg::Text>) {
            detail::escape_into(out.text, v.text);
          } else if constexpr (std::is_same_v<T, seg::ImageSlot>) {
            out.text += "<image:" + std::to_string(v.patch_count) + ">";
          } else if constexpr (std::is_same_v<T, seg::CoordOpen>) {
            out.text += "[c] ";
          } else if constexpr (std::is_same_v<T, seg::CoordText>) {
            out.text += v.text;
          } else if constexpr (std::is_same_v<T, seg::CoordClose>) {
            out.text += " [/c]";
          } else if constexpr (std::is_same_v<T, seg::VisualRef>) {
            out.text += " ";
            out.visual_refs.push_back({out.text.size(), v.span.indices});
            out.text += "<obj_" + std::to_string(out.visual_refs.size() - 1) + ":" +
                        std::to_string(v.span.indices.size()) + ">";
          } else if constexpr (std::is_same_v<T, seg::GroundingTrigger>) {
            out.text += prompts::kGroundingToken;
          } else {
            out.text += prompts::kCoTTrigger;
          }
        },
        s);
  }
  return out;
}

/// Inverse of render_training_text. Throws ParseError on structural problems.
inline VoCoTSequence parse_training_text(const RenderedSequence& rendered, const PatchGrid& grid) {
  const std::string_view s = rendered.text;
  VoCoTSequence seq;
  seq.grid = grid;
  std::string text;
  const auto flush = [&] {
    seq.push_text(text);
    text.clear();
  };
  std::size_t i = 0;
  while (i < s.size()) {
    if (s[i] == '\\') {
      if (i + 1 >= s.size()) throw ParseError("dangling escape", i);
      text.push_back(s[i + 1]);
      i += 2;
      continue;
    }
    std::uint64_t a = 0;
    if (s.substr(i, prompts::kGroundingToken.size()) == prompts::kGroundingToken) {
      flush();
      seq.segments.emplace_back(seg::GroundingTrigger{});
      i += prompts::kGroundingToken.size();
    } else if (auto end = detail::scan_marker(s, i, "<image:", a, nullptr); end != std::string_view::npos) {
      flush();
      seq.segments.emplace_back(seg::ImageSlot{static_cast<std::uint32_t>(a)});
      i = end;
    } else if (s.substr(i, prompts::kCoTTrigger.size()) == prompts::kCoTTrigger) {
      flush();
      seq.segments.emplace_back(seg::CoTTrigger{});
      i += prompts::kCoTTrigger.size();
    } else if (s.substr(i, 4) == "[c] ") {
      flush();
      const auto close = s.find(" [/c]", i + 4);
      if (close == std::string_view::npos) throw ParseError("unterminated [c]", i);
      seq.segments.emplace_back(seg::CoordOpen{});
      seq.segments.emplace_back(seg::CoordText{std::string(s.substr(i + 4, close - i - 4))});
      seq.segments.emplace_back(seg::CoordClose{});
      i = close + 5;
      std::uint64_t n = 0;
      if (i < s.size() && s[i] == ' ') {
        if (auto end = detail::scan_marker(s, i + 1, "<obj_", a, &n); end != std::string_view::npos) {
          if (a >= rendered.visual_refs.size() || rendered.visual_refs[a].pos != i + 1) {
            throw ParseError("visual reference marker without side-band entry", i + 1);
          }
          const auto& indices = rendered.visual_refs[a].indices;
          if (indices.size() != n) throw ParseError("visual reference count mismatch", i + 1);
          try {
            seq.segments.emplace_back(seg::VisualRef{span_from_indices(indices, grid)});
          } catch (const InvalidInput& e) {
            throw ParseError(e.what(), i + 1);
          }
          i = end;
        }
      }
    } else if (detail::starts_reserved(s, i)) {
      throw ParseError("unexpected marker", i);
    } else {
      text.push_back(s[i]);
      ++i;
    }
  }
  flush();
  return seq;
}

/// Lenient tokenizer for model output: splits "[c]" / "[/c]" regardless of spacing.
/// Everything else is plain text.
inline std::vector<TokenSegment> tokenize_output_text(std::string_view s) {
  std::vector<TokenSegment> out;
  std::size_t i = 0;
  std::string text;
  bool in_coord = false;
  const auto flush = [&] {
    if (text.empty()) return;
    if (in_coord) {
      out.emplace_back(seg::CoordText{std::string(text::trim(text))});
    } else {
      out.emplace_back(seg::Text{text});
    }
    text.clear();
  };
  while (i < s.size()) {
    if (s.substr(i, 3) == "[c]") {
      flush();
      out.emplace_back(seg::CoordOpen{});
      in_coord = true;
      i += 3;
    } else if (s.substr(i, 4) == "[/c]") {
      flush();
      out.emplace_back(seg::CoordClose{});
      in_coord = false;
      i += 4;
    } else {
      text.push_back(s[i++]);
    }
  }
  flush();
  return out;
}

/// Inference-side RefBind trigger: watches a segment stream and, at every [/c], turns
/// the coordinate text seen since [c] into a visual reference. One instance per stream.
class RefBindActivator {
 public:
  explicit RefBindActivator(PatchGrid grid, CoverRule rule = CoverRule::kInclusive)
      : grid_(grid), rule_(rule) {}

  /// Throws StreamError on [/c] without [c], nested [c], or coordinate text outside a span.
  std::optional<seg::VisualRef> feed(const TokenSegment& s) {
    if (std::holds_alternative<seg::CoordOpen>(s)) {
      if (open_) throw StreamError("nested [c] at segment " + std::to_string(position_));
      open_ = true;
      pending_.clear();
    } else if (const auto* t = std::get_if<seg::CoordText>(&s)) {
      if (!open_) throw StreamError("coordinate text outside [c] at segment " + std::to_string(position_));
      pending_ += t->text;
    } else if (std::holds_alternative<seg::CoordClose>(s)) {
      if (!open_) throw StreamError("[/c] without [c] at segment " + std::to_string(position_));
      open_ = false;
      ++position_;
      try {
        return seg::VisualRef{refbind_indices(parse_coords(pending_), grid_, rule_)};
      } catch (const Error& e) {
        diagnostics_.push_back(e.what());
        return std::nullopt;
      }
    }
    ++position_;
    return std::nullopt;
  }

  const std::vector<std::string>& diagnostics() const noexcept { return diagnostics_; }

 private:
  PatchGrid grid_;
  CoverRule rule_;
  bool open_ = false;
  std::string pending_;
  std::size_t position_ = 0;
  std::vector<std::string> diagnostics_;
};

struct ActivationResult {
  std::vector<seg::VisualRef> refs;
  std::vector<std::string> diagnostics;
};

inline ActivationResult activate_refbind(const std::vector<TokenSegment>& stream,
                                         const PatchGrid& grid,
                                         CoverRule rule = CoverRule::kInclusive) {
  RefBindActivator activator(grid, rule);
  ActivationResult out;
  for (const auto& s : stream) {
    if (auto ref = activator.feed(s)) out.refs.push_back(std::move(*ref));
  }
  out.diagnostics = activator.diagnostics();
  return out;
}

}  // namespace vocot
