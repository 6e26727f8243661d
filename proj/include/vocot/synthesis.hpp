#pragma once

// Generation payloads for VQA-based (type 2) and image-only (type 3) sources, plus the
// response checks applied before a generated thought is accepted.

#include <algorithm>
#include <cstddef>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "vocot/error.hpp"
#include "vocot/geometry.hpp"
#include "vocot/prompts.hpp"
#include "vocot/text.hpp"
#include "vocot/thought.hpp"

namespace vocot {

enum class SourceType : int { kGqa = 1, kVqa = 2, kImageOnly = 3 };

struct LabeledBox {
  std::string label;
  BoundingBox box;
  friend bool operator==(const LabeledBox&, const LabeledBox&) = default;
};

/// Object list shown to the generator: "Label: [x1, y1, x2, y2], ...".
struct ObjectInfo {
  std::vector<LabeledBox> objects;

  bool empty() const noexcept { return objects.empty(); }

  std::string render(int precision = 2) const {
    std::string out;
    for (const auto& o : objects) {
      if (!out.empty()) out += ", ";
      out += o.label + ": " + format_box(o.box, precision);
    }
    return out;
  }
};

/// Inverse of ObjectInfo::render. Labels may contain spaces but not ':'.
inline ObjectInfo parse_object_info(std::string_view s) {
  ObjectInfo info;
  std::size_t pos = 0;
  while (true) {
    pos = detail::skip_space(s, pos);
    if (pos >= s.size()) break;
    const auto colon = s.find(':', pos);
    if (colon == std::string_view::npos) throw ParseError("expected ':'", pos);
    const auto label = text::trim(s.substr(pos, colon - pos));
    if (label.empty()) throw ParseError("empty label", pos);
    const auto open = s.find('[', colon);
    const auto close = open == std::string_view::npos ? open : s.find(']', open);
    if (close == std::string_view::npos) throw ParseError("expected box", colon + 1);
    info.objects.push_back({std::string(label), parse_coords(s.substr(open, close - open + 1))});
    pos = detail::skip_space(s, close + 1);
    if (pos < s.size()) {
      if (s[pos] != ',') throw ParseError("expected ','", pos);
      ++pos;
    }
  }
  return info;
}

struct SynthesisPayload {
  SourceType type = SourceType::kVqa;
  std::string_view system_text;
  std::string exemplar_user_text;
  std::string_view exemplar_image;
  std::string_view exemplar_response;
  std::string user_text;
  std::string image_ref;
  std::vector<std::string> schema;

  /// Chat-style message list: system, exemplar exchange, then the real request.
  nlohmann::json messages() const {
    const auto user = [](const std::string& body, std::string_view image) {
      return nlohmann::json{
          {"role", "user"},
          {"content",
           nlohmann::json::array(
               {{{"type", "text"}, {"text", "[IMAGE1]:" + body}},
                {{"type", "image_url"}, {"image_url", {{"url", std::string(image)}}}}})}};
    };
    return nlohmann::json::array(
        {{{"role", "system"}, {"content", std::string(system_text)}},
         user(exemplar_user_text, exemplar_image),
         {{"role", "assistant"}, {"content", std::string(exemplar_response)}},
         user(user_text, image_ref)});
  }
};

inline SynthesisPayload build_type2_payload(const ObjectInfo& objects, std::string_view question,
                                            std::string_view answer, std::string_view image_ref,
                                            int precision = 2) {
  if (objects.empty()) throw InvalidInput("type 2 payload needs at least one object");
  if (text::trim(question).empty() || text::trim(answer).empty()) {
    throw InvalidInput("type 2 payload needs a question and an answer");
  }
  SynthesisPayload p;
  p.type = SourceType::kVqa;
  p.system_text = prompts::kType2System;
  p.exemplar_user_text = std::string(prompts::kExemplarObjectInfo) + " [question]: " +
                         std::string(prompts::kExemplarQuestion) + " [answer]: " +
                         std::string(prompts::kExemplarAnswer);
  p.exemplar_image = prompts::kExemplarImage;
  p.exemplar_response = prompts::kType2ExemplarResponse;
  p.user_text = "[Object Info]: " + objects.render(precision) + " [question]: " +
                std::string(question) + " [answer]: " + std::string(answer);
  p.image_ref = std::string(image_ref);
  p.schema = {"Thought"};
  return p;
}

inline SynthesisPayload build_type3_payload(const ObjectInfo& objects, std::string_view image_ref,
                                            int precision = 2) {
  if (objects.empty()) throw InvalidInput("type 3 payload needs at least one object");
  SynthesisPayload p;
  p.type = SourceType::kImageOnly;
  p.system_text = prompts::kType3System;
  p.exemplar_user_text = std::string(prompts::kExemplarObjectInfo);
  p.exemplar_image = prompts::kExemplarImage;
  p.exemplar_response = prompts::kType3ExemplarResponse;
  p.user_text = "[Object Info]: " + objects.render(precision);
  p.image_ref = std::string(image_ref);
  p.schema = {"question", "answer", "Thought"};
  return p;
}

inline std::vector<std::string> schema_for(SourceType type) {
  if (type == SourceType::kImageOnly) return {"question", "answer", "Thought"};
  return {"Thought"};
}

enum class RejectReason {
  kNone,
  kNoJson,
  kMalformedJson,
  kMissingKeys,
  kMalformedBox,
  kErrorPattern,
  kBoxMismatch,
};

inline std::string_view reason_name(RejectReason r) {
  switch (r) {
    case RejectReason::kNone: return "none";
    case RejectReason::kNoJson: return "no-json";
    case RejectReason::kMalformedJson: return "malformed-json";
    case RejectReason::kMissingKeys: return "missing-keys";
    case RejectReason::kMalformedBox: return "malformed-box";
    case RejectReason::kErrorPattern: return "error-pattern";
    case RejectReason::kBoxMismatch: return "box-mismatch";
  }
  return "unknown";
}

struct SynthesisRecord {
  std::optional<std::string> question;
  std::string answer;
  std::string thought_text;  // as generated
  GroundedThought thought;
  SourceType source_type = SourceType::kVqa;
  std::string image;
  ObjectInfo objects;
};

struct ParsedResponse {
  std::optional<SynthesisRecord> record;
  RejectReason reason = RejectReason::kNone;
  std::string detail;

  bool ok() const noexcept { return record.has_value(); }
};

/// Byte range of the first balanced {...} outside string literals.
inline std::optional<std::string_view> first_json_object(std::string_view s) {
  const auto start = s.find('{');
  if (start == std::string_view::npos) return std::nullopt;
  int depth = 0;
  bool in_string = false;
  for (std::size_t i = start; i < s.size(); ++i) {
    const char c = s[i];
    if (in_string) {
      if (c == '\\') {
        ++i;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') {
      in_string = true;
    } else if (c == '{') {
      ++depth;
    } else if (c == '}' && --depth == 0) {
      return s.substr(start, i - start + 1);
    }
  }
  return std::nullopt;
}

/// Keys match case-insensitively, so {"thought": ...} satisfies a "Thought" schema.
inline ParsedResponse parse_synthesis_response(std::string_view raw,
                                               const std::vector<std::string>& schema) {
  ParsedResponse out;
  const auto object_text = first_json_object(raw);
  if (!object_text) {
    out.reason = RejectReason::kNoJson;
    return out;
  }
  const auto doc = nlohmann::json::parse(*object_text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    out.reason = RejectReason::kMalformedJson;
    return out;
  }
  std::map<std::string, std::string> values;
  for (const auto& key : schema) {
    const auto it = std::find_if(doc.items().begin(), doc.items().end(),
                                 [&](const auto& kv) { return text::iequals(kv.key(), key); });
    if (it == doc.items().end() || !it.value().is_string()) {
      out.reason = RejectReason::kMissingKeys;
      out.detail = key;
      return out;
    }
    values[text::to_lower(key)] = it.value().template get<std::string>();
  }

  SynthesisRecord rec;
  rec.thought_text = values["thought"];
  try {
    rec.thought = parse_thought(rec.thought_text);
  } catch (const ParseError& e) {
    out.reason = RejectReason::kMalformedBox;
    out.detail = e.what();
    return out;
  }
  if (auto q = values.find("question"); q != values.end()) rec.question = q->second;
  if (auto a = values.find("answer"); a != values.end()) rec.answer = a->second;
  out.record = std::move(rec);
  return out;
}

struct BoxValidation {
  bool ok = true;
  std::vector<BoundingBox> offending;
};

/// Every thought box must copy some provided box within `tol` per coordinate.
inline BoxValidation validate_boxes(const SynthesisRecord& record, const ObjectInfo& objects,
                                    double tol = 0.005) {
  BoxValidation out;
  for (const auto& box : record.thought.boxes()) {
    const bool matched = std::any_of(objects.objects.begin(), objects.objects.end(),
                                     [&](const LabeledBox& o) {
                                       const auto a = box.coords();
                                       const auto b = o.box.coords();
                                       for (std::size_t i = 0; i < 4; ++i) {
                                         if (std::abs(a[i] - b[i]) > tol) return false;
                                       }
                                       return true;
                                     });
    if (!matched) {
      out.ok = false;
      out.offending.push_back(box);
    }
  }
  return out;
}

inline std::vector<std::string> default_error_patterns() {
  return {std::begin(prompts::kErrorPatterns), std::end(prompts::kErrorPatterns)};
}

/// First pattern found (case-insensitive substring), or nullopt to keep the text.
inline std::optional<std::string> filter_error_patterns(
    std::string_view text, const std::vector<std::string>& patterns = default_error_patterns()) {
  const std::string folded = text::to_lower(text);
  for (const auto& p : patterns) {
    if (!p.empty() && folded.find(text::to_lower(p)) != std::string::npos) return p;
  }
  return std::nullopt;
}

struct SynthesisChecks {
  double box_tolerance = 0.005;
  std::vector<std::string> error_patterns = default_error_patterns();
};

/// Parse, pattern filter and box validation in one pass.
inline ParsedResponse ingest_response(std::string_view raw, SourceType type,
                                      const ObjectInfo& objects, const SynthesisChecks& checks) {
  auto parsed = parse_synthesis_response(raw, schema_for(type));
  if (!parsed.ok()) return parsed;
  if (auto hit = filter_error_patterns(raw, checks.error_patterns)) {
    parsed.record.reset();
    parsed.reason = RejectReason::kErrorPattern;
    parsed.detail = *hit;
    return parsed;
  }
  parsed.record->source_type = type;
  parsed.record->objects = objects;
  const auto v = validate_boxes(*parsed.record, objects, checks.box_tolerance);
  if (!v.ok) {
    parsed.record.reset();
    parsed.reason = RejectReason::kBoxMismatch;
    parsed.detail = format_box(v.offending.front(), 3);
  }
  return parsed;
}

namespace detail {

// Fisher-Yates over mt19937_64 with rejection sampling; unlike std::shuffle the
// permutation is the same on every standard library.
inline void seeded_shuffle(std::vector<std::size_t>& v, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (std::size_t i = v.size(); i > 1; --i) {
    const std::uint64_t bound = i;
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t draw = rng();
    while (draw >= limit) draw = rng();
    std::swap(v[i - 1], v[static_cast<std::size_t>(draw % bound)]);
  }
}

}  // namespace detail

/// Greedy category-balanced subset. Records are visited in a seeded random order and
/// taken when every one of their categories is still below `cap`. Returns the chosen
/// positions in input order. Records without categories are always taken.
inline std::vector<std::size_t> balanced_sample(
    const std::vector<std::vector<std::string>>& categories, std::size_t cap, std::uint64_t seed) {
  if (cap == 0) throw InvalidInput("per-category cap must be at least 1");
  std::vector<std::size_t> order(categories.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  detail::seeded_shuffle(order, seed);

  std::map<std::string, std::size_t> counts;
  std::vector<std::size_t> taken;
  for (std::size_t i : order) {
    const std::set<std::string> cats(categories[i].begin(), categories[i].end());
    const bool room = std::all_of(cats.begin(), cats.end(),
                                  [&](const std::string& c) { return counts[c] < cap; });
    if (!room) continue;
    for (const auto& c : cats) ++counts[c];
    taken.push_back(i);
  }
  std::sort(taken.begin(), taken.end());
  return taken;
}

}  // namespace vocot
