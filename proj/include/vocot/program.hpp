#pragma once

// GQA-style semantic strings: "select: shelf -> select: door -> common: [0, 1]".

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vocot/error.hpp"
#include "vocot/text.hpp"

namespace vocot {

enum class OpKind {
  kSelect,
  kRelate,
  kVerify,
  kExist,
  kChoose,
  kCommon,
  kSame,
  kDifferent,
  kAnd,
  kOr,
  kUnknown,
};

inline OpKind op_kind_from_name(std::string_view word) {
  const std::string w = text::to_lower(word);
  if (w == "select") return OpKind::kSelect;
  if (w == "relate") return OpKind::kRelate;
  if (w == "verify") return OpKind::kVerify;
  if (w == "exist") return OpKind::kExist;
  if (w == "choose") return OpKind::kChoose;
  if (w == "common") return OpKind::kCommon;
  if (w == "same") return OpKind::kSame;
  if (w == "different") return OpKind::kDifferent;
  if (w == "and") return OpKind::kAnd;
  if (w == "or") return OpKind::kOr;
  return OpKind::kUnknown;
}

struct SemanticStep {
  OpKind op = OpKind::kUnknown;
  std::string name;       // operation word as written ("select", "filter")
  std::string qualifier;  // words after the operation, e.g. "color" in "verify color: white"
  std::vector<std::string> args;
  std::vector<std::string> object_ids;  // scene-graph ids from "(123)" groups
  std::vector<std::size_t> refs;        // earlier steps from "[0, 1]" groups
  bool marker = false;                  // the "?" of "exist: ? obj"

  friend bool operator==(const SemanticStep&, const SemanticStep&) = default;
};

struct SemanticProgram {
  std::vector<SemanticStep> steps;
  std::string raw;
};

inline bool same_steps(const SemanticProgram& a, const SemanticProgram& b) {
  return a.steps == b.steps;
}

inline std::size_t count_steps(const SemanticProgram& program) noexcept {
  return program.steps.size();
}

inline std::size_t count_unknown(const SemanticProgram& program) noexcept {
  std::size_t n = 0;
  for (const auto& s : program.steps) n += s.op == OpKind::kUnknown ? 1 : 0;
  return n;
}

/// Steps feeding step i: explicit refs, else the previous step.
inline std::vector<std::size_t> step_inputs(const SemanticProgram& program, std::size_t i) {
  const auto& step = program.steps.at(i);
  if (!step.refs.empty()) return step.refs;
  if (i == 0 || step.op == OpKind::kSelect) return {};
  return {i - 1};
}

namespace detail {

// Splits on commas outside [] and ().
inline std::vector<std::string_view> split_top_level(std::string_view s) {
  std::vector<std::string_view> out;
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if (c == '[' || c == '(') ++depth;
    if ((c == ']' || c == ')') && depth > 0) --depth;
    if (c == ',' && depth == 0) {
      out.push_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  out.push_back(s.substr(start));
  return out;
}

inline std::optional<std::vector<std::size_t>> parse_index_list(std::string_view inner) {
  std::vector<std::size_t> out;
  for (const auto& part : text::split(inner, ',')) {
    const auto t = text::trim(part);
    if (t.empty()) return std::nullopt;
    std::size_t v = 0;
    for (char c : t) {
      if (c < '0' || c > '9') return std::nullopt;
      v = v * 10 + static_cast<std::size_t>(c - '0');
    }
    out.push_back(v);
  }
  return out;
}

inline void parse_piece(std::string_view piece, SemanticStep& step) {
  std::string rest;
  std::size_t i = 0;
  while (i < piece.size()) {
    const char open = piece[i];
    const char close = open == '[' ? ']' : open == '(' ? ')' : '\0';
    if (close != '\0') {
      const auto end = piece.find(close, i + 1);
      if (end != std::string_view::npos) {
        const auto inner = piece.substr(i + 1, end - i - 1);
        if (open == '[') {
          if (auto refs = parse_index_list(inner)) {
            step.refs.insert(step.refs.end(), refs->begin(), refs->end());
            i = end + 1;
            continue;
          }
        } else {
          for (const auto& id : text::split(inner, ',')) {
            step.object_ids.emplace_back(text::trim(id));
          }
          i = end + 1;
          continue;
        }
      }
    }
    rest.push_back(piece[i]);
    ++i;
  }
  const auto arg = text::trim(rest);
  if (!arg.empty()) step.args.emplace_back(arg);
}

inline SemanticStep parse_segment(std::string_view seg, std::size_t index) {
  const auto colon = seg.find(':');
  if (colon == std::string_view::npos) throw ProgramParseError("missing ':'", index);
  const auto head = text::trim(seg.substr(0, colon));
  if (head.empty()) throw ProgramParseError("missing operation name", index);

  SemanticStep step;
  const auto space = head.find_first_of(" \t");
  step.name = std::string(head.substr(0, space));
  if (space != std::string_view::npos) step.qualifier = std::string(text::trim(head.substr(space)));
  step.op = op_kind_from_name(step.name);

  auto body = text::trim(seg.substr(colon + 1));
  if (!body.empty() && body.front() == '?') {
    step.marker = true;
    body = text::trim(body.substr(1));
  }
  if (!body.empty()) {
    for (auto piece : split_top_level(body)) parse_piece(text::trim(piece), step);
  }
  for (std::size_t r : step.refs) {
    if (r >= index) throw ProgramParseError("reference to a later step", index);
  }
  return step;
}

}  // namespace detail

/// Unknown operation names parse into kUnknown steps; only structural problems throw.
inline SemanticProgram parse_program(std::string_view text) {
  if (text::trim(text).empty()) throw ProgramParseError("empty program", 0);
  SemanticProgram program;
  program.raw = std::string(text);
  std::size_t start = 0;
  std::size_t index = 0;
  while (true) {
    const auto arrow = text.find("->", start);
    const auto seg = text::trim(text.substr(start, arrow == std::string_view::npos
                                                       ? std::string_view::npos
                                                       : arrow - start));
    if (seg.empty()) throw ProgramParseError("empty segment", index);
    program.steps.push_back(detail::parse_segment(seg, index));
    ++index;
    if (arrow == std::string_view::npos) break;
    start = arrow + 2;
  }
  return program;
}

inline std::string render_step(const SemanticStep& step) {
  std::string out = step.name;
  if (!step.qualifier.empty()) out += " " + step.qualifier;
  out += ":";
  std::string body;
  if (step.marker) body += "?";
  for (std::size_t i = 0; i < step.args.size(); ++i) {
    body += (i == 0 ? (body.empty() ? "" : " ") : ", ") + step.args[i];
  }
  if (!step.object_ids.empty()) {
    body += body.empty() ? "(" : " (";
    for (std::size_t i = 0; i < step.object_ids.size(); ++i) {
      body += (i ? "," : "") + step.object_ids[i];
    }
    body += ")";
  }
  if (!step.refs.empty()) {
    body += body.empty() ? "[" : " [";
    for (std::size_t i = 0; i < step.refs.size(); ++i) {
      body += (i ? ", " : "") + std::to_string(step.refs[i]);
    }
    body += "]";
  }
  if (!body.empty()) out += " " + body;
  return out;
}

inline std::string render_program(const SemanticProgram& program) {
  std::string out;
  for (std::size_t i = 0; i < program.steps.size(); ++i) {
    if (i) out += " -> ";
    out += render_step(program.steps[i]);
  }
  return out;
}

}  // namespace vocot
