#pragma once

// Scoring for grounded model outputs. Model scores and generations come in as data.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vocot/box_scan.hpp"
#include "vocot/error.hpp"
#include "vocot/geometry.hpp"
#include "vocot/prompts.hpp"
#include "vocot/synthesis.hpp"
#include "vocot/text.hpp"

namespace vocot {

struct ExtractedBoxes {
  std::vector<BoundingBox> boxes;
  std::size_t skipped = 0;  // candidates that looked like coordinates but did not parse
};

/// Bracketed tuples and [c]...[/c] spans, in text order.
inline ExtractedBoxes extract_boxes(std::string_view text) {
  ExtractedBoxes out;
  for (const auto& cand : scan_box_candidates(text)) {
    if (cand.box) {
      out.boxes.push_back(*cand.box);
    } else {
      ++out.skipped;
    }
  }
  return out;
}

struct RecRecord {
  std::string prediction;
  BoundingBox gold;
};

struct RecOptions {
  double threshold = 0.5;
  bool inclusive = false;  // ">=" instead of ">"
};

/// Scores the first extracted box only; no box counts as wrong.
inline bool rec_correct(std::string_view prediction, const BoundingBox& gold,
                        const RecOptions& opt = {}) {
  const auto ex = extract_boxes(prediction);
  if (ex.boxes.empty()) return false;
  const double v = iou(ex.boxes.front(), gold);
  return opt.inclusive ? v >= opt.threshold : v > opt.threshold;
}

struct Accuracy {
  std::size_t correct = 0;
  std::size_t total = 0;
  double value() const noexcept {
    return total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total);
  }
  void add(bool ok) noexcept {
    ++total;
    correct += ok ? 1 : 0;
  }
  friend bool operator==(const Accuracy&, const Accuracy&) = default;
};

inline Accuracy rec_accuracy(std::span<const RecRecord> records, const RecOptions& opt = {}) {
  if (!(opt.threshold > 0.0 && opt.threshold <= 1.0)) {
    throw InvalidInput("IoU threshold must be in (0, 1]");
  }
  Accuracy acc;
  for (const auto& r : records) acc.add(rec_correct(r.prediction, r.gold, opt));
  return acc;
}

/// Index of the highest score; the lowest index wins ties.
inline std::size_t mc_select(std::span<const double> scores) {
  if (scores.size() < 2) throw InvalidInput("multiple choice needs at least two option scores");
  for (double s : scores) {
    if (!std::isfinite(s)) throw InvalidInput("option scores must be finite");
  }
  return static_cast<std::size_t>(std::max_element(scores.begin(), scores.end()) - scores.begin());
}

/// First word after casefolding and punctuation stripping. Anything but "yes" reads as "no",
/// which covers refusals.
inline std::string normalize_yesno(std::string_view prediction) {
  std::string cleaned;
  for (char c : prediction) {
    cleaned.push_back(text::is_word_char(c) ? text::lower(c) : ' ');
  }
  const auto t = text::trim(cleaned);
  const auto first = t.substr(0, t.find(' '));
  return first == "yes" ? "yes" : "no";
}

inline bool exact_match_yesno(std::string_view prediction, std::string_view gold) {
  const std::string g = text::to_lower(text::trim(gold));
  if (g != "yes" && g != "no") throw InvalidInput("yes/no gold label must be 'yes' or 'no'");
  return normalize_yesno(prediction) == g;
}

using Lexicon = std::map<std::string, std::vector<std::string>>;

struct ChairResult {
  double chair = 0;     // hallucinated mentions / mentions
  double coverage = 0;  // gold objects mentioned / gold objects
  std::set<std::string> mentioned;
  std::size_t hallucinated = 0;
  std::size_t grounded = 0;
};

namespace detail {

inline bool mentions_word(std::string_view folded_caption, std::string_view phrase) {
  const std::string p = text::to_lower(phrase);
  if (p.empty()) return false;
  for (auto pos = folded_caption.find(p); pos != std::string_view::npos;
       pos = folded_caption.find(p, pos + 1)) {
    if (text::at_word_boundary(folded_caption, pos, p.size())) return true;
  }
  return false;
}

}  // namespace detail

/// CHAIR-style object hallucination ratios. A lexicon entry is mentioned when the
/// caption contains its name or any synonym as a whole word. Gold names missing from
/// the lexicon are added as self-synonyms.
inline ChairResult chair_metrics(std::string_view caption, const std::set<std::string>& gold,
                                 Lexicon lexicon) {
  for (const auto& g : gold) lexicon.try_emplace(g);
  const std::string folded = text::to_lower(caption);
  ChairResult out;
  for (const auto& [name, synonyms] : lexicon) {
    bool hit = detail::mentions_word(folded, name);
    for (std::size_t i = 0; !hit && i < synonyms.size(); ++i) {
      hit = detail::mentions_word(folded, synonyms[i]);
    }
    if (hit) out.mentioned.insert(name);
  }
  for (const auto& m : out.mentioned) {
    if (gold.count(m) != 0) {
      ++out.grounded;
    } else {
      ++out.hallucinated;
    }
  }
  out.chair = static_cast<double>(out.hallucinated) /
              static_cast<double>(std::max<std::size_t>(1, out.mentioned.size()));
  out.coverage = static_cast<double>(out.grounded) /
                 static_cast<double>(std::max<std::size_t>(1, gold.size()));
  return out;
}

struct StepOutcome {
  std::size_t steps = 0;
  bool correct = false;
};

/// Accuracy per reasoning-step count; only populated bins appear.
inline std::map<std::size_t, Accuracy> accuracy_by_steps(std::span<const StepOutcome> records) {
  std::map<std::size_t, Accuracy> bins;
  for (const auto& r : records) {
    if (r.steps == 0) throw InvalidInput("step count must be at least 1");
    bins[r.steps].add(r.correct);
  }
  return bins;
}

/// Reasoning text with coordinates and visual markers removed.
inline std::string strip_grounding(std::string_view s) {
  std::string out;
  std::size_t cursor = 0;
  for (const auto& cand : scan_box_candidates(s)) {
    out.append(s.substr(cursor, cand.begin - cursor));
    cursor = cand.end;
  }
  out.append(s.substr(cursor));
  for (std::string_view marker : {std::string_view("[c]"), std::string_view("[/c]"),
                                  prompts::kGroundingToken}) {
    for (auto pos = out.find(marker); pos != std::string::npos; pos = out.find(marker)) {
      out.erase(pos, marker.size());
    }
  }
  // Visual reference markers <obj_i:n>.
  for (auto pos = out.find("<obj_"); pos != std::string::npos; pos = out.find("<obj_", pos)) {
    const auto end = out.find('>', pos);
    if (end == std::string::npos) break;
    out.erase(pos, end - pos + 1);
  }
  return text::normalize_whitespace(out);
}

/// Judge prompt for the reasoning-path study. Trailing periods of both slots are
/// dropped so the template's commas read cleanly.
inline std::string judger_prompt(std::string_view reasoning_path, std::string_view description) {
  auto strip_period = [](std::string s) {
    while (!s.empty() && (s.back() == '.' || text::is_space(s.back()))) s.pop_back();
    return s;
  };
  const std::string path = strip_period(strip_grounding(reasoning_path));
  const std::string desc = strip_period(std::string(text::trim(description)));
  if (path.empty()) throw InvalidInput("judger prompt needs a reasoning path");
  if (desc.empty()) throw InvalidInput("judger prompt needs a description");
  return "There is a image, " + path + ", please determine whether " + desc +
         ", please answer yes or no.";
}

/// Pairwise grounded-caption comparison request for an external judge.
inline std::string pairwise_caption_prompt(const ObjectInfo& objects, std::string_view response_a,
                                           std::string_view response_b) {
  return "Compare two grounded descriptions of the image. Score each from 1 to 10 for content "
         "accuracy and for coordinate accuracy against the ground-truth objects, then name the "
         "winner as 1, 2 or tie. [Object Info]: " +
         objects.render(2) + " [Response 1]: " + std::string(response_a) +
         " [Response 2]: " + std::string(response_b);
}

}  // namespace vocot
