#pragma once

// On-disk record formats: VoCoT-Instruct lines and per-run manifests.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "vocot/error.hpp"
#include "vocot/synthesis.hpp"
#include "vocot/thought.hpp"

namespace vocot {

struct VoCoTInstructRecord {
  std::string id;
  std::string image;
  std::optional<std::string> question;
  std::string thought;  // rendered GroundedThought
  std::string answer;
  SourceType source_type = SourceType::kGqa;
  std::size_t steps = 0;                // reasoning steps when known (Type 1)
  std::vector<std::string> categories;  // object categories, used for balancing

  friend bool operator==(const VoCoTInstructRecord&, const VoCoTInstructRecord&) = default;
};

/// Empty when the record is usable. The thought must parse back, every record needs an
/// answer, and Type 3 records also need their generated question.
inline std::optional<std::string> validate_record(const VoCoTInstructRecord& r) {
  if (r.id.empty()) return "missing id";
  const int t = static_cast<int>(r.source_type);
  if (t < 1 || t > 3) return "source_type must be 1, 2 or 3";
  if (r.answer.empty()) return "missing answer";
  if (r.source_type == SourceType::kImageOnly && (!r.question || r.question->empty())) {
    return "type 3 record needs a question";
  }
  try {
    (void)parse_thought(r.thought);
  } catch (const Error& e) {
    return std::string("thought does not parse: ") + e.what();
  }
  return std::nullopt;
}

inline nlohmann::json to_json(const VoCoTInstructRecord& r) {
  nlohmann::json j = {
      {"id", r.id},
      {"image", r.image},
      {"question", r.question ? nlohmann::json(*r.question) : nlohmann::json(nullptr)},
      {"thought", r.thought},
      {"answer", r.answer},
      {"source_type", static_cast<int>(r.source_type)},
  };
  if (r.steps != 0) j["steps"] = r.steps;
  if (!r.categories.empty()) j["categories"] = r.categories;
  return j;
}

/// Throws InvalidInput on missing or mistyped fields, or when validate_record fails.
inline VoCoTInstructRecord record_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw InvalidInput("record is not a JSON object");
  VoCoTInstructRecord r;
  try {
    r.id = j.at("id").is_string() ? j.at("id").get<std::string>() : j.at("id").dump();
    r.image = j.value("image", std::string());
    if (j.contains("question") && !j.at("question").is_null()) {
      r.question = j.at("question").get<std::string>();
    }
    r.thought = j.at("thought").get<std::string>();
    r.answer = j.at("answer").get<std::string>();
    r.source_type = static_cast<SourceType>(j.at("source_type").get<int>());
    r.steps = j.value("steps", std::size_t{0});
    r.categories = j.value("categories", std::vector<std::string>{});
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("bad record: ") + e.what());
  }
  if (auto why = validate_record(r)) throw InvalidInput(*why);
  return r;
}

struct RunManifest {
  std::string command;
  nlohmann::json config = nlohmann::json::object();
  std::size_t inputs = 0;
  std::size_t outputs = 0;
  std::map<std::string, std::size_t> dropped;
  std::uint64_t seed = 0;
  std::string version;
  int schema_version = 0;
  double wall_clock_ms = 0;
  nlohmann::json extras = nlohmann::json::object();  // command-specific counters

  void drop(const std::string& reason, std::size_t n = 1) { dropped[reason] += n; }

  std::size_t dropped_total() const {
    std::size_t n = 0;
    for (const auto& [_, c] : dropped) n += c;
    return n;
  }

  bool reconciles() const { return inputs == outputs + dropped_total(); }

  /// The wall-clock field is the only nondeterministic one; leave it out to compare runs.
  nlohmann::json to_json(bool with_wall_clock = true) const {
    nlohmann::json j = {
        {"command", command},
        {"config", config},
        {"inputs", inputs},
        {"outputs", outputs},
        {"dropped", dropped},
        {"reconciles", reconciles()},
        {"seed", seed},
        {"toolkit_version", version},
        {"schema_version", schema_version},
        {"extras", extras},
    };
    if (with_wall_clock) j["wall_clock_ms"] = wall_clock_ms;
    return j;
  }
};

}  // namespace vocot
