#pragma once

// Shared fixtures. Literal reference strings are marked "printed"; everything
// else is constructed here.

#include <fstream>
#include <iterator>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

namespace fixtures {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline std::string fixture_path(const std::string& name) { return std::string(VOCOT_FIXTURE_DIR) + "/" + name; }

// ---------------------------------------------------------------------------
// Type 1: shelf and door. Pixel boxes reproduce the printed normalized boxes on a
// 500 x 500 image.

inline constexpr const char* kType1Program = "select: shelf -> select: door -> common:  [0, 1]";
inline constexpr const char* kType1Question = "What is common to the shelf and the door?";
inline constexpr const char* kType1FullAnswer = "The material, both the shelf and the door are wooden.";
inline constexpr const char* kType1Answer = "material.";
// printed
inline constexpr const char* kType1Thought =
    "Find the shelf [0.224, 0.219, 0.386, 0.592]. Find the door [0.394, 0.176, 0.524, 0.645] . "
    "The question ask the common attribute of the two objects. The material, both shelf [0.224, "
    "0.219, 0.386, 0.592] and door [0.394, 0.176, 0.524, 0.645] are wooden. So answer is material.";

inline nlohmann::json type1_question() {
  return {{"question_id", "gqa-shelf-door"}, {"imageId", "img-1"},      {"question", kType1Question},
          {"answer", kType1Answer},           {"fullAnswer", kType1FullAnswer}, {"semanticStr", kType1Program}};
}

inline nlohmann::json type1_scene() {
  return {{"imageId", "img-1"},
          {"width", 500},
          {"height", 500},
          {"objects",
           {{"1", {{"name", "shelf"}, {"x", 112}, {"y", 109.5}, {"w", 81}, {"h", 186.5}}},
            {"2", {{"name", "door"}, {"x", 197}, {"y", 88}, {"w", 65}, {"h", 234.5}}}}}};
}

// ---------------------------------------------------------------------------
// Dog example: box, rendered span on a 24 x 24 grid.

inline constexpr double kDogBox[4] = {0.27, 0.08, 0.92, 0.81};
inline constexpr const char* kDogRendered = "dog [c] 0.27, 0.08, 0.92, 0.81 [/c] <obj_0:323>";

// ---------------------------------------------------------------------------
// Synthesis hygiene batch: the two printed responses, ten poisoned responses and
// 38 clean constructed ones.

struct SynthesisItem {
  int type = 2;
  std::string id;
  nlohmann::json objects;  // [{label, box}]
  std::string question;    // type 2 only
  std::string answer;      // type 2 only
  std::string raw;         // generator response
  bool printed = false;
  bool poisoned = false;
};

inline SynthesisItem printed_type2() {
  SynthesisItem it;
  it.type = 2;
  it.id = "printed-type2";
  it.printed = true;
  it.objects = nlohmann::json::array({{{"label", "TV"}, {"box", {0.78, 0.84, 0.97, 0.98}}},
                                      {{"label", "Tie"}, {"box", {0.72, 0.12, 0.90, 0.60}}},
                                      {{"label", "Toothbrush"}, {"box", {0.15, 0.37, 0.56, 0.49}}},
                                      {{"label", "Person"}, {"box", {0.0, 0.13, 0.81, 1.0}}}});
  it.question = "What might be the purpose behind the woman's action?";
  it.answer = "The purpose behind her actions may be for entertainment.";
  // printed thought, wrapped in the response schema
  it.raw = nlohmann::json{
      {"Thought",
       "The woman [0.0, 0.13, 0.81, 1.0] is engaging in an unusual activity by using a toothbrush "
       "[0.15, 0.37, 0.56, 0.49] that is significantly larger than a standard one and wearing a tie "
       "[0.38, 0.6, 0.59, 0.99] that also appears to be oversized. \xE2\x80\xA6 It's plausible that "
       "her actions are meant to entertain or educate audiences."}}.dump();
  return it;
}

inline SynthesisItem printed_type3() {
  SynthesisItem it;
  it.type = 3;
  it.id = "printed-type3";
  it.printed = true;
  it.objects = nlohmann::json::array({{{"label", "Ferris wheel"}, {"box", {0.09, 0.40, 0.14, 0.54}}},
                                      {{"label", "Building"}, {"box", {0.40, 0.36, 0.58, 0.53}}},
                                      {{"label", "Statue"}, {"box", {0.72, 0.12, 0.90, 0.60}}},
                                      {{"label", "Dock"}, {"box", {0.00, 0.56, 0.33, 0.67}}},
                                      {{"label", "Stair"}, {"box", {0.01, 0.69, 1.00, 1.00}}}});
  it.raw = nlohmann::json{
      {"question", "Where is this location?"},
      {"answer", "Singapore."},
      {"thought",
       "First, The statue [0.72, 0.12, 0.90, 0.60] is Merlion Statue, a mythical creature with the "
       "head of a lion and the body of a fish, which is a mascot of Singapore. Secondly, the "
       "building [0.40, 0.36, 0.58, 0.53] \xE2\x80\xA6 Based on the distinctive architecture of the "
       "landmarks, this image is taken in Singapore."}}.dump();
  return it;
}

inline std::string box_text(const std::vector<double>& b) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(2);
  os << "[" << b[0] << ", " << b[1] << ", " << b[2] << ", " << b[3] << "]";
  return os.str();
}

inline std::vector<SynthesisItem> synthesis_batch(std::uint64_t seed = 17) {
  static const char* kLabels[] = {"cup", "dog", "chair", "lamp", "book", "plant", "clock", "bike"};
  static const char* kPatterns[] = {"From the object information provided",
                                    "provided object information",
                                    "From the bounding boxes provided"};
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> cell(0, 40);
  std::vector<SynthesisItem> items = {printed_type2(), printed_type3()};
  for (int i = 0; i < 48; ++i) {
    SynthesisItem it;
    it.type = i % 2 == 0 ? 2 : 3;
    it.id = "synthetic-" + std::to_string(i);
    std::vector<std::vector<double>> boxes;
    for (int k = 0; k < 3; ++k) {
      const double x = cell(rng) / 100.0, y = cell(rng) / 100.0;
      std::vector<double> b = {x, y, (20 + cell(rng)) / 100.0 + x, (20 + cell(rng)) / 100.0 + y};
      boxes.push_back(b);
      it.objects.push_back({{"label", kLabels[(i + k) % 8]}, {"box", b}});
    }
    const std::string a = kLabels[i % 8], b = kLabels[(i + 1) % 8];
    std::string thought = "The " + a + " " + box_text(boxes[0]) + " sits near the " + b + " " +
                          box_text(boxes[1]) + ".";
    if (i < 5) {
      // poisoned: a leaked prompt phrase
      it.poisoned = true;
      thought = std::string(kPatterns[i % 3]) + ", the " + a + " " + box_text(boxes[0]) + " is visible.";
    } else if (i < 10) {
      // poisoned: a box that is not in the object list
      it.poisoned = true;
      thought += " A shadow [0.91, 0.91, 0.99, 0.99] falls across it.";
    }
    if (it.type == 2) {
      it.question = "What is next to the " + a + "?";
      it.answer = "The " + b + ".";
      it.raw = "Here is the result: " + nlohmann::json{{"Thought", thought}}.dump();
    } else {
      it.raw = nlohmann::json{{"question", "What is next to the " + a + "?"},
                              {"answer", "The " + b + "."},
                              {"thought", thought}}
                   .dump();
    }
    items.push_back(std::move(it));
  }
  return items;
}

inline nlohmann::json objects_line(const SynthesisItem& it) {
  nlohmann::json j = {{"id", it.id}, {"image", it.id + ".jpg"}, {"objects", it.objects}};
  if (it.type == 2) {
    j["question"] = it.question;
    j["answer"] = it.answer;
  }
  return j;
}

inline nlohmann::json response_line(const SynthesisItem& it) {
  return {{"id", it.id}, {"image", it.id + ".jpg"}, {"raw_response", it.raw}};
}

}  // namespace fixtures
