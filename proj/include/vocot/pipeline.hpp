#pragma once

// Streaming commands behind the CLI. Every command reads JSON Lines one record at a
// time, writes in input order, and returns a manifest whose counts reconcile.
// Lookup tables (scene graphs, object lists) are indexed by byte offset rather
// than loaded, so memory stays bounded by the largest single line.

#include <algorithm>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "vocot/config.hpp"
#include "vocot/error.hpp"
#include "vocot/eval.hpp"
#include "vocot/filters.hpp"
#include "vocot/geometry.hpp"
#include "vocot/program.hpp"
#include "vocot/records.hpp"
#include "vocot/scene.hpp"
#include "vocot/sequence.hpp"
#include "vocot/synthesis.hpp"
#include "vocot/text.hpp"
#include "vocot/verbalizer.hpp"

namespace vocot {

using json = nlohmann::json;

namespace detail {

inline RunManifest start_manifest(std::string command, const Config& cfg) {
  RunManifest m;
  m.command = std::move(command);
  m.config = cfg.to_json();
  m.seed = cfg.seed;
  m.version = std::string(kToolkitVersion);
  m.schema_version = kRecordSchemaVersion;
  return m;
}

class Stopwatch {
 public:
  double ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0_).count();
  }

 private:
  std::chrono::steady_clock::time_point t0_ = std::chrono::steady_clock::now();
};

inline bool blank(std::string_view line) { return text::trim(line).empty(); }

/// Calls f(json) for every non-blank line; lines that are not JSON objects reach f
/// as a discarded value. Returns the number of non-blank lines.
template <class F>
std::size_t for_each_jsonl(std::istream& in, F&& f) {
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    if (blank(line)) continue;
    ++n;
    auto j = json::parse(line, nullptr, false);
    if (!j.is_discarded() && !j.is_object()) j = json(json::value_t::discarded);
    f(j);
  }
  if (in.bad()) throw StreamError("read error");
  return n;
}

inline std::string id_text(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer() || v.is_number_unsigned()) return v.dump();
  throw InvalidInput("id must be a string or an integer");
}

inline std::string required_string(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end() || !it->is_string()) throw InvalidInput(std::string("missing string field ") + key);
  return it->get<std::string>();
}

inline double required_number(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end() || !it->is_number()) throw InvalidInput(std::string("missing number field ") + key);
  return it->get<double>();
}

inline BoundingBox box_from_json(const json& v) {
  if (!v.is_array() || v.size() != 4) throw InvalidInput("box must be an array of four numbers");
  double c[4];
  for (std::size_t i = 0; i < 4; ++i) {
    if (!v[i].is_number()) throw InvalidInput("box must be an array of four numbers");
    c[i] = v[i].get<double>();
  }
  return BoundingBox(c[0], c[1], c[2], c[3]);
}

inline json box_to_json(const BoundingBox& b) {
  const auto c = b.coords();
  return json::array({c[0], c[1], c[2], c[3]});
}

/// Maps a key field of a JSON Lines file to line offsets, so single records can be
/// re-read on demand. The stream must be seekable.
class LineIndex {
 public:
  LineIndex(std::istream& in, const char* key) : in_(in) {
    std::string line;
    std::streamoff pos = in_.tellg();
    while (std::getline(in_, line)) {
      const std::streamoff next = in_.tellg();
      if (!blank(line)) {
        const auto j = json::parse(line, nullptr, false);
        const auto it = j.is_object() ? j.find(key) : j.end();
        if (j.is_object() && it != j.end() && (it->is_string() || it->is_number_integer())) {
          offsets_.try_emplace(id_text(*it), pos);
        } else {
          ++skipped_;
        }
      }
      pos = next;
    }
    in_.clear();
  }

  std::optional<json> fetch(const std::string& key) {
    if (cached_key_ == key) return cached_;
    const auto it = offsets_.find(key);
    if (it == offsets_.end()) return std::nullopt;
    in_.clear();
    in_.seekg(it->second);
    std::string line;
    std::getline(in_, line);
    cached_key_ = key;
    cached_ = json::parse(line, nullptr, false);
    return cached_;
  }

  std::size_t size() const noexcept { return offsets_.size(); }
  std::size_t skipped() const noexcept { return skipped_; }

 private:
  std::istream& in_;
  std::unordered_map<std::string, std::streamoff> offsets_;
  std::size_t skipped_ = 0;
  std::string cached_key_;
  json cached_;
};

struct SceneLoad {
  SceneGraph scene;
  std::size_t clamped = 0;
  std::size_t skipped_objects = 0;
};

/// GQA scene record {imageId, width, height, objects: {id: {name, x, y, w, h}}}.
inline SceneLoad scene_from_json(const json& j) {
  if (!j.is_object()) throw InvalidInput("scene is not a JSON object");
  SceneLoad out{SceneGraph(id_text(j.at("imageId"))), 0, 0};
  const double width = required_number(j, "width");
  const double height = required_number(j, "height");
  const auto objects = j.find("objects");
  if (objects == j.end() || !objects->is_object()) throw InvalidInput("scene has no objects map");
  for (const auto& [id, o] : objects->items()) {
    try {
      const PixelBox p{required_number(o, "x"), required_number(o, "y"), required_number(o, "w"),
                       required_number(o, "h"), width, height};
      std::size_t clamped = 0;
      const auto box = normalize_box(p, &clamped);
      out.clamped += clamped;
      out.scene.add({id, required_string(o, "name"), box});
    } catch (const InvalidInput&) {
      ++out.skipped_objects;
    }
  }
  return out;
}

inline std::vector<std::string> mention_categories(const GroundedThought& thought) {
  std::set<std::string> names;
  for (const auto& m : thought.mentions()) {
    if (!m.name.empty()) names.insert(text::to_lower(m.name));
  }
  return {names.begin(), names.end()};
}

inline ObjectInfo object_info_from_json(const json& arr) {
  if (!arr.is_array()) throw InvalidInput("objects must be an array");
  ObjectInfo info;
  for (const auto& o : arr) {
    info.objects.push_back({required_string(o, "label"), box_from_json(o.at("box"))});
  }
  return info;
}

inline std::vector<std::string> categories_of(const json& j, const ObjectInfo& info) {
  if (const auto it = j.find("categories"); it != j.end() && it->is_array()) {
    return it->get<std::vector<std::string>>();
  }
  std::set<std::string> labels;
  for (const auto& o : info.objects) labels.insert(text::to_lower(o.label));
  return {labels.begin(), labels.end()};
}

}  // namespace detail

// ---------------------------------------------------------------------------
// verbalize-gqa

/// Type 1 records from GQA questions and scene graphs. `scenes` must be seekable.
inline RunManifest verbalize_gqa(std::istream& questions, std::istream& scenes, std::ostream& out,
                                 const Config& cfg) {
  detail::Stopwatch clock;
  auto m = detail::start_manifest("verbalize-gqa", cfg);
  detail::LineIndex index(scenes, "imageId");
  std::size_t clamped = 0;
  std::size_t skipped_objects = 0;
  std::size_t skipped_steps = 0;
  std::optional<std::pair<std::string, detail::SceneLoad>> current;

  m.inputs = detail::for_each_jsonl(questions, [&](const json& q) {
    if (q.is_discarded()) return m.drop("malformed-record");
    VoCoTInstructRecord rec;
    std::string image_id, full_answer, semantic;
    try {
      rec.id = detail::id_text(q.at("question_id"));
      image_id = detail::id_text(q.at("imageId"));
      rec.question = detail::required_string(q, "question");
      rec.answer = detail::required_string(q, "answer");
      full_answer = detail::required_string(q, "fullAnswer");
      semantic = detail::required_string(q, "semanticStr");
    } catch (const std::exception&) {
      return m.drop("malformed-record");
    }
    rec.image = image_id;
    rec.source_type = SourceType::kGqa;

    if (!current || current->first != image_id) {
      const auto raw = index.fetch(image_id);
      if (!raw) return m.drop("missing-scene");
      try {
        current.emplace(image_id, detail::scene_from_json(*raw));
      } catch (const std::exception&) {
        current.reset();
        return m.drop("missing-scene");
      }
      clamped += current->second.clamped;
      skipped_objects += current->second.skipped_objects;
    }

    SemanticProgram program;
    try {
      program = parse_program(semantic);
    } catch (const ProgramParseError&) {
      return m.drop("program-parse");
    }
    const std::size_t unknown = count_unknown(program);
    if (unknown != 0 && !cfg.keep_unknown_ops) return m.drop("unknown-op");
    try {
      const auto thought =
          build_thought(program, current->second.scene, full_answer, rec.answer, cfg.keep_unknown_ops);
      rec.thought = thought.render(cfg.precision);
      rec.categories = detail::mention_categories(thought);
    } catch (const GroundingMiss&) {
      return m.drop("grounding-miss");
    } catch (const UnknownOperation&) {
      return m.drop("unknown-op");
    }
    skipped_steps += unknown;
    rec.steps = count_steps(program) - unknown;
    out << to_json(rec).dump() << '\n';
    ++m.outputs;
  });
  m.extras = {{"scenes_indexed", index.size()},
              {"scene_lines_skipped", index.skipped()},
              {"scene_boxes_clamped", clamped},
              {"scene_objects_skipped", skipped_objects},
              {"unknown_steps_skipped", skipped_steps}};
  m.wall_clock_ms = clock.ms();
  return m;
}

// ---------------------------------------------------------------------------
// synthesize

/// Phase one: one request payload per object record. Objects lines look like
/// {id, image, objects: [{label, box}], question?, answer?, categories?}. With a
/// per-category cap the input is read twice, so it must be seekable.
inline RunManifest synthesize_payloads(std::istream& objects, std::ostream& out, SourceType mode,
                                       const Config& cfg) {
  if (mode != SourceType::kVqa && mode != SourceType::kImageOnly) {
    throw ConfigError("synthesis mode must be 2 or 3");
  }
  detail::Stopwatch clock;
  auto m = detail::start_manifest("synthesize-payloads", cfg);

  std::optional<std::vector<bool>> selected;
  if (cfg.per_category_cap != 0) {
    const auto start = objects.tellg();
    std::vector<std::vector<std::string>> cats;
    std::vector<std::size_t> usable;  // positions among non-blank lines
    std::size_t line = 0;
    detail::for_each_jsonl(objects, [&](const json& j) {
      const std::size_t here = line++;
      if (j.is_discarded()) return;
      try {
        cats.push_back(detail::categories_of(j, detail::object_info_from_json(j.at("objects"))));
        usable.push_back(here);
      } catch (const std::exception&) {
      }
    });
    selected.emplace(line, false);
    for (std::size_t k : balanced_sample(cats, cfg.per_category_cap, cfg.seed)) {
      (*selected)[usable[k]] = true;
    }
    objects.clear();
    objects.seekg(start);
  }

  std::size_t line = 0;
  m.inputs = detail::for_each_jsonl(objects, [&](const json& j) {
    const std::size_t here = line++;
    if (j.is_discarded()) return m.drop("malformed-record");
    std::string id, image;
    ObjectInfo info;
    try {
      id = detail::id_text(j.at("id"));
      image = detail::required_string(j, "image");
      info = detail::object_info_from_json(j.at("objects"));
    } catch (const InvalidInput&) {
      return m.drop("malformed-box");
    } catch (const std::exception&) {
      return m.drop("malformed-record");
    }
    if (info.empty()) return m.drop("no-objects");
    if (selected && !(*selected)[here]) return m.drop("over-cap");
    SynthesisPayload p;
    if (mode == SourceType::kVqa) {
      const auto q = j.find("question");
      const auto a = j.find("answer");
      if (q == j.end() || a == j.end() || !q->is_string() || !a->is_string() ||
          text::trim(q->get<std::string>()).empty() || text::trim(a->get<std::string>()).empty()) {
        return m.drop("missing-qa");
      }
      p = build_type2_payload(info, q->get<std::string>(), a->get<std::string>(), image,
                              cfg.object_info_precision);
    } else {
      p = build_type3_payload(info, image, cfg.object_info_precision);
    }
    out << json{{"id", id}, {"image", image}, {"type", static_cast<int>(mode)},
                {"messages", p.messages()}, {"schema", p.schema}}
               .dump()
        << '\n';
    ++m.outputs;
  });
  m.wall_clock_ms = clock.ms();
  return m;
}

/// Phase two: generator responses {id, image, raw_response} checked against the object
/// records they were requested for. `objects` must be seekable.
inline RunManifest synthesize_ingest(std::istream& objects, std::istream& responses,
                                     std::ostream& out, SourceType mode, const Config& cfg) {
  if (mode != SourceType::kVqa && mode != SourceType::kImageOnly) {
    throw ConfigError("synthesis mode must be 2 or 3");
  }
  detail::Stopwatch clock;
  auto m = detail::start_manifest("synthesize-ingest", cfg);
  detail::LineIndex index(objects, "id");
  std::size_t parsed_ok = 0;

  m.inputs = detail::for_each_jsonl(responses, [&](const json& r) {
    if (r.is_discarded()) return m.drop("malformed-record");
    std::string id, raw;
    try {
      id = detail::id_text(r.at("id"));
      raw = detail::required_string(r, "raw_response");
    } catch (const std::exception&) {
      return m.drop("malformed-record");
    }
    const auto source = index.fetch(id);
    if (!source || !source->is_object()) return m.drop("missing-objects");
    ObjectInfo info;
    std::string image;
    try {
      info = detail::object_info_from_json(source->at("objects"));
      image = r.contains("image") && r["image"].is_string() ? r["image"].get<std::string>()
                                                          : source->value("image", std::string());
    } catch (const std::exception&) {
      return m.drop("missing-objects");
    }
    if (parse_synthesis_response(raw, schema_for(mode)).ok()) ++parsed_ok;
    auto res = ingest_response(raw, mode, info, cfg.synthesis);
    if (!res.ok()) return m.drop(std::string(reason_name(res.reason)));

    VoCoTInstructRecord rec;
    rec.id = id;
    rec.image = image;
    rec.source_type = mode;
    rec.thought = res.record->thought.render(cfg.synthesis_precision);
    rec.categories = detail::categories_of(*source, info);
    if (mode == SourceType::kVqa) {
      rec.question = source->value("question", std::string());
      rec.answer = source->value("answer", std::string());
    } else {
      rec.question = res.record->question;
      rec.answer = res.record->answer;
    }
    if (auto why = validate_record(rec)) return m.drop("invalid-record");
    out << to_json(rec).dump() << '\n';
    ++m.outputs;
  });
  // Responses that parsed before the hygiene checks versus records finally emitted.
  m.extras = {{"raw_parsed", parsed_ok}, {"emitted", m.outputs}};
  m.wall_clock_ms = clock.ms();
  return m;
}

// ---------------------------------------------------------------------------
// assemble

/// Training lines {id, image, sequence_text, visual_refs, grid, answer} from records.
inline RunManifest assemble_records(std::istream& records, std::ostream& out, const Config& cfg,
                                    const InstructionLayout& layout = {}) {
  detail::Stopwatch clock;
  auto m = detail::start_manifest("assemble", cfg);
  m.inputs = detail::for_each_jsonl(records, [&](const json& j) {
    if (j.is_discarded()) return m.drop("malformed-record");
    VoCoTInstructRecord rec;
    try {
      rec = record_from_json(j);
    } catch (const std::exception&) {
      return m.drop("invalid-record");
    }
    const auto thought = parse_thought(rec.thought);
    const auto seq = assemble_instruction(rec.question.value_or(""), thought, cfg.grid,
                                          cfg.precision, layout, cfg.cover);
    if (check_well_formed(seq)) return m.drop("ill-formed-sequence");
    const auto rendered = render_training_text(seq);
    json refs = json::array();
    for (const auto& r : rendered.visual_refs) refs.push_back({{"pos", r.pos}, {"indices", r.indices}});
    out << json{{"id", rec.id},
                {"image", rec.image},
                {"sequence_text", rendered.text},
                {"visual_refs", refs},
                {"grid", {cfg.grid.rows, cfg.grid.cols}},
                {"answer", rec.answer}}
               .dump()
        << '\n';
    ++m.outputs;
  });
  m.wall_clock_ms = clock.ms();
  return m;
}

// ---------------------------------------------------------------------------
// filter

enum class FilterKind { kMmc4, kGrit, kVgRegion };

inline FilterKind parse_filter_kind(std::string_view s) {
  if (s == "mmc4") return FilterKind::kMmc4;
  if (s == "grit") return FilterKind::kGrit;
  if (s == "vg-region") return FilterKind::kVgRegion;
  throw ConfigError("filter kind must be mmc4, grit or vg-region");
}

/// Metadata lines in, kept ids out (one JSON value per line). Expected fields:
///   mmc4       {id, similarities: [..], image_count?}
///   grit       {id, clip_score}
///   vg-region  {id, w, h, x?, y?, width?, height?}
/// The drop-reason histogram is the manifest's `dropped` map.
inline RunManifest filter_corpus(FilterKind kind, std::istream& meta, std::ostream& kept_ids,
                                 const Config& cfg) {
  detail::Stopwatch clock;
  static constexpr const char* kNames[] = {"filter-mmc4", "filter-grit", "filter-vg-region"};
  auto m = detail::start_manifest(kNames[static_cast<int>(kind)], cfg);
  FilterTally tally;
  m.inputs = detail::for_each_jsonl(meta, [&](const json& j) {
    std::string id;
    FilterDecision d = FilterDecision::drop("malformed");
    if (!j.is_discarded()) {
      try {
        id = detail::id_text(j.at("id"));
        switch (kind) {
          case FilterKind::kMmc4: {
            InterleavedDocMeta doc;
            doc.similarities = j.at("similarities").get<std::vector<double>>();
            doc.image_count = j.value("image_count", doc.similarities.size());
            d = filter_interleaved(doc, cfg.filters);
            break;
          }
          case FilterKind::kGrit:
            d = filter_grounded_caption({detail::required_number(j, "clip_score")}, cfg.filters);
            break;
          case FilterKind::kVgRegion: {
            const PixelBox p{j.value("x", 0.0), j.value("y", 0.0), detail::required_number(j, "w"),
                             detail::required_number(j, "h"), j.value("width", 0.0),
                             j.value("height", 0.0)};
            d = filter_small_region(p, cfg.filters);
            break;
          }
        }
      } catch (const std::exception&) {
        d = FilterDecision::drop("malformed");
      }
    }
    tally.add(d);
    if (d.keep) kept_ids << json(id).dump() << '\n';
  });
  m.outputs = tally.kept;
  m.dropped = tally.dropped;
  m.wall_clock_ms = clock.ms();
  return m;
}

// ---------------------------------------------------------------------------
// eval

enum class EvalTask { kRec, kMc, kYesNo, kChair };

inline EvalTask parse_eval_task(std::string_view s) {
  if (s == "rec") return EvalTask::kRec;
  if (s == "mc") return EvalTask::kMc;
  if (s == "yesno") return EvalTask::kYesNo;
  if (s == "chair") return EvalTask::kChair;
  throw ConfigError("eval task must be rec, mc, yesno or chair");
}

inline constexpr double kSweepThresholds[] = {0.3, 0.5, 0.7};

struct EvalReport {
  json report;        // machine-readable summary
  std::string summary;  // one human-readable line
};

/// Predictions and gold files are line-aligned and must agree on ids.
///   rec    pred {id, prediction}            gold {id, box, steps?}
///   mc     pred {id, scores: [..]}          gold {id, answer: index, steps?}
///   yesno  pred {id, prediction}            gold {id, answer: "yes"|"no", steps?}
///   chair  pred {id, prediction}            gold {id, objects: [..], synonyms?: {name: [..]}}
/// Per-record rows go to `csv` when given.
inline RunManifest eval_predictions(EvalTask task, std::istream& predictions, std::istream& gold,
                                    EvalReport& result, const Config& cfg,
                                    std::ostream* csv = nullptr) {
  static constexpr const char* kNames[] = {"rec", "mc", "yesno", "chair"};
  detail::Stopwatch clock;
  auto m = detail::start_manifest(std::string("eval-") + kNames[static_cast<int>(task)], cfg);
  if (!(cfg.rec.threshold > 0.0 && cfg.rec.threshold <= 1.0)) {
    throw ConfigError("IoU threshold must be in (0, 1]");
  }

  Accuracy acc;
  std::map<double, Accuracy> sweep;
  std::map<std::size_t, Accuracy> by_steps;
  double chair_sum = 0, coverage_sum = 0;
  std::size_t mentioned_total = 0, hallucinated_total = 0;
  if (csv != nullptr) {
    *csv << (task == EvalTask::kChair ? "id,chair,coverage,mentioned,hallucinated\n"
                                      : task == EvalTask::kRec ? "id,correct,iou\n"
                                      : task == EvalTask::kMc  ? "id,correct,selected\n"
                                                               : "id,correct,normalized\n");
  }

  std::string gold_line;
  const auto next_gold = [&]() -> std::optional<json> {
    while (std::getline(gold, gold_line)) {
      if (detail::blank(gold_line)) continue;
      auto j = json::parse(gold_line, nullptr, false);
      if (!j.is_object()) j = json(json::value_t::discarded);
      return j;
    }
    return std::nullopt;
  };

  m.inputs = detail::for_each_jsonl(predictions, [&](const json& p) {
    const auto g = next_gold();
    if (!g) return m.drop("missing-gold");
    if (p.is_discarded() || g->is_discarded()) return m.drop("malformed-record");
    std::string id;
    try {
      id = detail::id_text(p.at("id"));
      if (detail::id_text(g->at("id")) != id) return m.drop("id-mismatch");
      bool correct = false;
      std::string row;
      switch (task) {
        case EvalTask::kRec: {
          const auto gold_box = detail::box_from_json(g->at("box"));
          const auto pred = detail::required_string(p, "prediction");
          correct = rec_correct(pred, gold_box, cfg.rec);
          for (double t : kSweepThresholds) sweep[t].add(rec_correct(pred, gold_box, {t, cfg.rec.inclusive}));
          const auto boxes = extract_boxes(pred).boxes;
          row = (correct ? "1," : "0,") + (boxes.empty() ? std::string() : format_fixed(iou(boxes.front(), gold_box), 6));
          break;
        }
        case EvalTask::kMc: {
          const auto scores = p.at("scores").get<std::vector<double>>();
          const auto answer = g->at("answer").get<std::size_t>();
          if (answer >= scores.size()) throw InvalidInput("gold index out of range");
          const auto pick = mc_select(scores);
          correct = pick == answer;
          row = (correct ? "1," : "0,") + std::to_string(pick);
          break;
        }
        case EvalTask::kYesNo: {
          const auto pred = detail::required_string(p, "prediction");
          correct = exact_match_yesno(pred, detail::required_string(*g, "answer"));
          row = (correct ? "1," : "0,") + normalize_yesno(pred);
          break;
        }
        case EvalTask::kChair: {
          const auto names = g->at("objects").get<std::vector<std::string>>();
          std::set<std::string> gold_set;
          for (const auto& n : names) gold_set.insert(text::to_lower(n));
          Lexicon lex;
          if (const auto s = g->find("synonyms"); s != g->end()) lex = s->get<Lexicon>();
          const auto r = chair_metrics(detail::required_string(p, "prediction"), gold_set, lex);
          chair_sum += r.chair;
          coverage_sum += r.coverage;
          mentioned_total += r.mentioned.size();
          hallucinated_total += r.hallucinated;
          correct = r.hallucinated == 0;
          row = format_fixed(r.chair, 6) + "," + format_fixed(r.coverage, 6) + "," +
                std::to_string(r.mentioned.size()) + "," + std::to_string(r.hallucinated);
          break;
        }
      }
      if (const auto s = g->find("steps"); s != g->end() && task != EvalTask::kChair) {
        const auto steps = s->get<std::size_t>();
        if (steps == 0) throw InvalidInput("step count must be at least 1");
        by_steps[steps].add(correct);
      }
      acc.add(correct);
      if (csv != nullptr) *csv << id << ',' << row << '\n';
      ++m.outputs;
    } catch (const std::exception&) {
      m.drop("malformed-record");
    }
  });
  std::size_t extra_gold = 0;
  while (next_gold()) ++extra_gold;

  json report = {{"task", kNames[static_cast<int>(task)]}, {"scored", acc.total}};
  std::string summary = std::string(kNames[static_cast<int>(task)]) + ": ";
  if (task == EvalTask::kChair) {
    const double n = static_cast<double>(std::max<std::size_t>(1, acc.total));
    report["chair_mean"] = chair_sum / n;
    report["coverage_mean"] = coverage_sum / n;
    report["chair_instance"] = static_cast<double>(hallucinated_total) /
                               static_cast<double>(std::max<std::size_t>(1, mentioned_total));
    report["hallucination_free"] = acc.correct;
    summary += "chair " + format_fixed(report["chair_mean"].get<double>(), 4) + " coverage " +
               format_fixed(report["coverage_mean"].get<double>(), 4);
  } else {
    report["correct"] = acc.correct;
    report["accuracy"] = acc.value();
    summary += std::to_string(acc.correct) + "/" + std::to_string(acc.total) + " = " +
               format_fixed(acc.value(), 4);
  }
  if (task == EvalTask::kRec) {
    report["threshold"] = cfg.rec.threshold;
    json s = json::object();
    for (const auto& [t, a] : sweep) s[format_fixed(t, 1)] = {{"correct", a.correct}, {"accuracy", a.value()}};
    report["sweep"] = s;
  }
  if (!by_steps.empty()) {
    json b = json::object();
    for (const auto& [k, a] : by_steps) {
      b[std::to_string(k)] = {{"correct", a.correct}, {"total", a.total}, {"accuracy", a.value()}};
    }
    report["by_steps"] = b;
  }
  m.extras = {{"unmatched_gold_lines", extra_gold}};
  result.report = std::move(report);
  result.summary = std::move(summary);
  m.wall_clock_ms = clock.ms();
  return m;
}

// ---------------------------------------------------------------------------
// stats

/// Counts over VoCoT-Instruct records: per source type, reasoning steps and boxes per
/// thought. The reference mix from the config is carried along for comparison.
inline RunManifest corpus_stats(std::istream& records, json& stats, const Config& cfg) {
  detail::Stopwatch clock;
  auto m = detail::start_manifest("stats", cfg);
  std::map<std::string, std::size_t> per_type = {{"1", 0}, {"2", 0}, {"3", 0}};
  std::map<std::string, std::size_t> steps_hist, box_hist;
  m.inputs = detail::for_each_jsonl(records, [&](const json& j) {
    if (j.is_discarded()) return m.drop("malformed-record");
    VoCoTInstructRecord rec;
    try {
      rec = record_from_json(j);
    } catch (const std::exception&) {
      return m.drop("invalid-record");
    }
    ++per_type[std::to_string(static_cast<int>(rec.source_type))];
    if (rec.steps != 0) ++steps_hist[std::to_string(rec.steps)];
    ++box_hist[std::to_string(extract_boxes(rec.thought).boxes.size())];
    ++m.outputs;
  });
  stats = {{"records", m.outputs},
           {"per_source_type", per_type},
           {"step_histogram", steps_hist},
           {"box_count_histogram", box_hist},
           {"reference_mix", {{"1", cfg.mix.type1}, {"2", cfg.mix.type2}, {"3", cfg.mix.type3}}}};
  m.wall_clock_ms = clock.ms();
  return m;
}

}  // namespace vocot
