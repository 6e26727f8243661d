#pragma once

// Rule-based conversion of a GQA semantic program into a grounded thought.
// Clause templates are reproduced word for word, including their grammar.

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vocot/error.hpp"
#include "vocot/program.hpp"
#include "vocot/scene.hpp"
#include "vocot/text.hpp"
#include "vocot/thought.hpp"

namespace vocot {

/// Object each step resolved to, indexed by step. Filled by verbalize_step.
struct StepBindings {
  std::vector<std::optional<SceneObject>> by_step;

  const SceneObject* at(std::size_t i) const {
    return i < by_step.size() && by_step[i] ? &*by_step[i] : nullptr;
  }
  void set(std::size_t i, const SceneObject* obj) {
    // Copy first: obj may point into by_step itself.
    std::optional<SceneObject> value = obj ? std::optional<SceneObject>(*obj) : std::nullopt;
    if (by_step.size() <= i) by_step.resize(i + 1);
    by_step[i] = std::move(value);
  }
};

namespace detail {

inline bool is_placeholder(std::string_view s) { return s.empty() || s == "_" || s == "-"; }

inline std::string attribute_of(const SemanticStep& step) {
  if (!step.qualifier.empty()) return step.qualifier;
  if (step.args.empty()) return "attribute";
  const std::string_view a = step.args.front();
  return std::string(text::trim(a.substr(0, a.find('['))));
}

// Returns a pointer into the scene, which outlives any growth of `bindings`.
inline const SceneObject* first_input(const SemanticProgram& program, std::size_t index,
                                      const SceneGraph& scene, const StepBindings& bindings) {
  for (std::size_t r : step_inputs(program, index)) {
    if (const auto* obj = bindings.at(r)) return scene.find_id(obj->object_id);
  }
  return nullptr;
}

inline const SceneObject* by_ids(const SemanticStep& step, const SceneGraph& scene) {
  for (const auto& id : step.object_ids) {
    if (is_placeholder(id)) continue;
    if (const auto* obj = scene.find_id(id)) return obj;
  }
  return nullptr;
}

// Name lookup that prefers an instance some earlier step already bound.
inline const SceneObject* by_name(std::string_view name, const SceneGraph& scene,
                                  const StepBindings& bindings) {
  for (const auto& bound : bindings.by_step) {
    if (bound && text::iequals(bound->name, name)) {
      if (const auto* obj = scene.find_id(bound->object_id)) return obj;
    }
  }
  return scene.largest_named(name);
}

inline void mention(GroundedThought& out, std::string_view name, const SceneObject* obj) {
  if (obj != nullptr) {
    out.append_mention(std::string(name.empty() ? std::string_view(obj->name) : name), obj->box);
  } else {
    out.append_text(name);
  }
}

// An object slot filled by a name argument, falling back to an upstream step.
struct Slot {
  std::string name;
  const SceneObject* obj = nullptr;
};

inline Slot resolve_slot(std::string_view name, const SceneObject* upstream,
                         const SceneGraph& scene, const StepBindings& bindings) {
  if (!is_placeholder(name)) {
    const auto* obj = by_name(name, scene, bindings);
    return {std::string(name), obj};
  }
  if (upstream != nullptr) return {upstream->name, upstream};
  throw GroundingMiss(std::string(name.empty() ? "<unbound>" : name));
}

}  // namespace detail

/// One clause for step `index`; records the step's resolved object in `bindings`.
/// Throws GroundingMiss when a required object cannot be found and
/// UnknownOperation for steps outside the rule table.
inline GroundedThought verbalize_step(const SemanticProgram& program, std::size_t index,
                                      const SceneGraph& scene, StepBindings& bindings) {
  const SemanticStep& step = program.steps.at(index);
  const bool terminal = index + 1 == program.steps.size();
  const SceneObject* upstream = detail::first_input(program, index, scene, bindings);
  const auto arg = [&](std::size_t i) -> std::string {
    return i < step.args.size() ? step.args[i] : std::string();
  };
  GroundedThought out;

  switch (step.op) {
    case OpKind::kSelect: {
      const std::string name = arg(0);
      const SceneObject* obj = detail::by_ids(step, scene);
      if (obj == nullptr && !detail::is_placeholder(name)) obj = scene.largest_named(name);
      if (obj == nullptr) throw GroundingMiss(name.empty() ? "<unnamed>" : name);
      bindings.set(index, obj);
      out.append_text("Find the ");
      detail::mention(out, detail::is_placeholder(name) ? obj->name : name, obj);
      out.append_text(".");
      break;
    }
    case OpKind::kRelate: {
      const std::string subject_name = arg(0);
      const SceneObject* subject = detail::by_ids(step, scene);
      if (subject == nullptr && !detail::is_placeholder(subject_name)) {
        subject = scene.largest_named(subject_name);
      }
      if (subject == nullptr) throw GroundingMiss(subject_name.empty() ? "<unnamed>" : subject_name);
      // Third argument is either an object name or GQA's s/o direction flag.
      std::string object_name = arg(2);
      if (object_name == "s" || object_name == "o") object_name.clear();
      const auto object = detail::resolve_slot(object_name, upstream, scene, bindings);
      bindings.set(index, subject);
      out.append_text("Check the ");
      detail::mention(out, detail::is_placeholder(subject_name) ? subject->name : subject_name,
                      subject);
      out.append_text(" that is " + arg(1) + " ");
      detail::mention(out, object.name, object.obj);
      out.append_text(".");
      break;
    }
    case OpKind::kVerify: {
      // Flat form "verify: attribute, value, obj"; GQA form "verify color: white [0]".
      const bool qualified = !step.qualifier.empty();
      const std::string attribute = qualified ? step.qualifier : arg(0);
      const std::string value = qualified ? arg(0) : arg(1);
      const auto obj = detail::resolve_slot(qualified ? "" : arg(2), upstream, scene, bindings);
      bindings.set(index, obj.obj);
      out.append_text("Verify if the " + attribute + " of ");
      detail::mention(out, obj.name, obj.obj);
      out.append_text(" is " + value + ".");
      break;
    }
    case OpKind::kExist: {
      const std::string name = arg(0);
      const SceneObject* obj = detail::is_placeholder(name)
                                   ? upstream
                                   : detail::by_name(name, scene, bindings);
      bindings.set(index, obj);
      out.append_text(obj != nullptr ? "It exist." : "It doesn't exist.");
      break;
    }
    case OpKind::kChoose: {
      std::string attribute;
      std::string value1;
      std::string value2;
      detail::Slot first;
      std::optional<detail::Slot> second;
      if (!step.qualifier.empty()) {
        // GQA form "choose color: red|blue [0]".
        attribute = step.qualifier;
        const auto values = text::split(arg(0), '|');
        value1 = values.empty() ? "" : std::string(text::trim(values[0]));
        value2 = values.size() > 1 ? std::string(text::trim(values[1])) : arg(1);
        first = detail::resolve_slot("", upstream, scene, bindings);
        const auto inputs = step_inputs(program, index);
        if (inputs.size() > 1) {
          if (const auto* bound = bindings.at(inputs[1])) {
            if (const auto* obj = scene.find_id(bound->object_id)) second = detail::Slot{obj->name, obj};
          }
        }
      } else {
        first = detail::resolve_slot(arg(0), upstream, scene, bindings);
        attribute = arg(1);
        value1 = arg(2);
        value2 = arg(3);
        if (!detail::is_placeholder(arg(4))) {
          second = detail::resolve_slot(arg(4), nullptr, scene, bindings);
        }
      }
      bindings.set(index, first.obj);
      out.append_text("Think ");
      detail::mention(out, first.name, first.obj);
      out.append_text("'s " + attribute + " is " + value1 + " or " + value2);
      if (second) {
        out.append_text(" of ");
        detail::mention(out, second->name, second->obj);
      }
      out.append_text(".");
      break;
    }
    case OpKind::kCommon:
      out.append_text("The question ask the common attribute of the two objects.");
      break;
    case OpKind::kSame:
      // The rule table lists two phrasings; the restating one closes a program.
      if (terminal) {
        out.append_text("The question ask if the two objects has same " +
                        detail::attribute_of(step) + ".");
      } else {
        out.append_text("Check if they have same " + detail::attribute_of(step) + ".");
      }
      break;
    case OpKind::kDifferent:
      out.append_text("The question ask if the two objects has different " +
                      detail::attribute_of(step) + ".");
      break;
    case OpKind::kAnd:
      out.append_text("The question ask about 'and' relation.");
      break;
    case OpKind::kOr:
      out.append_text("The question ask about 'or' relation.");
      break;
    case OpKind::kUnknown:
      throw UnknownOperation(step.name);
  }
  return out;
}

/// Annotates every whole-word, case-insensitive occurrence of a scene object name with
/// its box. Longest names match first. A lowercase "the " right before a match is dropped.
/// For repeated names the first instance bound by the program wins, else the largest.
inline GroundedThought ground_answer(std::string_view answer, const SceneGraph& scene,
                                     const StepBindings& bindings = {}) {
  struct Candidate {
    std::string name;
    const SceneObject* obj;
  };
  std::vector<Candidate> candidates;
  for (const auto& name : scene.names()) {
    candidates.push_back({name, detail::by_name(name, scene, bindings)});
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Candidate& a, const Candidate& b) { return a.name.size() > b.name.size(); });

  GroundedThought out;
  std::string pending;
  std::size_t i = 0;
  while (i < answer.size()) {
    const bool word_start = i == 0 || !text::is_word_char(answer[i - 1]);
    const Candidate* hit = nullptr;
    if (word_start) {
      for (const auto& c : candidates) {
        if (i + c.name.size() <= answer.size() &&
            text::iequals(answer.substr(i, c.name.size()), c.name) &&
            text::at_word_boundary(answer, i, c.name.size())) {
          hit = &c;
          break;
        }
      }
    }
    if (hit == nullptr) {
      pending.push_back(answer[i]);
      ++i;
      continue;
    }
    if (pending.size() >= 4 && pending.compare(pending.size() - 4, 4, "the ") == 0 &&
        (pending.size() == 4 || !text::is_word_char(pending[pending.size() - 5]))) {
      pending.resize(pending.size() - 4);
    }
    out.append_text(pending);
    pending.clear();
    out.append_mention(std::string(answer.substr(i, hit->name.size())), hit->obj->box);
    i += hit->name.size();
  }
  out.append_text(pending);
  return out;
}

/// Step clauses, then the grounded full answer, then "So answer is {answer}.",
/// separated by single spaces. With skip_unknown, steps outside the rule table
/// contribute no clause instead of throwing UnknownOperation.
inline GroundedThought build_thought(const SemanticProgram& program, const SceneGraph& scene,
                                     std::string_view full_answer, std::string_view answer,
                                     bool skip_unknown = false) {
  GroundedThought out;
  StepBindings bindings;
  for (std::size_t i = 0; i < program.steps.size(); ++i) {
    if (skip_unknown && program.steps[i].op == OpKind::kUnknown) {
      // A skipped step hands its input through so later references still resolve.
      bindings.set(i, detail::first_input(program, i, scene, bindings));
      continue;
    }
    if (!out.empty()) out.append_text(" ");
    out.append(verbalize_step(program, i, scene, bindings));
  }
  const auto full = text::trim(full_answer);
  if (!full.empty()) {
    if (!out.empty()) out.append_text(" ");
    out.append(ground_answer(full, scene, bindings));
  }
  auto short_answer = text::trim(answer);
  while (!short_answer.empty() && short_answer.back() == '.') short_answer.remove_suffix(1);
  if (!out.empty()) out.append_text(" ");
  out.append_text("So answer is " + std::string(short_answer) + ".");
  return out;
}

}  // namespace vocot
