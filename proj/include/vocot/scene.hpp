#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vocot/error.hpp"
#include "vocot/geometry.hpp"
#include "vocot/text.hpp"

namespace vocot {

struct SceneObject {
  std::string object_id;
  std::string name;
  BoundingBox box;
  friend bool operator==(const SceneObject&, const SceneObject&) = default;
};

class SceneGraph {
 public:
  SceneGraph() = default;
  explicit SceneGraph(std::string image_id) : image_id_(std::move(image_id)) {}

  const std::string& image_id() const noexcept { return image_id_; }
  const std::vector<SceneObject>& objects() const noexcept { return objects_; }

  void add(SceneObject obj) {
    if (obj.name.empty()) throw InvalidInput("scene object needs a name");
    if (by_id_.count(obj.object_id) != 0) {
      throw InvalidInput("duplicate scene object id: " + obj.object_id);
    }
    by_id_.emplace(obj.object_id, objects_.size());
    by_name_[text::to_lower(obj.name)].push_back(objects_.size());
    objects_.push_back(std::move(obj));
  }

  const SceneObject* find_id(std::string_view id) const {
    auto it = by_id_.find(std::string(id));
    return it == by_id_.end() ? nullptr : &objects_[it->second];
  }

  /// All instances with this (case-insensitive) name, in insertion order.
  std::vector<const SceneObject*> find_name(std::string_view name) const {
    std::vector<const SceneObject*> out;
    auto it = by_name_.find(text::to_lower(name));
    if (it == by_name_.end()) return out;
    for (std::size_t i : it->second) out.push_back(&objects_[i]);
    return out;
  }

  /// Largest-area instance of a name; the first one wins ties.
  const SceneObject* largest_named(std::string_view name) const {
    const SceneObject* best = nullptr;
    for (const auto* obj : find_name(name)) {
      if (best == nullptr || obj->box.area() > best->box.area()) best = obj;
    }
    return best;
  }

  /// Lowercased distinct names.
  std::vector<std::string> names() const {
    std::vector<std::string> out;
    for (const auto& [name, _] : by_name_) out.push_back(name);
    return out;
  }

 private:
  std::string image_id_;
  std::vector<SceneObject> objects_;
  std::map<std::string, std::size_t> by_id_;
  std::map<std::string, std::vector<std::size_t>> by_name_;
};

}  // namespace vocot
