#pragma once

#include <string>
#include <utility>
#include <vector>

#include "wfforge/instance.hpp"

namespace test_helpers {

/// Instance with bare tasks (id, type, parents); runtimes default to 1.0.
inline wfforge::WorkflowInstance make_instance(
    std::string name,
    const std::vector<std::tuple<std::string, std::string, std::vector<std::string>>>& tasks) {
  wfforge::WorkflowInstance w;
  w.name = std::move(name);
  for (const auto& [id, type, parents] : tasks) {
    wfforge::Task t;
    t.id = id;
    t.type = type;
    t.parents = parents;
    t.runtime_s = 1.0;
    w.tasks.push_back(std::move(t));
  }
  w.finalize();
  return w;
}

/// Minimal instance JSON wrapping the given tasks array.
inline std::string instance_json(const std::string& tasks_json,
                                 const std::string& name = "test") {
  return "{\"name\":\"" + name + "\",\"schemaVersion\":\"wfforge-1.0\",\"workflow\":{\"tasks\":" +
         tasks_json + "}}";
}

}  // namespace test_helpers
