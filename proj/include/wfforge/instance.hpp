#pragma once

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "wfforge/error.hpp"

namespace wfforge {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

inline constexpr std::string_view kSchemaVersion = "wfforge-1.0";

/// A named data artifact consumed or produced by a task.
struct FileSpec {
  std::string name;
  std::int64_t size_bytes = 0;
  json extra = json::object();  // unknown wire fields, kept for round-tripping

  friend bool operator==(const FileSpec&, const FileSpec&) = default;
};

/// One node of the workflow DAG. `type` is the executable/category name and
/// is the unit of statistical modeling; `id` is unique within an instance.
struct Task {
  std::string id;
  std::string type;
  double runtime_s = 0.0;
  int cores = 1;
  std::vector<FileSpec> input_files;
  std::vector<FileSpec> output_files;
  std::vector<std::string> parents;  // normalized: sorted, unique
  std::optional<std::string> machine;
  json extra = json::object();

  friend bool operator==(const Task&, const Task&) = default;
};

struct Machine {
  std::string name;
  std::optional<double> cpu_speed_mhz;
  std::optional<int> cpu_cores;
  std::optional<std::int64_t> memory_bytes;
  json cpu_extra = json::object();
  json extra = json::object();

  friend bool operator==(const Machine&, const Machine&) = default;
};

/// A workflow execution instance: task DAG plus per-task performance data
/// and platform metadata. Immutable after finalize(); share freely across
/// threads for reading.
///
/// The children relation is always derived from `parents` (never read from
/// input), so the two can not disagree.
struct WorkflowInstance {
  std::string name;
  std::string schema_version{kSchemaVersion};
  std::optional<double> makespan_s;
  std::vector<Machine> machines;
  std::vector<Task> tasks;
  json workflow_extra = json::object();
  json root_extra = json::object();

  std::size_t size() const { return tasks.size(); }

  /// Rebuilds the id index and the derived adjacency. Call after any
  /// structural edit. Parent lists are normalized (sorted, deduplicated);
  /// parent references that do not resolve are kept in `parents` (the
  /// validator reports them) but excluded from the adjacency.
  void finalize() {
    index_.clear();
    index_.reserve(tasks.size());
    for (std::size_t i = 0; i < tasks.size(); ++i) {
      index_.emplace(tasks[i].id, i);  // first occurrence wins on duplicates
    }
    parents_of_.assign(tasks.size(), {});
    children_of_.assign(tasks.size(), {});
    for (std::size_t i = 0; i < tasks.size(); ++i) {
      auto& ps = tasks[i].parents;
      std::sort(ps.begin(), ps.end());
      ps.erase(std::unique(ps.begin(), ps.end()), ps.end());
      for (const auto& pid : ps) {
        auto it = index_.find(pid);
        if (it == index_.end()) continue;
        parents_of_[i].push_back(it->second);
        children_of_[it->second].push_back(i);
      }
    }
  }

  bool has_task(std::string_view id) const {
    return index_.find(std::string(id)) != index_.end();
  }

  std::size_t index_of(std::string_view id) const {
    auto it = index_.find(std::string(id));
    if (it == index_.end()) {
      throw Error(Errc::UnknownTask, "no task with id '" + std::string(id) + "'");
    }
    return it->second;
  }

  const std::vector<std::size_t>& parent_indices(std::size_t i) const { return parents_of_[i]; }
  const std::vector<std::size_t>& child_indices(std::size_t i) const { return children_of_[i]; }

  friend bool operator==(const WorkflowInstance& a, const WorkflowInstance& b) {
    return a.name == b.name && a.schema_version == b.schema_version &&
           a.makespan_s == b.makespan_s && a.machines == b.machines &&
           a.tasks == b.tasks && a.workflow_extra == b.workflow_extra &&
           a.root_extra == b.root_extra;
  }

 private:
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<std::vector<std::size_t>> parents_of_;
  std::vector<std::vector<std::size_t>> children_of_;
};

/// Kahn topological order, deterministic (lowest task index first among
/// ready tasks). nullopt if the parent relation has a cycle.
inline std::optional<std::vector<std::size_t>> topological_order(const WorkflowInstance& w) {
  const std::size_t n = w.size();
  std::vector<std::size_t> indegree(n);
  std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
  for (std::size_t i = 0; i < n; ++i) {
    indegree[i] = w.parent_indices(i).size();
    if (indegree[i] == 0) ready.push(i);
  }
  std::vector<std::size_t> order;
  order.reserve(n);
  while (!ready.empty()) {
    const std::size_t i = ready.top();
    ready.pop();
    order.push_back(i);
    for (std::size_t c : w.child_indices(i)) {
      if (--indegree[c] == 0) ready.push(c);
    }
  }
  if (order.size() != n) return std::nullopt;
  return order;
}

inline std::vector<std::size_t> require_topological_order(const WorkflowInstance& w) {
  auto order = topological_order(w);
  if (!order) throw Error(Errc::CyclicGraph, "instance '" + w.name + "' has a dependency cycle");
  return std::move(*order);
}

/// All transitive predecessors of a task, as indices.
inline std::set<std::size_t> ancestors_of(const WorkflowInstance& w, std::string_view id) {
  std::set<std::size_t> seen;
  std::vector<std::size_t> stack{w.index_of(id)};
  while (!stack.empty()) {
    const std::size_t i = stack.back();
    stack.pop_back();
    for (std::size_t p : w.parent_indices(i)) {
      if (seen.insert(p).second) stack.push_back(p);
    }
  }
  return seen;
}

// ---------------------------------------------------------------------------
// Parsing

namespace detail {

[[noreturn]] inline void throw_missing(std::string path) {
  throw Error(Errc::MissingField, "missing required field '" + path + "'", std::move(path));
}

[[noreturn]] inline void throw_bad(std::string path, std::string_view why) {
  throw Error(Errc::BadValue, "'" + path + "': " + std::string(why), std::move(path));
}

inline std::string get_string(const json& v, const std::string& path) {
  if (!v.is_string()) throw_bad(path, "expected a string");
  return v.get<std::string>();
}

inline double get_number(const json& v, const std::string& path) {
  if (!v.is_number()) throw_bad(path, "expected a number");
  return v.get<double>();
}

inline std::int64_t get_integer(const json& v, const std::string& path) {
  if (!v.is_number_integer()) throw_bad(path, "expected an integer");
  return v.get<std::int64_t>();
}

inline FileSpec parse_file(const json& j, const std::string& path) {
  if (!j.is_object()) throw_bad(path, "expected an object");
  FileSpec f;
  bool saw_name = false;
  bool saw_size = false;
  for (const auto& [key, value] : j.items()) {
    if (key == "name") {
      f.name = get_string(value, path + ".name");
      saw_name = true;
    } else if (key == "sizeInBytes") {
      f.size_bytes = get_integer(value, path + ".sizeInBytes");
      saw_size = true;
    } else {
      f.extra[key] = value;
    }
  }
  if (!saw_name) throw_missing(path + ".name");
  if (!saw_size) throw_missing(path + ".sizeInBytes");
  return f;
}

inline Task parse_task(const json& j, const std::string& path) {
  if (!j.is_object()) throw_bad(path, "expected an object");
  Task t;
  bool saw_id = false;
  bool saw_type = false;
  bool saw_runtime = false;
  for (const auto& [key, value] : j.items()) {
    if (key == "id") {
      t.id = get_string(value, path + ".id");
      saw_id = true;
    } else if (key == "name") {
      t.type = get_string(value, path + ".name");
      saw_type = true;
    } else if (key == "runtimeInSeconds") {
      t.runtime_s = get_number(value, path + ".runtimeInSeconds");
      saw_runtime = true;
    } else if (key == "cores") {
      const auto c = get_integer(value, path + ".cores");
      if (c > std::numeric_limits<int>::max() || c < std::numeric_limits<int>::min()) {
        throw_bad(path + ".cores", "out of range");
      }
      t.cores = static_cast<int>(c);
    } else if (key == "parents") {
      if (!value.is_array()) throw_bad(path + ".parents", "expected an array");
      for (std::size_t k = 0; k < value.size(); ++k) {
        t.parents.push_back(get_string(value[k], path + ".parents[" + std::to_string(k) + "]"));
      }
    } else if (key == "inputFiles" || key == "outputFiles") {
      if (!value.is_array()) throw_bad(path + "." + key, "expected an array");
      auto& dst = (key == "inputFiles") ? t.input_files : t.output_files;
      for (std::size_t k = 0; k < value.size(); ++k) {
        dst.push_back(parse_file(value[k], path + "." + key + "[" + std::to_string(k) + "]"));
      }
    } else if (key == "machine") {
      t.machine = get_string(value, path + ".machine");
    } else if (key == "children") {
      // never trusted from input; derived from parents instead
    } else {
      t.extra[key] = value;
    }
  }
  if (!saw_id) throw_missing(path + ".id");
  if (!saw_type) throw_missing(path + ".name");
  if (!saw_runtime) throw_missing(path + ".runtimeInSeconds");
  return t;
}

inline Machine parse_machine(const json& j, const std::string& path) {
  if (!j.is_object()) throw_bad(path, "expected an object");
  Machine m;
  bool saw_name = false;
  for (const auto& [key, value] : j.items()) {
    if (key == "nodeName") {
      m.name = get_string(value, path + ".nodeName");
      saw_name = true;
    } else if (key == "cpu") {
      if (!value.is_object()) throw_bad(path + ".cpu", "expected an object");
      for (const auto& [ck, cv] : value.items()) {
        if (ck == "speedInMHz") {
          m.cpu_speed_mhz = get_number(cv, path + ".cpu.speedInMHz");
        } else if (ck == "coreCount") {
          m.cpu_cores = static_cast<int>(get_integer(cv, path + ".cpu.coreCount"));
        } else {
          m.cpu_extra[ck] = cv;
        }
      }
    } else if (key == "memoryInBytes") {
      m.memory_bytes = get_integer(value, path + ".memoryInBytes");
    } else {
      m.extra[key] = value;
    }
  }
  if (!saw_name) throw_missing(path + ".nodeName");
  return m;
}

}  // namespace detail

/// Parses instance JSON. Structural/type problems raise MalformedJson,
/// MissingField or BadValue; semantic problems (cycles, negative runtimes,
/// file conflicts, ...) are left to validate_instance(), which reports them
/// as data.
inline WorkflowInstance parse_instance(std::string_view json_text) {
  json doc = json::parse(json_text, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded()) throw Error(Errc::MalformedJson, "input is not well-formed JSON");
  if (!doc.is_object()) detail::throw_bad("", "top-level value must be an object");

  WorkflowInstance w;
  const json* workflow = nullptr;
  bool saw_name = false;
  for (const auto& [key, value] : doc.items()) {
    if (key == "name") {
      w.name = detail::get_string(value, "name");
      saw_name = true;
    } else if (key == "schemaVersion") {
      w.schema_version = detail::get_string(value, "schemaVersion");
    } else if (key == "workflow") {
      if (!value.is_object()) detail::throw_bad("workflow", "expected an object");
      workflow = &value;
    } else {
      w.root_extra[key] = value;
    }
  }
  if (!saw_name) detail::throw_missing("name");
  if (workflow == nullptr || !workflow->contains("tasks")) {
    detail::throw_missing("workflow.tasks");
  }

  for (const auto& [key, value] : workflow->items()) {
    if (key == "tasks") {
      if (!value.is_array()) detail::throw_bad("workflow.tasks", "expected an array");
      for (std::size_t i = 0; i < value.size(); ++i) {
        w.tasks.push_back(detail::parse_task(value[i], "workflow.tasks[" + std::to_string(i) + "]"));
      }
    } else if (key == "machines") {
      if (!value.is_array()) detail::throw_bad("workflow.machines", "expected an array");
      for (std::size_t i = 0; i < value.size(); ++i) {
        w.machines.push_back(
            detail::parse_machine(value[i], "workflow.machines[" + std::to_string(i) + "]"));
      }
    } else if (key == "makespan") {
      w.makespan_s = detail::get_number(value, "workflow.makespan");
    } else {
      w.workflow_extra[key] = value;
    }
  }
  w.finalize();
  return w;
}

// ---------------------------------------------------------------------------
// Validation

enum class ViolationCode { Cycle, DanglingParent, DuplicateId, FileConflict, NegativeValue };

inline const char* violation_name(ViolationCode c) {
  switch (c) {
    case ViolationCode::Cycle: return "CYCLE";
    case ViolationCode::DanglingParent: return "DANGLING_PARENT";
    case ViolationCode::DuplicateId: return "DUPLICATE_ID";
    case ViolationCode::FileConflict: return "FILE_CONFLICT";
    case ViolationCode::NegativeValue: return "NEGATIVE_VALUE";
  }
  return "UNKNOWN";
}

struct Violation {
  ViolationCode code;
  std::string path;
  std::string detail;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

/// Checks every instance invariant and reports violations as data. An empty
/// report means the instance is a well-formed DAG with consistent files. A
/// file that is consumed but produced by no task is an external input, not a
/// violation; a file produced by two tasks, or produced only by a descendant
/// of its consumer, is.
inline ValidationReport validate_instance(const WorkflowInstance& w) {
  ValidationReport report;
  auto add = [&](ViolationCode code, std::string path, std::string detail) {
    report.violations.push_back({code, std::move(path), std::move(detail)});
  };
  auto task_path = [](std::size_t i) { return "workflow.tasks[" + std::to_string(i) + "]"; };

  if (w.makespan_s && !(*w.makespan_s >= 0.0)) {
    add(ViolationCode::NegativeValue, "workflow.makespan", "makespan must be >= 0");
  }
  for (std::size_t i = 0; i < w.machines.size(); ++i) {
    const auto& m = w.machines[i];
    const std::string mp = "workflow.machines[" + std::to_string(i) + "]";
    if (m.cpu_speed_mhz && !(*m.cpu_speed_mhz > 0.0)) {
      add(ViolationCode::NegativeValue, mp + ".cpu.speedInMHz", "cpu speed must be > 0");
    }
    if (m.cpu_cores && *m.cpu_cores < 1) {
      add(ViolationCode::NegativeValue, mp + ".cpu.coreCount", "core count must be >= 1");
    }
    if (m.memory_bytes && *m.memory_bytes <= 0) {
      add(ViolationCode::NegativeValue, mp + ".memoryInBytes", "memory must be > 0");
    }
  }

  std::unordered_map<std::string, std::size_t> first_seen;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const Task& t = w.tasks[i];
    const std::string tp = task_path(i);

    auto [it, inserted] = first_seen.emplace(t.id, i);
    if (!inserted) {
      add(ViolationCode::DuplicateId, tp + ".id",
          "task id '" + t.id + "' already used at index " + std::to_string(it->second));
    }

    if (!(t.runtime_s >= 0.0) || !std::isfinite(t.runtime_s)) {
      add(ViolationCode::NegativeValue, tp + ".runtimeInSeconds", "runtime must be >= 0");
    }
    if (t.cores < 1) {
      add(ViolationCode::NegativeValue, tp + ".cores", "cores must be >= 1");
    }

    for (std::size_t j = 0; j < t.parents.size(); ++j) {
      if (!w.has_task(t.parents[j])) {
        add(ViolationCode::DanglingParent, tp + ".parents[" + std::to_string(j) + "]",
            "parent '" + t.parents[j] + "' does not name a task");
      }
    }

    auto check_files = [&](const std::vector<FileSpec>& files, const char* field) {
      std::unordered_set<std::string> names;
      for (std::size_t j = 0; j < files.size(); ++j) {
        const std::string fp = tp + "." + field + "[" + std::to_string(j) + "]";
        if (files[j].size_bytes < 0) {
          add(ViolationCode::NegativeValue, fp + ".sizeInBytes", "file size must be >= 0");
        }
        if (!names.insert(files[j].name).second) {
          add(ViolationCode::FileConflict, fp + ".name",
              "duplicate file '" + files[j].name + "' in " + field);
        }
      }
    };
    check_files(t.input_files, "inputFiles");
    check_files(t.output_files, "outputFiles");
    std::unordered_set<std::string> outs;
    for (const auto& f : t.output_files) outs.insert(f.name);
    for (std::size_t j = 0; j < t.input_files.size(); ++j) {
      if (outs.count(t.input_files[j].name)) {
        add(ViolationCode::FileConflict, tp + ".inputFiles[" + std::to_string(j) + "].name",
            "file '" + t.input_files[j].name + "' is both input and output of task '" + t.id + "'");
      }
    }
  }

  // One producer per file, across the whole instance.
  std::unordered_map<std::string, std::size_t> producer;
  for (std::size_t i = 0; i < w.size(); ++i) {
    for (std::size_t j = 0; j < w.tasks[i].output_files.size(); ++j) {
      const auto& f = w.tasks[i].output_files[j];
      auto [it, inserted] = producer.emplace(f.name, i);
      if (!inserted && it->second != i) {
        add(ViolationCode::FileConflict,
            task_path(i) + ".outputFiles[" + std::to_string(j) + "].name",
            "file '" + f.name + "' is also produced by task '" + w.tasks[it->second].id + "'");
      }
    }
  }

  const auto order = topological_order(w);
  if (!order) {
    // Name the first task (by index) that is stuck on a cycle.
    std::vector<std::size_t> indegree(w.size());
    std::vector<std::size_t> queue;
    for (std::size_t i = 0; i < w.size(); ++i) {
      indegree[i] = w.parent_indices(i).size();
      if (indegree[i] == 0) queue.push_back(i);
    }
    while (!queue.empty()) {
      const std::size_t i = queue.back();
      queue.pop_back();
      for (std::size_t c : w.child_indices(i)) {
        if (--indegree[c] == 0) queue.push_back(c);
      }
    }
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (indegree[i] > 0) {
        add(ViolationCode::Cycle, task_path(i),
            "task '" + w.tasks[i].id + "' participates in a dependency cycle");
        break;
      }
    }
  } else {
    // A consumed file must come from an ancestor or an unrelated task, never
    // from a descendant. Direct parents cover the common case cheaply.
    for (std::size_t i = 0; i < w.size(); ++i) {
      const Task& t = w.tasks[i];
      for (std::size_t j = 0; j < t.input_files.size(); ++j) {
        const auto it = producer.find(t.input_files[j].name);
        if (it == producer.end() || it->second == i) continue;  // external / same-task (flagged above)
        const std::size_t p = it->second;
        const auto& parents = w.parent_indices(i);
        if (std::find(parents.begin(), parents.end(), p) != parents.end()) continue;
        // Is the producer reachable downstream of the consumer?
        std::vector<std::size_t> stack{i};
        std::unordered_set<std::size_t> seen{i};
        bool descendant = false;
        while (!stack.empty() && !descendant) {
          const std::size_t cur = stack.back();
          stack.pop_back();
          for (std::size_t c : w.child_indices(cur)) {
            if (c == p) {
              descendant = true;
              break;
            }
            if (seen.insert(c).second) stack.push_back(c);
          }
        }
        if (descendant) {
          add(ViolationCode::FileConflict, task_path(i) + ".inputFiles[" + std::to_string(j) + "].name",
              "file '" + t.input_files[j].name + "' consumed by '" + t.id +
                  "' is produced by its descendant '" + w.tasks[p].id + "'");
        }
      }
    }
  }

  return report;
}

// ---------------------------------------------------------------------------
// Serialization

namespace detail {

inline void append_extra(ordered_json& target, const json& extra) {
  for (const auto& [key, value] : extra.items()) target[key] = value;
}

inline ordered_json file_to_json(const FileSpec& f) {
  ordered_json j;
  j["name"] = f.name;
  j["sizeInBytes"] = f.size_bytes;
  append_extra(j, f.extra);
  return j;
}

inline ordered_json task_to_json(const Task& t) {
  ordered_json j;
  j["id"] = t.id;
  j["name"] = t.type;
  j["runtimeInSeconds"] = t.runtime_s;
  j["cores"] = t.cores;
  j["parents"] = t.parents;
  j["inputFiles"] = ordered_json::array();
  for (const auto& f : t.input_files) j["inputFiles"].push_back(file_to_json(f));
  j["outputFiles"] = ordered_json::array();
  for (const auto& f : t.output_files) j["outputFiles"].push_back(file_to_json(f));
  if (t.machine) j["machine"] = *t.machine;
  append_extra(j, t.extra);
  return j;
}

inline ordered_json machine_to_json(const Machine& m) {
  ordered_json j;
  j["nodeName"] = m.name;
  if (m.cpu_speed_mhz || m.cpu_cores || !m.cpu_extra.empty()) {
    ordered_json cpu;
    if (m.cpu_speed_mhz) cpu["speedInMHz"] = *m.cpu_speed_mhz;
    if (m.cpu_cores) cpu["coreCount"] = *m.cpu_cores;
    append_extra(cpu, m.cpu_extra);
    j["cpu"] = std::move(cpu);
  }
  if (m.memory_bytes) j["memoryInBytes"] = *m.memory_bytes;
  append_extra(j, m.extra);
  return j;
}

}  // namespace detail

/// Canonical JSON tree for an instance: fixed key order, unknown fields
/// appended in sorted order. Does not validate.
inline ordered_json instance_to_json(const WorkflowInstance& w) {
  ordered_json doc;
  doc["name"] = w.name;
  doc["schemaVersion"] = w.schema_version;
  ordered_json wf;
  if (w.makespan_s) wf["makespan"] = *w.makespan_s;
  wf["machines"] = ordered_json::array();
  for (const auto& m : w.machines) wf["machines"].push_back(detail::machine_to_json(m));
  wf["tasks"] = ordered_json::array();
  for (const auto& t : w.tasks) wf["tasks"].push_back(detail::task_to_json(t));
  detail::append_extra(wf, w.workflow_extra);
  doc["workflow"] = std::move(wf);
  detail::append_extra(doc, w.root_extra);
  return doc;
}

/// Serializes a valid instance canonically. parse(serialize(w)) == w, and
/// serialize(parse(s)) == s byte-for-byte on canonically formatted input.
/// Throws InvalidInstance when validation reports violations.
inline std::string serialize_instance(const WorkflowInstance& w) {
  const auto report = validate_instance(w);
  if (!report.ok()) {
    const auto& v = report.violations.front();
    throw Error(Errc::InvalidInstance,
                "refusing to serialize: " + std::to_string(report.violations.size()) +
                    " violation(s), first " + violation_name(v.code) + " at " + v.path);
  }
  return instance_to_json(w).dump(2) + "\n";
}

}  // namespace wfforge
