#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "wfforge/error.hpp"
#include "wfforge/instance.hpp"
#include "wfforge/patterns.hpp"
#include "wfforge/stats.hpp"
#include "wfforge/type_hash.hpp"

namespace wfforge {

struct TypeStats {
  FitResult runtime;
  FitResult input_bytes;
  FitResult output_bytes;
};

/// Everything needed to generate synthetic instances of one application:
/// the structural skeleton of the smallest source instance, the pattern
/// catalog discovered on it, fitted per-task-type distributions, and the
/// resulting lower bound on generated task counts. Self-contained: validity
/// is checkable without the source instances.
struct Recipe {
  std::string application;
  WorkflowInstance base_graph;  // skeleton: ids, types, parents only
  PatternCatalog catalog;       // over base_graph
  std::map<std::string, TypeStats> type_stats;
  std::int64_t min_tasks = 0;   // == base_graph.size()
  std::vector<std::string> source_instances;
};

namespace detail {

inline WorkflowInstance skeleton_of(const WorkflowInstance& w) {
  WorkflowInstance s;
  s.name = w.name;
  s.tasks.reserve(w.size());
  for (const auto& t : w.tasks) {
    Task st;
    st.id = t.id;
    st.type = t.type;
    st.parents = t.parents;
    s.tasks.push_back(std::move(st));
  }
  s.finalize();
  return s;
}

inline std::int64_t total_size(const std::vector<FileSpec>& files) {
  std::int64_t sum = 0;
  for (const auto& f : files) sum += f.size_bytes;
  return sum;
}

}  // namespace detail

/// Builds a recipe from one or more validated instances of an application.
/// The base skeleton comes from the instance with the fewest tasks (name
/// order breaks ties); statistics pool samples across all instances.
/// Advisory findings (type-vocabulary mismatches, pattern groups that do not
/// recur in any other instance) are appended to `warnings` when provided.
inline Recipe build_recipe(std::vector<WorkflowInstance> instances, std::string application,
                           std::vector<std::string>* warnings = nullptr) {
  if (instances.empty()) throw Error(Errc::NoInstances, "recipe needs at least one instance");
  for (const auto& w : instances) {
    const auto report = validate_instance(w);
    if (!report.ok()) {
      throw Error(Errc::InvalidInstance,
                  "instance '" + w.name + "' fails validation: " +
                      violation_name(report.violations.front().code) + " at " +
                      report.violations.front().path);
    }
  }
  auto warn = [&](std::string msg) {
    if (warnings) warnings->push_back(std::move(msg));
  };

  std::sort(instances.begin(), instances.end(),
            [](const WorkflowInstance& a, const WorkflowInstance& b) { return a.name < b.name; });
  std::size_t base_idx = 0;
  for (std::size_t i = 1; i < instances.size(); ++i) {
    if (instances[i].size() < instances[base_idx].size()) base_idx = i;
  }
  const WorkflowInstance& base = instances[base_idx];

  Recipe r;
  r.application = std::move(application);
  r.base_graph = detail::skeleton_of(base);
  r.min_tasks = static_cast<std::int64_t>(r.base_graph.size());
  for (const auto& w : instances) r.source_instances.push_back(w.name);

  const auto hashed = compute_type_hashes(r.base_graph);
  r.catalog = find_pattern_occurrences(hashed);

  std::set<std::string> base_types;
  for (const auto& t : base.tasks) base_types.insert(t.type);
  for (const auto& w : instances) {
    std::set<std::string> types;
    for (const auto& t : w.tasks) types.insert(t.type);
    if (types != base_types) {
      warn("instance '" + w.name + "' uses a different task-type vocabulary than base '" +
           base.name + "'");
    }
  }

  // Advisory cross-instance confirmation: a pattern signature should show up
  // in the type hashes of at least one other instance.
  if (instances.size() > 1 && !r.catalog.groups.empty()) {
    std::vector<std::set<std::string>> hash_sets;
    for (std::size_t i = 0; i < instances.size(); ++i) {
      if (i == base_idx) {
        hash_sets.push_back({});
        continue;
      }
      const auto hw = compute_type_hashes(instances[i]);
      hash_sets.push_back(
          std::set<std::string>(hw.type_hash.begin(), hw.type_hash.end()));
    }
    for (std::size_t g = 0; g < r.catalog.groups.size(); ++g) {
      const auto& sig = r.catalog.groups[g].signature;
      bool confirmed = false;
      for (std::size_t i = 0; i < instances.size() && !confirmed; ++i) {
        if (i == base_idx) continue;
        confirmed = std::includes(hash_sets[i].begin(), hash_sets[i].end(), sig.begin(), sig.end());
      }
      if (!confirmed) {
        warn("pattern group " + std::to_string(g) + " of '" + base.name +
             "' does not recur in any other supplied instance");
      }
    }
  }

  // Pooled per-type samples over all instances.
  std::map<std::string, std::vector<double>> runtimes, inputs, outputs;
  for (const auto& w : instances) {
    for (const auto& t : w.tasks) {
      runtimes[t.type].push_back(t.runtime_s);
      inputs[t.type].push_back(static_cast<double>(detail::total_size(t.input_files)));
      outputs[t.type].push_back(static_cast<double>(detail::total_size(t.output_files)));
    }
  }
  for (auto& [type, values] : runtimes) {
    TypeStats ts;
    ts.runtime = fit_best(std::span(values));
    ts.input_bytes = fit_best(std::span(inputs[type]));
    ts.output_bytes = fit_best(std::span(outputs[type]));
    r.type_stats.emplace(type, std::move(ts));
  }
  return r;
}

// ---------------------------------------------------------------------------
// Recipe JSON

namespace detail {

inline ordered_json fit_to_json(const FitResult& f) {
  ordered_json j;
  j["min"] = f.min;
  j["max"] = f.max;
  ordered_json d;
  d["name"] = family_name(f.family);
  d["params"] = f.params;
  j["distribution"] = std::move(d);
  return j;
}

[[noreturn]] inline void schema_violation(std::string path, const std::string& why) {
  throw Error(Errc::SchemaViolation, "'" + path + "': " + why, std::move(path));
}

inline FitResult fit_from_json(const json& j, const std::string& path,
                               std::vector<std::string>* notes) {
  if (!j.is_object()) schema_violation(path, "expected an object");
  if (!j.contains("min") || !j["min"].is_number()) schema_violation(path + ".min", "expected a number");
  if (!j.contains("max") || !j["max"].is_number()) schema_violation(path + ".max", "expected a number");
  if (!j.contains("distribution") || !j["distribution"].is_object()) {
    schema_violation(path + ".distribution", "expected an object");
  }
  const auto& d = j["distribution"];
  if (!d.contains("name") || !d["name"].is_string()) {
    schema_violation(path + ".distribution.name", "expected a string");
  }
  if (!d.contains("params") || !d["params"].is_array()) {
    schema_violation(path + ".distribution.params", "expected an array");
  }
  const double lo = j["min"].get<double>();
  const double hi = j["max"].get<double>();
  if (!(lo <= hi)) schema_violation(path + ".min", "min must be <= max");
  std::vector<double> params;
  for (const auto& v : d["params"]) {
    if (!v.is_number()) schema_violation(path + ".distribution.params", "expected numbers");
    params.push_back(v.get<double>());
  }
  auto mapped = map_external_distribution(d["name"].get<std::string>(), params, lo, hi);
  if (mapped.note && notes) notes->push_back(path + ": " + *mapped.note);
  return std::move(mapped.fit);
}

}  // namespace detail

/// Deterministic recipe document.
inline std::string save_recipe(const Recipe& r) {
  ordered_json doc;
  doc["application"] = r.application;
  doc["minTasks"] = r.min_tasks;
  ordered_json base;
  base["tasks"] = ordered_json::array();
  for (const auto& t : r.base_graph.tasks) {
    ordered_json tj;
    tj["id"] = t.id;
    tj["type"] = t.type;
    tj["parents"] = t.parents;
    base["tasks"].push_back(std::move(tj));
  }
  doc["baseGraph"] = std::move(base);
  doc["patterns"] = ordered_json::array();
  for (const auto& group : r.catalog.groups) {
    ordered_json g;
    g["signature"] = std::vector<std::string>(group.signature.begin(), group.signature.end());
    g["occurrences"] = ordered_json::array();
    for (const auto& occ : group.occurrences) g["occurrences"].push_back(occ.task_ids);
    doc["patterns"].push_back(std::move(g));
  }
  ordered_json stats;
  for (const auto& [type, ts] : r.type_stats) {
    ordered_json entry;
    entry["runtime"] = detail::fit_to_json(ts.runtime);
    entry["inputBytes"] = detail::fit_to_json(ts.input_bytes);
    entry["outputBytes"] = detail::fit_to_json(ts.output_bytes);
    stats[type] = std::move(entry);
  }
  doc["typeStats"] = std::move(stats);
  doc["sourceInstances"] = r.source_instances;
  return doc.dump(2) + "\n";
}

/// Loads and re-validates a recipe document. Pattern signatures and
/// entry/exit sets are recomputed from the base graph, so a recipe stands on
/// its own; stored signatures must agree with the recomputed ones.
/// Distribution-name mappings are reported through `notes`.
inline Recipe load_recipe(std::string_view json_text, std::vector<std::string>* notes = nullptr) {
  json doc = json::parse(json_text, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded()) throw Error(Errc::MalformedJson, "recipe is not well-formed JSON");
  if (!doc.is_object()) detail::schema_violation("", "top-level value must be an object");

  Recipe r;
  if (!doc.contains("application") || !doc["application"].is_string()) {
    detail::schema_violation("application", "expected a string");
  }
  r.application = doc["application"].get<std::string>();
  if (!doc.contains("minTasks") || !doc["minTasks"].is_number_integer()) {
    detail::schema_violation("minTasks", "expected an integer");
  }
  r.min_tasks = doc["minTasks"].get<std::int64_t>();

  if (!doc.contains("baseGraph") || !doc["baseGraph"].is_object() ||
      !doc["baseGraph"].contains("tasks") || !doc["baseGraph"]["tasks"].is_array()) {
    detail::schema_violation("baseGraph.tasks", "expected an array");
  }
  for (std::size_t i = 0; i < doc["baseGraph"]["tasks"].size(); ++i) {
    const auto& tj = doc["baseGraph"]["tasks"][i];
    const std::string path = "baseGraph.tasks[" + std::to_string(i) + "]";
    if (!tj.is_object() || !tj.contains("id") || !tj["id"].is_string() || !tj.contains("type") ||
        !tj["type"].is_string()) {
      detail::schema_violation(path, "expected {id, type, parents}");
    }
    Task t;
    t.id = tj["id"].get<std::string>();
    t.type = tj["type"].get<std::string>();
    if (tj.contains("parents")) {
      if (!tj["parents"].is_array()) detail::schema_violation(path + ".parents", "expected an array");
      for (const auto& p : tj["parents"]) {
        if (!p.is_string()) detail::schema_violation(path + ".parents", "expected strings");
        t.parents.push_back(p.get<std::string>());
      }
    }
    r.base_graph.tasks.push_back(std::move(t));
  }
  r.base_graph.name = r.application + "-base";
  r.base_graph.finalize();
  if (r.min_tasks != static_cast<std::int64_t>(r.base_graph.size())) {
    detail::schema_violation("minTasks", "must equal the number of baseGraph tasks");
  }
  const auto report = validate_instance(r.base_graph);
  if (!report.ok()) {
    detail::schema_violation("baseGraph", std::string("invalid skeleton: ") +
                                              violation_name(report.violations.front().code) +
                                              " at " + report.violations.front().path);
  }

  const auto hashed = compute_type_hashes(r.base_graph);
  r.catalog.instance_name = r.base_graph.name;
  std::set<std::string> claimed;
  if (doc.contains("patterns")) {
    if (!doc["patterns"].is_array()) detail::schema_violation("patterns", "expected an array");
    for (std::size_t g = 0; g < doc["patterns"].size(); ++g) {
      const auto& gj = doc["patterns"][g];
      const std::string gpath = "patterns[" + std::to_string(g) + "]";
      if (!gj.is_object() || !gj.contains("occurrences") || !gj["occurrences"].is_array()) {
        detail::schema_violation(gpath + ".occurrences", "expected an array");
      }
      PatternGroup group;
      for (std::size_t o = 0; o < gj["occurrences"].size(); ++o) {
        const auto& oj = gj["occurrences"][o];
        const std::string opath = gpath + ".occurrences[" + std::to_string(o) + "]";
        if (!oj.is_array() || oj.empty()) detail::schema_violation(opath, "expected a non-empty array");
        std::set<std::size_t> members;
        PatternOccurrence occ;
        for (const auto& idj : oj) {
          if (!idj.is_string()) detail::schema_violation(opath, "expected task-id strings");
          const auto id = idj.get<std::string>();
          if (!r.base_graph.has_task(id)) {
            detail::schema_violation(opath, "unknown base-graph task '" + id + "'");
          }
          if (!claimed.insert(id).second) {
            detail::schema_violation(opath, "task '" + id + "' appears in two occurrences");
          }
          members.insert(r.base_graph.index_of(id));
        }
        occ = detail::make_occurrence(hashed, members);
        group.occurrences.push_back(std::move(occ));
      }
      if (group.occurrences.size() < 2) {
        detail::schema_violation(gpath + ".occurrences",
                                 "a pattern group needs at least two occurrences");
      }
      group.signature = group.occurrences.front().signature;
      for (const auto& occ : group.occurrences) {
        if (occ.signature != group.signature) {
          detail::schema_violation(gpath, "occurrences disagree on the sub-graph type hash");
        }
      }
      if (gj.contains("signature")) {
        if (!gj["signature"].is_array()) detail::schema_violation(gpath + ".signature", "expected an array");
        std::set<std::string> stored;
        for (const auto& h : gj["signature"]) {
          if (!h.is_string()) detail::schema_violation(gpath + ".signature", "expected strings");
          stored.insert(h.get<std::string>());
        }
        if (stored != group.signature) {
          detail::schema_violation(gpath + ".signature",
                                   "stored signature does not match the base graph");
        }
      }
      r.catalog.groups.push_back(std::move(group));
    }
  }

  if (!doc.contains("typeStats") || !doc["typeStats"].is_object()) {
    detail::schema_violation("typeStats", "expected an object");
  }
  for (const auto& [type, entry] : doc["typeStats"].items()) {
    const std::string path = "typeStats." + type;
    if (!entry.is_object()) detail::schema_violation(path, "expected an object");
    TypeStats ts;
    if (!entry.contains("runtime")) detail::schema_violation(path + ".runtime", "missing");
    ts.runtime = detail::fit_from_json(entry["runtime"], path + ".runtime", notes);
    if (!entry.contains("inputBytes")) detail::schema_violation(path + ".inputBytes", "missing");
    ts.input_bytes = detail::fit_from_json(entry["inputBytes"], path + ".inputBytes", notes);
    if (!entry.contains("outputBytes")) detail::schema_violation(path + ".outputBytes", "missing");
    ts.output_bytes = detail::fit_from_json(entry["outputBytes"], path + ".outputBytes", notes);
    r.type_stats.emplace(type, std::move(ts));
  }
  for (const auto& t : r.base_graph.tasks) {
    if (!r.type_stats.count(t.type)) {
      detail::schema_violation("typeStats." + t.type, "no statistics for a base-graph task type");
    }
  }

  if (doc.contains("sourceInstances")) {
    if (!doc["sourceInstances"].is_array()) {
      detail::schema_violation("sourceInstances", "expected an array");
    }
    for (const auto& s : doc["sourceInstances"]) {
      if (!s.is_string()) detail::schema_violation("sourceInstances", "expected strings");
      r.source_instances.push_back(s.get<std::string>());
    }
  }
  return r;
}

}  // namespace wfforge
