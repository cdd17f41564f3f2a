#pragma once

#include <cmath>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "wfforge/error.hpp"
#include "wfforge/instance.hpp"
#include "wfforge/patterns.hpp"
#include "wfforge/recipe.hpp"
#include "wfforge/rng.hpp"
#include "wfforge/stats.hpp"

namespace wfforge {

namespace detail {

inline std::int64_t to_bytes(double x) {
  return x > 0.0 ? static_cast<std::int64_t>(std::llround(x)) : 0;
}

}  // namespace detail

/// Samples runtime and file sizes for every task from its type's fitted
/// distributions. Materialization: each task produces one output file
/// `<id>_out_0` sized from its output distribution and shared by all of its
/// consumers; each task's inputs are one file per in-edge (the parents'
/// output files), plus one external input file `<id>_in_0`, sized from the
/// input distribution, for tasks without parents.
inline void assign_attributes(WorkflowInstance& w, const std::map<std::string, TypeStats>& stats,
                              Rng& rng) {
  w.finalize();
  std::unordered_map<std::string, std::int64_t> output_size;
  output_size.reserve(w.size());
  for (auto& t : w.tasks) {
    const auto it = stats.find(t.type);
    if (it == stats.end()) {
      throw Error(Errc::SchemaViolation, "no statistics for task type '" + t.type + "'");
    }
    t.runtime_s = sample_from(it->second.runtime, rng);
    t.input_files.clear();
    t.output_files.clear();
    if (t.parents.empty()) {
      t.input_files.push_back(
          {t.id + "_in_0", detail::to_bytes(sample_from(it->second.input_bytes, rng))});
    } else {
      for (const auto& pid : t.parents) t.input_files.push_back({pid + "_out_0", 0});
    }
    const std::int64_t out = detail::to_bytes(sample_from(it->second.output_bytes, rng));
    t.output_files.push_back({t.id + "_out_0", out});
    output_size.emplace(t.id + "_out_0", out);
  }
  for (auto& t : w.tasks) {
    for (auto& f : t.input_files) {
      const auto it = output_size.find(f.name);
      if (it != output_size.end()) f.size_bytes = it->second;
    }
  }
}

/// Generates a synthetic instance of (approximately) `target_tasks` tasks by
/// uniform-random replication of the recipe's pattern occurrences.
///
/// Starting from the base skeleton, an occurrence is drawn uniformly from
/// the catalog (original occurrences only) and deep-copied with fresh ids
/// `<orig>__r<k>`: internal edges are reproduced, each copied entry task
/// attaches to the external parents of its original, and each copied exit
/// task feeds the external children of its original. Because every new edge
/// mirrors an edge the base graph already has, a cycle through a copy would
/// imply a cycle in the base graph, so the output is always a DAG.
/// Replication stops before the copy that would exceed the target, so the
/// shortfall is always smaller than the largest occurrence. Performance
/// attributes are then sampled per task type.
///
/// Deterministic: identical (recipe, target, seed) yields byte-identical
/// serialized output.
inline WorkflowInstance generate(const Recipe& recipe, std::int64_t target_tasks,
                                 std::uint64_t seed) {
  const std::int64_t base_n = static_cast<std::int64_t>(recipe.base_graph.size());
  if (target_tasks < base_n) {
    throw Error(Errc::TargetTooSmall, "target of " + std::to_string(target_tasks) +
                                          " tasks is below the recipe minimum of " +
                                          std::to_string(base_n));
  }

  std::vector<const PatternOccurrence*> sites;
  for (const auto& group : recipe.catalog.groups) {
    for (const auto& occ : group.occurrences) sites.push_back(&occ);
  }
  if (target_tasks > base_n && sites.empty()) {
    throw Error(Errc::EmptyCatalog,
                "recipe has no repeating patterns; cannot grow beyond " + std::to_string(base_n));
  }

  Rng rng(seed);
  WorkflowInstance out;
  out.name = recipe.application + "-synthetic-" + std::to_string(target_tasks) + "-s" +
             std::to_string(seed);
  out.tasks.reserve(static_cast<std::size_t>(target_tasks));
  std::unordered_map<std::string, std::size_t> slot;
  slot.reserve(static_cast<std::size_t>(target_tasks));
  for (const auto& t : recipe.base_graph.tasks) {
    Task copy;
    copy.id = t.id;
    copy.type = t.type;
    copy.parents = t.parents;
    slot.emplace(copy.id, out.tasks.size());
    out.tasks.push_back(std::move(copy));
  }

  std::int64_t count = base_n;
  std::uint64_t replication = 0;
  while (!sites.empty()) {
    const auto& occ = *sites[rng.index(sites.size())];
    const auto osize = static_cast<std::int64_t>(occ.task_ids.size());
    if (count + osize > target_tasks) break;  // next copy would surpass the target
    ++replication;
    const std::string suffix = "__r" + std::to_string(replication);
    const std::set<std::string> members(occ.task_ids.begin(), occ.task_ids.end());
    for (const auto& oid : occ.task_ids) {
      const Task& src = recipe.base_graph.tasks[recipe.base_graph.index_of(oid)];
      Task copy;
      copy.id = oid + suffix;
      copy.type = src.type;
      bool is_entry = true;
      for (const auto& pid : src.parents) {
        if (members.count(pid)) {
          copy.parents.push_back(pid + suffix);
          is_entry = false;
        }
      }
      // an entry task's parents are all external; the copy inherits them
      if (is_entry) copy.parents = src.parents;
      slot.emplace(copy.id, out.tasks.size());
      out.tasks.push_back(std::move(copy));
    }
    for (const auto& oid : occ.task_ids) {
      const std::size_t idx = recipe.base_graph.index_of(oid);
      bool is_exit = true;
      for (const std::size_t c : recipe.base_graph.child_indices(idx)) {
        if (members.count(recipe.base_graph.tasks[c].id)) {
          is_exit = false;
          break;
        }
      }
      if (!is_exit) continue;
      // an exit task's children are all external; the copy feeds them too
      for (const std::size_t c : recipe.base_graph.child_indices(idx)) {
        out.tasks[slot.at(recipe.base_graph.tasks[c].id)].parents.push_back(oid + suffix);
      }
    }
    count += osize;
  }

  assign_attributes(out, recipe.type_stats, rng);
  return out;
}

}  // namespace wfforge
