#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "wfforge/error.hpp"
#include "wfforge/instance.hpp"
#include "wfforge/type_hash.hpp"

namespace wfforge {

/// A repeating sub-graph: one member of a pattern equivalence class.
struct PatternOccurrence {
  std::vector<std::string> task_ids;      // sorted
  std::set<std::string> signature;        // sub-graph type hash
  std::vector<std::string> entry_tasks;   // members with no parent inside, sorted
  std::vector<std::string> exit_tasks;    // members with no child inside, sorted
};

struct PatternGroup {
  std::set<std::string> signature;
  std::vector<PatternOccurrence> occurrences;  // >= 2, pairwise disjoint
};

struct PatternCatalog {
  std::string instance_name;
  std::vector<PatternGroup> groups;  // sorted by signature; all occurrences disjoint
};

namespace detail {

inline bool weakly_connected(const WorkflowInstance& w, const std::set<std::size_t>& members) {
  if (members.empty()) return false;
  std::set<std::size_t> seen;
  std::vector<std::size_t> stack{*members.begin()};
  seen.insert(*members.begin());
  while (!stack.empty()) {
    const std::size_t i = stack.back();
    stack.pop_back();
    auto visit = [&](std::size_t j) {
      if (members.count(j) && seen.insert(j).second) stack.push_back(j);
    };
    for (std::size_t p : w.parent_indices(i)) visit(p);
    for (std::size_t c : w.child_indices(i)) visit(c);
  }
  return seen.size() == members.size();
}

inline PatternOccurrence make_occurrence(const HashedWorkflow& hw,
                                         const std::set<std::size_t>& members) {
  const auto& w = *hw.instance;
  PatternOccurrence occ;
  for (std::size_t i : members) {
    occ.task_ids.push_back(w.tasks[i].id);
    occ.signature.insert(hw.type_hash[i]);
    bool is_entry = true;
    for (std::size_t p : w.parent_indices(i)) {
      if (members.count(p)) {
        is_entry = false;
        break;
      }
    }
    if (is_entry) occ.entry_tasks.push_back(w.tasks[i].id);
    bool is_exit = true;
    for (std::size_t c : w.child_indices(i)) {
      if (members.count(c)) {
        is_exit = false;
        break;
      }
    }
    if (is_exit) occ.exit_tasks.push_back(w.tasks[i].id);
  }
  std::sort(occ.task_ids.begin(), occ.task_ids.end());
  std::sort(occ.entry_tasks.begin(), occ.entry_tasks.end());
  std::sort(occ.exit_tasks.begin(), occ.exit_tasks.end());
  return occ;
}

}  // namespace detail

/// Discovers repeating pattern occurrences by growing seed pairs of
/// equal-hash tasks to a fixed point:
///
///   S1 = {t1}, S2 = {t2};
///   repeat: add all parents and children of current members to each set,
///           then remove the intersection from both;
///   until neither set grew over a full round (rounds capped at |tasks|).
///
/// Seed pairs are tried in deterministic order (lexicographic by type hash,
/// then by task id); tasks already assigned to an occurrence are skipped as
/// seeds and excluded from growth, which keeps the whole catalog disjoint.
/// A converged pair is kept only if both sets are non-empty, weakly
/// connected, and carry equal signatures; groups collect occurrences that
/// share one signature.
inline PatternCatalog find_pattern_occurrences(const HashedWorkflow& hw) {
  const auto& w = *hw.instance;
  const std::size_t n = w.size();
  PatternCatalog catalog;
  catalog.instance_name = w.name;
  if (n == 0) return catalog;

  std::map<std::string, std::vector<std::size_t>> seeds_by_hash;
  for (std::size_t i = 0; i < n; ++i) seeds_by_hash[hw.type_hash[i]].push_back(i);
  for (auto& [hash, members] : seeds_by_hash) {
    std::sort(members.begin(), members.end(),
              [&](std::size_t a, std::size_t b) { return w.tasks[a].id < w.tasks[b].id; });
  }

  std::vector<char> claimed(n, 0);

  auto grow = [&](std::set<std::size_t>& s) {
    std::vector<std::size_t> added;
    for (std::size_t i : s) {
      for (std::size_t p : w.parent_indices(i)) {
        if (!claimed[p]) added.push_back(p);
      }
      for (std::size_t c : w.child_indices(i)) {
        if (!claimed[c]) added.push_back(c);
      }
    }
    s.insert(added.begin(), added.end());
  };

  auto run_fixpoint = [&](std::size_t t1, std::size_t t2)
      -> std::optional<std::pair<std::set<std::size_t>, std::set<std::size_t>>> {
    std::set<std::size_t> s1{t1};
    std::set<std::size_t> s2{t2};
    for (std::size_t round = 0; round < n; ++round) {  // cap guards oscillation
      const std::size_t n1 = s1.size();
      const std::size_t n2 = s2.size();
      grow(s1);
      grow(s2);
      std::vector<std::size_t> common;
      std::set_intersection(s1.begin(), s1.end(), s2.begin(), s2.end(),
                            std::back_inserter(common));
      for (std::size_t i : common) {
        s1.erase(i);
        s2.erase(i);
      }
      if (s1.size() <= n1 && s2.size() <= n2) break;
    }
    if (s1.empty() || s2.empty()) return std::nullopt;
    if (!detail::weakly_connected(w, s1) || !detail::weakly_connected(w, s2)) return std::nullopt;
    return std::make_pair(std::move(s1), std::move(s2));
  };

  std::map<std::string, std::size_t> group_index;  // signature key -> catalog slot
  auto signature_key = [](const std::set<std::string>& sig) {
    std::string key;
    for (const auto& h : sig) {
      key += h;
      key += ',';
    }
    return key;
  };

  for (const auto& [hash, members] : seeds_by_hash) {
    if (members.size() < 2) continue;
    for (std::size_t a = 0; a + 1 < members.size(); ++a) {
      if (claimed[members[a]]) continue;
      for (std::size_t b = a + 1; b < members.size(); ++b) {
        if (claimed[members[a]]) break;
        if (claimed[members[b]]) continue;
        auto grown = run_fixpoint(members[a], members[b]);
        if (!grown) continue;
        auto occ1 = detail::make_occurrence(hw, grown->first);
        auto occ2 = detail::make_occurrence(hw, grown->second);
        if (occ1.signature != occ2.signature) continue;  // growth was clipped asymmetrically
        for (std::size_t i : grown->first) claimed[i] = 1;
        for (std::size_t i : grown->second) claimed[i] = 1;
        const std::string key = signature_key(occ1.signature);
        auto it = group_index.find(key);
        if (it == group_index.end()) {
          it = group_index.emplace(key, catalog.groups.size()).first;
          catalog.groups.push_back({occ1.signature, {}});
        }
        auto& group = catalog.groups[it->second];
        group.occurrences.push_back(std::move(occ1));
        group.occurrences.push_back(std::move(occ2));
      }
    }
  }

  // Deterministic emission order: sort groups by signature key.
  std::sort(catalog.groups.begin(), catalog.groups.end(),
            [&](const PatternGroup& a, const PatternGroup& b) {
              return signature_key(a.signature) < signature_key(b.signature);
            });
  return catalog;
}

/// External attachment points of an occurrence: parents of its entry tasks
/// and children of its exit tasks, both excluding occurrence members. Entry
/// and exit membership is recomputed from the instance, so the occurrence
/// only needs its task ids. Throws UnknownTask.
inline std::pair<std::vector<std::string>, std::vector<std::string>> occurrence_boundary(
    const WorkflowInstance& w, const PatternOccurrence& occ) {
  std::set<std::size_t> members;
  for (const auto& id : occ.task_ids) members.insert(w.index_of(id));

  std::set<std::string> parent_ids;
  std::set<std::string> child_ids;
  for (std::size_t i : members) {
    bool is_entry = true;
    bool is_exit = true;
    for (std::size_t p : w.parent_indices(i)) {
      if (members.count(p)) is_entry = false;
    }
    for (std::size_t c : w.child_indices(i)) {
      if (members.count(c)) is_exit = false;
    }
    if (is_entry) {
      for (std::size_t p : w.parent_indices(i)) parent_ids.insert(w.tasks[p].id);
    }
    if (is_exit) {
      for (std::size_t c : w.child_indices(i)) child_ids.insert(w.tasks[c].id);
    }
  }
  return {std::vector<std::string>(parent_ids.begin(), parent_ids.end()),
          std::vector<std::string>(child_ids.begin(), child_ids.end())};
}

/// Catalog as JSON: groups -> occurrences -> sorted task-id arrays.
inline ordered_json catalog_to_json(const PatternCatalog& catalog) {
  ordered_json doc;
  doc["instance"] = catalog.instance_name;
  doc["patterns"] = ordered_json::array();
  for (const auto& group : catalog.groups) {
    ordered_json g;
    g["signature"] = std::vector<std::string>(group.signature.begin(), group.signature.end());
    g["occurrences"] = ordered_json::array();
    for (const auto& occ : group.occurrences) g["occurrences"].push_back(occ.task_ids);
    doc["patterns"].push_back(std::move(g));
  }
  return doc;
}

}  // namespace wfforge
