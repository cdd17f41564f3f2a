#pragma once

#include <algorithm>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "wfforge/digest.hpp"
#include "wfforge/error.hpp"
#include "wfforge/instance.hpp"

namespace wfforge {

/// Per-task digests encoding each task's type together with its ancestor and
/// descendant type structure:
///
///   top_hash(t)    = H("top" | type(t) | sorted multiset of parents' top hashes)
///   bottom_hash(t) = H("bottom" | type(t) | sorted multiset of children's bottom hashes)
///   type_hash(t)   = H("combined" | top_hash(t) | bottom_hash(t))
///
/// H is SHA-256 over length-prefixed fields. Task ids never enter the input,
/// so any type-preserving relabeling yields identical hashes, and sorting the
/// neighbor multisets makes the result independent of edge order.
///
/// Non-owning view: the source instance must outlive this object.
struct HashedWorkflow {
  const WorkflowInstance* instance = nullptr;
  std::vector<std::string> top_hash;     // by task index, lowercase hex
  std::vector<std::string> bottom_hash;  // by task index, lowercase hex
  std::vector<std::string> type_hash;    // by task index, lowercase hex

  const std::string& type_hash_of(std::string_view task_id) const {
    return type_hash[instance->index_of(task_id)];
  }
};

/// One forward and one backward topological pass. Throws CyclicGraph.
inline HashedWorkflow compute_type_hashes(const WorkflowInstance& w) {
  const auto order = topological_order(w);
  if (!order) throw Error(Errc::CyclicGraph, "type hashes require an acyclic instance");

  HashedWorkflow hw;
  hw.instance = &w;
  const std::size_t n = w.size();
  hw.top_hash.resize(n);
  hw.bottom_hash.resize(n);
  hw.type_hash.resize(n);

  auto fold = [&](std::size_t i, const std::vector<std::size_t>& neighbors,
                  const std::vector<std::string>& source, std::string_view tag) {
    std::vector<const std::string*> hashes;
    hashes.reserve(neighbors.size());
    for (std::size_t j : neighbors) hashes.push_back(&source[j]);
    std::sort(hashes.begin(), hashes.end(),
              [](const std::string* a, const std::string* b) { return *a < *b; });
    HashInput in;
    in.field(tag).field(w.tasks[i].type);
    for (const std::string* h : hashes) in.field(*h);
    return in.hex();
  };

  for (std::size_t i : *order) {
    hw.top_hash[i] = fold(i, w.parent_indices(i), hw.top_hash, "top");
  }
  for (auto it = order->rbegin(); it != order->rend(); ++it) {
    hw.bottom_hash[*it] = fold(*it, w.child_indices(*it), hw.bottom_hash, "bottom");
  }
  for (std::size_t i = 0; i < n; ++i) {
    hw.type_hash[i] =
        HashInput().field("combined").field(hw.top_hash[i]).field(hw.bottom_hash[i]).hex();
  }
  return hw;
}

/// The type hash of a sub-graph: the deduplicated set of member type hashes.
/// Order-independent by construction. Throws UnknownTask.
template <typename Range>
std::set<std::string> subgraph_type_hash(const HashedWorkflow& hw, const Range& task_ids) {
  std::set<std::string> sig;
  for (const auto& id : task_ids) {
    sig.insert(hw.type_hash[hw.instance->index_of(id)]);
  }
  return sig;
}

}  // namespace wfforge
