#pragma once

#include <cmath>
#include <map>
#include <string>

#include "wfforge/error.hpp"
#include "wfforge/instance.hpp"
#include "wfforge/type_hash.hpp"

namespace wfforge {

/// Type Hash Frequency distance between two instances.
struct ThfScore {
  double value = 0.0;
  std::size_t hash_universe_size = 0;
};

namespace detail {

inline ThfScore frequency_rmse(const std::map<std::string, double>& count_a, double n_a,
                               const std::map<std::string, double>& count_b, double n_b,
                               bool normalized) {
  std::map<std::string, std::pair<double, double>> merged;
  for (const auto& [k, c] : count_a) merged[k].first = normalized ? c / n_a : c;
  for (const auto& [k, c] : count_b) merged[k].second = normalized ? c / n_b : c;
  double sum = 0.0;
  for (const auto& [k, fc] : merged) {
    const double d = fc.first - fc.second;
    sum += d * d;
  }
  ThfScore score;
  score.hash_universe_size = merged.size();
  score.value = merged.empty() ? 0.0 : std::sqrt(sum / static_cast<double>(merged.size()));
  return score;
}

}  // namespace detail

/// RMSE between the two instances' type-hash frequencies, averaged over the
/// union of hashes, so structural novelty and omission both count. Symmetric;
/// 0 for structurally identical instances; at most 1 with normalized
/// frequencies. `normalized=false` switches to raw counts.
inline ThfScore thf(const WorkflowInstance& a, const WorkflowInstance& b, bool normalized = true) {
  if (a.size() == 0 || b.size() == 0) {
    throw Error(Errc::EmptyWorkflow, "THF requires non-empty instances");
  }
  const auto ha = compute_type_hashes(a);
  const auto hb = compute_type_hashes(b);
  std::map<std::string, double> ca, cb;
  for (const auto& h : ha.type_hash) ca[h] += 1.0;
  for (const auto& h : hb.type_hash) cb[h] += 1.0;
  return detail::frequency_rmse(ca, static_cast<double>(a.size()), cb,
                                static_cast<double>(b.size()), normalized);
}

/// Same shape of RMSE but over task type names rather than type hashes.
inline double type_frequency_rmse(const WorkflowInstance& a, const WorkflowInstance& b) {
  if (a.size() == 0 || b.size() == 0) {
    throw Error(Errc::EmptyWorkflow, "type frequencies require non-empty instances");
  }
  std::map<std::string, double> ca, cb;
  for (const auto& t : a.tasks) ca[t.type] += 1.0;
  for (const auto& t : b.tasks) cb[t.type] += 1.0;
  return detail::frequency_rmse(ca, static_cast<double>(a.size()), cb,
                                static_cast<double>(b.size()), true)
      .value;
}

/// Absolute relative difference between simulated and reference makespans.
inline double makespan_rel_diff(double simulated_s, double reference_s) {
  if (!(reference_s > 0.0)) {
    throw Error(Errc::ZeroReference, "reference makespan must be positive");
  }
  return std::abs(simulated_s - reference_s) / reference_s;
}

}  // namespace wfforge
