#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <queue>
#include <string>
#include <unordered_map>
#include <vector>

#include "wfforge/error.hpp"
#include "wfforge/instance.hpp"

namespace wfforge {

/// Homogeneous cluster model. p_static is drawn per powered node for the
/// whole makespan; p_core per busy core-second. Absent wan_bandwidth means
/// zero-cost transfers.
struct Platform {
  int nodes = 4;
  int cores_per_node = 48;
  double core_speed_factor = 1.0;  // scales recorded runtimes
  std::optional<double> wan_bandwidth_bps;
  double p_static_w = 95.0;
  double p_core_w = 3.0;
};

struct TaskSchedule {
  double start_s = 0.0;
  double end_s = 0.0;
  int node = 0;
};

struct SimReport {
  double makespan_s = 0.0;
  std::map<std::string, TaskSchedule> per_task;
  std::vector<double> node_busy_core_s;
  double energy_kwh = 0.0;
  double utilization = 0.0;
};

/// Energy of a schedule under the affine model:
///   joules = nodes * p_static * makespan + p_core * sum(busy core-seconds).
/// At fixed work, lower parallelism stretches the makespan and the static
/// term grows with it.
inline double estimate_energy(const SimReport& report, const Platform& p) {
  double busy = 0.0;
  for (double b : report.node_busy_core_s) busy += b;
  const double joules = static_cast<double>(p.nodes) * p.p_static_w * report.makespan_s +
                        p.p_core_w * busy;
  return joules / 3.6e6;
}

/// Event-driven greedy list scheduling. A task is ready once all parents
/// finished; ready tasks are served in (ready time, task id) order and
/// placed on the node with the most free cores (ties to the lowest index).
/// A task that does not fit waits, blocking the queue until cores free up.
/// Task duration is runtime * core_speed_factor, plus, when a bandwidth is
/// configured, the cost of pulling input files whose producers ran on other
/// nodes (external files always transfer). Throws TaskTooWide / CyclicGraph.
inline SimReport simulate(const WorkflowInstance& w, const Platform& p) {
  const std::size_t n = w.size();
  for (const auto& t : w.tasks) {
    if (t.cores > p.cores_per_node) {
      throw Error(Errc::TaskTooWide, "task '" + t.id + "' needs " + std::to_string(t.cores) +
                                         " cores but nodes have " +
                                         std::to_string(p.cores_per_node));
    }
  }
  require_topological_order(w);

  SimReport report;
  report.node_busy_core_s.assign(static_cast<std::size_t>(p.nodes), 0.0);
  if (n == 0) return report;

  // file name -> producer task index, for the transfer model
  std::unordered_map<std::string, std::size_t> producer;
  if (p.wan_bandwidth_bps) {
    for (std::size_t i = 0; i < n; ++i) {
      for (const auto& f : w.tasks[i].output_files) producer.emplace(f.name, i);
    }
  }

  struct ReadyTask {
    double ready_s;
    std::size_t idx;
  };
  auto later = [&](const ReadyTask& a, const ReadyTask& b) {
    if (a.ready_s != b.ready_s) return a.ready_s > b.ready_s;
    return w.tasks[a.idx].id > w.tasks[b.idx].id;
  };
  std::priority_queue<ReadyTask, std::vector<ReadyTask>, decltype(later)> ready(later);

  struct Completion {
    double end_s;
    std::size_t idx;
  };
  auto ends_later = [&](const Completion& a, const Completion& b) {
    if (a.end_s != b.end_s) return a.end_s > b.end_s;
    return w.tasks[a.idx].id > w.tasks[b.idx].id;
  };
  std::priority_queue<Completion, std::vector<Completion>, decltype(ends_later)> running(
      ends_later);

  std::vector<std::size_t> waiting_parents(n);
  std::vector<int> node_of(n, -1);
  std::vector<char> finished(n, 0);
  std::vector<int> free_cores(static_cast<std::size_t>(p.nodes), p.cores_per_node);

  for (std::size_t i = 0; i < n; ++i) {
    waiting_parents[i] = w.parent_indices(i).size();
    if (waiting_parents[i] == 0) ready.push({0.0, i});
  }

  double now = 0.0;
  auto start_ready = [&] {
    while (!ready.empty() && ready.top().ready_s <= now) {
      const std::size_t i = ready.top().idx;
      const Task& t = w.tasks[i];
      int best = 0;
      for (int nd = 1; nd < p.nodes; ++nd) {
        if (free_cores[nd] > free_cores[best]) best = nd;
      }
      if (free_cores[best] < t.cores) break;  // head of queue waits for cores
      ready.pop();
      free_cores[best] -= t.cores;
      node_of[i] = best;
      double duration = t.runtime_s * p.core_speed_factor;
      if (p.wan_bandwidth_bps) {
        double transfer_bytes = 0.0;
        for (const auto& f : t.input_files) {
          const auto it = producer.find(f.name);
          // External files, and files whose producer has not run here, come
          // over the WAN.
          const bool local = it != producer.end() && it->second != i && finished[it->second] &&
                             node_of[it->second] == best;
          if (!local) transfer_bytes += static_cast<double>(f.size_bytes);
        }
        duration += transfer_bytes / *p.wan_bandwidth_bps;
      }
      const double end = now + duration;
      report.per_task[t.id] = {now, end, best};
      report.node_busy_core_s[static_cast<std::size_t>(best)] += duration * t.cores;
      running.push({end, i});
    }
  };

  start_ready();
  while (!running.empty()) {
    now = running.top().end_s;
    while (!running.empty() && running.top().end_s == now) {
      const std::size_t i = running.top().idx;
      running.pop();
      finished[i] = 1;
      free_cores[node_of[i]] += w.tasks[i].cores;
      report.makespan_s = std::max(report.makespan_s, now);
      for (std::size_t c : w.child_indices(i)) {
        if (--waiting_parents[c] == 0) ready.push({now, c});
      }
    }
    start_ready();
  }

  double busy = 0.0;
  for (double b : report.node_busy_core_s) busy += b;
  const double capacity =
      report.makespan_s * static_cast<double>(p.nodes) * static_cast<double>(p.cores_per_node);
  report.utilization = capacity > 0.0 ? std::min(busy / capacity, 1.0) : 0.0;
  report.energy_kwh = estimate_energy(report, p);
  return report;
}

}  // namespace wfforge
