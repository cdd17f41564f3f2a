#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "wfforge/error.hpp"
#include "wfforge/generator.hpp"
#include "wfforge/instance.hpp"
#include "wfforge/recipe.hpp"
#include "wfforge/rng.hpp"
#include "wfforge/stats.hpp"

namespace wfforge::corpus {

/// One pseudo-real application family: a structural growth rule plus
/// authored per-type distributions. Instances emitted from a family act as
/// the "real" workloads in closed-loop checks, so the structures mirror
/// archetypes seen in production workflows: a flat bag of identical tasks,
/// chains fanning out of a hub, and two differently shaped branches joined
/// into one result.
struct Family {
  std::string name;
  std::vector<int> scales;
  WorkflowInstance (*skeleton)(int scale);
  std::map<std::string, TypeStats> stats;  // authored ground truth
};

namespace detail {

struct SkeletonBuilder {
  WorkflowInstance w;

  std::string add(std::string type, std::vector<std::string> parents = {}) {
    Task t;
    t.id = type + "_" + std::to_string(w.tasks.size());
    t.type = std::move(type);
    t.parents = std::move(parents);
    w.tasks.push_back(std::move(t));
    return w.tasks.back().id;
  }

  WorkflowInstance take() {
    w.finalize();
    return std::move(w);
  }
};

inline FitResult authored(wfforge::Family family, std::vector<double> params, double lo,
                          double hi) {
  FitResult r;
  r.family = family;
  r.params = std::move(params);
  r.min = lo;
  r.max = hi;
  r.mse = 0.0;
  return r;
}

// Flat bag of identical search tasks between a prepare and a merge step.
// Every authored distribution is uniform.
inline WorkflowInstance seqsearch_skeleton(int scale) {
  SkeletonBuilder b;
  const int workers = 38 + 40 * (scale - 1);
  const auto prep = b.add("prepare_db");
  std::vector<std::string> chunk_ids;
  for (int i = 0; i < workers; ++i) chunk_ids.push_back(b.add("search_chunk", {prep}));
  b.add("merge_hits", chunk_ids);
  return b.take();
}

// Hub feeding 3*scale identical three-task chains that join into a summary.
inline WorkflowInstance alignflow_skeleton(int scale) {
  SkeletonBuilder b;
  const auto prep = b.add("align_prep");
  std::vector<std::string> tails;
  for (int i = 0; i < 3 * scale; ++i) {
    const auto map = b.add("map_reads", {prep});
    const auto filter = b.add("filter_calls", {map});
    tails.push_back(b.add("collect_stats", {filter}));
  }
  b.add("summarize", tails);
  return b.take();
}

// Two differently shaped branches (2m projection chains, 3m background
// tasks) merged into one mosaic.
inline WorkflowInstance skymosaic_skeleton(int scale) {
  SkeletonBuilder b;
  const auto ingest = b.add("ingest");
  const auto split_a = b.add("project_split", {ingest});
  const auto split_b = b.add("background_split", {ingest});
  std::vector<std::string> diffs;
  for (int i = 0; i < 2 * scale; ++i) {
    const auto proj = b.add("project", {split_a});
    diffs.push_back(b.add("diff_fit", {proj}));
  }
  std::vector<std::string> bgs;
  for (int i = 0; i < 3 * scale; ++i) bgs.push_back(b.add("bg_model", {split_b}));
  const auto merge_a = b.add("project_merge", diffs);
  const auto merge_b = b.add("background_merge", bgs);
  b.add("mosaic", {merge_a, merge_b});
  return b.take();
}

inline std::map<std::string, TypeStats> seqsearch_stats() {
  using F = wfforge::Family;
  std::map<std::string, TypeStats> s;
  s["prepare_db"] = {authored(F::Uniform, {8.0, 8.2}, 8.0, 8.2),
                     authored(F::Uniform, {2e6, 4e6}, 2e6, 4e6),
                     authored(F::Uniform, {1e6, 2e6}, 1e6, 2e6)};
  s["search_chunk"] = {authored(F::Uniform, {10.0, 12.0}, 10.0, 12.0),
                       authored(F::Uniform, {1e6, 3e6}, 1e6, 3e6),
                       authored(F::Uniform, {2e5, 4e5}, 2e5, 4e5)};
  s["merge_hits"] = {authored(F::Uniform, {5.0, 5.2}, 5.0, 5.2),
                     authored(F::Uniform, {1e6, 2e6}, 1e6, 2e6),
                     authored(F::Uniform, {1e5, 2e5}, 1e5, 2e5)};
  return s;
}

inline std::map<std::string, TypeStats> alignflow_stats() {
  using F = wfforge::Family;
  std::map<std::string, TypeStats> s;
  s["align_prep"] = {authored(F::Normal, {30.0, 1.5}, 24.0, 36.0),
                     authored(F::Lognormal, {14.0, 0.3}, 4e5, 4e6),
                     authored(F::Gamma, {16.0, 1.25e5}, 5e5, 6e6)};
  s["map_reads"] = {authored(F::Gamma, {25.0, 0.4}, 4.0, 20.0),
                    authored(F::Uniform, {1e6, 2e6}, 1e6, 2e6),
                    authored(F::Triangular, {2e5, 3e5, 5e5}, 2e5, 5e5)};
  s["filter_calls"] = {authored(F::Uniform, {6.0, 8.0}, 6.0, 8.0),
                       authored(F::Uniform, {2e5, 5e5}, 2e5, 5e5),
                       authored(F::Normal, {2.5e5, 2e4}, 1.5e5, 3.5e5)};
  s["collect_stats"] = {authored(F::Weibull, {8.0, 12.0}, 3.5, 16.0),
                        authored(F::Uniform, {1e5, 4e5}, 1e5, 4e5),
                        authored(F::Lognormal, {11.5, 0.25}, 4e4, 3e5)};
  s["summarize"] = {authored(F::Normal, {20.0, 1.0}, 16.0, 24.0),
                    authored(F::Uniform, {1e6, 3e6}, 1e6, 3e6),
                    authored(F::Gamma, {9.0, 1e5}, 2e5, 3e6)};
  return s;
}

inline std::map<std::string, TypeStats> skymosaic_stats() {
  using F = wfforge::Family;
  std::map<std::string, TypeStats> s;
  s["ingest"] = {authored(F::Normal, {25.0, 1.0}, 21.0, 29.0),
                 authored(F::Pareto, {3.0, 2e6}, 2e6, 5e7),
                 authored(F::Pareto, {3.0, 2e6}, 2e6, 5e7)};
  s["project_split"] = {authored(F::Uniform, {4.0, 5.0}, 4.0, 5.0),
                        authored(F::Uniform, {1e5, 2e5}, 1e5, 2e5),
                        authored(F::Uniform, {1e5, 2e5}, 1e5, 2e5)};
  s["background_split"] = {authored(F::Uniform, {4.5, 5.5}, 4.5, 5.5),
                           authored(F::Uniform, {1e5, 2e5}, 1e5, 2e5),
                           authored(F::Uniform, {1e5, 2e5}, 1e5, 2e5)};
  s["project"] = {authored(F::Lognormal, {2.3, 0.15}, 5.5, 18.5),
                  authored(F::Beta, {2.0, 5.0, 0.0, 1e7}, 0.0, 1e7),
                  authored(F::Beta, {2.0, 5.0, 0.0, 1e7}, 0.0, 1e7)};
  s["diff_fit"] = {authored(F::Gamma, {36.0, 0.25}, 4.0, 16.0),
                   authored(F::Normal, {3e6, 3e5}, 1.5e6, 4.5e6),
                   authored(F::Normal, {2e6, 2e5}, 1e6, 3e6)};
  s["bg_model"] = {authored(F::Weibull, {6.0, 15.0}, 4.0, 22.0),
                   authored(F::Exponential, {2e-6}, 0.0, 6e6),
                   authored(F::Exponential, {2e-6}, 0.0, 6e6)};
  s["project_merge"] = {authored(F::Normal, {12.0, 1.0}, 8.0, 16.0),
                        authored(F::Uniform, {1e6, 2e6}, 1e6, 2e6),
                        authored(F::Triangular, {1e6, 2e6, 4e6}, 1e6, 4e6)};
  s["background_merge"] = {authored(F::Normal, {12.5, 1.0}, 8.5, 16.5),
                           authored(F::Uniform, {1e6, 2e6}, 1e6, 2e6),
                           authored(F::Triangular, {1e6, 2e6, 4e6}, 1e6, 4e6)};
  s["mosaic"] = {authored(F::Triangular, {14.0, 16.0, 18.0}, 14.0, 18.0),
                 authored(F::Uniform, {2e6, 4e6}, 2e6, 4e6),
                 authored(F::Uniform, {5e6, 8e6}, 5e6, 8e6)};
  return s;
}

}  // namespace detail

inline const std::vector<Family>& families() {
  static const std::vector<Family> fams = [] {
    std::vector<Family> f;
    f.push_back({"seqsearch", {1, 2, 3, 4}, &detail::seqsearch_skeleton,
                 detail::seqsearch_stats()});
    f.push_back({"alignflow", {1, 2, 3, 4}, &detail::alignflow_skeleton,
                 detail::alignflow_stats()});
    f.push_back({"skymosaic", {2, 3, 4, 5}, &detail::skymosaic_skeleton,
                 detail::skymosaic_stats()});
    return f;
  }();
  return fams;
}

/// Deterministic pseudo-real instance of one family at one scale. The
/// substream seed mixes the corpus seed with the family name and scale, so
/// regenerating with the same seed is byte-identical.
inline WorkflowInstance make_instance(const Family& family, int scale, std::uint64_t corpus_seed) {
  auto w = family.skeleton(scale);
  Rng rng(derive_seed(corpus_seed, fnv1a(family.name) ^ static_cast<std::uint64_t>(scale)));
  assign_attributes(w, family.stats, rng);
  for (int i = 0; i < 4; ++i) {
    Machine m;
    m.name = "node-" + std::to_string(i);
    m.cpu_speed_mhz = 2300.0;
    m.cpu_cores = 48;
    m.memory_bytes = 137438953472;  // 128 GiB
    w.machines.push_back(std::move(m));
  }
  w.name = family.name + "-" + std::to_string(w.size());
  w.finalize();
  return w;
}

struct CorpusEntry {
  std::string file;
  std::string application;
  std::size_t tasks = 0;
};

/// Writes every family at every scale plus a manifest.json into `out_dir`.
inline std::vector<CorpusEntry> emit_corpus(const std::filesystem::path& out_dir,
                                            std::uint64_t seed) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw Error(Errc::IoError, "cannot create '" + out_dir.string() + "': " + ec.message());

  auto write_file = [](const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) throw Error(Errc::IoError, "cannot write '" + path.string() + "'");
  };

  std::vector<CorpusEntry> entries;
  for (const auto& family : families()) {
    for (const int scale : family.scales) {
      const auto w = make_instance(family, scale, seed);
      const std::string file = family.name + "_" + std::to_string(w.size()) + ".json";
      write_file(out_dir / file, serialize_instance(w));
      entries.push_back({file, family.name, w.size()});
    }
  }

  ordered_json manifest;
  manifest["seed"] = seed;
  manifest["instances"] = ordered_json::array();
  for (const auto& e : entries) {
    ordered_json entry;
    entry["file"] = e.file;
    entry["application"] = e.application;
    entry["tasks"] = e.tasks;
    manifest["instances"].push_back(std::move(entry));
  }
  write_file(out_dir / "manifest.json", manifest.dump(2) + "\n");
  return entries;
}

}  // namespace wfforge::corpus
