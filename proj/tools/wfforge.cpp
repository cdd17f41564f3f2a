// wfforge: analyze workflow instances, derive recipes, generate synthetic
// instances, score their realism, and simulate their execution.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "wfforge/wfforge.hpp"

namespace fs = std::filesystem;
using wfforge::ordered_json;

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw wfforge::Error(wfforge::Errc::IoError, "cannot read '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return std::move(buf).str();
}

void write_output(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  out << text;
  if (!out) throw wfforge::Error(wfforge::Errc::IoError, "cannot write '" + out_path + "'");
}

wfforge::WorkflowInstance load_instance(const fs::path& path) {
  return wfforge::parse_instance(read_file(path));
}

// Instance files from explicit paths and/or directories (manifest excluded).
std::vector<fs::path> collect_instance_files(const std::vector<std::string>& inputs) {
  std::vector<fs::path> files;
  for (const auto& input : inputs) {
    const fs::path p(input);
    if (fs::is_directory(p)) {
      for (const auto& entry : fs::directory_iterator(p)) {
        if (entry.path().extension() == ".json" && entry.path().filename() != "manifest.json") {
          files.push_back(entry.path());
        }
      }
    } else {
      files.push_back(p);
    }
  }
  std::sort(files.begin(), files.end());
  return files;
}

std::string family_of(const wfforge::WorkflowInstance& w) {
  const auto dash = w.name.find('-');
  return dash == std::string::npos ? w.name : w.name.substr(0, dash);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"workflow instance analysis, synthesis, and simulation"};
  app.require_subcommand(1);
  app.fallthrough();

  std::uint64_t seed = 0;
  bool quiet = false;
  std::string format = "json";
  app.add_option("--seed", seed, "seed for all randomized operations")->envname("WFFORGE_SEED");
  app.add_flag("--quiet", quiet, "suppress advisory output on stderr");
  app.add_option("--format", format, "output format for batch results")
      ->check(CLI::IsMember({"json", "csv"}));

  int rc = 0;
  auto advise = [&](const std::string& line) {
    if (!quiet) std::cerr << line << "\n";
  };

  // --- validate ------------------------------------------------------------
  auto* cmd_validate = app.add_subcommand("validate", "check an instance file");
  std::string validate_path;
  cmd_validate->add_option("instance", validate_path, "instance JSON file")->required();
  cmd_validate->callback([&] {
    const auto w = load_instance(validate_path);
    const auto report = wfforge::validate_instance(w);
    ordered_json doc;
    doc["valid"] = report.ok();
    doc["violations"] = ordered_json::array();
    for (const auto& v : report.violations) {
      ordered_json vj;
      vj["code"] = wfforge::violation_name(v.code);
      vj["path"] = v.path;
      vj["detail"] = v.detail;
      doc["violations"].push_back(std::move(vj));
    }
    std::cout << doc.dump(2) << "\n";
    if (!report.ok()) {
      std::string codes;
      for (const auto& v : report.violations) {
        if (!codes.empty()) codes += ",";
        codes += wfforge::violation_name(v.code);
      }
      std::cerr << "validation failed: " << codes << "\n";
      rc = 1;
    }
  });

  // --- hash ----------------------------------------------------------------
  auto* cmd_hash = app.add_subcommand("hash", "print task type hashes in topological order");
  std::string hash_path;
  cmd_hash->add_option("instance", hash_path, "instance JSON file")->required();
  cmd_hash->callback([&] {
    const auto w = load_instance(hash_path);
    const auto hw = wfforge::compute_type_hashes(w);
    for (const std::size_t i : wfforge::require_topological_order(w)) {
      std::cout << w.tasks[i].id << "\t" << hw.type_hash[i] << "\n";
    }
  });

  // --- patterns --------------------------------------------------------------
  auto* cmd_patterns = app.add_subcommand("patterns", "discover repeating pattern occurrences");
  std::string patterns_path;
  std::string patterns_out;
  cmd_patterns->add_option("instance", patterns_path, "instance JSON file")->required();
  cmd_patterns->add_option("--out", patterns_out, "write the catalog here instead of stdout");
  cmd_patterns->callback([&] {
    const auto w = load_instance(patterns_path);
    const auto hw = wfforge::compute_type_hashes(w);
    const auto catalog = wfforge::find_pattern_occurrences(hw);
    write_output(wfforge::catalog_to_json(catalog).dump(2) + "\n", patterns_out);
  });

  // --- analyze ---------------------------------------------------------------
  auto* cmd_analyze = app.add_subcommand("analyze", "build a recipe from instances");
  std::vector<std::string> analyze_inputs;
  std::string analyze_app;
  std::string analyze_out;
  cmd_analyze->add_option("instances", analyze_inputs, "instance files or directories")
      ->required();
  cmd_analyze->add_option("--application", analyze_app,
                          "application name (default: instance name prefix)");
  cmd_analyze->add_option("--out", analyze_out, "write the recipe here instead of stdout");
  cmd_analyze->callback([&] {
    std::vector<wfforge::WorkflowInstance> instances;
    for (const auto& file : collect_instance_files(analyze_inputs)) {
      instances.push_back(load_instance(file));
    }
    if (instances.empty()) {
      throw wfforge::Error(wfforge::Errc::NoInstances, "no instance files found");
    }
    std::string application = analyze_app.empty() ? family_of(instances.front()) : analyze_app;
    std::vector<std::string> warnings;
    const auto recipe =
        wfforge::build_recipe(std::move(instances), std::move(application), &warnings);
    for (const auto& warning : warnings) advise("warning: " + warning);
    write_output(wfforge::save_recipe(recipe), analyze_out);
  });

  // --- generate --------------------------------------------------------------
  auto* cmd_generate = app.add_subcommand("generate", "generate a synthetic instance");
  std::string generate_recipe;
  std::int64_t generate_tasks = 0;
  std::string generate_out;
  cmd_generate->add_option("--recipe", generate_recipe, "recipe JSON file")->required();
  cmd_generate->add_option("--tasks", generate_tasks, "desired number of tasks")->required();
  cmd_generate->add_option("--out", generate_out, "write the instance here instead of stdout");
  cmd_generate->callback([&] {
    std::vector<std::string> notes;
    const auto recipe = wfforge::load_recipe(read_file(generate_recipe), &notes);
    for (const auto& note : notes) advise("note: " + note);
    const auto w = wfforge::generate(recipe, generate_tasks, seed);
    write_output(wfforge::serialize_instance(w), generate_out);
  });

  // --- thf -------------------------------------------------------------------
  auto* cmd_thf = app.add_subcommand("thf", "type hash frequency distance");
  std::string thf_real;
  std::vector<std::string> thf_synthetic;
  bool thf_raw = false;
  cmd_thf->add_option("--real", thf_real, "reference instance")->required();
  cmd_thf->add_option("--synthetic", thf_synthetic, "synthetic instance(s)")->required();
  cmd_thf->add_flag("--raw-counts", thf_raw, "use raw hash counts instead of frequencies");
  cmd_thf->callback([&] {
    const auto real = load_instance(thf_real);
    if (format == "csv") {
      std::cout << "real,synthetic,thf\n";
      for (const auto& path : thf_synthetic) {
        const auto score = wfforge::thf(real, load_instance(path), !thf_raw);
        std::cout << thf_real << "," << path << "," << score.value << "\n";
      }
      return;
    }
    ordered_json rows = ordered_json::array();
    for (const auto& path : thf_synthetic) {
      const auto score = wfforge::thf(real, load_instance(path), !thf_raw);
      ordered_json doc;
      doc["thf"] = score.value;
      doc["universe"] = score.hash_universe_size;
      rows.push_back(std::move(doc));
    }
    std::cout << (rows.size() == 1 ? rows.front() : rows).dump(2) << "\n";
  });

  // --- simulate ----------------------------------------------------------------
  auto* cmd_simulate = app.add_subcommand("simulate", "simulate execution on a cluster");
  std::string sim_instance;
  std::vector<std::string> sim_sweep;
  std::string sim_out;
  wfforge::Platform platform;
  double sim_bandwidth = 0.0;
  cmd_simulate->add_option("--instance", sim_instance, "instance JSON file");
  cmd_simulate->add_option("--sweep", sim_sweep, "instances for a CSV sweep");
  cmd_simulate->add_option("--nodes", platform.nodes, "cluster nodes")->check(CLI::PositiveNumber);
  cmd_simulate->add_option("--cores", platform.cores_per_node, "cores per node")
      ->check(CLI::PositiveNumber);
  cmd_simulate->add_option("--speed", platform.core_speed_factor, "runtime scale factor")
      ->check(CLI::PositiveNumber);
  cmd_simulate->add_option("--bandwidth", sim_bandwidth, "WAN bandwidth, bytes/s (0 = free)");
  cmd_simulate->add_option("--p-static", platform.p_static_w, "static watts per node");
  cmd_simulate->add_option("--p-core", platform.p_core_w, "watts per busy core");
  cmd_simulate->add_option("--out", sim_out, "write the report here instead of stdout");
  cmd_simulate->callback([&] {
    if (sim_bandwidth > 0.0) platform.wan_bandwidth_bps = sim_bandwidth;
    if (!sim_sweep.empty()) {
      std::cout << "tasks,makespan_s,energy_kwh\n";
      for (const auto& path : collect_instance_files(sim_sweep)) {
        const auto w = load_instance(path);
        const auto report = wfforge::simulate(w, platform);
        std::cout << w.size() << "," << report.makespan_s << "," << report.energy_kwh << "\n";
      }
      return;
    }
    if (sim_instance.empty()) {
      throw wfforge::Error(wfforge::Errc::NoInstances, "need --instance or --sweep");
    }
    const auto w = load_instance(sim_instance);
    const auto report = wfforge::simulate(w, platform);
    ordered_json doc;
    doc["makespan"] = report.makespan_s;
    doc["energyKwh"] = report.energy_kwh;
    doc["utilization"] = report.utilization;
    doc["nodeBusyCoreSeconds"] = report.node_busy_core_s;
    ordered_json tasks;
    for (const auto& [id, sched] : report.per_task) {
      ordered_json tj;
      tj["start"] = sched.start_s;
      tj["end"] = sched.end_s;
      tj["node"] = sched.node;
      tasks[id] = std::move(tj);
    }
    doc["tasks"] = std::move(tasks);
    write_output(doc.dump(2) + "\n", sim_out);
  });

  // --- corpus ------------------------------------------------------------------
  auto* cmd_corpus = app.add_subcommand("corpus", "bundled pseudo-real instance corpus");
  auto* cmd_corpus_emit = cmd_corpus->add_subcommand("emit", "write the corpus to a directory");
  std::string corpus_out;
  cmd_corpus_emit->add_option("--out", corpus_out, "output directory")->required();
  cmd_corpus_emit->callback([&] {
    const auto entries = wfforge::corpus::emit_corpus(corpus_out, seed);
    advise("wrote " + std::to_string(entries.size()) + " instances to " + corpus_out);
  });
  cmd_corpus->require_subcommand(1);

  // --- closed-loop ---------------------------------------------------------------
  auto* cmd_loop = app.add_subcommand(
      "closed-loop", "analyze -> generate -> compare pipeline over an instance directory");
  std::vector<std::string> loop_inputs;
  std::string loop_scales = "1x,2x,4x";
  int loop_samples = 10;
  std::string loop_out;
  cmd_loop->add_option("--instances", loop_inputs, "instance files or directories")->required();
  cmd_loop->add_option("--scales", loop_scales, "comma-separated scale multipliers, e.g. 1x,2x,4x");
  cmd_loop->add_option("--samples", loop_samples, "synthetic samples per scale")
      ->check(CLI::PositiveNumber);
  cmd_loop->add_option("--out", loop_out, "write the CSV here instead of stdout");
  cmd_loop->callback([&] {
    std::vector<double> multipliers;
    std::stringstream ss(loop_scales);
    std::string token;
    while (std::getline(ss, token, ',')) {
      if (!token.empty() && (token.back() == 'x' || token.back() == 'X')) token.pop_back();
      multipliers.push_back(std::stod(token));
    }
    std::map<std::string, std::vector<wfforge::WorkflowInstance>> by_family;
    for (const auto& file : collect_instance_files(loop_inputs)) {
      auto w = load_instance(file);
      by_family[family_of(w)].push_back(std::move(w));
    }
    if (by_family.empty()) {
      throw wfforge::Error(wfforge::Errc::NoInstances, "no instance files found");
    }
    const wfforge::Platform default_platform;
    std::ostringstream csv;
    csv << "application,scale,target_tasks,mean_thf,mean_abs_makespan_rel_diff\n";
    for (auto& [family, instances] : by_family) {
      std::vector<std::string> warnings;
      auto copy = instances;
      const auto recipe = wfforge::build_recipe(std::move(copy), family, &warnings);
      for (const auto& warning : warnings) advise("warning: " + warning);
      for (const double multiplier : multipliers) {
        const auto target = static_cast<std::int64_t>(
            std::llround(static_cast<double>(recipe.min_tasks) * multiplier));
        // reference: the pseudo-real instance closest in size to the target
        const wfforge::WorkflowInstance* reference = &instances.front();
        for (const auto& w : instances) {
          if (std::llabs(static_cast<std::int64_t>(w.size()) - target) <
              std::llabs(static_cast<std::int64_t>(reference->size()) - target)) {
            reference = &w;
          }
        }
        const auto ref_report = wfforge::simulate(*reference, default_platform);
        double thf_sum = 0.0;
        double makespan_sum = 0.0;
        for (int i = 0; i < loop_samples; ++i) {
          const auto synthetic =
              wfforge::generate(recipe, target, wfforge::derive_seed(seed, i));
          thf_sum += wfforge::thf(*reference, synthetic).value;
          const auto report = wfforge::simulate(synthetic, default_platform);
          makespan_sum += wfforge::makespan_rel_diff(report.makespan_s, ref_report.makespan_s);
        }
        csv << family << "," << multiplier << "x," << target << ","
            << thf_sum / loop_samples << "," << makespan_sum / loop_samples << "\n";
      }
    }
    write_output(csv.str(), loop_out);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const wfforge::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return rc;
}
