#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "helpers.hpp"
#include "wfforge/instance.hpp"
#include "wfforge/rng.hpp"

using namespace wfforge;
using test_helpers::instance_json;
using test_helpers::make_instance;

TEST_CASE("parse: minimal single-task instance") {
  const auto w = parse_instance(instance_json(
      R"([{"id":"t1","name":"noop","runtimeInSeconds":1.0,"parents":[]}])"));
  REQUIRE(w.size() == 1);
  CHECK(w.tasks[0].id == "t1");
  CHECK(w.tasks[0].type == "noop");
  CHECK(w.tasks[0].runtime_s == 1.0);
  CHECK(w.tasks[0].cores == 1);  // default
  CHECK(w.parent_indices(0).empty());
  CHECK(w.child_indices(0).empty());
}

TEST_CASE("parse: a recipe document is not an instance") {
  // The enclosing shape of a recipe's statistical summary has no
  // workflow.tasks section.
  const std::string recipe_like = R"({
    "name": "genomes",
    "individuals": {"runtime": {"min": 48.846, "max": 192.232,
      "distribution": {"name": "skewnorm", "params": [1.0, 2.0, 3.0]}}}
  })";
  try {
    parse_instance(recipe_like);
    FAIL("expected MissingField");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::MissingField);
    CHECK(e.path() == "workflow.tasks");
  }
}

TEST_CASE("parse: malformed JSON and bad values") {
  CHECK_THROWS_MATCHES(parse_instance("{nope"), Error,
                       Catch::Matchers::Predicate<Error>(
                           [](const Error& e) { return e.code() == Errc::MalformedJson; }));
  CHECK_THROWS_MATCHES(
      parse_instance(instance_json(R"([{"id":"a","name":"x","runtimeInSeconds":"fast"}])")), Error,
      Catch::Matchers::Predicate<Error>([](const Error& e) {
        return e.code() == Errc::BadValue &&
               e.path() == "workflow.tasks[0].runtimeInSeconds";
      }));
  CHECK_THROWS_MATCHES(
      parse_instance(instance_json(R"([{"id":"a","name":"x"}])")), Error,
      Catch::Matchers::Predicate<Error>([](const Error& e) {
        return e.code() == Errc::MissingField;
      }));
}

TEST_CASE("parse: three-task chain ancestors") {
  const auto w = parse_instance(instance_json(R"([
    {"id":"t1","name":"a","runtimeInSeconds":1.0},
    {"id":"t2","name":"b","runtimeInSeconds":1.0,"parents":["t1"]},
    {"id":"t3","name":"c","runtimeInSeconds":1.0,"parents":["t2"]}
  ])"));
  const auto anc = ancestors_of(w, "t3");
  // Hand-checked transitive closure of t3 in t1 -> t2 -> t3.
  CHECK(anc == std::set<std::size_t>{w.index_of("t1"), w.index_of("t2")});
  CHECK(ancestors_of(w, "t1").empty());
}

TEST_CASE("parse: children derived from parents, never from input") {
  const auto w = parse_instance(instance_json(R"([
    {"id":"a","name":"x","runtimeInSeconds":1.0,"children":["bogus"]},
    {"id":"b","name":"y","runtimeInSeconds":1.0,"parents":["a"]}
  ])"));
  REQUIRE(w.child_indices(w.index_of("a")) == std::vector<std::size_t>{w.index_of("b")});
  // the bogus children key is dropped, not kept as an unknown field
  CHECK(w.tasks[w.index_of("a")].extra.empty());
}

TEST_CASE("validate: clean single task") {
  const auto w = parse_instance(instance_json(
      R"([{"id":"t1","name":"noop","runtimeInSeconds":0.0}])"));
  CHECK(validate_instance(w).ok());
}

TEST_CASE("validate: smallest cycle") {
  const auto w = parse_instance(instance_json(R"([
    {"id":"A","name":"x","runtimeInSeconds":1.0,"parents":["B"]},
    {"id":"B","name":"y","runtimeInSeconds":1.0,"parents":["A"]}
  ])"));
  const auto report = validate_instance(w);
  REQUIRE_FALSE(report.ok());
  bool has_cycle = false;
  for (const auto& v : report.violations) has_cycle |= v.code == ViolationCode::Cycle;
  CHECK(has_cycle);
  CHECK_FALSE(topological_order(w).has_value());
}

TEST_CASE("validate: duplicated file producer") {
  const auto w = parse_instance(instance_json(R"([
    {"id":"a","name":"x","runtimeInSeconds":1.0,
     "outputFiles":[{"name":"f.dat","sizeInBytes":10}]},
    {"id":"b","name":"y","runtimeInSeconds":1.0,
     "outputFiles":[{"name":"f.dat","sizeInBytes":20}]}
  ])"));
  const auto report = validate_instance(w);
  REQUIRE(report.violations.size() == 1);
  CHECK(report.violations[0].code == ViolationCode::FileConflict);
}

TEST_CASE("validate: every violation code has a trigger") {
  SECTION("DUPLICATE_ID") {
    const auto w = parse_instance(instance_json(R"([
      {"id":"a","name":"x","runtimeInSeconds":1.0},
      {"id":"a","name":"x","runtimeInSeconds":1.0}
    ])"));
    REQUIRE_FALSE(validate_instance(w).ok());
    CHECK(validate_instance(w).violations[0].code == ViolationCode::DuplicateId);
  }
  SECTION("DANGLING_PARENT") {
    const auto w = parse_instance(instance_json(
        R"([{"id":"a","name":"x","runtimeInSeconds":1.0,"parents":["ghost"]}])"));
    const auto report = validate_instance(w);
    REQUIRE_FALSE(report.ok());
    CHECK(report.violations[0].code == ViolationCode::DanglingParent);
    CHECK(report.violations[0].path == "workflow.tasks[0].parents[0]");
  }
  SECTION("NEGATIVE_VALUE on runtime") {
    const auto w = parse_instance(instance_json(
        R"([{"id":"a","name":"x","runtimeInSeconds":-1.0}])"));
    const auto report = validate_instance(w);
    REQUIRE_FALSE(report.ok());
    CHECK(report.violations[0].code == ViolationCode::NegativeValue);
  }
  SECTION("NEGATIVE_VALUE on cores and sizes") {
    const auto w = parse_instance(instance_json(R"([
      {"id":"a","name":"x","runtimeInSeconds":1.0,"cores":0,
       "inputFiles":[{"name":"f","sizeInBytes":-5}]}
    ])"));
    CHECK(validate_instance(w).violations.size() == 2);
  }
  SECTION("FILE_CONFLICT when a file is input and output of one task") {
    const auto w = parse_instance(instance_json(R"([
      {"id":"a","name":"x","runtimeInSeconds":1.0,
       "inputFiles":[{"name":"f","sizeInBytes":1}],
       "outputFiles":[{"name":"f","sizeInBytes":1}]}
    ])"));
    REQUIRE_FALSE(validate_instance(w).ok());
    CHECK(validate_instance(w).violations[0].code == ViolationCode::FileConflict);
  }
  SECTION("FILE_CONFLICT when the producer is a descendant of the consumer") {
    const auto w = parse_instance(instance_json(R"([
      {"id":"up","name":"x","runtimeInSeconds":1.0,
       "inputFiles":[{"name":"late.dat","sizeInBytes":1}]},
      {"id":"down","name":"y","runtimeInSeconds":1.0,"parents":["up"],
       "outputFiles":[{"name":"late.dat","sizeInBytes":1}]}
    ])"));
    REQUIRE_FALSE(validate_instance(w).ok());
    CHECK(validate_instance(w).violations[0].code == ViolationCode::FileConflict);
  }
  SECTION("external inputs are fine") {
    const auto w = parse_instance(instance_json(R"([
      {"id":"a","name":"x","runtimeInSeconds":1.0,
       "inputFiles":[{"name":"preexisting.dat","sizeInBytes":5}]}
    ])"));
    CHECK(validate_instance(w).ok());
  }
}

TEST_CASE("serialize: structural round-trip of a chain") {
  const auto w = parse_instance(instance_json(R"([
    {"id":"t1","name":"a","runtimeInSeconds":1.5},
    {"id":"t2","name":"b","runtimeInSeconds":2.5,"parents":["t1"]},
    {"id":"t3","name":"c","runtimeInSeconds":3.5,"parents":["t2"]}
  ])"));
  const auto again = parse_instance(serialize_instance(w));
  CHECK(again == w);
}

TEST_CASE("serialize: makespan appears verbatim") {
  auto w = make_instance("m", {{"t", "x", {}}});
  w.makespan_s = 12.5;
  CHECK(serialize_instance(w).find("\"makespan\": 12.5") != std::string::npos);
}

TEST_CASE("serialize: unknown fields round-trip opaquely") {
  const std::string text = instance_json(
      R"([{"id":"a","name":"x","runtimeInSeconds":1.0,"x-custom":7}])");
  const auto w = parse_instance(text);
  CHECK(w.tasks[0].extra["x-custom"] == 7);
  const auto serialized = serialize_instance(w);
  // compare parsed trees before and after
  const auto tree_before = json::parse(text);
  const auto tree_after = json::parse(serialized);
  CHECK(tree_after["workflow"]["tasks"][0]["x-custom"] ==
        tree_before["workflow"]["tasks"][0]["x-custom"]);
}

TEST_CASE("serialize: byte-level identity on canonical input") {
  auto w = make_instance("c", {{"a", "x", {}}, {"b", "y", {"a"}}});
  w.makespan_s = 3.25;
  Machine m;
  m.name = "node-0";
  m.cpu_speed_mhz = 2300.0;
  m.cpu_cores = 48;
  w.machines.push_back(m);
  const auto canonical = serialize_instance(w);
  CHECK(serialize_instance(parse_instance(canonical)) == canonical);
}

TEST_CASE("serialize: rejects invalid instances") {
  const auto w = parse_instance(instance_json(
      R"([{"id":"a","name":"x","runtimeInSeconds":-2.0}])"));
  CHECK_THROWS_MATCHES(serialize_instance(w), Error,
                       Catch::Matchers::Predicate<Error>(
                           [](const Error& e) { return e.code() == Errc::InvalidInstance; }));
}

TEST_CASE("validate: disconnected components are permitted") {
  const auto w = parse_instance(instance_json(R"([
    {"id":"a1","name":"x","runtimeInSeconds":1.0},
    {"id":"a2","name":"y","runtimeInSeconds":1.0,"parents":["a1"]},
    {"id":"b1","name":"x","runtimeInSeconds":1.0},
    {"id":"b2","name":"y","runtimeInSeconds":1.0,"parents":["b1"]}
  ])"));
  CHECK(validate_instance(w).ok());
  CHECK(topological_order(w).has_value());
}

TEST_CASE("property: random valid instances round-trip and topo-sort") {
  Rng rng(20260810);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 2 + static_cast<int>(rng.index(20));
    WorkflowInstance w;
    w.name = "rand-" + std::to_string(trial);
    for (int i = 0; i < n; ++i) {
      Task t;
      t.id = "n" + std::to_string(i);
      t.type = "type" + std::to_string(rng.index(4));
      t.runtime_s = 0.5 + rng.uniform01() * 10.0;
      // edges only from lower to higher index: acyclic by construction
      for (int p = 0; p < i; ++p) {
        if (rng.uniform01() < 0.25) t.parents.push_back("n" + std::to_string(p));
      }
      w.tasks.push_back(std::move(t));
    }
    w.finalize();
    REQUIRE(validate_instance(w).ok());

    const auto order = topological_order(w);
    REQUIRE(order.has_value());
    CHECK(order->size() == w.size());

    // children is the exact transpose of parents
    for (std::size_t i = 0; i < w.size(); ++i) {
      for (std::size_t p : w.parent_indices(i)) {
        const auto& kids = w.child_indices(p);
        CHECK(std::find(kids.begin(), kids.end(), i) != kids.end());
      }
    }

    const auto serialized = serialize_instance(w);
    CHECK(parse_instance(serialized) == w);
    CHECK(serialize_instance(parse_instance(serialized)) == serialized);
  }
}
