#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"
#include "wfforge/recipe.hpp"

using namespace wfforge;
using test_helpers::make_instance;

namespace {

WorkflowInstance two_chain_instance(const std::string& name, double runtime_scale) {
  auto w = make_instance(name, {{"r", "root", {}},
                                {"x1", "ex", {"r"}},
                                {"y1", "why", {"x1"}},
                                {"x2", "ex", {"r"}},
                                {"y2", "why", {"x2"}},
                                {"s", "sink", {"y1", "y2"}}});
  for (std::size_t i = 0; i < w.size(); ++i) {
    w.tasks[i].runtime_s = runtime_scale * static_cast<double>(i + 1);
  }
  return w;
}

}  // namespace

TEST_CASE("build_recipe: single instance without repeats") {
  const auto w = make_instance("lone", {{"a", "ta", {}}, {"b", "tb", {"a"}}, {"c", "tc", {"b"}}});
  const auto recipe = build_recipe({w}, "lone");
  CHECK(recipe.min_tasks == 3);
  CHECK(recipe.catalog.groups.empty());
  CHECK(recipe.type_stats.size() == 3);
  CHECK(recipe.source_instances == std::vector<std::string>{"lone"});
}

TEST_CASE("build_recipe: two-chain input exposes its pattern group") {
  const auto recipe = build_recipe({two_chain_instance("tc", 1.0)}, "tc");
  CHECK(recipe.min_tasks == 6);
  REQUIRE(recipe.catalog.groups.size() == 1);
  CHECK(recipe.catalog.groups[0].occurrences.size() == 2);
  // every base type has statistics
  for (const auto& t : recipe.base_graph.tasks) {
    CHECK(recipe.type_stats.count(t.type) == 1);
  }
}

TEST_CASE("build_recipe: base graph is the smallest instance, stats pool everything") {
  const auto small = make_instance("z-small", {{"a", "ta", {}}, {"b", "tb", {"a"}}});
  auto big = make_instance("a-big", {{"a", "ta", {}},
                                     {"b", "tb", {"a"}},
                                     {"c", "tb", {"a"}}});
  big.tasks[0].runtime_s = 100.0;
  big.finalize();
  std::vector<std::string> warnings;
  const auto recipe = build_recipe({big, small}, "app", &warnings);
  CHECK(recipe.min_tasks == 2);
  CHECK(recipe.base_graph.size() == 2);
  // pooled: type "ta" has samples 100.0 (big) and 1.0 (small)
  const auto& fit = recipe.type_stats.at("ta").runtime;
  CHECK(fit.min == 1.0);
  CHECK(fit.max == 100.0);
}

TEST_CASE("build_recipe: input validation") {
  CHECK_THROWS_MATCHES(build_recipe({}, "x"), Error,
                       Catch::Matchers::Predicate<Error>(
                           [](const Error& e) { return e.code() == Errc::NoInstances; }));
  const auto bad = make_instance("bad", {{"a", "ta", {"ghost"}}});
  CHECK_THROWS_MATCHES(build_recipe({bad}, "x"), Error,
                       Catch::Matchers::Predicate<Error>(
                           [](const Error& e) { return e.code() == Errc::InvalidInstance; }));
}

TEST_CASE("recipe: save/load round-trip") {
  const auto recipe = build_recipe({two_chain_instance("tc", 1.0)}, "tc");
  const auto text = save_recipe(recipe);
  const auto loaded = load_recipe(text);
  CHECK(loaded.application == recipe.application);
  CHECK(loaded.min_tasks == recipe.min_tasks);
  CHECK(loaded.base_graph.size() == recipe.base_graph.size());
  REQUIRE(loaded.catalog.groups.size() == recipe.catalog.groups.size());
  CHECK(loaded.catalog.groups[0].signature == recipe.catalog.groups[0].signature);
  CHECK(save_recipe(loaded) == text);  // byte-stable round-trip
}

TEST_CASE("recipe: schema violations") {
  const auto recipe = build_recipe({two_chain_instance("tc", 1.0)}, "tc");
  auto doc = json::parse(save_recipe(recipe));

  SECTION("missing minTasks") {
    doc.erase("minTasks");
    try {
      load_recipe(doc.dump());
      FAIL("expected SchemaViolation");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::SchemaViolation);
      CHECK(e.path() == "minTasks");
    }
  }
  SECTION("minTasks inconsistent with the base graph") {
    doc["minTasks"] = 99;
    CHECK_THROWS_MATCHES(load_recipe(doc.dump()), Error,
                         Catch::Matchers::Predicate<Error>(
                             [](const Error& e) { return e.code() == Errc::SchemaViolation; }));
  }
  SECTION("occurrence naming an unknown task") {
    doc["patterns"][0]["occurrences"][0] = {"nope"};
    CHECK_THROWS_MATCHES(load_recipe(doc.dump()), Error,
                         Catch::Matchers::Predicate<Error>(
                             [](const Error& e) { return e.code() == Errc::SchemaViolation; }));
  }
  SECTION("stored signature disagreeing with the base graph") {
    doc["patterns"][0]["signature"] = {"deadbeef"};
    CHECK_THROWS_MATCHES(load_recipe(doc.dump()), Error,
                         Catch::Matchers::Predicate<Error>(
                             [](const Error& e) { return e.code() == Errc::SchemaViolation; }));
  }
  SECTION("missing stats for a base type") {
    doc["typeStats"].erase("root");
    CHECK_THROWS_MATCHES(load_recipe(doc.dump()), Error,
                         Catch::Matchers::Predicate<Error>(
                             [](const Error& e) { return e.code() == Errc::SchemaViolation; }));
  }
  SECTION("a group with a single occurrence") {
    doc["patterns"][0]["occurrences"].erase(1);
    doc["patterns"][0].erase("signature");
    CHECK_THROWS_MATCHES(load_recipe(doc.dump()), Error,
                         Catch::Matchers::Predicate<Error>(
                             [](const Error& e) { return e.code() == Errc::SchemaViolation; }));
  }
  SECTION("overlapping occurrences") {
    doc["patterns"][0]["occurrences"][1] = doc["patterns"][0]["occurrences"][0];
    CHECK_THROWS_MATCHES(load_recipe(doc.dump()), Error,
                         Catch::Matchers::Predicate<Error>(
                             [](const Error& e) { return e.code() == Errc::SchemaViolation; }));
  }
  SECTION("malformed JSON") {
    CHECK_THROWS_MATCHES(load_recipe("{"), Error,
                         Catch::Matchers::Predicate<Error>(
                             [](const Error& e) { return e.code() == Errc::MalformedJson; }));
  }
}

TEST_CASE("recipe: external distribution names are mapped on load") {
  const auto recipe = build_recipe({two_chain_instance("tc", 1.0)}, "tc");
  auto doc = json::parse(save_recipe(recipe));
  doc["typeStats"]["root"]["runtime"]["distribution"]["name"] = "skewnorm";
  doc["typeStats"]["root"]["runtime"]["distribution"]["params"] = {11115267.652937062,
                                                                   -2.9628504044929433e-05,
                                                                   56.03957070238482};
  std::vector<std::string> notes;
  const auto loaded = load_recipe(doc.dump(), &notes);
  CHECK(loaded.type_stats.at("root").runtime.family == Family::Normal);
  REQUIRE_FALSE(notes.empty());
  CHECK(notes[0].find("skewnorm") != std::string::npos);
}

TEST_CASE("build_recipe: advisory warnings") {
  SECTION("diverging type vocabulary") {
    const auto a = make_instance("a", {{"x", "ta", {}}, {"y", "tb", {"x"}}});
    const auto b = make_instance("b", {{"x", "ta", {}}, {"y", "OTHER", {"x"}}, {"z", "tb", {"y"}}});
    std::vector<std::string> warnings;
    build_recipe({a, b}, "app", &warnings);
    REQUIRE_FALSE(warnings.empty());
    CHECK(warnings[0].find("vocabulary") != std::string::npos);
  }
  SECTION("pattern group that does not recur elsewhere") {
    const auto base = two_chain_instance("base", 1.0);
    // larger companion with none of the base's structure
    const auto other = make_instance("other", {{"c1", "u1", {}},
                                               {"c2", "u2", {"c1"}},
                                               {"c3", "u3", {"c2"}},
                                               {"c4", "u4", {"c3"}},
                                               {"c5", "u5", {"c4"}},
                                               {"c6", "u6", {"c5"}},
                                               {"c7", "u7", {"c6"}}});
    std::vector<std::string> warnings;
    const auto recipe = build_recipe({base, other}, "app", &warnings);
    REQUIRE(recipe.catalog.groups.size() == 1);  // still kept, warning only
    bool flagged = false;
    for (const auto& w : warnings) flagged |= w.find("recur") != std::string::npos;
    CHECK(flagged);
  }
}

TEST_CASE("recipe: per-type entries expose the observed extremes") {
  auto w = make_instance("genomes", {{"i1", "individuals", {}},
                                     {"i2", "individuals", {}},
                                     {"i3", "individuals", {}},
                                     {"i4", "individuals", {}},
                                     {"i5", "individuals", {}},
                                     {"m", "merge", {"i1", "i2", "i3", "i4", "i5"}}});
  const double runtimes[] = {48.846, 75.0, 110.4, 150.2, 192.232};
  for (int i = 0; i < 5; ++i) w.tasks[i].runtime_s = runtimes[i];
  w.finalize();
  const auto text = save_recipe(build_recipe({w}, "genomes"));
  // the runtime entry carries the sample extremes and a named distribution
  CHECK(text.find("\"min\": 48.846") != std::string::npos);
  CHECK(text.find("\"max\": 192.232") != std::string::npos);
  CHECK(text.find("\"distribution\"") != std::string::npos);
  CHECK(text.find("\"params\"") != std::string::npos);
}

TEST_CASE("build_recipe: determinism over name-sorted inputs") {
  const auto a = two_chain_instance("alpha", 1.0);
  const auto b = two_chain_instance("beta", 2.0);
  const auto r1 = save_recipe(build_recipe({a, b}, "app"));
  const auto r2 = save_recipe(build_recipe({b, a}, "app"));
  CHECK(r1 == r2);
}
