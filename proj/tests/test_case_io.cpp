#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "sdnr/case_io.hpp"
#include "sdnr/error.hpp"
#include "sdnr/netgraph.hpp"

using namespace sdnr;

namespace {

const std::filesystem::path kData = SDNR_DATA_DIR;
const std::filesystem::path kTestData = SDNR_TEST_DATA_DIR;

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::set<std::pair<int, int>> tie_pairs(const CaseDocument& doc) {
  std::set<std::pair<int, int>> out;
  for (const auto& br : doc.branches) {
    if (doc.open_branches.count(br.id)) out.insert({std::min(br.from, br.to), std::max(br.from, br.to)});
  }
  return out;
}

std::string where_of(const std::string& text) {
  try {
    parse_case_json(text);
  } catch (const SchemaError& e) {
    return e.where();
  }
  return "";
}

}  // namespace

TEST_CASE("33-bus case") {
  const auto doc = parse_case(kData / "ieee33.json");
  CHECK(doc.buses.size() == 33);
  CHECK(doc.branches.size() == 37);
  CHECK(tie_pairs(doc) == std::set<std::pair<int, int>>{{8, 21}, {9, 15}, {12, 22}, {18, 33}, {2, 29}});
  const auto net = doc.network();
  CHECK(net.redundant_branch_count() == 5);
  CHECK(find_loops(net).size() == 5);
  CHECK(is_radial(net, doc.initial_configuration(net)));
  CHECK(doc.base_mva == 10.0);
  CHECK(doc.profiles.size() == 32);
  // 0.0922 ohm on a 12.66 kV / 10 MVA base
  CHECK(net.branch(1).r == doctest::Approx(0.0922 / (12.66 * 12.66 / 10.0)).epsilon(1e-6));
}

TEST_CASE("123-bus case") {
  const auto doc = parse_case(kData / "ieee123.json");
  CHECK(doc.buses.size() == 123);
  CHECK(doc.open_branches.size() == 5);
  const auto net = doc.network();
  CHECK(net.redundant_branch_count() == 5);
  CHECK(is_radial(net, doc.initial_configuration(net)));
}

TEST_CASE("bundled cases round-trip byte for byte after one canonical pass") {
  for (const char* name : {"two_bus.json", "toy_two_loop.json", "fig2_10bus.json", "ieee33.json", "ieee123.json"}) {
    const auto first = serialize_case(parse_case(kData / name));
    CHECK(serialize_case(parse_case_json(first)) == first);
  }
  const auto text = slurp(kData / "two_bus.json");
  const auto canon = serialize_case(parse_case_json(text));
  CHECK(canon == serialize_case(parse_case_json(canon)));
}

TEST_CASE("limits and flags survive a round trip") {
  const std::string text = R"({
  "schema": "sdnr-case/1",
  "name": "limits",
  "base_mva": 2.5,
  "base_kv": 11.0,
  "buses": [
    {"id": 3, "kind": "substation", "p_max": 1.5, "q_min": -0.5, "v_set": 1.03},
    {"id": 7, "v_min": 0.95, "profile": {"load": 0.2, "solar": 0.1}}
  ],
  "branches": [
    {"id": 9, "from": 3, "to": 7, "r": 0.01, "x": 0.02, "s_max": 1.0, "i_max": 2.0, "switchable": false}
  ]
})";
  const auto doc = parse_case_json(text);
  CHECK(doc.buses[0].injection->p_max == 1.5);
  CHECK(doc.buses[0].injection->q_min == -0.5);
  CHECK(doc.buses[0].v_set == 1.03);
  CHECK(doc.buses[1].v_min == 0.95);
  CHECK(doc.profiles.at(7).solar_capacity == 0.1);
  CHECK_FALSE(doc.branches[0].switchable);
  CHECK(doc.branches[0].p_max == kUnlimited);
  const auto again = parse_case_json(serialize_case(doc));
  CHECK(again.branches[0].i_max == 2.0);
  CHECK(again.buses[0].injection->p_max == 1.5);
  CHECK(again.base_kv == 11.0);
  CHECK(serialize_case(again) == serialize_case(doc));
}

TEST_CASE("schema errors carry locations") {
  CHECK(where_of(slurp(kTestData / "bad_unknown_field.json")) == "/buses/1/colour");
  CHECK(where_of("{\n  \"schema\": \"sdnr-case/1\",\n  \"buses\": [,]\n}") == "line 3:13");
  CHECK(where_of(R"({"schema": "other", "buses": [], "branches": []})") == "/schema");
  CHECK(where_of(R"({"schema": "sdnr-case/1", "buses": [{"id": 0, "kind": "slack"}], "branches": []})") ==
        "/buses/0/kind");
  CHECK(where_of(R"({"schema": "sdnr-case/1", "buses": [{"id": 0, "kind": "substation"}], "branches": [{"id": 1, "from": 0, "to": 2, "r": 0.1, "x": "a"}]})") ==
        "/branches/0/x");
  CHECK(where_of(R"({"schema": "sdnr-case/1", "buses": [{"id": 0, "kind": "substation"}], "branches": [{"id": 1, "from": 0, "r": 0.1, "x": 0.1}]})") ==
        "/branches/0/to");
}

TEST_CASE("dangling references") {
  const std::string text =
      R"({"schema": "sdnr-case/1", "buses": [{"id": 0, "kind": "substation"}, {"id": 1}], "branches": [{"id": 1, "from": 0, "to": 5, "r": 0.1, "x": 0.1}]})";
  CHECK_THROWS_AS(parse_case_json(text), ReferenceError);
  const std::string profile =
      R"({"schema": "sdnr-case/1", "buses": [{"id": 0, "kind": "substation", "profile": {"load": 0.1}}], "branches": []})";
  CHECK_THROWS_AS(parse_case_json(profile), SchemaError);
}

TEST_CASE("MATPOWER input") {
  const auto doc = parse_case(kTestData / "case4_loop.m");
  CHECK(doc.source_format == "matpower");
  CHECK(doc.base_mva == 10.0);
  CHECK(doc.base_kv == 12.66);
  REQUIRE(doc.buses.size() == 4);
  CHECK(doc.buses[0].is_substation());
  CHECK(doc.buses[0].v_set == 1.02);
  CHECK(doc.buses[0].v_max == 1.05);
  CHECK(doc.profiles.at(3).load_peak == doctest::Approx(0.08));
  REQUIRE(doc.branches.size() == 4);
  CHECK(doc.branches[0].s_max == doctest::Approx(0.5));
  CHECK(doc.branches[1].s_max == kUnlimited);
  CHECK(doc.open_branches == std::set<int>{4});
  const auto net = doc.network();
  CHECK(is_radial(net, doc.initial_configuration(net)));
  // converted document is an ordinary case
  CHECK(parse_case_json(serialize_case(doc)).branches.size() == 4);

  CHECK_THROWS_AS(parse_matpower("mpc.baseMVA = 1;\nmpc.bus = [\n 1 3 0;\n];\nmpc.branch = [\n];\n"), SchemaError);
  try {
    parse_matpower("mpc.baseMVA = 1;\nmpc.bus = [\n 1 3 0 0 0 0 1 1 0 1 1 1.1 x;\n];\n");
    FAIL("expected failure");
  } catch (const SchemaError& e) {
    CHECK(e.where() == "line 3");
  }
  CHECK_THROWS_AS(parse_matpower("mpc.baseMVA = 1;\nmpc.bus = [\n"), SchemaError);
}

TEST_CASE("missing files") {
  CHECK_THROWS_AS(parse_case(kData / "does-not-exist.json"), DataError);
}
