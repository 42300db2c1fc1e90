#include <doctest.h>

#include <sstream>

#include "netlap/error.hpp"
#include "netlap/io.hpp"

using namespace netlap;

TEST_CASE("network JSON round trip") {
  const auto net = generate(FamilySpec{FamilyKind::GeometricHalfline, 5, 2, 0});
  std::ostringstream os;
  write_network_json(os, net);
  const NetworkDocument doc = parse_network_json(os.str());
  const ResistanceNetwork back = to_network(doc);
  CHECK(back.size() == 5);
  CHECK(back.conductance(3, 4) == 16.0);
  REQUIRE(back.family());
  CHECK(back.family()->kind == FamilyKind::GeometricHalfline);
  CHECK(back.external_conductance(4) == 32.0);
}

TEST_CASE("string and integer ids") {
  const auto doc = parse_network_json(R"({"vertices": ["a", 7], "edges": [{"u": "a", "v": 7, "c": 2.5}], "origin": "a"})");
  const auto net = to_network(doc);
  CHECK(net.label(1) == "7");
  CHECK(net.conductance(0, 1) == 2.5);
}

TEST_CASE("malformed files") {
  CHECK_THROWS_AS(parse_network_json("{"), Error);
  CHECK_THROWS_AS(parse_network_json(R"({"vertices": [0, 1], "edges": [], "origin": 0, "extra": 1})"), Error);
  CHECK_THROWS_AS(parse_network_json(R"({"vertices": [0, 1], "edges": [{"u": 0, "v": 1, "c": 1, "w": 2}], "origin": 0})"), Error);
  CHECK_THROWS_AS(parse_network_json(R"({"vertices": [0, 1], "edges": [{"u": 0, "v": 2, "c": 1}], "origin": 0})"), Error);
  CHECK_THROWS_AS(parse_network_json(R"({"vertices": [0, 0], "edges": [], "origin": 0})"), Error);
  CHECK_THROWS_AS(read_network_file("/nonexistent/net.json"), Error);
  const auto neg = parse_network_json(R"({"vertices": [0, 1], "edges": [{"u": 0, "v": 1, "c": -1}], "origin": 0})");
  CHECK_THROWS_AS(to_network(neg), Error);
  const auto view = to_matrix_view(neg);
  CHECK(view.entries(0, 1) == 1.0);
}

TEST_CASE("residual report") {
  std::ostringstream os;
  write_residual_report(os, {make_record("reciprocity", 1e-12, 1e-8)});
  CHECK(os.str().find("\"pass\": true") != std::string::npos);
  CHECK(os.str().find("\"check_name\": \"reciprocity\"") != std::string::npos);
}
