#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "csck/io.hpp"

using namespace csck;
using csck::io::json;

TEST_CASE("rational literals") {
  CHECK(rat_from_string("3/4") == Rat(3, 4));
  CHECK(rat_from_string("-7") == Rat(-7));
  CHECK(rat_to_string(Rat(-5, 10)) == "-1/2");
  CHECK_THROWS_AS(rat_from_string("1/0"), SchemaError);
  CHECK_THROWS_AS(rat_from_string("abc"), SchemaError);
  CHECK_THROWS_AS(rat_from_string(""), SchemaError);
}

TEST_CASE("polytope serialization round trip") {
  const auto p = toric::LatticePolytope::from_vertices(2, {{0, 0}, {2, 0}, {2, 1}, {0, 3}});
  const auto back = io::polytope_from_json(io::polytope_json(p));
  CHECK(back.same_vertex_set(p));
  CHECK(back.volume() == p.volume());

  SECTION("facet-only form") {
    json facets = io::polytope_json(p);
    facets.erase("vertices");
    const auto q = io::polytope_from_json(facets);
    CHECK(q.same_vertex_set(p));
  }

  SECTION("rejects unknown fields and bad data") {
    CHECK_THROWS_AS(io::polytope_from_json(json{{"verts", json::array()}}), SchemaError);
    CHECK_THROWS_AS(io::polytope_from_json(json{{"normals", {{1, 0}}}, {"supports", {"0", "1"}}}),
                    SchemaError);
  }
}

TEST_CASE("tuple and action serialization") {
  const auto t = toric::PolarizedTuple::cp1({Rat(1), Rat(1, 2)});
  const auto back = io::tuple_from_json(io::tuple_json(t));
  CHECK(back.model() == toric::Model::cp1);
  CHECK(back.degrees() == t.degrees());

  const auto prod = toric::PolarizedTuple::product_cp1({{Rat(2), Rat(1)}, {Rat(1), Rat(1)}});
  CHECK(io::tuple_from_json(io::tuple_json(prod)).bidegrees() == prod.bidegrees());

  SECTION("action resolution") {
    const auto a = io::action_from_json(json{{"ell", {"1"}}, {"normalization", "zero-mean"}}, t);
    CHECK(a.shifts[0] == Rat(-1, 2));
    CHECK_THROWS_AS(io::action_from_json(
                        json{{"ell", {"1"}}, {"shifts", {"0", "0"}}, {"normalization", "zero-mean"}}, t),
                    SchemaError);
    CHECK_THROWS_AS(io::action_from_json(json{{"ell", {"1"}}, {"gauge", "x"}}, t), SchemaError);
  }
}

TEST_CASE("metric serialization") {
  const auto tuple = toric::PolarizedTuple::cp1({1, 1});
  const geom::QuadratureSpec quad(400, 30);
  json spec{{"coefficients", {{0, 0, 0.05}, {0, 0.01, 0}}},
            {"twist", {{"t", 0.5}}}};
  const auto mt = io::metric_from_json(spec, tuple, quad);
  CHECK(mt.has_twist());
  CHECK(mt.twist_parameter() == 0.5);
  const auto round_trip = io::metric_from_json(io::metric_json(mt), tuple, quad);
  CHECK(round_trip.potential(0).coefficients() == mt.potential(0).coefficients());

  SECTION("degree mismatch is rejected") {
    json bad = spec;
    bad["degrees"] = {"1", "2"};
    CHECK_THROWS_AS(io::metric_from_json(bad, tuple, quad), SchemaError);
  }
  SECTION("unknown fields are rejected") {
    json bad = spec;
    bad["extra"] = 1;
    CHECK_THROWS_AS(io::metric_from_json(bad, tuple, quad), SchemaError);
  }
}

TEST_CASE("job config") {
  const json j{{"tuple", {{"model", "cp1"}, {"degrees", {"1", "1"}}}},
               {"action", {{"ell", {"1"}}, {"normalization", "min-zero"}}},
               {"quadrature", {{"panels", 500}, {"cutoff", 35.0}}},
               {"solve", {{"equation", "coupled-einstein"}, {"gauge", "pin"}}},
               {"tolerance", 1e-7}};
  const auto cfg = io::JobConfig::parse(j);
  CHECK(cfg.quad_panels == 500);
  CHECK(cfg.tolerance == 1e-7);
  CHECK(cfg.solve_equation == solver::Equation::coupled_einstein);
  CHECK(cfg.solve.gauge == solver::Gauge::pin_coefficients);
  CHECK(cfg.resolve_action().shifts.size() == 2);

  SECTION("unknown top-level fields are rejected") {
    json bad = j;
    bad["mystery"] = 1;
    CHECK_THROWS_AS(io::JobConfig::parse(bad), SchemaError);
  }
  SECTION("missing pieces are reported") {
    const auto empty = io::JobConfig::parse(json::object());
    CHECK_THROWS_AS(empty.require_tuple(), SchemaError);
  }
}

TEST_CASE("reports serialize deterministically") {
  const auto tuple = toric::PolarizedTuple::cp1({1, 1});
  const geom::MetricTuple mt(tuple, {geom::SymmetricPotential::round(1).perturbed(2, 0.04),
                                     geom::SymmetricPotential::round(1)});
  const auto action = toric::min_zero_action(tuple, {Rat(1)});
  const auto r1 = invariants::make_report(mt, action, 1e-6);
  const auto r2 = invariants::make_report(mt, action, 1e-6);
  CHECK(io::report_json(r1).dump() == io::report_json(r2).dump());
  CHECK(io::report_json(r1)["s_hat"] == "0");
  CHECK(io::report_json(r1)["df"]["coefficient_route"].is_string());  // exact, never a float
}

TEST_CASE("csv writer") {
  const std::string path = std::filesystem::temp_directory_path() / "csck_io_test.csv";
  io::write_csv(path, {"a", "b"}, {{1.0, 2.5}, {3.0, 4.0}});
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  CHECK(line == "a,b");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 2);
  std::remove(path.c_str());
}
