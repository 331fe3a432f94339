#pragma once

#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "csck/bergman.hpp"
#include "csck/coefficients.hpp"
#include "csck/errors.hpp"
#include "csck/geometry.hpp"
#include "csck/invariants.hpp"
#include "csck/polarized.hpp"
#include "csck/polytope.hpp"
#include "csck/rational.hpp"
#include "csck/solver.hpp"

namespace csck::io {

using json = nlohmann::ordered_json;

namespace detail {

inline void require_object(const json& j, const std::string& what) {
  if (!j.is_object()) throw SchemaError(what + " must be a JSON object");
}

/// Strict schemas: any key outside the allowed set is an error.
inline void check_keys(const json& j, const std::vector<std::string>& allowed,
                       const std::string& what) {
  require_object(j, what);
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const auto& a : allowed) ok = ok || key == a;
    if (!ok) throw SchemaError("unknown field '" + key + "' in " + what);
  }
}

inline Rat rat_field(const json& j, const std::string& what) {
  if (j.is_string()) return rat_from_string(j.get<std::string>());
  if (j.is_number_integer()) return Rat(j.get<long long>());
  throw SchemaError(what + " must be a rational string or integer");
}

}  // namespace detail

// ---- rationals ----------------------------------------------------------

inline json rat_json(const Rat& q) { return rat_to_string(q); }

// ---- polytopes -----------------------------------------------------------

inline json polytope_json(const toric::LatticePolytope& p) {
  json normals = json::array(), supports = json::array(), vertices = json::array();
  for (const auto& f : p.facets()) {
    json n = json::array();
    for (const auto& c : f.normal) n.push_back(static_cast<long long>(c));
    normals.push_back(n);
    supports.push_back(rat_json(f.support));
  }
  for (const auto& v : p.vertices()) {
    json row = json::array();
    for (const auto& c : v) row.push_back(rat_json(c));
    vertices.push_back(row);
  }
  return json{{"normals", normals}, {"supports", supports}, {"vertices", vertices}};
}

inline toric::LatticePolytope polytope_from_json(const json& j) {
  detail::check_keys(j, {"normals", "supports", "vertices"}, "polytope");
  if (j.contains("vertices") && !j.contains("normals")) {
    std::vector<toric::Point> verts;
    for (const auto& row : j.at("vertices")) {
      toric::Point v;
      for (const auto& c : row) v.push_back(detail::rat_field(c, "vertex coordinate"));
      verts.push_back(std::move(v));
    }
    if (verts.empty()) throw SchemaError("polytope needs vertices");
    return toric::LatticePolytope::from_vertices(static_cast<int>(verts[0].size()), verts);
  }
  if (!j.contains("normals") || !j.contains("supports"))
    throw SchemaError("polytope needs either vertices or normals+supports");
  std::vector<toric::LatticePolytope::Facet> facets;
  const auto& normals = j.at("normals");
  const auto& supports = j.at("supports");
  if (normals.size() != supports.size())
    throw SchemaError("normals and supports must have equal length");
  for (std::size_t i = 0; i < normals.size(); ++i) {
    toric::IntVec n;
    for (const auto& c : normals[i]) {
      if (!c.is_number_integer()) throw SchemaError("facet normals must be integer vectors");
      n.push_back(BigInt(c.get<long long>()));
    }
    facets.push_back({std::move(n), detail::rat_field(supports[i], "facet support")});
  }
  if (facets.empty()) throw SchemaError("polytope needs facets");
  return toric::LatticePolytope::from_facets(static_cast<int>(facets[0].normal.size()), facets);
}

// ---- polarized tuples ----------------------------------------------------

inline json tuple_json(const toric::PolarizedTuple& t) {
  json j{{"model", toric::model_name(t.model())}};
  switch (t.model()) {
    case toric::Model::cp1: {
      json d = json::array();
      for (const auto& deg : t.degrees()) d.push_back(rat_json(deg));
      j["degrees"] = d;
      break;
    }
    case toric::Model::product_cp1: {
      json d = json::array();
      for (const auto& bi : t.bidegrees()) d.push_back(json::array({rat_json(bi[0]), rat_json(bi[1])}));
      j["bidegrees"] = d;
      break;
    }
    case toric::Model::toric: {
      json ps = json::array();
      for (std::size_t i = 0; i < t.bundle_count(); ++i) ps.push_back(polytope_json(t.moment_polytope(i)));
      j["polytopes"] = ps;
      break;
    }
  }
  return j;
}

inline toric::PolarizedTuple tuple_from_json(const json& j) {
  detail::check_keys(j, {"model", "degrees", "bidegrees", "polytopes"}, "tuple");
  if (!j.contains("model")) throw SchemaError("tuple needs a model");
  const std::string model = j.at("model").get<std::string>();
  if (model == "cp1") {
    std::vector<Rat> degrees;
    for (const auto& d : j.at("degrees")) degrees.push_back(detail::rat_field(d, "degree"));
    return toric::PolarizedTuple::cp1(std::move(degrees));
  }
  if (model == "product-cp1") {
    std::vector<std::array<Rat, 2>> bidegrees;
    for (const auto& d : j.at("bidegrees")) {
      if (d.size() != 2) throw SchemaError("bidegrees must be pairs");
      bidegrees.push_back({detail::rat_field(d[0], "bidegree"), detail::rat_field(d[1], "bidegree")});
    }
    return toric::PolarizedTuple::product_cp1(std::move(bidegrees));
  }
  if (model == "toric") {
    std::vector<toric::LatticePolytope> ps;
    for (const auto& p : j.at("polytopes")) ps.push_back(polytope_from_json(p));
    return toric::PolarizedTuple::toric(std::move(ps));
  }
  throw SchemaError("unknown tuple model '" + model + "'");
}

// ---- actions --------------------------------------------------------------

inline json action_json(const toric::TorusAction& a) {
  json ell = json::array(), shifts = json::array();
  for (const auto& e : a.ell) ell.push_back(rat_json(e));
  for (const auto& c : a.shifts) shifts.push_back(rat_json(c));
  return json{{"ell", ell}, {"shifts", shifts}, {"normalization", a.normalization}};
}

inline toric::TorusAction action_from_json(const json& j, const toric::PolarizedTuple& tuple) {
  detail::check_keys(j, {"ell", "shifts", "normalization"}, "action");
  if (!j.contains("ell")) throw SchemaError("action needs the functional 'ell'");
  std::vector<Rat> ell;
  for (const auto& e : j.at("ell")) ell.push_back(detail::rat_field(e, "action functional"));
  if (j.contains("shifts")) {
    if (j.contains("normalization") && j.at("normalization").get<std::string>() != "explicit")
      throw SchemaError("give either explicit shifts or a normalization, not both");
    toric::TorusAction a;
    a.ell = std::move(ell);
    for (const auto& c : j.at("shifts")) a.shifts.push_back(detail::rat_field(c, "action shift"));
    a.validate(tuple);
    return a;
  }
  const std::string mode = j.value("normalization", std::string("min-zero"));
  if (mode == "min-zero") return toric::min_zero_action(tuple, std::move(ell));
  if (mode == "zero-mean") return toric::zero_mean_action(tuple, std::move(ell));
  throw SchemaError("unknown normalization '" + mode + "'");
}

// ---- metric tuples ---------------------------------------------------------

inline json metric_json(const geom::MetricTuple& mt) {
  json degrees = json::array(), coefficients = json::array();
  for (const auto& u : mt.potentials()) {
    degrees.push_back(rat_json(u.degree()));
    coefficients.push_back(u.coefficients());
  }
  json j{{"degrees", degrees}, {"coefficients", coefficients}};
  if (mt.has_twist()) {
    json refs = json::array();
    for (const auto& u : mt.twist_references()) refs.push_back(u.coefficients());
    j["twist"] = json{{"coefficients", refs}, {"t", mt.twist_parameter()}};
  }
  return j;
}

inline std::vector<double> coeff_row(const json& row) {
  std::vector<double> c;
  for (const auto& v : row) {
    if (!v.is_number()) throw SchemaError("basis coefficients must be numbers");
    c.push_back(v.get<double>());
  }
  if (c.empty()) c.assign(geom::SymmetricPotential::kDefaultBasisSize, 0.0);
  return c;
}

/// Builds the metric from a {degrees?, coefficients?, twist?} object; missing
/// coefficients mean the round metric on each bundle.
inline geom::MetricTuple metric_from_json(const json& j, const toric::PolarizedTuple& tuple,
                                          const geom::QuadratureSpec& quad) {
  detail::check_keys(j, {"degrees", "coefficients", "twist"}, "metric");
  if (tuple.model() != toric::Model::cp1)
    throw ScopeError("metric tuples are defined on the line model");
  if (j.contains("degrees")) {
    if (j.at("degrees").size() != tuple.bundle_count())
      throw SchemaError("metric degrees disagree with the tuple");
    for (std::size_t i = 0; i < tuple.bundle_count(); ++i)
      if (detail::rat_field(j.at("degrees")[i], "degree") != tuple.degrees()[i])
        throw SchemaError("metric degrees disagree with the tuple");
  }
  std::vector<geom::SymmetricPotential> us;
  for (std::size_t i = 0; i < tuple.bundle_count(); ++i) {
    std::vector<double> c(geom::SymmetricPotential::kDefaultBasisSize, 0.0);
    if (j.contains("coefficients")) {
      if (j.at("coefficients").size() != tuple.bundle_count())
        throw SchemaError("need one coefficient row per bundle");
      c = coeff_row(j.at("coefficients")[i]);
    }
    us.emplace_back(tuple.degrees()[i], std::move(c));
  }
  geom::MetricTuple mt(tuple, std::move(us), quad);
  if (j.contains("twist")) {
    const auto& tw = j.at("twist");
    detail::check_keys(tw, {"coefficients", "t"}, "twist");
    std::vector<geom::SymmetricPotential> refs;
    for (std::size_t i = 0; i < tuple.bundle_count(); ++i) {
      std::vector<double> c(geom::SymmetricPotential::kDefaultBasisSize, 0.0);
      if (tw.contains("coefficients")) {
        if (tw.at("coefficients").size() != tuple.bundle_count())
          throw SchemaError("twist needs one coefficient row per bundle");
        c = coeff_row(tw.at("coefficients")[i]);
      }
      refs.emplace_back(tuple.degrees()[i], std::move(c));
    }
    mt = mt.with_twist(std::move(refs), tw.value("t", 1.0));
  }
  return mt;
}

// ---- coefficient tables -----------------------------------------------------

inline json scaled_json(const TwoPiScaled& v) {
  return json{{"value", rat_json(v.value)}, {"two_pi_power", v.tau}};
}

inline json table_json(const toric::CoefficientTable& t) {
  auto row_json = [](const toric::ExpansionRow& r) {
    return json{{"a0", scaled_json(r.a0)},
                {"a1", scaled_json(r.a1)},
                {"b0", scaled_json(r.b0)},
                {"b1", scaled_json(r.b1)}};
  };
  json bundles = json::array();
  for (const auto& r : t.bundles) bundles.push_back(row_json(r));
  return json{{"dimension", t.n},
              {"bundles", bundles},
              {"twisted", row_json(t.twisted)},
              {"action", action_json(t.action)}};
}

// ---- invariant reports -------------------------------------------------------

inline json report_json(const invariants::InvariantReport& r) {
  auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  return json{{"s_hat", rat_json(r.s_hat)},
              {"futaki",
               {{"coupled", r.fut_coupled},
                {"fano", opt(r.fut_fano)},
                {"classical", rat_json(r.fut_classical)},
                {"twisted", opt(r.fut_twisted)}}},
              {"df",
               {{"coefficient_route", rat_json(r.df_coefficient)},
                {"intersection_route", opt(r.df_intersection)}}},
              {"deltas",
               {{"coupled_vs_fano", opt(r.delta_coupled_fano)},
                {"fano_vs_intersection", opt(r.delta_fano_intersection)},
                {"coupled_vs_coefficient", r.delta_coupled_coefficient}}},
              {"tolerance", r.tolerance},
              {"agreement_ok", r.agreement_ok},
              {"normalization", action_json(r.action)},
              {"inputs",
               {{"metric_hash", r.metric_hash},
                {"quadrature", {{"panels", r.quad_panels}, {"cutoff", r.quad_cutoff}}}}}};
}

// ---- expansion reports ---------------------------------------------------------

inline json expansion_json(const bergman::ExpansionReport& r) {
  auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  json entries = json::array();
  for (const auto& e : r.entries) {
    entries.push_back(json{{"k", e.k},
                           {"dimension", e.exact_dimension.str()},
                           {"weight", rat_json(e.exact_weight)},
                           {"dimension_residual", rat_json(e.dimension_residual)},
                           {"weight_residual", rat_json(e.weight_residual)},
                           {"rho_sup_residual", e.rho_sup_residual},
                           {"equivariant_sup_residual", e.equivariant_sup_residual},
                           {"equivariant_leading", e.equivariant_leading},
                           {"weight_trace_error", e.weight_trace_error}});
  }
  return json{{"entries", entries},
              {"rho_decay_exponent", opt(r.rho_decay_exponent)},
              {"equivariant_decay_exponent", opt(r.equivariant_decay_exponent)},
              {"equivariant_leading_constant", r.equivariant_leading_constant}};
}

// ---- CSV ------------------------------------------------------------------------

inline void write_csv(const std::string& path, const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& rows) {
  std::ofstream out(path);
  if (!out) throw DomainError("cannot write " + path);
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << "\n";
  out.precision(17);
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << "\n";
  }
}

inline json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open config file " + path);
  try {
    return json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError(std::string("config is not valid JSON: ") + e.what());
  }
}

// ---- job configuration -------------------------------------------------------------

/// Parsed and schema-checked CLI job. Quadrature and tolerance may be
/// overridden from the command line after parsing.
struct JobConfig {
  std::optional<toric::PolarizedTuple> tuple;
  json action_spec;  // resolved against the tuple on demand
  json metric_spec = json::object();
  int quad_panels = 600;
  double quad_cutoff = 40.0;
  double tolerance = 1e-6;
  std::vector<int> bergman_powers = {8, 16, 32};
  solver::SolveConfig solve;
  solver::Equation solve_equation = solver::Equation::coupled_scalar;

  static JobConfig parse(const json& j) {
    detail::check_keys(j, {"tuple", "action", "metric", "quadrature", "bergman", "solve", "tolerance"},
                       "config");
    JobConfig cfg;
    if (j.contains("tuple")) cfg.tuple = tuple_from_json(j.at("tuple"));
    if (j.contains("action")) cfg.action_spec = j.at("action");
    if (j.contains("metric")) cfg.metric_spec = j.at("metric");
    if (j.contains("quadrature")) {
      const auto& q = j.at("quadrature");
      detail::check_keys(q, {"panels", "cutoff"}, "quadrature");
      cfg.quad_panels = q.value("panels", cfg.quad_panels);
      cfg.quad_cutoff = q.value("cutoff", cfg.quad_cutoff);
    }
    if (j.contains("bergman")) {
      const auto& b = j.at("bergman");
      detail::check_keys(b, {"powers"}, "bergman");
      cfg.bergman_powers.clear();
      for (const auto& k : b.at("powers")) {
        if (!k.is_number_integer()) throw SchemaError("bergman powers must be integers");
        cfg.bergman_powers.push_back(k.get<int>());
      }
    }
    if (j.contains("solve")) {
      const auto& s = j.at("solve");
      detail::check_keys(
          s, {"equation", "gauge", "max_iterations", "tolerance", "collocation_nodes", "damping"},
          "solve");
      const std::string eq = s.value("equation", std::string("coupled-scalar"));
      if (eq == "coupled-scalar")
        cfg.solve_equation = solver::Equation::coupled_scalar;
      else if (eq == "coupled-einstein")
        cfg.solve_equation = solver::Equation::coupled_einstein;
      else
        throw SchemaError("unknown equation '" + eq + "'");
      const std::string gauge = s.value("gauge", std::string("even"));
      if (gauge == "even")
        cfg.solve.gauge = solver::Gauge::even_symmetry;
      else if (gauge == "pin")
        cfg.solve.gauge = solver::Gauge::pin_coefficients;
      else
        throw SchemaError("unknown gauge '" + gauge + "'");
      cfg.solve.max_iterations = s.value("max_iterations", cfg.solve.max_iterations);
      cfg.solve.tolerance = s.value("tolerance", cfg.solve.tolerance);
      cfg.solve.collocation_nodes = s.value("collocation_nodes", cfg.solve.collocation_nodes);
      cfg.solve.initial_damping = s.value("damping", cfg.solve.initial_damping);
    }
    if (j.contains("tolerance")) {
      if (!j.at("tolerance").is_number()) throw SchemaError("tolerance must be a number");
      cfg.tolerance = j.at("tolerance").get<double>();
    }
    return cfg;
  }

  const toric::PolarizedTuple& require_tuple() const {
    if (!tuple) throw SchemaError("this command needs a 'tuple' in the config");
    return *tuple;
  }

  toric::TorusAction resolve_action() const {
    const auto& t = require_tuple();
    if (action_spec.is_null()) throw SchemaError("this command needs an 'action' in the config");
    return action_from_json(action_spec, t);
  }

  geom::QuadratureSpec make_quadrature() const {
    return geom::QuadratureSpec(quad_panels, quad_cutoff);
  }

  geom::MetricTuple resolve_metric() const {
    return metric_from_json(metric_spec, require_tuple(), make_quadrature());
  }
};

}  // namespace csck::io
