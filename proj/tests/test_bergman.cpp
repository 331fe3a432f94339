#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "csck/bergman.hpp"

using namespace csck;
using namespace csck::bergman;
using Catch::Approx;
using geom::MetricTuple;
using geom::SymmetricPotential;
using toric::PolarizedTuple;
using toric::TorusAction;

namespace {

MetricTuple round_tuple() {
  return MetricTuple(PolarizedTuple::cp1({1, 1}),
                     {SymmetricPotential::round(1), SymmetricPotential::round(1)});
}

MetricTuple perturbed_tuple() {
  return MetricTuple(PolarizedTuple::cp1({1, 1}),
                     {SymmetricPotential::round(1).perturbed(1, 0.08),
                      SymmetricPotential::round(1).perturbed(2, 0.05)});
}

TorusAction unit_action(std::size_t bundles, Rat ell = Rat(1)) {
  return TorusAction{{std::move(ell)}, std::vector<Rat>(bundles, Rat(0)), "explicit"};
}

}  // namespace

TEST_CASE("section norms") {
  const auto mt = round_tuple();
  const auto norms = section_norms(mt, 10);
  CHECK(norms.size() == 9);  // monomials of degree 0..8
  for (double n : norms) CHECK(n > 0);

  SECTION("reflection symmetry of the round weights") {
    for (std::size_t j = 0; j < norms.size(); ++j)
      CHECK(norms[j] == Approx(norms[norms.size() - 1 - j]).epsilon(1e-12));
  }

  SECTION("empty section space is infeasible") {
    CHECK_THROWS_AS(section_norms(mt, 1), TwistInfeasibleError);
  }
}

TEST_CASE("kernel density on round data") {
  const auto mt = round_tuple();
  const auto action = unit_action(2);
  for (int k : {5, 10, 20}) {
    const auto s = sample(mt, action, k);
    const double expected = double(k - 1) / k;
    double lo = 1e300, hi = -1e300;
    for (double v : s.rho) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    CHECK(hi - lo < 1e-9);                    // constancy under the symmetries
    CHECK(std::abs(hi - expected) < 1e-8);    // value pinned by the trace
    CHECK(s.sup_residual() < 1e-8);           // matches 1 + (S/2 - tr)/k exactly here
    CHECK(s.trace_dimension == Approx(double(s.section_count)).margin(1e-8));
  }
}

TEST_CASE("kernel density converges at first order on perturbed data") {
  const auto mt = perturbed_tuple();
  const auto action = unit_action(2);
  const std::vector<int> ks = {8, 16, 32, 64};
  std::vector<double> gaps;
  for (int k : ks) {
    const auto s = sample(mt, action, k);
    double worst = 0;
    for (double v : s.rho) worst = std::max(worst, std::abs(v - 1.0));
    gaps.push_back(worst);
  }
  const auto slope = fitted_decay_exponent(ks, gaps);
  REQUIRE(slope.has_value());
  CHECK(*slope == Approx(-1.0).margin(0.1));
}

TEST_CASE("equivariant kernel") {
  const auto mt = round_tuple();
  const auto action = unit_action(2);

  SECTION("leading term is minus the Hamiltonian") {
    std::vector<int> ks = {8, 16, 32};
    double c_fit = 0;
    for (int k : ks) {
      const auto s = sample(mt, action, k);
      c_fit = std::max(c_fit, k * equivariant_leading_residual(mt, action, s));
    }
    CHECK(c_fit < 4.0);  // exact round bound is 3 - 2/k
    CHECK(c_fit > 0.0);
  }

  SECTION("subleading correction decays faster than 1/k") {
    const std::vector<int> ks = {8, 16, 32, 64};
    std::vector<double> res;
    for (int k : ks) res.push_back(sample(mt, action, k).sup_equivariant_residual());
    const auto slope = fitted_decay_exponent(ks, res);
    REQUIRE(slope.has_value());
    CHECK(*slope <= -1.4);
  }

  SECTION("perturbed data keeps the expansion order") {
    const auto p = perturbed_tuple();
    const std::vector<int> ks = {8, 16, 32, 64};
    std::vector<double> res;
    for (int k : ks) res.push_back(sample(p, action, k).sup_equivariant_residual());
    const auto slope = fitted_decay_exponent(ks, res);
    REQUIRE(slope.has_value());
    CHECK(*slope <= -1.4);
  }

  SECTION("trace matches the lattice weight") {
    for (int k : {6, 11, 20}) {
      const auto s = sample(mt, action, k);
      const auto dw = toric::dim_weight_oracle(mt.tuple(), action, std::nullopt, k);
      const double exact = -to_double(dw.total_weight);  // dual action sign
      CHECK(std::abs(s.trace_weight - exact) <=
            1e-6 * std::max(1.0, std::abs(exact)));
    }
  }

  SECTION("consistent under nonzero linearization shifts") {
    TorusAction shifted{{Rat(1)}, {Rat(1, 2), Rat(-1, 4)}, "explicit"};
    const std::vector<int> ks = {8, 16, 32};
    std::vector<double> res;
    for (int k : ks) res.push_back(sample(mt, shifted, k).sup_equivariant_residual());
    const auto slope = fitted_decay_exponent(ks, res);
    REQUIRE(slope.has_value());
    CHECK(*slope <= -1.4);
  }
}

TEST_CASE("expansion report") {
  const auto mt = round_tuple();
  const auto action = unit_action(2);

  SECTION("dimension residual vanishes identically") {
    const auto report = expansion_report(mt, action, {3, 5, 9, 17, 40});
    for (const auto& e : report.entries) CHECK(e.dimension_residual == 0);
  }

  SECTION("weight residual is a bounded constant") {
    std::vector<int> ks;
    for (int k = 5; k <= 40; k += 5) ks.push_back(k);
    const auto report = expansion_report(mt, action, ks);
    for (const auto& e : report.entries) CHECK(e.weight_residual == report.entries[0].weight_residual);
  }

  SECTION("trivial action zeroes all weight data") {
    const auto report = expansion_report(mt, unit_action(2, Rat(0)), {4, 6, 8});
    for (const auto& e : report.entries) {
      CHECK(e.exact_weight == 0);
      CHECK(e.weight_residual == 0);
      CHECK(e.weight_trace_error == 0.0);
    }
  }

  SECTION("fitted orders on perturbed data") {
    const auto report = expansion_report(perturbed_tuple(), action, {8, 16, 32, 64});
    REQUIRE(report.rho_decay_exponent.has_value());
    CHECK(*report.rho_decay_exponent <= -1.8);
    REQUIRE(report.equivariant_decay_exponent.has_value());
    CHECK(*report.equivariant_decay_exponent <= -1.4);
    CHECK(report.equivariant_leading_constant < 10.0);
    for (const auto& e : report.entries) CHECK(e.weight_trace_error < 1e-6);
  }
}
