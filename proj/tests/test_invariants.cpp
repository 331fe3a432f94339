#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "csck/invariants.hpp"

using namespace csck;
using namespace csck::invariants;
using Catch::Approx;
using geom::MetricTuple;
using geom::SymmetricPotential;
using toric::PolarizedTuple;
using toric::TorusAction;

namespace {

MetricTuple round_fano() {
  return MetricTuple(PolarizedTuple::cp1({1, 1}),
                     {SymmetricPotential::round(1), SymmetricPotential::round(1)});
}

MetricTuple perturbed_fano(double amp = 0.1, int mode = 2) {
  return MetricTuple(PolarizedTuple::cp1({1, 1}),
                     {SymmetricPotential::round(1), SymmetricPotential::round(1).perturbed(mode, amp)});
}

TorusAction zero_shift_action(const PolarizedTuple& tuple, Rat ell) {
  TorusAction a;
  a.ell = {std::move(ell)};
  a.shifts.assign(tuple.bundle_count(), Rat(0));
  return a;
}

TorusAction scaled(TorusAction a, const Rat& q) {
  for (auto& e : a.ell) e *= q;
  for (auto& c : a.shifts) c *= q;
  return a;
}

}  // namespace

TEST_CASE("coupled character by direct quadrature") {
  const auto mt = round_fano();
  const auto action = zero_shift_action(mt.tuple(), 1);
  CHECK(std::abs(futaki_coupled(mt, action)) < 1e-8);

  SECTION("trivial action gives an exact zero") {
    CHECK(futaki_coupled(mt, zero_shift_action(mt.tuple(), 0)) == 0.0);
  }

  SECTION("agrees with the anticanonical formula off the solution locus") {
    const auto p = perturbed_fano();
    CHECK(std::abs(futaki_coupled(p, action) - futaki_fano(p, action)) < 1e-6);
  }
}

TEST_CASE("anticanonical-formula character") {
  const auto mt = round_fano();
  const auto action = zero_shift_action(mt.tuple(), 1);
  CHECK(std::abs(futaki_fano(mt, action)) < 1e-8);
  CHECK(futaki_fano(mt, zero_shift_action(mt.tuple(), 0)) == 0.0);

  SECTION("unchanged by a uniform Hamiltonian shift") {
    const auto p = perturbed_fano();
    TorusAction shifted = action;
    for (auto& c : shifted.shifts) c = 5;
    CHECK(std::abs(futaki_fano(p, shifted) - futaki_fano(p, action)) < 1e-10);
  }

  SECTION("scope check") {
    const MetricTuple non_fano(PolarizedTuple::cp1({1, 2}),
                               {SymmetricPotential::round(1), SymmetricPotential::round(2)});
    CHECK_THROWS_AS(futaki_fano(non_fano, zero_shift_action(non_fano.tuple(), 1)), ScopeError);
  }
}

TEST_CASE("classical character from the coefficient table") {
  const auto tuple = PolarizedTuple::cp1({1, 1});
  const auto action = zero_shift_action(tuple, 1);
  const auto table = toric::coefficient_table(tuple, action);
  CHECK(futaki_classical(table) == 0);
  CHECK(futaki_classical(toric::coefficient_table(tuple, zero_shift_action(tuple, 0))) == 0);

  SECTION("exactly invariant under a linearization shift") {
    const auto t2 = PolarizedTuple::cp1({2, 3});
    auto a = zero_shift_action(t2, 1);
    const Rat base = futaki_classical(toric::coefficient_table(t2, a));
    a.shifts[0] = Rat(7, 3);
    CHECK(futaki_classical(toric::coefficient_table(t2, a)) == base);
  }
}

TEST_CASE("coefficient-route assembly") {
  const auto tuple = PolarizedTuple::cp1({1, 1});
  const auto zero_mean = toric::zero_mean_action(tuple, {Rat(1)});
  CHECK(df_coefficient_route(toric::coefficient_table(tuple, zero_mean)) == 0);
  CHECK(df_coefficient_route(toric::coefficient_table(tuple, zero_shift_action(tuple, 0))) == 0);

  SECTION("exactly invariant under linearization shifts") {
    const auto t2 = PolarizedTuple::cp1({2, 3});
    auto a = zero_shift_action(t2, 1);
    const Rat base = df_coefficient_route(toric::coefficient_table(t2, a));
    a.shifts[0] = Rat(5);
    a.shifts[1] = Rat(-1, 2);
    CHECK(df_coefficient_route(toric::coefficient_table(t2, a)) == base);
  }

  SECTION("matches direct quadrature on perturbed tuples, any degrees") {
    struct Case {
      std::vector<Rat> degrees;
      std::vector<std::pair<int, double>> bumps;  // basis mode and amplitude per bundle
    };
    const std::vector<Case> cases = {{{1, 1}, {{2, 0.07}, {3, 0.03}}},
                                     {{2, 3}, {{3, 0.07}, {4, 0.05}}},
                                     {{2}, {{2, 0.1}}}};
    for (const auto& c : cases) {
      auto tuple_c = PolarizedTuple::cp1(c.degrees);
      std::vector<SymmetricPotential> us;
      for (std::size_t i = 0; i < c.degrees.size(); ++i)
        us.push_back(SymmetricPotential::round(c.degrees[i])
                         .perturbed(c.bumps[i].first, c.bumps[i].second));
      const MetricTuple mt(tuple_c, us);
      const auto action = toric::min_zero_action(tuple_c, {Rat(1)});
      const Rat exact = df_coefficient_route(toric::coefficient_table(tuple_c, action));
      CHECK(std::abs(futaki_coupled(mt, action) - to_double(exact)) < 1e-6);
    }
  }
}

TEST_CASE("intersection route on anticanonical tuples") {
  const auto mt = round_fano();
  const auto action = zero_shift_action(mt.tuple(), 1);
  CHECK(std::abs(df_intersection_fano(mt, action)) < 1e-8);
  CHECK(df_intersection_fano(mt, zero_shift_action(mt.tuple(), 0)) == 0.0);

  SECTION("agrees with the anticanonical formula") {
    const auto p = perturbed_fano(0.04, 3);
    CHECK(std::abs(df_intersection_fano(p, action) - futaki_fano(p, action)) < 1e-6);
  }
}

TEST_CASE("twisted character") {
  const auto base = round_fano();
  const std::vector<SymmetricPotential> round_refs = {SymmetricPotential::round(1),
                                                      SymmetricPotential::round(1)};
  const auto action = zero_shift_action(base.tuple(), 1);

  SECTION("parameter one is the untwisted character") {
    const auto p = perturbed_fano().with_twist(round_refs, 1.0);
    CHECK(futaki_twisted(p, action, 1.0) == futaki_coupled(p, action));
  }

  SECTION("references equal to the metrics kill the correction") {
    auto p = perturbed_fano(0.06, 2);
    const auto self_refs = p.potentials();
    p = p.with_twist(self_refs, 0.3);
    for (double t : {0.0, 0.4, 1.0})
      CHECK(futaki_twisted(p, action, t) == Approx(futaki_coupled(p, action)).margin(1e-14));
  }

  SECTION("vanishes on round data for every parameter") {
    const auto p = base.with_twist(round_refs, 0.5);
    for (double t : {0.0, 0.5, 1.0}) CHECK(std::abs(futaki_twisted(p, action, t)) < 1e-8);
  }

  SECTION("parameter range enforced") {
    const auto p = base.with_twist(round_refs, 0.5);
    CHECK_THROWS_AS(futaki_twisted(p, action, 1.2), DomainError);
  }
}

TEST_CASE("class invariance scans") {
  const auto base = round_fano();
  const auto action = zero_shift_action(base.tuple(), 1);
  std::vector<double> eta(SymmetricPotential::kDefaultBasisSize, 0.0);
  eta[2] = 0.5;  // keeps u_1 positive out to s = 0.2
  const std::vector<std::vector<double>> directions = {std::vector<double>(eta.size(), 0.0), eta};
  const std::vector<double> svals = {0.0, 0.05, 0.1, 0.2};

  SECTION("untwisted") {
    const double dev = invariance_scan(base, directions, svals, [&](const MetricTuple& m) {
      return futaki_coupled(m, action);
    });
    CHECK(dev < 1e-7);
  }

  SECTION("single point scan is exactly zero") {
    CHECK(invariance_scan(base, directions, {0.0}, [&](const MetricTuple& m) {
            return futaki_coupled(m, action);
          }) == 0.0);
  }

  SECTION("twisted at the midpoint parameter") {
    const auto twisted = base.with_twist(
        {SymmetricPotential::round(1), SymmetricPotential::round(1)}, 0.5);
    const double dev = invariance_scan(twisted, directions, svals, [&](const MetricTuple& m) {
      return futaki_twisted(m, action, 0.5);
    });
    CHECK(dev < 1e-7);
  }
}

TEST_CASE("linearity in the action") {
  const auto p = perturbed_fano(0.09, 2);
  const auto base_action = toric::min_zero_action(p.tuple(), {Rat(1)});
  const double f1 = futaki_coupled(p, base_action);
  const Rat c1 = df_coefficient_route(toric::coefficient_table(p.tuple(), base_action));
  for (const Rat& q : {Rat(2), Rat(-1), Rat(1, 3)}) {
    const auto qa = scaled(base_action, q);
    CHECK(futaki_coupled(p, qa) == Approx(to_double(q) * f1).margin(1e-10));
    CHECK(futaki_fano(p, qa) == Approx(to_double(q) * futaki_fano(p, base_action)).margin(1e-10));
    CHECK(df_coefficient_route(toric::coefficient_table(p.tuple(), qa)) == q * c1);
  }
}

TEST_CASE("all routes vanish on solutions") {
  const auto mt = round_fano();
  REQUIRE(geom::coupled_cscK_residual(mt).max_abs() < 1e-9);
  const auto action = zero_shift_action(mt.tuple(), 1);
  CHECK(std::abs(futaki_coupled(mt, action)) < 1e-8);
  CHECK(std::abs(futaki_fano(mt, action)) < 1e-8);
  CHECK(std::abs(df_intersection_fano(mt, action)) < 1e-8);
  CHECK(std::abs(to_double(df_coefficient_route(
            toric::coefficient_table(mt.tuple(), action)))) < 1e-8);
}

TEST_CASE("nonzero characters on a toric surface") {
  // Trapezoids sharing the fan {(1,0),(0,1),(-1,0),(-1,-1)}; the surface has
  // no vanishing character for the vertical action.
  using toric::LatticePolytope;
  const auto p0 = LatticePolytope::from_vertices(2, {{0, 0}, {2, 0}, {2, 1}, {0, 3}});
  const auto p1 = LatticePolytope::from_vertices(2, {{0, 0}, {1, 0}, {1, 1}, {0, 2}});
  const auto tuple = PolarizedTuple::toric({p0, p1});
  TorusAction action{{Rat(0), Rat(1)}, {Rat(0), Rat(0)}, "explicit"};
  const auto table = toric::coefficient_table(tuple, action);

  CHECK(futaki_classical(table) == Rat(1, 24));
  CHECK(df_coefficient_route(table) == Rat(13, 144));

  SECTION("twisted entries against independently fitted values") {
    CHECK(table.twisted.a0 == TwoPiScaled{Rat(4), 2});
    CHECK(table.twisted.a1 == TwoPiScaled{Rat(-9), 2});
    CHECK(table.twisted.b0 == TwoPiScaled{Rat(-13, 3), 2});
    CHECK(table.twisted.b1 == TwoPiScaled{Rat(17), 2});
  }

  SECTION("value is invariant under linearization shifts") {
    TorusAction shifted = action;
    shifted.shifts = {Rat(2), Rat(-1, 3)};
    const auto t2 = toric::coefficient_table(tuple, shifted);
    CHECK(futaki_classical(t2) == Rat(1, 24));
    CHECK(df_coefficient_route(t2) == Rat(13, 144));
  }

  SECTION("horizontal action sees a different character") {
    TorusAction horizontal{{Rat(1), Rat(0)}, {Rat(0), Rat(0)}, "explicit"};
    const auto th = toric::coefficient_table(tuple, horizontal);
    CHECK(futaki_classical(th) != 0);
  }
}

TEST_CASE("invariant report") {
  const auto p = perturbed_fano(0.05, 2).with_twist(
      {SymmetricPotential::round(1), SymmetricPotential::round(1)}, 0.5);
  const auto action = toric::min_zero_action(p.tuple(), {Rat(1)});
  const auto report = make_report(p, action, 1e-6);
  CHECK(report.agreement_ok);
  CHECK(report.fut_fano.has_value());
  CHECK(report.df_intersection.has_value());
  CHECK(report.fut_twisted.has_value());
  CHECK(report.s_hat == 0);
  CHECK(report.delta_coupled_coefficient < 1e-6);

  SECTION("refuses a table from a different normalization") {
    const auto other = toric::coefficient_table(p.tuple(), toric::zero_mean_action(p.tuple(), {Rat(1)}));
    CHECK_THROWS_AS(make_report(p, action, 1e-6, &other), ScopeError);
  }

  SECTION("report is reproducible") {
    const auto again = make_report(p, action, 1e-6);
    CHECK(again.fut_coupled == report.fut_coupled);
    CHECK(again.metric_hash == report.metric_hash);
  }
}
