#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "csck/geometry.hpp"
#include "csck/polarized.hpp"
#include "csck/potential.hpp"
#include "csck/quadrature.hpp"

using namespace csck;
using namespace csck::geom;
using Catch::Approx;

namespace {

MetricTuple round_fano() {
  return MetricTuple(toric::PolarizedTuple::cp1({1, 1}),
                     {SymmetricPotential::round(1), SymmetricPotential::round(1)});
}

// Deterministic corpus of valid perturbed Fano tuples.
std::vector<MetricTuple> perturbed_corpus(int count, double scale, unsigned seed = 42) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<MetricTuple> out;
  const auto tuple = toric::PolarizedTuple::cp1({1, 1});
  while (static_cast<int>(out.size()) < count) {
    std::vector<SymmetricPotential> us;
    for (int b = 0; b < 2; ++b) {
      std::vector<double> c(SymmetricPotential::kDefaultBasisSize, 0.0);
      for (int j = 1; j <= 4; ++j) c[j] = scale * dist(rng) / (1 + j * j);
      us.emplace_back(Rat(1), std::move(c));
    }
    try {
      out.emplace_back(tuple, std::move(us));
    } catch (const DomainError&) {
      // amplitude broke positivity; draw again
    }
  }
  return out;
}

}  // namespace

TEST_CASE("quadrature rule verifies its own mass accuracy") {
  const QuadratureSpec spec;
  CHECK(spec.verified_mass_error() < 1e-12);
  const QuadratureSpec coarse(400, 30);
  CHECK(coarse.verified_mass_error() < 1e-10);

  CHECK(spec.integrate([](double t) {
    const double s = sigma(t);
    return s * (1 - s);
  }) == Approx(1.0).margin(1e-12));
  const auto u3 = SymmetricPotential::round(3);
  CHECK(spec.integrate([&](double t) { return u3.density(t); }) == Approx(3.0).margin(1e-10));
  const auto u1 = SymmetricPotential::round(1);
  CHECK(spec.integrate_density([&](double t) {
    return scalar_curvature(u1, t) * u1.density(t);
  }) == Approx(4 * std::numbers::pi).margin(1e-8));
  CHECK_THROWS_AS(spec.integrate([](double) { return std::nan(""); }), DomainError);
}

TEST_CASE("metric density") {
  CHECK(kahler_density(SymmetricPotential::round(1), 0.0) == Approx(0.25));
  CHECK(kahler_density(SymmetricPotential::round(2), 0.0) == Approx(0.5));

  SECTION("total mass equals the degree") {
    const QuadratureSpec spec;
    for (const auto& mt : perturbed_corpus(5, 0.1)) {
      for (const auto& u : mt.potentials()) {
        const double mass = spec.integrate([&](double t) { return u.density(t); });
        CHECK(std::abs(mass - u.degree_value()) < 1e-10);
      }
    }
  }
}

TEST_CASE("scalar curvature") {
  const auto u1 = SymmetricPotential::round(1);
  const auto u2 = SymmetricPotential::round(2);
  for (double t : {-3.0, -0.5, 0.0, 1.2, 4.0}) {
    CHECK(scalar_curvature(u1, t) == Approx(2.0).margin(1e-12));
    CHECK(scalar_curvature(u2, t) == Approx(1.0).margin(1e-12));
  }

  SECTION("curvature integral is topological over the fuzz corpus") {
    const QuadratureSpec spec;
    for (const auto& mt : perturbed_corpus(20, 0.2, 7)) {
      const auto& u = mt.potential(0);
      const double total = spec.integrate_density([&](double t) {
        return scalar_curvature(u, t) * u.density(t);
      });
      CHECK(std::abs(total - 4 * std::numbers::pi) < 1e-8);
    }
  }
}

TEST_CASE("hamiltonians") {
  CHECK(hamiltonian(SymmetricPotential::round(2), 1, 0, 0.0) == Approx(1.0));
  for (double t : {-2.0, 0.3, 5.0})
    CHECK(hamiltonian(SymmetricPotential::round(1), 0, 3.5, t) == Approx(3.5));

  SECTION("zero-mean normalization of the round Hamiltonian") {
    const auto tuple = toric::PolarizedTuple::cp1({1, 1});
    const auto action = toric::zero_mean_action(tuple, {Rat(1)});
    CHECK(action.shifts[0] == Rat(-1, 2));
    const auto u = SymmetricPotential::round(1);
    for (double t : {-1.0, 0.0, 2.0})
      CHECK(hamiltonian(u, 1, to_double(action.shifts[0]), t) == Approx(sigma(t) - 0.5));
  }

  SECTION("image spans the moment interval under the min-zero gauge") {
    const QuadratureSpec spec;
    for (const auto& mt : perturbed_corpus(5, 0.1, 3)) {
      const auto& u = mt.potential(0);
      double lo = 1e300, hi = -1e300;
      for (double t : spec.nodes()) {
        const double h = hamiltonian(u, 2, 0, t);
        lo = std::min(lo, h);
        hi = std::max(hi, h);
      }
      CHECK(lo > -1e-8);
      CHECK(hi < 2 * u.degree_value() + 1e-8);
      CHECK(hi > 2 * u.degree_value() - 1e-3);  // grid reaches near the ends
    }
  }
}

TEST_CASE("ricci potential") {
  SECTION("vanishes identically on the round tuple") {
    const auto mt = round_fano();
    const auto h = ricci_potential(mt);
    for (double t : {-10.0, -1.0, 0.0, 2.5, 10.0}) CHECK(h.value(t) == Approx(0.0).margin(1e-10));
  }

  SECTION("normalization integral holds after perturbation") {
    auto mt = round_fano();
    mt = mt.with_potentials({mt.potential(0), mt.potential(1).perturbed(2, 0.1)});
    const auto h = ricci_potential(mt);
    CHECK(std::abs(h.value(0)) > 1e-4);  // genuinely non-constant
    const double v0 = mt.quad().integrate_density([&](double t) {
      return std::exp(h.value(t)) * mt.potential(0).density(t);
    });
    CHECK(v0 == Approx(2 * std::numbers::pi * 1.0).epsilon(1e-10));
  }

  SECTION("bounded at the ends, stably in the cutoff") {
    for (double cutoff : {20.0, 30.0, 40.0}) {
      auto mt = MetricTuple(toric::PolarizedTuple::cp1({1, 1}),
                            {SymmetricPotential::round(1).perturbed(1, 0.05),
                             SymmetricPotential::round(1).perturbed(2, 0.05)},
                            QuadratureSpec(400, cutoff));
      const auto h = ricci_potential(mt);
      CHECK(std::abs(h.value(cutoff)) < 1.0);
      CHECK(std::abs(h.value(-cutoff)) < 1.0);
    }
  }

  SECTION("rejects non-anticanonical tuples") {
    const MetricTuple mt(toric::PolarizedTuple::cp1({1, 2}),
                         {SymmetricPotential::round(1), SymmetricPotential::round(2)});
    CHECK_THROWS_AS(ricci_potential(mt), ScopeError);
  }
}

TEST_CASE("coupled scalar system residuals") {
  SECTION("round tuple solves the system") {
    CHECK(coupled_cscK_residual(round_fano()).max_abs() < 1e-10);
  }

  SECTION("residual detects a perturbation") {
    auto mt = round_fano();
    mt = mt.with_potentials({mt.potential(0), mt.potential(1).perturbed(2, 0.1)});
    const auto grid = coupled_cscK_residual(mt);
    double worst_ratio = 0;
    for (double v : grid.by_bundle[0]) worst_ratio = std::max(worst_ratio, std::abs(v));
    CHECK(worst_ratio > 1e-3);
  }

  SECTION("scalar residual integrates to zero against w_0") {
    for (const auto& degrees : {std::vector<Rat>{1, 1}, std::vector<Rat>{2, 3}}) {
      auto tuple = toric::PolarizedTuple::cp1(degrees);
      std::vector<SymmetricPotential> us;
      for (std::size_t i = 0; i < degrees.size(); ++i)
        us.push_back(SymmetricPotential::round(degrees[i]).perturbed(2 + i, 0.05));
      const MetricTuple mt(tuple, us);
      const double integral = mt.quad().integrate([&](double t) {
        return scalar_residual(mt, t) * mt.potential(0).density(t);
      });
      CHECK(std::abs(integral) < 1e-8);
    }
  }
}

TEST_CASE("coupled Einstein residuals") {
  CHECK(coupled_KE_residual(round_fano()).max_abs() < 1e-10);

  SECTION("single-bundle sphere") {
    const MetricTuple mt(toric::PolarizedTuple::cp1({2}), {SymmetricPotential::round(2)});
    CHECK(coupled_KE_residual(mt).max_abs() < 1e-10);
    CHECK(coupled_cscK_residual(mt).max_abs() < 1e-10);
  }

  SECTION("Einstein solutions solve the scalar system") {
    const auto mt = round_fano();
    REQUIRE(coupled_KE_residual(mt).max_abs() < 1e-10);
    CHECK(coupled_cscK_residual(mt).max_abs() < 1e-10);
  }

  SECTION("scope check") {
    const MetricTuple mt(toric::PolarizedTuple::cp1({1, 2}),
                         {SymmetricPotential::round(1), SymmetricPotential::round(2)});
    CHECK_THROWS_AS(coupled_KE_residual(mt), ScopeError);
  }
}

TEST_CASE("twisted Einstein residuals") {
  const auto base = round_fano();
  const std::vector<SymmetricPotential> round_refs = {SymmetricPotential::round(1),
                                                      SymmetricPotential::round(1)};

  SECTION("parameter one reduces to the Einstein system") {
    const auto mt = base.with_twist(round_refs, 1.0);
    CHECK(twisted_KE_residual(mt).max_abs() < 1e-10);
  }

  SECTION("parameter zero with round references") {
    const auto mt = base.with_twist(round_refs, 0.0);
    CHECK(twisted_KE_residual(mt).max_abs() < 1e-10);
  }

  SECTION("reference density is normalized for any input") {
    auto mt = base.with_potentials({base.potential(0).perturbed(3, 0.05), base.potential(1)});
    mt = mt.with_twist(round_refs, 0.35);
    const TwistedResidual r(mt);
    CHECK(mt.quad().integrate([&](double t) { return r.density(t); }) == Approx(1.0).margin(1e-12));
  }

  SECTION("twist parameter range is enforced") {
    CHECK_THROWS_AS(base.with_twist(round_refs, 1.5), DomainError);
  }
}

TEST_CASE("hamiltonian identity") {
  const auto tuple = toric::PolarizedTuple::cp1({1, 1});
  const auto action = toric::min_zero_action(tuple, {Rat(1)});
  CHECK(hamiltonian_identity_residual(round_fano(), action) < 1e-7);
  for (const auto& mt : perturbed_corpus(5, 0.15, 11))
    CHECK(hamiltonian_identity_residual(mt, action) < 1e-7);
}

TEST_CASE("product factorization integrals") {
  const QuadratureSpec spec;
  const auto ua = SymmetricPotential::round(2);
  const auto ub = SymmetricPotential::round(3);
  CHECK(product_volume_integral(ua, ub, spec) == Approx(6.0).margin(1e-9));
  // int S w^2/2 = 2*(d_a + d_b) by the curvature integral on each factor.
  CHECK(product_scalar_integral(ua, ub, spec) == Approx(2 * (2 + 3)).margin(1e-8));
}
