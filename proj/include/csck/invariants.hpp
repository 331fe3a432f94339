#pragma once

#include <cmath>
#include <cstdint>
#include <cstring>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "csck/coefficients.hpp"
#include "csck/errors.hpp"
#include "csck/geometry.hpp"
#include "csck/polarized.hpp"
#include "csck/rational.hpp"

namespace csck::invariants {

using geom::MetricTuple;
using geom::SymmetricPotential;
using toric::CoefficientTable;
using toric::TorusAction;

namespace detail {

struct ActionData {
  double ell;
  std::vector<double> shifts;
  double shift_total;
};

inline ActionData unpack(const MetricTuple& mt, const TorusAction& action) {
  action.validate(mt.tuple());
  ActionData a;
  a.ell = to_double(action.ell[0]);
  a.shift_total = 0;
  for (const auto& c : action.shifts) {
    a.shifts.push_back(to_double(c));
    a.shift_total += a.shifts.back();
  }
  return a;
}

inline double theta(const MetricTuple& mt, const ActionData& a, std::size_t i, double t) {
  return a.ell * mt.potential(i).jet(t).u1 + a.shifts[i];
}

/// Average of the total Hamiltonian against the anticanonical measure.
inline double anticanonical_average(const MetricTuple& mt, const ActionData& a) {
  const double mass =
      mt.quad().integrate([&](double t) { return geom::anticanonical_density(mt, t); });
  const double num = mt.quad().integrate([&](double t) {
    return (a.ell * mt.sum_jet(t).u1 + a.shift_total) * geom::anticanonical_density(mt, t);
  });
  return num / mass;
}

}  // namespace detail

/// The coupled Futaki character evaluated by direct quadrature: volume-ratio
/// pairings for i >= 1 plus the scalar-equation pairing against theta_0.
inline double futaki_coupled(const MetricTuple& mt, const TorusAction& action) {
  const auto a = detail::unpack(mt, action);
  const double d0 = to_double(mt.potential(0).degree());
  double total = 0;
  for (std::size_t i = 1; i < mt.bundle_count(); ++i)
    total += mt.quad().integrate(
        [&](double t) { return detail::theta(mt, a, i, t) * geom::ratio_residual(mt, i, t); });
  total += mt.quad().integrate([&](double t) {
    return detail::theta(mt, a, 0, t) * geom::scalar_residual(mt, t) *
           mt.potential(0).jet(t).u2;
  }) / d0;
  return total;
}

/// The anticanonical-case formula: normalized Hamiltonian volume pairings
/// minus the average against the canonical measure.
inline double futaki_fano(const MetricTuple& mt, const TorusAction& action) {
  mt.require_fano("futaki_fano");
  const auto a = detail::unpack(mt, action);
  double total = 0;
  for (std::size_t i = 0; i < mt.bundle_count(); ++i) {
    total += mt.quad().integrate([&](double t) {
      return detail::theta(mt, a, i, t) * mt.potential(i).jet(t).u2;
    }) / to_double(mt.potential(i).degree());
  }
  return total - detail::anticanonical_average(mt, a);
}

/// The classical character of L_0 assembled from expansion coefficients.
inline Rat futaki_classical(const CoefficientTable& table) {
  const auto& r = table.bundles.at(0);
  return ((r.a1 * r.b0 - r.a0 * r.b1) / (r.a0 * r.a0)).as_plain_rational();
}

/// The exact coefficient-route assembly of the coupled character:
/// classical term minus the b_0/a_0 corrections plus the twisted-power term.
inline Rat df_coefficient_route(const CoefficientTable& table) {
  Rat total = futaki_classical(table);
  for (const auto& r : table.bundles) total -= (r.b0 / r.a0).as_plain_rational();
  const auto& t = table.twisted;
  total += ((t.a1 * t.b0 - t.a0 * t.b1) / (t.a0 * t.a0)).as_plain_rational();
  return total;
}

/// The intersection-theoretic route for product-type degenerations of an
/// anticanonical tuple: leading weight coefficients of the polarization
/// powers against the exact self-intersections, plus the relative-canonical
/// term evaluated as the canonical-measure average.
inline double df_intersection_fano(const MetricTuple& mt, const TorusAction& action) {
  mt.require_fano("df_intersection_fano");
  const auto a = detail::unpack(mt, action);
  const int n = mt.tuple().n();
  double first = 0;
  for (std::size_t i = 0; i < mt.bundle_count(); ++i) {
    // Total-space power: L_i^{n+1} = -(n+1)! (2pi)^{-n} int theta_i w_i^n / n!.
    const double power = -std::tgamma(n + 2) * mt.quad().integrate([&](double t) {
      return detail::theta(mt, a, i, t) * mt.potential(i).jet(t).u2;
    });
    const double base = to_double(toric::intersection_number(mt.tuple(), {i}));
    first += power / base;
  }
  first /= -(n + 1.0);
  return first - detail::anticanonical_average(mt, a);
}

/// Twisted character: the coupled character plus the reference correction.
inline double futaki_twisted(const MetricTuple& mt, const TorusAction& action, double t_twist) {
  if (t_twist < 0 || t_twist > 1) throw DomainError("twist parameter must lie in [0, 1]");
  if (!mt.has_twist()) throw ScopeError("twisted character needs twist references");
  const auto a = detail::unpack(mt, action);
  double correction = 0;
  for (std::size_t i = 0; i < mt.bundle_count(); ++i) {
    correction += mt.quad().integrate([&](double t) {
      return detail::theta(mt, a, i, t) *
             (mt.twist_references()[i].jet(t).u2 - mt.potential(i).jet(t).u2);
    }) / to_double(mt.potential(i).degree());
  }
  return futaki_coupled(mt, action) - (1.0 - t_twist) * correction;
}

/// Moves every potential along phi_i + s * eta_i and reports the largest
/// deviation of the functional from its base value; class invariance means
/// the result stays at quadrature noise.
inline double invariance_scan(const MetricTuple& base, const std::vector<std::vector<double>>& directions,
                              const std::vector<double>& s_values,
                              const std::function<double(const MetricTuple&)>& functional) {
  if (directions.size() != base.bundle_count())
    throw SchemaError("need one scan direction per bundle");
  const double reference = functional(base);
  double worst = 0;
  for (double s : s_values) {
    std::vector<SymmetricPotential> moved;
    for (std::size_t i = 0; i < base.bundle_count(); ++i) {
      std::vector<double> c = base.potential(i).coefficients();
      if (c.size() < directions[i].size()) c.resize(directions[i].size(), 0.0);
      for (std::size_t j = 0; j < directions[i].size(); ++j) c[j] += s * directions[i][j];
      moved.push_back(base.potential(i).with_coefficients(std::move(c)));
    }
    const MetricTuple mt = base.with_potentials(std::move(moved));
    worst = std::max(worst, std::abs(functional(mt) - reference));
  }
  return worst;
}

/// Self-describing record of every computed route for one (tuple, action,
/// metric) instance. Quadrature routes are doubles, lattice routes exact.
struct InvariantReport {
  Rat s_hat;
  double fut_coupled = 0;
  std::optional<double> fut_fano;
  Rat fut_classical;
  Rat df_coefficient;
  std::optional<double> df_intersection;
  std::optional<double> fut_twisted;
  double tolerance = 1e-6;
  std::optional<double> delta_coupled_fano;
  std::optional<double> delta_fano_intersection;
  double delta_coupled_coefficient = 0;
  bool agreement_ok = true;
  TorusAction action;
  std::uint64_t metric_hash = 0;
  int quad_panels = 0;
  double quad_cutoff = 0;
};

namespace detail {

inline void hash_mix(std::uint64_t& h, std::uint64_t v) {
  h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
}

inline std::uint64_t metric_hash(const MetricTuple& mt) {
  std::uint64_t h = 1469598103934665603ull;
  for (const auto& u : mt.potentials()) {
    hash_mix(h, std::hash<std::string>{}(rat_to_string(u.degree())));
    for (double c : u.coefficients()) {
      std::uint64_t bits;
      static_assert(sizeof(bits) == sizeof(c));
      std::memcpy(&bits, &c, sizeof(bits));
      hash_mix(h, bits);
    }
  }
  return h;
}

}  // namespace detail

/// Builds the full report. When a precomputed table is supplied it must have
/// been produced under the same action; comparing routes across linearization
/// gauges is refused.
inline InvariantReport make_report(const MetricTuple& mt, const TorusAction& action,
                                   double tolerance = 1e-6,
                                   const CoefficientTable* table = nullptr,
                                   std::optional<double> twist_parameter = std::nullopt) {
  action.validate(mt.tuple());
  CoefficientTable local;
  if (table) {
    if (table->action.ell != action.ell || table->action.shifts != action.shifts)
      throw ScopeError("coefficient table was computed under a different normalization");
    local = *table;
  } else {
    local = toric::coefficient_table(mt.tuple(), action);
  }

  InvariantReport r;
  r.s_hat = toric::s_hat(mt.tuple());
  r.action = action;
  r.tolerance = tolerance;
  r.fut_coupled = futaki_coupled(mt, action);
  r.fut_classical = futaki_classical(local);
  r.df_coefficient = df_coefficient_route(local);
  if (mt.is_fano()) {
    r.fut_fano = futaki_fano(mt, action);
    r.df_intersection = df_intersection_fano(mt, action);
    r.delta_coupled_fano = std::abs(r.fut_coupled - *r.fut_fano);
    r.delta_fano_intersection = std::abs(*r.fut_fano - *r.df_intersection);
  }
  if (mt.has_twist())
    r.fut_twisted = futaki_twisted(mt, action, twist_parameter.value_or(mt.twist_parameter()));
  r.delta_coupled_coefficient = std::abs(r.fut_coupled - to_double(r.df_coefficient));
  r.agreement_ok = r.delta_coupled_coefficient < tolerance &&
                   (!r.delta_coupled_fano || *r.delta_coupled_fano < tolerance) &&
                   (!r.delta_fano_intersection || *r.delta_fano_intersection < tolerance);
  r.metric_hash = detail::metric_hash(mt);
  r.quad_panels = mt.quad().panels();
  r.quad_cutoff = mt.quad().cutoff();
  return r;
}

}  // namespace csck::invariants
