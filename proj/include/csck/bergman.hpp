#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <vector>

#include "csck/coefficients.hpp"
#include "csck/errors.hpp"
#include "csck/geometry.hpp"
#include "csck/invariants.hpp"
#include "csck/quadrature.hpp"
#include "csck/rational.hpp"

namespace csck::bergman {

using geom::MetricTuple;
using geom::QuadratureSpec;
using toric::TorusAction;

/// One twisted kernel computation at a fixed power k: section norms of the
/// monomial basis, action eigenweights, the density and its equivariant
/// version on the quadrature grid, and the two expansion predictions.
/// Densities are stored in the (2pi)-scaled normalization.
struct BergmanSample {
  int k = 0;
  int section_count = 0;
  std::vector<double> norms;    // diagonal Gram entries N_j
  std::vector<double> weights;  // eigenvalues lambda_j of the induced action
  std::vector<double> nodes;    // t grid
  std::vector<double> rho;                      // (2pi) rho_k
  std::vector<double> rho_equivariant;          // (2pi) rho_k^{S1}
  std::vector<double> prediction;               // 1 + (S/2 - tr)/k
  std::vector<double> prediction_equivariant;   // -theta_0 - [theta_0(S/2 - tr) - theta]/k
  double trace_dimension = 0;  // int rho_k dmu_k, equals the section count
  double trace_weight = 0;     // k int rho^{S1} dmu_k = sum of eigenweights

  double sup_residual() const { return sup_diff(rho, prediction); }
  double sup_equivariant_residual() const { return sup_diff(rho_equivariant, prediction_equivariant); }

 private:
  static double sup_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double worst = 0;
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
    return worst;
  }
};

namespace detail {

/// Integer section degree k*d_0 - deg(L); the monomial exponents run 0..this.
inline long top_exponent(const MetricTuple& mt, int k) {
  Rat kd0 = Rat(k) * mt.potential(0).degree();
  Rat total = 0;
  for (const auto& u : mt.potentials()) total += u.degree();
  const Rat diff = kd0 - total;
  if (denominator(diff) != 1)
    throw ScopeError("twisted power needs an integral section degree");
  if (diff < 0) throw TwistInfeasibleError("no twisted sections at this power");
  return static_cast<long>(numerator(diff));
}

inline QuadratureSpec norm_quadrature(const MetricTuple& mt, int k) {
  const double cutoff = std::max(mt.quad().cutoff(), 10.0 + 2.0 * std::sqrt(double(k)));
  return QuadratureSpec(mt.quad().panels(), cutoff);
}

}  // namespace detail

/// Diagonal Gram entries N_j = 2pi int e^{j t - k u_0 + u} k u_0'' dt of the
/// monomial sections of the k-th twisted power.
inline std::vector<double> section_norms(const MetricTuple& mt, int k) {
  if (k < 1) throw DomainError("power k must be at least 1");
  const long top = detail::top_exponent(mt, k);
  const QuadratureSpec quad = detail::norm_quadrature(mt, k);
  std::vector<double> norms;
  norms.reserve(top + 1);
  for (long j = 0; j <= top; ++j) {
    const double nj = quad.integrate_density([&](double t) {
      const double expo = j * t - k * mt.potential(0).jet(t).u + mt.sum_jet(t).u;
      return std::exp(expo) * k * mt.potential(0).jet(t).u2;
    });
    if (!(nj > 0)) throw DomainError("section norm must be positive");
    norms.push_back(nj);
  }
  return norms;
}

/// Eigenweights of the induced dual action on monomial sections,
/// lambda_j = -(ell * j + k c_0 - sum_i c_i). The additive convention is
/// pinned by the exact constant-density reference case.
inline std::vector<double> section_weights(const MetricTuple& mt, const TorusAction& action, int k) {
  action.validate(mt.tuple());
  const long top = detail::top_exponent(mt, k);
  const double ell = to_double(action.ell[0]);
  double shift = k * to_double(action.shifts[0]);
  for (const auto& c : action.shifts) shift -= to_double(c);
  std::vector<double> weights;
  weights.reserve(top + 1);
  for (long j = 0; j <= top; ++j) weights.push_back(-(ell * j + shift));
  return weights;
}

/// Full kernel computation at power k.
inline BergmanSample sample(const MetricTuple& mt, const TorusAction& action, int k) {
  BergmanSample s;
  s.k = k;
  s.norms = section_norms(mt, k);
  s.weights = section_weights(mt, action, k);
  s.section_count = static_cast<int>(s.norms.size());

  const QuadratureSpec quad = detail::norm_quadrature(mt, k);
  s.nodes = quad.nodes();
  const double two_pi = 2.0 * std::numbers::pi;
  const double ell = to_double(action.ell[0]);
  const double c0 = to_double(action.shifts[0]);
  double c_total = 0;
  for (const auto& c : action.shifts) c_total += to_double(c);

  s.rho.reserve(s.nodes.size());
  for (double t : s.nodes) {
    const geom::Jet j0 = mt.potential(0).jet(t);
    const geom::Jet js = mt.sum_jet(t);
    double rho = 0, rho_eq = 0;
    for (long j = 0; j < s.section_count; ++j) {
      const double term = std::exp(j * t - k * j0.u + js.u);
      rho += term / s.norms[j];
      rho_eq += s.weights[j] * term / s.norms[j];
    }
    s.rho.push_back(two_pi * rho);
    s.rho_equivariant.push_back(two_pi * rho_eq / k);

    const double half_gap = geom::scalar_curvature(mt.potential(0), t) / 2 - js.u2 / j0.u2;
    const double theta0 = ell * j0.u1 + c0;
    const double theta = ell * js.u1 + c_total;
    s.prediction.push_back(1.0 + half_gap / k);
    s.prediction_equivariant.push_back(-theta0 - (theta0 * half_gap - theta) / k);
  }

  s.trace_dimension = quad.integrate_density([&](double t) {
    const geom::Jet j0 = mt.potential(0).jet(t);
    double rho = 0;
    for (long j = 0; j < s.section_count; ++j)
      rho += std::exp(j * t - k * j0.u + mt.sum_jet(t).u) / s.norms[j];
    return rho * k * j0.u2;
  });
  double weight_total = 0;
  for (double w : s.weights) weight_total += w;
  s.trace_weight = weight_total;
  return s;
}

/// Sup over the grid of |(2pi) rho^{S1} + theta_0|, the leading-order match.
inline double equivariant_leading_residual(const MetricTuple& mt, const TorusAction& action,
                                           const BergmanSample& s) {
  const double ell = to_double(action.ell[0]);
  const double c0 = to_double(action.shifts[0]);
  double worst = 0;
  for (std::size_t i = 0; i < s.nodes.size(); ++i) {
    const double theta0 = ell * mt.potential(0).jet(s.nodes[i]).u1 + c0;
    worst = std::max(worst, std::abs(s.rho_equivariant[i] + theta0));
  }
  return worst;
}

/// Least-squares slope of log(values) against log(k): the observed decay
/// order. Residuals at rounding level carry no order information, so the fit
/// is unavailable (nullopt) when any of them sits below 1e-14.
inline std::optional<double> fitted_decay_exponent(const std::vector<int>& ks,
                                                   const std::vector<double>& values) {
  if (ks.size() != values.size() || ks.size() < 2) throw DomainError("decay fit needs >= 2 points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    if (!(values[i] > 1e-14)) return std::nullopt;
    const double x = std::log(double(ks[i])), y = std::log(values[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = double(ks.size());
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

/// Per-power comparison of exact lattice data against the expansion
/// polynomials and of the computed kernels against their predictions.
struct ExpansionEntry {
  int k = 0;
  BigInt exact_dimension;
  Rat exact_weight;       // plain moment sum from the lattice oracle
  Rat dimension_residual; // (2pi)^n d_{t,k} - (a0 k^n + a1 k^{n-1}), scale divided out
  Rat weight_residual;    // (2pi)^n (-w_{t,k}) - (b0 k^{n+1} + b1 k^n), scale divided out
  double rho_sup_residual = 0;
  double equivariant_sup_residual = 0;
  double equivariant_leading = 0;
  double weight_trace_error = 0;  // relative gap between kernel trace and lattice weight
};

struct ExpansionReport {
  std::vector<ExpansionEntry> entries;
  std::optional<double> rho_decay_exponent;
  std::optional<double> equivariant_decay_exponent;
  double equivariant_leading_constant = 0;  // smallest C with sup <= C/k over the sampled ks
};

inline ExpansionReport expansion_report(const MetricTuple& mt, const TorusAction& action,
                                        const std::vector<int>& ks) {
  if (ks.size() < 3) throw SchemaError("expansion report needs at least three powers");
  const auto table = toric::coefficient_table(mt.tuple(), action);
  const int n = mt.tuple().n();
  ExpansionReport report;
  std::vector<double> rho_res, eq_res;
  std::vector<int> fit_ks;
  for (int k : ks) {
    ExpansionEntry e;
    e.k = k;
    const auto dw = toric::dim_weight_oracle(mt.tuple(), action, std::nullopt, k);
    e.exact_dimension = dw.dimension;
    e.exact_weight = dw.total_weight;
    const Rat kk(k);
    Rat kp = 1;  // k^{n-1}
    for (int p = 0; p < n - 1; ++p) kp *= kk;
    e.dimension_residual =
        Rat(dw.dimension) - (table.twisted.a0.value * kp * kk + table.twisted.a1.value * kp);
    e.weight_residual = -dw.total_weight - (table.twisted.b0.value * kp * kk * kk +
                                            table.twisted.b1.value * kp * kk);

    const BergmanSample s = sample(mt, action, k);
    if (BigInt(s.section_count) != dw.dimension)
      throw DomainError("lattice dimension disagrees with the computed section count");
    e.rho_sup_residual = s.sup_residual();
    e.equivariant_sup_residual = s.sup_equivariant_residual();
    e.equivariant_leading = equivariant_leading_residual(mt, action, s);
    const double exact_trace = -to_double(dw.total_weight);
    e.weight_trace_error = std::abs(s.trace_weight - exact_trace) /
                           std::max(1.0, std::abs(exact_trace));
    report.entries.push_back(e);
    fit_ks.push_back(k);
    rho_res.push_back(e.rho_sup_residual);
    eq_res.push_back(e.equivariant_sup_residual);
    report.equivariant_leading_constant =
        std::max(report.equivariant_leading_constant, k * e.equivariant_leading);
  }
  report.rho_decay_exponent = fitted_decay_exponent(fit_ks, rho_res);
  report.equivariant_decay_exponent = fitted_decay_exponent(fit_ks, eq_res);
  return report;
}

}  // namespace csck::bergman
