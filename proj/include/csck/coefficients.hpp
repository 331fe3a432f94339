#pragma once

#include <optional>
#include <string>
#include <vector>

#include "csck/errors.hpp"
#include "csck/polarized.hpp"
#include "csck/polytope.hpp"
#include "csck/rational.hpp"

namespace csck::toric {

/// Top two expansion coefficients of a dimension polynomial (a0 k^n + a1 k^{n-1} + ...)
/// and of a weight polynomial (b0 k^{n+1} + b1 k^n + ...), in the (2pi)^n scale.
struct ExpansionRow {
  TwoPiScaled a0, a1, b0, b1;
};

/// All Riemann-Roch style coefficients of a tuple with a torus action,
/// including the entries of the twisted powers L_0^k (x) L^{-1}.
/// The weight sign convention is dual: the action weight of a lattice point m
/// of the bundle polytope is -(<ell,m> + k*shift), so b entries are minus
/// moment integrals.
struct CoefficientTable {
  int n = 1;
  std::vector<ExpansionRow> bundles;
  ExpansionRow twisted;
  TorusAction action;  // records which linearization produced the b entries
};

struct DimWeight {
  BigInt dimension;
  Rat total_weight;  // sum over lattice points of <ell, m> + (shift for this power)
};

namespace detail {

inline Rat lattice_weight_sum(const std::vector<IntVec>& points, const std::vector<Rat>& ell,
                              const Rat& shift) {
  Rat acc = 0;
  for (const auto& m : points) {
    Rat w = shift;
    for (std::size_t i = 0; i < ell.size(); ++i) w += ell[i] * Rat(m[i]);
    acc += w;
  }
  return acc;
}

/// Lattice points of the support-wise difference k*P0 (-) PL, enumerated
/// inside the dilation k*P0 so that degenerate differences still count.
inline std::optional<std::vector<IntVec>> twisted_lattice_points(const LatticePolytope& p0,
                                                                 const LatticePolytope& pl,
                                                                 const BigInt& k) {
  if (pl.facets().size() != p0.facets().size())
    throw ScopeError("twisted powers require polytopes sharing a normal fan");
  std::vector<LatticePolytope::Facet> diff;
  for (const auto& f : p0.facets()) {
    const LatticePolytope::Facet* match = nullptr;
    for (const auto& g : pl.facets())
      if (g.normal == f.normal) {
        match = &g;
        break;
      }
    if (!match) throw ScopeError("twisted powers require polytopes sharing a normal fan");
    diff.push_back({f.normal, Rat(k) * f.support - match->support});
  }
  std::vector<IntVec> points;
  for (const auto& m : p0.dilate(Rat(k)).lattice_points()) {
    bool inside = true;
    for (const auto& f : diff) {
      Rat v = f.support;
      for (std::size_t i = 0; i < f.normal.size(); ++i) v += Rat(f.normal[i]) * Rat(m[i]);
      if (v < 0) {
        inside = false;
        break;
      }
    }
    if (inside) points.push_back(m);
  }
  if (points.empty()) return std::nullopt;
  return points;
}

/// Exact interpolation of values f(k) by a polynomial of the given degree;
/// returns coefficients ordered from the leading power down.
inline std::vector<Rat> fit_polynomial(const std::vector<BigInt>& ks, const std::vector<Rat>& vals,
                                       int degree) {
  const int cols = degree + 1;
  if (static_cast<int>(ks.size()) != cols) throw DomainError("polynomial fit needs degree+1 samples");
  std::vector<std::vector<Rat>> m(cols, std::vector<Rat>(cols + 1));
  for (int r = 0; r < cols; ++r) {
    Rat p = 1;
    for (int c = degree; c >= 0; --c) {
      m[r][c] = p;
      p *= Rat(ks[r]);
    }
    m[r][cols] = vals[r];
  }
  for (int col = 0; col < cols; ++col) {  // exact Gaussian elimination
    int pivot = col;
    while (pivot < cols && m[pivot][col] == 0) ++pivot;
    if (pivot == cols) throw DomainError("singular interpolation system");
    std::swap(m[col], m[pivot]);
    for (int r = 0; r < cols; ++r) {
      if (r == col || m[r][col] == 0) continue;
      const Rat factor = m[r][col] / m[col][col];
      for (int c = col; c <= cols; ++c) m[r][c] -= factor * m[col][c];
    }
  }
  std::vector<Rat> coeffs(cols);
  for (int c = 0; c < cols; ++c) coeffs[c] = m[c][cols] / m[c][c];
  return coeffs;
}

inline Rat eval_polynomial(const std::vector<Rat>& coeffs, const BigInt& k) {
  Rat acc = 0;
  for (const auto& c : coeffs) acc = acc * Rat(k) + c;
  return acc;
}

}  // namespace detail

/// Exact dimension and total action weight of H^0 of L_i^k (bundle = i) or of
/// the twisted power L_0^k (x) L^{-1} (bundle = nullopt), by brute lattice
/// enumeration. The weight is the plain moment sum; the dual action of the
/// expansion coefficients carries the opposite sign.
inline DimWeight dim_weight_oracle(const PolarizedTuple& tuple, const TorusAction& action,
                                   std::optional<std::size_t> bundle, const BigInt& k) {
  action.validate(tuple);
  if (k < 1) throw DomainError("power k must be at least 1");
  if (bundle) {
    const auto points = tuple.moment_polytope(*bundle).dilate(Rat(k)).lattice_points();
    return {BigInt(points.size()),
            detail::lattice_weight_sum(points, action.ell, Rat(k) * action.shifts[*bundle])};
  }
  Rat shift = Rat(k) * action.shifts[0];
  for (const auto& c : action.shifts) shift -= c;
  const auto points =
      detail::twisted_lattice_points(tuple.moment_polytope(0), tuple.product_polytope(), k);
  if (!points)
    throw TwistInfeasibleError("twisted power has no sections at k = " + k.str());
  return {BigInt(points->size()), detail::lattice_weight_sum(*points, action.ell, shift)};
}

namespace detail {

/// Twisted expansion coefficients recovered from the exact dimension/weight
/// polynomials of the difference polytope. The counts must be honestly
/// polynomial in k; the fit is validated on extra sample points and the input
/// is rejected if they disagree.
inline ExpansionRow fit_twisted_row(const PolarizedTuple& tuple, const TorusAction& action) {
  const int n = tuple.n();
  const LatticePolytope p0 = tuple.moment_polytope(0);
  const LatticePolytope pl = tuple.product_polytope();

  BigInt k_start = 1;
  const BigInt k_limit = 1000;
  while (k_start < k_limit && !twisted_lattice_points(p0, pl, k_start)) ++k_start;
  if (k_start == k_limit) throw TwistInfeasibleError("no twisted sections found for k < 1000");
  k_start += 2;  // let the facet combinatorics stabilize

  const int dim_degree = n, weight_degree = n + 1;
  const int samples = weight_degree + 1 + 2;  // largest fit plus two validation points
  std::vector<BigInt> ks;
  std::vector<Rat> dims, weights;
  Rat shift_l = 0;
  for (const auto& c : action.shifts) shift_l += c;
  for (int j = 0; j < samples; ++j) {
    const BigInt k = k_start + j;
    const auto points = twisted_lattice_points(p0, pl, k);
    if (!points) throw TwistInfeasibleError("twisted sections vanish at k = " + k.str());
    ks.push_back(k);
    dims.push_back(Rat(points->size()));
    weights.push_back(lattice_weight_sum(*points, action.ell, Rat(k) * action.shifts[0] - shift_l));
  }

  const auto dim_poly = fit_polynomial({ks.begin(), ks.begin() + dim_degree + 1},
                                       {dims.begin(), dims.begin() + dim_degree + 1}, dim_degree);
  const auto w_poly =
      fit_polynomial({ks.begin(), ks.begin() + weight_degree + 1},
                     {weights.begin(), weights.begin() + weight_degree + 1}, weight_degree);
  for (int j = 0; j < samples; ++j) {
    if (eval_polynomial(dim_poly, ks[j]) != dims[j] || eval_polynomial(w_poly, ks[j]) != weights[j])
      throw ScopeError("twisted lattice counts are not polynomial in k; input unsupported");
  }

  ExpansionRow row;
  row.a0 = {dim_poly[0], n};
  row.a1 = {dim_poly[1], n};
  row.b0 = {-w_poly[0], n};  // dual action: expansion weight = -(moment sum)
  row.b1 = {-w_poly[1], n};
  return row;
}

}  // namespace detail

/// Assembles the full coefficient table for the tuple under the given action.
/// Untwisted entries are closed-form moment integrals of the bundle polytopes;
/// twisted entries come from the difference-polytope counting polynomials.
inline CoefficientTable coefficient_table(const PolarizedTuple& tuple, const TorusAction& action) {
  action.validate(tuple);
  CoefficientTable table;
  table.n = tuple.n();
  table.action = action;
  for (std::size_t i = 0; i < tuple.bundle_count(); ++i) {
    const LatticePolytope p = tuple.moment_polytope(i);
    ExpansionRow row;
    row.a0 = {p.volume(), table.n};
    row.a1 = {p.boundary_volume() / 2, table.n};
    row.b0 = {-p.moment_integral(action.ell, action.shifts[i]), table.n};
    row.b1 = {-p.boundary_moment_integral(action.ell, action.shifts[i]) / 2, table.n};
    if (row.a0.value <= 0) throw DomainError("bundle volume must be positive");
    table.bundles.push_back(row);
  }
  table.twisted = detail::fit_twisted_row(tuple, action);
  return table;
}

}  // namespace csck::toric
