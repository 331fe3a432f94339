#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "csck/errors.hpp"
#include "csck/polarized.hpp"
#include "csck/potential.hpp"
#include "csck/quadrature.hpp"
#include "csck/rational.hpp"

namespace csck::geom {

/// A tuple of invariant metrics on the line model: one symmetric potential per
/// bundle, optional fixed twist reference potentials, and the quadrature rule
/// used by every integral evaluator. Immutable after construction; the
/// constructor enforces degree matching, metric positivity on the grid and the
/// boundary slope asymptotics.
class MetricTuple {
 public:
  MetricTuple(toric::PolarizedTuple tuple, std::vector<SymmetricPotential> potentials,
              QuadratureSpec quad = QuadratureSpec())
      : tuple_(std::move(tuple)), potentials_(std::move(potentials)), quad_(std::move(quad)) {
    validate();
  }

  MetricTuple with_twist(std::vector<SymmetricPotential> references, double t) const {
    if (t < 0 || t > 1) throw DomainError("twist parameter must lie in [0, 1]");
    if (references.size() != potentials_.size())
      throw SchemaError("twist needs one reference potential per bundle");
    for (std::size_t i = 0; i < references.size(); ++i)
      if (references[i].degree() != potentials_[i].degree())
        throw SchemaError("twist reference degrees must match the tuple");
    MetricTuple out = *this;
    out.twist_refs_ = std::move(references);
    out.twist_t_ = t;
    return out;
  }

  MetricTuple with_potentials(std::vector<SymmetricPotential> potentials) const {
    MetricTuple out = *this;
    out.potentials_ = std::move(potentials);
    out.validate();
    return out;
  }

  const toric::PolarizedTuple& tuple() const { return tuple_; }
  const std::vector<SymmetricPotential>& potentials() const { return potentials_; }
  const SymmetricPotential& potential(std::size_t i) const { return potentials_.at(i); }
  std::size_t bundle_count() const { return potentials_.size(); }
  const QuadratureSpec& quad() const { return quad_; }
  bool has_twist() const { return !twist_refs_.empty(); }
  const std::vector<SymmetricPotential>& twist_references() const { return twist_refs_; }
  double twist_parameter() const { return twist_t_; }

  bool is_fano() const { return tuple_.is_anticanonical(); }
  void require_fano(const char* who) const {
    if (!is_fano()) throw ScopeError(std::string(who) + " needs the anticanonically polarized case");
  }

  /// Jet of the sum potential u = u_0 + ... + u_m.
  Jet sum_jet(double t) const {
    Jet acc;
    for (const auto& u : potentials_) {
      const Jet j = u.jet(t);
      acc.u += j.u;
      acc.u1 += j.u1;
      acc.u2 += j.u2;
      acc.u3 += j.u3;
      acc.u4 += j.u4;
    }
    return acc;
  }

  Jet twist_sum_jet(double t) const {
    if (!has_twist()) throw ScopeError("metric tuple carries no twist references");
    Jet acc;
    for (const auto& u : twist_refs_) {
      const Jet j = u.jet(t);
      acc.u += j.u;
      acc.u1 += j.u1;
      acc.u2 += j.u2;
    }
    return acc;
  }

 private:
  toric::PolarizedTuple tuple_;
  std::vector<SymmetricPotential> potentials_;
  std::vector<SymmetricPotential> twist_refs_;
  double twist_t_ = 1.0;
  QuadratureSpec quad_;

  void validate() const {
    if (tuple_.model() != toric::Model::cp1)
      throw ScopeError("metric tuples are defined on the line model");
    if (potentials_.size() != tuple_.bundle_count())
      throw SchemaError("need one potential per bundle");
    for (std::size_t i = 0; i < potentials_.size(); ++i)
      if (potentials_[i].degree() != tuple_.degrees()[i])
        throw SchemaError("potential degree does not match its bundle");
    for (const auto& u : potentials_) {
      for (double t : quad_.nodes())
        if (!(u.jet(t).u2 > 0)) throw DomainError("metric positivity fails on the grid");
      const double lo = u.slope(-quad_.cutoff());
      const double hi = u.slope(quad_.cutoff());
      const double slack = 1e3 * std::exp(-quad_.cutoff()) + 1e-12;
      if (std::abs(lo) > slack || std::abs(hi - u.degree_value()) > slack)
        throw DomainError("potential slope does not reach its asymptotic range");
    }
  }
};

inline double kahler_density(const SymmetricPotential& u, double t) { return u.jet(t).u2; }

/// Scalar curvature S = -(log u'')'' / u'' in the Kahler normalization.
inline double scalar_curvature(const SymmetricPotential& u, double t) {
  const Jet j = u.jet(t);
  if (!(j.u2 > 0)) throw DomainError("scalar curvature needs u'' > 0");
  const double dlog2 = j.u4 / j.u2 - (j.u3 / j.u2) * (j.u3 / j.u2);
  return -dlog2 / j.u2;
}

/// Hamiltonian of the action with weight ell and linearization constant c.
inline double hamiltonian(const SymmetricPotential& u, double ell, double c, double t) {
  return ell * u.jet(t).u1 + c;
}

/// Anticanonical density e^{-u(t)+t} in the coordinate normalization (the e^t
/// factor is the Jacobian of the fibre coordinate).
inline double anticanonical_density(const MetricTuple& mt, double t) {
  return std::exp(-mt.sum_jet(t).u + t);
}

struct RicciPotential {
  double constant;                        // additive normalization b
  std::function<double(double)> value;    // bounded potential h_0(t)
};

/// Solves Ric(w_0) - w = i dd-bar h_0 with the volume normalization
/// int e^{h_0} w_0 = V_0; only defined in the anticanonical case, where h_0
/// stays bounded.
inline RicciPotential ricci_potential(const MetricTuple& mt) {
  mt.require_fano("ricci potential");
  const double mass = mt.quad().integrate([&](double t) { return anticanonical_density(mt, t); });
  const double b = std::log(to_double(mt.potential(0).degree()) / mass);
  const SymmetricPotential u0 = mt.potential(0);
  return {b, [&mt, u0, b](double t) {
            return -std::log(u0.jet(t).u2) - mt.sum_jet(t).u + t + b;
          }};
}

/// Pointwise scalar equation residual S(u_0) - tr_{w_0}(w) - s_hat.
inline double scalar_residual(const MetricTuple& mt, double t) {
  const Jet j0 = mt.potential(0).jet(t);
  if (!(j0.u2 > 0)) throw DomainError("residual needs u_0'' > 0");
  const double trace = mt.sum_jet(t).u2 / j0.u2;
  return scalar_curvature(mt.potential(0), t) - trace - to_double(toric::s_hat(mt.tuple()));
}

/// Pointwise volume-ratio residual u_i''/d_i - u_0''/d_0 for i >= 1.
inline double ratio_residual(const MetricTuple& mt, std::size_t i, double t) {
  if (i == 0 || i >= mt.bundle_count()) throw SchemaError("ratio residual index out of range");
  return mt.potential(i).jet(t).u2 / to_double(mt.potential(i).degree()) -
         mt.potential(0).jet(t).u2 / to_double(mt.potential(0).degree());
}

/// Ricci-matching residual Ric(w_i) - w for the anticanonical system.
inline double ke_residual(const MetricTuple& mt, std::size_t i, double t) {
  mt.require_fano("coupled Einstein residual");
  const Jet j = mt.potential(i).jet(t);
  if (!(j.u2 > 0)) throw DomainError("residual needs u_i'' > 0");
  const double ricci = -(j.u4 / j.u2 - (j.u3 / j.u2) * (j.u3 / j.u2));
  return ricci - mt.sum_jet(t).u2;
}

/// Residuals of the twisted Einstein system at the tuple's twist parameter:
/// u_i''/d_i minus the normalized reference density.
class TwistedResidual {
 public:
  explicit TwistedResidual(const MetricTuple& mt) : mt_(&mt) {
    if (!mt.has_twist()) throw ScopeError("twisted residual needs twist references");
    mt.require_fano("twisted residual");
    mass_ = mt.quad().integrate([&](double t) { return unnormalized(t); });
  }

  double density(double t) const { return unnormalized(t) / mass_; }

  double operator()(std::size_t i, double t) const {
    return mt_->potential(i).jet(t).u2 / to_double(mt_->potential(i).degree()) - density(t);
  }

 private:
  const MetricTuple* mt_;
  double mass_;

  double unnormalized(double t) const {
    const double s = mt_->twist_parameter();
    return std::exp(-s * mt_->sum_jet(t).u - (1.0 - s) * mt_->twist_sum_jet(t).u + t);
  }
};

/// All residuals of the coupled system sampled on the tuple's quadrature grid.
struct ResidualGrid {
  std::vector<double> nodes;
  std::vector<double> scalar;                // empty for the pure Einstein system
  std::vector<std::vector<double>> by_bundle;  // ratio or Ricci residuals

  double max_abs() const {
    double m = 0;
    for (double v : scalar) m = std::max(m, std::abs(v));
    for (const auto& row : by_bundle)
      for (double v : row) m = std::max(m, std::abs(v));
    return m;
  }
};

inline ResidualGrid coupled_cscK_residual(const MetricTuple& mt) {
  ResidualGrid g;
  g.nodes = mt.quad().nodes();
  g.scalar.reserve(g.nodes.size());
  for (double t : g.nodes) g.scalar.push_back(scalar_residual(mt, t));
  for (std::size_t i = 1; i < mt.bundle_count(); ++i) {
    std::vector<double> row;
    row.reserve(g.nodes.size());
    for (double t : g.nodes) row.push_back(ratio_residual(mt, i, t));
    g.by_bundle.push_back(std::move(row));
  }
  return g;
}

inline ResidualGrid coupled_KE_residual(const MetricTuple& mt) {
  ResidualGrid g;
  g.nodes = mt.quad().nodes();
  for (std::size_t i = 0; i < mt.bundle_count(); ++i) {
    std::vector<double> row;
    row.reserve(g.nodes.size());
    for (double t : g.nodes) row.push_back(ke_residual(mt, i, t));
    g.by_bundle.push_back(std::move(row));
  }
  return g;
}

inline ResidualGrid twisted_KE_residual(const MetricTuple& mt) {
  const TwistedResidual r(mt);
  ResidualGrid g;
  g.nodes = mt.quad().nodes();
  for (std::size_t i = 0; i < mt.bundle_count(); ++i) {
    std::vector<double> row;
    row.reserve(g.nodes.size());
    for (double t : g.nodes) row.push_back(r(i, t));
    g.by_bundle.push_back(std::move(row));
  }
  return g;
}

/// Deviation of Delta theta + theta + w(h) from its average value; the three
/// terms are computed independently and the combination must be flat in t.
/// Returns the sup over the grid of |combination - quadrature constant|.
inline double hamiltonian_identity_residual(const MetricTuple& mt, const toric::TorusAction& action) {
  mt.require_fano("hamiltonian identity");
  action.validate(mt.tuple());
  const double ell = to_double(action.ell[0]);
  double shift_total = 0;
  for (const auto& c : action.shifts) shift_total += to_double(c);

  auto theta_sum = [&](double t) { return ell * mt.sum_jet(t).u1 + shift_total; };
  const double mass = mt.quad().integrate([&](double t) { return anticanonical_density(mt, t); });
  const double constant =
      mt.quad().integrate([&](double t) { return theta_sum(t) * anticanonical_density(mt, t); }) /
      mass;

  double worst = 0;
  for (double t : mt.quad().nodes()) {
    const Jet j = mt.sum_jet(t);
    const double laplacian = ell * j.u3 / j.u2;           // Delta_w of theta_w
    const double gradient = ell * (-j.u3 / j.u2 - j.u1 + 1.0);  // w(h_w)
    worst = std::max(worst, std::abs(laplacian + theta_sum(t) + gradient - constant));
  }
  return worst;
}

/// Factorized integrals for a product of two line factors: the total volume
/// int w^2/2 and the curvature integral int S w^2/2, both in the (2pi)^2 scale
/// divided out. Used to cross-check coefficient tables on the product model.
inline double product_volume_integral(const SymmetricPotential& ua, const SymmetricPotential& ub,
                                      const QuadratureSpec& quad) {
  const double ma = quad.integrate([&](double t) { return ua.density(t); });
  const double mb = quad.integrate([&](double t) { return ub.density(t); });
  return ma * mb;
}

inline double product_scalar_integral(const SymmetricPotential& ua, const SymmetricPotential& ub,
                                      const QuadratureSpec& quad) {
  const double ma = quad.integrate([&](double t) { return ua.density(t); });
  const double mb = quad.integrate([&](double t) { return ub.density(t); });
  const double sa = quad.integrate([&](double t) { return scalar_curvature(ua, t) * ua.density(t); });
  const double sb = quad.integrate([&](double t) { return scalar_curvature(ub, t) * ub.density(t); });
  return sa * mb + ma * sb;
}

}  // namespace csck::geom
