#pragma once

#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "csck/basis.hpp"
#include "csck/errors.hpp"
#include "csck/potential.hpp"

namespace csck::geom {

/// Composite Gauss-Legendre rule for integrals over t in [-cutoff, cutoff],
/// with nodes clustered through the sigma substitution so that metric
/// densities become polynomial-like integrands. Five Gauss points per panel.
/// The constructor measures its own accuracy on the round unit-mass density
/// and records it as verified_mass_error.
class QuadratureSpec {
 public:
  explicit QuadratureSpec(int panels = 600, double cutoff = 40.0)
      : panels_(panels), cutoff_(cutoff) {
    if (panels < 1 || cutoff <= 0) throw DomainError("bad quadrature parameters");
    static constexpr double gx[5] = {-0.906179845938663992797626878299,
                                     -0.538469310105683091036314420700, 0.0,
                                     0.538469310105683091036314420700,
                                     0.906179845938663992797626878299};
    static constexpr double gw[5] = {0.236926885056189087514264040720,
                                     0.478628670499366468041291514836,
                                     0.568888888888888888888888888889,
                                     0.478628670499366468041291514836,
                                     0.236926885056189087514264040720};
    const double s_lo = sigma(-cutoff), s_hi = sigma(cutoff);
    const double h = (s_hi - s_lo) / panels;
    nodes_.reserve(5 * panels);
    weights_.reserve(5 * panels);
    for (int p = 0; p < panels; ++p) {
      const double mid = s_lo + (p + 0.5) * h;
      for (int q = 0; q < 5; ++q) {
        const double s = mid + 0.5 * h * gx[q];
        nodes_.push_back(logit(s));
        weights_.push_back(0.5 * h * gw[q] / (s * (1.0 - s)));  // dt = ds / (s(1-s))
      }
    }
    const SymmetricPotential probe = SymmetricPotential::round(1);
    double mass = 0;
    for (std::size_t i = 0; i < nodes_.size(); ++i) mass += weights_[i] * probe.density(nodes_[i]);
    verified_mass_error_ = std::abs(mass - 1.0);
  }

  int panels() const { return panels_; }
  double cutoff() const { return cutoff_; }
  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<double>& weights() const { return weights_; }
  double verified_mass_error() const { return verified_mass_error_; }

  /// integral over t of f dt.
  template <typename F>
  double integrate(F&& f) const {
    double acc = 0;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      const double v = f(nodes_[i]);
      if (!std::isfinite(v)) throw DomainError("non-finite quadrature sample");
      acc += weights_[i] * v;
    }
    return acc;
  }

  double integrate_samples(std::span<const double> samples) const {
    if (samples.size() != nodes_.size()) throw DomainError("sample grid does not match the rule");
    double acc = 0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
      if (!std::isfinite(samples[i])) throw DomainError("non-finite quadrature sample");
      acc += weights_[i] * samples[i];
    }
    return acc;
  }

  /// integral against dt d(theta): the angular factor contributes 2*pi.
  template <typename F>
  double integrate_density(F&& f) const {
    return 2.0 * std::numbers::pi * integrate(std::forward<F>(f));
  }

 private:
  int panels_;
  double cutoff_;
  std::vector<double> nodes_, weights_;
  double verified_mass_error_;
};

}  // namespace csck::geom
