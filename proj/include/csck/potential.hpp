#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "csck/basis.hpp"
#include "csck/errors.hpp"
#include "csck/rational.hpp"

namespace csck::geom {

/// An S^1-invariant Kahler potential on the line, u(t) = d*log(1+e^t) + p(sigma(t))
/// with p a finite Chebyshev series. The metric density is u''(t) and the
/// moment map u' sweeps (0, d).
class SymmetricPotential {
 public:
  static constexpr int kDefaultBasisSize = 13;  // constant term plus T_1..T_12

  SymmetricPotential(Rat degree, std::vector<double> coefficients)
      : degree_(std::move(degree)), coefficients_(std::move(coefficients)) {
    if (degree_ <= 0) throw DomainError("potential degree must be positive");
    degree_d_ = to_double(degree_);
  }

  /// The Fubini-Study style profile of the given degree (no perturbation).
  static SymmetricPotential round(Rat degree, int basis_size = kDefaultBasisSize) {
    return SymmetricPotential(std::move(degree), std::vector<double>(basis_size, 0.0));
  }

  const Rat& degree() const { return degree_; }
  double degree_value() const { return degree_d_; }
  const std::vector<double>& coefficients() const { return coefficients_; }

  SymmetricPotential with_coefficients(std::vector<double> coefficients) const {
    return SymmetricPotential(degree_, std::move(coefficients));
  }

  SymmetricPotential perturbed(int basis_index, double amplitude) const {
    std::vector<double> c = coefficients_;
    if (basis_index >= static_cast<int>(c.size())) c.resize(basis_index + 1, 0.0);
    c[basis_index] += amplitude;
    return with_coefficients(std::move(c));
  }

  Jet jet(double t) const {
    const detail::SigmaJet s(t);
    Jet j = basis_series_jet(coefficients_, t);
    j.u += degree_d_ * detail::softplus(t);
    j.u1 += degree_d_ * s.s;
    j.u2 += degree_d_ * s.s1;
    j.u3 += degree_d_ * s.s2;
    j.u4 += degree_d_ * s.s3;
    return j;
  }

  double value(double t) const { return jet(t).u; }
  double slope(double t) const { return jet(t).u1; }
  double density(double t) const { return jet(t).u2; }

 private:
  Rat degree_;
  double degree_d_;
  std::vector<double> coefficients_;
};

}  // namespace csck::geom
