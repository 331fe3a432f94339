#pragma once

#include <array>
#include <cmath>
#include <vector>

namespace csck::geom {

/// Value and derivatives up to fourth order of a function of t.
struct Jet {
  double u = 0, u1 = 0, u2 = 0, u3 = 0, u4 = 0;
};

namespace detail {

/// sigma(t) = e^t / (1 + e^t) and its t-derivatives, computed without
/// cancellation at either end.
struct SigmaJet {
  double s, s1, s2, s3, s4;
  explicit SigmaJet(double t) {
    s = 1.0 / (1.0 + std::exp(-t));
    const double c = 1.0 / (1.0 + std::exp(t));  // = 1 - s, stable for t >> 0
    s1 = s * c;
    const double w = c - s;  // 1 - 2 sigma
    s2 = s1 * w;
    s3 = s2 * w - 2.0 * s1 * s1;
    s4 = s3 * w - 6.0 * s1 * s2;
  }
};

inline double softplus(double t) { return t > 0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t)); }

/// Chebyshev values T_j(x) with x-derivatives through order four, accumulated
/// against coefficients: returns sum_j c_j * d^r/dx^r T_j(x).
inline std::array<double, 5> chebyshev_series(const std::vector<double>& coeffs, double x) {
  std::array<double, 5> acc{};
  double t0[5] = {1, 0, 0, 0, 0};
  double t1[5] = {x, 1, 0, 0, 0};
  auto add = [&](const double* t, double c) {
    for (int r = 0; r < 5; ++r) acc[r] += c * t[r];
  };
  if (!coeffs.empty()) add(t0, coeffs[0]);
  if (coeffs.size() > 1) add(t1, coeffs[1]);
  for (std::size_t j = 2; j < coeffs.size(); ++j) {
    double t2[5];
    t2[0] = 2 * x * t1[0] - t0[0];
    t2[1] = 2 * t1[0] + 2 * x * t1[1] - t0[1];
    t2[2] = 4 * t1[1] + 2 * x * t1[2] - t0[2];
    t2[3] = 6 * t1[2] + 2 * x * t1[3] - t0[3];
    t2[4] = 8 * t1[3] + 2 * x * t1[4] - t0[4];
    add(t2, coeffs[j]);
    for (int r = 0; r < 5; ++r) {
      t0[r] = t1[r];
      t1[r] = t2[r];
    }
  }
  return acc;
}

}  // namespace detail

/// The perturbation basis: B_j(sigma) = T_j(2 sigma - 1), shifted Chebyshev
/// polynomials on [0, 1]. Evaluates the full series sum_j c_j B_j(sigma(t))
/// as a jet in t (chain rule through sigma).
inline Jet basis_series_jet(const std::vector<double>& coeffs, double t) {
  const detail::SigmaJet s(t);
  const auto b = detail::chebyshev_series(coeffs, 2.0 * s.s - 1.0);
  // x = 2 sigma - 1, so each sigma-derivative picks up a factor of 2.
  const double b1 = 2 * b[1], b2 = 4 * b[2], b3 = 8 * b[3], b4 = 16 * b[4];
  Jet j;
  j.u = b[0];
  j.u1 = b1 * s.s1;
  j.u2 = b2 * s.s1 * s.s1 + b1 * s.s2;
  j.u3 = b3 * s.s1 * s.s1 * s.s1 + 3 * b2 * s.s1 * s.s2 + b1 * s.s3;
  j.u4 = b4 * s.s1 * s.s1 * s.s1 * s.s1 + 6 * b3 * s.s1 * s.s1 * s.s2 +
         b2 * (3 * s.s2 * s.s2 + 4 * s.s1 * s.s3) + b1 * s.s4;
  return j;
}

inline double sigma(double t) { return 1.0 / (1.0 + std::exp(-t)); }
inline double logit(double s) { return std::log(s) - std::log1p(-s); }

}  // namespace csck::geom
