#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "csck/errors.hpp"
#include "csck/geometry.hpp"
#include "csck/polarized.hpp"
#include "csck/potential.hpp"

namespace csck::solver {

using geom::MetricTuple;
using geom::SymmetricPotential;

enum class Gauge { even_symmetry, pin_coefficients };
enum class Equation { coupled_scalar, coupled_einstein };
enum class Status { converged, max_iterations, positivity_loss, stalled };

inline std::string status_name(Status s) {
  switch (s) {
    case Status::converged: return "converged";
    case Status::max_iterations: return "max-iterations";
    case Status::positivity_loss: return "positivity-loss";
    case Status::stalled: return "stalled";
  }
  return "?";
}

struct SolveConfig {
  int collocation_nodes = 64;
  int max_iterations = 30;
  double tolerance = 1e-11;
  double initial_damping = 1e-8;
  double max_damping = 1e10;
  double acceptance_slack = 1e-12;  // accepted steps may not grow the residual beyond this
  Gauge gauge = Gauge::even_symmetry;

  void validate(int basis_size) const {
    if (tolerance <= 0) throw SchemaError("solver tolerance must be positive");
    if (collocation_nodes < 4 * basis_size)
      throw SchemaError("collocation must overdetermine the basis (nodes >= 4*(J+1))");
    if (max_iterations < 1) throw SchemaError("need at least one iteration");
  }
};

struct TraceRow {
  int iteration = 0;
  double residual = 0;  // max over collocation nodes and equations
  double damping = 0;
};

struct SolveResult {
  MetricTuple solution;
  Status status = Status::converged;
  std::vector<TraceRow> trace;
  double final_residual = 0;
  int iterations = 0;
};

namespace detail {

/// Maps the free perturbation coefficients (gauge directions removed) to and
/// from a flat parameter vector. The constant mode is never a degree of
/// freedom; the even gauge keeps only reflection-symmetric modes, the pinning
/// gauge freezes the first odd mode of u_0 to kill the translation freedom.
struct Parameterization {
  std::vector<std::pair<std::size_t, int>> slots;  // (bundle, basis index)

  Parameterization(const MetricTuple& mt, Gauge gauge) {
    for (std::size_t i = 0; i < mt.bundle_count(); ++i) {
      const int size = static_cast<int>(mt.potential(i).coefficients().size());
      for (int j = 1; j < size; ++j) {
        if (gauge == Gauge::even_symmetry && j % 2 != 0) continue;
        if (gauge == Gauge::pin_coefficients && i == 0 && j == 1) continue;
        slots.emplace_back(i, j);
      }
    }
  }

  Eigen::VectorXd pack(const MetricTuple& mt) const {
    Eigen::VectorXd x(slots.size());
    for (std::size_t s = 0; s < slots.size(); ++s)
      x[s] = mt.potential(slots[s].first).coefficients()[slots[s].second];
    return x;
  }

  std::vector<SymmetricPotential> unpack(const MetricTuple& mt, const Eigen::VectorXd& x) const {
    std::vector<std::vector<double>> coeffs;
    for (const auto& u : mt.potentials()) coeffs.push_back(u.coefficients());
    for (std::size_t s = 0; s < slots.size(); ++s) coeffs[slots[s].first][slots[s].second] = x[s];
    std::vector<SymmetricPotential> out;
    for (std::size_t i = 0; i < coeffs.size(); ++i)
      out.push_back(mt.potential(i).with_coefficients(coeffs[i]));
    return out;
  }
};

/// Residual stack for one equation system over fixed collocation nodes.
/// Evaluates raw potentials without re-running the full tuple validation;
/// positivity is checked pointwise and loss is reported by exception.
class ResidualStack {
 public:
  ResidualStack(const MetricTuple& mt, Equation eq, int nodes)
      : degrees_(), eq_(eq), s_hat_(to_double(toric::s_hat(mt.tuple()))) {
    for (const auto& u : mt.potentials()) degrees_.push_back(u.degree_value());
    for (int q = 0; q < nodes; ++q) nodes_.push_back(geom::logit((q + 1.0) / (nodes + 1.0)));
    if (eq == Equation::coupled_einstein && !mt.is_fano())
      throw ScopeError("the Einstein system needs the anticanonically polarized case");
  }

  const std::vector<double>& nodes() const { return nodes_; }

  Eigen::VectorXd operator()(const std::vector<SymmetricPotential>& us) const {
    const std::size_t m1 = us.size();
    // Per node: the scalar row plus m ratio rows, or m+1 Ricci rows.
    Eigen::VectorXd f(nodes_.size() * m1);
    std::size_t row = 0;
    std::vector<geom::Jet> jets(m1);
    for (double t : nodes_) {
      double sum2 = 0;
      for (std::size_t i = 0; i < m1; ++i) {
        jets[i] = us[i].jet(t);
        if (!(jets[i].u2 > 0)) throw DomainError("positivity lost at a collocation node");
        sum2 += jets[i].u2;
      }
      if (eq_ == Equation::coupled_scalar) {
        const geom::Jet& j0 = jets[0];
        const double scal = -(j0.u4 / j0.u2 - (j0.u3 / j0.u2) * (j0.u3 / j0.u2)) / j0.u2;
        f[row++] = scal - sum2 / j0.u2 - s_hat_;
        for (std::size_t i = 1; i < m1; ++i)
          f[row++] = jets[i].u2 / degrees_[i] - j0.u2 / degrees_[0];
      } else {
        for (std::size_t i = 0; i < m1; ++i) {
          const geom::Jet& j = jets[i];
          f[row++] = -(j.u4 / j.u2 - (j.u3 / j.u2) * (j.u3 / j.u2)) - sum2;
        }
      }
    }
    return f;
  }

 private:
  std::vector<double> degrees_;
  std::vector<double> nodes_;
  Equation eq_;
  double s_hat_;
};

}  // namespace detail

/// Damped Gauss-Newton over the perturbation coefficients: forward-difference
/// Jacobian, normal equations with Levenberg regularization, and step
/// acceptance that never lets the max-residual grow.
inline SolveResult solve(const MetricTuple& initial, Equation eq, const SolveConfig& cfg) {
  int basis_size = 0;
  for (const auto& u : initial.potentials())
    basis_size = std::max(basis_size, static_cast<int>(u.coefficients().size()));
  cfg.validate(basis_size);

  const detail::Parameterization param(initial, cfg.gauge);
  const detail::ResidualStack residual(initial, eq, cfg.collocation_nodes);

  Eigen::VectorXd x = param.pack(initial);
  Eigen::VectorXd f = residual(param.unpack(initial, x));
  double fmax = f.cwiseAbs().maxCoeff();

  SolveResult result{initial};
  result.trace.push_back({0, fmax, 0.0});
  double lambda = cfg.initial_damping;

  int iter = 0;
  while (fmax >= cfg.tolerance && iter < cfg.max_iterations) {
    ++iter;
    // Forward-difference Jacobian, column by column.
    Eigen::MatrixXd jac(f.size(), x.size());
    for (int c = 0; c < x.size(); ++c) {
      const double h = 1e-7 * std::max(1.0, std::abs(x[c]));
      Eigen::VectorXd xc = x;
      xc[c] += h;
      jac.col(c) = (residual(param.unpack(initial, xc)) - f) / h;
    }
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    const Eigen::VectorXd jtf = jac.transpose() * f;

    bool accepted = false;
    while (!accepted) {
      Eigen::MatrixXd damped = jtj;
      damped.diagonal().array() += lambda;
      const Eigen::VectorXd step = damped.ldlt().solve(-jtf);
      const Eigen::VectorXd x_new = x + step;
      try {
        const Eigen::VectorXd f_new = residual(param.unpack(initial, x_new));
        const double fmax_new = f_new.cwiseAbs().maxCoeff();
        if (fmax_new <= fmax * (1.0 + cfg.acceptance_slack) || fmax_new < cfg.tolerance) {
          x = x_new;
          f = f_new;
          fmax = fmax_new;
          lambda = std::max(lambda * 0.25, 1e-14);
          accepted = true;
        } else {
          lambda *= 4.0;
        }
      } catch (const DomainError&) {
        lambda *= 4.0;  // positivity lost along this step; shrink it
      }
      if (!accepted && lambda > cfg.max_damping) {
        result.status = Status::positivity_loss;
        result.trace.push_back({iter, fmax, lambda});
        result.final_residual = fmax;
        result.iterations = iter;
        result.solution = initial.with_potentials(param.unpack(initial, x));
        return result;
      }
    }
    result.trace.push_back({iter, fmax, lambda});
  }

  result.status = fmax < cfg.tolerance ? Status::converged : Status::max_iterations;
  result.final_residual = fmax;
  result.iterations = iter;
  result.solution = initial.with_potentials(param.unpack(initial, x));
  return result;
}

inline SolveResult solve_coupled_cscK(const MetricTuple& initial, const SolveConfig& cfg = {}) {
  return solve(initial, Equation::coupled_scalar, cfg);
}

inline SolveResult solve_coupled_KE(const MetricTuple& initial, const SolveConfig& cfg = {}) {
  initial.require_fano("the coupled Einstein solver");
  return solve(initial, Equation::coupled_einstein, cfg);
}

/// Shifts the tuple along t so that the moment map of u_0 passes through
/// d_0/2 at t = 0, and refits the perturbations in the Chebyshev basis.
/// Removes the translation gauge freedom when comparing solutions.
inline MetricTuple recenter(const MetricTuple& mt) {
  const double half = mt.potential(0).degree_value() / 2;
  double lo = -30, hi = 30;
  for (int it = 0; it < 200; ++it) {
    const double mid = (lo + hi) / 2;
    (mt.potential(0).slope(mid) < half ? lo : hi) = mid;
  }
  const double shift = (lo + hi) / 2;

  std::vector<SymmetricPotential> out;
  for (const auto& u : mt.potentials()) {
    const int size = static_cast<int>(u.coefficients().size());
    // The recentered perturbation is u(t + shift) - d*softplus(t); interpolate
    // it at Chebyshev points and project with the discrete cosine relations.
    std::vector<double> values(size), angles(size);
    for (int p = 0; p < size; ++p) {
      angles[p] = std::numbers::pi * (p + 0.5) / size;
      const double x = std::cos(angles[p]);
      const double t = geom::logit((x + 1) / 2);
      values[p] = u.value(t + shift) - u.degree_value() * geom::detail::softplus(t);
    }
    std::vector<double> coeffs(size, 0.0);
    for (int j = 0; j < size; ++j) {
      double acc = 0;
      for (int p = 0; p < size; ++p) acc += values[p] * std::cos(j * angles[p]);
      coeffs[j] = (j == 0 ? 1.0 : 2.0) * acc / size;
    }
    out.push_back(u.with_coefficients(std::move(coeffs)));
  }
  return mt.with_potentials(std::move(out));
}

}  // namespace csck::solver
