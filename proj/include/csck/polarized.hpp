#pragma once

#include <array>
#include <string>
#include <vector>

#include "csck/errors.hpp"
#include "csck/polytope.hpp"
#include "csck/rational.hpp"

namespace csck::toric {

enum class Model { cp1, product_cp1, toric };

inline std::string model_name(Model m) {
  switch (m) {
    case Model::cp1: return "cp1";
    case Model::product_cp1: return "product-cp1";
    case Model::toric: return "toric";
  }
  return "?";
}

/// A manifold model with ample bundles L_0..L_m. The three supported models
/// are the projective line (degrees), a product of two projective lines
/// (bidegrees) and a 2-d toric surface (moment polytopes sharing a fan).
class PolarizedTuple {
 public:
  static PolarizedTuple cp1(std::vector<Rat> degrees) {
    PolarizedTuple t;
    t.model_ = Model::cp1;
    t.n_ = 1;
    if (degrees.empty()) throw SchemaError("tuple needs at least one bundle");
    for (const auto& d : degrees)
      if (d <= 0) throw DomainError("bundle degrees must be positive");
    t.degrees_ = std::move(degrees);
    return t;
  }

  static PolarizedTuple product_cp1(std::vector<std::array<Rat, 2>> bidegrees) {
    PolarizedTuple t;
    t.model_ = Model::product_cp1;
    t.n_ = 2;
    if (bidegrees.empty()) throw SchemaError("tuple needs at least one bundle");
    for (const auto& d : bidegrees)
      if (d[0] <= 0 || d[1] <= 0) throw DomainError("bidegrees must be positive in each factor");
    t.bidegrees_ = std::move(bidegrees);
    return t;
  }

  static PolarizedTuple toric(std::vector<LatticePolytope> polytopes) {
    PolarizedTuple t;
    t.model_ = Model::toric;
    if (polytopes.empty()) throw SchemaError("tuple needs at least one bundle");
    t.n_ = polytopes[0].dim();
    for (const auto& p : polytopes)
      if (p.dim() != t.n_) throw SchemaError("all moment polytopes must share a dimension");
    t.polytopes_ = std::move(polytopes);
    return t;
  }

  Model model() const { return model_; }
  int n() const { return n_; }
  std::size_t bundle_count() const {
    switch (model_) {
      case Model::cp1: return degrees_.size();
      case Model::product_cp1: return bidegrees_.size();
      case Model::toric: return polytopes_.size();
    }
    return 0;
  }

  const std::vector<Rat>& degrees() const { return degrees_; }
  const std::vector<std::array<Rat, 2>>& bidegrees() const { return bidegrees_; }

  LatticePolytope moment_polytope(std::size_t i) const {
    check_index(i);
    switch (model_) {
      case Model::cp1: return LatticePolytope::interval(0, degrees_[i]);
      case Model::product_cp1: return LatticePolytope::box(bidegrees_[i][0], bidegrees_[i][1]);
      case Model::toric: return polytopes_[i];
    }
    throw DomainError("unreachable");
  }

  /// Moment polytope of the tensor product L = L_0 x ... x L_m.
  LatticePolytope product_polytope() const {
    LatticePolytope p = moment_polytope(0);
    for (std::size_t i = 1; i < bundle_count(); ++i) p = p.minkowski_sum(moment_polytope(i));
    return p;
  }

  /// V_i = (2pi L_i)^n / n! = (2pi)^n * vol(P_i).
  TwoPiScaled bundle_volume(std::size_t i) const {
    return {moment_polytope(i).volume(), n_};
  }

  /// True when L = -K, the anticanonically polarized case.
  bool is_anticanonical() const {
    switch (model_) {
      case Model::cp1: {
        Rat total = 0;
        for (const auto& d : degrees_) total += d;
        return total == 2;
      }
      case Model::product_cp1: {
        Rat a = 0, b = 0;
        for (const auto& d : bidegrees_) {
          a += d[0];
          b += d[1];
        }
        return a == 2 && b == 2;
      }
      case Model::toric:
        throw ScopeError("anticanonical test is not defined for raw toric input");
    }
    return false;
  }

 private:
  Model model_ = Model::cp1;
  int n_ = 1;
  std::vector<Rat> degrees_;
  std::vector<std::array<Rat, 2>> bidegrees_;
  std::vector<LatticePolytope> polytopes_;

  void check_index(std::size_t i) const {
    if (i >= bundle_count()) throw SchemaError("bundle index out of range");
  }
};

/// Combinatorial C*-action: a linear functional on moment coordinates plus
/// one linearization constant per bundle (the additive freedom of the
/// Hamiltonian). The trivial action has ell = 0.
struct TorusAction {
  std::vector<Rat> ell;
  std::vector<Rat> shifts;
  std::string normalization = "explicit";

  bool is_trivial() const {
    for (const auto& c : ell)
      if (c != 0) return false;
    return true;
  }

  void validate(const PolarizedTuple& tuple) const {
    if (static_cast<int>(ell.size()) != tuple.n())
      throw SchemaError("action functional dimension must match the moment space");
    if (shifts.size() != tuple.bundle_count())
      throw SchemaError("action needs one shift per bundle");
  }
};

/// Shifts making min over P_i of <ell, x> + c_i equal 0 (the default gauge).
inline TorusAction min_zero_action(const PolarizedTuple& tuple, std::vector<Rat> ell) {
  TorusAction a;
  a.ell = std::move(ell);
  a.normalization = "min-zero";
  for (std::size_t i = 0; i < tuple.bundle_count(); ++i)
    a.shifts.push_back(-tuple.moment_polytope(i).min_linear(a.ell));
  a.validate(tuple);
  return a;
}

/// Shifts making every Hamiltonian have zero mean against its own volume form.
inline TorusAction zero_mean_action(const PolarizedTuple& tuple, std::vector<Rat> ell) {
  TorusAction a;
  a.ell = std::move(ell);
  a.normalization = "zero-mean";
  for (std::size_t i = 0; i < tuple.bundle_count(); ++i) {
    const LatticePolytope p = tuple.moment_polytope(i);
    a.shifts.push_back(-p.moment_integral(a.ell, 0) / p.volume());
  }
  a.validate(tuple);
  return a;
}

/// Intersection number L_{i_1} ... L_{i_n} for a multiset of n bundle indices,
/// computed through the polarization identity for mixed volumes.
inline Rat intersection_number(const PolarizedTuple& tuple, std::vector<std::size_t> indices) {
  if (static_cast<int>(indices.size()) != tuple.n())
    throw SchemaError("intersection needs exactly n bundle indices");
  for (std::size_t i : indices)
    if (i >= tuple.bundle_count()) throw SchemaError("bundle index out of range");
  if (tuple.n() == 1) {
    switch (tuple.model()) {
      case Model::cp1: return tuple.degrees()[indices[0]];
      default: return tuple.moment_polytope(indices[0]).volume();
    }
  }
  if (tuple.model() == Model::product_cp1) {
    const auto& a = tuple.bidegrees()[indices[0]];
    const auto& b = tuple.bidegrees()[indices[1]];
    return a[0] * b[1] + a[1] * b[0];
  }
  const LatticePolytope pa = tuple.moment_polytope(indices[0]);
  const LatticePolytope pb = tuple.moment_polytope(indices[1]);
  if (indices[0] == indices[1]) return 2 * pa.volume();
  return pa.minkowski_sum(pb).volume() - pa.volume() - pb.volume();
}

namespace detail {

/// (-K) . L_0^{n-1} = (n-1)! * lattice boundary volume of P_0.
inline Rat anticanonical_pairing(const PolarizedTuple& tuple) {
  switch (tuple.model()) {
    case Model::cp1: return 2;
    case Model::product_cp1: {
      const auto& d0 = tuple.bidegrees()[0];
      return 2 * d0[0] + 2 * d0[1];
    }
    case Model::toric: return tuple.moment_polytope(0).boundary_volume();
  }
  throw DomainError("unreachable");
}

/// L . L_0^{n-1} where L is the full tensor product.
inline Rat product_pairing(const PolarizedTuple& tuple) {
  if (tuple.n() == 1) {
    Rat total = 0;
    for (std::size_t i = 0; i < tuple.bundle_count(); ++i)
      total += intersection_number(tuple, {i});
    return total;
  }
  if (tuple.model() == Model::product_cp1) {
    Rat a = 0, b = 0;
    for (const auto& d : tuple.bidegrees()) {
      a += d[0];
      b += d[1];
    }
    const auto& d0 = tuple.bidegrees()[0];
    return a * d0[1] + b * d0[0];
  }
  const LatticePolytope p0 = tuple.moment_polytope(0);
  const LatticePolytope pl = tuple.product_polytope();
  return pl.minkowski_sum(p0).volume() - pl.volume() - p0.volume();
}

}  // namespace detail

/// The topological constant of the coupled system:
/// n * (-K - L) . L_0^{n-1} / L_0^n, an exact rational.
inline Rat s_hat(const PolarizedTuple& tuple) {
  std::vector<std::size_t> zeros(tuple.n(), 0);
  const Rat l0n = intersection_number(tuple, zeros);
  return Rat(tuple.n()) * (detail::anticanonical_pairing(tuple) - detail::product_pairing(tuple)) /
         l0n;
}

}  // namespace csck::toric
