#pragma once

#include <algorithm>
#include <optional>
#include <utility>
#include <vector>

#include "csck/errors.hpp"
#include "csck/rational.hpp"

namespace csck::toric {

using Point = std::vector<Rat>;      // rational coordinates
using IntVec = std::vector<BigInt>;  // integer lattice vector

namespace detail {

inline Rat dot(const IntVec& n, const Point& x) {
  Rat acc = 0;
  for (std::size_t i = 0; i < n.size(); ++i) acc += Rat(n[i]) * x[i];
  return acc;
}

inline Rat cross2(const Point& a, const Point& b) { return a[0] * b[1] - a[1] * b[0]; }

inline Point sub(const Point& a, const Point& b) {
  Point r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

/// Clears denominators and divides by the gcd; returns the primitive integer
/// vector parallel to v (and pointing the same way), plus the positive
/// rational t with v = t * primitive.
inline std::pair<IntVec, Rat> primitive_direction(const Point& v) {
  BigInt scale = 1;
  for (const Rat& c : v) scale = lcm(scale, denominator(c));
  IntVec w(v.size());
  BigInt g = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    w[i] = numerator(v[i]) * (scale / denominator(v[i]));
    g = gcd(g, w[i]);
  }
  if (g == 0) throw DomainError("zero direction has no primitive representative");
  for (auto& c : w) c /= g;
  return {w, Rat(g, scale)};
}

inline bool is_primitive(const IntVec& n) {
  BigInt g = 0;
  for (const auto& c : n) g = gcd(g, c);
  return g == 1;
}

// Angular comparison of nonzero integer vectors, counterclockwise from (1,0).
inline int half_plane(const IntVec& v) { return (v[1] > 0 || (v[1] == 0 && v[0] > 0)) ? 0 : 1; }

inline bool angle_less(const IntVec& a, const IntVec& b) {
  const int ha = half_plane(a), hb = half_plane(b);
  if (ha != hb) return ha < hb;
  const BigInt cr = a[0] * b[1] - a[1] * b[0];
  return cr > 0;
}

}  // namespace detail

/// A full-dimensional rational convex polytope in dimension 1 or 2, kept in
/// both representations: counterclockwise vertex list and irredundant facet
/// list {x : normal . x + support >= 0} with primitive integer inward normals.
class LatticePolytope {
 public:
  struct Facet {
    IntVec normal;
    Rat support;
  };

  static LatticePolytope from_vertices(int dim, std::vector<Point> verts) {
    LatticePolytope p;
    p.dim_ = check_dim(dim);
    for (const auto& v : verts)
      if (static_cast<int>(v.size()) != dim) throw SchemaError("vertex dimension mismatch");
    p.vertices_ = dim == 1 ? hull_1d(std::move(verts)) : hull_2d(std::move(verts));
    p.facets_ = facets_from_vertices(p.dim_, p.vertices_);
    p.check_full_dimensional();
    return p;
  }

  static LatticePolytope from_facets(int dim, std::vector<Facet> facets) {
    LatticePolytope p;
    p.dim_ = check_dim(dim);
    for (const auto& f : facets) {
      if (static_cast<int>(f.normal.size()) != dim) throw SchemaError("facet dimension mismatch");
      if (!detail::is_primitive(f.normal))
        throw DomainError("facet normal is not a primitive integer vector");
    }
    p.facets_ = std::move(facets);
    p.vertices_ = dim == 1 ? vertices_from_facets_1d(p.facets_) : vertices_from_facets_2d(p.facets_);
    // Re-derive facets from the hull so both representations are canonical.
    p.facets_ = facets_from_vertices(p.dim_, p.vertices_);
    p.check_full_dimensional();
    return p;
  }

  /// Interval [lo, hi], the moment polytope of a degree-(hi-lo) bundle.
  static LatticePolytope interval(const Rat& lo, const Rat& hi) {
    return from_vertices(1, {{lo}, {hi}});
  }

  /// Axis-aligned box [0,a] x [0,b].
  static LatticePolytope box(const Rat& a, const Rat& b) {
    return from_vertices(2, {{0, 0}, {a, 0}, {a, b}, {0, b}});
  }

  int dim() const { return dim_; }
  const std::vector<Point>& vertices() const { return vertices_; }
  const std::vector<Facet>& facets() const { return facets_; }

  bool contains(const Point& x) const {
    for (const auto& f : facets_)
      if (detail::dot(f.normal, x) + f.support < 0) return false;
    return true;
  }

  /// Exact Euclidean volume (length in dimension 1).
  Rat volume() const {
    if (dim_ == 1) return vertices_[1][0] - vertices_[0][0];
    Rat acc = 0;
    for (std::size_t i = 1; i + 1 < vertices_.size(); ++i)
      acc += detail::cross2(detail::sub(vertices_[i], vertices_[0]),
                            detail::sub(vertices_[i + 1], vertices_[0]));
    return acc / 2;
  }

  /// Boundary volume in the lattice normalization: a facet with primitive
  /// direction p and length t*|p| has measure t, and a point facet measures 1.
  Rat boundary_volume() const {
    if (dim_ == 1) return 2;
    Rat acc = 0;
    for_each_edge([&](const Point& a, const Point& b) {
      acc += detail::primitive_direction(detail::sub(b, a)).second;
    });
    return acc;
  }

  /// Exact integral over the polytope of the affine function <ell, x> + c.
  Rat moment_integral(const std::vector<Rat>& ell, const Rat& c) const {
    check_functional(ell);
    if (dim_ == 1) {
      const Rat lo = vertices_[0][0], hi = vertices_[1][0];
      return ell[0] * (hi * hi - lo * lo) / 2 + c * (hi - lo);
    }
    // Fan triangulation; a linear function integrates to area * vertex average.
    Rat acc = 0;
    const Point& v0 = vertices_[0];
    for (std::size_t i = 1; i + 1 < vertices_.size(); ++i) {
      const Point& v1 = vertices_[i];
      const Point& v2 = vertices_[i + 1];
      const Rat area = detail::cross2(detail::sub(v1, v0), detail::sub(v2, v0)) / 2;
      acc += area * (affine(ell, c, v0) + affine(ell, c, v1) + affine(ell, c, v2)) / 3;
    }
    return acc;
  }

  /// Exact integral of <ell, x> + c over the boundary, lattice measure.
  Rat boundary_moment_integral(const std::vector<Rat>& ell, const Rat& c) const {
    check_functional(ell);
    if (dim_ == 1) return affine(ell, c, vertices_[0]) + affine(ell, c, vertices_[1]);
    Rat acc = 0;
    for_each_edge([&](const Point& a, const Point& b) {
      const Rat len = detail::primitive_direction(detail::sub(b, a)).second;
      acc += len * (affine(ell, c, a) + affine(ell, c, b)) / 2;
    });
    return acc;
  }

  Rat min_linear(const std::vector<Rat>& ell) const {
    check_functional(ell);
    Rat best = affine(ell, 0, vertices_[0]);
    for (const auto& v : vertices_) best = std::min(best, affine(ell, 0, v));
    return best;
  }

  /// Enumerates all lattice points (brute force over the bounding box).
  std::vector<IntVec> lattice_points() const {
    std::vector<IntVec> pts;
    if (dim_ == 1) {
      const BigInt lo = ceil_rat(vertices_[0][0]), hi = floor_rat(vertices_[1][0]);
      for (BigInt x = lo; x <= hi; ++x) pts.push_back({x});
      return pts;
    }
    Rat xlo = vertices_[0][0], xhi = xlo, ylo = vertices_[0][1], yhi = ylo;
    for (const auto& v : vertices_) {
      xlo = std::min(xlo, v[0]);
      xhi = std::max(xhi, v[0]);
      ylo = std::min(ylo, v[1]);
      yhi = std::max(yhi, v[1]);
    }
    for (BigInt x = ceil_rat(xlo); x <= floor_rat(xhi); ++x)
      for (BigInt y = ceil_rat(ylo); y <= floor_rat(yhi); ++y)
        if (contains({Rat(x), Rat(y)})) pts.push_back({x, y});
    return pts;
  }

  BigInt lattice_point_count() const { return BigInt(lattice_points().size()); }

  LatticePolytope dilate(const Rat& k) const {
    if (k <= 0) throw DomainError("dilation factor must be positive");
    std::vector<Point> verts = vertices_;
    for (auto& v : verts)
      for (auto& c : v) c *= k;
    return from_vertices(dim_, std::move(verts));
  }

  LatticePolytope translate(const Point& t) const {
    if (static_cast<int>(t.size()) != dim_) throw SchemaError("translation dimension mismatch");
    std::vector<Point> verts = vertices_;
    for (auto& v : verts)
      for (std::size_t i = 0; i < v.size(); ++i) v[i] += t[i];
    return from_vertices(dim_, std::move(verts));
  }

  LatticePolytope minkowski_sum(const LatticePolytope& other) const {
    if (other.dim_ != dim_) throw DomainError("Minkowski sum dimension mismatch");
    std::vector<Point> sums;
    for (const auto& a : vertices_)
      for (const auto& b : other.vertices_) {
        Point s(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) s[i] = a[i] + b[i];
        sums.push_back(std::move(s));
      }
    return from_vertices(dim_, std::move(sums));
  }

  /// Facet-wise support difference: {x : n.x + (k*s_this - s_other) >= 0}.
  /// Both polytopes must carry exactly the same normal set (shared fan);
  /// returns nullopt when the result is empty or lower-dimensional.
  std::optional<LatticePolytope> support_difference(const BigInt& k,
                                                    const LatticePolytope& other) const {
    if (other.dim_ != dim_) throw DomainError("support difference dimension mismatch");
    std::vector<Facet> diff;
    for (const auto& f : facets_) {
      const Facet* match = nullptr;
      for (const auto& g : other.facets_)
        if (g.normal == f.normal) {
          match = &g;
          break;
        }
      if (!match) throw ScopeError("polytopes do not share a normal fan");
      diff.push_back({f.normal, Rat(k) * f.support - match->support});
    }
    if (other.facets_.size() != facets_.size())
      throw ScopeError("polytopes do not share a normal fan");
    try {
      return from_facets(dim_, std::move(diff));
    } catch (const DomainError&) {
      return std::nullopt;  // empty or degenerate difference
    }
  }

  bool same_vertex_set(const LatticePolytope& other) const {
    if (other.dim_ != dim_ || other.vertices_.size() != vertices_.size()) return false;
    for (const auto& v : vertices_) {
      bool found = false;
      for (const auto& w : other.vertices_) found = found || v == w;
      if (!found) return false;
    }
    return true;
  }

 private:
  int dim_ = 0;
  std::vector<Point> vertices_;
  std::vector<Facet> facets_;

  static int check_dim(int dim) {
    if (dim != 1 && dim != 2) throw ScopeError("only polytopes of dimension 1 or 2 are supported");
    return dim;
  }

  static Rat affine(const std::vector<Rat>& ell, const Rat& c, const Point& x) {
    Rat acc = c;
    for (std::size_t i = 0; i < ell.size(); ++i) acc += ell[i] * x[i];
    return acc;
  }

  void check_functional(const std::vector<Rat>& ell) const {
    if (static_cast<int>(ell.size()) != dim_) throw SchemaError("functional dimension mismatch");
  }

  void check_full_dimensional() const {
    if (volume() <= 0) throw DomainError("polytope is not full-dimensional");
  }

  template <typename F>
  void for_each_edge(F&& f) const {
    for (std::size_t i = 0; i < vertices_.size(); ++i)
      f(vertices_[i], vertices_[(i + 1) % vertices_.size()]);
  }

  static std::vector<Point> hull_1d(std::vector<Point> verts) {
    if (verts.empty()) throw DomainError("polytope needs vertices");
    Rat lo = verts[0][0], hi = verts[0][0];
    for (const auto& v : verts) {
      lo = std::min(lo, v[0]);
      hi = std::max(hi, v[0]);
    }
    if (lo == hi) throw DomainError("interval is degenerate");
    return {{lo}, {hi}};
  }

  // Andrew's monotone chain over exact rationals; returns a CCW vertex cycle.
  static std::vector<Point> hull_2d(std::vector<Point> verts) {
    std::sort(verts.begin(), verts.end(), [](const Point& a, const Point& b) {
      return a[0] != b[0] ? a[0] < b[0] : a[1] < b[1];
    });
    verts.erase(std::unique(verts.begin(), verts.end()), verts.end());
    if (verts.size() < 3) throw DomainError("polygon needs at least three distinct vertices");
    auto turn = [](const Point& o, const Point& a, const Point& b) {
      return detail::cross2(detail::sub(a, o), detail::sub(b, o));
    };
    std::vector<Point> h;
    for (const auto& v : verts) {  // lower chain
      while (h.size() >= 2 && turn(h[h.size() - 2], h.back(), v) <= 0) h.pop_back();
      h.push_back(v);
    }
    const std::size_t lower = h.size() + 1;
    for (auto it = verts.rbegin() + 1; it != verts.rend(); ++it) {  // upper chain
      while (h.size() >= lower && turn(h[h.size() - 2], h.back(), *it) <= 0) h.pop_back();
      h.push_back(*it);
    }
    h.pop_back();
    if (h.size() < 3) throw DomainError("polygon is degenerate");
    return h;
  }

  static std::vector<Facet> facets_from_vertices(int dim, const std::vector<Point>& verts) {
    std::vector<Facet> facets;
    if (dim == 1) {
      facets.push_back({{BigInt(1)}, -verts[0][0]});
      facets.push_back({{BigInt(-1)}, verts[1][0]});
      return facets;
    }
    for (std::size_t i = 0; i < verts.size(); ++i) {
      const Point& a = verts[i];
      const Point& b = verts[(i + 1) % verts.size()];
      const IntVec p = detail::primitive_direction(detail::sub(b, a)).first;
      IntVec n = {-p[1], p[0]};  // inward for a CCW cycle
      facets.push_back({n, -(Rat(n[0]) * a[0] + Rat(n[1]) * a[1])});
    }
    return facets;
  }

  static std::vector<Point> vertices_from_facets_1d(const std::vector<Facet>& facets) {
    std::optional<Rat> lo, hi;
    for (const auto& f : facets) {
      if (f.normal[0] == 1) {
        const Rat v = -f.support;
        lo = lo ? std::max(*lo, v) : v;
      } else if (f.normal[0] == -1) {
        const Rat v = f.support;
        hi = hi ? std::min(*hi, v) : v;
      } else {
        throw DomainError("1-d facet normal must be +1 or -1");
      }
    }
    if (!lo || !hi) throw DomainError("interval facets do not bound both sides");
    if (*lo >= *hi) throw DomainError("interval facets are inconsistent");
    return {{*lo}, {*hi}};
  }

  static std::vector<Point> vertices_from_facets_2d(std::vector<Facet> facets) {
    if (facets.size() < 3) throw DomainError("polygon needs at least three facets");
    std::sort(facets.begin(), facets.end(),
              [](const Facet& a, const Facet& b) { return detail::angle_less(a.normal, b.normal); });
    std::vector<Point> verts;
    for (std::size_t i = 0; i < facets.size(); ++i) {
      const Facet& f = facets[i];
      const Facet& g = facets[(i + 1) % facets.size()];
      // Solve f.n . x = -f.s, g.n . x = -g.s.
      const BigInt det = f.normal[0] * g.normal[1] - f.normal[1] * g.normal[0];
      if (det == 0) throw DomainError("adjacent facets are parallel");
      const Rat x = (Rat(f.normal[1]) * g.support - Rat(g.normal[1]) * f.support) / Rat(det);
      const Rat y = (Rat(g.normal[0]) * f.support - Rat(f.normal[0]) * g.support) / Rat(det);
      verts.push_back({x, y});
    }
    for (const auto& v : verts)
      for (const auto& f : facets)
        if (detail::dot(f.normal, v) + f.support < 0)
          throw DomainError("facet data is inconsistent (redundant or unbounded)");
    return verts;
  }
};

}  // namespace csck::toric
