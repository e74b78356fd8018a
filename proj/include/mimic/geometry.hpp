#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "mimic/types.hpp"

namespace mimic {

// Sphere-swept segment: two axis endpoints and a radius. a == b degenerates
// to a sphere.
struct Capsule {
  Vec3 a = Vec3::Zero();
  Vec3 b = Vec3::Zero();
  double r = 0.0;
};

// Closest points on two segment axes, with their segment parameters and the
// center-line distance.
struct ClosestPair {
  Vec3 p_a = Vec3::Zero();
  Vec3 p_b = Vec3::Zero();
  double s = 0.0;
  double t = 0.0;
  double d = 0.0;
};

namespace detail {
inline double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }
}  // namespace detail

// Global minimizer of ||p1(s) - p2(t)|| over the unit square. For parallel
// segments the minimizer with minimal s, then minimal t, is returned.
inline ClosestPair segment_closest(const Vec3& a1, const Vec3& b1,
                                   const Vec3& a2, const Vec3& b2) {
  using detail::clamp01;
  const Vec3 d1 = b1 - a1;
  const Vec3 d2 = b2 - a2;
  const Vec3 r = a1 - a2;
  const double a = d1.squaredNorm();
  const double e = d2.squaredNorm();
  const double f = d2.dot(r);
  constexpr double kDegenerate = 1e-24;  // squared length

  double s = 0.0, t = 0.0;
  if (a <= kDegenerate && e <= kDegenerate) {
    // both segments are points
  } else if (a <= kDegenerate) {
    t = clamp01(f / e);
  } else if (e <= kDegenerate) {
    s = clamp01(-r.dot(d1) / a);
  } else {
    const double c = d1.dot(r);
    const double b = d1.dot(d2);
    const double denom = a * e - b * b;
    if (denom > 1e-12 * a * e) {
      s = clamp01((b * f - c * e) / denom);
    } else {
      // Parallel segments: the minimizing s forms an interval; take its
      // lower end (projection of segment 2 onto segment 1's parameter).
      const double p0 = -c / a;
      const double p1 = (b - c) / a;
      const double lo = std::min(p0, p1);
      const double hi = std::max(p0, p1);
      if (hi < 0.0)
        s = 0.0;
      else if (lo > 1.0)
        s = 1.0;
      else
        s = std::max(0.0, lo);
    }
    t = (b * s + f) / e;
    if (t < 0.0) {
      t = 0.0;
      s = clamp01(-c / a);
    } else if (t > 1.0) {
      t = 1.0;
      s = clamp01((b - c) / a);
    }
  }

  ClosestPair out;
  out.s = s;
  out.t = t;
  out.p_a = a1 + s * d1;
  out.p_b = a2 + t * d2;
  out.d = (out.p_a - out.p_b).norm();
  return out;
}

// Center-line distance between two capsules. Surface clearance is
// d - (A.r + B.r); a negative value means overlap. Arguments are
// canonicalized so that the result is exactly symmetric in (A, B).
inline std::pair<double, ClosestPair> capsule_distance(const Capsule& A,
                                                       const Capsule& B) {
  auto key = [](const Capsule& c) {
    return std::array<double, 6>{c.a.x(), c.a.y(), c.a.z(),
                                 c.b.x(), c.b.y(), c.b.z()};
  };
  const bool swap = key(B) < key(A);
  const Capsule& first = swap ? B : A;
  const Capsule& second = swap ? A : B;
  ClosestPair pair = segment_closest(first.a, first.b, second.a, second.b);
  if (swap) {
    std::swap(pair.p_a, pair.p_b);
    std::swap(pair.s, pair.t);
  }
  return {pair.d, pair};
}

// Gradient of the center-line distance with respect to the four segment
// endpoints, in envelope form (s, t held fixed at the minimizer).
struct DistanceGradient {
  Vec3 a_a, b_a;  // d(d)/d(a_A), d(d)/d(b_A)
  Vec3 a_b, b_b;  // d(d)/d(a_B), d(d)/d(b_B)
};

inline std::optional<DistanceGradient> distance_gradient(
    const ClosestPair& pair) {
  constexpr double kEps = 1e-9;
  if (pair.d <= kEps) return std::nullopt;
  const Vec3 n = (pair.p_a - pair.p_b) / pair.d;
  DistanceGradient g;
  g.a_a = (1.0 - pair.s) * n;
  g.b_a = pair.s * n;
  g.a_b = -(1.0 - pair.t) * n;
  g.b_b = -pair.t * n;
  return g;
}

// ---------------------------------------------------------------------------
// Sphere-chain decomposition of a capsule.
// ---------------------------------------------------------------------------

struct SphereChain {
  std::vector<Vec3> centers;
  double r = 0.0;
  int k = 0;
};

inline SphereChain capsule_to_spheres(const Capsule& c, int k) {
  const double len = (c.b - c.a).norm();
  int n0 = static_cast<int>(std::ceil(len / (2.0 * c.r))) + 1;
  n0 = std::max(n0, 2);
  const int n = (1 << k) * (n0 - 1) + 1;
  SphereChain chain;
  chain.r = c.r;
  chain.k = k;
  chain.centers.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double u = static_cast<double>(i) / (n - 1);
    chain.centers.push_back(c.a + u * (c.b - c.a));
  }
  return chain;
}

inline double sphere_distance(const Vec3& c1, const Vec3& c2) {
  return (c1 - c2).norm();
}

// ---------------------------------------------------------------------------
// Oriented bounding boxes and convex proximity.
// ---------------------------------------------------------------------------

struct Obb {
  Vec3 center = Vec3::Zero();
  Vec3 half = Vec3::Ones();  // half-extents, > 0
  Mat3 rot = Mat3::Identity();

  std::array<Vec3, 8> vertices() const {
    std::array<Vec3, 8> v;
    int idx = 0;
    for (int sx : {-1, 1})
      for (int sy : {-1, 1})
        for (int sz : {-1, 1})
          v[idx++] = center + rot * Vec3(sx * half.x(), sy * half.y(),
                                         sz * half.z());
    return v;
  }
};

struct ObbProximity {
  double d = 0.0;
  Vec3 direction = Vec3::UnitX();  // unit vector from B toward A
  Vec3 p_a = Vec3::Zero();
  Vec3 p_b = Vec3::Zero();
  int iterations = 0;
};

struct ProximityFailure : Error {
  using Error::Error;
};

namespace detail {

struct SimplexVertex {
  Vec3 w;   // Minkowski-difference point (pa - pb)
  Vec3 pa;  // witness on A
  Vec3 pb;  // witness on B
};

// Closest point of conv(points) to the origin by enumerating supporting
// subsets; returns barycentric weights over the input points.
inline Vec3 simplex_closest(const std::vector<SimplexVertex>& sx,
                            std::vector<double>& weights) {
  const int n = static_cast<int>(sx.size());
  double best = std::numeric_limits<double>::infinity();
  Vec3 best_v = Vec3::Zero();
  std::vector<double> best_w(n, 0.0);
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    std::vector<int> idx;
    for (int i = 0; i < n; ++i)
      if (mask & (1u << i)) idx.push_back(i);
    const int m = static_cast<int>(idx.size());
    // Solve min ||sum_i l_i w_i||, sum l_i = 1, over the affine hull.
    Eigen::MatrixXd G(m, m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        G(i, j) = sx[idx[i]].w.dot(sx[idx[j]].w);
    Eigen::MatrixXd A(m + 1, m + 1);
    A.setZero();
    A.topLeftCorner(m, m) = G;
    A.topRightCorner(m, 1).setOnes();
    A.bottomLeftCorner(1, m).setOnes();
    Eigen::VectorXd rhs(m + 1);
    rhs.setZero();
    rhs(m) = 1.0;
    Eigen::VectorXd sol = A.fullPivLu().solve(rhs);
    bool valid = true;
    for (int i = 0; i < m; ++i)
      if (!(sol(i) >= -1e-12) || !std::isfinite(sol(i))) valid = false;
    if (!valid) continue;
    Vec3 v = Vec3::Zero();
    for (int i = 0; i < m; ++i) v += sol(i) * sx[idx[i]].w;
    const double nn = v.squaredNorm();
    if (nn < best) {
      best = nn;
      best_v = v;
      std::fill(best_w.begin(), best_w.end(), 0.0);
      for (int i = 0; i < m; ++i) best_w[idx[i]] = std::max(sol(i), 0.0);
    }
  }
  weights = best_w;
  return best_v;
}

}  // namespace detail

// Separation distance between two convex 8-vertex hulls (GJK-style support
// iteration). Returns d = 0 with the last direction estimate on overlap.
inline ObbProximity obb_distance(const Obb& A, const Obb& B, int max_iter = 64,
                                 double tol = 1e-6) {
  const auto va = A.vertices();
  const auto vb = B.vertices();
  auto support = [&](const Vec3& dir, detail::SimplexVertex& out) {
    int ia = 0, ib = 0;
    double da = -std::numeric_limits<double>::infinity();
    double db = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < 8; ++i) {
      const double pa = va[i].dot(dir);
      if (pa > da) da = pa, ia = i;
      const double pb = vb[i].dot(-dir);
      if (pb > db) db = pb, ib = i;
    }
    out.pa = va[ia];
    out.pb = vb[ib];
    out.w = out.pa - out.pb;
  };

  std::vector<detail::SimplexVertex> simplex;
  detail::SimplexVertex v0;
  support(B.center - A.center, v0);
  simplex.push_back(v0);

  ObbProximity out;
  Vec3 v = v0.w;
  std::vector<double> weights;
  int iter = 0;
  for (; iter < max_iter; ++iter) {
    const double vn = v.norm();
    if (vn < 1e-9) {
      // overlap
      out.d = 0.0;
      out.iterations = iter;
      out.p_a = out.p_b = Vec3::Zero();
      return out;
    }
    detail::SimplexVertex w;
    support(-v, w);
    // lower bound on distance improvement
    const double gap = vn - w.w.dot(v) / vn;
    if (gap <= tol) break;
    bool duplicate = false;
    for (const auto& sv : simplex)
      if ((sv.w - w.w).squaredNorm() < 1e-24) duplicate = true;
    if (duplicate) break;
    simplex.push_back(w);
    v = detail::simplex_closest(simplex, weights);
    // drop vertices with zero weight
    std::vector<detail::SimplexVertex> reduced;
    std::vector<double> rw;
    for (size_t i = 0; i < simplex.size(); ++i) {
      if (weights[i] > 0.0) {
        reduced.push_back(simplex[i]);
        rw.push_back(weights[i]);
      }
    }
    simplex = std::move(reduced);
    weights = std::move(rw);
    if (simplex.size() == 4) break;  // origin enclosed next pass
  }
  if (!v.allFinite())
    throw ProximityFailure("obb_distance: numerical breakdown in GJK");

  // recover witness points from the final simplex
  Vec3 pa = Vec3::Zero(), pb = Vec3::Zero();
  if (!weights.empty() && weights.size() == simplex.size()) {
    double wsum = 0.0;
    for (double wi : weights) wsum += wi;
    if (wsum > 0.0) {
      for (size_t i = 0; i < simplex.size(); ++i) {
        pa += weights[i] / wsum * simplex[i].pa;
        pb += weights[i] / wsum * simplex[i].pb;
      }
    }
  } else {
    pa = simplex[0].pa;
    pb = simplex[0].pb;
  }
  out.d = v.norm();
  if (out.d < 1e-9) {
    out.d = 0.0;
  } else {
    out.direction = v / out.d;
  }
  out.p_a = pa;
  out.p_b = pb;
  out.iterations = iter;
  return out;
}

}  // namespace mimic
