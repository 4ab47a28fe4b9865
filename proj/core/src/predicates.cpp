#include "predicates.hpp"

#include <gmpxx.h>

#include <cmath>
#include <limits>

namespace topovox::detail {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

template <typename T>
int sign(const T& v) {
  return v > 0 ? 1 : (v < 0 ? -1 : 0);
}

template <typename T>
T det3(const T& a, const T& b, const T& c, const T& d, const T& e, const T& f, const T& g, const T& h,
       const T& i) {
  return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g);
}

template <typename T, typename P>
T orient2d_t(const P& a, const P& b, const P& c) {
  return (T(b[0]) - T(a[0])) * (T(c[1]) - T(a[1])) - (T(b[1]) - T(a[1])) * (T(c[0]) - T(a[0]));
}

template <typename T, typename P>
T incircle_t(const P& a, const P& b, const P& c, const P& d) {
  const T adx = T(a[0]) - T(d[0]), ady = T(a[1]) - T(d[1]);
  const T bdx = T(b[0]) - T(d[0]), bdy = T(b[1]) - T(d[1]);
  const T cdx = T(c[0]) - T(d[0]), cdy = T(c[1]) - T(d[1]);
  const T alift = adx * adx + ady * ady;
  const T blift = bdx * bdx + bdy * bdy;
  const T clift = cdx * cdx + cdy * cdy;
  return det3<T>(adx, ady, alift, bdx, bdy, blift, cdx, cdy, clift);
}

template <typename T, typename P>
T orient3d_t(const P& a, const P& b, const P& c, const P& d) {
  return det3<T>(T(b[0]) - T(a[0]), T(b[1]) - T(a[1]), T(b[2]) - T(a[2]), T(c[0]) - T(a[0]), T(c[1]) - T(a[1]),
                 T(c[2]) - T(a[2]), T(d[0]) - T(a[0]), T(d[1]) - T(a[1]), T(d[2]) - T(a[2]));
}

// Negated lifted 4x4 determinant: positive when e is inside.
template <typename T, typename P>
T insphere_t(const P& a, const P& b, const P& c, const P& d, const P& e) {
  std::array<std::array<T, 4>, 4> m;
  const P* pts[4] = {&a, &b, &c, &d};
  for (int r = 0; r < 4; ++r) {
    const P& p = *pts[r];
    T lift = 0;
    for (int k = 0; k < 3; ++k) {
      m[r][k] = T(p[k]) - T(e[k]);
      lift += m[r][k] * m[r][k];
    }
    m[r][3] = lift;
  }
  // Laplace expansion along the last column.
  T det = 0;
  for (int r = 0; r < 4; ++r) {
    T minor[9];
    int idx = 0;
    for (int rr = 0; rr < 4; ++rr) {
      if (rr == r) continue;
      for (int k = 0; k < 3; ++k) minor[idx++] = m[rr][k];
    }
    const T sub = det3<T>(minor[0], minor[1], minor[2], minor[3], minor[4], minor[5], minor[6], minor[7], minor[8]);
    // cofactor sign for (r, 3): (-1)^(r+3)
    if ((r + 3) % 2 == 0) {
      det += m[r][3] * sub;
    } else {
      det -= m[r][3] * sub;
    }
  }
  return -det;
}

using Q = mpq_class;
using Q3 = std::array<Q, 3>;

Q3 to_q(const Vec3& v) { return {Q(v[0]), Q(v[1]), Q(v[2])}; }

}  // namespace

int orient2d(const Vec2& a, const Vec2& b, const Vec2& c) {
  const double l = (b[0] - a[0]) * (c[1] - a[1]);
  const double r = (b[1] - a[1]) * (c[0] - a[0]);
  const double det = l - r;
  const double bound = 8.0 * kEps * (std::abs(l) + std::abs(r));
  if (std::abs(det) > bound) return det > 0 ? 1 : -1;
  return sign(orient2d_t<Q>(a, b, c));
}

int incircle(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  const double adx = a[0] - d[0], ady = a[1] - d[1];
  const double bdx = b[0] - d[0], bdy = b[1] - d[1];
  const double cdx = c[0] - d[0], cdy = c[1] - d[1];
  const double alift = adx * adx + ady * ady;
  const double blift = bdx * bdx + bdy * bdy;
  const double clift = cdx * cdx + cdy * cdy;
  const double det = alift * (bdx * cdy - bdy * cdx) + blift * (cdx * ady - cdy * adx) +
                     clift * (adx * bdy - ady * bdx);
  const double permanent = alift * (std::abs(bdx * cdy) + std::abs(bdy * cdx)) +
                           blift * (std::abs(cdx * ady) + std::abs(cdy * adx)) +
                           clift * (std::abs(adx * bdy) + std::abs(ady * bdx));
  if (std::abs(det) > 32.0 * kEps * permanent) return det > 0 ? 1 : -1;
  return sign(incircle_t<Q>(a, b, c, d));
}

int strictly_between(const Vec2& a, const Vec2& b, const Vec2& p) {
  const Q t1 = (Q(p[0]) - Q(a[0])) * (Q(b[0]) - Q(a[0])) + (Q(p[1]) - Q(a[1])) * (Q(b[1]) - Q(a[1]));
  const Q t2 = (Q(p[0]) - Q(b[0])) * (Q(a[0]) - Q(b[0])) + (Q(p[1]) - Q(b[1])) * (Q(a[1]) - Q(b[1]));
  return t1 > 0 && t2 > 0 ? 1 : 0;
}

int orient3d(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
  const double bx = b[0] - a[0], by = b[1] - a[1], bz = b[2] - a[2];
  const double cx = c[0] - a[0], cy = c[1] - a[1], cz = c[2] - a[2];
  const double dx = d[0] - a[0], dy = d[1] - a[1], dz = d[2] - a[2];
  const double det = bx * (cy * dz - cz * dy) - by * (cx * dz - cz * dx) + bz * (cx * dy - cy * dx);
  const double permanent = std::abs(bx) * (std::abs(cy * dz) + std::abs(cz * dy)) +
                           std::abs(by) * (std::abs(cx * dz) + std::abs(cz * dx)) +
                           std::abs(bz) * (std::abs(cx * dy) + std::abs(cy * dx));
  if (std::abs(det) > 16.0 * kEps * permanent) return det > 0 ? 1 : -1;
  return sign(orient3d_t<Q>(a, b, c, d));
}

int insphere(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d, const Vec3& e) {
  const double det = insphere_t<double>(a, b, c, d, e);
  // Permanent: same expansion with absolute values.
  double permanent = 0.0;
  {
    const Vec3* pts[4] = {&a, &b, &c, &d};
    double m[4][4];
    for (int r = 0; r < 4; ++r) {
      double lift = 0;
      for (int k = 0; k < 3; ++k) {
        m[r][k] = std::abs((*pts[r])[k] - e[k]);
        lift += m[r][k] * m[r][k];
      }
      m[r][3] = lift;
    }
    for (int r = 0; r < 4; ++r) {
      double minor[9];
      int idx = 0;
      for (int rr = 0; rr < 4; ++rr) {
        if (rr == r) continue;
        for (int k = 0; k < 3; ++k) minor[idx++] = m[rr][k];
      }
      const double sub = minor[0] * (minor[4] * minor[8] + minor[5] * minor[7]) +
                         minor[1] * (minor[3] * minor[8] + minor[5] * minor[6]) +
                         minor[2] * (minor[3] * minor[7] + minor[4] * minor[6]);
      permanent += m[r][3] * sub;
    }
  }
  if (std::abs(det) > 64.0 * kEps * permanent) return det > 0 ? 1 : -1;
  return sign(insphere_t<Q>(a, b, c, d, e));
}

int in_circumcircle3d(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& p) {
  // The sphere through a, b, c and a point q off their plane meets the plane
  // in the circumcircle of abc, so the planar test reduces to insphere.
  const Q3 qa = to_q(a), qb = to_q(b), qc = to_q(c), qp = to_q(p);
  const Q3 u{qb[0] - qa[0], qb[1] - qa[1], qb[2] - qa[2]};
  const Q3 v{qc[0] - qa[0], qc[1] - qa[1], qc[2] - qa[2]};
  const Q3 n{u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]};
  const Q3 q{qa[0] + n[0], qa[1] + n[1], qa[2] + n[2]};
  // orient3d(a, b, c, q) = |n|^2 > 0 for a non-degenerate triangle.
  return sign(insphere_t<Q>(qa, qb, qc, q, qp));
}

}  // namespace topovox::detail
