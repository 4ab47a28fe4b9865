#pragma once

#include <array>

namespace topovox::detail {

using Vec2 = std::array<double, 2>;
using Vec3 = std::array<double, 3>;

// All predicates return the exact sign (-1, 0, +1). A floating-point filter
// decides clear cases; the rest are evaluated in rational arithmetic.

/// +1 when (a, b, c) turns counter-clockwise.
int orient2d(const Vec2& a, const Vec2& b, const Vec2& c);
/// +1 when d is strictly inside the circle through counter-clockwise a, b, c.
int incircle(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d);
/// +1 when p lies strictly inside the open segment (a, b); assumes collinearity.
int strictly_between(const Vec2& a, const Vec2& b, const Vec2& p);

/// Sign of det[b - a, c - a, d - a].
int orient3d(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d);
/// +1 when e is strictly inside the sphere through a, b, c, d, given
/// orient3d(a, b, c, d) > 0.
int insphere(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d, const Vec3& e);
/// +1 when p (coplanar with a, b, c) is strictly inside their circumcircle.
int in_circumcircle3d(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& p);

}  // namespace topovox::detail
