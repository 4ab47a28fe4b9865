#include "topovox/delaunay.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "predicates.hpp"
#include "topovox/error.hpp"

namespace topovox {
namespace {

constexpr double kMergeTolerance = 1e-9;

constexpr int kInfinite = -1;
constexpr double kJitterScale = 1e-12;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double unit_hash(std::uint64_t key) {
  return static_cast<double>(splitmix64(key) >> 11) * 0x1.0p-53 * 2.0 - 1.0;
}

std::uint64_t morton_spread(std::uint64_t v, int dim) {
  std::uint64_t out = 0;
  for (int bit = 0; bit < 64 / dim; ++bit) out |= ((v >> bit) & 1ULL) << (bit * dim);
  return out;
}

template <int D>
using Point = std::array<double, D>;

template <int D>
struct Cell {
  std::array<int, D + 1> v;
  std::array<int, D + 1> n;
  bool alive = true;

  bool ghost() const {
    for (int x : v) {
      if (x == kInfinite) return true;
    }
    return false;
  }
};

template <int D>
int orient(const std::array<const Point<D>*, D + 1>& p) {
  if constexpr (D == 2) {
    return detail::orient2d(*p[0], *p[1], *p[2]);
  } else {
    return detail::orient3d(*p[0], *p[1], *p[2], *p[3]);
  }
}

template <int D>
class IncrementalDelaunay {
 public:
  explicit IncrementalDelaunay(std::vector<Point<D>> points) : pts_(std::move(points)) {}

  void run() {
    const auto order = insertion_order();
    auto seed = initial_simplex(order);
    std::vector<bool> inserted(pts_.size(), false);
    for (int s : seed) inserted[static_cast<std::size_t>(s)] = true;
    build_initial(seed);
    for (int idx : order) {
      if (!inserted[static_cast<std::size_t>(idx)]) insert(idx);
    }
  }

  std::vector<std::array<std::uint32_t, 4>> finite_cells() const {
    std::vector<std::array<std::uint32_t, 4>> out;
    for (const auto& c : cells_) {
      if (!c.alive || c.ghost()) continue;
      std::array<std::uint32_t, 4> cell{};
      for (int k = 0; k <= D; ++k) cell[static_cast<std::size_t>(k)] = static_cast<std::uint32_t>(c.v[k]);
      std::sort(cell.begin(), cell.begin() + D + 1);
      out.push_back(cell);
    }
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  std::vector<int> insertion_order() const {
    Point<D> lo, hi;
    lo.fill(INFINITY);
    hi.fill(-INFINITY);
    for (const auto& p : pts_) {
      for (int k = 0; k < D; ++k) {
        lo[k] = std::min(lo[k], p[k]);
        hi[k] = std::max(hi[k], p[k]);
      }
    }
    const double bits = D == 2 ? 65535.0 : 2047.0;
    std::vector<std::pair<std::uint64_t, int>> keyed(pts_.size());
    for (std::size_t i = 0; i < pts_.size(); ++i) {
      std::uint64_t key = 0;
      for (int k = 0; k < D; ++k) {
        const double span = hi[k] - lo[k];
        const double q = span > 0 ? (pts_[i][k] - lo[k]) / span : 0.0;
        key |= morton_spread(static_cast<std::uint64_t>(q * bits), D) << k;
      }
      keyed[i] = {key, static_cast<int>(i)};
    }
    std::sort(keyed.begin(), keyed.end());
    std::vector<int> order(pts_.size());
    for (std::size_t i = 0; i < keyed.size(); ++i) order[i] = keyed[i].second;
    return order;
  }

  std::array<int, D + 1> initial_simplex(const std::vector<int>& order) const {
    std::array<int, D + 1> s{};
    s[0] = order[0];
    std::size_t found = 1;
    for (std::size_t i = 1; i < order.size() && found < static_cast<std::size_t>(D + 1); ++i) {
      const int cand = order[i];
      bool ok = false;
      const Point<D>& a = pts_[static_cast<std::size_t>(s[0])];
      const Point<D>& c = pts_[static_cast<std::size_t>(cand)];
      if (found == 1) {
        ok = c != a;
      } else if (found == 2) {
        const Point<D>& b = pts_[static_cast<std::size_t>(s[1])];
        if constexpr (D == 2) {
          ok = detail::orient2d(a, b, c) != 0;
        } else {
          // non-collinear: some coordinate-plane projection has nonzero area
          for (int x = 0; x < 3 && !ok; ++x) {
            const int y = (x + 1) % 3;
            ok = detail::orient2d({a[x], a[y]}, {b[x], b[y]}, {c[x], c[y]}) != 0;
          }
        }
      } else {
        if constexpr (D == 3) {
          ok = detail::orient3d(a, pts_[static_cast<std::size_t>(s[1])], pts_[static_cast<std::size_t>(s[2])], c) != 0;
        }
      }
      if (ok) s[found++] = cand;
    }
    if (found < static_cast<std::size_t>(D + 1)) {
      fail(ErrorCode::kDegenerateGeometry, "points are not affinely independent");
    }
    if (orient_of(s) < 0) std::swap(s[0], s[1]);
    return s;
  }

  int orient_of(const std::array<int, D + 1>& v, int replace_slot = -1, int with = -1) const {
    std::array<const Point<D>*, D + 1> p;
    for (int k = 0; k <= D; ++k) {
      const int id = k == replace_slot ? with : v[k];
      p[static_cast<std::size_t>(k)] = &pts_[static_cast<std::size_t>(id)];
    }
    return orient<D>(p);
  }

  void build_initial(const std::array<int, D + 1>& s) {
    Cell<D> real;
    real.v = s;
    real.n.fill(-1);
    cells_.push_back(real);
    std::vector<int> fresh{0};
    for (int i = 0; i <= D; ++i) {
      // Ghost across facet i: same vertices with slot i replaced by infinity,
      // keeping orientation consistent; the facet is shared with the real cell.
      Cell<D> g;
      g.v = s;
      g.v[i] = kInfinite;
      g.n.fill(-1);
      // Replacing a vertex with one on the other side flips orientation, so
      // swap two finite slots to restore it.
      const int a = (i + 1) % (D + 1), b = (i + 2) % (D + 1);
      std::swap(g.v[a], g.v[b]);
      cells_.push_back(g);
      fresh.push_back(static_cast<int>(cells_.size() - 1));
    }
    link(fresh);
    last_ = 0;
  }

  // Matches facets among `ids` that have unset neighbour slots.
  void link(const std::vector<int>& ids) {
    struct Facet {
      std::array<int, D> key;
      int cell;
      int slot;
    };
    std::vector<Facet> open;
    for (int id : ids) {
      for (int i = 0; i <= D; ++i) {
        if (cells_[static_cast<std::size_t>(id)].n[i] != -1) continue;
        Facet f;
        int k = 0;
        for (int j = 0; j <= D; ++j) {
          if (j != i) f.key[static_cast<std::size_t>(k++)] = cells_[static_cast<std::size_t>(id)].v[j];
        }
        std::sort(f.key.begin(), f.key.end());
        f.cell = id;
        f.slot = i;
        open.push_back(f);
      }
    }
    std::sort(open.begin(), open.end(), [](const Facet& x, const Facet& y) { return x.key < y.key; });
    for (std::size_t i = 0; i + 1 < open.size(); ++i) {
      if (open[i].key == open[i + 1].key) {
        cells_[static_cast<std::size_t>(open[i].cell)].n[open[i].slot] = open[i + 1].cell;
        cells_[static_cast<std::size_t>(open[i + 1].cell)].n[open[i + 1].slot] = open[i].cell;
        ++i;
      }
    }
  }

  int infinite_slot(const Cell<D>& c) const {
    for (int k = 0; k <= D; ++k) {
      if (c.v[k] == kInfinite) return k;
    }
    return -1;
  }

  bool in_conflict(int cell_id, int p) const {
    const Cell<D>& c = cells_[static_cast<std::size_t>(cell_id)];
    const Point<D>& q = pts_[static_cast<std::size_t>(p)];
    const int inf = infinite_slot(c);
    if (inf < 0) {
      if constexpr (D == 2) {
        return detail::incircle(pts_[static_cast<std::size_t>(c.v[0])], pts_[static_cast<std::size_t>(c.v[1])],
                                pts_[static_cast<std::size_t>(c.v[2])], q) > 0;
      } else {
        return detail::insphere(pts_[static_cast<std::size_t>(c.v[0])], pts_[static_cast<std::size_t>(c.v[1])],
                                pts_[static_cast<std::size_t>(c.v[2])], pts_[static_cast<std::size_t>(c.v[3])],
                                q) > 0;
      }
    }
    const int o = orient_of(c.v, inf, p);
    if (o != 0) return o > 0;
    std::array<int, D> f{};
    int k = 0;
    for (int j = 0; j <= D; ++j) {
      if (j != inf) f[static_cast<std::size_t>(k++)] = c.v[j];
    }
    if constexpr (D == 2) {
      return detail::strictly_between(pts_[static_cast<std::size_t>(f[0])], pts_[static_cast<std::size_t>(f[1])], q) > 0;
    } else {
      return detail::in_circumcircle3d(pts_[static_cast<std::size_t>(f[0])], pts_[static_cast<std::size_t>(f[1])],
                                       pts_[static_cast<std::size_t>(f[2])], q) > 0;
    }
  }

  int locate(int p) {
    int current = last_;
    if (!cells_[static_cast<std::size_t>(current)].alive) current = first_alive();
    {
      const Cell<D>& c = cells_[static_cast<std::size_t>(current)];
      const int inf = infinite_slot(c);
      if (inf >= 0) current = c.n[inf];
    }
    std::size_t steps = 0;
    const std::size_t limit = 16 * cells_.size() + 64;
    while (true) {
      const Cell<D>& c = cells_[static_cast<std::size_t>(current)];
      const int start = static_cast<int>(next_random() % (D + 1));
      int next = -1;
      for (int t = 0; t <= D; ++t) {
        const int i = (start + t) % (D + 1);
        if (orient_of(c.v, i, p) < 0) {
          next = c.n[i];
          break;
        }
      }
      if (next < 0) return current;
      if (cells_[static_cast<std::size_t>(next)].ghost()) return next;
      current = next;
      if (++steps > limit) return brute_force_conflict(p);
    }
  }

  int brute_force_conflict(int p) const {
    for (std::size_t i = 0; i < cells_.size(); ++i) {
      if (cells_[i].alive && in_conflict(static_cast<int>(i), p)) return static_cast<int>(i);
    }
    fail(ErrorCode::kDegenerateGeometry, "point location failed");
  }

  int first_alive() const {
    for (std::size_t i = 0; i < cells_.size(); ++i) {
      if (cells_[i].alive && !cells_[i].ghost()) return static_cast<int>(i);
    }
    return 0;
  }

  std::uint64_t next_random() {
    rng_ = splitmix64(rng_);
    return rng_;
  }

  int new_cell(const Cell<D>& c) {
    if (!free_.empty()) {
      const int id = free_.back();
      free_.pop_back();
      cells_[static_cast<std::size_t>(id)] = c;
      return id;
    }
    cells_.push_back(c);
    return static_cast<int>(cells_.size() - 1);
  }

  void insert(int p) {
    int seed = locate(p);
    if (!in_conflict(seed, p)) seed = brute_force_conflict(p);

    cavity_.clear();
    boundary_.clear();
    stack_.clear();
    stack_.push_back(seed);
    mark_.resize(cells_.size(), 0);
    ++epoch_;
    mark_[static_cast<std::size_t>(seed)] = epoch_;
    while (!stack_.empty()) {
      const int id = stack_.back();
      stack_.pop_back();
      cavity_.push_back(id);
      for (int i = 0; i <= D; ++i) {
        const int nb = cells_[static_cast<std::size_t>(id)].n[i];
        if (mark_[static_cast<std::size_t>(nb)] == epoch_) continue;
        if (in_conflict(nb, p)) {
          mark_[static_cast<std::size_t>(nb)] = epoch_;
          stack_.push_back(nb);
        } else {
          boundary_.push_back({id, i});
        }
      }
    }

    std::vector<int> fresh;
    fresh.reserve(boundary_.size());
    struct Face {
      Cell<D> old;
      int slot;
      int outside;
      int back_slot;
    };
    std::vector<Face> faces;
    faces.reserve(boundary_.size());
    for (auto [id, slot] : boundary_) {
      const Cell<D>& old = cells_[static_cast<std::size_t>(id)];
      const int outside = old.n[slot];
      int back_slot = 0;
      while (cells_[static_cast<std::size_t>(outside)].n[back_slot] != id) ++back_slot;
      faces.push_back({old, slot, outside, back_slot});
    }
    for (int id : cavity_) {
      cells_[static_cast<std::size_t>(id)].alive = false;
      free_.push_back(id);
    }
    for (const auto& f : faces) {
      Cell<D> c;
      c.v = f.old.v;
      c.v[f.slot] = p;
      c.n.fill(-1);
      c.n[f.slot] = f.outside;
      const int id = new_cell(c);
      cells_[static_cast<std::size_t>(f.outside)].n[f.back_slot] = id;
      fresh.push_back(id);
    }
    link(fresh);
    last_ = fresh.front();
  }

  std::vector<Point<D>> pts_;
  std::vector<Cell<D>> cells_;
  std::vector<int> free_;
  std::vector<int> cavity_, stack_;
  std::vector<std::pair<int, int>> boundary_;
  std::vector<std::uint32_t> mark_;
  std::uint32_t epoch_ = 0;
  int last_ = 0;
  std::uint64_t rng_ = 0x5eed;
};

void check_affine_rank(const PointCloud& cloud) {
  const auto n = static_cast<Eigen::Index>(cloud.size());
  const auto d = static_cast<Eigen::Index>(cloud.dim);
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> x(cloud.coords.data(), n,
                                                                                              d);
  const Eigen::MatrixXd centered = x.rowwise() - x.colwise().mean();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(centered.transpose() * centered);
  const auto& ev = solver.eigenvalues();
  if (!(ev(0) > 1e-18 * ev(d - 1)) || !(ev(d - 1) > 0)) {
    fail(ErrorCode::kDegenerateGeometry, "all points lie in a lower-dimensional affine subspace");
  }
}

template <int D>
std::vector<std::array<std::uint32_t, 4>> triangulate(const PointCloud& unique) {
  std::vector<double> lo(unique.dim, INFINITY), hi(unique.dim, -INFINITY);
  for (std::size_t i = 0; i < unique.size(); ++i) {
    for (std::size_t k = 0; k < unique.dim; ++k) {
      lo[k] = std::min(lo[k], unique.point(i)[k]);
      hi[k] = std::max(hi[k], unique.point(i)[k]);
    }
  }
  double extent = 0.0;
  for (std::size_t k = 0; k < unique.dim; ++k) extent = std::max(extent, hi[k] - lo[k]);
  std::vector<Point<D>> pts(unique.size());
  for (std::size_t i = 0; i < unique.size(); ++i) {
    for (int k = 0; k < D; ++k) {
      const double jitter = kJitterScale * extent * unit_hash(i * D + static_cast<std::size_t>(k));
      pts[i][static_cast<std::size_t>(k)] = unique.point(i)[static_cast<std::size_t>(k)] + jitter;
    }
  }
  IncrementalDelaunay<D> dt(std::move(pts));
  dt.run();
  return dt.finite_cells();
}

}  // namespace

PointCloud merge_duplicates(const PointCloud& points, std::vector<std::uint32_t>& vertex_of_input) {
  const std::size_t n = points.size(), dim = points.dim;
  double extent = 0.0;
  for (std::size_t a = 0; a < dim; ++a) {
    double lo = INFINITY, hi = -INFINITY;
    for (std::size_t i = 0; i < n; ++i) {
      lo = std::min(lo, points.coords[i * dim + a]);
      hi = std::max(hi, points.coords[i * dim + a]);
    }
    if (n > 0) extent = std::max(extent, hi - lo);
  }
  // Points this close cannot be told apart by the jittered predicates.
  const double tol = kMergeTolerance * extent;
  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    const double xa = points.coords[a * dim], xb = points.coords[b * dim];
    return xa < xb || (xa == xb && a < b);
  });
  constexpr std::uint32_t kUnset = std::numeric_limits<std::uint32_t>::max();
  std::vector<std::uint32_t> representative(n, kUnset);
  for (std::size_t k = 0; k < n; ++k) {
    const auto i = order[k];
    if (representative[i] != kUnset) continue;
    representative[i] = i;
    const auto pi = points.point(i);
    for (std::size_t m = k + 1; m < n && points.coords[order[m] * dim] - pi[0] <= tol; ++m) {
      const auto j = order[m];
      if (representative[j] != kUnset) continue;
      const auto pj = points.point(j);
      double d = 0.0;
      for (std::size_t a = 0; a < dim; ++a) d = std::max(d, std::abs(pi[a] - pj[a]));
      if (d <= tol) representative[j] = i;
    }
  }
  PointCloud unique;
  unique.dim = points.dim;
  unique.scale_note = points.scale_note;
  std::vector<std::uint32_t> slot(n, 0);
  vertex_of_input.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (representative[i] == i) {
      slot[i] = static_cast<std::uint32_t>(unique.size());
      unique.push_back(points.point(i));
    }
    vertex_of_input[i] = slot[representative[i]];
  }
  return unique;
}

Triangulation delaunay(const PointCloud& points) {
  if (points.dim != 2 && points.dim != 3) fail(ErrorCode::kInvalidParameter, "delaunay supports 2D and 3D clouds");
  for (double v : points.coords) {
    if (!std::isfinite(v)) fail(ErrorCode::kInvalidParameter, "non-finite coordinate");
  }
  Triangulation tri;
  tri.dim = points.dim;
  tri.vertices = merge_duplicates(points, tri.vertex_of_input);
  if (tri.vertices.size() < tri.dim + 1) {
    fail(ErrorCode::kDegenerateGeometry, "need at least dim+1 distinct points");
  }
  check_affine_rank(tri.vertices);
  tri.cells = tri.dim == 2 ? triangulate<2>(tri.vertices) : triangulate<3>(tri.vertices);
  return tri;
}

}  // namespace topovox
