#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "topovox/error.hpp"
#include "topovox/homology.hpp"

namespace topovox {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Sphere {
  std::array<double, 3> center{};
  double radius2 = 0.0;
  bool flat = false;
};

// Smallest circumsphere of k+1 points (k <= 3): centre in their affine hull.
Sphere circumsphere(const PointCloud& pts, const std::uint32_t* v, int k) {
  const std::size_t d = pts.dim;
  Sphere s;
  const auto a = pts.point(v[0]);
  for (std::size_t j = 0; j < d; ++j) s.center[j] = a[j];
  if (k == 0) return s;

  double u[3][3] = {};
  for (int i = 0; i < k; ++i) {
    const auto b = pts.point(v[i + 1]);
    for (std::size_t j = 0; j < d; ++j) u[i][j] = b[j] - a[j];
  }
  double g[3][3], rhs[3];
  double diag_product = 1.0;
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      g[i][j] = 0.0;
      for (std::size_t c = 0; c < d; ++c) g[i][j] += u[i][c] * u[j][c];
    }
    rhs[i] = 0.5 * g[i][i];
    diag_product *= g[i][i];
  }
  // Gaussian elimination with partial pivoting on the k x k Gram system.
  double det = 1.0;
  for (int col = 0; col < k; ++col) {
    int best = col;
    for (int r = col + 1; r < k; ++r) {
      if (std::abs(g[r][col]) > std::abs(g[best][col])) best = r;
    }
    if (best != col) {
      std::swap(g[best], g[col]);
      std::swap(rhs[best], rhs[col]);
      det = -det;
    }
    det *= g[col][col];
    if (g[col][col] == 0.0) break;
    for (int r = col + 1; r < k; ++r) {
      const double f = g[r][col] / g[col][col];
      for (int c = col; c < k; ++c) g[r][c] -= f * g[col][c];
      rhs[r] -= f * rhs[col];
    }
  }
  if (!(std::abs(det) > kAlphaDegenerateVolume * diag_product)) {
    s.flat = true;
    s.radius2 = kInf;
    return s;
  }
  double lambda[3];
  for (int r = k - 1; r >= 0; --r) {
    double acc = rhs[r];
    for (int c = r + 1; c < k; ++c) acc -= g[r][c] * lambda[c];
    lambda[r] = acc / g[r][r];
  }
  double offset[3] = {};
  for (int i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < d; ++j) offset[j] += lambda[i] * u[i][j];
  }
  for (std::size_t j = 0; j < d; ++j) {
    s.center[j] += offset[j];
    s.radius2 += offset[j] * offset[j];
  }
  return s;
}

double dist2(const Sphere& s, std::span<const double> p) {
  double acc = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j) {
    const double diff = p[j] - s.center[j];
    acc += diff * diff;
  }
  return acc;
}

struct Level {
  int k = 0;  // simplex dimension
  std::vector<std::array<std::uint32_t, 4>> simplices;
  std::vector<double> value;
  std::vector<bool> flat;
  // cofaces in the level above, CSR
  std::vector<std::uint32_t> coface_start;
  std::vector<std::uint32_t> coface;
  std::vector<std::uint32_t> opposite;
};

// Builds level k-1 from level k.
Level faces_of(const Level& upper) {
  struct Entry {
    std::array<std::uint32_t, 4> key;
    std::uint32_t coface;
    std::uint32_t opposite;
  };
  const int k = upper.k;
  std::vector<Entry> entries;
  entries.reserve(upper.simplices.size() * static_cast<std::size_t>(k + 1));
  for (std::size_t s = 0; s < upper.simplices.size(); ++s) {
    const auto& v = upper.simplices[s];
    for (int omit = 0; omit <= k; ++omit) {
      Entry e{};
      int m = 0;
      for (int j = 0; j <= k; ++j) {
        if (j != omit) e.key[static_cast<std::size_t>(m++)] = v[static_cast<std::size_t>(j)];
      }
      e.coface = static_cast<std::uint32_t>(s);
      e.opposite = v[static_cast<std::size_t>(omit)];
      entries.push_back(e);
    }
  }
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    return a.key != b.key ? a.key < b.key : a.coface < b.coface;
  });
  Level low;
  low.k = k - 1;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (i == 0 || entries[i].key != entries[i - 1].key) {
      low.simplices.push_back(entries[i].key);
      low.coface_start.push_back(static_cast<std::uint32_t>(low.coface.size()));
    }
    low.coface.push_back(entries[i].coface);
    low.opposite.push_back(entries[i].opposite);
  }
  low.coface_start.push_back(static_cast<std::uint32_t>(low.coface.size()));
  return low;
}

FilteredSimplicialComplex assemble(const PointCloud& pts, std::vector<std::array<std::uint32_t, 4>> top, int dim) {
  std::vector<Level> levels(static_cast<std::size_t>(dim) + 1);
  levels[static_cast<std::size_t>(dim)].k = dim;
  levels[static_cast<std::size_t>(dim)].simplices = std::move(top);
  for (int k = dim; k > 0; --k) levels[static_cast<std::size_t>(k - 1)] = faces_of(levels[static_cast<std::size_t>(k)]);

  // Top-down: own radius unless some coface vertex lies strictly inside the
  // circumsphere, in which case the smallest such coface value is inherited.
  for (int k = dim; k >= 0; --k) {
    Level& L = levels[static_cast<std::size_t>(k)];
    const std::size_t n = L.simplices.size();
    L.value.assign(n, 0.0);
    L.flat.assign(n, false);
    if (k == 0) continue;
    const Level* up = k < dim ? &levels[static_cast<std::size_t>(k + 1)] : nullptr;
    for (std::size_t s = 0; s < n; ++s) {
      const Sphere sphere = circumsphere(pts, L.simplices[s].data(), k);
      double inherited = kInf;
      bool attached = false;
      if (up != nullptr) {
        for (auto c = L.coface_start[s]; c < L.coface_start[s + 1]; ++c) {
          const auto coface = L.coface[c];
          if (up->flat[coface]) continue;
          if (sphere.flat || dist2(sphere, pts.point(L.opposite[c])) < sphere.radius2) {
            attached = true;
            inherited = std::min(inherited, up->value[coface]);
          }
        }
      }
      if (attached) {
        L.value[s] = inherited;
      } else if (sphere.flat) {
        L.flat[s] = true;
        L.value[s] = 0.0;  // raised to the max of its faces below
      } else {
        L.value[s] = std::sqrt(sphere.radius2);
      }
    }
  }
  // Bottom-up: enforce face monotonicity.
  for (int k = 0; k < dim; ++k) {
    const Level& L = levels[static_cast<std::size_t>(k)];
    Level& up = levels[static_cast<std::size_t>(k + 1)];
    for (std::size_t s = 0; s < L.simplices.size(); ++s) {
      for (auto c = L.coface_start[s]; c < L.coface_start[s + 1]; ++c) {
        double& v = up.value[L.coface[c]];
        v = std::max(v, L.value[s]);
      }
    }
  }

  FilteredSimplicialComplex out;
  out.dim = static_cast<std::size_t>(dim);
  for (const auto& L : levels) {
    for (std::size_t s = 0; s < L.simplices.size(); ++s) {
      Simplex simplex;
      simplex.vertices = L.simplices[s];
      simplex.dim = static_cast<std::uint8_t>(L.k);
      simplex.value = L.value[s];
      out.simplices.push_back(simplex);
    }
  }
  out.sort();
  return out;
}

}  // namespace

void FilteredSimplicialComplex::add(std::initializer_list<std::uint32_t> vertices, double value) {
  if (vertices.size() == 0 || vertices.size() > 4) fail(ErrorCode::kInvalidParameter, "simplex must have 1-4 vertices");
  Simplex s;
  std::copy(vertices.begin(), vertices.end(), s.vertices.begin());
  std::sort(s.vertices.begin(), s.vertices.begin() + static_cast<std::ptrdiff_t>(vertices.size()));
  s.dim = static_cast<std::uint8_t>(vertices.size() - 1);
  s.value = value;
  simplices.push_back(s);
  dim = std::max(dim, static_cast<std::size_t>(s.dim));
}

void FilteredSimplicialComplex::sort() {
  std::sort(simplices.begin(), simplices.end(), [](const Simplex& a, const Simplex& b) {
    if (a.value != b.value) return a.value < b.value;
    if (a.dim != b.dim) return a.dim < b.dim;
    return a.vertices < b.vertices;
  });
}

std::size_t FilteredCubicalComplex::cell_count() const {
  if (rows == 0 || cols == 0) return 0;
  return rows * cols + rows * (cols - 1) + (rows - 1) * cols + (rows - 1) * (cols - 1);
}

FilteredSimplicialComplex alpha_filtration(const Triangulation& tri) {
  return assemble(tri.vertices, tri.cells, static_cast<int>(tri.dim));
}

FilteredSimplicialComplex alpha_filtration(const PointCloud& points) {
  if (points.dim != 2 && points.dim != 3) fail(ErrorCode::kInvalidParameter, "alpha filtration needs a 2D or 3D cloud");
  if (points.size() == 0) fail(ErrorCode::kEmptyInput, "empty point cloud");
  std::vector<std::uint32_t> map;
  const PointCloud unique = merge_duplicates(points, map);
  if (unique.size() <= points.dim) {
    // Too few points for a full-dimensional cell: the whole set is one simplex.
    std::array<std::uint32_t, 4> cell{};
    std::iota(cell.begin(), cell.begin() + static_cast<std::ptrdiff_t>(unique.size()), 0u);
    return assemble(unique, {cell}, static_cast<int>(unique.size()) - 1);
  }
  return alpha_filtration(delaunay(points));
}

FilteredCubicalComplex cubical_filtration(std::vector<double> values, std::size_t rows, std::size_t cols) {
  if (values.size() != rows * cols) fail(ErrorCode::kInvalidParameter, "grid size does not match rows*cols");
  if (values.size() < 2) fail(ErrorCode::kTooShort, "grid needs at least two cells");
  for (double v : values) {
    if (!std::isfinite(v)) fail(ErrorCode::kInvalidParameter, "non-finite grid value");
  }
  FilteredCubicalComplex out;
  out.rows = rows;
  out.cols = cols;
  out.values = std::move(values);
  return out;
}

FilteredCubicalComplex cubical_sublevel_filtration(const SpectrogramSurface& surface) {
  std::vector<double> values(surface.power.size());
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = -std::log(surface.power[i] + kPowerFloor);
  return cubical_filtration(std::move(values), surface.n_frames, surface.n_bins);
}

}  // namespace topovox
