#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <unordered_map>

#include "topovox/csv.hpp"
#include "topovox/error.hpp"
#include "topovox/homology.hpp"

namespace topovox {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Cells listed in filtration order; boundaries refer to earlier positions.
struct BoundaryMatrix {
  std::vector<std::uint8_t> dim;
  std::vector<double> value;
  std::vector<std::uint32_t> start{0};
  std::vector<std::uint32_t> rows;

  std::size_t size() const { return dim.size(); }
  void add_cell(std::uint8_t d, double v, std::vector<std::uint32_t>& boundary) {
    std::sort(boundary.begin(), boundary.end());
    dim.push_back(d);
    value.push_back(v);
    rows.insert(rows.end(), boundary.begin(), boundary.end());
    start.push_back(static_cast<std::uint32_t>(rows.size()));
  }
};

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0u); }
  std::uint32_t find(std::uint32_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  // Roots are always the elder cell (smallest filtration position).
  void link(std::uint32_t elder, std::uint32_t younger) { parent_[younger] = elder; }

 private:
  std::vector<std::uint32_t> parent_;
};

void symmetric_difference(std::vector<std::uint32_t>& column, const std::vector<std::uint32_t>& other,
                          std::vector<std::uint32_t>& scratch) {
  scratch.clear();
  std::set_symmetric_difference(column.begin(), column.end(), other.begin(), other.end(),
                                std::back_inserter(scratch));
  column.swap(scratch);
}

PersistenceDiagram reduce(const BoundaryMatrix& m) {
  const std::size_t n = m.size();
  PersistenceDiagram diagram;
  if (n == 0) return diagram;
  diagram.min_value = *std::min_element(m.value.begin(), m.value.end());
  diagram.max_value = *std::max_element(m.value.begin(), m.value.end());
  const int top = *std::max_element(m.dim.begin(), m.dim.end());

  constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();
  std::vector<std::uint32_t> partner(n, kNone);  // birth <-> death position
  std::vector<bool> cleared(n, false);

  auto emit = [&](std::uint32_t birth, std::uint32_t death) {
    partner[birth] = death;
    partner[death] = birth;
    if (m.value[birth] < m.value[death]) {
      diagram.points.push_back({m.value[birth], m.value[death], m.dim[birth]});
    }
  };

  // Twist: highest dimension first so that pivots clear lower columns.
  std::vector<std::uint32_t> pivot_owner(n, kNone);
  std::vector<std::vector<std::uint32_t>> reduced(n);
  std::vector<std::uint32_t> column, scratch;
  for (int d = top; d >= 2; --d) {
    for (std::uint32_t j = 0; j < n; ++j) {
      if (m.dim[j] != d || cleared[j]) continue;
      column.assign(m.rows.begin() + m.start[j], m.rows.begin() + m.start[j + 1]);
      while (!column.empty() && pivot_owner[column.back()] != kNone) {
        symmetric_difference(column, reduced[pivot_owner[column.back()]], scratch);
      }
      if (column.empty()) continue;
      const std::uint32_t pivot = column.back();
      pivot_owner[pivot] = j;
      cleared[pivot] = true;
      emit(pivot, j);
      reduced[j] = column;
    }
    // Columns of dimension d are no longer needed once d-1 is processed.
    for (std::uint32_t j = 0; j < n; ++j) {
      if (m.dim[j] == d + 1) std::vector<std::uint32_t>().swap(reduced[j]);
    }
  }

  // Edges by union-find with the elder rule.
  UnionFind uf(n);
  for (std::uint32_t j = 0; j < n; ++j) {
    if (m.dim[j] != 1) continue;
    if (m.start[j + 1] - m.start[j] != 2) fail(ErrorCode::kInvalidFiltration, "edge without two endpoints");
    const auto a = uf.find(m.rows[m.start[j]]);
    const auto b = uf.find(m.rows[m.start[j] + 1]);
    if (a == b) continue;  // positive edge
    const auto elder = std::min(a, b), younger = std::max(a, b);
    uf.link(elder, younger);
    emit(younger, j);
  }

  for (std::uint32_t j = 0; j < n; ++j) {
    if (partner[j] != kNone) continue;
    // Unpaired and not a destroyer: an essential class.
    bool negative = false;
    if (m.dim[j] >= 2 && !cleared[j]) {
      negative = !reduced[j].empty();
    }
    if (!negative) diagram.points.push_back({m.value[j], kInf, m.dim[j]});
  }
  std::stable_sort(diagram.points.begin(), diagram.points.end(),
                   [](const PersistencePair& a, const PersistencePair& b) {
                     if (a.dim != b.dim) return a.dim < b.dim;
                     if (a.birth != b.birth) return a.birth < b.birth;
                     return a.death < b.death;
                   });
  return diagram;
}

std::uint64_t simplex_key(const std::uint32_t* v, int dim) {
  std::uint64_t key = static_cast<std::uint64_t>(dim);
  for (int i = 0; i <= dim; ++i) key = (key << 20) | v[i];
  return key;
}

}  // namespace

PersistenceDiagram compute_persistence(const FilteredSimplicialComplex& complex) {
  const std::size_t n = complex.simplices.size();
  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    const auto& x = complex.simplices[a];
    const auto& y = complex.simplices[b];
    if (x.value != y.value) return x.value < y.value;
    if (x.dim != y.dim) return x.dim < y.dim;
    return x.vertices < y.vertices;
  });

  std::unordered_map<std::uint64_t, std::uint32_t> position;
  position.reserve(n);
  BoundaryMatrix m;
  std::vector<std::uint32_t> boundary;
  for (std::uint32_t pos = 0; pos < n; ++pos) {
    const Simplex& s = complex.simplices[order[pos]];
    if (s.dim > 3) fail(ErrorCode::kInvalidFiltration, "simplex dimension above 3");
    if (!std::isfinite(s.value)) fail(ErrorCode::kInvalidFiltration, "non-finite filtration value");
    for (int i = 0; i <= s.dim; ++i) {
      if (s.vertices[static_cast<std::size_t>(i)] >= (1u << 20)) fail(ErrorCode::kInvalidParameter, "vertex id too large");
      if (i > 0 && s.vertices[static_cast<std::size_t>(i)] <= s.vertices[static_cast<std::size_t>(i - 1)]) {
        fail(ErrorCode::kInvalidFiltration, "simplex vertices must be strictly increasing");
      }
    }
    boundary.clear();
    if (s.dim > 0) {
      std::uint32_t face[3];
      for (int omit = 0; omit <= s.dim; ++omit) {
        int k = 0;
        for (int i = 0; i <= s.dim; ++i) {
          if (i != omit) face[k++] = s.vertices[static_cast<std::size_t>(i)];
        }
        const auto it = position.find(simplex_key(face, s.dim - 1));
        if (it == position.end()) fail(ErrorCode::kInvalidFiltration, "face missing or entering after its coface");
        if (m.value[it->second] > s.value) fail(ErrorCode::kInvalidFiltration, "face value exceeds coface value");
        boundary.push_back(it->second);
      }
    }
    if (s.dim <= 2 && !position.emplace(simplex_key(s.vertices.data(), s.dim), pos).second) {
      fail(ErrorCode::kInvalidFiltration, "duplicate simplex");
    }
    m.add_cell(s.dim, s.value, boundary);
  }
  return reduce(m);
}

PersistenceDiagram compute_persistence(const FilteredCubicalComplex& complex) {
  const std::size_t R = complex.rows, C = complex.cols;
  if (complex.values.size() != R * C || R * C < 1) fail(ErrorCode::kInvalidFiltration, "malformed cubical grid");
  // Cell ids: vertices, horizontal edges, vertical edges, squares.
  const std::size_t nv = R * C;
  const std::size_t nh = R * (C - 1);
  const std::size_t nvert = (R - 1) * C;
  const std::size_t nsq = (R - 1) * (C - 1);
  const std::size_t h0 = nv, v0 = nv + nh, s0 = nv + nh + nvert, n = s0 + nsq;
  std::vector<double> value(n);
  std::vector<std::uint8_t> dim(n);
  const auto& g = complex.values;
  for (std::size_t i = 0; i < nv; ++i) {
    if (!std::isfinite(g[i])) fail(ErrorCode::kInvalidFiltration, "non-finite grid value");
    value[i] = g[i];
    dim[i] = 0;
  }
  for (std::size_t r = 0; r < R; ++r) {
    for (std::size_t c = 0; c + 1 < C; ++c) {
      value[h0 + r * (C - 1) + c] = std::max(g[r * C + c], g[r * C + c + 1]);
      dim[h0 + r * (C - 1) + c] = 1;
    }
  }
  for (std::size_t r = 0; r + 1 < R; ++r) {
    for (std::size_t c = 0; c < C; ++c) {
      value[v0 + r * C + c] = std::max(g[r * C + c], g[(r + 1) * C + c]);
      dim[v0 + r * C + c] = 1;
    }
  }
  for (std::size_t r = 0; r + 1 < R; ++r) {
    for (std::size_t c = 0; c + 1 < C; ++c) {
      value[s0 + r * (C - 1) + c] = std::max(std::max(g[r * C + c], g[r * C + c + 1]),
                                             std::max(g[(r + 1) * C + c], g[(r + 1) * C + c + 1]));
      dim[s0 + r * (C - 1) + c] = 2;
    }
  }
  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    if (value[a] != value[b]) return value[a] < value[b];
    if (dim[a] != dim[b]) return dim[a] < dim[b];
    return a < b;
  });
  std::vector<std::uint32_t> rank(n);
  for (std::uint32_t i = 0; i < n; ++i) rank[order[i]] = i;

  BoundaryMatrix m;
  m.dim.reserve(n);
  m.value.reserve(n);
  m.rows.reserve(2 * (nh + nvert) + 4 * nsq);
  std::vector<std::uint32_t> boundary;
  for (std::uint32_t pos = 0; pos < n; ++pos) {
    const std::size_t id = order[pos];
    boundary.clear();
    if (id >= s0) {
      const std::size_t r = (id - s0) / (C - 1), c = (id - s0) % (C - 1);
      boundary = {rank[h0 + r * (C - 1) + c], rank[h0 + (r + 1) * (C - 1) + c], rank[v0 + r * C + c],
                  rank[v0 + r * C + c + 1]};
    } else if (id >= v0) {
      const std::size_t r = (id - v0) / C, c = (id - v0) % C;
      boundary = {rank[r * C + c], rank[(r + 1) * C + c]};
    } else if (id >= h0) {
      const std::size_t r = (id - h0) / (C - 1), c = (id - h0) % (C - 1);
      boundary = {rank[r * C + c], rank[r * C + c + 1]};
    }
    m.add_cell(dim[id], value[id], boundary);
  }
  return reduce(m);
}

std::vector<PersistencePair> PersistenceDiagram::in_dim(int p) const {
  std::vector<PersistencePair> out;
  for (const auto& q : points) {
    if (q.dim == p) out.push_back(q);
  }
  return out;
}

std::vector<PersistencePair> PersistenceDiagram::capped(int p) const {
  auto out = in_dim(p);
  for (auto& q : out) {
    if (q.essential()) q.death = std::max(max_value, q.birth);
  }
  return out;
}

std::size_t PersistenceDiagram::betti(int p, double r) const {
  std::size_t count = 0;
  for (const auto& q : points) {
    if (q.dim == p && q.birth <= r && r < q.death) ++count;
  }
  return count;
}

void write_diagram_csv_header(std::ostream& out) {
  csv::write_row(out, {"recording_id", "representation", "dim", "birth", "death"});
}

void write_diagram_csv(std::ostream& out, const std::string& recording_id, const std::string& representation,
                       const PersistenceDiagram& diagram) {
  for (const auto& q : diagram.points) {
    csv::write_row(out, {recording_id, representation, std::to_string(q.dim), csv::format_double(q.birth),
                         csv::format_double(q.death)});
  }
}

}  // namespace topovox
