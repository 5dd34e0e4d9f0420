#include "epsc/grid.hpp"

#include <cmath>
#include <deque>
#include <limits>

namespace epsc {

Vec Grid::center(size_t idx) const {
  auto c = coords(idx);
  Vec x(dim);
  for (int d = 0; d < dim; ++d) x[d] = lo[d] + (c[d] + 0.5) * h;
  return x;
}

long Grid::locate(const Vec& x) const {
  std::array<int, 3> c{0, 0, 0};
  for (int d = 0; d < dim; ++d) {
    double t = std::floor((x[d] - lo[d]) / h);
    if (t < 0 || t >= n[d]) return -1;
    c[d] = static_cast<int>(t);
  }
  return static_cast<long>(index(c[0], c[1], c[2]));
}

size_t Grid::count(Cell c) const {
  size_t s = 0;
  for (auto v : cells) s += (v == c);
  return s;
}

double Grid::diag() const { return h * std::sqrt(static_cast<double>(dim)); }

Grid rasterize_in(const BodyExpr& body, const Vec& lo, const std::array<int, 3>& n, double h) {
  const int dim = body.dim();
  if (!(h > 0)) throw std::domain_error("rasterize: h must be positive");
  if (dim > 3) throw std::domain_error("rasterize: unsupported dimension > 3");
  Grid g;
  g.dim = dim;
  g.lo = lo;
  g.h = h;
  g.n = {1, 1, 1};
  for (int d = 0; d < dim; ++d) g.n[d] = n[d];
  std::array<int, 3> m{1, 1, 1};
  for (int d = 0; d < dim; ++d) m[d] = g.n[d] + 1;
  // Corner samples, evaluated once each.
  std::vector<uint8_t> corner(static_cast<size_t>(m[0]) * m[1] * m[2]);
  Vec x(dim);
  for (int k = 0; k < m[2]; ++k)
    for (int j = 0; j < m[1]; ++j)
      for (int i = 0; i < m[0]; ++i) {
        int c[3] = {i, j, k};
        for (int d = 0; d < dim; ++d) x[d] = lo[d] + c[d] * h;
        corner[static_cast<size_t>(i) + static_cast<size_t>(m[0]) * (j + static_cast<size_t>(m[1]) * k)] = contains(body, x);
      }
  g.cells.assign(static_cast<size_t>(g.n[0]) * g.n[1] * g.n[2], Cell::outside);
  const int ncorner = 1 << dim;
  for (int k = 0; k < g.n[2]; ++k)
    for (int j = 0; j < g.n[1]; ++j)
      for (int i = 0; i < g.n[0]; ++i) {
        int in = 0;
        for (int q = 0; q < ncorner; ++q) {
          int ci = i + (q & 1), cj = j + ((q >> 1) & 1), ck = k + ((q >> 2) & 1);
          in += corner[static_cast<size_t>(ci) + static_cast<size_t>(m[0]) * (cj + static_cast<size_t>(m[1]) * ck)];
        }
        g.cells[g.index(i, j, k)] = in == ncorner ? Cell::inside : (in == 0 ? Cell::outside : Cell::boundary);
      }
  return g;
}

Grid rasterize(const BodyExpr& body, double h) {
  validate(body);
  if (body.dim() > 3) throw std::domain_error("rasterize: unsupported dimension > 3");
  BBox bb = bounding_box(body);
  if (!bb.bounded()) throw std::domain_error("rasterize: unbounded body expression");
  Vec lo = bb.lo.array() - 2 * h;
  std::array<int, 3> n{1, 1, 1};
  for (int d = 0; d < body.dim(); ++d) n[d] = std::max(1, static_cast<int>(std::ceil((bb.hi[d] - bb.lo[d] + 4 * h) / h)));
  return rasterize_in(body, lo, n, h);
}

Grid empty_like(const Grid& g) {
  Grid e = g;
  std::fill(e.cells.begin(), e.cells.end(), Cell::outside);
  return e;
}

Grid frame_for(const std::vector<BBox>& boxes, double h, double margin) {
  Grid g;
  g.dim = static_cast<int>(boxes.at(0).lo.size());
  Vec lo = boxes[0].lo, hi = boxes[0].hi;
  for (const auto& b : boxes) {
    lo = lo.cwiseMin(b.lo);
    hi = hi.cwiseMax(b.hi);
  }
  g.lo = lo.array() - margin;
  g.h = h;
  for (int d = 0; d < g.dim; ++d) g.n[d] = std::max(1, static_cast<int>(std::ceil((hi[d] - lo[d] + 2 * margin) / h)));
  g.cells.assign(static_cast<size_t>(g.n[0]) * g.n[1] * g.n[2], Cell::outside);
  return g;
}

bool in_set(Cell c, CellSet s) {
  switch (s) {
    case CellSet::inside: return c == Cell::inside;
    case CellSet::solid: return c != Cell::outside;
    case CellSet::boundary: return c == Cell::boundary;
    case CellSet::outside: return c == Cell::outside;
  }
  return false;
}

std::vector<size_t> indices_of(const Grid& g, CellSet s) {
  std::vector<size_t> out;
  for (size_t i = 0; i < g.size(); ++i)
    if (in_set(g.cells[i], s)) out.push_back(i);
  return out;
}

Points centers_of(const Grid& g, CellSet s) {
  auto idx = indices_of(g, s);
  Points P(g.dim, static_cast<Eigen::Index>(idx.size()));
  for (size_t j = 0; j < idx.size(); ++j) P.col(static_cast<Eigen::Index>(j)) = g.center(idx[j]);
  return P;
}

int label_components(const Grid& g, CellSet s, bool moore, std::vector<int>& labels) {
  labels.assign(g.size(), -1);
  std::vector<std::array<int, 3>> offs;
  int r2 = g.dim >= 3 ? 1 : 0, r1 = g.dim >= 2 ? 1 : 0;
  for (int dk = -r2; dk <= r2; ++dk)
    for (int dj = -r1; dj <= r1; ++dj)
      for (int di = -1; di <= 1; ++di) {
        int nz = (di != 0) + (dj != 0) + (dk != 0);
        if (nz == 0) continue;
        if (!moore && nz != 1) continue;
        offs.push_back({di, dj, dk});
      }
  int count = 0;
  std::deque<size_t> q;
  for (size_t start = 0; start < g.size(); ++start) {
    if (labels[start] >= 0 || !in_set(g.cells[start], s)) continue;
    labels[start] = count;
    q.push_back(start);
    while (!q.empty()) {
      size_t cur = q.front();
      q.pop_front();
      auto c = g.coords(cur);
      for (const auto& o : offs) {
        int a = c[0] + o[0], b = c[1] + o[1], d = c[2] + o[2];
        if (a < 0 || b < 0 || d < 0 || a >= g.n[0] || b >= g.n[1] || d >= g.n[2]) continue;
        size_t nb = g.index(a, b, d);
        if (labels[nb] < 0 && in_set(g.cells[nb], s)) {
          labels[nb] = count;
          q.push_back(nb);
        }
      }
    }
    ++count;
  }
  return count;
}

double grid_diameter(const Grid& g, CellSet s) {
  // Extreme cells of each x-row contain every vertex of the convex hull of the set.
  std::vector<Vec> cand;
  for (int k = 0; k < g.n[2]; ++k)
    for (int j = 0; j < g.n[1]; ++j) {
      int first = -1, last = -1;
      for (int i = 0; i < g.n[0]; ++i)
        if (in_set(g.cells[g.index(i, j, k)], s)) {
          if (first < 0) first = i;
          last = i;
        }
      if (first < 0) continue;
      cand.push_back(g.center(g.index(first, j, k)));
      if (last != first) cand.push_back(g.center(g.index(last, j, k)));
    }
  double best = 0.0;
  for (size_t a = 0; a < cand.size(); ++a)
    for (size_t b = a + 1; b < cand.size(); ++b) best = std::max(best, (cand[a] - cand[b]).squaredNorm());
  return std::sqrt(best);
}

GridMetrics grid_metrics(const Grid& g) {
  if (g.count(Cell::outside) == g.size()) throw std::domain_error("grid_metrics: empty grid");
  GridMetrics m;
  m.diameter = grid_diameter(g, CellSet::solid);
  m.diameter_err = g.diag();
  std::vector<int> lab;
  m.connected_components = label_components(g, CellSet::solid, false, lab);
  m.boundary_components = label_components(g, CellSet::boundary, true, lab);
  return m;
}

namespace {

// 1-D squared distance transform of samples f (Felzenszwalb-Huttenlocher).
void dt1d(const std::vector<double>& f, std::vector<double>& out, std::vector<int>& v, std::vector<double>& z) {
  const int n = static_cast<int>(f.size());
  const double inf = std::numeric_limits<double>::infinity();
  v.assign(n, 0);
  z.assign(n + 1, 0.0);
  out.assign(n, inf);
  int k = -1;
  auto meet = [&](int q, int p) { return ((f[q] + double(q) * q) - (f[p] + double(p) * p)) / (2.0 * (q - p)); };
  for (int q = 0; q < n; ++q) {
    if (f[q] == inf) continue;
    if (k < 0) {
      k = 0;
      v[0] = q;
      z[0] = -inf;
      z[1] = inf;
      continue;
    }
    double s = meet(q, v[k]);
    while (s <= z[k]) {
      --k;
      s = meet(q, v[k]);
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = inf;
  }
  if (k < 0) return;
  int j = 0;
  for (int q = 0; q < n; ++q) {
    while (z[j + 1] < q) ++j;
    double d = q - v[j];
    out[q] = d * d + f[v[j]];
  }
}

}  // namespace

std::vector<double> distance_field(const Grid& g, const std::vector<uint8_t>& marked) {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> D(g.size());
  for (size_t i = 0; i < g.size(); ++i) D[i] = marked[i] ? 0.0 : inf;
  std::vector<double> f, o, z;
  std::vector<int> v;
  for (int axis = 0; axis < g.dim; ++axis) {
    int len = g.n[axis];
    f.resize(len);
    for (int k = 0; k < (axis == 2 ? 1 : g.n[2]); ++k)
      for (int j = 0; j < (axis == 1 ? 1 : g.n[1]); ++j)
        for (int i = 0; i < (axis == 0 ? 1 : g.n[0]); ++i) {
          auto at = [&](int t) {
            int c[3] = {i, j, k};
            c[axis] = t;
            return g.index(c[0], c[1], c[2]);
          };
          for (int t = 0; t < len; ++t) f[t] = D[at(t)];
          dt1d(f, o, v, z);
          for (int t = 0; t < len; ++t) D[at(t)] = o[t];
        }
  }
  for (auto& d : D) d = std::sqrt(d) * g.h;
  return D;
}

}  // namespace epsc
