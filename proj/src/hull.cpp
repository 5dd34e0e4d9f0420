#include "epsc/hull.hpp"

#include "epsc/parallel.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <numeric>

namespace epsc {

Points AffineChart::to_chart(const Points& X) const { return basis.transpose() * (X.colwise() - origin); }

Points AffineChart::from_chart(const Points& Y) const { return (basis * Y).colwise() + origin; }

AffineChart affine_chart(const Points& W, double tol) {
  if (W.cols() == 0) throw std::domain_error("affine_chart: empty point set");
  AffineChart c;
  c.origin = W.col(0);
  Eigen::MatrixXd D = W.colwise() - c.origin;
  if (W.cols() == 1) {
    c.basis = Eigen::MatrixXd(W.rows(), 0);
    return c;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(D, Eigen::ComputeThinU);
  const auto& s = svd.singularValues();
  double scale = std::max(1.0, D.cwiseAbs().maxCoeff());
  int r = 0;
  while (r < s.size() && s[r] > tol * scale) ++r;
  c.basis = svd.matrixU().leftCols(r);
  return c;
}

// ---------------------------------------------------------------------------

FarthestSearch::FarthestSearch(const Points& W) : W_(W), dim_(static_cast<int>(W.rows())) {
  if (W.cols() == 0) throw std::domain_error("hull: empty point set");
  if (dim_ > 3) throw std::domain_error("hull: dimension > 3 unsupported");
  const int m = static_cast<int>(W.cols());
  std::vector<int> idx;
  // Subsets of size 1..dim+1 in lexicographic order.
  auto visit = [&](auto&& self, int from, int left) -> void {
    if (left == 0) {
      const int k = static_cast<int>(idx.size());
      Eigen::MatrixXd D(dim_, k - 1);
      for (int i = 1; i < k; ++i) D.col(i - 1) = W_.col(idx[i]) - W_.col(idx[0]);
      Flat f;
      if (k == 1) {
        f.center = W_.col(idx[0]);
        f.span = Eigen::MatrixXd(dim_, 0);
      } else {
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(D);
        Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(dim_, k - 1);
        Eigen::MatrixXd Rm = Q.transpose() * D;
        double scale = std::max(1e-300, D.norm());
        Eigen::VectorXd diag = Rm.diagonal().cwiseAbs();
        if (diag.minCoeff() < 1e-10 * scale) return;  // affinely dependent
        // 2 (s_i - s_0) . (c - s_0) = |s_i - s_0|^2 with c - s_0 = Q t.
        Eigen::MatrixXd M = 2.0 * Rm.transpose();
        Eigen::VectorXd b(k - 1);
        for (int i = 0; i < k - 1; ++i) b[i] = D.col(i).squaredNorm();
        Eigen::VectorXd t = M.partialPivLu().solve(b);
        f.center = W_.col(idx[0]) + Q * t;
        f.span = Q;
      }
      f.perp = orth_complement(f.span, dim_);
      flats_.push_back(std::move(f));
      return;
    }
    for (int i = from; i <= m - left; ++i) {
      idx.push_back(i);
      self(self, i + 1, left - 1);
      idx.pop_back();
    }
  };
  for (int k = 1; k <= std::min(m, dim_ + 1); ++k) visit(visit, 0, k);
}

double FarthestSearch::nearest(const Vec& C) const { return std::sqrt((W_.colwise() - C).colwise().squaredNorm().minCoeff()); }

FarthestSearch::Result FarthestSearch::max_dist(const Vec& y, double rho) const {
  Result best{nearest(y), y};
  const double r2 = rho * rho;
  for (const auto& f : flats_) {
    Vec C;
    if (f.perp.cols() == 0) {
      if ((f.center - y).squaredNorm() > r2) continue;
      C = f.center;
    } else {
      Vec yF = f.center + f.perp * (f.perp.transpose() * (y - f.center));
      double d2 = (y - yF).squaredNorm();
      if (d2 > r2) continue;
      double s = std::sqrt(std::max(0.0, r2 - d2));
      Vec u = yF - f.center;
      double nu = u.norm();
      if (nu < 1e-14) {
        u = f.perp.col(0);
        nu = 1.0;
      }
      C = yF + (s / nu) * u;
      if (f.perp.cols() == 1) {
        // The slice is a segment: both ends are local maxima of the distance to W.
        Vec C2 = yF - (s / nu) * u;
        double v2 = nearest(C2);
        if (v2 > best.value) best = {v2, C2};
      }
    }
    double v = nearest(C);
    if (v > best.value) best = {v, C};
  }
  return best;
}

namespace {
constexpr double kRelTie = 1e-12;
}

bool in_eps_hull(const FarthestSearch& W, double eps, const Vec& y) {
  if (!(eps > 0)) throw std::domain_error("hull: eps must be positive");
  const double R = 1.0 / eps;
  return W.max_dist(y, R).value <= R * (1 + kRelTie);
}

namespace {

// Whether the box centered at y with half-width a (in every axis) is covered by radius-R balls
// missing W: one ball covers it, or every half-size sub-box is covered.
bool covered(const FarthestSearch& fs, double R, const Vec& y, double a, int depth) {
  const int n = static_cast<int>(y.size());
  const double rc = a * std::sqrt(static_cast<double>(n));
  if (fs.max_dist(y, std::max(0.0, R - rc)).value > R * (1 + kRelTie)) return true;
  if (depth == 0 || fs.max_dist(y, R).value <= R * (1 + kRelTie)) return false;
  for (int mask = 0; mask < (1 << n); ++mask) {
    Vec z = y;
    for (int d = 0; d < n; ++d) z[d] += (mask & (1 << d)) ? a / 2 : -a / 2;
    if (!covered(fs, R, z, a / 2, depth - 1)) return false;
  }
  return true;
}

}  // namespace

Grid eps_hull_oracle_on(const Points& W, double eps, const Grid& frame, int workers) {
  if (!(eps > 0)) throw std::domain_error("hull: eps must be positive");
  if (W.rows() != frame.dim) throw std::domain_error("hull: frame dimension mismatch");
  FarthestSearch fs(W);
  const double R = 1.0 / eps;
  const double rc = frame.diag() / 2;
  const int depth = frame.dim <= 2 ? 12 : 3;
  Grid g = empty_like(frame);
  for_chunks(g.size(), 4096, workers, [&](size_t, size_t lo, size_t hi) {
    for (size_t i = lo; i < hi; ++i) {
      Vec y = g.center(i);
      if (fs.max_dist(y, R + rc).value <= R * (1 + kRelTie))
        g.cells[i] = Cell::inside;
      else if (covered(fs, R, y, frame.h / 2, depth))
        g.cells[i] = Cell::outside;
      else
        g.cells[i] = Cell::boundary;
    }
  });
  return g;
}

Grid eps_hull_oracle(const Points& W, double eps, double h) {
  if (!(h > 0)) throw std::domain_error("hull: h must be positive");
  AffineChart chart = affine_chart(W);
  if (chart.dim() == 0) throw std::domain_error("hull: a single point has no cell raster");
  Points Y = chart.dim() < W.rows() ? chart.to_chart(W) : W;
  if (Y.rows() > 3) throw std::domain_error("hull: dimension > 3 unsupported");
  BBox box{Y.rowwise().minCoeff(), Y.rowwise().maxCoeff()};
  Grid frame = frame_for({box}, h, 2 * h);
  return eps_hull_oracle_on(Y, eps, frame);
}

Grid eps_hull_oracle(const Grid& body, double eps) {
  if (!(eps > 0)) throw std::domain_error("hull: eps must be positive");
  const double R = 1.0 / eps;
  const double h = body.h;
  const double rc = body.diag() / 2;
  const int pad = static_cast<int>(std::ceil((R + 2 * h) / h)) + 1;
  Grid g;
  g.dim = body.dim;
  g.h = h;
  g.lo = body.lo.array() - pad * h;
  for (int d = 0; d < 3; ++d) g.n[d] = d < body.dim ? body.n[d] + 2 * pad : 1;
  g.cells.assign(static_cast<size_t>(g.n[0]) * g.n[1] * g.n[2], Cell::outside);
  std::vector<uint8_t> inside(g.size(), 0);
  auto shifted = [&](size_t i) {
    auto c = body.coords(i);
    for (int d = 0; d < body.dim; ++d) c[d] += pad;
    return g.index(c[0], c[1], c[2]);
  };
  for (size_t i = 0; i < body.size(); ++i) {
    size_t j = shifted(i);
    g.cells[j] = body.cells[i];
    if (body.cells[i] == Cell::inside) inside[j] = 1;
  }
  // Ball centers whose radius-R ball clears every inside cell.
  std::vector<double> D = distance_field(g, inside);
  std::vector<uint8_t> admissible(g.size(), 0);
  for (size_t i = 0; i < g.size(); ++i) admissible[i] = D[i] - rc >= R;
  std::vector<double> E = distance_field(g, admissible);
  for (size_t i = 0; i < g.size(); ++i) {
    if (g.cells[i] != Cell::outside) continue;
    if (E[i] + rc <= R) continue;  // whole cell under one clearing ball
    // Centers off the lattice sit within half a diagonal of a lattice point.
    g.cells[i] = E[i] <= R + 3 * rc ? Cell::boundary : Cell::inside;
  }
  return g;
}

// ---------------------------------------------------------------------------

namespace {

double cross2(const Vec& a, const Vec& b) { return a[0] * b[1] - a[1] * b[0]; }

}  // namespace

EpsHull2D eps_hull_wrap2d(const Points& W, double eps) {
  if (!(eps > 0)) throw std::domain_error("wrap2d: eps must be positive");
  if (W.rows() != 2) throw std::domain_error("wrap2d: points must be planar");
  const long m = W.cols();
  if (m < 2) throw std::domain_error("wrap2d: need at least 2 points");
  const double R = 1.0 / eps;
  const double dW = diameter(W);
  if (!(dW < 2 * R)) throw PreconditionError("gift wrapping requires d_W < 2/eps (connected regime); use the oracle");

  long start = 0;
  for (long i = 1; i < m; ++i)
    if (lex_less(W.col(i), W.col(start))) start = i;

  EpsHull2D H;
  H.eps = eps;
  HullComponent comp;
  std::vector<long> order;
  Vec d_in = vec({0.0, -1.0});
  long p = start;
  for (long step = 0;; ++step) {
    if (step > 2 * m) throw std::runtime_error("wrap2d: boundary walk did not close");
    long best = -1;
    double best_turn = 0, best_len = 0;
    Vec best_C;
    for (long q = 0; q < m; ++q) {
      if (q == p) continue;
      Vec dir = W.col(q) - W.col(p);
      double len = dir.norm();
      if (len < 1e-14 || !(len < 2 * R)) continue;
      Vec nr = vec({dir[1], -dir[0]}) / len;
      Vec C = 0.5 * (W.col(p) + W.col(q)) + std::sqrt(R * R - 0.25 * len * len) * nr;
      bool empty = true;
      for (long w = 0; w < m && empty; ++w)
        if (w != p && w != q && (W.col(w) - C).norm() < R * (1 - kRelTie)) empty = false;
      if (!empty) continue;
      double turn = std::atan2(cross2(d_in, dir), d_in.dot(dir));
      bool better = best < 0 || turn < best_turn - 1e-12 ||
                    (std::abs(turn - best_turn) <= 1e-12 &&
                     (len < best_len - 1e-12 || (std::abs(len - best_len) <= 1e-12 && lex_less(W.col(q), W.col(best)))));
      if (better) {
        best = q;
        best_turn = turn;
        best_len = len;
        best_C = C;
      }
    }
    if (best < 0) throw std::runtime_error("wrap2d: no admissible next vertex");
    order.push_back(p);
    Arc a;
    a.center = best_C;
    a.radius = R;
    a.start_angle = std::atan2(W(1, p) - best_C[1], W(0, p) - best_C[0]);
    a.end_angle = std::atan2(W(1, best) - best_C[1], W(0, best) - best_C[0]);
    a.clockwise = true;
    comp.arcs.push_back(a);
    d_in = W.col(best) - W.col(p);
    p = best;
    if (p == start) break;
  }
  comp.vertices.resize(2, static_cast<long>(order.size()));
  for (size_t i = 0; i < order.size(); ++i) comp.vertices.col(static_cast<long>(i)) = W.col(order[i]);
  H.components.push_back(std::move(comp));
  H.isolated_points.resize(2, 0);
  return H;
}

bool wrap_contains(const EpsHull2D& H, const Vec& y) {
  for (const auto& c : H.components) {
    const long k = c.vertices.cols();
    if (k < 3) continue;
    // Crossing number against the vertex polygon.
    bool in = false;
    for (long i = 0, j = k - 1; i < k; j = i++) {
      double yi = c.vertices(1, i), yj = c.vertices(1, j);
      if ((yi > y[1]) != (yj > y[1])) {
        double x = c.vertices(0, j) + (y[1] - yj) / (yi - yj) * (c.vertices(0, i) - c.vertices(0, j));
        if (y[0] < x) in = !in;
      }
    }
    if (!in) continue;
    bool cut = false;
    for (const auto& a : c.arcs)
      if ((y - a.center).norm() < a.radius) {
        cut = true;
        break;
      }
    if (!cut) return true;
  }
  return false;
}

Grid rasterize_wrap(const EpsHull2D& H, const Grid& frame) {
  if (frame.dim != 2) throw std::domain_error("rasterize_wrap: frame must be 2-D");
  Grid g = empty_like(frame);
  for (size_t i = 0; i < g.size(); ++i)
    if (wrap_contains(H, g.center(i))) g.cells[i] = Cell::inside;
  return g;
}

// ---------------------------------------------------------------------------

double thin_triangle_threshold(const ThinTriangle& t) {
  const double c = t.c;
  switch (t.kind) {
    case ThinTriangle::equilateral:
      return 1.0;
    case ThinTriangle::long_base:
      if (!(c > 0.5 && c < 1)) throw std::domain_error("long_base: c must lie in (1/2, 1)");
      return std::sqrt(4 * c * c - 1) / (c * std::sqrt(2 + c * c));
    case ThinTriangle::short_base:
      if (!(c > 0 && c < 1)) throw std::domain_error("short_base: c must lie in (0, 1)");
      return std::sqrt(4 - c * c) / std::sqrt(1 + 2 * c * c);
  }
  throw std::domain_error("thin_triangle_threshold: unknown case");
}

double thin_triangle_limit(const ThinTriangle& t) {
  double e = thin_triangle_threshold(t);
  switch (t.kind) {
    case ThinTriangle::equilateral:
      return e;
    case ThinTriangle::long_base:
      return std::min(e, 1 / (t.c * t.c));
    case ThinTriangle::short_base:
      return std::min(e, t.c);
  }
  return e;
}

Points thin_triangle_vertices(const ThinTriangle& t) {
  thin_triangle_threshold(t);  // range check
  Points P(2, 3);
  switch (t.kind) {
    case ThinTriangle::equilateral:
      P << 0, 1, 0.5, 0, 0, std::sqrt(3.0) / 2;
      break;
    case ThinTriangle::long_base:
      P << 0, 1, 0.5, 0, 0, std::sqrt(t.c * t.c - 0.25);
      break;
    case ThinTriangle::short_base:
      P << 0, t.c, t.c / 2, 0, 0, std::sqrt(1 - t.c * t.c / 4);
      break;
  }
  return P;
}

ThinSimplexData thin_simplex(int n) {
  if (n < 2) throw std::domain_error("thin_simplex: n must be >= 2");
  auto hn = [](int k) { return std::sqrt((k + 1.0) / (2.0 * k)); };
  ThinSimplexData d;
  d.n = n;
  d.h_n = hn(n);
  d.eps_max = std::sqrt(2.0 / (n * (n - 1.0)));
  if (n > 2) {
    double r = (n - 1.0) / n;
    d.recurrence_residual = std::abs(d.h_n * d.h_n + r * r * hn(n - 1) * hn(n - 1) - 1.0);
  }
  return d;
}

// ---------------------------------------------------------------------------

Grid conv_eps_via_subsets(const Points& W, double eps, const Grid& frame, int cap) {
  const long m = W.cols();
  if (m > cap) throw std::domain_error("conv_eps_via_subsets: point count exceeds the subset cap");
  const int full = affine_chart(W).dim();
  Grid U = empty_like(frame);
  for (unsigned mask = 1; mask < (1u << m); ++mask) {
    std::vector<long> sel;
    for (long i = 0; i < m; ++i)
      if (mask & (1u << i)) sel.push_back(i);
    if (static_cast<int>(sel.size()) < full + 1) continue;
    Points S(W.rows(), static_cast<long>(sel.size()));
    for (size_t i = 0; i < sel.size(); ++i) S.col(static_cast<long>(i)) = W.col(sel[i]);
    if (affine_chart(S).dim() < full) continue;
    Grid G = eps_hull_oracle_on(S, eps, frame);
    for (size_t i = 0; i < U.size(); ++i)
      if (G.cells[i] == Cell::inside || (G.cells[i] == Cell::boundary && U.cells[i] == Cell::outside))
        U.cells[i] = G.cells[i];
  }
  return U;
}

int solid_components(const Grid& g) {
  std::vector<int> lab;
  return label_components(g, CellSet::solid, false, lab);
}

}  // namespace epsc
