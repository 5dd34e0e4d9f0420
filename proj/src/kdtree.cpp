#include "epsc/kdtree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace epsc {

namespace {
constexpr int kLeafSize = 12;
}

KdTree::KdTree(const Points& pts) : pts_(pts), n_(static_cast<int>(pts.cols())), dim_(static_cast<int>(pts.rows())) {
  flat_.resize(static_cast<size_t>(n_) * dim_);
  for (int i = 0; i < n_; ++i)
    for (int d = 0; d < dim_; ++d) flat_[static_cast<size_t>(i) * dim_ + d] = pts(d, i);
  perm_.resize(n_);
  std::iota(perm_.begin(), perm_.end(), 0);
  if (n_ > 0) {
    nodes_.reserve(2 * (n_ / kLeafSize + 1));
    build(0, n_, 0);
  }
}

double KdTree::d2(int idx, const double* x) const {
  const double* p = &flat_[static_cast<size_t>(idx) * dim_];
  double s = 0.0;
  for (int d = 0; d < dim_; ++d) {
    double t = p[d] - x[d];
    s += t * t;
  }
  return s;
}

int KdTree::build(int lo, int hi, int depth) {
  int id = static_cast<int>(nodes_.size());
  nodes_.push_back({lo, hi, -1, 0.0, -1, -1});
  box_lo_.resize(box_lo_.size() + dim_);
  box_hi_.resize(box_hi_.size() + dim_);
  double* blo = &box_lo_[static_cast<size_t>(id) * dim_];
  double* bhi = &box_hi_[static_cast<size_t>(id) * dim_];
  for (int d = 0; d < dim_; ++d) {
    blo[d] = std::numeric_limits<double>::infinity();
    bhi[d] = -std::numeric_limits<double>::infinity();
  }
  for (int k = lo; k < hi; ++k) {
    const double* p = &flat_[static_cast<size_t>(perm_[k]) * dim_];
    for (int d = 0; d < dim_; ++d) {
      blo[d] = std::min(blo[d], p[d]);
      bhi[d] = std::max(bhi[d], p[d]);
    }
  }
  if (hi - lo <= kLeafSize) return id;
  int sd = 0;
  double ext = -1.0;
  for (int d = 0; d < dim_; ++d) {
    if (bhi[d] - blo[d] > ext) {
      ext = bhi[d] - blo[d];
      sd = d;
    }
  }
  (void)depth;
  if (ext <= 0.0) return id;
  int mid = (lo + hi) / 2;
  std::nth_element(perm_.begin() + lo, perm_.begin() + mid, perm_.begin() + hi, [&](int a, int b) {
    double va = flat_[static_cast<size_t>(a) * dim_ + sd], vb = flat_[static_cast<size_t>(b) * dim_ + sd];
    return va < vb || (va == vb && a < b);
  });
  double split = flat_[static_cast<size_t>(perm_[mid]) * dim_ + sd];
  int l = build(lo, mid, depth + 1);
  int r = build(mid, hi, depth + 1);
  nodes_[id].split_dim = sd;
  nodes_[id].split = split;
  nodes_[id].left = l;
  nodes_[id].right = r;
  return id;
}

namespace {
inline double box_d2(const double* lo, const double* hi, const double* x, int dim) {
  double s = 0.0;
  for (int d = 0; d < dim; ++d) {
    double t = 0.0;
    if (x[d] < lo[d]) t = lo[d] - x[d];
    else if (x[d] > hi[d]) t = x[d] - hi[d];
    s += t * t;
  }
  return s;
}
}  // namespace

void KdTree::nearest_rec(int node, const double* x, int& best, double& best_d2) const {
  const Node& nd = nodes_[node];
  if (box_d2(&box_lo_[static_cast<size_t>(node) * dim_], &box_hi_[static_cast<size_t>(node) * dim_], x, dim_) > best_d2)
    return;
  if (nd.split_dim < 0) {
    for (int k = nd.lo; k < nd.hi; ++k) {
      int i = perm_[k];
      double v = d2(i, x);
      if (v < best_d2 || (v == best_d2 && best >= 0 && lex_less(pts_.col(i), pts_.col(best)))) {
        best_d2 = v;
        best = i;
      }
    }
    return;
  }
  bool left_first = x[nd.split_dim] <= nd.split;
  nearest_rec(left_first ? nd.left : nd.right, x, best, best_d2);
  nearest_rec(left_first ? nd.right : nd.left, x, best, best_d2);
}

KdTree::Hit KdTree::nearest(const Vec& x) const {
  Hit h;
  if (n_ == 0) {
    h.dist = std::numeric_limits<double>::infinity();
    return h;
  }
  double best_d2 = std::numeric_limits<double>::infinity();
  int best = -1;
  nearest_rec(0, x.data(), best, best_d2);
  h.index = best;
  h.dist = std::sqrt(best_d2);
  return h;
}

double KdTree::nearest_dist(const Vec& x, double cutoff) const {
  if (n_ == 0) return std::numeric_limits<double>::infinity();
  double best_d2 = cutoff * cutoff;
  int best = -1;
  nearest_rec(0, x.data(), best, best_d2);
  return best < 0 ? cutoff : std::sqrt(best_d2);
}

void KdTree::within_rec(int node, const double* x, double r2, std::vector<int>& out) const {
  const Node& nd = nodes_[node];
  if (box_d2(&box_lo_[static_cast<size_t>(node) * dim_], &box_hi_[static_cast<size_t>(node) * dim_], x, dim_) > r2)
    return;
  if (nd.split_dim < 0) {
    for (int k = nd.lo; k < nd.hi; ++k)
      if (d2(perm_[k], x) <= r2) out.push_back(perm_[k]);
    return;
  }
  within_rec(nd.left, x, r2, out);
  within_rec(nd.right, x, r2, out);
}

std::vector<int> KdTree::within(const Vec& x, double r) const {
  std::vector<int> out;
  if (n_ == 0 || r < 0) return out;
  within_rec(0, x.data(), r * r, out);
  std::sort(out.begin(), out.end());
  return out;
}

bool KdTree::any_rec(int node, const double* x, double r2) const {
  const Node& nd = nodes_[node];
  if (box_d2(&box_lo_[static_cast<size_t>(node) * dim_], &box_hi_[static_cast<size_t>(node) * dim_], x, dim_) > r2)
    return false;
  if (nd.split_dim < 0) {
    for (int k = nd.lo; k < nd.hi; ++k)
      if (d2(perm_[k], x) <= r2) return true;
    return false;
  }
  return any_rec(nd.left, x, r2) || any_rec(nd.right, x, r2);
}

bool KdTree::any_within(const Vec& x, double r) const {
  if (n_ == 0 || r < 0) return false;
  return any_rec(0, x.data(), r * r);
}

bool KdTree::beyond_rec(int node, const double* x, double r2, const double* p, double D2) const {
  const double* lo = &box_lo_[static_cast<size_t>(node) * dim_];
  const double* hi = &box_hi_[static_cast<size_t>(node) * dim_];
  if (box_d2(lo, hi, x, dim_) > r2) return false;
  double far2 = 0.0;
  for (int d = 0; d < dim_; ++d) {
    double t = std::max(std::abs(lo[d] - p[d]), std::abs(hi[d] - p[d]));
    far2 += t * t;
  }
  if (far2 <= D2) return false;
  const Node& nd = nodes_[node];
  if (nd.split_dim < 0) {
    for (int k = nd.lo; k < nd.hi; ++k) {
      int i = perm_[k];
      if (d2(i, x) <= r2 && d2(i, p) > D2) return true;
    }
    return false;
  }
  return beyond_rec(nd.left, x, r2, p, D2) || beyond_rec(nd.right, x, r2, p, D2);
}

bool KdTree::any_within_beyond(const Vec& x, double r, const Vec& p, double D) const {
  if (n_ == 0 || r < 0) return false;
  return beyond_rec(0, x.data(), r * r, p.data(), D < 0 ? -1.0 : D * D);
}

}  // namespace epsc
