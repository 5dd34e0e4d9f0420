#include "epsc/geom.hpp"

#include "epsc/kdtree.hpp"

#include <cmath>
#include <limits>
#include <random>

namespace epsc {

namespace {

void require_nonempty(const Points& P, const char* what) {
  if (P.cols() == 0 || P.rows() == 0) throw std::domain_error(std::string(what) + ": empty point set");
}

void require_same_dim(const Points& A, const Points& B) {
  if (A.rows() != B.rows()) throw std::domain_error("dimension mismatch between point sets");
}

struct Directed {
  double d = -1.0;
  int far = -1;   // index in the source set
  int foot = -1;  // index in the target set
};

// Farthest source point from target, ties resolved lexicographically on (far, foot).
Directed directed(const Points& src, const Points& dst, const KdTree& tree) {
  Directed r;
  for (Eigen::Index i = 0; i < src.cols(); ++i) {
    auto hit = tree.nearest(src.col(i));
    double d = (src.col(i) - dst.col(hit.index)).norm();
    bool better = d > r.d;
    if (!better && d == r.d) {
      if (lex_less(src.col(i), src.col(r.far))) better = true;
      else if (src.col(i) == src.col(r.far) && lex_less(dst.col(hit.index), dst.col(r.foot))) better = true;
    }
    if (better) {
      r.d = d;
      r.far = static_cast<int>(i);
      r.foot = hit.index;
    }
  }
  return r;
}

}  // namespace

bool lex_less(const Vec& a, const Vec& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a[i] < b[i]) return true;
    if (a[i] > b[i]) return false;
  }
  return false;
}

void require_dim(const Vec& x, int n, const char* what) {
  if (x.size() != n) throw std::domain_error(std::string(what) + ": dimension mismatch");
}

Points from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) return Points(0, 0);
  Points P(static_cast<Eigen::Index>(rows[0].size()), static_cast<Eigen::Index>(rows.size()));
  for (size_t j = 0; j < rows.size(); ++j) {
    if (rows[j].size() != rows[0].size()) throw std::domain_error("ragged point list");
    for (size_t i = 0; i < rows[j].size(); ++i) P(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[j][i];
  }
  return P;
}

Vec vec(std::initializer_list<double> xs) {
  Vec v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

WitnessPair witness_pair(const Points& K, const Points& L) {
  require_nonempty(K, "witness_pair");
  require_nonempty(L, "witness_pair");
  require_same_dim(K, L);
  KdTree tk(K), tl(L);
  Directed fromK = directed(L, K, tk);  // far point in L, foot in K
  Directed fromL = directed(K, L, tl);  // far point in K, foot in L
  WitnessPair w;
  if (fromK.d >= fromL.d) {
    w.a = K.col(fromK.foot);
    w.b = L.col(fromK.far);
    w.side = Side::fromK;
  } else {
    w.a = K.col(fromL.far);
    w.b = L.col(fromL.foot);
    w.side = Side::fromL;
  }
  w.dist = (w.a - w.b).norm();
  return w;
}

double hausdorff(const Points& A, const Points& B) { return witness_pair(A, B).dist; }

double directed_hausdorff(const Points& A, const Points& B) {
  require_nonempty(A, "directed_hausdorff");
  require_nonempty(B, "directed_hausdorff");
  require_same_dim(A, B);
  KdTree tb(B);
  return directed(A, B, tb).d;
}

SupportData support_data(const Points& K, const Vec& omega, double cluster_tol) {
  require_nonempty(K, "support_data");
  if (omega.size() != K.rows()) throw std::domain_error("support_data: dimension mismatch");
  Eigen::VectorXd dots = K.transpose() * omega;
  SupportData s;
  s.omega = omega;
  s.h = dots.maxCoeff();
  s.width = s.h + (-dots).maxCoeff();
  std::vector<Eigen::Index> idx;
  for (Eigen::Index i = 0; i < dots.size(); ++i)
    if (dots[i] >= s.h - cluster_tol) idx.push_back(i);
  s.support_set.resize(K.rows(), static_cast<Eigen::Index>(idx.size()));
  for (size_t j = 0; j < idx.size(); ++j) s.support_set.col(static_cast<Eigen::Index>(j)) = K.col(idx[j]);
  s.regular = diameter(s.support_set) <= cluster_tol;
  return s;
}

double point_set_dist(const Points& K, const Vec& x) {
  require_nonempty(K, "point_set_dist");
  return (K.colwise() - x).colwise().norm().minCoeff();
}

bool outer_parallel_contains(const Points& K, double eps, const Vec& x) {
  if (eps < 0) throw std::domain_error("outer_parallel_contains: negative eps");
  require_dim(x, static_cast<int>(K.rows()), "outer_parallel_contains");
  return point_set_dist(K, x) <= eps;
}

double diameter(const Points& K) {
  double best = 0.0;
  for (Eigen::Index i = 0; i < K.cols(); ++i)
    for (Eigen::Index j = i + 1; j < K.cols(); ++j) best = std::max(best, (K.col(i) - K.col(j)).norm());
  return best;
}

Eigen::MatrixXd orth_complement(const Eigen::MatrixXd& U, int n) {
  if (U.cols() == 0) return Eigen::MatrixXd::Identity(n, n);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(U);
  Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
  return Q.rightCols(n - U.cols());
}

std::vector<Vec> sphere_directions(int n, int count) {
  std::vector<Vec> out;
  if (n == 1) {
    out.push_back(vec({1.0}));
    out.push_back(vec({-1.0}));
    return out;
  }
  if (n == 2) {
    for (int i = 0; i < count; ++i) {
      double t = 2.0 * M_PI * i / count;
      out.push_back(vec({std::cos(t), std::sin(t)}));
    }
    return out;
  }
  if (n == 3) {
    const double golden = M_PI * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < count; ++i) {
      double z = 1.0 - (2.0 * i + 1.0) / count;
      double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      double t = golden * i;
      out.push_back(vec({r * std::cos(t), r * std::sin(t), z}));
    }
    return out;
  }
  std::mt19937_64 rng(0x5eedULL + static_cast<unsigned>(n));
  std::normal_distribution<double> g;
  for (int i = 0; i < count; ++i) {
    Vec v(n);
    for (int d = 0; d < n; ++d) v[d] = g(rng);
    out.push_back(v.normalized());
  }
  return out;
}

}  // namespace epsc
