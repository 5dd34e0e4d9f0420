#include "epsc/helly.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <limits>

namespace epsc {

double helly_bound(int m, int n, double d, double eps, double eps_prime) {
  if (n < 1 || m <= n) throw std::domain_error("helly_bound: need m > n >= 1");
  if (eps < 0 || eps_prime < 0) throw std::domain_error("helly_bound: eps and eps' must be nonnegative");
  if (d < 0 || (eps > 0 && !(d < 1 / (2 * eps)))) throw std::domain_error("helly_bound: need 0 <= d < 1/(2 eps)");
  return eps_prime + eps * (m - n - 1) * d * d / 2;
}

RadonPartition radon_partition(const Points& P) {
  const long n = P.rows();
  if (P.cols() < n + 2) throw std::domain_error("radon_partition: need at least n + 2 points");
  const long k = n + 2;
  // Affine dependence: sum l_i p_i = 0, sum l_i = 0, l != 0.
  Eigen::MatrixXd A(n + 1, k);
  A.topRows(n) = P.leftCols(k);
  A.row(n).setOnes();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullV);
  Vec l = svd.matrixV().col(k - 1);
  if (!((A * l).norm() < 1e-9 * std::max(1.0, A.norm()))) throw std::runtime_error("radon_partition: no affine dependence found");
  const double tiny = 1e-12 * l.cwiseAbs().maxCoeff();
  RadonPartition r;
  double s1 = 0, s2 = 0;
  for (long i = 0; i < k; ++i) {
    if (l[i] > tiny) {
      r.A1.push_back(static_cast<int>(i));
      s1 += l[i];
    } else if (l[i] < -tiny) {
      r.A2.push_back(static_cast<int>(i));
      s2 -= l[i];
    }
  }
  if (r.A1.empty() || r.A2.empty()) throw std::runtime_error("radon_partition: degenerate dependence");
  r.coeff1.resize(static_cast<long>(r.A1.size()));
  r.coeff2.resize(static_cast<long>(r.A2.size()));
  Vec c1 = Vec::Zero(n), c2 = Vec::Zero(n);
  for (size_t i = 0; i < r.A1.size(); ++i) {
    r.coeff1[static_cast<long>(i)] = l[r.A1[i]] / s1;
    c1 += r.coeff1[static_cast<long>(i)] * P.col(r.A1[i]);
  }
  for (size_t i = 0; i < r.A2.size(); ++i) {
    r.coeff2[static_cast<long>(i)] = -l[r.A2[i]] / s2;
    c2 += r.coeff2[static_cast<long>(i)] * P.col(r.A2[i]);
  }
  r.common = c1;
  r.residual = (c1 - c2).norm();
  return r;
}

namespace {

bool same_frame(const Grid& a, const Grid& b) {
  return a.dim == b.dim && a.n == b.n && a.h == b.h && (a.lo - b.lo).cwiseAbs().maxCoeff() < 1e-12;
}

}  // namespace

HellyReport verify_helly(const std::vector<Grid>& family, double eps, double eps_prime, const HellyOptions& opt) {
  if (family.empty()) throw std::domain_error("verify_helly: empty family");
  if (!(eps > 0) || eps_prime < 0) throw std::domain_error("verify_helly: need eps > 0 and eps' >= 0");
  const Grid& g0 = family[0];
  for (const auto& g : family)
    if (!same_frame(g, g0)) throw PreconditionError("verify_helly: all bodies must share one grid frame");
  HellyReport rep;
  rep.n = g0.dim;
  rep.m = static_cast<int>(family.size());
  if (rep.m <= rep.n) throw std::domain_error("verify_helly: need m > n bodies");
  rep.slack = g0.diag();
  rep.eps_prime = eps_prime;
  Budget b;
  b.workers = opt.workers;
  b.stop_at_first_violation = true;
  std::vector<std::vector<double>> dist;
  for (const auto& g : family) {
    if (g.count(Cell::outside) == g.size()) throw PreconditionError("verify_helly: empty body");
    double d = grid_diameter(g, CellSet::solid);
    if (!(d < 1 / (2 * eps)))
      throw PreconditionError("Theorem 3 requires every diameter d_{K^i} < 1/(2 eps) (measured " + std::to_string(d) + ")");
    rep.diameter = std::max(rep.diameter, d);
    if (opt.check_class && check_K3(g, eps, K3Mode::viaK5, b).status == Status::violated)
      throw PreconditionError("Theorem 3 requires bodies of class K3^eps");
    std::vector<uint8_t> mark(g.size());
    for (size_t i = 0; i < g.size(); ++i) mark[i] = g.solid(i);
    dist.push_back(distance_field(g, mark));
  }
  const size_t cells = g0.size();
  // Hypothesis: each (n+1)-subfamily nearly meets.
  std::vector<int> idx;
  auto visit = [&](auto&& self, int from, int left) -> void {
    if (left == 0) {
      double best = std::numeric_limits<double>::infinity();
      for (size_t c = 0; c < cells; ++c) {
        double w = 0;
        for (int i : idx) w = std::max(w, dist[i][c]);
        best = std::min(best, w);
      }
      rep.eps_prime_measured = std::max(rep.eps_prime_measured, best);
      return;
    }
    for (int i = from; i <= rep.m - left; ++i) {
      idx.push_back(i);
      self(self, i + 1, left - 1);
      idx.pop_back();
    }
  };
  visit(visit, 0, rep.n + 1);
  rep.hypothesis_ok = rep.eps_prime_measured <= eps_prime + rep.slack;
  // Global witness.
  double best = std::numeric_limits<double>::infinity();
  size_t arg = 0;
  for (size_t c = 0; c < cells; ++c) {
    double w = 0;
    for (const auto& D : dist) w = std::max(w, D[c]);
    if (w < best) {
      best = w;
      arg = c;
    }
  }
  rep.witness = g0.center(arg);
  rep.max_dist = best;
  rep.bound = helly_bound(rep.m, rep.n, rep.diameter, eps, eps_prime);
  rep.margin = rep.bound - rep.max_dist;
  return rep;
}

BodyExpr ball_minus_cap(const Vec& center, double r, double eps, double depth, const Vec& u) {
  if (!(eps > 0)) throw std::domain_error("ball_minus_cap: eps must be positive");
  if (!(depth > 0 && depth < r)) throw std::domain_error("ball_minus_cap: need 0 < depth < r");
  const double R = 1 / eps;
  Vec d = u.normalized();
  return subtract(ball(center, r), ball(center + (r + R - depth) * d, R));
}

}  // namespace epsc
