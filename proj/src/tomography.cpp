#include "epsc/tomography.hpp"

#include "epsc/kdtree.hpp"

#include <Eigen/Geometry>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace epsc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Minimizes a convex function f(x, grad) -> value over B(x0, r0) by the central-cut ellipsoid
// method (bisection on the subgradient sign in one dimension). Stops early once stop(value) holds.
template <class F, class Stop>
Vec ellipsoid_min(F&& f, const Vec& x0, double r0, int iters, double gap_tol, Stop&& stop, double& best_val) {
  const long m = x0.size();
  Vec best = x0;
  Vec g(m);
  best_val = f(x0, g);
  if (stop(best_val)) return best;
  if (m == 1) {
    double lo = x0[0] - r0, hi = x0[0] + r0;
    Vec x(1);
    for (int it = 0; it < iters && hi - lo > gap_tol; ++it) {
      x[0] = (lo + hi) / 2;
      double v = f(x, g);
      if (v < best_val) {
        best_val = v;
        best = x;
      }
      if (stop(best_val)) break;
      if (g[0] > 0) hi = x[0];
      else if (g[0] < 0) lo = x[0];
      else break;
    }
    return best;
  }
  Vec c = x0;
  Eigen::MatrixXd P = Eigen::MatrixXd::Identity(m, m) * r0 * r0;
  const double md = static_cast<double>(m);
  for (int it = 0; it < iters; ++it) {
    double v = f(c, g);
    if (v < best_val) {
      best_val = v;
      best = c;
    }
    if (stop(best_val)) break;
    double gpg = g.dot(P * g);
    if (!(gpg > 0) || std::sqrt(gpg) < gap_tol) break;
    Vec Pg = P * g / std::sqrt(gpg);
    c -= Pg / (md + 1);
    P = (md * md / (md * md - 1)) * (P - (2 / (md + 1)) * Pg * Pg.transpose());
  }
  return best;
}

Vec centroid(const Points& P) { return P.rowwise().mean(); }

// One rigid-or-similar motion x -> C + lambda Q (x - C) + p.
struct Motion {
  Eigen::MatrixXd Q;
  double lambda = 1.0;
  Vec p;
  Vec C;
};

class HausdorffEval {
 public:
  HausdorffEval(const Points& K, const Points& L) : K_(K), L_(L), tK_(K), tL_(L) {}

  // Exact Hausdorff distance of the moved K and L; returns early with a value above cutoff.
  double operator()(const Motion& m, double cutoff) const {
    ++evals;
    double cur = 0;
    Points Y = (m.lambda * m.Q) * (K_.colwise() - m.C);
    Y.colwise() += m.C + m.p;
    for (long i = 0; i < Y.cols(); ++i) {
      Vec y = Y.col(i);
      if (tL_.any_within(y, cur)) continue;
      cur = std::max(cur, tL_.nearest_dist(y, kInf));
      if (cur > cutoff) return cur;
    }
    Points X = (m.Q.transpose() / m.lambda) * (L_.colwise() - (m.C + m.p));
    X.colwise() += m.C;
    for (long j = 0; j < X.cols(); ++j) {
      Vec x = X.col(j);
      if (tK_.any_within(x, cur / m.lambda)) continue;
      cur = std::max(cur, m.lambda * tK_.nearest_dist(x, kInf));
      if (cur > cutoff) return cur;
    }
    return cur;
  }
  mutable long evals = 0;

 private:
  const Points& K_;
  const Points& L_;
  KdTree tK_, tL_;
};

}  // namespace

const char* to_string(DistanceKind k) {
  switch (k) {
    case DistanceKind::plain: return "plain";
    case DistanceKind::translative: return "translative";
    case DistanceKind::rotational: return "rotational";
    case DistanceKind::homothetic: return "homothetic";
    case DistanceKind::homothety_rotational: return "homothety_rotational";
  }
  return "?";
}

Eigen::MatrixXd rotation_matrix(const Vec& rot, int n) {
  if (n == 2) {
    if (rot.size() != 1) throw std::domain_error("rotation_matrix: n = 2 takes one angle");
    Eigen::MatrixXd Q(2, 2);
    Q << std::cos(rot[0]), -std::sin(rot[0]), std::sin(rot[0]), std::cos(rot[0]);
    return Q;
  }
  if (n == 3) {
    if (rot.size() != 3) throw std::domain_error("rotation_matrix: n = 3 takes a rotation vector");
    Eigen::Vector3d r(rot[0], rot[1], rot[2]);
    double a = r.norm();
    if (a == 0) return Eigen::MatrixXd::Identity(3, 3);
    return Eigen::AngleAxisd(a, r / a).toRotationMatrix();
  }
  throw std::domain_error("rotation_matrix: rotations are supported for n = 2 and 3 only");
}

Points apply_motion(const Points& K, const DistanceReport& r) {
  const int n = static_cast<int>(K.rows());
  Vec C = r.center.size() ? r.center : Vec::Zero(n);
  Eigen::MatrixXd Q = r.rotation.size() ? rotation_matrix(r.rotation, n) : Eigen::MatrixXd::Identity(n, n);
  Vec p = r.translation.size() ? r.translation : Vec::Zero(n);
  Points Y = (r.lambda * Q) * (K.colwise() - C);
  Y.colwise() += C + p;
  return Y;
}

DistanceReport special_distance(const Points& K, const Points& L, DistanceKind kind, const DistanceConfig& cfg) {
  if (K.cols() == 0 || L.cols() == 0) throw std::domain_error("special_distance: empty point set");
  if (K.rows() != L.rows()) throw std::domain_error("special_distance: dimension mismatch");
  const int n = static_cast<int>(K.rows());
  const bool rot = kind == DistanceKind::rotational || kind == DistanceKind::homothety_rotational;
  const bool hom = kind == DistanceKind::homothetic || kind == DistanceKind::homothety_rotational;
  const bool trans = kind == DistanceKind::translative || kind == DistanceKind::homothetic;
  if (rot && n != 2 && n != 3) throw std::domain_error("special_distance: rotations are supported for n = 2 and 3 only");
  if (rot && cfg.C.size() != n) throw std::domain_error("special_distance: rotational kinds need a center C");
  if (hom && !(cfg.lambda_lo > 0 && cfg.lambda_hi >= cfg.lambda_lo))
    throw std::domain_error("special_distance: bad homothety bracket");

  HausdorffEval H(K, L);
  const int nrot = rot ? (n == 2 ? 1 : 3) : 0;
  const int ntr = trans ? n : 0;
  const int nlam = hom ? 1 : 0;
  const int np = nrot + ntr + nlam;

  DistanceReport rep;
  rep.kind = kind;
  rep.center = rot ? cfg.C : centroid(K);
  const Vec shift = centroid(L) - centroid(K);
  const double loglo = std::log(cfg.lambda_lo), loghi = std::log(cfg.lambda_hi);

  auto decode = [&](const Vec& th) {
    Motion m;
    m.C = rep.center;
    m.Q = nrot ? rotation_matrix(th.head(nrot), n) : Eigen::MatrixXd::Identity(n, n);
    m.p = ntr ? Vec(th.segment(nrot, ntr)) : Vec::Zero(n);
    m.lambda = nlam ? std::exp(std::clamp(th[np - 1], loglo, loghi)) : 1.0;
    return m;
  };

  Vec identity = Vec::Zero(np);
  if (ntr) identity.segment(nrot, ntr) = Vec::Zero(n);
  if (nlam) identity[np - 1] = std::clamp(0.0, loglo, loghi);
  const double plain = H(decode(identity), kInf);
  if (np == 0) {
    rep.value = plain;
    rep.iterations = 1;
    return rep;
  }
  // Translation span around the centroid shift.
  Vec th_shift = identity;
  if (ntr) th_shift.segment(nrot, ntr) = shift;
  const double tr_span = std::max(ntr ? H(decode(th_shift), kInf) : 0.0, 1e-9);
  const double scale = std::max((K.rowwise().maxCoeff() - K.rowwise().minCoeff()).maxCoeff(), tr_span);

  // Per-parameter coarse spacing and final step.
  Vec spacing(np), min_step(np);
  const int coarse = std::max(cfg.coarse, 2);
  for (int i = 0; i < nrot; ++i) {
    spacing[i] = (n == 2 ? 2 * std::numbers::pi : std::numbers::pi / 3) / coarse;
    min_step[i] = cfg.step_tol;
  }
  for (int i = nrot; i < nrot + ntr; ++i) {
    spacing[i] = 2 * tr_span / (coarse - 1);
    min_step[i] = cfg.step_tol * scale;
  }
  if (nlam) {
    spacing[np - 1] = std::max((loghi - loglo) / (coarse - 1), 1e-3);
    min_step[np - 1] = cfg.step_tol;
  }

  // Coarse samples.
  std::vector<Vec> rot_samples;
  if (nrot == 1) {
    for (int k = 0; k < 4 * coarse; ++k) rot_samples.push_back(vec({-std::numbers::pi + 2 * std::numbers::pi * k / (4 * coarse)}));
  } else if (nrot == 3) {
    rot_samples.push_back(Vec::Zero(3));
    for (const auto& ax : sphere_directions(3, 8 * coarse))
      for (int k = 1; k <= 6; ++k) rot_samples.push_back(ax * (std::numbers::pi * k / 6));
  } else {
    rot_samples.push_back(Vec());
  }
  std::vector<Vec> tr_samples;
  if (ntr) {
    long total = 1;
    for (int i = 0; i < n; ++i) total *= coarse;
    for (long c = 0; c < total; ++c) {
      Vec p = shift;
      long r = c;
      for (int i = 0; i < n; ++i) {
        int k = static_cast<int>(r % coarse);
        r /= coarse;
        p[i] += -tr_span + 2 * tr_span * k / (coarse - 1);
      }
      tr_samples.push_back(p);
    }
  } else {
    tr_samples.push_back(Vec());
  }
  std::vector<double> lam_samples;
  if (nlam)
    for (int k = 0; k < coarse; ++k) lam_samples.push_back(loglo + (loghi - loglo) * k / std::max(coarse - 1, 1));
  else
    lam_samples.push_back(0.0);

  struct Sample {
    double v;
    Vec th;
  };
  std::vector<Sample> pool;
  pool.push_back({plain, identity});
  if (ntr) pool.push_back({tr_span, th_shift});
  double cut = std::min(plain, ntr ? tr_span : kInf);
  auto assemble = [&](const Vec& r, const Vec& t, double l) {
    Vec th(np);
    if (nrot) th.head(nrot) = r;
    if (ntr) th.segment(nrot, ntr) = t;
    if (nlam) th[np - 1] = l;
    return th;
  };
  // Keep everything within a factor of the running best so several basins survive.
  for (const auto& r : rot_samples)
    for (const auto& t : tr_samples)
      for (double l : lam_samples) {
        Vec th = assemble(r, t, l);
        double v = H(decode(th), 2 * cut);
        if (v <= 2 * cut) pool.push_back({v, th});
        cut = std::min(cut, v);
      }
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (int s = 0; s < cfg.starts; ++s) {
    Vec th = identity;
    for (int i = 0; i < nrot; ++i) th[i] = U(rng) * (n == 2 ? std::numbers::pi : std::numbers::pi / std::sqrt(3.0));
    for (int i = nrot; i < nrot + ntr; ++i) th[i] = shift[i - nrot] + U(rng) * tr_span;
    if (nlam) th[np - 1] = (loglo + loghi) / 2 + U(rng) * (loghi - loglo) / 2;
    pool.push_back({H(decode(th), kInf), th});
  }
  std::stable_sort(pool.begin(), pool.end(), [](const Sample& a, const Sample& b) { return a.v < b.v; });

  // Pattern search from the identity and the best samples.
  std::vector<Vec> starts{identity};
  for (const auto& s : pool) {
    if (static_cast<int>(starts.size()) > cfg.starts) break;
    bool dup = false;
    for (const auto& t : starts) dup = dup || (t - s.th).cwiseAbs().cwiseQuotient(spacing).maxCoeff() < 0.5;
    if (!dup) starts.push_back(s.th);
  }
  double best = pool.front().v;
  Vec best_th = pool.front().th;
  bool all_converged = true;
  // Hooke-Jeeves: coordinate exploration plus pattern moves along successful directions, which
  // follow the diagonal valleys of a max-type objective.
  const long eval_cap = 3000;
  auto explore = [&](Vec x, double& fx, const Vec& step) {
    for (int i = 0; i < np; ++i)
      for (double sgn : {1.0, -1.0}) {
        Vec t = x;
        t[i] += sgn * step[i];
        if (nlam && i == np - 1) t[i] = std::clamp(t[i], loglo, loghi);
        double w = H(decode(t), fx);
        if (w < fx) {
          fx = w;
          x = t;
          break;
        }
      }
    return x;
  };
  for (const auto& s0 : starts) {
    const long e0 = H.evals;
    Vec base = s0;
    double fbase = H(decode(base), kInf);
    Vec step = spacing / 2;
    bool converged = false;
    while (H.evals - e0 < eval_cap) {
      double fx = fbase;
      Vec x = explore(base, fx, step);
      if (fx < fbase) {
        while (H.evals - e0 < eval_cap) {
          Vec pattern = 2 * x - base;
          base = x;
          fbase = fx;
          double fp = H(decode(pattern), fbase);
          Vec y = explore(pattern, fp, step);
          if (!(fp < fbase)) break;
          x = y;
          fx = fp;
        }
        continue;
      }
      step /= 2;
      if ((step.array() < min_step.array()).all()) {
        converged = true;
        break;
      }
    }
    Vec th = base;
    double v = fbase;
    all_converged = all_converged && converged;
    if (v < best) {
      best = v;
      best_th = th;
    }
  }
  rep.value = std::min(best, plain);
  if (!(best < plain)) best_th = identity;
  Motion m = decode(best_th);
  rep.lambda = m.lambda;
  rep.translation = m.p;
  if (nrot) rep.rotation = best_th.head(nrot);
  rep.iterations = static_cast<int>(H.evals);
  rep.converged = all_converged;
  return rep;
}

SupportBallReport smallest_support_ball(const Points& K, const Vec& omega, double tol, double cap) {
  if (K.cols() == 0) throw std::domain_error("smallest_support_ball: empty point set");
  if (omega.size() != K.rows()) throw std::domain_error("smallest_support_ball: dimension mismatch");
  if (!(tol > 0)) throw std::domain_error("smallest_support_ball: tol must be positive");
  const int n = static_cast<int>(K.rows());
  SupportBallReport rep;
  rep.omega = omega.normalized();
  Eigen::VectorXd a = K.transpose() * rep.omega;
  const double h = a.maxCoeff();
  if (n == 1) {
    double R = (h - a.minCoeff()) / 2;
    rep.R = R;
    rep.center = rep.omega * (h - R);
    rep.finite = true;
    return rep;
  }
  Eigen::MatrixXd B = orth_complement(rep.omega, n);
  Points X = B.transpose() * K;  // coordinates in the support hyperplane
  Eigen::VectorXd d = (h - a.array()).matrix();
  // Radius needed when the center sits at depth R below the support point of u:
  // |x_perp - u|^2 + d^2 - tol^2 <= 2 R (d + tol).
  auto F = [&](const Vec& u, Vec& g) {
    double best = -kInf;
    long arg = 0;
    for (long i = 0; i < X.cols(); ++i) {
      double v = ((X.col(i) - u).squaredNorm() + d[i] * d[i] - tol * tol) / (2 * (d[i] + tol));
      if (v > best) {
        best = v;
        arg = i;
      }
    }
    g = (u - X.col(arg)) / (d[arg] + tol);
    return best;
  };
  long top = 0;
  a.maxCoeff(&top);
  Vec u0 = X.col(top);
  double r0 = (X.colwise() - u0).colwise().norm().maxCoeff() + tol;
  double R = 0;
  Vec u = ellipsoid_min(F, u0, r0, 4000, 1e-12 * std::max(1.0, r0), [](double) { return false; }, R);
  R = std::max(R, 0.0);
  rep.finite = R <= cap;
  rep.R = rep.finite ? R : kInf;
  rep.center = B * u + rep.omega * (h - R);
  return rep;
}

RelativeSupport relative_support(const Points& K, const Vec& C, double eps0, double tol) {
  if (K.cols() == 0) throw std::domain_error("relative_support: empty point set");
  if (C.size() != K.rows()) throw std::domain_error("relative_support: dimension mismatch");
  if (!(eps0 > 0) || !(tol > 0)) throw std::domain_error("relative_support: eps0 and tol must be positive");
  const int n = static_cast<int>(K.rows());
  RelativeSupport rs;
  rs.C = C;
  rs.eps0 = eps0;
  Eigen::VectorXd dist = (K.colwise() - C).colwise().norm().transpose();
  const double R0 = 1 / eps0;
  rs.penetration = std::max(0.0, R0 - dist.minCoeff());
  if (rs.penetration > tol)
    throw PreconditionError("relative support requires B(C, 1/eps0) to be an outer support ball (penetration " +
                            std::to_string(rs.penetration) + ")");
  const double outer = dist.maxCoeff();
  rs.r = outer - R0;
  std::vector<long> sup;
  for (long i = 0; i < K.cols(); ++i)
    if (dist[i] >= outer - tol) sup.push_back(i);
  rs.support_set.resize(n, static_cast<long>(sup.size()));
  Vec e0 = Vec::Zero(n);
  for (size_t j = 0; j < sup.size(); ++j) {
    rs.support_set.col(static_cast<long>(j)) = K.col(sup[j]);
    e0 += (K.col(sup[j]) - C).normalized();
  }
  e0.normalize();
  // Smallest ball containing K (within tol) inside B(C, outer): bisection on R, each step a convex
  // feasibility problem over the center.
  Vec kc = centroid(K);
  const double kr = (K.colwise() - kc).colwise().norm().maxCoeff();
  auto feasible = [&](double R, Vec& center) {
    auto H = [&](const Vec& c, Vec& g) {
      double best = -kInf;
      long arg = 0;
      for (long i = 0; i < K.cols(); ++i) {
        double v = (K.col(i) - c).norm();
        if (v > best) {
          best = v;
          arg = i;
        }
      }
      double v1 = best - R - tol;
      Vec dc = c - C;
      double v2 = dc.norm() - (outer - R);
      if (v1 >= v2) {
        Vec q = c - K.col(arg);
        double nq = q.norm();
        g = nq > 0 ? Vec(q / nq) : Vec(Vec::Zero(n));
        return v1;
      }
      double nd = dc.norm();
      g = nd > 0 ? Vec(dc / nd) : Vec(Vec::Zero(n));
      return v2;
    };
    Vec start = C + std::max(outer - R, 0.0) * e0;
    double val = 0;
    center = ellipsoid_min(H, start, (start - kc).norm() + kr + tol, 600, 1e-13, [](double v) { return v <= 0; }, val);
    return val <= 0;
  };
  double lo = 0, hi = outer;
  Vec best_center = C, c;
  if (feasible(0, c)) {
    hi = 0;
    best_center = c;
  }
  for (int it = 0; it < 60 && hi - lo > 1e-10 * std::max(1.0, outer); ++it) {
    double mid = (lo + hi) / 2;
    if (feasible(mid, c)) {
      hi = mid;
      best_center = c;
    } else {
      lo = mid;
    }
  }
  rs.R = hi;
  rs.inner_ball_center = best_center;
  return rs;
}

double stability_alpha_sq(const StabilityParams& p) {
  if (!(p.eps0 > 0)) throw std::domain_error("stability bound: eps0 must be positive");
  double den = 1 + p.eps0 * (p.r - p.R);
  if (!(den > 0)) throw std::domain_error("stability bound: 1 + eps0 (r - R) must be positive");
  return p.eps0 / den;
}

double stability_eps_tilde(const StabilityParams& p) {
  if (!(p.R > 0)) throw std::domain_error("stability bound: R must be positive");
  const double alpha = std::sqrt(stability_alpha_sq(p));
  const double s = p.R - p.eps;
  return s * alpha * (1 + s / (4 * std::sqrt(p.R)) * alpha);
}

double stability_bound(StabilityKind k, const StabilityParams& p) {
  if (!(p.eps >= 0)) throw std::domain_error("stability bound: eps must be nonnegative");
  if (!(p.R > 0)) throw std::domain_error("stability bound: R must be positive");
  const double se = std::sqrt(p.eps);
  switch (k) {
    case StabilityKind::lemma4: return 2 * (std::sqrt(p.R) + se) * se;
    case StabilityKind::lemma5: return (2 * std::sqrt(p.R) + 3 * se + stability_eps_tilde(p)) * se;
    case StabilityKind::thm7a: return 2 * (std::sqrt(2 * p.R) + se) * se;
    case StabilityKind::thm7b: {
      double s = p.eps + stability_eps_tilde(p);
      if (s < 0) throw std::domain_error("stability bound: eps + eps~ must be nonnegative");
      return (std::sqrt(8 * p.R) + 3 * std::sqrt(s)) * se;
    }
  }
  return kInf;
}

namespace {

// Whether the hyperplane through C with normal w comes within tol of the point set.
bool plane_meets(const Points& P, const Vec& C, const Vec& w, double tol) {
  Eigen::VectorXd s = (P.colwise() - C).transpose() * w;
  return s.minCoeff() <= tol && s.maxCoeff() >= -tol;
}

}  // namespace

PlaneFamily def13_family(const Points& K, const Points& L, const Vec& omega0, const Vec& A, const Vec& C, double eps0,
                         int count, double tol) {
  const int n = static_cast<int>(K.rows());
  if (n != 2 && n != 3) throw std::domain_error("def13_family: supported for n = 2 and 3");
  if (L.rows() != n || omega0.size() != n || A.size() != n || C.size() != n)
    throw std::domain_error("def13_family: dimension mismatch");
  if (count < 1) throw std::domain_error("def13_family: count must be positive");
  PlaneFamily fam;
  fam.kind = PlaneFamilyKind::Def13;
  fam.omega0 = omega0.normalized();
  fam.A = A;
  const double R0 = 1 / eps0;
  KdTree tK(K), tL(L);
  auto touches = [&](const KdTree& t) {
    double d = t.nearest_dist(C, kInf);
    return std::abs(d - R0) <= tol;
  };
  if (!touches(tK) && !touches(tL))
    throw PreconditionError("Definition 13 requires B(C, 1/eps0) to be an outer support ball of K or L");
  Vec ca = A - C;
  if (!(ca.norm() > 0)) throw std::domain_error("def13_family: C coincides with A");
  ca.normalize();
  Vec pi = fam.omega0 - fam.omega0.dot(ca) * ca;
  fam.degenerate = pi.norm() < 1e-9;
  if (!fam.degenerate) pi.normalize();
  std::vector<Vec> admissible;
  auto consider = [&](const Vec& w) {
    if (plane_meets(K, C, w, tol) && plane_meets(L, C, w, tol)) admissible.push_back(w);
  };
  const int scan = 1440;
  if (n == 2) {
    // Lines through C: the admissible normal set {+-CA} gives lines that miss small bodies, so the
    // scan runs over all lines through C; the family is flagged degenerate.
    fam.degenerate = true;
    for (int k = 0; k < scan; ++k) {
      double t = std::numbers::pi * k / scan;
      consider(vec({std::cos(t), std::sin(t)}));
    }
  } else {
    Vec w2;
    if (fam.degenerate) {
      // Every direction is admissible; scan normals orthogonal to CA (planes through the line CA).
      Eigen::MatrixXd Bc = orth_complement(ca, 3);
      for (int k = 0; k < scan; ++k) {
        double t = std::numbers::pi * k / scan;
        consider(std::cos(t) * Bc.col(0) + std::sin(t) * Bc.col(1));
      }
    } else {
      Eigen::Vector3d p3(pi[0], pi[1], pi[2]), c3(ca[0], ca[1], ca[2]);
      Eigen::Vector3d w = p3.cross(c3).normalized();
      Vec wv = Vec(w);
      for (int k = 0; k < scan; ++k) {
        double t = std::numbers::pi * k / scan;
        consider(std::cos(t) * ca + std::sin(t) * wv);
      }
    }
  }
  const int m = static_cast<int>(admissible.size());
  for (int j = 0; j < std::min(count, m); ++j) {
    int idx = count == 1 ? m / 2 : static_cast<int>(std::lround(static_cast<double>(j) * (m - 1) / (count - 1)));
    const Vec& w = admissible[static_cast<size_t>(idx)];
    if (!fam.planes.empty() && (fam.planes.back().omega - w).norm() < 1e-15) continue;
    fam.planes.push_back({C, w});
    if (!fam.degenerate) fam.max_residual = std::max(fam.max_residual, std::abs(w.dot(pi)));
  }
  return fam;
}

PlaneFamily def11_family(const Points& K, const Points& L, double eps, int count, double tol) {
  const int n = static_cast<int>(K.rows());
  if (L.rows() != n) throw std::domain_error("def11_family: dimension mismatch");
  if (!(eps > 0)) throw std::domain_error("def11_family: eps must be positive");
  PlaneFamily fam;
  fam.kind = PlaneFamilyKind::Def11;
  KdTree tK(K), tL(L);
  const double R0 = 1 / eps;
  const Vec cL = centroid(L);
  const Vec y = L.col(tL.nearest(cL).index);
  for (const auto& w : sphere_directions(n, count)) {
    Vec u = orth_complement(w, n).col(0);
    // Walk from y along u until dist(., K) reaches 1/eps, then refine by bisection.
    double step = R0 / 32, s = 0;
    while (tK.nearest_dist(y + s * u, kInf) < R0 && s < 64 * R0) s += step;
    double lo = std::max(0.0, s - step), hi = s;
    for (int it = 0; it < 50; ++it) {
      double mid = (lo + hi) / 2;
      (tK.nearest_dist(y + mid * u, kInf) < R0 ? lo : hi) = mid;
    }
    Vec C = y + hi * u;
    if (tK.nearest_dist(C, kInf) < 2 / eps && plane_meets(L, C, w, tol)) fam.planes.push_back({C, w});
  }
  return fam;
}

Points solid_points(const Grid& g) { return centers_of(g, CellSet::solid); }

namespace {

bool same_frame(const Grid& a, const Grid& b) {
  return a.dim == b.dim && a.n == b.n && a.h == b.h && (a.lo - b.lo).cwiseAbs().maxCoeff() < 1e-12;
}

// Screen coordinates of the images, snapped to a lattice of pitch q and deduplicated.
Points screen_coords(const CircularProjection& f, const Points& P, double q) {
  Eigen::MatrixXd B = screen_basis(f);
  const long m = B.cols();
  std::vector<std::vector<long>> keys;
  keys.reserve(static_cast<size_t>(P.cols()));
  for (long i = 0; i < P.cols(); ++i) {
    Vec s = B.transpose() * (project_point(f, P.col(i)) - f.C);
    std::vector<long> k(static_cast<size_t>(m));
    for (long j = 0; j < m; ++j) k[static_cast<size_t>(j)] = std::lround(s[j] / q);
    keys.push_back(std::move(k));
  }
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
  Points out(m, static_cast<long>(keys.size()));
  for (size_t i = 0; i < keys.size(); ++i)
    for (long j = 0; j < m; ++j) out(j, static_cast<long>(i)) = static_cast<double>(keys[i][static_cast<size_t>(j)]) * q;
  return out;
}

}  // namespace

Theorem6Result theorem6_distinguish(const Grid& K, const Grid& L, double eps, const Budget& b) {
  if (!same_frame(K, L)) throw std::domain_error("theorem6_distinguish: K and L must share one grid frame");
  if (!(eps > 0)) throw std::domain_error("theorem6_distinguish: eps must be positive");
  Budget bb = b;
  bb.stop_at_first_violation = true;
  if (check_K2(K, eps, bb).status == Status::violated || check_K2(L, eps, bb).status == Status::violated)
    throw PreconditionError("Theorem 6 requires K and L of class K2^eps");
  const Points PK = solid_points(K), PL = solid_points(L);
  if (PK.cols() == 0 || PL.cols() == 0) throw PreconditionError("Theorem 6 requires nonempty bodies");
  const double delta = hausdorff(PK, PL);
  if (!(delta < 1 / eps))
    throw PreconditionError("Theorem 6 requires delta(K, L) < 1/eps (measured " + std::to_string(delta) + ")");
  Theorem6Result res;
  std::vector<uint8_t> mK(K.size()), mL(L.size());
  for (size_t i = 0; i < K.size(); ++i) {
    mK[i] = K.solid(i);
    mL[i] = L.solid(i);
  }
  const std::vector<double> dK = distance_field(K, mK), dL = distance_field(L, mL);
  // Deepest interior cell of one body lying outside the other.
  double D = 0;
  size_t arg = 0;
  bool swapped = false;
  for (size_t i = 0; i < K.size(); ++i) {
    if (L.cells[i] == Cell::inside && K.cells[i] == Cell::outside && dK[i] > D) {
      D = dK[i];
      arg = i;
      swapped = false;
    }
    if (K.cells[i] == Cell::inside && L.cells[i] == Cell::outside && dL[i] > D) {
      D = dL[i];
      arg = i;
      swapped = true;
    }
  }
  if (D == 0) {
    res.identical = true;
    return res;
  }
  res.swapped = swapped;
  const Grid& other = swapped ? L : K;  // the body y lies outside of
  const Points& Pother = swapped ? PL : PK;
  const Vec y = K.center(arg);
  res.interior_point = y;
  const int n = K.dim;
  const double R = 1 / eps;
  KdTree obs(Pother);
  auto dirs = cover_directions(n, 0);
  std::optional<Vec> C;
  for (double frac : {0.5, 0.25, 0.125}) {
    double g = frac * D;
    auto cr = cover_search(obs, y, R - g, R - g / 2, 0.0, other.h, dirs);
    if (cr.ok) {
      C = cr.C;
      break;
    }
  }
  if (!C) return res;
  // Normals orthogonal to y - C put y on the screen, where f(y) = y.
  Vec v = (y - *C).normalized();
  Eigen::MatrixXd Bv = orth_complement(v, n);
  std::vector<Vec> normals;
  if (n == 2) {
    normals.push_back(Bv.col(0));
  } else {
    for (int k = 0; k < 16; ++k) {
      double t = std::numbers::pi * k / 16;
      Vec w = std::cos(t) * Bv.col(0) + std::sin(t) * Bv.col(1);
      normals.push_back(w.normalized());
    }
  }
  const Grid& body = swapped ? K : L;  // contains y
  for (const auto& w : normals) {
    CircularProjection f = make_projection(*C, w);
    try {
      Grid frame = screen_frame(f, {&K, &L}, K.h);
      ScreenImage imIn = project_body(f, body, &frame);
      ScreenImage imOut = project_body(f, other, &frame);
      Vec s = screen_basis(f).transpose() * (y - *C);
      long cell = frame.locate(s);
      if (cell < 0) continue;
      double gap = point_set_dist(imOut.points, y);
      bool differs = imIn.raster.solid(static_cast<size_t>(cell)) && !imOut.raster.solid(static_cast<size_t>(cell));
      if (differs && gap > frame.diag()) {
        res.witness_plane = PuncturedPlane{*C, w};
        res.image_gap = gap;
        return res;
      }
    } catch (const AxisError&) {
      continue;
    }
  }
  return res;
}

Theorem7Report theorem7_experiment(const Grid& K, const Grid& L, const Vec& omega0, double eps0, Theorem7Mode mode,
                                   const Theorem7Options& opt) {
  if (K.dim != L.dim) throw std::domain_error("theorem7_experiment: dimension mismatch");
  const int n = K.dim;
  if (n != 2 && n != 3) throw std::domain_error("theorem7_experiment: supported for n = 2 and 3");
  if (!(eps0 > 0)) throw std::domain_error("theorem7_experiment: eps0 must be positive");
  if (omega0.size() != n || !(omega0.norm() > 0)) throw std::domain_error("theorem7_experiment: bad omega0");
  Theorem7Report rep;
  rep.mode = mode;
  rep.eps0 = eps0;
  rep.omega0 = omega0.normalized();
  const Points PK = solid_points(K), PL = solid_points(L);
  if (PK.cols() == 0 || PL.cols() == 0) throw PreconditionError("Theorem 7 requires nonempty bodies");
  const double lim = 1 / (2 * eps0);
  const double dK = grid_diameter(K, CellSet::solid), dL = grid_diameter(L, CellSet::solid);
  if (!(dK < lim)) throw PreconditionError("Theorem 7 requires d_K < 1/(2 eps0) (measured " + std::to_string(dK) + ")");
  if (!(dL < lim)) throw PreconditionError("Theorem 7 requires d_L < 1/(2 eps0) (measured " + std::to_string(dL) + ")");
  const WitnessPair wp = witness_pair(PK, PL);
  rep.global_plain = wp.dist;
  if (!(wp.dist < lim))
    throw PreconditionError("Theorem 7 requires delta(K, L) < 1/(2 eps0) (measured " + std::to_string(wp.dist) + ")");
  if (opt.check_class) {
    Budget b;
    b.stop_at_first_violation = true;
    if (check_K3(K, eps0, K3Mode::viaK5, b).status == Status::violated ||
        check_K3(L, eps0, K3Mode::viaK5, b).status == Status::violated)
      throw PreconditionError("Theorem 7 requires K and L of class K3^eps0");
  }
  const double diag = K.diag();
  const SupportBallReport sb = smallest_support_ball(PK, rep.omega0, diag / 2);
  if (!(sb.finite && sb.R < 1 / (3 * eps0)))
    throw PreconditionError("Theorem 7 requires R_K(omega0) < 1/(3 eps0) (measured " + std::to_string(sb.R) + ")");
  const SupportData sK = support_data(PK, rep.omega0, K.h / 2), sL = support_data(PL, rep.omega0, L.h / 2);
  rep.A = sK.support_set.rowwise().mean();
  if (!(std::abs(sK.h - sL.h) <= diag && point_set_dist(sL.support_set, rep.A) <= diag))
    throw PreconditionError("Theorem 7 requires A = S_K(omega0) in S_L(omega0)");

  // Witness construction: b realizes delta(K, L) with foot a in the other body; the outer support
  // ball B(C, 1/eps0) of the foot's body at a separates it from B(b, delta).
  Vec foot = wp.side == Side::fromK ? wp.a : wp.b;
  Vec far = wp.side == Side::fromK ? wp.b : wp.a;
  const bool foot_in_K = wp.side == Side::fromK;
  const Points& Pfoot = foot_in_K ? PK : PL;
  if (wp.dist > 0) {
    rep.C = foot + (far - foot).normalized() / eps0;
  } else {
    foot = rep.A;
    far = rep.A;
    rep.C = rep.A + rep.omega0 / eps0;
  }
  {
    // Raster normals are noisy: take the center nearest b among radius-1/eps0 balls missing the
    // foot's body, then settle it on the level set dist(., body) = 1/eps0.
    KdTree tf(Pfoot);
    const auto dirs = cover_directions(n, 0);
    const double R0 = 1 / eps0;
    if (wp.dist > 0) {
      double lo = std::max(0.0, R0 - wp.dist - diag), hi = R0;
      Vec best = rep.C;
      for (int it = 0; it < 30 && hi - lo > K.h / 20; ++it) {
        double mid = (lo + hi) / 2;
        auto cr = cover_search(tf, far, mid, R0, 0.0, K.h, dirs, &best);
        if (cr.ok) {
          hi = mid;
          best = cr.C;
        } else {
          lo = mid;
        }
      }
      rep.C = best;
    }
    for (int it = 0; it < 50; ++it) {
      auto hit = tf.nearest(rep.C);
      if (std::abs(hit.dist - R0) <= 1e-12 * R0) break;
      Vec q = Pfoot.col(hit.index);
      rep.C = q + (rep.C - q).normalized() * R0;
    }
  }

  // Planes: the proof plane through C and b first, then the family.
  PlaneFamily fam = def13_family(PK, PL, rep.omega0, rep.A, rep.C, eps0, opt.planes, diag);
  std::vector<Vec> normals;
  {
    Vec ca = (rep.A - rep.C).normalized();
    Vec pi = rep.omega0 - rep.omega0.dot(ca) * ca;
    Vec radial = (far - rep.C).normalized();
    Vec w;
    if (n == 2) {
      w = vec({-radial[1], radial[0]});
    } else {
      Eigen::Vector3d r3(radial[0], radial[1], radial[2]);
      Eigen::Vector3d p3 = pi.norm() > 1e-9 ? Eigen::Vector3d(pi[0], pi[1], pi[2]) : Eigen::Vector3d(rep.omega0[0], rep.omega0[1], rep.omega0[2]);
      Eigen::Vector3d c = p3.cross(r3);
      if (c.norm() < 1e-9) c = Eigen::Vector3d(Vec(orth_complement(radial, 3).col(0)).data());
      w = Vec(c.normalized());
    }
    normals.push_back(w);
  }
  for (const auto& pl : fam.planes) normals.push_back(pl.omega);

  DistanceConfig pcfg = opt.distance;
  pcfg.coarse = opt.plane_coarse;
  for (const auto& w : normals) {
    CircularProjection f = make_projection(rep.C, w);
    PlaneMeasurement pm;
    pm.plane = {rep.C, w};
    Points IK, IL;
    try {
      IK = screen_coords(f, PK, K.h / 8);
      IL = screen_coords(f, PL, K.h / 8);
    } catch (const AxisError&) {
      continue;
    }
    pm.plain = hausdorff(IK, IL);
    if (mode == Theorem7Mode::translative) {
      pm.deviation = special_distance(IK, IL, DistanceKind::translative, pcfg).value;
    } else if (n - 1 == 2) {
      DistanceConfig c = pcfg;
      c.C = Vec::Zero(2);
      pm.deviation = special_distance(IK, IL, DistanceKind::rotational, c).value;
    } else {
      pm.deviation = pm.plain;  // rotations of a line about a point of it are trivial
    }
    rep.planes.push_back(pm);
    rep.eps = std::max(rep.eps, pm.deviation);
  }
  if (rep.planes.empty()) throw std::runtime_error("theorem7_experiment: every plane met the projection axis");

  rep.slack = diag;
  if (mode == Theorem7Mode::translative) {
    rep.R_support = sb.R;
    rep.global = special_distance(PK, PL, DistanceKind::translative, opt.distance).value;
    rep.bound = stability_bound(StabilityKind::thm7a, {rep.eps, rep.R_support, eps0, 0.0});
  } else {
    RelativeSupport rs = relative_support(Pfoot, rep.C, eps0, diag);
    rep.R_support = rs.R;
    rep.r_support = rs.r;
    DistanceConfig c = opt.distance;
    c.C = rep.C;
    rep.global = special_distance(PK, PL, DistanceKind::rotational, c).value;
    rep.bound = stability_bound(StabilityKind::thm7b, {rep.eps, rep.R_support, eps0, rep.r_support});
  }
  rep.projection_dominates = rep.global_plain <= rep.planes.front().plain + rep.slack;
  rep.pass = rep.global <= rep.bound + rep.slack;
  return rep;
}

Grid convex_hull_raster(const Grid& K, int directions) {
  if (directions <= 0) directions = K.dim == 2 ? 720 : 2000;
  const Points P = solid_points(K);
  Grid out = empty_like(K);
  if (P.cols() == 0) return out;
  const auto dirs = sphere_directions(K.dim, directions);
  Eigen::MatrixXd W(K.dim, static_cast<long>(dirs.size()));
  for (size_t i = 0; i < dirs.size(); ++i) W.col(static_cast<long>(i)) = dirs[i];
  const Eigen::VectorXd hK = (W.transpose() * P).rowwise().maxCoeff();
  for (size_t i = 0; i < out.size(); ++i) {
    Eigen::VectorXd s = W.transpose() * K.center(i);
    if (((s - hK).array() <= 1e-9).all()) out.cells[i] = Cell::inside;
  }
  return out;
}

Prop3Report prop3_check(const Grid& K, const Grid& L, double eps, const Prop3Options& opt) {
  if (K.dim != L.dim) throw std::domain_error("prop3_check: dimension mismatch");
  if (!(eps > 0)) throw std::domain_error("prop3_check: eps must be positive");
  Prop3Report rep;
  const Points PK = solid_points(K), PL = solid_points(L);
  if (PK.cols() == 0 || PL.cols() == 0) throw PreconditionError("Proposition 3 requires nonempty bodies");
  rep.d_K = grid_diameter(K, CellSet::solid);
  if (opt.require_class) {
    if (!(rep.d_K <= 1 / (2 * eps)))
      throw PreconditionError("Proposition 3 requires d_K <= 1/(2 eps) (measured " + std::to_string(rep.d_K) + ")");
    Budget b;
    b.stop_at_first_violation = true;
    if (check_K3(K, eps, K3Mode::viaK5, b).status == Status::violated)
      throw PreconditionError("Proposition 3 requires K of class K3^eps");
  }
  const int count = opt.directions > 0 ? opt.directions : (K.dim == 2 ? 720 : 2000);
  rep.support_excess = -kInf;
  for (const auto& w : sphere_directions(K.dim, count)) {
    double hK = (PK.transpose() * w).maxCoeff(), hL = (PL.transpose() * w).maxCoeff();
    rep.support_excess = std::max(rep.support_excess, hL - hK);
  }
  rep.support_dominated = rep.support_excess <= K.diag();
  rep.eps_prime = eps * rep.d_K * rep.d_K / 2;
  rep.max_dist = directed_hausdorff(PL, PK);
  rep.slack = opt.slack_cells * K.h;
  rep.conclusion_holds = rep.max_dist <= rep.eps_prime + rep.slack;
  return rep;
}

}  // namespace epsc
