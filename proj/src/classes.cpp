#include "epsc/classes.hpp"

#include "epsc/kdtree.hpp"
#include "epsc/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <atomic>
#include <mutex>
#include <unordered_set>

namespace epsc {

const char* to_string(Status s) {
  switch (s) {
    case Status::satisfied: return "satisfied";
    case Status::violated: return "violated";
    case Status::unknown: return "unknown";
  }
  return "?";
}

Status combine(Status a, Status b) {
  if (a == Status::violated || b == Status::violated) return Status::violated;
  if (a == Status::unknown || b == Status::unknown) return Status::unknown;
  return Status::satisfied;
}

std::vector<Vec> cover_directions(int n, int requested) {
  if (n == 1) return sphere_directions(1, 2);
  int count = requested > 0 ? requested : (n == 2 ? 32 : 96);
  return sphere_directions(n, count);
}

CoverResult cover_search(const KdTree& obs, const Vec& x, double rho, double R, double tol, double h,
                         const std::vector<Vec>& dirs, const Vec* hint) {
  CoverResult res;
  const double goal = R - tol;
  auto phi = [&](const Vec& C) {
    ++res.evals;
    return obs.nearest_dist(C, R);
  };
  auto consider = [&](const Vec& C) {
    double v = phi(C);
    if (res.C.size() == 0 || v > res.best) {
      res.best = v;
      res.C = C;
    }
    return v >= goal;
  };
  auto finish = [&] {
    res.ok = true;
    return res;
  };
  if (obs.empty()) {
    res.best = R;
    res.C = x;
    return finish();
  }
  if (hint && hint->size() == x.size() && (*hint - x).norm() <= rho && consider(*hint)) return finish();
  auto near = obs.nearest(x);
  Vec away = x - obs.points().col(near.index);
  double an = away.norm();
  if (an > 0) {
    away /= an;
    if (consider(x + rho * away)) return finish();
  }
  struct Sample {
    double v;
    Vec C;
  };
  std::vector<Sample> top;  // best few samples, descending
  auto keep = [&](double v, const Vec& C) {
    if (top.size() < 3 || v > top.back().v) {
      top.push_back({v, C});
      std::sort(top.begin(), top.end(), [](const Sample& a, const Sample& b) { return a.v > b.v; });
      if (top.size() > 3) top.pop_back();
    }
  };
  if (res.C.size()) keep(res.best, res.C);
  for (double frac : {1.0, 2.0 / 3.0, 1.0 / 3.0})
    for (const auto& d : dirs) {
      Vec C = x + frac * rho * d;
      double v = phi(C);
      if (v > res.best) {
        res.best = v;
        res.C = C;
      }
      if (v >= goal) return finish();
      keep(v, C);
    }
  // Pattern search from the best samples: coordinate, diagonal, and ascent moves.
  const int n = static_cast<int>(x.size());
  std::vector<Vec> moves;
  for (int i = 0; i < n; ++i)
    for (double sgn : {1.0, -1.0}) {
      Vec m = Vec::Zero(n);
      m[i] = sgn;
      moves.push_back(m);
    }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (double si : {1.0, -1.0})
        for (double sj : {1.0, -1.0}) {
          Vec m = Vec::Zero(n);
          m[i] = si * M_SQRT1_2;
          m[j] = sj * M_SQRT1_2;
          moves.push_back(m);
        }
  auto clamp = [&](Vec T) {
    Vec off = T - x;
    double on = off.norm();
    if (on > rho) T = x + off * (rho / on);
    return T;
  };
  for (const auto& start : top) {
    Vec C = start.C;
    double cur = start.v;
    double step = rho / 8;
    int iters = 0;
    while (step >= h / 16 && iters < 80) {
      ++iters;
      bool moved = false;
      auto nb = obs.nearest(C);
      Vec up = C - obs.points().col(nb.index);
      if (up.norm() > 0) {
        Vec T = clamp(C + step * up.normalized());
        double v = phi(T);
        if (v > cur + 1e-12) {
          cur = v;
          C = T;
          moved = true;
        }
      }
      for (size_t mi = 0; mi < moves.size() && !moved; ++mi) {
        Vec T = clamp(C + step * moves[mi]);
        double v = phi(T);
        if (v > cur + 1e-12) {
          cur = v;
          C = T;
          moved = true;
        }
      }
      if (cur > res.best) {
        res.best = cur;
        res.C = C;
      }
      if (cur >= goal) return finish();
      if (!moved) step /= 2;
    }
  }
  return res;
}

namespace {

constexpr size_t kChunk = 1024;

// Per-point outcome of a cover test.
struct PointOutcome {
  enum Kind : uint8_t { ok, unknown, violated, skipped } kind = ok;
  double best = 0.0;
  double rho = 0.0;
  Vec C;
  int orientation = -1;
};

Points centers_at(const Grid& g, const std::vector<size_t>& idx) {
  Points P(g.dim, static_cast<Eigen::Index>(idx.size()));
  for (size_t j = 0; j < idx.size(); ++j) P.col(static_cast<Eigen::Index>(j)) = g.center(idx[j]);
  return P;
}

void require_eps(double eps) {
  if (!(eps > 0)) throw std::domain_error("class check: eps must be positive");
}

void require_nonempty(const Grid& g) {
  if (g.count(Cell::outside) == g.size()) throw std::domain_error("class check: empty grid");
}

// Stride-subsample when the budget caps the number of test points.
std::vector<size_t> apply_budget(std::vector<size_t> pts, const Budget& b, bool& subsampled) {
  subsampled = false;
  if (b.max_test_points > 0 && static_cast<long>(pts.size()) > b.max_test_points) {
    std::vector<size_t> out;
    double stride = static_cast<double>(pts.size()) / b.max_test_points;
    for (long i = 0; i < b.max_test_points; ++i) out.push_back(pts[static_cast<size_t>(i * stride)]);
    subsampled = true;
    return out;
  }
  return pts;
}

// Shared driver for ball-cover classes: each test point needs some C in B(x, rho(x)).
struct CoverDriver {
  const Grid& g;
  double R, tol, margin;
  const Budget& budget;

  template <class Eval>
  std::vector<PointOutcome> run(const std::vector<size_t>& pts, Eval&& eval, long& candidates) {
    std::vector<PointOutcome> out(pts.size());
    const size_t nchunks = (pts.size() + kChunk - 1) / kChunk;
    std::vector<long> evals(nchunks, 0);
    // With stop_at_first_violation, chunks after the first violating one are skipped; every chunk
    // before it still runs, so the outcome matches a sequential sweep.
    std::atomic<size_t> first_bad{nchunks};
    for_chunks(pts.size(), kChunk, budget.workers, [&](size_t c, size_t lo, size_t hi) {
      if (budget.stop_at_first_violation && c > first_bad.load()) {
        for (size_t i = lo; i < hi; ++i) out[i].kind = PointOutcome::skipped;
        return;
      }
      Vec cache;
      int cache_orient = -1;
      for (size_t i = lo; i < hi; ++i) {
        out[i] = eval(pts[i], cache, cache_orient, evals[c]);
        if (out[i].kind == PointOutcome::ok) {
          cache = out[i].C;
          cache_orient = out[i].orientation;
        }
        if (out[i].kind == PointOutcome::violated && budget.stop_at_first_violation) {
          size_t cur = first_bad.load();
          while (c < cur && !first_bad.compare_exchange_weak(cur, c)) {
          }
        }
      }
    });
    size_t counted = nchunks;
    if (budget.stop_at_first_violation) {
      counted = std::min(nchunks, first_bad.load() + 1);
      for (size_t c = counted; c < nchunks; ++c)
        for (size_t i = c * kChunk; i < std::min(pts.size(), (c + 1) * kChunk); ++i) out[i].kind = PointOutcome::skipped;
    }
    // Chunks past the first violation may have run on other workers; their work is not counted.
    for (size_t c = 0; c < counted; ++c) candidates += evals[c];
    return out;
  }
};

void summarize(ClassVerdict& v, const Grid& g, const std::vector<size_t>& pts, const std::vector<PointOutcome>& out,
               bool smallest_rho_witness, double R) {
  v.tested_points = 0;
  long best_i = -1;
  for (size_t i = 0; i < out.size(); ++i) {
    if (out[i].kind == PointOutcome::skipped) continue;
    ++v.tested_points;
    if (out[i].kind == PointOutcome::unknown) ++v.unknown_points;
    if (out[i].kind != PointOutcome::violated) continue;
    ++v.violations;
    if (best_i < 0) {
      best_i = static_cast<long>(i);
      continue;
    }
    const auto& b = out[best_i];
    bool better = smallest_rho_witness ? out[i].rho < b.rho : out[i].best < b.best;
    if (better) best_i = static_cast<long>(i);
  }
  if (v.violations > 0) {
    v.status = Status::violated;
    const auto& w = out[best_i];
    v.witness_point = g.center(pts[best_i]);
    v.witness_rho = w.rho;
    v.witness_deficit = R - w.best;
    if (w.C.size() > 0) v.witness_ball = Ball{w.C, R};
  } else if (v.unknown_points > 0 || v.subsampled) {
    v.status = Status::unknown;
  } else {
    v.status = Status::satisfied;
  }
}

// Cell-center offset plus the final pattern-search step.
double cover_tol(const Grid& g) { return g.diag() / 2 + g.h / 16; }

}  // namespace

// ---------------------------------------------------------------------------
// Ball classes

namespace {

ClassVerdict ball_class(const Grid& g, double eps, bool k1, const Budget& b) {
  require_eps(eps);
  require_nonempty(g);
  const double R = 1.0 / eps;
  ClassVerdict v;
  v.cls = k1 ? "K1" : "K2";
  v.tol = cover_tol(g);
  v.margin = g.h;
  // Every true point lies within tol of a solid center, so a shortfall beyond tol + margin is a
  // violation of the true body.
  KdTree solid(centers_of(g, CellSet::solid));
  const KdTree& obstacles = solid;
  std::vector<size_t> pts;
  if (k1) {
    pts = indices_of(g, CellSet::boundary);
  } else {
    for (size_t i = 0; i < g.size(); ++i)
      if (g.cells[i] == Cell::outside && solid.any_within(g.center(i), R)) pts.push_back(i);
  }
  pts = apply_budget(pts, b, v.subsampled);
  const auto dirs = cover_directions(g.dim, b.directions);
  const double rho = k1 ? R + g.diag() / 2 : R;
  CoverDriver drv{g, R, v.tol, v.margin, b};
  auto out = drv.run(
      pts,
      [&](size_t idx, const Vec& cache, int, long& evals) {
        Vec x = g.center(idx);
        auto r = cover_search(obstacles, x, rho, R, v.tol, g.h, dirs, cache.size() ? &cache : nullptr);
        evals += r.evals;
        PointOutcome o;
        o.best = r.best;
        o.C = r.C;
        o.rho = solid.nearest(x).dist;
        if (r.ok) o.kind = PointOutcome::ok;
        else if (r.best < R - v.tol - v.margin) o.kind = PointOutcome::violated;
        else o.kind = PointOutcome::unknown;
        return o;
      },
      v.candidates);
  summarize(v, g, pts, out, false, R);
  return v;
}

}  // namespace

ClassVerdict check_K1(const Grid& g, double eps, const Budget& b) { return ball_class(g, eps, true, b); }
ClassVerdict check_K2(const Grid& g, double eps, const Budget& b) { return ball_class(g, eps, false, b); }

// ---------------------------------------------------------------------------
// K3 via nearest-point uniqueness or via enclosing balls

namespace {

// Number of single-linkage clusters of the given points at link length `link`.
int count_clusters(const Points& pts, double link) {
  const long m = pts.cols();
  if (m == 0) return 0;
  KdTree tree(pts);
  std::vector<int> label(m, -1);
  int clusters = 0;
  std::vector<long> stack;
  for (long s0 = 0; s0 < m; ++s0) {
    if (label[s0] >= 0) continue;
    label[s0] = clusters;
    stack.push_back(s0);
    while (!stack.empty()) {
      long cur = stack.back();
      stack.pop_back();
      for (int nb : tree.within(pts.col(cur), link))
        if (label[nb] < 0) {
          label[nb] = clusters;
          stack.push_back(nb);
        }
    }
    ++clusters;
  }
  return clusters;
}

// Farthest distance from the contact point that a K5-body may show inside B(z, ro): the body lies
// outside the open support ball B(C, R) that contains B(z, rho) and touches it there.
double cap_spread(double R, double rho, double ro) {
  double d = R - rho;
  double a = (R * R - ro * ro + d * d) / (2 * d);
  if (!(a > d) || a >= R) return std::numeric_limits<double>::infinity();
  double s2 = R * R - a * a;
  return std::sqrt((R - a) * (R - a) + s2);
}

// Cell centers sit up to tau/2 from the true boundary, so the measured distance rho and the
// measured near-set radius rho + tau widen to rho - tau/2 and rho + 3 tau/2 in true geometry.
// The nearest center need not sit at the true contact point: any two true points of the lens are
// at most twice the spread apart, and each center adds tau/2.
double spread_limit(double R, double rho, double tau) {
  return 2 * cap_spread(R, std::max(rho - tau / 2, 0.0), rho + 1.5 * tau) + tau;
}

// With a unique nearest point T at distance rho_t, the ball B(z + (R - rho_t) v, R) with
// v = (z - T) / rho_t misses the interior of a K3 body. Returns the largest clearance
// min_q |q - C| - (R - tau/2) over directions v and the admissible range of rho_t.
double lens_clearance(const Points& Q, const Vec& z, const Vec& v0, double rho, double R, double tau) {
  const int n = static_cast<int>(z.size());
  const double dlo = std::max(R - rho - tau / 2, 0.0), dhi = R - rho + tau / 2;
  const double need = R - tau / 2;
  auto value = [&](const Vec& v) {
    double best = -std::numeric_limits<double>::infinity();
    for (double d : {dlo, 0.5 * (dlo + dhi), dhi}) {
      Vec C = z + d * v;
      double m = std::numeric_limits<double>::infinity();
      for (long i = 0; i < Q.cols() && m > best + need; ++i) m = std::min(m, (Q.col(i) - C).norm());
      best = std::max(best, m - need);
    }
    return best;
  };
  double best = value(v0);
  if (best >= 0) return best;
  std::vector<Vec> starts = {v0};
  std::vector<std::pair<double, Vec>> coarse;
  for (const auto& v : sphere_directions(n, n == 2 ? 72 : 240)) coarse.emplace_back(value(v), v);
  std::partial_sort(coarse.begin(), coarse.begin() + 3, coarse.end(),
                    [](const auto& a, const auto& b) { return a.first > b.first; });
  for (int k = 0; k < 3; ++k) starts.push_back(coarse[static_cast<size_t>(k)].second);
  for (Vec v : starts) {
    double cur = value(v);
    Eigen::MatrixXd T = orth_complement(v, n);
    for (double step = 0.1; step > 1e-3 && cur < 0;) {
      bool moved = false;
      for (long c = 0; c < T.cols() && !moved; ++c)
        for (double sgn : {1.0, -1.0}) {
          Vec w = (v + sgn * step * T.col(c)).normalized();
          double val = value(w);
          if (val > cur) {
            cur = val;
            v = w;
            T = orth_complement(v, n);
            moved = true;
            break;
          }
        }
      if (!moved) step /= 2;
    }
    best = std::max(best, cur);
    if (best >= 0) break;
  }
  return best;
}

}  // namespace

ClassVerdict check_K3(const Grid& g, double eps, K3Mode mode, const Budget& b) {
  require_eps(eps);
  require_nonempty(g);
  const double R = 1.0 / eps;
  const double tau = g.diag();
  ClassVerdict v;
  v.cls = mode == K3Mode::viaK5 ? "K3/viaK5" : "K3/viaK4";
  v.tol = cover_tol(g);
  v.margin = g.h;
  auto solid_idx = indices_of(g, CellSet::solid);
  KdTree solid(centers_at(g, solid_idx));
  std::vector<size_t> pts;
  for (size_t i = 0; i < g.size(); ++i) {
    if (g.cells[i] != Cell::outside) continue;
    double r = solid.nearest_dist(g.center(i), R - tau);
    if (r < R - tau) pts.push_back(i);
  }
  pts = apply_budget(pts, b, v.subsampled);
  v.tested_points = static_cast<long>(pts.size());

  CoverDriver drv{g, R, v.tol, v.margin, b};
  if (mode == K3Mode::viaK5) {
    auto out = drv.run(
        pts,
        [&](size_t idx, const Vec&, int, long& evals) {
          Vec z = g.center(idx);
          auto near = solid.nearest(z);
          Vec p = solid.points().col(near.index);
          auto hits = solid.within(z, near.dist + tau);
          Points Q(g.dim, static_cast<long>(hits.size()));
          for (size_t k = 0; k < hits.size(); ++k) Q.col(static_cast<long>(k)) = solid.points().col(hits[k]);
          Vec v0 = near.dist > 0 ? Vec((z - p) / near.dist) : Vec(Vec::Unit(g.dim, 0));
          double c = lens_clearance(Q, z, v0, near.dist, R, tau);
          ++evals;
          PointOutcome o;
          o.rho = near.dist;
          o.best = R + c;
          o.kind = c >= 0 ? PointOutcome::ok : c < -v.margin ? PointOutcome::violated : PointOutcome::unknown;
          return o;
        },
        v.candidates);
    v.tested_points = 0;
    // Witness: the closest point whose near-set splits into separate clusters; otherwise the closest violator.
    std::vector<size_t> viol;
    for (size_t i = 0; i < out.size(); ++i) {
      if (out[i].kind == PointOutcome::skipped) continue;
      ++v.tested_points;
      if (out[i].kind == PointOutcome::unknown) ++v.unknown_points;
      if (out[i].kind == PointOutcome::violated) viol.push_back(i);
    }
    v.violations = static_cast<long>(viol.size());
    if (viol.empty()) {
      v.status = v.subsampled || v.unknown_points > 0 ? Status::unknown : Status::satisfied;
      return v;
    }
    std::stable_sort(viol.begin(), viol.end(), [&](size_t a, size_t c) { return out[a].rho < out[c].rho; });
    size_t pick = viol.front();
    const size_t scan = std::min<size_t>(viol.size(), 20000);
    for (size_t j = 0; j < scan; ++j) {
      Vec z = g.center(pts[viol[j]]);
      auto hits = solid.within(z, out[viol[j]].rho + tau);
      Points near(g.dim, static_cast<long>(hits.size()));
      for (size_t k = 0; k < hits.size(); ++k) near.col(static_cast<long>(k)) = solid.points().col(hits[k]);
      // Digitization fragments a thin rim into pieces a few cells apart; only gaps wider than the
      // admissible cap spread count as separate contact regions.
      double link = std::min(spread_limit(R, out[viol[j]].rho, tau), out[viol[j]].rho);
      if (count_clusters(near, link) >= 2) {
        pick = viol[j];
        break;
      }
    }
    v.status = Status::violated;
    v.witness_point = g.center(pts[pick]);
    v.witness_rho = out[pick].rho;
    v.witness_ball = Ball{*v.witness_point, out[pick].rho};
    v.witness_deficit = R - out[pick].best;
    return v;
  }

  // viaK4: the disjoint ball B(y, rho - tau) must fit in an empty R-ball.
  const KdTree& obstacles = solid;
  const auto dirs = cover_directions(g.dim, b.directions);
  auto out = drv.run(
      pts,
      [&](size_t idx, const Vec& cache, int, long& evals) {
        Vec y = g.center(idx);
        double rho = solid.nearest(y).dist;
        double r = std::max(0.0, rho - tau);
        auto res = cover_search(obstacles, y, R - r, R, v.tol, g.h, dirs, cache.size() ? &cache : nullptr);
        evals += res.evals;
        PointOutcome o;
        o.rho = rho;
        o.best = res.best;
        o.C = res.C;
        if (res.ok) o.kind = PointOutcome::ok;
        else if (res.best < R - v.tol - v.margin) o.kind = PointOutcome::violated;
        else o.kind = PointOutcome::unknown;
        return o;
      },
      v.candidates);
  summarize(v, g, pts, out, true, R);
  return v;
}

// ---------------------------------------------------------------------------
// Cylinder classes

std::vector<Eigen::MatrixXd> cylinder_orientations(int n, int k, int samples) {
  if (k < 0 || k >= n) throw std::domain_error("cylinder class: need 0 <= k < n");
  std::vector<Eigen::MatrixXd> out;
  if (k == 0) {
    out.push_back(Eigen::MatrixXd(n, 0));
    return out;
  }
  // Coordinate k-planes.
  std::vector<int> sel(n, 0);
  std::fill(sel.end() - k, sel.end(), 1);
  do {
    Eigen::MatrixXd V = Eigen::MatrixXd::Zero(n, k);
    int c = 0;
    for (int i = 0; i < n; ++i)
      if (sel[i]) V(i, c++) = 1.0;
    out.push_back(V);
  } while (std::next_permutation(sel.begin(), sel.end()));
  // Sampled orientations: lines by direction (k = 1), hyperplanes by normal (k = n - 1).
  auto dirs = sphere_directions(n, 2 * samples);
  int added = 0;
  for (const auto& d : dirs) {
    if (added >= samples) break;
    // One representative per antipodal pair.
    bool upper = false;
    for (int i = n - 1; i >= 0; --i)
      if (d[i] != 0) {
        upper = d[i] > 0;
        break;
      }
    if (!upper) continue;
    Eigen::MatrixXd V;
    if (k == 1) V = d;
    else if (k == n - 1) V = orth_complement(d, n);
    else {
      // n >= 4 mixed case: span of d and its next sample, orthonormalized.
      Eigen::MatrixXd M(n, k);
      for (int j = 0; j < k; ++j) M.col(j) = dirs[(added * k + j) % dirs.size()];
      M.col(0) = d;
      Eigen::HouseholderQR<Eigen::MatrixXd> qr(M);
      V = (qr.householderQ() * Eigen::MatrixXd::Identity(n, k));
    }
    out.push_back(V);
    ++added;
  }
  return out;
}

namespace {

// Obstacles projected onto the orthogonal complement of an axis k-plane.
struct ProjectedSet {
  Eigen::MatrixXd W;  // n x (n-k) basis of the complement
  std::unique_ptr<KdTree> coarse;  // deduplicated on an h/4 lattice
  std::unique_ptr<KdTree> exact;
};

Points project_dedup(const Points& P, const Eigen::MatrixXd& W, double q) {
  Points Q = W.transpose() * P;
  if (q <= 0) return Q;
  std::map<std::vector<long>, int> seen;
  std::vector<int> keep;
  for (Eigen::Index i = 0; i < Q.cols(); ++i) {
    std::vector<long> key(Q.rows());
    for (Eigen::Index d = 0; d < Q.rows(); ++d) key[d] = std::lround(Q(d, i) / q);
    if (seen.emplace(key, static_cast<int>(i)).second) keep.push_back(static_cast<int>(i));
  }
  Points out(Q.rows(), static_cast<Eigen::Index>(keep.size()));
  for (size_t j = 0; j < keep.size(); ++j) out.col(static_cast<Eigen::Index>(j)) = Q.col(keep[j]);
  return out;
}

class ProjectionCache {
 public:
  ProjectionCache(const Points& obstacles, std::vector<Eigen::MatrixXd> orients, int n, double h)
      : obs_(obstacles), orients_(std::move(orients)), n_(n), h_(h), sets_(orients_.size()) {}

  size_t size() const { return orients_.size(); }
  const Eigen::MatrixXd& axes(int i) const { return orients_[i]; }

  ProjectedSet& get(int i, bool exact) {
    std::lock_guard<std::mutex> lock(mu_);
    auto& s = sets_[i];
    if (s.W.size() == 0) s.W = orth_complement(orients_[i], n_);
    if (!s.coarse) s.coarse = std::make_unique<KdTree>(project_dedup(obs_, s.W, h_ / 4));
    if (exact && !s.exact) s.exact = std::make_unique<KdTree>(project_dedup(obs_, s.W, 0.0));
    return s;
  }

 private:
  const Points& obs_;
  std::vector<Eigen::MatrixXd> orients_;
  int n_;
  double h_;
  std::vector<ProjectedSet> sets_;
  std::mutex mu_;
};

}  // namespace

ClassVerdict check_cylinder_class(const Grid& g, double eps, BallClass i, const CylinderClassParams& p,
                                  const Budget& b) {
  if (p.k < 0 || p.k >= g.dim) throw std::domain_error("cylinder class: need 0 <= k < n");
  if (p.k == 0) return i == BallClass::K1 ? check_K1(g, eps, b) : check_K2(g, eps, b);
  require_eps(eps);
  require_nonempty(g);
  const double R = 1.0 / eps;
  ClassVerdict v;
  v.cls = std::string(i == BallClass::K1 ? "K1" : "K2") + "^k=" + std::to_string(p.k);
  v.tol = cover_tol(g);
  v.margin = g.h;
  Points obstacles = centers_of(g, CellSet::inside);
  KdTree solid(centers_of(g, CellSet::solid));
  std::vector<size_t> pts;
  if (i == BallClass::K1) {
    pts = indices_of(g, CellSet::boundary);
  } else {
    for (size_t c = 0; c < g.size(); ++c)
      if (g.cells[c] == Cell::outside && solid.any_within(g.center(c), R)) pts.push_back(c);
  }
  pts = apply_budget(pts, b, v.subsampled);
  ProjectionCache cache(obstacles, cylinder_orientations(g.dim, p.k, p.orientation_samples), g.dim, g.h);
  v.orientations = static_cast<long>(cache.size());
  const int m = g.dim - p.k;
  const auto dirs = cover_directions(m, b.directions);
  const double rho = i == BallClass::K1 ? R + g.diag() / 2 : R;
  const int nor = static_cast<int>(cache.size());
  CoverDriver drv{g, R, v.tol, v.margin, b};
  auto out = drv.run(
      pts,
      [&](size_t idx, const Vec& cached_C, int cached_or, long& evals) {
        Vec x = g.center(idx);
        PointOutcome o;
        o.rho = solid.nearest(x).dist;
        o.best = -1.0;
        int start = cached_or >= 0 ? cached_or : 0;
        for (int t = 0; t < nor; ++t) {
          int oi = (start + t) % nor;
          auto& set = cache.get(oi, false);
          Vec xp = set.W.transpose() * x;
          const Vec* hint = (t == 0 && cached_or >= 0) ? &cached_C : nullptr;
          auto r = cover_search(*set.coarse, xp, rho, R, v.tol, g.h, dirs, hint);
          evals += r.evals;
          if (r.best > o.best) {
            o.best = r.best;
            o.C = r.C;
            o.orientation = oi;
          }
          if (r.ok) {
            // Refinement: re-verify the certificate against the undeduplicated projection.
            auto& ex = cache.get(oi, true);
            ++evals;
            if (ex.exact->nearest_dist(r.C, R) >= R - v.tol) {
              o.kind = PointOutcome::ok;
              o.C = r.C;
              o.orientation = oi;
              return o;
            }
          }
        }
        o.kind = o.best < R - v.tol - v.margin ? PointOutcome::violated : PointOutcome::unknown;
        return o;
      },
      v.candidates);
  summarize(v, g, pts, out, false, R);
  if (v.status == Status::violated) {
    // Report the worst point's best cylinder.
    long wi = -1;
    for (size_t j = 0; j < out.size(); ++j)
      if (out[j].kind == PointOutcome::violated && (wi < 0 || out[j].best < out[wi].best)) wi = static_cast<long>(j);
    const auto& w = out[wi];
    auto& set = cache.get(w.orientation, false);
    v.witness_ball = Ball{set.W * w.C, R};
    v.witness_axes = cache.axes(w.orientation);
    v.witness_deficit = R - w.best;
  }
  return v;
}

// ---------------------------------------------------------------------------
// Visibility

ClassVerdict check_visibility(const Grid& g, double eps, int plane_samples, const Budget& b) {
  if (g.dim != 2 && g.dim != 3) throw std::domain_error("visibility: supported for n in {2, 3}");
  ClassVerdict points = check_K2(g, eps, b);
  if (g.dim == 2) {
    points.cls = "V";
    return points;
  }
  const double R = 1.0 / eps;
  ClassVerdict v;
  v.cls = "V";
  v.tol = cover_tol(g);
  v.margin = g.h;
  Points inside = centers_of(g, CellSet::inside);
  Points solid = centers_of(g, CellSet::solid);
  Vec centroid = solid.rowwise().mean();
  auto orients = cylinder_orientations(3, 1, plane_samples);
  v.orientations = static_cast<long>(orients.size());
  const auto dirs = cover_directions(2, b.directions);
  const double clear = g.diag() / 2;
  struct LineWitness {
    double best = std::numeric_limits<double>::infinity();
    Vec q;
    int orient = -1;
    Vec C;
  } worst;
  for (size_t oi = 0; oi < orients.size(); ++oi) {
    Eigen::MatrixXd W = orth_complement(orients[oi], 3);
    Points shadow = project_dedup(solid, W, g.h / 4);
    KdTree shadow_tree(shadow);
    KdTree obs(project_dedup(inside, W, g.h / 4));
    Vec lo = shadow.rowwise().minCoeff(), hi = shadow.rowwise().maxCoeff();
    int nx = static_cast<int>(std::ceil((hi[0] - lo[0]) / g.h)) + 1;
    int ny = static_cast<int>(std::ceil((hi[1] - lo[1]) / g.h)) + 1;
    std::vector<Vec> qs;
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        Vec q = vec({lo[0] + i * g.h, lo[1] + j * g.h});
        double d = shadow_tree.nearest_dist(q, R);
        if (d > clear && d < R) qs.push_back(q);
      }
    std::vector<PointOutcome> out(qs.size());
    std::vector<long> evals((qs.size() + kChunk - 1) / kChunk, 0);
    for_chunks(qs.size(), kChunk, b.workers, [&](size_t c, size_t lo_i, size_t hi_i) {
      Vec cacheC;
      for (size_t t = lo_i; t < hi_i; ++t) {
        auto r = cover_search(obs, qs[t], R, R, v.tol, g.h, dirs, cacheC.size() ? &cacheC : nullptr);
        evals[c] += r.evals;
        out[t].best = r.best;
        out[t].C = r.C;
        if (r.ok) {
          out[t].kind = PointOutcome::ok;
          cacheC = r.C;
        } else {
          out[t].kind = r.best < R - v.tol - v.margin ? PointOutcome::violated : PointOutcome::unknown;
        }
      }
    });
    for (long e : evals) v.candidates += e;
    v.tested_points += static_cast<long>(qs.size());
    for (size_t t = 0; t < out.size(); ++t) {
      if (out[t].kind == PointOutcome::unknown) ++v.unknown_points;
      if (out[t].kind != PointOutcome::violated) continue;
      ++v.violations;
      if (out[t].best < worst.best) worst = {out[t].best, qs[t], static_cast<int>(oi), out[t].C};
    }
    if (b.stop_at_first_violation && v.violations > 0) break;
  }
  if (v.violations > 0) {
    v.status = Status::violated;
    Eigen::MatrixXd W = orth_complement(orients[worst.orient], 3);
    Vec dir = orients[worst.orient].col(0);
    Vec x = W * worst.q;
    x += dir * dir.dot(centroid - x);
    v.witness_point = x;
    Vec C = W * worst.C;
    C += dir * dir.dot(centroid - C);
    v.witness_ball = Ball{C, R};
    v.witness_axes = orients[worst.orient];
    v.witness_deficit = R - worst.best;
  } else {
    v.status = v.unknown_points > 0 ? Status::unknown : Status::satisfied;
  }
  // Points (zero-dimensional planes) are the K2 condition.
  Status lines = v.status;
  v.status = combine(lines, points.status);
  if (lines != Status::violated && points.status == Status::violated) {
    v.witness_point = points.witness_point;
    v.witness_ball = points.witness_ball;
    v.witness_axes = Eigen::MatrixXd(3, 0);
  }
  v.tested_points += points.tested_points;
  v.candidates += points.candidates;
  v.violations += points.violations;
  return v;
}

}  // namespace epsc
