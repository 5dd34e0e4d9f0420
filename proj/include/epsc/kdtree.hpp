#pragma once

#include "epsc/geom.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace epsc {

// Static KD-tree over the columns of a point matrix.
class KdTree {
 public:
  KdTree() = default;
  explicit KdTree(const Points& pts);

  bool empty() const { return n_ == 0; }
  int size() const { return n_; }
  int dim() const { return dim_; }
  const Points& points() const { return pts_; }

  struct Hit {
    int index = -1;
    double dist = 0.0;
  };

  // Nearest point; equal distances resolve to the lexicographically smaller point.
  Hit nearest(const Vec& x) const;
  // Nearest distance, stopping early once it is known to be >= cutoff.
  double nearest_dist(const Vec& x, double cutoff) const;
  // Indices within closed radius r, ascending.
  std::vector<int> within(const Vec& x, double r) const;
  bool any_within(const Vec& x, double r) const;
  // Some point q with |q - x| <= r and |q - p| > D.
  bool any_within_beyond(const Vec& x, double r, const Vec& p, double D) const;

 private:
  struct Node {
    int lo, hi;      // range in perm_
    int split_dim;   // -1 for leaf
    double split;
    int left, right;
  };
  int build(int lo, int hi, int depth);
  void nearest_rec(int node, const double* x, int& best, double& best_d2) const;
  void within_rec(int node, const double* x, double r2, std::vector<int>& out) const;
  bool any_rec(int node, const double* x, double r2) const;
  bool beyond_rec(int node, const double* x, double r2, const double* p, double D2) const;
  double d2(int idx, const double* x) const;

  Points pts_;
  std::vector<double> flat_;
  std::vector<int> perm_;
  std::vector<Node> nodes_;
  std::vector<double> box_lo_, box_hi_;
  int n_ = 0;
  int dim_ = 0;
};

}  // namespace epsc
