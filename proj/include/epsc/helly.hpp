#pragma once

#include "epsc/classes.hpp"

#include <random>

namespace epsc {

// eps' + eps (m - n - 1) d^2 / 2.
double helly_bound(int m, int n, double d, double eps, double eps_prime);

struct RadonPartition {
  std::vector<int> A1, A2;  // indices into the input columns
  Vec common;
  Vec coeff1, coeff2;       // convex weights over A1 and A2 reproducing common
  double residual = 0.0;    // max reconstruction error of common from either side
};
// Uses the first n + 2 columns.
RadonPartition radon_partition(const Points& P);

struct HellyReport {
  bool hypothesis_ok = false;
  double eps_prime = 0.0;           // value the hypothesis was checked against
  double eps_prime_measured = 0.0;  // worst (n+1)-subfamily min-max distance
  Vec witness;
  double max_dist = 0.0;
  double bound = 0.0;
  double margin = 0.0;
  double diameter = 0.0;  // largest measured body diameter
  int m = 0;
  int n = 0;
  double slack = 0.0;  // h sqrt(n)
};

struct HellyOptions {
  bool check_class = true;  // require check_K3 (nearest-point route) not violated for every body
  int workers = 1;
};
// All grids must share one frame. Distances are measured between cell centers.
HellyReport verify_helly(const std::vector<Grid>& family, double eps, double eps_prime, const HellyOptions& opt = {});

// Ball of radius r at center minus a radius-1/eps ball whose boundary cuts a cap of the given depth
// in direction u.
BodyExpr ball_minus_cap(const Vec& center, double r, double eps, double depth, const Vec& u);

}  // namespace epsc
