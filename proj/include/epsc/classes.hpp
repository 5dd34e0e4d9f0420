#pragma once

#include "epsc/grid.hpp"

#include <optional>
#include <string>

namespace epsc {

enum class Status { satisfied, violated, unknown };
const char* to_string(Status s);
// violated dominates unknown dominates satisfied.
Status combine(Status a, Status b);

struct Budget {
  int directions = 0;           // center directions per radius; 0 picks 32 (2-D) / 96 (3-D)
  long max_test_points = 0;     // 0 = test every point; otherwise stride-subsample and never claim satisfied
  int orientation_samples = 256;
  int workers = 1;
  bool stop_at_first_violation = false;
};

struct ClassVerdict {
  std::string cls;
  Status status = Status::satisfied;
  std::optional<Vec> witness_point;
  std::optional<Ball> witness_ball;
  Eigen::MatrixXd witness_axes;  // n x k axis directions when the witness is a cylinder
  double witness_rho = 0.0;      // dist(witness, K) where meaningful
  double witness_deficit = 0.0;  // how far the best candidate fell short
  long tested_points = 0;
  long violations = 0;
  long unknown_points = 0;
  long candidates = 0;
  long orientations = 0;
  double tol = 0.0;     // emptiness tolerance
  double margin = 0.0;  // extra shortfall required to confirm a violation
  bool subsampled = false;
};

ClassVerdict check_K1(const Grid& g, double eps, const Budget& b = {});
ClassVerdict check_K2(const Grid& g, double eps, const Budget& b = {});

enum class K3Mode { viaK5, viaK4 };
ClassVerdict check_K3(const Grid& g, double eps, K3Mode mode, const Budget& b = {});

enum class BallClass { K1, K2 };
struct CylinderClassParams {
  int k = 0;
  int orientation_samples = 256;
};
ClassVerdict check_cylinder_class(const Grid& g, double eps, BallClass i, const CylinderClassParams& p,
                                  const Budget& b = {});

ClassVerdict check_visibility(const Grid& g, double eps, int plane_samples = 64, const Budget& b = {});

// Orthonormal bases (n x k) of the k-planes tried by the cylinder search: coordinate planes first.
std::vector<Eigen::MatrixXd> cylinder_orientations(int n, int k, int samples);

// Largest radius-R ball cover check used by the class and hull code:
// search C in B(x, rho) maximizing dist(C, obstacles); ok when >= R - tol.
class KdTree;
struct CoverResult {
  bool ok = false;
  double best = 0.0;
  Vec C;
  long evals = 0;
};
CoverResult cover_search(const KdTree& obstacles, const Vec& x, double rho, double R, double tol, double h,
                         const std::vector<Vec>& dirs, const Vec* hint = nullptr);
std::vector<Vec> cover_directions(int n, int requested);

}  // namespace epsc
