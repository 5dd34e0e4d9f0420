#pragma once

#include "epsc/classes.hpp"
#include "epsc/projection.hpp"

#include <cstdint>

namespace epsc {

enum class DistanceKind { plain, translative, rotational, homothetic, homothety_rotational };
const char* to_string(DistanceKind k);

struct DistanceConfig {
  Vec C;                     // rotation / homothety center
  double lambda_lo = 0.5;    // homothety bracket
  double lambda_hi = 2.0;
  int coarse = 7;            // coarse samples per parameter
  int starts = 3;            // pattern searches launched from the best coarse samples
  double step_tol = 1e-9;    // final pattern step, relative to the body scale
  uint64_t seed = 7;
};

struct DistanceReport {
  DistanceKind kind = DistanceKind::plain;
  double value = 0.0;
  Vec translation;       // applied after rotation / scaling
  Vec rotation;          // angle (n = 2) or rotation vector (n = 3)
  double lambda = 1.0;
  Vec center;            // C of the motion; the centroid of K for translative / homothetic kinds
  int iterations = 0;
  bool converged = true;
};

// Applies the optimizer of a report to K: C + lambda Q (K - C) + p with C = r.center.
Points apply_motion(const Points& K, const DistanceReport& r);
Eigen::MatrixXd rotation_matrix(const Vec& rot, int n);

DistanceReport special_distance(const Points& K, const Points& L, DistanceKind kind, const DistanceConfig& cfg = {});

struct SupportBallReport {
  Vec omega;
  double R = 0.0;  // infinity when no finite support ball exists under the cap
  Vec center;
  bool finite = false;
};
// Smallest ball containing K and contained in the support half-space {x . omega <= h_K(omega)}.
// Points may poke out of the ball by at most tol.
SupportBallReport smallest_support_ball(const Points& K, const Vec& omega, double tol, double cap = 1e6);

struct RelativeSupport {
  Vec C;
  double eps0 = 0.0;
  double r = 0.0;  // r_K(C)
  double R = 0.0;  // R_K(C)
  Points support_set;
  Vec inner_ball_center;
  double penetration = 0.0;  // how far K enters B(C, 1/eps0)
};
RelativeSupport relative_support(const Points& K, const Vec& C, double eps0, double tol);

enum class StabilityKind { lemma4, lemma5, thm7a, thm7b };
struct StabilityParams {
  double eps = 0.0;   // measured projection deviation
  double R = 0.0;     // R_M(omega), R_K(omega0) or R_M(C), R_K(C)
  double eps0 = 0.0;  // lemma5 / thm7b
  double r = 0.0;     // r_M(C) for lemma5 / thm7b
};
double stability_alpha_sq(const StabilityParams& p);
double stability_eps_tilde(const StabilityParams& p);
double stability_bound(StabilityKind k, const StabilityParams& p);

// A punctured plane family: Def11 samples normals from the whole sphere; Def13 restricts them to
// span{CA, omega0-perp cap CA-perp}.
enum class PlaneFamilyKind { Def11, Def13 };
struct PlaneFamily {
  PlaneFamilyKind kind = PlaneFamilyKind::Def13;
  std::vector<PuncturedPlane> planes;
  Vec omega0;
  Vec A;
  bool degenerate = false;  // CA parallel to omega0
  double max_residual = 0.0;  // orthogonality residual of emitted normals
};

// Def13 family through a given outer support ball center C: `count` normals sampled evenly in the
// admissible circle of directions. Planes not meeting both bodies are dropped.
PlaneFamily def13_family(const Points& K, const Points& L, const Vec& omega0, const Vec& A, const Vec& C, double eps0,
                         int count, double tol);
// Def11 family: normals from a sphere sample; centers on outer support balls of K within 2/eps.
PlaneFamily def11_family(const Points& K, const Points& L, double eps, int count, double tol);

struct Theorem6Result {
  bool identical = false;
  std::optional<PuncturedPlane> witness_plane;
  Vec interior_point;   // y in int L \ K (or the reverse)
  double image_gap = 0.0;  // distance from f(y) to the image of the other body
  bool swapped = false;    // roles of K and L exchanged
};
Theorem6Result theorem6_distinguish(const Grid& K, const Grid& L, double eps, const Budget& b = {});

enum class Theorem7Mode { translative, rotational };
struct PlaneMeasurement {
  PuncturedPlane plane;
  double deviation = 0.0;  // per-plane special distance of the images (snapped to an h/8 lattice)
  double plain = 0.0;      // plain Hausdorff distance of the images
};
struct Theorem7Report {
  Theorem7Mode mode = Theorem7Mode::translative;
  Vec omega0;
  Vec A;
  Vec C;                   // outer support ball center from the witness construction
  double eps0 = 0.0;
  double R_support = 0.0;  // R_K(omega0) or R_K(C)
  double r_support = 0.0;  // r_K(C) (rotational)
  std::vector<PlaneMeasurement> planes;
  double eps = 0.0;        // max per-plane deviation
  double global_plain = 0.0;  // delta(K, L)
  double global = 0.0;     // delta_t or delta_rC
  double bound = 0.0;
  double slack = 0.0;      // discretization allowance, <= 3h
  bool projection_dominates = false;  // delta(K, L) <= max plane plain distance + slack
  bool pass = false;
};
struct Theorem7Options {
  int planes = 4;              // family planes besides the proof plane
  bool check_class = true;
  int plane_coarse = 11;       // coarse samples per parameter for the per-plane search
  DistanceConfig distance = [] {
    DistanceConfig c;
    c.step_tol = 1e-6;
    return c;
  }();
};
Theorem7Report theorem7_experiment(const Grid& K, const Grid& L, const Vec& omega0, double eps0, Theorem7Mode mode,
                                   const Theorem7Options& opt = {});

struct Prop3Report {
  bool support_dominated = false;  // h_L <= h_K + tol on the sampled directions
  double support_excess = 0.0;     // max h_L - h_K
  double d_K = 0.0;
  double eps_prime = 0.0;          // eps d_K^2 / 2
  double max_dist = 0.0;           // max over L of dist(., K)
  double slack = 0.0;
  bool conclusion_holds = false;   // max_dist <= eps_prime + slack
};
struct Prop3Options {
  int directions = 0;     // 0 picks 720 (2-D) / 2000 (3-D)
  bool require_class = true;  // enforce the class and diameter hypotheses
  double slack_cells = 2.0;
};
Prop3Report prop3_check(const Grid& K, const Grid& L, double eps, const Prop3Options& opt = {});
// Raster of the convex hull of the solid cells, as the intersection of sampled support half-spaces.
Grid convex_hull_raster(const Grid& K, int directions = 0);

Points solid_points(const Grid& g);

}  // namespace epsc
