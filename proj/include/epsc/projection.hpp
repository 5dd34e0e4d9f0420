#pragma once

#include "epsc/grid.hpp"

namespace epsc {

// Circular projection onto the hyperplane through C orthogonal to omega: each point moves along
// the circle centered at C in the plane spanned by omega and the point, to the nearer screen point.
struct CircularProjection {
  Vec C;
  Vec omega;  // unit
};

class AxisError : public std::domain_error {
 public:
  AxisError(const std::string& what, double axis_distance) : std::domain_error(what), axis_distance(axis_distance) {}
  double axis_distance;
};

CircularProjection make_projection(const Vec& C, const Vec& omega);
double axis_distance(const CircularProjection& f, const Vec& x);
// Rejects points within 1e-9 |x - C| of the axis.
Vec project_point(const CircularProjection& f, const Vec& x);
// The coordinate formula for C = O, omega = e_n (n = 3): (alpha x, alpha y, 0).
Vec project_coordinate_form(const Vec& x);

// Orthonormal basis of the screen directions (n x (n-1)).
Eigen::MatrixXd screen_basis(const CircularProjection& f);

struct ScreenImage {
  Points points;  // images of solid cell centers, ambient coordinates
  Grid raster;    // (n-1)-dimensional raster in screen coordinates relative to C
};
// Image of a body raster. A screen cell is inside when the projection trajectory through its
// center meets a solid cell. frame, if given, fixes the screen raster bounds.
ScreenImage project_body(const CircularProjection& f, const Grid& g, const Grid* frame = nullptr);
// Screen raster bounds covering both images, for comparisons.
Grid screen_frame(const CircularProjection& f, const std::vector<const Grid*>& bodies, double h);

// Samples whose trajectory tangent is orthogonal to the surface normal (within tol), projected.
Points apparent_contour(const CircularProjection& f, const Points& samples, const Points& normals, double tol);

struct GammaPsiCurve {
  double psi = 0.0;
  std::vector<double> t;
  Points samples;  // 2 x N
  std::vector<double> curvature;
  double min_curvature = 0.0;
  double argmin_t = 0.0;
};
// Image of the great circle of the unit sphere centered at R_x(psi)(0, 2, 0) through the point
// nearest the axis. t is sampled uniformly on [0, 2 pi).
Vec gamma_psi_point(double psi, double t);
double gamma_psi_curvature(double psi, double t);  // exact derivatives
double gamma_psi_curvature_fd(double psi, double t, double step = 1e-3);  // Richardson central differences
GammaPsiCurve gamma_psi_curve(double psi, int samples);
// The same curve computed by projecting the rotated great circle with project_point.
Vec gamma_psi_point_projected(double psi, double t);

struct ProfileCurve {
  Vec axis_dir;  // unit direction of the axis line in the screen, from C through f(x)
  std::vector<double> axial;   // coordinate along the axis from C
  std::vector<double> radial;  // distance from the axis
  double symmetry_deviation = 0.0;
  bool closed = true;
};
// Boundary profile of the image of a sphere, sampled at `samples` points of the diameter along Cx.
ProfileCurve sphere_image_profile(const CircularProjection& f, const Ball& sphere, int samples = 401);

struct Lemma3Report {
  double lambda = 0.0;
  double psi = 0.0;
  double min_profile_curvature = 0.0;
  double curvature_bound = 0.0;  // 1/(2r)
  double profile_residual = 0.0;  // closed form vs project_point on the great circle
  bool enclosing_ball_ok = false;
  int enclosing_checked = 0;
};
// Requires lambda = r/|Cx| <= 1/2 and psi <= pi/6 (boundary included). n = 3.
Lemma3Report lemma3_check(const CircularProjection& f, const Ball& sphere, int boundary_points = 100);

}  // namespace epsc
