#pragma once

#include "epsc/grid.hpp"

#include <variant>

namespace epsc {

// Affine chart of a point set: x = origin + basis * coords, basis orthonormal (n x m).
struct AffineChart {
  Vec origin;
  Eigen::MatrixXd basis;
  int dim() const { return static_cast<int>(basis.cols()); }
  Points to_chart(const Points& X) const;
  Points from_chart(const Points& Y) const;
};
AffineChart affine_chart(const Points& W, double tol = 1e-10);

// Exact maximum of dist(C, W) over the closed ball C in B(y, rho), for a finite set W
// in general position up to dimension 3. The maximizer is found among the farthest points
// of the equidistant flats of subsets of W.
class FarthestSearch {
 public:
  explicit FarthestSearch(const Points& W);
  struct Result {
    double value = 0.0;
    Vec C;
  };
  Result max_dist(const Vec& y, double rho) const;
  int dim() const { return dim_; }

 private:
  struct Flat {
    Vec center;             // circumcenter of the subset
    Eigen::MatrixXd span;   // orthonormal directions of the subset's affine hull
    Eigen::MatrixXd perp;   // orthonormal directions of the equidistant flat
  };
  double nearest(const Vec& C) const;
  Points W_;
  int dim_ = 0;
  std::vector<Flat> flats_;
};

// Whether y belongs to conv_eps W: no closed radius-1/eps ball through y misses W.
bool in_eps_hull(const FarthestSearch& W, double eps, const Vec& y);

// Cell classification of conv_eps W (W given in its own affine chart, full-dimensional).
// inside: the whole cell lies in the hull; outside: the whole cell is covered by one ball
// missing W; boundary otherwise.
Grid eps_hull_oracle(const Points& W, double eps, double h);
Grid eps_hull_oracle_on(const Points& W, double eps, const Grid& frame, int workers = 1);
// conv_eps of a body raster: cells reachable by a radius-1/eps ball missing the inside cells.
// The frame is padded so that such balls fit.
Grid eps_hull_oracle(const Grid& body, double eps);

struct Arc {
  Vec center;
  double radius = 0.0;
  double start_angle = 0.0;  // angle of the first vertex seen from center
  double end_angle = 0.0;
  bool clockwise = true;     // traversal direction around center
};
struct HullComponent {
  Points vertices;  // counterclockwise, interior on the left
  std::vector<Arc> arcs;  // arcs[i] joins vertices i and i+1
};
struct EpsHull2D {
  double eps = 0.0;
  std::vector<HullComponent> components;
  Points isolated_points;
};

// Gift wrapping with radius-1/eps arcs. Requires d_W < 2/eps.
EpsHull2D eps_hull_wrap2d(const Points& W, double eps);
// Point membership in the wrapped region: inside the vertex polygon and outside every arc disk.
bool wrap_contains(const EpsHull2D& H, const Vec& y);
Grid rasterize_wrap(const EpsHull2D& H, const Grid& frame);

struct ThinTriangle {
  enum Kind { equilateral, long_base, short_base } kind = equilateral;
  double c = 1.0;
};
// Closed-form eps0 from the angle condition at the base vertices.
double thin_triangle_threshold(const ThinTriangle& t);
// Largest eps keeping the hull connected: the base-angle value capped by the apex condition
// (eps <= 1/c^2 for long_base, eps <= c for short_base).
double thin_triangle_limit(const ThinTriangle& t);
// Vertices A, B, C with |AB| the base, as columns.
Points thin_triangle_vertices(const ThinTriangle& t);

struct ThinSimplexData {
  int n = 2;
  double h_n = 0.0;
  double eps_max = 0.0;
  double recurrence_residual = 0.0;  // |h_n^2 + ((n-1)/n)^2 h_{n-1}^2 - 1|, 0 for n = 2
};
ThinSimplexData thin_simplex(int n);

// Union of the hull rasters of every full-dimensional subset of W (|W| <= cap).
Grid conv_eps_via_subsets(const Points& W, double eps, const Grid& frame, int cap = 8);

int solid_components(const Grid& g);

}  // namespace epsc
