#pragma once

#include "epsc/geom.hpp"

#include <map>
#include <string>
#include <variant>
#include <vector>

namespace epsc {

// Every primitive is a level set: value(x) <= 0 is the closed set, < 0 its interior.
struct BallPrim {
  Vec center;
  double radius = 1.0;
};
struct BoxPrim {
  Vec lo, hi;
};
// {x : normal . x <= offset}
struct HalfspacePrim {
  Vec normal;
  double offset = 0.0;
};
// Points within radius of the affine k-plane base + span(axes).
struct CylinderPrim {
  Vec base;
  Eigen::MatrixXd axes;  // n x k, orthonormal columns
  double radius = 1.0;
};
struct SimplexPrim {
  Eigen::MatrixXd vertices;  // n x (n+1)
};
// sum_i |x_i - c_i|^p / a_i^p <= 1
struct LpBallPrim {
  Vec center;
  Vec semiaxes;
  double p = 2.0;
};
// {x : side * (x[axis] - amp * cos(freq * x[arg])) >= 0}
struct CosGraphPrim {
  int dim = 2;
  int axis = 1;
  int arg = 0;
  double amp = 0.1;
  double freq = 1.0;
  double side = 1.0;
};

using Primitive = std::variant<BallPrim, BoxPrim, HalfspacePrim, CylinderPrim, SimplexPrim, LpBallPrim, CosGraphPrim>;

int prim_dim(const Primitive& p);
double prim_value(const Primitive& p, const Vec& x);
void validate(const Primitive& p);

struct BodyExpr {
  enum class Op { leaf, unite, intersect, subtract };
  Op op = Op::leaf;
  Primitive prim;
  std::vector<BodyExpr> kids;

  int dim() const;
};

BodyExpr leaf(Primitive p);
BodyExpr unite(std::vector<BodyExpr> kids);
BodyExpr intersect(std::vector<BodyExpr> kids);
// a minus the interior of b.
BodyExpr subtract(BodyExpr a, BodyExpr b);

BodyExpr ball(const Vec& c, double r);
BodyExpr box(const Vec& lo, const Vec& hi);
BodyExpr simplex(const Eigen::MatrixXd& vertices);

void validate(const BodyExpr& b);
bool contains(const BodyExpr& b, const Vec& x);
bool contains_interior(const BodyExpr& b, const Vec& x);

struct BBox {
  Vec lo, hi;
  bool bounded() const;
};
BBox bounding_box(const BodyExpr& b);

using Params = std::map<std::string, double>;

// Names: ball, ring, quadrangle, eq3, eq3_prism, c_body, two_component, two_balls,
// strips, astroid, cube_minus_ball, ball_minus_cap, example5a, example5b.
BodyExpr gallery(const std::string& name, const Params& params = {});
std::vector<std::string> gallery_names();

}  // namespace epsc
