#include "epsc/bodies.hpp"

#include <cmath>
#include <limits>
#include <set>

namespace epsc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct DimVisitor {
  int operator()(const BallPrim& p) const { return static_cast<int>(p.center.size()); }
  int operator()(const BoxPrim& p) const { return static_cast<int>(p.lo.size()); }
  int operator()(const HalfspacePrim& p) const { return static_cast<int>(p.normal.size()); }
  int operator()(const CylinderPrim& p) const { return static_cast<int>(p.base.size()); }
  int operator()(const SimplexPrim& p) const { return static_cast<int>(p.vertices.rows()); }
  int operator()(const LpBallPrim& p) const { return static_cast<int>(p.center.size()); }
  int operator()(const CosGraphPrim& p) const { return p.dim; }
};

struct ValueVisitor {
  const Vec& x;
  double operator()(const BallPrim& p) const { return (x - p.center).norm() - p.radius; }
  double operator()(const BoxPrim& p) const {
    double v = -kInf;
    for (Eigen::Index i = 0; i < x.size(); ++i) v = std::max(v, std::max(p.lo[i] - x[i], x[i] - p.hi[i]));
    return v;
  }
  double operator()(const HalfspacePrim& p) const { return p.normal.dot(x) - p.offset; }
  double operator()(const CylinderPrim& p) const {
    Vec v = x - p.base;
    if (p.axes.cols() > 0) v -= p.axes * (p.axes.transpose() * v);
    return v.norm() - p.radius;
  }
  double operator()(const SimplexPrim& p) const {
    const Eigen::Index n = p.vertices.rows();
    Eigen::MatrixXd A(n + 1, n + 1);
    A.topRows(n) = p.vertices;
    A.row(n).setOnes();
    Vec b(n + 1);
    b.head(n) = x;
    b[n] = 1.0;
    Vec lam = A.partialPivLu().solve(b);
    return -lam.minCoeff();
  }
  double operator()(const LpBallPrim& p) const {
    double s = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) s += std::pow(std::abs(x[i] - p.center[i]) / p.semiaxes[i], p.p);
    return s - 1.0;
  }
  double operator()(const CosGraphPrim& p) const {
    return -p.side * (x[p.axis] - p.amp * std::cos(p.freq * x[p.arg]));
  }
};

struct BoxVisitor {
  BBox operator()(const BallPrim& p) const {
    Vec r = Vec::Constant(p.center.size(), p.radius);
    return {p.center - r, p.center + r};
  }
  BBox operator()(const BoxPrim& p) const { return {p.lo, p.hi}; }
  BBox operator()(const HalfspacePrim& p) const {
    Eigen::Index n = p.normal.size();
    BBox b{Vec::Constant(n, -kInf), Vec::Constant(n, kInf)};
    // Axis-aligned halfspaces bound one coordinate.
    int nz = 0, k = -1;
    for (Eigen::Index i = 0; i < n; ++i)
      if (p.normal[i] != 0.0) {
        ++nz;
        k = static_cast<int>(i);
      }
    if (nz == 1) {
      double t = p.offset / p.normal[k];
      if (p.normal[k] > 0) b.hi[k] = t;
      else b.lo[k] = t;
    }
    return b;
  }
  BBox operator()(const CylinderPrim& p) const {
    Eigen::Index n = p.base.size();
    BBox b{Vec::Constant(n, -kInf), Vec::Constant(n, kInf)};
    for (Eigen::Index i = 0; i < n; ++i) {
      double along = p.axes.cols() > 0 ? p.axes.row(i).norm() : 0.0;
      if (along < 1e-14) {
        b.lo[i] = p.base[i] - p.radius;
        b.hi[i] = p.base[i] + p.radius;
      }
    }
    return b;
  }
  BBox operator()(const SimplexPrim& p) const {
    return {p.vertices.rowwise().minCoeff(), p.vertices.rowwise().maxCoeff()};
  }
  BBox operator()(const LpBallPrim& p) const { return {p.center - p.semiaxes, p.center + p.semiaxes}; }
  BBox operator()(const CosGraphPrim& p) const {
    BBox b{Vec::Constant(p.dim, -kInf), Vec::Constant(p.dim, kInf)};
    double a = std::abs(p.amp);
    // side > 0 keeps x[axis] >= amp cos(...) >= -|amp|.
    if (p.side > 0) b.lo[p.axis] = -a;
    else b.hi[p.axis] = a;
    return b;
  }
};

bool eval(const BodyExpr& b, const Vec& x, bool closed) {
  switch (b.op) {
    case BodyExpr::Op::leaf: {
      double v = std::visit(ValueVisitor{x}, b.prim);
      return closed ? v <= 0.0 : v < 0.0;
    }
    case BodyExpr::Op::unite:
      for (const auto& k : b.kids)
        if (eval(k, x, closed)) return true;
      return false;
    case BodyExpr::Op::intersect:
      for (const auto& k : b.kids)
        if (!eval(k, x, closed)) return false;
      return true;
    case BodyExpr::Op::subtract:
      return eval(b.kids[0], x, closed) && !eval(b.kids[1], x, !closed);
  }
  return false;
}

}  // namespace

int prim_dim(const Primitive& p) { return std::visit(DimVisitor{}, p); }

double prim_value(const Primitive& p, const Vec& x) { return std::visit(ValueVisitor{x}, p); }

void validate(const Primitive& prim) {
  const int n = prim_dim(prim);
  if (n < 1) throw std::domain_error("primitive: dimension must be >= 1");
  auto finite = [](const Vec& v) { return v.allFinite(); };
  if (auto* p = std::get_if<BallPrim>(&prim)) {
    if (!(p->radius > 0) || !finite(p->center)) throw std::domain_error("ball: radius must be positive");
  } else if (auto* p = std::get_if<BoxPrim>(&prim)) {
    if (p->hi.size() != n || !(p->lo.array() < p->hi.array()).all())
      throw std::domain_error("box: min corner must be below max corner");
  } else if (auto* p = std::get_if<HalfspacePrim>(&prim)) {
    if (std::abs(p->normal.norm() - 1.0) > 1e-9) throw std::domain_error("halfspace: normal must be unit");
  } else if (auto* p = std::get_if<CylinderPrim>(&prim)) {
    if (!(p->radius > 0)) throw std::domain_error("cylinder: radius must be positive");
    if (p->axes.rows() != n && p->axes.cols() > 0) throw std::domain_error("cylinder: axis dimension mismatch");
    if (p->axes.cols() >= n) throw std::domain_error("cylinder: need 0 <= k < n");
    Eigen::MatrixXd G = p->axes.transpose() * p->axes;
    if (p->axes.cols() > 0 && !G.isIdentity(1e-9)) throw std::domain_error("cylinder: axes must be orthonormal");
  } else if (auto* p = std::get_if<SimplexPrim>(&prim)) {
    if (p->vertices.cols() != n + 1) throw std::domain_error("simplex: need n+1 vertices");
    Eigen::MatrixXd E = p->vertices.rightCols(n).colwise() - p->vertices.col(0);
    if (std::abs(E.determinant()) < 1e-12) throw std::domain_error("simplex: vertices affinely dependent");
  } else if (auto* p = std::get_if<LpBallPrim>(&prim)) {
    if (!(p->p > 0) || !std::isfinite(p->p)) throw std::domain_error("lp_ball: exponent must be finite positive");
    if (p->semiaxes.size() != n || !(p->semiaxes.array() > 0).all())
      throw std::domain_error("lp_ball: semiaxes must be positive");
  } else if (auto* p = std::get_if<CosGraphPrim>(&prim)) {
    if (p->axis < 0 || p->axis >= n || p->arg < 0 || p->arg >= n || p->axis == p->arg)
      throw std::domain_error("cos_graph: bad axis/arg");
  }
}

int BodyExpr::dim() const {
  if (op == Op::leaf) return prim_dim(prim);
  return kids.empty() ? 0 : kids[0].dim();
}

BodyExpr leaf(Primitive p) {
  BodyExpr b;
  b.op = BodyExpr::Op::leaf;
  b.prim = std::move(p);
  return b;
}

BodyExpr unite(std::vector<BodyExpr> kids) {
  BodyExpr b;
  b.op = BodyExpr::Op::unite;
  b.kids = std::move(kids);
  return b;
}

BodyExpr intersect(std::vector<BodyExpr> kids) {
  BodyExpr b;
  b.op = BodyExpr::Op::intersect;
  b.kids = std::move(kids);
  return b;
}

BodyExpr subtract(BodyExpr a, BodyExpr c) {
  BodyExpr b;
  b.op = BodyExpr::Op::subtract;
  b.kids.push_back(std::move(a));
  b.kids.push_back(std::move(c));
  return b;
}

BodyExpr ball(const Vec& c, double r) { return leaf(BallPrim{c, r}); }
BodyExpr box(const Vec& lo, const Vec& hi) { return leaf(BoxPrim{lo, hi}); }
BodyExpr simplex(const Eigen::MatrixXd& v) { return leaf(SimplexPrim{v}); }

void validate(const BodyExpr& b) {
  if (b.op == BodyExpr::Op::leaf) {
    validate(b.prim);
    return;
  }
  if (b.kids.empty()) throw std::domain_error("body: empty children list");
  if (b.op == BodyExpr::Op::subtract && b.kids.size() != 2) throw std::domain_error("body: difference needs two operands");
  const int n = b.kids[0].dim();
  for (const auto& k : b.kids) {
    validate(k);
    if (k.dim() != n) throw std::domain_error("body: leaves differ in dimension");
  }
}

bool contains(const BodyExpr& b, const Vec& x) {
  require_dim(x, b.dim(), "contains");
  return eval(b, x, true);
}

bool contains_interior(const BodyExpr& b, const Vec& x) {
  require_dim(x, b.dim(), "contains_interior");
  return eval(b, x, false);
}

bool BBox::bounded() const { return lo.allFinite() && hi.allFinite(); }

BBox bounding_box(const BodyExpr& b) {
  switch (b.op) {
    case BodyExpr::Op::leaf:
      return std::visit(BoxVisitor{}, b.prim);
    case BodyExpr::Op::unite: {
      BBox r = bounding_box(b.kids[0]);
      for (size_t i = 1; i < b.kids.size(); ++i) {
        BBox k = bounding_box(b.kids[i]);
        r.lo = r.lo.cwiseMin(k.lo);
        r.hi = r.hi.cwiseMax(k.hi);
      }
      return r;
    }
    case BodyExpr::Op::intersect: {
      BBox r = bounding_box(b.kids[0]);
      for (size_t i = 1; i < b.kids.size(); ++i) {
        BBox k = bounding_box(b.kids[i]);
        r.lo = r.lo.cwiseMax(k.lo);
        r.hi = r.hi.cwiseMin(k.hi);
      }
      return r;
    }
    case BodyExpr::Op::subtract:
      return bounding_box(b.kids[0]);
  }
  return {};
}

// ---------------------------------------------------------------------------
// Gallery

namespace {

class ParamReader {
 public:
  ParamReader(const std::string& name, const Params& p) : name_(name), p_(p) {}
  double get(const std::string& key, double def) {
    used_.insert(key);
    auto it = p_.find(key);
    return it == p_.end() ? def : it->second;
  }
  void finish() const {
    for (const auto& [k, v] : p_)
      if (!used_.count(k)) throw std::domain_error("gallery(" + name_ + "): unknown parameter '" + k + "'");
  }

 private:
  std::string name_;
  const Params& p_;
  std::set<std::string> used_;
};

Vec e(int n, int i) {
  Vec v = Vec::Zero(n);
  v[i] = 1.0;
  return v;
}

BodyExpr halfspace(const Vec& normal, double offset) { return leaf(HalfspacePrim{normal, offset}); }

BodyExpr cylinder(const Vec& base, const Eigen::MatrixXd& axes, double r) { return leaf(CylinderPrim{base, axes, r}); }

// Equilateral triangle centered at O with side s, plus the three balls of Eq-3 type.
struct Eq3Parts {
  std::vector<Vec> vertex_dirs;  // unit directions of a_i
  double circumradius;
  std::vector<Vec> centers;
};

Eq3Parts eq3_parts(double r, double s) {
  Eq3Parts p;
  p.circumradius = s / std::sqrt(3.0);
  double off = std::sqrt(r * r - s * s / 4.0) + s / (2.0 * std::sqrt(3.0));
  for (int i = 0; i < 3; ++i) {
    double t = M_PI / 2 + 2 * M_PI * i / 3;
    Vec u = vec({std::cos(t), std::sin(t)});
    p.vertex_dirs.push_back(u);
    p.centers.push_back(-off * u);
  }
  return p;
}

}  // namespace

std::vector<std::string> gallery_names() {
  return {"ball", "ring", "quadrangle", "eq3", "eq3_prism", "c_body", "two_component", "two_balls",
          "strips", "astroid", "cube_minus_ball", "ball_minus_cap", "example5a", "example5b"};
}

BodyExpr gallery(const std::string& name, const Params& params) {
  ParamReader P(name, params);
  BodyExpr out;
  if (name == "ball") {
    int n = static_cast<int>(P.get("dim", 2));
    double r = P.get("r", 1.0);
    Vec c = Vec::Zero(n);
    c[0] = P.get("cx", 0.0);
    if (n > 1) c[1] = P.get("cy", 0.0);
    if (n > 2) c[2] = P.get("cz", 0.0);
    out = ball(c, r);
  } else if (name == "ring") {
    double r = P.get("r", 2.0);
    double eps = P.get("eps", 1.0);
    out = subtract(ball(Vec::Zero(2), r), ball(Vec::Zero(2), 1.0 / eps));
  } else if (name == "quadrangle") {
    Eigen::MatrixXd t1(2, 3), t2(2, 3);
    t1 << 0, 1, 0.25, 0, 0, 0.25;
    t2 << 0, 0.25, 0, 0, 0.25, 1;
    out = unite({simplex(t1), simplex(t2)});
  } else if (name == "eq3") {
    double r = P.get("r", 1.0);
    double s = P.get("side", 0.6) * r;
    auto parts = eq3_parts(r, s);
    std::vector<BodyExpr> tri, removed;
    for (const auto& u : parts.vertex_dirs) tri.push_back(halfspace(-u, s / (2 * std::sqrt(3.0))));
    removed.push_back(intersect(tri));
    for (const auto& c : parts.centers) removed.push_back(ball(c, r));
    out = subtract(ball(Vec::Zero(2), 4 * r), unite(removed));
  } else if (name == "eq3_prism") {
    double r = P.get("r", 0.5);
    double s = P.get("side", 0.6) * r;
    double len = P.get("length", 1.0);
    auto parts = eq3_parts(r, s);
    Eigen::MatrixXd ax = e(3, 2);
    auto lift = [](const Vec& v) { return vec({v[0], v[1], 0.0}); };
    std::vector<BodyExpr> tri, removed;
    for (const auto& u : parts.vertex_dirs) tri.push_back(halfspace(-lift(u), s / (2 * std::sqrt(3.0))));
    removed.push_back(intersect(tri));
    for (const auto& c : parts.centers) removed.push_back(cylinder(lift(c), ax, r));
    BodyExpr outer = intersect({cylinder(Vec::Zero(3), ax, 4 * r),
                                box(vec({-4 * r, -4 * r, 0.0}), vec({4 * r, 4 * r, len}))});
    out = subtract(outer, unite(removed));
  } else if (name == "c_body") {
    double eps = P.get("eps", 0.2);
    double R = 1.0 / eps;
    if (R <= 2.0) throw std::domain_error("gallery(c_body): needs 1/eps > 2");
    Eigen::MatrixXd ax = e(3, 2);
    BodyExpr k1 = intersect({cylinder(vec({-1.1, 0, 0}), ax, 3.0), box(vec({-4.1, -3, -0.1}), vec({1.9, 3, 0.1}))});
    BodyExpr w = subtract(k1, cylinder(Vec::Zero(3), ax, 2.0));
    Vec C = vec({0, 0, std::sqrt(R * R - 4.0)});
    out = subtract(w, unite({ball(C, R), ball(-C, R)}));
  } else if (name == "two_component") {
    double eps = P.get("eps", 1.0);
    double r = P.get("r_factor", 1.0) / eps;
    Vec C = vec({r / 2, 0});
    out = subtract(ball(Vec::Zero(2), r), unite({ball(C, 1 / eps), ball(-C, 1 / eps)}));
  } else if (name == "two_balls") {
    double r = P.get("r", 0.5);
    double a = P.get("a", 3.0);
    out = unite({ball(vec({a, 0}), r), ball(vec({-a, 0}), r)});
  } else if (name == "strips") {
    double amp = P.get("amp", 0.1);
    int which = static_cast<int>(P.get("which", 0));
    BodyExpr b1 = intersect({box(vec({-2 * M_PI, -1}), vec({2 * M_PI, 1})), leaf(CosGraphPrim{2, 1, 0, amp, 1.0, 1.0})});
    BodyExpr b2 = intersect({box(vec({-2 * M_PI, -1}), vec({2 * M_PI, 1})), leaf(CosGraphPrim{2, 1, 0, -amp, 1.0, -1.0})});
    if (which == 1) out = b1;
    else if (which == 2) out = b2;
    else out = intersect({b1, b2});
  } else if (name == "astroid") {
    double p = P.get("p", 2.0 / 3.0);
    out = leaf(LpBallPrim{Vec::Zero(2), Vec::Ones(2), p});
  } else if (name == "cube_minus_ball") {
    int n = static_cast<int>(P.get("dim", 2));
    double eps = P.get("eps", 0.5);
    double R = 1.0 / eps;
    if (R < 1.0) throw std::domain_error("gallery(cube_minus_ball): needs 1/eps >= 1");
    Vec C = Vec::Zero(n);
    C[0] = std::sqrt(R * R - 1.0);
    out = subtract(box(Vec::Constant(n, -1.0), Vec::Constant(n, 1.0)), ball(C, R));
  } else if (name == "ball_minus_cap") {
    int n = static_cast<int>(P.get("dim", 2));
    double r = P.get("r", 1.0);
    double R = 1.0 / P.get("eps", 1.0);
    double depth = P.get("depth", 0.2);
    Vec c = Vec::Zero(n), u = Vec::Zero(n);
    const char* ck[] = {"cx", "cy", "cz"};
    const char* uk[] = {"ux", "uy", "uz"};
    for (int i = 0; i < n && i < 3; ++i) {
      c[i] = P.get(ck[i], 0.0);
      u[i] = P.get(uk[i], i == 1 ? 1.0 : 0.0);
    }
    if (u.norm() == 0) throw std::domain_error("gallery(ball_minus_cap): zero cap direction");
    u.normalize();
    if (!(depth > 0 && depth < r)) throw std::domain_error("gallery(ball_minus_cap): need 0 < depth < r");
    out = subtract(ball(c, r), ball(c + (r + R - depth) * u, R));
  } else if (name == "example5a") {
    double a = P.get("a", 3.0);
    double b = P.get("b", 1.5);
    Eigen::MatrixXd P12(4, 2), P34(4, 2);
    P12 << 1, 0, 0, 1, 0, 0, 0, 0;
    P34 << 0, 0, 0, 0, 1, 0, 0, 1;
    out = subtract(box(Vec::Constant(4, -a), Vec::Constant(4, a)),
                   unite({cylinder(Vec::Zero(4), P12, b), cylinder(Vec::Zero(4), P34, b)}));
  } else if (name == "example5b") {
    double a = P.get("a", 2.05);
    double c = P.get("c", 1.9);
    // Cylinder {(x_i - s c)^2 + x_j^2 <= a^2}: axis plane spanned by the other two coordinates.
    auto cyl = [&](int i, double s, int j) {
      Eigen::MatrixXd ax(4, 2);
      ax.setZero();
      int col = 0;
      for (int d = 0; d < 4; ++d)
        if (d != i && d != j) ax(d, col++) = 1.0;
      Vec base = Vec::Zero(4);
      base[i] = s * c;
      return cylinder(base, ax, a);
    };
    out = subtract(box(Vec::Constant(4, -1.0), Vec::Constant(4, 1.0)),
                   unite({cyl(0, 1, 2), cyl(0, -1, 3), cyl(3, 1, 1), cyl(3, -1, 0)}));
  } else {
    throw std::domain_error("gallery: unknown body '" + name + "'");
  }
  P.finish();
  validate(out);
  return out;
}

}  // namespace epsc
