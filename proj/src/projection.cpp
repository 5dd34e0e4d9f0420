#include "epsc/projection.hpp"

#include <cmath>
#include <numbers>

namespace epsc {

namespace {

// Second-order forward-mode jet: value and first two derivatives in one variable.
struct Jet {
  double v = 0, d = 0, dd = 0;
};
Jet operator+(Jet a, Jet b) { return {a.v + b.v, a.d + b.d, a.dd + b.dd}; }
Jet operator-(Jet a, Jet b) { return {a.v - b.v, a.d - b.d, a.dd - b.dd}; }
Jet operator*(Jet a, Jet b) { return {a.v * b.v, a.d * b.v + a.v * b.d, a.dd * b.v + 2 * a.d * b.d + a.v * b.dd}; }
Jet operator*(double s, Jet a) { return {s * a.v, s * a.d, s * a.dd}; }
Jet operator+(double s, Jet a) { return {s + a.v, a.d, a.dd}; }
Jet operator*(Jet a, double s) { return s * a; }
Jet operator/(Jet a, Jet b) {
  double q = a.v / b.v;
  double qd = (a.d - q * b.d) / b.v;
  double qdd = (a.dd - 2 * qd * b.d - q * b.dd) / b.v;
  return {q, qd, qdd};
}
Jet sqrt(Jet a) {
  double s = std::sqrt(a.v);
  double sd = a.d / (2 * s);
  return {s, sd, (a.dd - 2 * sd * sd) / (2 * s)};
}
Jet sin(Jet a) { return {std::sin(a.v), std::cos(a.v) * a.d, -std::sin(a.v) * a.d * a.d + std::cos(a.v) * a.dd}; }
Jet cos(Jet a) { return {std::cos(a.v), -std::sin(a.v) * a.d, -std::cos(a.v) * a.d * a.d - std::sin(a.v) * a.dd}; }

double curvature(const Jet& x, const Jet& y) { return (x.d * y.dd - y.d * x.dd) / std::pow(x.d * x.d + y.d * y.d, 1.5); }

template <class T>
void gamma_psi(double psi, T t, T& x, T& y) {
  using std::cos;
  using std::sin;
  using std::sqrt;
  T s = sin(t), c = 2.0 + cos(t);
  double cp = std::cos(psi);
  T a = sqrt((c * c + s * s) / ((cp * cp) * (c * c) + s * s));
  x = a * s;
  y = a * (cp * c);
}

// Image of the great circle through the point of the sphere nearest C, in the basis
// (x'/|x'|, v): alpha(t) [(1 + lambda cos t)|x'|, r sin t].
template <class T>
void lemma3_curve(double r, double lambda, double psi, T t, T& x, T& y) {
  using std::cos;
  using std::sin;
  using std::sqrt;
  double nx = r / lambda;
  double sp = std::sin(psi);
  T ct = cos(t);
  T num = (1 + lambda * lambda) + (2 * lambda) * ct;
  T k = 1.0 + lambda * ct;
  T a = sqrt(num / (num - (sp * sp) * (k * k)));
  x = a * (k * (nx * std::cos(psi)));
  y = a * (r * sin(t));
}

}  // namespace

CircularProjection make_projection(const Vec& C, const Vec& omega) {
  if (C.size() != omega.size()) throw std::domain_error("projection: C and omega differ in dimension");
  double n = omega.norm();
  if (!(n > 0)) throw std::domain_error("projection: omega must be nonzero");
  return {C, omega / n};
}

double axis_distance(const CircularProjection& f, const Vec& x) {
  Vec v = x - f.C;
  return (v - v.dot(f.omega) * f.omega).norm();
}

Vec project_point(const CircularProjection& f, const Vec& x) {
  require_dim(x, static_cast<int>(f.C.size()), "project_point");
  Vec v = x - f.C;
  Vec w = v - v.dot(f.omega) * f.omega;
  double nw = w.norm(), nv = v.norm();
  if (!(nw > 1e-9 * nv) || nv == 0) throw AxisError("project_point: point lies on the projection axis", nw);
  return f.C + (nv / nw) * w;
}

Vec project_coordinate_form(const Vec& x) {
  require_dim(x, 3, "project_coordinate_form");
  double rr = x[0] * x[0] + x[1] * x[1];
  if (!(rr > 0)) throw AxisError("project_coordinate_form: point on the z axis", 0.0);
  double a = std::sqrt(1 + x[2] * x[2] / rr);
  return vec({a * x[0], a * x[1], 0.0});
}

Eigen::MatrixXd screen_basis(const CircularProjection& f) {
  return orth_complement(f.omega, static_cast<int>(f.C.size()));
}

Grid screen_frame(const CircularProjection& f, const std::vector<const Grid*>& bodies, double h) {
  Eigen::MatrixXd B = screen_basis(f);
  std::vector<BBox> boxes;
  for (const Grid* g : bodies) {
    for (size_t i = 0; i < g->size(); ++i) {
      if (!g->solid(i)) continue;
      Vec s = B.transpose() * (project_point(f, g->center(i)) - f.C);
      if (boxes.empty())
        boxes.push_back({s, s});
      else {
        boxes[0].lo = boxes[0].lo.cwiseMin(s);
        boxes[0].hi = boxes[0].hi.cwiseMax(s);
      }
    }
  }
  if (boxes.empty()) throw std::domain_error("screen_frame: no solid cells");
  return frame_for(boxes, h, 2 * h);
}

ScreenImage project_body(const CircularProjection& f, const Grid& g, const Grid* frame) {
  const int n = g.dim;
  if (static_cast<int>(f.C.size()) != n) throw std::domain_error("project_body: dimension mismatch");
  if (n < 2) throw std::domain_error("project_body: need n >= 2");
  const double rc = g.diag() / 2;
  ScreenImage out;
  std::vector<size_t> solid = indices_of(g, CellSet::solid);
  out.points.resize(n, static_cast<long>(solid.size()));
  for (size_t k = 0; k < solid.size(); ++k) {
    Vec x = g.center(solid[k]);
    double d = axis_distance(f, x);
    if (d <= rc) {
      auto c = g.coords(solid[k]);
      throw AxisError("project_body: cell (" + std::to_string(c[0]) + "," + std::to_string(c[1]) + "," +
                          std::to_string(c[2]) + ") meets the projection axis",
                      d);
    }
    out.points.col(static_cast<long>(k)) = project_point(f, x);
  }
  Eigen::MatrixXd B = screen_basis(f);
  out.raster = frame ? empty_like(*frame) : screen_frame(f, {&g}, g.h);
  Grid& S = out.raster;
  for (size_t i = 0; i < S.size(); ++i) {
    Vec s = S.center(i);
    double rho = s.norm();
    if (!(rho > 0)) continue;
    Vec u = B * (s / rho);
    const double dth = g.h / (2 * rho);
    const int steps = static_cast<int>(std::ceil(std::numbers::pi / dth));
    for (int j = 1; j < steps; ++j) {
      double th = -std::numbers::pi / 2 + j * (std::numbers::pi / steps);
      Vec p = f.C + rho * (std::cos(th) * u + std::sin(th) * f.omega);
      long c = g.locate(p);
      if (c >= 0 && g.solid(static_cast<size_t>(c))) {
        S.cells[i] = Cell::inside;
        break;
      }
    }
  }
  return out;
}

Points apparent_contour(const CircularProjection& f, const Points& samples, const Points& normals, double tol) {
  if (samples.cols() != normals.cols()) throw std::domain_error("apparent_contour: sample/normal count mismatch");
  std::vector<Vec> keep;
  for (long i = 0; i < samples.cols(); ++i) {
    Vec v = samples.col(i) - f.C;
    double nv = v.norm();
    Vec tan = f.omega - f.omega.dot(v) / (nv * nv) * v;
    double nt = tan.norm();
    Vec img = project_point(f, samples.col(i));
    // In the screen the trajectory degenerates to a point; every sample is on the silhouette.
    if (nt < 1e-12 || std::abs(tan.dot(normals.col(i))) / nt <= tol) keep.push_back(img);
  }
  Points out(f.C.size(), static_cast<long>(keep.size()));
  for (size_t i = 0; i < keep.size(); ++i) out.col(static_cast<long>(i)) = keep[i];
  return out;
}

// ---------------------------------------------------------------------------

namespace {
void require_psi(double psi) {
  if (!(psi > 0 && psi <= std::numbers::pi / 2)) throw std::domain_error("gamma_psi: psi must lie in (0, pi/2]");
}
}  // namespace

Vec gamma_psi_point(double psi, double t) {
  require_psi(psi);
  double x, y;
  gamma_psi(psi, t, x, y);
  return vec({x, y});
}

double gamma_psi_curvature(double psi, double t) {
  require_psi(psi);
  Jet x, y;
  gamma_psi(psi, Jet{t, 1, 0}, x, y);
  return curvature(x, y);
}

double gamma_psi_curvature_fd(double psi, double t, double step) {
  require_psi(psi);
  auto k = [&](double s) {
    Vec p0 = gamma_psi_point(psi, t), p1 = gamma_psi_point(psi, t + s), m1 = gamma_psi_point(psi, t - s);
    Vec d1 = (p1 - m1) / (2 * s), d2 = (p1 - 2 * p0 + m1) / (s * s);
    return (d1[0] * d2[1] - d1[1] * d2[0]) / std::pow(d1.squaredNorm(), 1.5);
  };
  // Both difference quotients are O(s^2); one Richardson step removes that term.
  return (4 * k(step / 2) - k(step)) / 3;
}

Vec gamma_psi_point_projected(double psi, double t) {
  require_psi(psi);
  Vec X = vec({std::sin(t), (2 + std::cos(t)) * std::cos(psi), (2 + std::cos(t)) * std::sin(psi)});
  Vec p = project_point(make_projection(Vec::Zero(3), vec({0, 0, 1})), X);
  return p.head(2);
}

GammaPsiCurve gamma_psi_curve(double psi, int samples) {
  require_psi(psi);
  if (samples < 8) throw std::domain_error("gamma_psi_curve: need at least 8 samples");
  GammaPsiCurve c;
  c.psi = psi;
  c.samples.resize(2, samples);
  // Orient so that the curvature at t = 0 (the far side) is positive.
  double sign = gamma_psi_curvature(psi, 0.0) >= 0 ? 1.0 : -1.0;
  c.min_curvature = std::numeric_limits<double>::infinity();
  for (int i = 0; i < samples; ++i) {
    double t = 2 * std::numbers::pi * i / samples;
    c.t.push_back(t);
    c.samples.col(i) = gamma_psi_point(psi, t);
    double k = sign * gamma_psi_curvature(psi, t);
    c.curvature.push_back(k);
    if (k < c.min_curvature) {
      c.min_curvature = k;
      c.argmin_t = t;
    }
  }
  return c;
}

// ---------------------------------------------------------------------------

ProfileCurve sphere_image_profile(const CircularProjection& f, const Ball& sphere, int samples) {
  const int n = static_cast<int>(f.C.size());
  require_dim(sphere.center, n, "sphere_image_profile");
  if (samples < 3) throw std::domain_error("sphere_image_profile: need at least 3 samples");
  const double r = sphere.radius;
  double ad = axis_distance(f, sphere.center);
  if (!(ad > r)) throw AxisError("sphere_image_profile: sphere meets the projection axis", ad - r);
  Vec x = sphere.center - f.C;
  Vec xh = x.normalized();
  Vec xp = x - x.dot(f.omega) * f.omega;
  ProfileCurve p;
  p.axis_dir = xp.normalized();
  Eigen::MatrixXd span(n, 2);
  span.col(0) = f.omega;
  span.col(1) = xh;
  Eigen::MatrixXd V = orth_complement(span, n);  // directions of the sections V_z
  std::vector<Vec> az;
  for (long j = 0; j < V.cols(); ++j) {
    az.push_back(V.col(j));
    az.push_back(-V.col(j));
  }
  if (V.cols() >= 2) az.push_back((V.col(0) + V.col(1)).normalized());
  for (int i = 0; i < samples; ++i) {
    double s = -r + 2 * r * i / (samples - 1);
    Vec z = x + s * xh;
    double rz = std::sqrt(std::max(0.0, r * r - s * s));
    if (i == 0 || i == samples - 1) rz = 0;
    double wz = f.omega.dot(z);
    double q = z.squaredNorm() + rz * rz;
    double alpha = std::sqrt(q / (q - wz * wz));
    Vec zp = z - wz * f.omega;
    p.axial.push_back(alpha * zp.dot(p.axis_dir));
    p.radial.push_back(alpha * rz);
    for (const Vec& v : az) {
      Vec P = project_point(f, f.C + z + rz * v) - f.C;
      double a = P.dot(p.axis_dir);
      double rad = (P - a * p.axis_dir).norm();
      p.symmetry_deviation = std::max({p.symmetry_deviation, std::abs(a - p.axial.back()), std::abs(rad - p.radial.back())});
    }
  }
  return p;
}

Lemma3Report lemma3_check(const CircularProjection& f, const Ball& sphere, int boundary_points) {
  if (f.C.size() != 3) throw std::domain_error("lemma3_check: implemented for n = 3");
  require_dim(sphere.center, 3, "lemma3_check");
  const double r = sphere.radius;
  Vec x = sphere.center - f.C;
  Lemma3Report rep;
  rep.lambda = r / x.norm();
  rep.psi = std::asin(std::min(1.0, std::abs(x.dot(f.omega)) / x.norm()));
  const double slack = 1e-12;
  if (rep.lambda > 0.5 + slack || rep.psi > std::numbers::pi / 6 + slack) {
    char buf[200];
    std::snprintf(buf, sizeof buf, "Lemma 3 requires r/|Cx| <= 1/2 and angle(Cx, P) <= pi/6 (measured lambda=%.6g, psi=%.6g)",
                  rep.lambda, rep.psi);
    throw PreconditionError(buf);
  }
  rep.curvature_bound = 1 / (2 * r);
  // Profile curve: closed form, exact curvature.
  const int N = 4096;
  Points curve(2, N);
  std::vector<double> kap(N);
  Jet x0, y0;
  lemma3_curve(r, rep.lambda, rep.psi, Jet{0, 1, 0}, x0, y0);
  const double sign = curvature(x0, y0) >= 0 ? 1.0 : -1.0;
  rep.min_profile_curvature = std::numeric_limits<double>::infinity();
  for (int i = 0; i < N; ++i) {
    double t = 2 * std::numbers::pi * i / N;
    Jet X, Y;
    lemma3_curve(r, rep.lambda, rep.psi, Jet{t, 1, 0}, X, Y);
    curve.col(i) = vec({X.v, Y.v});
    kap[i] = sign * curvature(X, Y);
    rep.min_profile_curvature = std::min(rep.min_profile_curvature, kap[i]);
  }
  // Cross-check against projecting the great circle through the point nearest C.
  Vec xp = x - x.dot(f.omega) * f.omega;
  Vec u = xp.normalized();
  Eigen::Vector3d w3 = f.omega, u3 = u;
  Vec v = w3.cross(u3).normalized();
  for (int i = 0; i < N; i += 16) {
    double t = 2 * std::numbers::pi * i / N;
    Vec X = f.C + (rep.lambda * std::cos(t) + 1) * x + r * std::sin(t) * v;
    Vec P = project_point(f, X) - f.C;
    Vec q = vec({P.dot(u), P.dot(v)});
    rep.profile_residual = std::max(rep.profile_residual, (q - curve.col(i)).norm());
  }
  // Radius-2r ball sharing the tangent line at y must contain the whole image boundary.
  rep.enclosing_ball_ok = true;
  for (int b = 0; b < boundary_points; ++b) {
    double t = 2 * std::numbers::pi * b / boundary_points;
    Jet X, Y;
    lemma3_curve(r, rep.lambda, rep.psi, Jet{t, 1, 0}, X, Y);
    Vec tan = vec({X.d, Y.d}).normalized();
    Vec inward = sign * vec({-tan[1], tan[0]});
    Vec center = vec({X.v, Y.v}) + 2 * r * inward;
    double worst = ((curve.colwise() - center).colwise().norm()).maxCoeff();
    ++rep.enclosing_checked;
    if (worst > 2 * r * (1 + 1e-9)) rep.enclosing_ball_ok = false;
  }
  return rep;
}

}  // namespace epsc
