#include "epsc/suites.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>

namespace epsc {

namespace {

// Library distributions are implementation-defined; these are not.
struct Rng {
  std::mt19937_64 g;
  explicit Rng(uint64_t seed) : g(seed) {}
  double uni() { return static_cast<double>(g() >> 11) * 0x1.0p-53; }
  double uni(double a, double b) { return a + (b - a) * uni(); }
  double normal() {
    double u = 1.0 - uni(), v = uni();
    return std::sqrt(-2 * std::log(u)) * std::cos(2 * std::numbers::pi * v);
  }
  Vec unit(int n) {
    Vec v(n);
    do {
      for (int i = 0; i < n; ++i) v[i] = normal();
    } while (v.norm() < 1e-6);
    return v.normalized();
  }
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string g4(double x) { return fmt("%.4g", x); }

// Sub-seed per criterion so that running one suite alone matches a full run.
uint64_t sub_seed(const SuiteOptions& opt, int id) { return opt.seed * 1000003ULL + static_cast<uint64_t>(id); }

Grid rasterize_padded(const BodyExpr& body, double h, double pad) {
  BBox bb = bounding_box(body);
  const int n = body.dim();
  Vec lo = bb.lo.array() - pad;
  std::array<int, 3> cells{1, 1, 1};
  for (int i = 0; i < n; ++i) cells[static_cast<size_t>(i)] = static_cast<int>(std::ceil((bb.hi[i] - bb.lo[i] + 2 * pad) / h));
  return rasterize_in(body, lo, cells, h);
}

Budget stop_first(int workers) {
  Budget b;
  b.workers = workers;
  b.stop_at_first_violation = true;
  return b;
}

// ---------------------------------------------------------------------------

CriterionResult c01_hull_thresholds(const SuiteOptions& opt) {
  CriterionResult r;
  const double h = 0.005;
  const Points T = thin_triangle_vertices({});
  auto comps = [&](double e) {
    Grid g = eps_hull_oracle_on(T, e, [&] {
      BBox bb{T.rowwise().minCoeff(), T.rowwise().maxCoeff()};
      return frame_for({bb}, h, 4 * h);
    }(), opt.workers);
    return solid_components(g);
  };
  const int c08 = comps(0.8), c15 = comps(1.5), c20 = comps(2.0);
  // Largest eps with a connected hull, and the eps above which only the vertices remain.
  double lo = 0.8, hi = 1.3;
  for (int it = 0; it < 14; ++it) {
    double m = 0.5 * (lo + hi);
    (comps(m) <= 1 ? lo : hi) = m;
  }
  const double conn = 0.5 * (lo + hi);
  lo = 1.5, hi = 2.0;
  for (int it = 0; it < 14; ++it) {
    double m = 0.5 * (lo + hi);
    (comps(m) > 3 ? lo : hi) = m;
  }
  const double wonly = 0.5 * (lo + hi);
  r.pass = c08 == 1 && c15 == 4 && c20 == 3 && std::abs(conn - 1.0) <= 0.05 && std::abs(wonly - std::sqrt(3.0)) <= 0.05;
  r.summary = "components(0.8,1.5,2.0)=" + std::to_string(c08) + "," + std::to_string(c15) + "," + std::to_string(c20) +
              " connectivity=" + g4(conn) + " vertices-only=" + g4(wonly);
  r.report = {{"h", h},
              {"components", {{"0.8", c08}, {"1.5", c15}, {"2.0", c20}}},
              {"connectivity_transition", conn},
              {"vertices_only_transition", wonly},
              {"tolerance", 0.05}};
  EpsHull2D H = eps_hull_wrap2d(T, 0.8);
  r.artifacts.emplace_back("hull_equilateral_eps0.8.svg", svg_hull(H, T));
  BBox bb{T.rowwise().minCoeff(), T.rowwise().maxCoeff()};
  r.artifacts.emplace_back("oracle_equilateral_eps1.5.svg",
                           svg_raster(eps_hull_oracle_on(T, 1.5, frame_for({bb}, 0.01, 0.04), opt.workers)));
  return r;
}

CriterionResult c02_thin_triangles(const SuiteOptions& opt) {
  CriterionResult r;
  const double h = 0.0025;
  bool ok = true;
  double worst = 0;
  Json rows = Json::array();
  for (auto kind : {ThinTriangle::long_base, ThinTriangle::short_base})
    for (double c : {0.6, 0.7, 0.8, 0.9}) {
      ThinTriangle t{kind, c};
      Points W = thin_triangle_vertices(t);
      BBox bb{W.rowwise().minCoeff(), W.rowwise().maxCoeff()};
      Grid frame = frame_for({bb}, h, 4 * h);
      double lo = 0.3, hi = 1.6;
      for (int it = 0; it < 12; ++it) {
        double m = 0.5 * (lo + hi);
        (solid_components(eps_hull_oracle_on(W, m, frame, opt.workers)) <= 1 ? lo : hi) = m;
      }
      double meas = 0.5 * (lo + hi);
      double expect = thin_triangle_limit(t);
      double rel = std::abs(meas - expect) / expect;
      worst = std::max(worst, rel);
      ok = ok && rel <= 0.02;
      rows.push_back({{"kind", kind == ThinTriangle::long_base ? "long_base" : "short_base"},
                      {"c", c},
                      {"closed_form", expect},
                      {"measured", meas},
                      {"relative_error", rel}});
    }
  r.pass = ok;
  r.summary = "8 triangles, worst relative error " + g4(worst) + " (limit 0.02)";
  r.report = {{"h", h}, {"rows", rows}, {"tolerance", 0.02}};
  return r;
}

CriterionResult c03_thin_simplex(const SuiteOptions&) {
  CriterionResult r;
  double worst = 0;
  Json rows = Json::array();
  for (int n = 2; n <= 10; ++n) {
    ThinSimplexData d = thin_simplex(n);
    worst = std::max(worst, d.recurrence_residual);
    rows.push_back({{"n", n}, {"h_n", d.h_n}, {"eps_max", d.eps_max}, {"residual", d.recurrence_residual}});
  }
  const double e2 = thin_simplex(2).eps_max;
  r.pass = worst < 1e-12 && e2 == 1.0;
  r.summary = "max residual " + g4(worst) + ", eps_max(2)=" + fmt("%.17g", e2);
  r.report = {{"rows", rows}, {"tolerance", 1e-12}};
  return r;
}

CriterionResult c04_class_counterexamples(const SuiteOptions& opt) {
  CriterionResult r;
  Budget b;
  b.workers = opt.workers;
  const double he = 0.02, hc = 0.025;
  Grid eq3 = rasterize(gallery("eq3"), he);
  ClassVerdict k1 = check_K1(eq3, 1.0, b);
  ClassVerdict k2 = check_K2(eq3, 1.0, b);
  double wO = k2.witness_point ? k2.witness_point->norm() : std::numeric_limits<double>::infinity();
  Grid cb = rasterize(gallery("c_body"), hc);
  ClassVerdict c2 = check_K2(cb, 0.2, b);
  ClassVerdict c3 = check_K3(cb, 0.2, K3Mode::viaK5, b);
  const Vec target = vec({(5 - 1.1 * 1.1) / 2.2, 0, 0});
  double wc = c3.witness_point ? (*c3.witness_point - target).norm() : std::numeric_limits<double>::infinity();
  r.pass = k1.status == Status::satisfied && k2.status == Status::violated && wO <= 2 * he &&
           c2.status != Status::violated && c3.status == Status::violated && wc <= 0.05;
  r.summary = std::string("eq3 K1 ") + to_string(k1.status) + ", K2 " + to_string(k2.status) + " |w-O|=" + g4(wO) +
              "; c_body K2 " + to_string(c2.status) + " (" + std::to_string(c2.unknown_points) +
              " undecided), K3 " + to_string(c3.status) + " |w-x'|=" + g4(wc);
  r.report = {{"eq3", {{"h", he}, {"eps", 1.0}, {"K1", to_json(k1)}, {"K2", to_json(k2)}, {"witness_to_O", wO}}},
              {"c_body", {{"h", hc}, {"eps", 0.2}, {"K2", to_json(c2)}, {"K3_viaK5", to_json(c3)}, {"witness_to_x", wc}}}};
  return r;
}

CriterionResult c05_class_equivalences(const SuiteOptions& opt) {
  CriterionResult r;
  // Resolution per body; 2-D frames are padded so that exterior points with several nearest
  // points are on the grid.
  const std::vector<std::pair<std::string, double>> bodies = {
      {"ball", 0.04},           {"ring", 0.04},   {"quadrangle", 0.01}, {"eq3", 0.025},
      {"eq3_prism", 0.05},      {"c_body", 0.05}, {"two_component", 0.02}, {"two_balls", 0.04},
      {"strips", 0.02},         {"astroid", 0.02}, {"cube_minus_ball", 0.04}, {"ball_minus_cap", 0.01}};
  const std::vector<double> eps_list = {0.2, 0.5, 1.0, 2.0};
  const Budget b = stop_first(opt.workers);
  int agree = 0, total = 0, chain_bad = 0, mono_bad = 0;
  std::vector<std::string> bad;
  Json rows = Json::array();
  for (const auto& [name, h] : bodies) {
    BodyExpr body = gallery(name);
    Grid g = rasterize_padded(body, h, body.dim() == 2 ? 1.0 : 2 * h);
    std::map<std::string, std::vector<Status>> by_class;
    for (double e : eps_list) {
      Status s1 = check_K1(g, e, b).status;
      Status s2 = check_K2(g, e, b).status;
      Status s5 = check_K3(g, e, K3Mode::viaK5, b).status;
      Status s4 = check_K3(g, e, K3Mode::viaK4, b).status;
      ++total;
      if (s4 == s5) ++agree;
      else bad.push_back(name + "@" + g4(e) + " viaK4/viaK5 disagree");
      // K3 inside K2 inside K1: a satisfied inner class forbids a violated outer one.
      auto chain = [&](Status inner, Status outer) { return !(inner == Status::satisfied && outer == Status::violated); };
      if (!chain(s5, s2) || !chain(s4, s2) || !chain(s2, s1)) {
        ++chain_bad;
        bad.push_back(name + "@" + g4(e) + " inclusion chain");
      }
      by_class["K1"].push_back(s1);
      by_class["K2"].push_back(s2);
      by_class["K3/viaK5"].push_back(s5);
      by_class["K3/viaK4"].push_back(s4);
      rows.push_back({{"body", name},
                      {"h", h},
                      {"eps", e},
                      {"K1", to_string(s1)},
                      {"K2", to_string(s2)},
                      {"K3_viaK5", to_string(s5)},
                      {"K3_viaK4", to_string(s4)}});
    }
    // Smaller eps means larger balls: membership at eps implies membership at every larger eps.
    for (const auto& [cls, st] : by_class)
      for (size_t i = 0; i < st.size(); ++i)
        for (size_t j = i + 1; j < st.size(); ++j)
          if (st[i] == Status::satisfied && st[j] == Status::violated) {
            ++mono_bad;
            bad.push_back(name + " " + cls + " not monotone in eps");
          }
  }
  r.pass = agree == total && chain_bad == 0 && mono_bad == 0;
  r.summary = "viaK4/viaK5 agree " + std::to_string(agree) + "/" + std::to_string(total) + ", chain breaks " +
              std::to_string(chain_bad) + ", monotonicity breaks " + std::to_string(mono_bad);
  r.report = {{"eps", eps_list}, {"rows", rows}, {"failures", bad}};
  return r;
}

CriterionResult c06_projection_identities(const SuiteOptions& opt) {
  CriterionResult r;
  Rng rng(sub_seed(opt, 6));
  const long per_dim = 100000;
  double e_norm = 0, e_plane = 0, e_idem = 0, e_coord = 0;
  long tested = 0, skipped = 0;
  for (int n = 2; n <= 5; ++n) {
    CircularProjection f;
    for (long i = 0; i < per_dim; ++i) {
      if (i % 1000 == 0) {
        Vec C(n);
        for (int k = 0; k < n; ++k) C[k] = rng.uni(-1, 1);
        f = make_projection(C, rng.unit(n));
      }
      Vec x(n);
      for (int k = 0; k < n; ++k) x[k] = rng.uni(-2, 2);
      if (axis_distance(f, x) < 1e-3 * (x - f.C).norm()) {
        ++skipped;
        continue;
      }
      Vec y = project_point(f, x);
      e_norm = std::max(e_norm, std::abs((y - f.C).norm() - (x - f.C).norm()));
      e_plane = std::max(e_plane, std::abs((y - f.C).dot(f.omega)));
      e_idem = std::max(e_idem, (project_point(f, y) - y).norm());
      ++tested;
    }
  }
  CircularProjection f0 = make_projection(Vec::Zero(3), vec({0, 0, 1}));
  for (long i = 0; i < per_dim; ++i) {
    Vec x = vec({rng.uni(-2, 2), rng.uni(-2, 2), rng.uni(-2, 2)});
    if (axis_distance(f0, x) < 1e-3 * x.norm()) continue;
    e_coord = std::max(e_coord, (project_coordinate_form(x) - project_point(f0, x)).norm());
  }
  const double tol = 1e-12;
  r.pass = e_norm <= tol && e_plane <= tol && e_idem <= tol && e_coord <= tol;
  r.summary = std::to_string(tested) + " points: |f(x)-C| " + g4(e_norm) + ", screen " + g4(e_plane) + ", f.f " +
              g4(e_idem) + ", coordinate form " + g4(e_coord);
  r.report = {{"points", tested},   {"near_axis_skipped", skipped}, {"norm_error", e_norm}, {"screen_error", e_plane},
              {"idempotence_error", e_idem}, {"coordinate_form_error", e_coord}, {"tolerance", tol}};
  return r;
}

CriterionResult c07_gamma_curvature(const SuiteOptions&) {
  CriterionResult r;
  const int samples = 3600;
  const double step = 2 * std::numbers::pi / samples;
  const std::vector<double> psis = {0.15, 0.3, 0.45, 0.524, 0.6, 0.75, 0.9, 1.05};
  std::vector<GammaPsiCurve> curves;
  Json rows = Json::array();
  bool above_half = true, positive = true, argmin_ok = true;
  double fd_err = 0;
  std::vector<std::string> bad;
  for (double psi : psis) {
    GammaPsiCurve c = gamma_psi_curve(psi, samples);
    for (double t : c.t) fd_err = std::max(fd_err, std::abs(gamma_psi_curvature(psi, t) - gamma_psi_curvature_fd(psi, t)));
    if (psi <= 0.524 + 1e-12 && !(c.min_curvature > 0.5)) {
      above_half = false;
      bad.push_back("psi=" + g4(psi) + " min curvature " + fmt("%.6f", c.min_curvature) + " <= 0.5");
    }
    if (psi <= 0.75 + 1e-12 && !(c.min_curvature > 0)) positive = false;
    if (std::abs(c.argmin_t - std::numbers::pi) > step + 1e-12) argmin_ok = false;
    rows.push_back({{"psi", psi}, {"min_curvature", c.min_curvature}, {"argmin_t", c.argmin_t}});
    curves.push_back(std::move(c));
  }
  // Sign change of the minimum curvature, by bisection.
  auto minc = [&](double psi) { return gamma_psi_curve(psi, samples).min_curvature; };
  double lo = 0.6, hi = 1.05;
  for (int it = 0; it < 40; ++it) {
    double m = 0.5 * (lo + hi);
    (minc(m) > 0 ? lo : hi) = m;
  }
  const double cross = 0.5 * (lo + hi);
  const bool cross_ok = cross >= 0.7 && cross <= 0.8;
  const bool fd_ok = fd_err <= 1e-6;
  r.pass = above_half && positive && argmin_ok && cross_ok && fd_ok;
  r.summary = "min curvature > 1/2 " + std::string(above_half ? "yes" : "NO") + ", positive to 0.75 " +
              (positive ? "yes" : "NO") + ", sign change at psi=" + fmt("%.6f", cross) + ", argmin at pi " +
              (argmin_ok ? "yes" : "NO") + ", closed form vs differences " + g4(fd_err);
  if (!bad.empty()) r.summary += " [" + bad.front() + "]";
  r.report = {{"samples", samples}, {"rows", rows},         {"sign_change_psi", cross},
              {"fd_max_error", fd_err}, {"failures", bad}};
  r.artifacts.emplace_back("gamma_psi.svg", svg_curves(curves));
  return r;
}

CriterionResult c08_lemma3_boundary(const SuiteOptions&) {
  CriterionResult r;
  const double psi = std::numbers::pi / 6;
  CircularProjection f = make_projection(Vec::Zero(3), vec({0, 0, 1}));
  Ball S{vec({0, 2 * std::cos(psi), 2 * std::sin(psi)}), 1.0};
  Lemma3Report L = lemma3_check(f, S, 100);
  r.pass = L.min_profile_curvature >= 0.5 * (1 - 1e-3) && L.enclosing_ball_ok && L.enclosing_checked == 100;
  r.summary = "min profile curvature " + fmt("%.6f", L.min_profile_curvature) + ", enclosing 2r-ball " +
              (L.enclosing_ball_ok ? "ok" : "FAILED") + " at " + std::to_string(L.enclosing_checked) + " points";
  r.report = to_json(L);
  return r;
}

// Balls minus caps whose boundaries pass near the origin; spread > 0 lets some miss it.
std::vector<BodyExpr> helly_family(Rng& rng, int m, double eps, double miss, double reach) {
  std::vector<BodyExpr> out;
  for (int i = 0; i < m; ++i) {
    double r = rng.uni(0.3, 0.45), depth = rng.uni(0.05, 0.15);
    Vec w = rng.unit(2), u = rng.unit(2);
    double dl = rng.uni(-miss, reach);
    if (miss < 0) u = -w;  // common-point families keep the cap away from the origin
    out.push_back(ball_minus_cap(-(r - dl) * w, r, eps / 1.2, depth, u));
  }
  return out;
}

std::vector<Grid> raster_family(const std::vector<BodyExpr>& bodies, double h) {
  std::vector<BBox> boxes;
  for (const auto& b : bodies) boxes.push_back(bounding_box(b));
  Grid fr = frame_for(boxes, h, 2 * h);
  std::vector<Grid> fam;
  for (const auto& b : bodies) fam.push_back(rasterize_in(b, fr.lo, fr.n, h));
  return fam;
}

CriterionResult c09_helly(const SuiteOptions& opt) {
  CriterionResult r;
  Rng rng(sub_seed(opt, 9));
  const double eps = 0.5, epsp = 0.05, h = 0.02, slack = h * std::sqrt(2.0);
  HellyOptions ho;
  ho.workers = opt.workers;
  int accepted = 0, draws = 0;
  double worst = std::numeric_limits<double>::infinity();
  Json rows = Json::array();
  while (accepted < 50 && draws < 500) {
    ++draws;
    const int m = 4 + accepted % 5;
    auto fam = raster_family(helly_family(rng, m, eps, 0.03, 0.06), h);
    HellyReport rep;
    try {
      rep = verify_helly(fam, eps, epsp, ho);
    } catch (const PreconditionError&) {
      continue;
    }
    if (!rep.hypothesis_ok) continue;
    ++accepted;
    worst = std::min(worst, rep.margin);
    rows.push_back(to_json(rep));
  }
  double common_worst = 0;
  Json common = Json::array();
  int common_ok = 0;
  for (int k = 0; k < 10; ++k) {
    auto fam = raster_family(helly_family(rng, 3, eps, -0.05, 0.1), h);
    HellyReport rep = verify_helly(fam, eps, epsp, ho);
    common_worst = std::max(common_worst, rep.max_dist);
    if (rep.max_dist <= epsp + slack) ++common_ok;
    common.push_back(to_json(rep));
  }
  r.pass = accepted == 50 && worst >= -slack && common_ok == 10;
  r.summary = std::to_string(accepted) + " families (" + std::to_string(draws) + " draws), worst margin " + g4(worst) +
              " (limit " + g4(-slack) + "); common-point families max_dist " + g4(common_worst) + " <= " +
              g4(epsp + slack) + " in " + std::to_string(common_ok) + "/10";
  r.report = {{"eps", eps}, {"eps_prime", epsp}, {"h", h}, {"families", rows}, {"common_point_families", common}};
  return r;
}

CriterionResult c10_prop3(const SuiteOptions& opt) {
  CriterionResult r;
  Rng rng(sub_seed(opt, 10));
  const double eps = 0.5, h = 0.01;
  int holds = 0;
  double worst_ratio = 0;
  Json rows = Json::array();
  std::string err;
  for (int k = 0; k < 10; ++k) {
    Vec u = rng.unit(2);
    double depth = rng.uni(0.15, 0.25);
    Grid K = rasterize(ball_minus_cap(Vec::Zero(2), 0.45, eps / 1.2, depth, u), h);
    Grid L = convex_hull_raster(K);
    try {
      Prop3Report p = prop3_check(K, L, eps);
      if (p.conclusion_holds && p.d_K <= 1 / (2 * eps)) ++holds;
      worst_ratio = std::max(worst_ratio, p.max_dist / (p.eps_prime + p.slack));
      Json j = to_json(p);
      j["depth"] = depth;
      rows.push_back(j);
    } catch (const PreconditionError& e) {
      err = e.what();
      rows.push_back({{"depth", depth}, {"error", err}});
    }
  }
  // Negative control: a body in K2 but not K3, with the singular point added.
  const double ec = 0.04, hc = 0.05;
  Grid K = rasterize(gallery("c_body", {{"eps", ec}}), hc);
  const Budget b = stop_first(opt.workers);
  ClassVerdict k2 = check_K2(K, ec, b);
  ClassVerdict k3 = check_K3(K, ec, K3Mode::viaK5, b);
  Grid L = K;
  L.cells[static_cast<size_t>(L.locate(vec({(5 - 1.1 * 1.1) / 2.2, 0, 0})))] = Cell::inside;
  Prop3Options po;
  po.require_class = false;
  Prop3Report pc = prop3_check(K, L, ec, po);
  const bool control = k2.status != Status::violated && k3.status == Status::violated && pc.support_dominated &&
                       pc.d_K <= 1 / (2 * ec) && !pc.conclusion_holds;
  r.pass = holds == 10 && control;
  r.summary = std::to_string(holds) + "/10 bodies within eps d^2/2 + 2h (worst ratio " + g4(worst_ratio) +
              "); control: K2 " + to_string(k2.status) + ", K3 " + to_string(k3.status) + ", distance " +
              g4(pc.max_dist) + " > " + g4(pc.eps_prime + pc.slack) + (control ? " as expected" : " UNEXPECTED");
  if (!err.empty()) r.summary += " [" + err + "]";
  r.report = {{"eps", eps},
              {"h", h},
              {"bodies", rows},
              {"control", {{"eps", ec}, {"h", hc}, {"K2", to_json(k2)}, {"K3_viaK5", to_json(k3)}, {"prop3", to_json(pc)}}}};
  return r;
}

CriterionResult c11_theorem6(const SuiteOptions& opt) {
  CriterionResult r;
  Rng rng(sub_seed(opt, 11));
  const double eps = 0.4;
  Budget b;
  b.workers = opt.workers;
  int found = 0, identical = 0;
  Json rows = Json::array();
  std::string err;
  for (int k = 0; k < 10; ++k) {
    const int n = k < 5 ? 2 : 3;
    const double h = n == 2 ? 0.02 : 0.05;
    Vec u = rng.unit(n);
    double depth = rng.uni(0.2, 0.3);
    BodyExpr bk = ball(Vec::Zero(n), 0.5), bl = ball_minus_cap(Vec::Zero(n), 0.5, eps / 1.2, depth, u);
    if (k % 2) std::swap(bk, bl);
    Grid K = rasterize(bk, h);
    Grid L = rasterize_in(bl, K.lo, K.n, h);
    try {
      Theorem6Result t = theorem6_distinguish(K, L, eps, b);
      Theorem6Result same = theorem6_distinguish(K, K, eps, b);
      if (t.witness_plane && !t.identical) ++found;
      if (same.identical) ++identical;
      Json j = to_json(t);
      j["n"] = n;
      j["h"] = h;
      j["identical_pair_reported_identical"] = same.identical;
      rows.push_back(j);
    } catch (const PreconditionError& e) {
      err = e.what();
      rows.push_back({{"n", n}, {"error", err}});
    }
  }
  r.pass = found == 10 && identical == 10;
  r.summary = "witness planes " + std::to_string(found) + "/10, identical pairs recognized " + std::to_string(identical) + "/10";
  if (!err.empty()) r.summary += " [" + err + "]";
  r.report = {{"eps", eps}, {"pairs", rows}};
  return r;
}

CriterionResult c12_theorem7(const SuiteOptions& opt) {
  CriterionResult r;
  Rng rng(sub_seed(opt, 12));
  const double eps0 = 0.4, rad = 0.5;
  struct Mode {
    const char* name;
    int n;
    Theorem7Mode mode;
    double h;
  };
  const Mode modes[] = {{"translative_n2", 2, Theorem7Mode::translative, 0.01},
                        {"translative_n3", 3, Theorem7Mode::translative, 0.05},
                        {"rotational_n2", 2, Theorem7Mode::rotational, 0.01}};
  Json out;
  bool all = true;
  std::string parts;
  for (const auto& md : modes) {
    int passed = 0;
    double max_slack_ratio = 0, worst = 0;
    Json trials = Json::array();
    for (int t = 0; t < 25; ++t) {
      const int n = md.n;
      Vec c = Vec::Zero(n), w0 = Vec::Zero(n);
      w0[1] = 1;
      // Caps face away from omega0; L is K with its cap turned about the center.
      Vec u = Vec::Zero(n);
      double a = -std::numbers::pi / 2 + rng.uni(-1, 1);
      u[0] = std::cos(a);
      u[1] = std::sin(a);
      if (n == 3) u[2] = rng.uni(-0.25, 0.25);
      u.normalize();
      double depth = rng.uni(0.05, 0.15);
      double th = rng.uni(-0.3, 0.3);
      Vec u2 = u;
      u2[0] = std::cos(th) * u[0] - std::sin(th) * u[1];
      u2[1] = std::sin(th) * u[0] + std::cos(th) * u[1];
      Grid K = rasterize(ball_minus_cap(c, rad, eps0 / 1.2, depth, u), md.h);
      Grid L = rasterize_in(ball_minus_cap(c, rad, eps0 / 1.2, depth, u2), K.lo, K.n, md.h);
      try {
        Theorem7Report rep = theorem7_experiment(K, L, w0, eps0, md.mode);
        bool ok = rep.pass && rep.slack <= 3 * md.h;
        if (ok) ++passed;
        max_slack_ratio = std::max(max_slack_ratio, rep.slack / md.h);
        worst = std::max(worst, rep.global / (rep.bound + rep.slack));
        Json j = to_json(rep);
        j["depth"] = depth;
        j["turn"] = th;
        trials.push_back(j);
        if (t == 0) r.artifacts.emplace_back(std::string("theorem7_") + md.name + ".csv", theorem7_csv(rep));
      } catch (const PreconditionError& e) {
        trials.push_back({{"depth", depth}, {"turn", th}, {"error", e.what()}});
      }
    }
    all = all && passed == 25;
    parts += std::string(parts.empty() ? "" : ", ") + md.name + " " + std::to_string(passed) + "/25";
    out[md.name] = {{"h", md.h}, {"passed", passed}, {"max_slack_over_h", max_slack_ratio},
                    {"max_distance_over_bound", worst}, {"trials", trials}};
  }
  r.pass = all;
  r.summary = parts + " within bound + slack (slack <= 3h)";
  r.report = out;
  r.report["eps0"] = eps0;
  return r;
}

using Fn = CriterionResult (*)(const SuiteOptions&);
struct Entry {
  const char* name;
  Fn fn;
  double max_seconds;  // runtime target, 0 when none
};
const Entry kEntries[kCriteria - 1] = {
    {"hull-thresholds", c01_hull_thresholds, 60},
    {"thin-triangles", c02_thin_triangles, 300},
    {"thin-simplex", c03_thin_simplex, 0},
    {"class-counterexamples", c04_class_counterexamples, 600},
    {"class-equivalences", c05_class_equivalences, 0},
    {"projection-identities", c06_projection_identities, 0},
    {"gamma-curvature", c07_gamma_curvature, 30},
    {"lemma3-boundary", c08_lemma3_boundary, 0},
    {"eps-helly", c09_helly, 600},
    {"prop3", c10_prop3, 0},
    {"theorem6", c11_theorem6, 0},
    {"theorem7", c12_theorem7, 1200},
};

double now() { return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch()).count(); }

}  // namespace

const char* criterion_name(int id) {
  if (id == kCriteria) return "determinism";
  if (id < 1 || id > kCriteria) throw std::domain_error("unknown criterion " + std::to_string(id));
  return kEntries[id - 1].name;
}

std::vector<int> parse_suite(const std::string& spec) {
  std::vector<int> ids;
  if (spec == "all") {
    for (int i = 1; i <= kCriteria; ++i) ids.push_back(i);
    return ids;
  }
  std::stringstream ss(spec);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    int id = 0;
    for (int i = 1; i <= kCriteria; ++i)
      if (tok == criterion_name(i)) id = i;
    if (id == 0) {
      size_t used = 0;
      try {
        id = std::stoi(tok, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != tok.size() || id < 1 || id > kCriteria) throw std::domain_error("unknown suite '" + tok + "'");
    }
    if (std::find(ids.begin(), ids.end(), id) == ids.end()) ids.push_back(id);
  }
  if (ids.empty()) throw std::domain_error("empty suite list");
  std::sort(ids.begin(), ids.end());
  return ids;
}

CriterionResult run_criterion(int id, const SuiteOptions& opt) {
  if (id < 1 || id >= kCriteria) throw std::domain_error("run_criterion: id must be in 1..12");
  const Entry& e = kEntries[id - 1];
  double t0 = now();
  CriterionResult r = e.fn(opt);
  r.seconds = now() - t0;
  r.id = id;
  r.name = e.name;
  r.report = report(std::string("criterion.") + e.name, r.report);
  r.report["seed"] = opt.seed;
  r.report["pass"] = r.pass;
  if (e.max_seconds > 0 && r.seconds > e.max_seconds) {
    r.pass = false;
    r.summary += " [runtime " + g4(r.seconds) + " s over " + g4(e.max_seconds) + " s]";
  }
  return r;
}

CriterionResult run_determinism(const std::vector<CriterionResult>& first, const SuiteOptions& opt) {
  double t0 = now();
  CriterionResult r;
  r.id = kCriteria;
  r.name = criterion_name(kCriteria);
  SuiteOptions again = opt;
  const int hw = static_cast<int>(std::max(2u, std::thread::hardware_concurrency()));
  again.workers = opt.workers == 1 ? hw : 1;
  int files = 0, same = 0;
  std::vector<std::string> diffs;
  for (const auto& a : first) {
    if (a.id == kCriteria) continue;
    CriterionResult b = run_criterion(a.id, again);
    ++files;
    if (dump(a.report) == dump(b.report)) ++same;
    else diffs.push_back(std::string(a.name) + ".json");
    for (const auto& [name, bytes] : a.artifacts) {
      ++files;
      auto it = std::find_if(b.artifacts.begin(), b.artifacts.end(), [&](const auto& p) { return p.first == name; });
      if (it != b.artifacts.end() && it->second == bytes) ++same;
      else diffs.push_back(name);
    }
  }
  r.pass = files > 0 && same == files;
  r.summary = std::to_string(same) + "/" + std::to_string(files) + " reports and artifacts byte-identical on rerun (workers " +
              std::to_string(opt.workers) + " then " + std::to_string(again.workers) + ")";
  r.report = report("criterion.determinism", {{"files", files}, {"identical", same}, {"differing", diffs}});
  r.report["seed"] = opt.seed;
  r.report["pass"] = r.pass;
  r.seconds = now() - t0;
  return r;
}

std::vector<CriterionResult> run_suites(const std::vector<int>& ids, const SuiteOptions& opt,
                                        const std::function<void(const CriterionResult&)>& on_done) {
  std::vector<CriterionResult> out;
  const bool det = std::find(ids.begin(), ids.end(), kCriteria) != ids.end();
  std::vector<CriterionResult> basis;
  for (int id : ids) {
    if (id == kCriteria) continue;
    CriterionResult r = run_criterion(id, opt);
    if (on_done) on_done(r);
    basis.push_back(r);
    out.push_back(std::move(r));
  }
  if (det) {
    if (basis.empty())
      for (int id = 1; id < kCriteria; ++id) basis.push_back(run_criterion(id, opt));
    CriterionResult r = run_determinism(basis, opt);
    if (on_done) on_done(r);
    out.push_back(std::move(r));
  }
  return out;
}

std::string result_line(const CriterionResult& r) {
  char head[96];
  std::snprintf(head, sizeof head, "[%s] %2d %-22s ", r.pass ? "PASS" : "FAIL", r.id, r.name.c_str());
  return head + r.summary + " (" + fmt("%.1f", r.seconds) + " s)";
}

}  // namespace epsc
