#include "epsc/cli.hpp"

#include "epsc/suites.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <sstream>

namespace epsc {

namespace {

struct Config {
  double eps = 1.0;
  double eps0 = 0.0;
  double eps_prime = 0.0;
  double h = 0.02;
  long budget = 0;
  uint64_t seed = 7;
  int workers = 1;
  std::string svg, csv, report_path, points, other_points, other_body, suite = "all", out_dir;
  std::vector<std::string> bodies;
  std::string cls = "K1", kind = "plain", mode = "translative", name;
  std::string center, omega;
  std::vector<std::string> params;
};

Vec parse_vec(const std::string& s, const char* flag) {
  std::vector<double> xs;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    size_t used = 0;
    double v = 0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0) throw CLI::ValidationError(flag, "expected comma separated numbers, got '" + s + "'");
    xs.push_back(v);
  }
  Vec v(static_cast<Eigen::Index>(xs.size()));
  for (size_t i = 0; i < xs.size(); ++i) v[static_cast<Eigen::Index>(i)] = xs[i];
  return v;
}

Budget budget_of(const Config& c) {
  Budget b;
  b.workers = c.workers;
  b.max_test_points = c.budget;
  return b;
}

void emit_report(const Config& c, const Json& j, std::ostream& out) {
  if (c.report_path.empty()) out << dump(j);
  else write_file_atomic(c.report_path, dump(j));
}

void emit_optional(const std::string& path, const std::string& bytes) {
  if (!path.empty()) write_file_atomic(path, bytes);
}

Grid body_grid(const std::string& path, double h) { return rasterize(load_body(path), h); }

int cmd_hull(const Config& c, std::ostream& out) {
  if (c.points.empty()) throw CLI::RequiredError("--points");
  Points W = load_points_csv(c.points);
  Json j = {{"eps", c.eps}, {"points", W.cols()}};
  if (W.rows() == 2) {
    EpsHull2D H = eps_hull_wrap2d(W, c.eps);
    j["hull"] = to_json(H);
    emit_optional(c.svg, svg_hull(H, W));
  } else if (!c.svg.empty()) {
    throw std::domain_error("SVG output needs 2-D points");
  }
  if (!c.csv.empty() || W.rows() != 2) {
    BBox bb{W.rowwise().minCoeff(), W.rowwise().maxCoeff()};
    Grid g = eps_hull_oracle_on(W, c.eps, frame_for({bb}, c.h, 4 * c.h), c.workers);
    j["oracle"] = {{"h", c.h}, {"solid_cells", g.size() - g.count(Cell::outside)}, {"components", solid_components(g)}};
    emit_optional(c.csv, grid_csv(g));
  }
  emit_report(c, report("hull", j), out);
  return kExitOk;
}

int cmd_classify(const Config& c, std::ostream& out) {
  if (c.bodies.empty()) throw CLI::RequiredError("--body");
  Grid g = body_grid(c.bodies.front(), c.h);
  Budget b = budget_of(c);
  ClassVerdict v;
  if (c.cls == "K1") v = check_K1(g, c.eps, b);
  else if (c.cls == "K2") v = check_K2(g, c.eps, b);
  else if (c.cls == "K3") v = check_K3(g, c.eps, K3Mode::viaK5, b);
  else if (c.cls == "K3-viaK4") v = check_K3(g, c.eps, K3Mode::viaK4, b);
  else if (c.cls == "visibility") v = check_visibility(g, c.eps, 64, b);
  else throw CLI::ValidationError("--class", "expected K1, K2, K3, K3-viaK4 or visibility");
  emit_report(c, report("classify", {{"eps", c.eps}, {"h", c.h}, {"verdict", to_json(v)}}), out);
  if (g.dim == 2) emit_optional(c.svg, svg_raster(g));
  emit_optional(c.csv, grid_csv(g));
  return kExitOk;
}

CircularProjection projection_of(const Config& c, int n) {
  Vec C = c.center.empty() ? Vec(Vec::Zero(n)) : parse_vec(c.center, "--center");
  Vec w = Vec::Zero(n);
  w[n - 1] = 1;
  if (!c.omega.empty()) w = parse_vec(c.omega, "--omega");
  if (C.size() != n || w.size() != n) throw std::domain_error("--center and --omega must have the input dimension");
  return make_projection(C, w);
}

int cmd_project(const Config& c, std::ostream& out) {
  Json j;
  if (!c.points.empty()) {
    Points P = load_points_csv(c.points);
    CircularProjection f = projection_of(c, static_cast<int>(P.rows()));
    Points Y(P.rows(), P.cols());
    for (Eigen::Index i = 0; i < P.cols(); ++i) Y.col(i) = project_point(f, P.col(i));
    j = {{"C", to_json(f.C)}, {"omega", to_json(f.omega)}, {"images", to_json(Y)}};
    emit_optional(c.csv, points_csv(Y));
  } else if (!c.bodies.empty()) {
    Grid g = body_grid(c.bodies.front(), c.h);
    CircularProjection f = projection_of(c, g.dim);
    ScreenImage s = project_body(f, g);
    j = {{"C", to_json(f.C)},
         {"omega", to_json(f.omega)},
         {"h", c.h},
         {"screen_cells", s.raster.size() - s.raster.count(Cell::outside)},
         {"screen_metrics", to_json(grid_metrics(s.raster))}};
    if (s.raster.dim == 2) emit_optional(c.svg, svg_raster(s.raster));
    emit_optional(c.csv, points_csv(s.points));
  } else {
    throw CLI::RequiredError("--points or --body");
  }
  emit_report(c, report("project", j), out);
  return kExitOk;
}

DistanceKind distance_kind(const std::string& s) {
  for (auto k : {DistanceKind::plain, DistanceKind::translative, DistanceKind::rotational, DistanceKind::homothetic,
                 DistanceKind::homothety_rotational})
    if (s == to_string(k)) return k;
  throw CLI::ValidationError("--kind", "unknown distance kind '" + s + "'");
}

int cmd_distance(const Config& c, std::ostream& out) {
  if (c.bodies.size() != 2) throw CLI::ValidationError("--body", "distance takes two --body files (K then L)");
  Grid K = body_grid(c.bodies[0], c.h);
  BodyExpr lb = load_body(c.bodies[1]);
  if (lb.dim() != K.dim) throw std::domain_error("K and L must have the same dimension");
  Grid L = rasterize_in(lb, K.lo, K.n, c.h);
  if (c.eps0 > 0) {
    // Stability experiment for planes near omega0.
    Vec w = Vec::Zero(K.dim);
    w[K.dim - 1] = 1;
    if (!c.omega.empty()) w = parse_vec(c.omega, "--omega");
    Theorem7Mode m = c.mode == "rotational" ? Theorem7Mode::rotational : Theorem7Mode::translative;
    if (c.mode != "rotational" && c.mode != "translative")
      throw CLI::ValidationError("--mode", "expected translative or rotational");
    Theorem7Report r = theorem7_experiment(K, L, w, c.eps0, m);
    emit_report(c, report("theorem7", to_json(r)), out);
    emit_optional(c.csv, theorem7_csv(r));
    return kExitOk;
  }
  DistanceConfig dc;
  dc.seed = c.seed;
  DistanceReport r = special_distance(solid_points(K), solid_points(L), distance_kind(c.kind), dc);
  emit_report(c, report("distance", {{"h", c.h}, {"result", to_json(r)}}), out);
  return kExitOk;
}

int cmd_helly(const Config& c, std::ostream& out) {
  if (c.bodies.empty()) throw CLI::RequiredError("--body");
  std::vector<BodyExpr> bodies;
  std::vector<BBox> boxes;
  for (const auto& p : c.bodies) {
    bodies.push_back(load_body(p));
    boxes.push_back(bounding_box(bodies.back()));
  }
  Grid fr = frame_for(boxes, c.h, 2 * c.h);
  std::vector<Grid> fam;
  for (const auto& b : bodies) fam.push_back(rasterize_in(b, fr.lo, fr.n, c.h));
  HellyOptions ho;
  ho.workers = c.workers;
  HellyReport r = verify_helly(fam, c.eps, c.eps_prime, ho);
  emit_report(c, report("helly", to_json(r)), out);
  return kExitOk;
}

int cmd_verify(const Config& c, std::ostream& out) {
  SuiteOptions opt;
  opt.seed = c.seed;
  opt.workers = c.workers;
  Json lines = Json::array();
  bool all = true;
  auto results = run_suites(parse_suite(c.suite), opt, [&](const CriterionResult& r) {
    out << result_line(r) << std::endl;
    all = all && r.pass;
    if (!c.out_dir.empty()) {
      std::filesystem::create_directories(c.out_dir);
      write_file_atomic(c.out_dir + "/" + r.name + ".json", dump(r.report));
      for (const auto& [name, bytes] : r.artifacts) write_file_atomic(c.out_dir + "/" + name, bytes);
    }
  });
  for (const auto& r : results) lines.push_back({{"id", r.id}, {"name", r.name}, {"pass", r.pass}});
  if (!c.report_path.empty()) write_file_atomic(c.report_path, dump(report("verify", {{"seed", c.seed}, {"criteria", lines}})));
  return all ? kExitOk : kExitInternal;
}

int cmd_gallery(const Config& c, std::ostream& out) {
  if (c.name.empty()) {
    for (const auto& n : gallery_names()) out << n << "\n";
    return kExitOk;
  }
  Params p;
  for (const auto& kv : c.params) {
    auto eq = kv.find('=');
    if (eq == std::string::npos) throw CLI::ValidationError("--param", "expected key=value, got '" + kv + "'");
    p[kv.substr(0, eq)] = std::stod(kv.substr(eq + 1));
  }
  BodyExpr b = gallery(c.name, p);
  validate(b);
  Json j = {{"gallery", c.name}, {"params", Json::object()}};
  for (const auto& [k, v] : p) j["params"][k] = v;
  emit_report(c, j, out);
  if (b.dim() == 2) emit_optional(c.svg, svg_raster(rasterize(b, c.h)));
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"epsconvex: eps-convex bodies, hulls, Helly bounds and circular projections"};
  app.require_subcommand(1);
  Config c;

  auto common = [&](CLI::App* s) {
    s->add_option("--eps", c.eps, "eps > 0 (balls of radius 1/eps)")->check(CLI::PositiveNumber);
    s->add_option("--grid-h", c.h, "grid step")->check(CLI::PositiveNumber);
    s->add_option("--workers", c.workers, "worker threads")->check(CLI::Range(1, 256));
    s->add_option("--seed", c.seed, "random seed");
    s->add_option("--report", c.report_path, "structured report path (stdout when omitted)");
  };
  auto* hull = app.add_subcommand("hull", "eps-convex hull of a point set");
  common(hull);
  hull->add_option("--points", c.points, "CSV, one point per row");
  hull->add_option("--svg", c.svg, "SVG of the 2-D hull");
  hull->add_option("--csv", c.csv, "solid cells of the rasterized hull");

  auto* classify = app.add_subcommand("classify", "test a body against a class");
  common(classify);
  classify->add_option("--body", c.bodies, "body description file")->expected(1);
  classify->add_option("--class", c.cls, "K1, K2, K3, K3-viaK4 or visibility");
  classify->add_option("--budget", c.budget, "max tested points (0 = all)")->check(CLI::NonNegativeNumber);
  classify->add_option("--svg", c.svg, "SVG of the 2-D raster");
  classify->add_option("--csv", c.csv, "solid cells");

  auto* project = app.add_subcommand("project", "circular projection of points or a body");
  common(project);
  project->add_option("--points", c.points, "CSV, one point per row");
  project->add_option("--body", c.bodies, "body description file")->expected(1);
  project->add_option("--center", c.center, "axis point C, comma separated (default origin)");
  project->add_option("--omega", c.omega, "axis direction, comma separated (default last axis)");
  project->add_option("--svg", c.svg, "SVG of the screen raster (3-D bodies)");
  project->add_option("--csv", c.csv, "projected points");

  auto* distance = app.add_subcommand("distance", "special distances, or the stability experiment with --eps0");
  common(distance);
  distance->add_option("--body", c.bodies, "K then L")->expected(2);
  distance->add_option("--kind", c.kind, "plain, translative, rotational, homothetic, homothety_rotational");
  distance->add_option("--eps0", c.eps0, "run the plane-family experiment at this eps0")->check(CLI::PositiveNumber);
  distance->add_option("--mode", c.mode, "translative or rotational (with --eps0)");
  distance->add_option("--omega", c.omega, "omega0, comma separated (with --eps0)");
  distance->add_option("--csv", c.csv, "per-plane rows (with --eps0)");

  auto* helly = app.add_subcommand("helly", "check the eps-Helly bound on a family");
  common(helly);
  helly->add_option("--body", c.bodies, "body description files")->take_all();
  helly->add_option("--eps-prime", c.eps_prime, "hypothesis value eps'")->required()->check(CLI::NonNegativeNumber);

  auto* verify = app.add_subcommand("verify", "run acceptance suites");
  verify->add_option("--suite", c.suite, "all, ids or names, comma separated");
  verify->add_option("--seed", c.seed, "random seed");
  verify->add_option("--workers", c.workers, "worker threads")->check(CLI::Range(1, 256));
  verify->add_option("--report", c.report_path, "summary report path");
  verify->add_option("--out", c.out_dir, "directory for per-criterion reports and artifacts");

  auto* gal = app.add_subcommand("gallery", "list gallery bodies, or emit one as a body file");
  gal->add_option("name", c.name, "gallery body");
  gal->add_option("--param", c.params, "key=value overrides")->take_all();
  gal->add_option("--report", c.report_path, "body file path (stdout when omitted)");
  gal->add_option("--svg", c.svg, "SVG of a 2-D body");
  gal->add_option("--grid-h", c.h, "grid step for --svg")->check(CLI::PositiveNumber);

  std::vector<std::string> store{"epsconvex"};
  store.insert(store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : store) argv.push_back(s.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return kExitUsage;
  }

  try {
    if (hull->parsed()) return cmd_hull(c, out);
    if (classify->parsed()) return cmd_classify(c, out);
    if (project->parsed()) return cmd_project(c, out);
    if (distance->parsed()) return cmd_distance(c, out);
    if (helly->parsed()) return cmd_helly(c, out);
    if (verify->parsed()) return cmd_verify(c, out);
    return cmd_gallery(c, out);
  } catch (const CLI::Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const PreconditionError& e) {
    err << "precondition failed: " << e.what() << "\n";
    return kExitPrecondition;
  } catch (const AxisError& e) {
    err << "precondition failed: " << e.what() << "\n";
    return kExitPrecondition;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInternal;
  }
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace epsc
