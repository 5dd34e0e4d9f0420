#include "epsc/io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

namespace epsc {

void write_file_atomic(const std::string& path, const std::string& bytes) {
  namespace fs = std::filesystem;
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp + " for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) throw std::runtime_error("write failed: " + tmp);
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw std::runtime_error("cannot rename " + tmp + " to " + path);
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------------------
// Bodies

namespace {

Vec vec_from(const Json& j, const char* what) {
  if (!j.is_array() || j.empty()) throw std::domain_error(std::string("body file: '") + what + "' must be a number array");
  Vec v(static_cast<long>(j.size()));
  for (size_t i = 0; i < j.size(); ++i) v[static_cast<long>(i)] = j[i].get<double>();
  return v;
}

// Array of points, one per entry, returned as columns.
Eigen::MatrixXd columns_from(const Json& j, const char* what) {
  if (!j.is_array() || j.empty()) throw std::domain_error(std::string("body file: '") + what + "' must be an array of points");
  const long n = static_cast<long>(j[0].size());
  Eigen::MatrixXd M(n, static_cast<long>(j.size()));
  for (size_t c = 0; c < j.size(); ++c) {
    Vec v = vec_from(j[c], what);
    if (v.size() != n) throw std::domain_error(std::string("body file: ragged '") + what + "'");
    M.col(static_cast<long>(c)) = v;
  }
  return M;
}

Json columns_json(const Eigen::MatrixXd& M) {
  Json a = Json::array();
  for (long c = 0; c < M.cols(); ++c) a.push_back(to_json(Vec(M.col(c))));
  return a;
}

const Json& field(const Json& j, const char* key) {
  if (!j.contains(key)) throw std::domain_error(std::string("body file: missing '") + key + "'");
  return j.at(key);
}

Json prim_json(const Primitive& p) {
  return std::visit(
      [](const auto& q) -> Json {
        using T = std::decay_t<decltype(q)>;
        Json j;
        if constexpr (std::is_same_v<T, BallPrim>) {
          j["type"] = "ball";
          j["center"] = to_json(q.center);
          j["radius"] = q.radius;
        } else if constexpr (std::is_same_v<T, BoxPrim>) {
          j["type"] = "box";
          j["lo"] = to_json(q.lo);
          j["hi"] = to_json(q.hi);
        } else if constexpr (std::is_same_v<T, HalfspacePrim>) {
          j["type"] = "halfspace";
          j["normal"] = to_json(q.normal);
          j["offset"] = q.offset;
        } else if constexpr (std::is_same_v<T, CylinderPrim>) {
          j["type"] = "cylinder";
          j["base"] = to_json(q.base);
          j["axes"] = columns_json(q.axes);
          j["radius"] = q.radius;
        } else if constexpr (std::is_same_v<T, SimplexPrim>) {
          j["type"] = "simplex";
          j["vertices"] = columns_json(q.vertices);
        } else if constexpr (std::is_same_v<T, LpBallPrim>) {
          j["type"] = "lp_ball";
          j["center"] = to_json(q.center);
          j["semiaxes"] = to_json(q.semiaxes);
          j["p"] = q.p;
        } else {
          j["type"] = "cos_graph";
          j["dim"] = q.dim;
          j["axis"] = q.axis;
          j["arg"] = q.arg;
          j["amp"] = q.amp;
          j["freq"] = q.freq;
          j["side"] = q.side;
        }
        return j;
      },
      p);
}

Primitive prim_from(const Json& j) {
  const std::string t = field(j, "type").get<std::string>();
  if (t == "ball") return BallPrim{vec_from(field(j, "center"), "center"), field(j, "radius").get<double>()};
  if (t == "box") return BoxPrim{vec_from(field(j, "lo"), "lo"), vec_from(field(j, "hi"), "hi")};
  if (t == "halfspace") return HalfspacePrim{vec_from(field(j, "normal"), "normal"), field(j, "offset").get<double>()};
  if (t == "cylinder")
    return CylinderPrim{vec_from(field(j, "base"), "base"), columns_from(field(j, "axes"), "axes"),
                        field(j, "radius").get<double>()};
  if (t == "simplex") return SimplexPrim{columns_from(field(j, "vertices"), "vertices")};
  if (t == "lp_ball")
    return LpBallPrim{vec_from(field(j, "center"), "center"), vec_from(field(j, "semiaxes"), "semiaxes"),
                      field(j, "p").get<double>()};
  if (t == "cos_graph") {
    CosGraphPrim c;
    c.dim = j.value("dim", c.dim);
    c.axis = j.value("axis", c.axis);
    c.arg = j.value("arg", c.arg);
    c.amp = j.value("amp", c.amp);
    c.freq = j.value("freq", c.freq);
    c.side = j.value("side", c.side);
    return c;
  }
  throw std::domain_error("body file: unknown primitive type '" + t + "'");
}

}  // namespace

Json body_to_json(const BodyExpr& b) {
  Json j;
  switch (b.op) {
    case BodyExpr::Op::leaf:
      j["op"] = "leaf";
      j["prim"] = prim_json(b.prim);
      return j;
    case BodyExpr::Op::unite: j["op"] = "union"; break;
    case BodyExpr::Op::intersect: j["op"] = "intersect"; break;
    case BodyExpr::Op::subtract: j["op"] = "subtract"; break;
  }
  j["kids"] = Json::array();
  for (const auto& k : b.kids) j["kids"].push_back(body_to_json(k));
  return j;
}

BodyExpr body_from_json(const Json& j) {
  if (!j.is_object()) throw std::domain_error("body file: expected an object");
  if (j.contains("gallery")) {
    Params p;
    if (j.contains("params"))
      for (const auto& [k, v] : j.at("params").items()) p[k] = v.get<double>();
    return gallery(j.at("gallery").get<std::string>(), p);
  }
  const std::string op = j.value("op", std::string("leaf"));
  if (op == "leaf") {
    BodyExpr b = leaf(prim_from(field(j, "prim")));
    validate(b);
    return b;
  }
  std::vector<BodyExpr> kids;
  for (const auto& k : field(j, "kids")) kids.push_back(body_from_json(k));
  BodyExpr b;
  if (op == "union") b = unite(std::move(kids));
  else if (op == "intersect") b = intersect(std::move(kids));
  else if (op == "subtract") {
    if (kids.size() != 2) throw std::domain_error("body file: subtract takes two kids");
    b = subtract(std::move(kids[0]), std::move(kids[1]));
  } else {
    throw std::domain_error("body file: unknown op '" + op + "'");
  }
  validate(b);
  return b;
}

BodyExpr load_body(const std::string& path) {
  Json j;
  try {
    j = Json::parse(read_file(path));
  } catch (const Json::parse_error& e) {
    throw std::domain_error(path + ": " + e.what());
  }
  try {
    return body_from_json(j);
  } catch (const Json::exception& e) {
    throw std::domain_error(path + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// CSV

Points parse_points_csv(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    size_t first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    std::vector<double> row;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) {
      size_t used = 0;
      double v;
      try {
        v = std::stod(cell, &used);
      } catch (const std::exception&) {
        throw std::domain_error("points csv line " + std::to_string(lineno) + ": not a number: '" + cell + "'");
      }
      if (cell.find_first_not_of(" \t", used) != std::string::npos)
        throw std::domain_error("points csv line " + std::to_string(lineno) + ": trailing text in '" + cell + "'");
      row.push_back(v);
    }
    if (!rows.empty() && row.size() != rows[0].size())
      throw std::domain_error("points csv line " + std::to_string(lineno) + ": expected " +
                              std::to_string(rows[0].size()) + " coordinates");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::domain_error("points csv: no points");
  return from_rows(rows);
}

Points load_points_csv(const std::string& path) {
  try {
    return parse_points_csv(read_file(path));
  } catch (const std::domain_error& e) {
    throw std::domain_error(path + ": " + e.what());
  }
}

namespace {

std::string fmt_full(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

std::string points_csv(const Points& P) {
  std::string s;
  for (long c = 0; c < P.cols(); ++c) {
    for (long r = 0; r < P.rows(); ++r) {
      if (r) s += ',';
      s += fmt_full(P(r, c));
    }
    s += '\n';
  }
  return s;
}

std::string grid_csv(const Grid& g) {
  std::string s = "i,j,k,cell\n";
  for (size_t i = 0; i < g.size(); ++i) {
    if (!g.solid(i)) continue;
    auto c = g.coords(i);
    s += std::to_string(c[0]) + ',' + std::to_string(c[1]) + ',' + std::to_string(c[2]) + ',' +
         (g.cells[i] == Cell::inside ? "inside" : "boundary") + '\n';
  }
  return s;
}

// ---------------------------------------------------------------------------
// Reports

Json num(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

Json to_json(const Vec& v) {
  Json a = Json::array();
  for (long i = 0; i < v.size(); ++i) a.push_back(num(v[i]));
  return a;
}

Json to_json(const Points& P) {
  Json a = Json::array();
  for (long c = 0; c < P.cols(); ++c) a.push_back(to_json(Vec(P.col(c))));
  return a;
}

Json to_json(const ClassVerdict& v) {
  Json j;
  j["class"] = v.cls;
  j["status"] = to_string(v.status);
  j["witness_point"] = v.witness_point ? to_json(*v.witness_point) : Json();
  if (v.witness_ball) j["witness_ball"] = {{"center", to_json(v.witness_ball->center)}, {"radius", num(v.witness_ball->radius)}};
  else j["witness_ball"] = nullptr;
  if (v.witness_axes.size()) j["witness_axes"] = to_json(Points(v.witness_axes));
  j["witness_rho"] = num(v.witness_rho);
  j["witness_deficit"] = num(v.witness_deficit);
  j["budget"] = {{"tested_points", v.tested_points},   {"violations", v.violations},
                 {"unknown_points", v.unknown_points}, {"candidates", v.candidates},
                 {"orientations", v.orientations},     {"subsampled", v.subsampled}};
  j["tolerances"] = {{"tol", num(v.tol)}, {"margin", num(v.margin)}};
  return j;
}

Json to_json(const EpsHull2D& H) {
  Json j;
  j["eps"] = num(H.eps);
  j["components"] = Json::array();
  for (const auto& c : H.components) {
    Json cj;
    cj["vertices"] = to_json(c.vertices);
    cj["arcs"] = Json::array();
    for (const auto& a : c.arcs)
      cj["arcs"].push_back({{"center", to_json(a.center)},
                            {"radius", num(a.radius)},
                            {"start_angle", num(a.start_angle)},
                            {"end_angle", num(a.end_angle)},
                            {"clockwise", a.clockwise}});
    j["components"].push_back(cj);
  }
  j["isolated_points"] = to_json(H.isolated_points);
  return j;
}

Json to_json(const HellyReport& r) {
  Json j;
  j["n"] = r.n;
  j["m"] = r.m;
  j["hypothesis_ok"] = r.hypothesis_ok;
  j["eps_prime"] = num(r.eps_prime);
  j["eps_prime_measured"] = num(r.eps_prime_measured);
  j["witness"] = to_json(r.witness);
  j["max_dist"] = num(r.max_dist);
  j["bound"] = num(r.bound);
  j["margin"] = num(r.margin);
  j["diameter"] = num(r.diameter);
  j["slack"] = num(r.slack);
  return j;
}

Json to_json(const GammaPsiCurve& c) {
  Json j;
  j["psi"] = num(c.psi);
  j["samples"] = static_cast<long>(c.t.size());
  j["min_curvature"] = num(c.min_curvature);
  j["argmin_t"] = num(c.argmin_t);
  return j;
}

Json to_json(const Lemma3Report& r) {
  Json j;
  j["lambda"] = num(r.lambda);
  j["psi"] = num(r.psi);
  j["min_profile_curvature"] = num(r.min_profile_curvature);
  j["curvature_bound"] = num(r.curvature_bound);
  j["profile_residual"] = num(r.profile_residual);
  j["enclosing_ball_ok"] = r.enclosing_ball_ok;
  j["enclosing_checked"] = r.enclosing_checked;
  return j;
}

Json to_json(const DistanceReport& r) {
  Json j;
  j["kind"] = to_string(r.kind);
  j["value"] = num(r.value);
  j["translation"] = to_json(r.translation);
  j["rotation"] = to_json(r.rotation);
  j["lambda"] = num(r.lambda);
  j["center"] = to_json(r.center);
  j["iterations"] = r.iterations;
  j["converged"] = r.converged;
  return j;
}

Json to_json(const Theorem6Result& r) {
  Json j;
  j["identical"] = r.identical;
  if (r.witness_plane) j["witness_plane"] = {{"C", to_json(r.witness_plane->C)}, {"omega", to_json(r.witness_plane->omega)}};
  else j["witness_plane"] = nullptr;
  j["interior_point"] = to_json(r.interior_point);
  j["image_gap"] = num(r.image_gap);
  j["swapped"] = r.swapped;
  return j;
}

Json to_json(const Theorem7Report& r) {
  Json j;
  j["mode"] = r.mode == Theorem7Mode::translative ? "translative" : "rotational";
  j["omega0"] = to_json(r.omega0);
  j["A"] = to_json(r.A);
  j["C"] = to_json(r.C);
  j["eps0"] = num(r.eps0);
  j["R_support"] = num(r.R_support);
  j["r_support"] = num(r.r_support);
  j["planes"] = Json::array();
  for (const auto& p : r.planes)
    j["planes"].push_back({{"C", to_json(p.plane.C)},
                           {"omega", to_json(p.plane.omega)},
                           {"deviation", num(p.deviation)},
                           {"plain", num(p.plain)}});
  j["eps"] = num(r.eps);
  j["global_plain"] = num(r.global_plain);
  j["global"] = num(r.global);
  j["bound"] = num(r.bound);
  j["slack"] = num(r.slack);
  j["projection_dominates"] = r.projection_dominates;
  j["pass"] = r.pass;
  return j;
}

Json to_json(const Prop3Report& r) {
  Json j;
  j["support_dominated"] = r.support_dominated;
  j["support_excess"] = num(r.support_excess);
  j["d_K"] = num(r.d_K);
  j["eps_prime"] = num(r.eps_prime);
  j["max_dist"] = num(r.max_dist);
  j["slack"] = num(r.slack);
  j["conclusion_holds"] = r.conclusion_holds;
  return j;
}

Json to_json(const GridMetrics& m) {
  Json j;
  j["diameter"] = num(m.diameter);
  j["diameter_err"] = num(m.diameter_err);
  j["boundary_components"] = m.boundary_components;
  j["connected_components"] = m.connected_components;
  return j;
}

Json report(const std::string& kind, const Json& payload) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = kind;
  for (const auto& [k, v] : payload.items()) j[k] = v;
  return j;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

std::string theorem7_csv(const Theorem7Report& r) {
  std::string s = "plane";
  const long n = r.omega0.size();
  for (long i = 0; i < n; ++i) s += ",C" + std::to_string(i);
  for (long i = 0; i < n; ++i) s += ",omega" + std::to_string(i);
  s += ",deviation,plain,bound,slack\n";
  for (size_t k = 0; k < r.planes.size(); ++k) {
    const auto& p = r.planes[k];
    s += std::to_string(k);
    for (long i = 0; i < n; ++i) s += ',' + fmt_full(p.plane.C[i]);
    for (long i = 0; i < n; ++i) s += ',' + fmt_full(p.plane.omega[i]);
    s += ',' + fmt_full(p.deviation) + ',' + fmt_full(p.plain) + ',' + fmt_full(r.bound) + ',' + fmt_full(r.slack) + '\n';
  }
  return s;
}

// ---------------------------------------------------------------------------
// SVG

namespace {

std::string f6(double x) {
  if (std::abs(x) < 5e-7) x = 0;  // no "-0.000000"
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6f", x);
  return buf;
}

struct Canvas {
  double x0, y0, w, h;  // data box
  double px_w, px_h;
};

Canvas canvas_for(double xlo, double ylo, double xhi, double yhi, const SvgStyle& s) {
  double w = xhi - xlo, h = yhi - ylo;
  double ext = std::max({w, h, 1e-9});
  double m = s.margin * ext;
  Canvas c{xlo - m, ylo - m, w + 2 * m, h + 2 * m, s.width, 0};
  if (!(c.w > 0)) c.w = 1;
  if (!(c.h > 0)) c.h = 1;
  c.px_h = s.width * c.h / c.w;
  return c;
}

// Data coordinates inside a y-flipped group, so arc radii stay in data units.
std::string open_svg(const Canvas& c) {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + f6(c.px_w) + "\" height=\"" + f6(c.px_h) +
         "\" viewBox=\"" + f6(c.x0) + " " + f6(-(c.y0 + c.h)) + " " + f6(c.w) + " " + f6(c.h) +
         "\">\n<g transform=\"scale(1,-1)\">\n";
}

std::string close_svg() { return "</g>\n</svg>\n"; }

std::string stroke_attrs(const std::string& color, double width) {
  return "stroke=\"" + color + "\" stroke-width=\"" + f6(width) + "\" vector-effect=\"non-scaling-stroke\"";
}

void require_planar(long rows, const char* what) {
  if (rows != 2) throw std::domain_error(std::string(what) + ": SVG output needs a 2-D artifact");
}

}  // namespace

std::string svg_hull(const EpsHull2D& H, const Points& W, const SvgStyle& s) {
  require_planar(W.rows(), "svg_hull");
  double xlo = W.row(0).minCoeff(), xhi = W.row(0).maxCoeff();
  double ylo = W.row(1).minCoeff(), yhi = W.row(1).maxCoeff();
  Canvas c = canvas_for(xlo, ylo, xhi, yhi, s);
  std::string out = open_svg(c);
  for (const auto& comp : H.components) {
    const long k = comp.vertices.cols();
    if (k == 0) continue;
    std::string d = "M " + f6(comp.vertices(0, 0)) + " " + f6(comp.vertices(1, 0));
    for (long i = 0; i < k; ++i) {
      const Vec q = comp.vertices.col((i + 1) % k);
      if (static_cast<size_t>(i) < comp.arcs.size()) {
        const Arc& a = comp.arcs[static_cast<size_t>(i)];
        double span = a.clockwise ? a.start_angle - a.end_angle : a.end_angle - a.start_angle;
        span = std::fmod(span + 4 * std::numbers::pi, 2 * std::numbers::pi);
        int large = span > std::numbers::pi ? 1 : 0;
        int sweep = a.clockwise ? 0 : 1;
        d += " A " + f6(a.radius) + " " + f6(a.radius) + " 0 " + std::to_string(large) + " " + std::to_string(sweep) +
             " " + f6(q[0]) + " " + f6(q[1]);
      } else {
        d += " L " + f6(q[0]) + " " + f6(q[1]);
      }
    }
    d += " Z";
    out += "<path d=\"" + d + "\" fill=\"" + s.fill + "\" " + stroke_attrs(s.stroke, s.stroke_width) + "/>\n";
  }
  const double pr = 0.008 * std::max(c.w, c.h);
  for (long i = 0; i < W.cols(); ++i)
    out += "<circle cx=\"" + f6(W(0, i)) + "\" cy=\"" + f6(W(1, i)) + "\" r=\"" + f6(pr) + "\" fill=\"" + s.stroke + "\"/>\n";
  for (long i = 0; i < H.isolated_points.cols(); ++i)
    out += "<circle cx=\"" + f6(H.isolated_points(0, i)) + "\" cy=\"" + f6(H.isolated_points(1, i)) + "\" r=\"" +
           f6(2 * pr) + "\" fill=\"none\" " + stroke_attrs(s.stroke, s.stroke_width) + "/>\n";
  return out + close_svg();
}

std::string svg_curves(const std::vector<GammaPsiCurve>& curves, const SvgStyle& s) {
  static const char* palette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                  "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};
  double xlo = 0, xhi = 0, ylo = 0, yhi = 0;
  bool any = false;
  for (const auto& cv : curves) {
    require_planar(cv.samples.rows(), "svg_curves");
    if (cv.samples.cols() == 0) continue;
    double a = cv.samples.row(0).minCoeff(), b = cv.samples.row(0).maxCoeff();
    double e = cv.samples.row(1).minCoeff(), f = cv.samples.row(1).maxCoeff();
    xlo = any ? std::min(xlo, a) : a;
    xhi = any ? std::max(xhi, b) : b;
    ylo = any ? std::min(ylo, e) : e;
    yhi = any ? std::max(yhi, f) : f;
    any = true;
  }
  Canvas c = canvas_for(xlo, ylo, xhi, yhi, s);
  std::string out = open_svg(c);
  for (size_t k = 0; k < curves.size(); ++k) {
    const auto& cv = curves[k];
    std::string pts;
    for (long i = 0; i < cv.samples.cols(); ++i) {
      if (i) pts += ' ';
      pts += f6(cv.samples(0, i)) + "," + f6(cv.samples(1, i));
    }
    out += "<polyline points=\"" + pts + "\" fill=\"none\" " + stroke_attrs(palette[k % 8], s.stroke_width) +
           "><title>psi=" + f6(cv.psi) + "</title></polyline>\n";
  }
  return out + close_svg();
}

std::string svg_raster(const Grid& g, const SvgStyle& s) {
  if (g.dim != 2) throw std::domain_error("svg_raster: SVG output needs a 2-D artifact");
  Canvas c = canvas_for(g.lo[0], g.lo[1], g.lo[0] + g.n[0] * g.h, g.lo[1] + g.n[1] * g.h, s);
  std::string out = open_svg(c);
  // Horizontal runs of equal cells become one rectangle.
  for (int j = 0; j < g.n[1]; ++j) {
    int i = 0;
    while (i < g.n[0]) {
      Cell v = g.cells[g.index(i, j, 0)];
      int e = i + 1;
      while (e < g.n[0] && g.cells[g.index(e, j, 0)] == v) ++e;
      if (v != Cell::outside) {
        const char* fill = v == Cell::inside ? s.fill.c_str() : s.stroke.c_str();
        out += "<rect x=\"" + f6(g.lo[0] + i * g.h) + "\" y=\"" + f6(g.lo[1] + j * g.h) + "\" width=\"" +
               f6((e - i) * g.h) + "\" height=\"" + f6(g.h) + "\" fill=\"" + fill + "\"/>\n";
      }
      i = e;
    }
  }
  return out + close_svg();
}

}  // namespace epsc
