#include "doctest.h"

#include "epsc/cli.hpp"
#include "epsc/io.hpp"
#include "epsc/suites.hpp"

#include <filesystem>
#include <sstream>

using namespace epsc;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path p;
  TempDir() {
    p = fs::temp_directory_path() / ("epsc_cli_" + std::to_string(::getpid()));
    fs::create_directories(p);
  }
  ~TempDir() { fs::remove_all(p); }
  std::string operator/(const std::string& f) const { return (p / f).string(); }
};

int call(const std::vector<std::string>& args, std::string* out = nullptr, std::string* err = nullptr) {
  std::ostringstream o, e;
  int code = run(args, o, e);
  if (out) *out = o.str();
  if (err) *err = e.str();
  return code;
}

size_t count(const std::string& s, const std::string& needle) {
  size_t n = 0;
  for (size_t at = s.find(needle); at != std::string::npos; at = s.find(needle, at + 1)) ++n;
  return n;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("body files round trip") {
    for (const auto& name : {"eq3", "c_body", "strips", "example5b", "ball_minus_cap"}) {
      CAPTURE(name);
      BodyExpr b = gallery(name);
      BodyExpr c = body_from_json(Json::parse(dump(body_to_json(b))));
      CHECK(dump(body_to_json(c)) == dump(body_to_json(b)));
      BBox bb = bounding_box(b);
      Vec mid = 0.5 * (bb.lo + bb.hi);
      CHECK(contains(b, mid) == contains(c, mid));
    }
    BodyExpr g = body_from_json(Json::parse(R"({"gallery": "ball", "params": {"r": 0.5}})"));
    CHECK(contains(g, vec({0.49, 0})));
    CHECK_FALSE(contains(g, vec({0.51, 0})));
    CHECK_THROWS(body_from_json(Json::parse(R"({"op": "leaf", "prim": {"type": "torus"}})")));
  }

  TEST_CASE("point CSV parsing") {
    Points P = parse_points_csv("# header\n0,0\n\n1, 2\n3,4.5\n");
    REQUIRE(P.cols() == 3);
    CHECK(P(1, 2) == 4.5);
    CHECK(parse_points_csv(points_csv(P)) == P);
    CHECK_THROWS(parse_points_csv("0,0\n1,2,3\n"));
    CHECK_THROWS(parse_points_csv("0,x\n"));
  }

  TEST_CASE("non-finite numbers serialize as strings") {
    CHECK(num(1.5).is_number());
    CHECK(num(std::numeric_limits<double>::infinity()).is_string());
  }

  TEST_CASE("reports are schema-versioned with fixed field order") {
    Json r = report("x", {{"b", 1}, {"a", 2}});
    CHECK(r.begin().key() == "schema_version");
    CHECK(r["schema_version"] == kSchemaVersion);
    CHECK(r["kind"] == "x");
    CHECK(dump(r).find("\"b\"") < dump(r).find("\"a\""));
  }

  TEST_CASE("verdict reports carry witness coordinates") {
    Grid g = rasterize(gallery("eq3"), 0.04);
    Json j = to_json(check_K2(g, 1.0));
    CHECK(j["status"] == "violated");
    REQUIRE(j["witness_point"].is_array());
    CHECK(j["witness_point"].size() == 2);
  }

  TEST_CASE("hull SVG: three native arcs of radius 1.25, byte-stable") {
    Points T = thin_triangle_vertices({});
    EpsHull2D H = eps_hull_wrap2d(T, 0.8);
    std::string a = svg_hull(H, T), b = svg_hull(eps_hull_wrap2d(T, 0.8), T);
    CHECK(a == b);
    CHECK(count(a, " A 1.250000 1.250000 ") == 3);
    CHECK(a.rfind("<svg", 0) == 0);
    CHECK(a.find("</svg>") != std::string::npos);
  }

  TEST_CASE("curve and raster SVGs") {
    std::vector<GammaPsiCurve> cs;
    for (double psi : {0.15, 0.3, 0.45, 0.524, 0.6, 0.75, 0.9, 1.05}) cs.push_back(gamma_psi_curve(psi, 200));
    CHECK(count(svg_curves(cs), "<polyline") == 8);
    Grid g = rasterize(ball(vec({0, 0}), 0.3), 0.05);
    Grid e = empty_like(g);
    std::string s = svg_raster(e);
    CHECK(s.find("<svg") != std::string::npos);
    CHECK(s.find("<rect") == std::string::npos);
    CHECK(svg_raster(g).find("<rect") != std::string::npos);
    CHECK_THROWS(svg_raster(rasterize(ball(vec({0, 0, 0}), 0.3), 0.1)));
  }

  TEST_CASE("plane experiment CSV has one row per plane") {
    const double h = 0.02, eps0 = 0.4;
    Vec u = vec({0.2, -1}).normalized();
    Grid K = rasterize(ball_minus_cap(vec({0, 0}), 0.5, eps0 / 1.2, 0.1, u), h);
    Grid L = rasterize_in(ball_minus_cap(vec({0, 0}), 0.5, eps0 / 1.2, 0.12, u), K.lo, K.n, h);
    Theorem7Report r = theorem7_experiment(K, L, vec({0, 1}), eps0, Theorem7Mode::translative);
    std::string csv = theorem7_csv(r);
    CHECK(count(csv, "\n") == r.planes.size() + 1);
  }

  TEST_CASE("atomic writes leave no temporary file") {
    TempDir d;
    write_file_atomic(d / "a.txt", "hello");
    CHECK(read_file(d / "a.txt") == "hello");
    CHECK_FALSE(fs::exists(d / "a.txt.tmp"));
    CHECK_THROWS_WITH_AS(read_file(d / "missing.txt"), doctest::Contains("missing.txt"), std::exception);
  }

  TEST_CASE("hull subcommand writes the SVG") {
    TempDir d;
    write_file_atomic(d / "tri.csv", points_csv(thin_triangle_vertices({})));
    std::string out;
    CHECK(call({"hull", "--points", d / "tri.csv", "--eps", "0.8", "--svg", d / "out.svg"}, &out) == kExitOk);
    CHECK(Json::parse(out)["kind"] == "hull");
    CHECK(count(read_file(d / "out.svg"), " A 1.250000 ") == 3);
  }

  TEST_CASE("classify subcommand finds the K2 witness near the origin") {
    TempDir d;
    CHECK(call({"gallery", "eq3", "--report", d / "eq3.body"}) == kExitOk);
    CHECK(call({"classify", "--body", d / "eq3.body", "--eps", "1", "--class", "K2", "--grid-h", "0.04", "--report",
                d / "r.json"}) == kExitOk);
    Json r = Json::parse(read_file(d / "r.json"));
    CHECK(r["verdict"]["status"] == "violated");
    Vec w = vec({r["verdict"]["witness_point"][0].get<double>(), r["verdict"]["witness_point"][1].get<double>()});
    CHECK(w.norm() <= 0.08);
  }

  TEST_CASE("exit codes") {
    TempDir d;
    std::string err;
    CHECK(call({"hull", "--bogus"}, nullptr, &err) == kExitUsage);
    CHECK(err.find("Usage") != std::string::npos);
    CHECK(call({}) == kExitUsage);
    CHECK(call({"frobnicate"}) == kExitUsage);
    CHECK(call({"hull", "--eps", "-1"}) == kExitUsage);
    CHECK(call({"--help"}) == kExitOk);
    // Wrapping two far points needs d_W < 2/eps.
    write_file_atomic(d / "far.csv", "0,0\n5,0\n");
    CHECK(call({"hull", "--points", d / "far.csv", "--eps", "1"}, nullptr, &err) == kExitPrecondition);
    CHECK(err.find("d_W < 2/eps") != std::string::npos);
    CHECK(call({"gallery", "ball", "--param", "r=2", "--report", d / "b.body"}) == kExitOk);
    CHECK(call({"distance", "--body", d / "b.body", "--body", d / "b.body", "--eps0", "0.4", "--grid-h", "0.1"}, nullptr,
               &err) == kExitPrecondition);
    CHECK(err.find("Theorem 7 requires d_K < 1/(2 eps0)") != std::string::npos);
    CHECK(call({"classify", "--body", d / "nope.body"}, nullptr, &err) == kExitInternal);
    CHECK(err.find("nope.body") != std::string::npos);
  }

  TEST_CASE("project subcommand") {
    TempDir d;
    write_file_atomic(d / "p.csv", "1,0,1\n0,2,0\n");
    std::string out;
    CHECK(call({"project", "--points", d / "p.csv", "--csv", d / "img.csv"}, &out) == kExitOk);
    Points Y = load_points_csv(d / "img.csv");
    CHECK(Y.col(0).isApprox(vec({std::sqrt(2.0), 0, 0})));
    write_file_atomic(d / "axis.csv", "0,0,1\n");
    CHECK(call({"project", "--points", d / "axis.csv"}) == kExitPrecondition);
  }

  TEST_CASE("suite selection") {
    CHECK(parse_suite("all").size() == static_cast<size_t>(kCriteria));
    CHECK(parse_suite("3,1,3") == std::vector<int>{1, 3});
    CHECK(parse_suite("thin-simplex") == std::vector<int>{3});
    CHECK_THROWS(parse_suite("14"));
    CHECK_THROWS(parse_suite("x"));
  }

  TEST_CASE("verify runs fast criteria and reruns them deterministically") {
    TempDir d;
    std::string out;
    CHECK(call({"verify", "--suite", "3,6,8,13", "--out", d.p.string(), "--report", d / "sum.json"}, &out) == kExitOk);
    CHECK(count(out, "[PASS]") == 4);
    CHECK(fs::exists(d / "thin-simplex.json"));
    CHECK(Json::parse(read_file(d / "sum.json"))["criteria"].size() == 4);
  }
}
