#include "doctest.h"

#include "epsc/grid.hpp"

#include <random>

using namespace epsc;

TEST_SUITE("bodies") {
  TEST_CASE("primitive membership") {
    CHECK(contains(ball(vec({0, 0}), 1), vec({0.6, 0.8})));
    CHECK_FALSE(contains_interior(ball(vec({0, 0}), 1), vec({0.6, 0.8})));
    CHECK_FALSE(contains(ball(vec({0, 0}), 1), vec({0.8, 0.8})));
    CHECK(contains(box(vec({0, 0, 0}), vec({1, 2, 3})), vec({1, 2, 3})));
    CHECK(contains(leaf(HalfspacePrim{vec({1, 1}), 1}), vec({0.5, 0.5})));
    CHECK_FALSE(contains(leaf(HalfspacePrim{vec({1, 1}), 1}), vec({0.6, 0.5})));
    Eigen::MatrixXd ax(3, 1);
    ax << 0, 0, 1;
    BodyExpr cyl = leaf(CylinderPrim{vec({0, 0, 0}), ax, 1});
    CHECK(contains(cyl, vec({0.6, 0.8, 100})));
    CHECK_FALSE(contains(cyl, vec({0.9, 0.8, 0})));
    Eigen::MatrixXd T(2, 3);
    T << 0, 1, 0, 0, 0, 1;
    CHECK(contains(simplex(T), vec({0.25, 0.25})));
    CHECK(contains(simplex(T), vec({0.5, 0.5})));
    CHECK_FALSE(contains(simplex(T), vec({0.6, 0.5})));
    BodyExpr diamond = leaf(LpBallPrim{Vec::Zero(2), Vec::Ones(2), 1.0});
    CHECK(contains(diamond, vec({0.5, 0.5})));
    CHECK_FALSE(contains(diamond, vec({0.5, 0.51})));
  }

  TEST_CASE("subtract keeps the boundary of the removed set") {
    BodyExpr b = subtract(ball(vec({0, 0}), 2), ball(vec({0, 0}), 1));
    CHECK(contains(b, vec({1, 0})));
    CHECK_FALSE(contains(b, vec({0.5, 0})));
    CHECK(contains(b, vec({1.5, 0})));
  }

  TEST_CASE("invalid primitives are rejected") {
    CHECK_THROWS(validate(ball(vec({0, 0}), -1)));
    CHECK_THROWS(validate(box(vec({1, 0}), vec({0, 1}))));
    CHECK_THROWS(validate(unite({ball(vec({0, 0}), 1), ball(vec({0, 0, 0}), 1)})));
    Eigen::MatrixXd flat(2, 3);
    flat << 0, 1, 2, 0, 1, 2;
    CHECK_THROWS(validate(simplex(flat)));
  }

  TEST_CASE("gallery bodies validate, are bounded, and contain their sampled points in the box") {
    std::mt19937_64 g(1);
    std::uniform_real_distribution<double> u(0, 1);
    for (const auto& name : gallery_names()) {
      CAPTURE(name);
      BodyExpr b = gallery(name);
      BBox bb = bounding_box(b);
      REQUIRE(bb.bounded());
      const int n = b.dim();
      Vec span = bb.hi - bb.lo;
      Vec pad = 0.25 * span;
      int hits = 0;
      for (int t = 0; t < 4000; ++t) {
        Vec x(n);
        for (int i = 0; i < n; ++i) x[i] = bb.lo[i] - pad[i] + (span[i] + 2 * pad[i]) * u(g);
        bool in = contains(b, x);
        if (in) {
          ++hits;
          CHECK(((x - bb.lo).minCoeff() >= -1e-9 && (bb.hi - x).minCoeff() >= -1e-9));
        }
      }
      // example5b is a thin 4-D body that uniform sampling rarely hits.
      if (n <= 3) CHECK(hits > 0);
    }
  }

  TEST_CASE("gallery parameter errors") {
    CHECK_THROWS(gallery("nope"));
    CHECK_THROWS(gallery("ball", {{"radius", 1}}));
    CHECK_THROWS(gallery("c_body", {{"eps", 1}}));
    CHECK_THROWS(gallery("ball_minus_cap", {{"depth", 2}}));
  }

  TEST_CASE("eq3 removes the triangle around the origin") {
    BodyExpr b = gallery("eq3");
    CHECK_FALSE(contains_interior(b, vec({0, 0})));
    CHECK(contains(b, vec({3.5, 0})));
  }

  TEST_CASE("raster cells agree with membership at their corners") {
    for (const char* name : {"ring", "astroid", "cube_minus_ball"}) {
      CAPTURE(name);
      BodyExpr b = gallery(name);
      Grid g = rasterize(b, 0.05);
      long inside = 0, outside = 0;
      for (size_t i = 0; i < g.size(); i += 5) {
        Vec c = g.center(i);
        if (g.cells[i] == Cell::inside) {
          ++inside;
          CHECK(contains(b, c));
        } else if (g.cells[i] == Cell::outside) {
          ++outside;
          CHECK_FALSE(contains_interior(b, c));
        }
      }
      CHECK(inside > 0);
      CHECK(outside > 0);
    }
  }

  TEST_CASE("raster of a disc: area, diameter, components") {
    Grid g = rasterize(ball(vec({0, 0}), 1), 0.01);
    double area = static_cast<double>(g.count(Cell::inside)) * 1e-4;
    CHECK(area <= M_PI);
    CHECK(area >= M_PI - 2 * M_PI * 0.01 * std::sqrt(2.0));
    GridMetrics m = grid_metrics(g);
    CHECK(std::abs(m.diameter - 2.0) <= m.diameter_err + 1e-12);
    CHECK(m.connected_components == 1);
    CHECK(m.boundary_components == 1);
    GridMetrics r = grid_metrics(rasterize(gallery("ring"), 0.02));
    CHECK(r.boundary_components == 2);
    CHECK(grid_metrics(rasterize(gallery("two_balls"), 0.05)).connected_components == 2);
  }

  TEST_CASE("locate inverts center") {
    Grid g = rasterize(ball(vec({0, 0, 0}), 1), 0.1);
    for (size_t i = 0; i < g.size(); i += 97) CHECK(g.locate(g.center(i)) == static_cast<long>(i));
    CHECK(g.locate(vec({5, 5, 5})) == -1);
  }
}
