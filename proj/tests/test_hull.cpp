#include "doctest.h"

#include "epsc/hull.hpp"

#include <random>

using namespace epsc;

namespace {

Points unit_triangle() { return thin_triangle_vertices({}); }

}  // namespace

TEST_SUITE("hull") {
  TEST_CASE("two close points: the hull is the pair itself") {
    Points W = from_rows({{0, 0}, {1, 0}});
    EpsHull2D H = eps_hull_wrap2d(W, 1.0);
    REQUIRE(H.components.size() == 1);
    REQUIRE(H.components[0].arcs.size() == 2);
    for (const Arc& a : H.components[0].arcs) CHECK(a.radius == 1.0);
    FarthestSearch F(W);
    CHECK(in_eps_hull(F, 1.0, W.col(0)));
    CHECK_FALSE(in_eps_hull(F, 1.0, vec({0.5, 0})));
    CHECK_FALSE(wrap_contains(H, vec({0.5, 0.01})));
  }

  TEST_CASE("equilateral triangle at eps 0.8: three arcs of radius 1.25") {
    EpsHull2D H = eps_hull_wrap2d(unit_triangle(), 0.8);
    REQUIRE(H.components.size() == 1);
    CHECK(H.components[0].vertices.cols() == 3);
    REQUIRE(H.components[0].arcs.size() == 3);
    for (const Arc& a : H.components[0].arcs) CHECK(a.radius == doctest::Approx(1.25).epsilon(1e-15));
  }

  TEST_CASE("wrap needs the diameter below 2/eps") {
    CHECK_THROWS_AS(eps_hull_wrap2d(from_rows({{0, 0}, {3, 0}}), 1.0), PreconditionError);
  }

  TEST_CASE("wrap and point oracle agree") {
    std::mt19937_64 g(21);
    std::uniform_real_distribution<double> u(-0.2, 1.2);
    for (double eps : {0.3, 0.8, 1.1}) {
      Points W = unit_triangle();
      EpsHull2D H = eps_hull_wrap2d(W, eps);
      FarthestSearch F(W);
      int disagree = 0;
      for (int t = 0; t < 4000; ++t) {
        Vec y = vec({u(g), u(g)});
        if (wrap_contains(H, y) != in_eps_hull(F, eps, y)) ++disagree;
      }
      CAPTURE(eps);
      CHECK(disagree == 0);
    }
  }

  TEST_CASE("hulls shrink as eps grows and stay in the convex hull") {
    std::mt19937_64 g(8);
    std::uniform_real_distribution<double> u(-0.5, 1.5);
    Points W = from_rows({{0, 0}, {1, 0.1}, {0.9, 0.8}, {0.1, 0.9}, {0.5, 0.4}});
    FarthestSearch F(W);
    EpsHull2D conv = eps_hull_wrap2d(W, 1e-6);
    for (int t = 0; t < 3000; ++t) {
      Vec y = vec({u(g), u(g)});
      bool a = in_eps_hull(F, 0.5, y), b = in_eps_hull(F, 1.0, y), c = in_eps_hull(F, 1.4, y);
      CHECK((!b || a));
      CHECK((!c || b));
      if (a) CHECK(wrap_contains(conv, y));
    }
  }

  TEST_CASE("3-D points: oracle on a tetrahedron") {
    Points W = from_rows({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}});
    FarthestSearch F(W);
    CHECK(in_eps_hull(F, 0.5, vec({0.2, 0.2, 0.2})));
    CHECK_FALSE(in_eps_hull(F, 0.5, vec({1, 1, 1})));
    for (int i = 0; i < 4; ++i) CHECK(in_eps_hull(F, 1.2, W.col(i)));
  }

  TEST_CASE("oracle raster cells are consistent with the point oracle") {
    Points W = unit_triangle();
    FarthestSearch F(W);
    Grid g = eps_hull_oracle(W, 1.5, 0.02);
    long in = 0, out = 0;
    for (size_t i = 0; i < g.size(); ++i) {
      if (g.cells[i] == Cell::inside) {
        ++in;
        CHECK(in_eps_hull(F, 1.5, g.center(i)));
      } else if (g.cells[i] == Cell::outside) {
        ++out;
        CHECK_FALSE(in_eps_hull(F, 1.5, g.center(i)));
      }
    }
    CHECK(in > 0);
    CHECK(out > 0);
    CHECK(solid_components(g) == 4);
  }

  TEST_CASE("thin simplex: recurrence and the planar value") {
    CHECK(thin_simplex(2).eps_max == 1.0);
    for (int n = 2; n <= 10; ++n) {
      ThinSimplexData d = thin_simplex(n);
      CHECK(d.recurrence_residual < 1e-12);
      CHECK(d.h_n > 0);
      CHECK(d.h_n <= 1.0);
    }
    CHECK_THROWS(thin_simplex(1));
  }

  TEST_CASE("thin triangles") {
    for (double c : {0.6, 0.7, 0.8, 0.9}) {
      ThinTriangle lb{ThinTriangle::long_base, c}, sb{ThinTriangle::short_base, c};
      CHECK(thin_triangle_limit(lb) <= 1 / (c * c) + 1e-15);
      CHECK(thin_triangle_limit(sb) <= c + 1e-15);
      CHECK(thin_triangle_limit(lb) <= thin_triangle_threshold(lb) + 1e-15);
      Points V = thin_triangle_vertices(lb);
      CHECK(V.cols() == 3);
      double ab = (V.col(0) - V.col(1)).norm();
      CHECK(ab >= (V.col(1) - V.col(2)).norm() - 1e-12);
      CHECK(ab >= (V.col(0) - V.col(2)).norm() - 1e-12);
    }
    CHECK(thin_triangle_threshold({}) == doctest::Approx(1.0));
  }

  TEST_CASE("affine chart of a planar set in space") {
    Points W = from_rows({{0, 0, 1}, {1, 0, 1}, {0, 1, 1}, {1, 1, 1}});
    AffineChart A = affine_chart(W);
    CHECK(A.dim() == 2);
    CHECK((A.from_chart(A.to_chart(W)) - W).norm() <= 1e-12);
  }
}
