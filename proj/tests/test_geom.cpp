#include "doctest.h"

#include "epsc/grid.hpp"
#include "epsc/kdtree.hpp"

#include <random>

using namespace epsc;

namespace {

Points random_points(std::mt19937_64& g, int n, int m, double s = 1.0) {
  std::uniform_real_distribution<double> u(-s, s);
  Points P(n, m);
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < n; ++i) P(i, j) = u(g);
  return P;
}

double brute_directed(const Points& A, const Points& B) {
  double worst = 0;
  for (int i = 0; i < A.cols(); ++i) {
    double best = 1e300;
    for (int j = 0; j < B.cols(); ++j) best = std::min(best, (A.col(i) - B.col(j)).norm());
    worst = std::max(worst, best);
  }
  return worst;
}

}  // namespace

TEST_SUITE("geom") {
  TEST_CASE("hausdorff of nested squares") {
    Points A = from_rows({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
    Points B = from_rows({{-1, -1}, {2, -1}, {2, 2}, {-1, 2}});
    CHECK(directed_hausdorff(A, B) == doctest::Approx(std::sqrt(2.0)));
    CHECK(hausdorff(A, B) == doctest::Approx(std::sqrt(2.0)));
    CHECK(hausdorff(A, A) == 0.0);
  }

  TEST_CASE("hausdorff matches brute force, is symmetric, obeys the triangle inequality") {
    std::mt19937_64 g(11);
    for (int t = 0; t < 40; ++t) {
      int n = 2 + t % 3;
      Points A = random_points(g, n, 30), B = random_points(g, n, 25), C = random_points(g, n, 20);
      CHECK(directed_hausdorff(A, B) == doctest::Approx(brute_directed(A, B)).epsilon(1e-12));
      CHECK(hausdorff(A, B) == doctest::Approx(hausdorff(B, A)).epsilon(1e-12));
      CHECK(hausdorff(A, C) <= hausdorff(A, B) + hausdorff(B, C) + 1e-12);
    }
  }

  TEST_CASE("witness pair realizes the distance") {
    std::mt19937_64 g(3);
    for (int t = 0; t < 20; ++t) {
      Points K = random_points(g, 2, 15), L = random_points(g, 2, 12, 2.0);
      WitnessPair w = witness_pair(K, L);
      CHECK(w.dist == doctest::Approx(hausdorff(K, L)).epsilon(1e-12));
      CHECK((w.a - w.b).norm() == doctest::Approx(w.dist).epsilon(1e-12));
      if (w.side == Side::fromK) CHECK(point_set_dist(K, w.b) == doctest::Approx(w.dist).epsilon(1e-12));
      else CHECK(point_set_dist(L, w.a) == doctest::Approx(w.dist).epsilon(1e-12));
    }
  }

  TEST_CASE("support data of a square") {
    Points S = from_rows({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
    SupportData d = support_data(S, vec({1, 0}), 1e-9);
    CHECK(d.h == doctest::Approx(1.0));
    CHECK(d.width == doctest::Approx(1.0));
    CHECK(d.support_set.cols() == 2);
    CHECK_FALSE(d.regular);
    SupportData e = support_data(S, vec({1, 1}).normalized(), 1e-9);
    CHECK(e.support_set.cols() == 1);
    CHECK(e.regular);
  }

  TEST_CASE("diameter and outer parallel body") {
    Points S = from_rows({{0, 0}, {3, 0}, {0, 4}});
    CHECK(diameter(S) == doctest::Approx(5.0));
    CHECK(outer_parallel_contains(S, 1.0, vec({3.5, 0.5})));
    CHECK_FALSE(outer_parallel_contains(S, 1.0, vec({5, 5})));
  }

  TEST_CASE("sphere directions are unit vectors") {
    for (int n = 2; n <= 5; ++n)
      for (const Vec& v : sphere_directions(n, 200)) CHECK(std::abs(v.norm() - 1.0) <= 1e-12);
  }

  TEST_CASE("orthogonal complement") {
    std::mt19937_64 g(5);
    for (int n = 2; n <= 5; ++n) {
      Eigen::MatrixXd U = random_points(g, n, 1);
      Eigen::MatrixXd Q = orth_complement(U, n);
      CHECK(Q.cols() == n - 1);
      CHECK((Q.transpose() * U).norm() <= 1e-12);
      CHECK((Q.transpose() * Q - Eigen::MatrixXd::Identity(n - 1, n - 1)).norm() <= 1e-12);
    }
  }

  TEST_CASE("lexicographic order") {
    CHECK(lex_less(vec({0, 1}), vec({1, 0})));
    CHECK(lex_less(vec({1, 0}), vec({1, 2})));
    CHECK_FALSE(lex_less(vec({1, 2}), vec({1, 2})));
  }

  TEST_CASE("dimension mismatch throws") { CHECK_THROWS_AS(require_dim(vec({1, 2}), 3, "x"), std::exception); }

  TEST_CASE("kd-tree agrees with brute force") {
    std::mt19937_64 g(17);
    for (int n = 2; n <= 3; ++n) {
      Points P = random_points(g, n, 500);
      KdTree t(P);
      Points Q = random_points(g, n, 200, 1.5);
      for (int j = 0; j < Q.cols(); ++j) {
        Vec x = Q.col(j);
        double best = 1e300;
        int count = 0;
        for (int i = 0; i < P.cols(); ++i) {
          double d = (P.col(i) - x).norm();
          best = std::min(best, d);
          if (d <= 0.3) ++count;
        }
        CHECK(t.nearest(x).dist == doctest::Approx(best).epsilon(1e-12));
        CHECK(static_cast<int>(t.within(x, 0.3).size()) == count);
        CHECK(t.any_within(x, 0.3) == (count > 0));
      }
    }
  }

  TEST_CASE("exact distance transform matches brute force") {
    Grid g = rasterize(ball(vec({0, 0}), 0.5), 0.05);
    std::vector<uint8_t> marked(g.size());
    std::vector<size_t> on;
    for (size_t i = 0; i < g.size(); ++i)
      if (g.cells[i] == Cell::inside && (i % 7 == 0)) {
        marked[i] = 1;
        on.push_back(i);
      }
    std::vector<double> d = distance_field(g, marked);
    for (size_t i = 0; i < g.size(); i += 13) {
      double best = 1e300;
      for (size_t j : on) best = std::min(best, (g.center(i) - g.center(j)).norm());
      CHECK(d[i] == doctest::Approx(best).epsilon(1e-9));
    }
  }
}
