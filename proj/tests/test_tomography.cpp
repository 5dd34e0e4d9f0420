#include "doctest.h"

#include "epsc/helly.hpp"
#include "epsc/tomography.hpp"

#include <random>

using namespace epsc;

namespace {

Points blob(std::mt19937_64& g, int n, int m) {
  std::uniform_real_distribution<double> u(0, 1);
  Points P(n, m);
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < n; ++i) P(i, j) = u(g) * (i + 1) * 0.5;
  return P;
}

}  // namespace

TEST_SUITE("tomography") {
  TEST_CASE("stability bounds vanish at zero deviation and grow with it") {
    StabilityParams p{0.0, 0.8, 0.4, 0.3};
    for (auto k : {StabilityKind::lemma4, StabilityKind::thm7a}) CHECK(stability_bound(k, p) == 0.0);
    double prev = 0;
    for (double e : {1e-4, 1e-3, 1e-2, 0.1}) {
      p.eps = e;
      double b = stability_bound(StabilityKind::lemma4, p);
      CHECK(b > prev);
      CHECK(stability_bound(StabilityKind::thm7a, p) >= b);
      CHECK(stability_bound(StabilityKind::thm7b, p) > 0);
      prev = b;
    }
    p.eps = 0.01;
    CHECK(stability_bound(StabilityKind::lemma4, p) ==
          doctest::Approx(2 * (std::sqrt(0.8) + 0.1) * 0.1).epsilon(1e-14));
    CHECK(stability_alpha_sq(p) == doctest::Approx(0.4 / (1 + 0.4 * (0.3 - 0.8))));
    CHECK_THROWS(stability_bound(StabilityKind::lemma4, StabilityParams{-1, 0.8, 0.4, 0.3}));
  }

  TEST_CASE("special distances recover rigid copies") {
    std::mt19937_64 g(9);
    Points K = blob(g, 2, 40);
    CHECK(special_distance(K, K, DistanceKind::plain).value <= 1e-15);

    Points Lt = K.colwise() + vec({0.3, -0.2});
    DistanceReport t = special_distance(K, Lt, DistanceKind::translative);
    CHECK(t.value <= 1e-6);
    CHECK(hausdorff(apply_motion(K, t), Lt) == doctest::Approx(t.value).epsilon(1e-9));
    CHECK(special_distance(K, Lt, DistanceKind::plain).value >= 0.3);

    DistanceConfig cfg;
    cfg.C = vec({0.1, 0.2});
    Eigen::MatrixXd Q = rotation_matrix(vec({0.4}), 2);
    Points Lr = (Q * (K.colwise() - cfg.C)).colwise() + cfg.C;
    DistanceReport r = special_distance(K, Lr, DistanceKind::rotational, cfg);
    CHECK(r.value <= 1e-5);
    CHECK(r.value <= special_distance(K, Lr, DistanceKind::plain, cfg).value);

    Vec c = K.rowwise().mean();
    Points Lh = (1.3 * (K.colwise() - c)).colwise() + c;
    Lh = Lh.colwise() + vec({0.05, 0.0});
    CHECK(special_distance(K, Lh, DistanceKind::homothetic).value <= 1e-5);
  }

  TEST_CASE("rotation matrices are orthogonal") {
    for (const Vec& r : {vec({0.3, -0.2, 0.9}), vec({0, 0, 0}), vec({1.2, 0, 0})}) {
      Eigen::MatrixXd Q = rotation_matrix(r, 3);
      CHECK((Q.transpose() * Q - Eigen::MatrixXd::Identity(3, 3)).norm() <= 1e-12);
      CHECK(Q.determinant() == doctest::Approx(1.0));
    }
  }

  TEST_CASE("support ball of a disc sample is the disc") {
    Points K(2, 360);
    for (int i = 0; i < 360; ++i) K.col(i) = 0.5 * vec({std::cos(i * M_PI / 180), std::sin(i * M_PI / 180)});
    SupportBallReport s = smallest_support_ball(K, vec({0, 1}), 1e-9);
    REQUIRE(s.finite);
    CHECK(s.R == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(s.center.norm() <= 1e-6);
    Points seg = from_rows({{0, 0}, {1, 0}});
    SupportBallReport f = smallest_support_ball(seg, vec({0, 1}), 1e-9, 100);
    CHECK_FALSE(f.finite);  // two points on the support line: no ball of finite radius
  }

  TEST_CASE("distinguishing plane for different bodies, none for equal ones") {
    const double h = 0.02, eps = 0.4;
    Grid K = rasterize(ball(vec({0, 0}), 0.5), h);
    Grid L = rasterize_in(ball_minus_cap(vec({0, 0}), 0.5, eps / 1.2, 0.25, vec({0.6, 0.8})), K.lo, K.n, h);
    Theorem6Result t = theorem6_distinguish(K, L, eps);
    CHECK_FALSE(t.identical);
    REQUIRE(t.witness_plane);
    CHECK(t.image_gap > 0);
    CHECK(theorem6_distinguish(K, K, eps).identical);
  }

  TEST_CASE("support-dominated bodies stay close") {
    const double h = 0.01, eps = 0.5;
    Grid K = rasterize(ball_minus_cap(vec({0, 0}), 0.45, eps / 1.2, 0.2, vec({1, 0})), h);
    Grid L = convex_hull_raster(K);
    CHECK(L.count(Cell::outside) < K.count(Cell::outside));
    Prop3Report p = prop3_check(K, L, eps);
    CHECK(p.support_dominated);
    CHECK(p.conclusion_holds);
    CHECK(p.max_dist <= p.eps_prime + p.slack);
    CHECK(p.eps_prime == doctest::Approx(eps * p.d_K * p.d_K / 2));
  }

  TEST_CASE("plane experiment hypotheses are enforced") {
    Grid K = rasterize(ball(vec({0, 0}), 2.0), 0.1);
    CHECK_THROWS_AS(theorem7_experiment(K, K, vec({0, 1}), 0.4, Theorem7Mode::translative), PreconditionError);
    Grid big = rasterize(ball(vec({0, 0}), 1.0), 0.1);
    CHECK_THROWS_AS(prop3_check(big, big, 0.5), PreconditionError);
  }

  TEST_CASE("plane experiment on a turned cap") {
    const double h = 0.02, eps0 = 0.4;
    Vec u = vec({0.2, -1}).normalized();
    Vec u2 = rotation_matrix(vec({0.2}), 2) * u;
    Grid K = rasterize(ball_minus_cap(vec({0, 0}), 0.5, eps0 / 1.2, 0.1, u), h);
    Grid L = rasterize_in(ball_minus_cap(vec({0, 0}), 0.5, eps0 / 1.2, 0.1, u2), K.lo, K.n, h);
    Theorem7Report r = theorem7_experiment(K, L, vec({0, 1}), eps0, Theorem7Mode::translative);
    CHECK(r.pass);
    CHECK(r.slack <= 3 * h);
    CHECK(r.global <= r.bound + r.slack);
    CHECK_FALSE(r.planes.empty());
    for (const auto& pl : r.planes) CHECK(std::abs(pl.plane.omega.norm() - 1) <= 1e-12);
  }
}
