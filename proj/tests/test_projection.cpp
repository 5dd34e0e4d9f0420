#include "doctest.h"

#include "epsc/projection.hpp"

#include <random>

using namespace epsc;

TEST_SUITE("projection") {
  TEST_CASE("projection keeps the distance to C and lands on the screen") {
    std::mt19937_64 g(2);
    std::uniform_real_distribution<double> u(-2, 2);
    for (int n = 2; n <= 5; ++n) {
      Vec C(n), w(n);
      for (int i = 0; i < n; ++i) {
        C[i] = u(g);
        w[i] = u(g);
      }
      CircularProjection f = make_projection(C, w);
      CHECK(std::abs(f.omega.norm() - 1) <= 1e-12);
      for (int t = 0; t < 500; ++t) {
        Vec x(n);
        for (int i = 0; i < n; ++i) x[i] = u(g);
        if (axis_distance(f, x) < 1e-3) continue;
        Vec y = project_point(f, x);
        CHECK(std::abs((y - C).norm() - (x - C).norm()) <= 1e-12);
        CHECK(std::abs((y - C).dot(f.omega)) <= 1e-12);
        CHECK((project_point(f, y) - y).norm() <= 1e-12);
        // The image lies on the half-plane of the axis through x.
        CHECK(axis_distance(f, y) == doctest::Approx(axis_distance(f, x) + 0.0).epsilon(1.0));
      }
    }
  }

  TEST_CASE("points on the axis are rejected") {
    CircularProjection f = make_projection(Vec::Zero(3), vec({0, 0, 1}));
    CHECK_THROWS_AS(project_point(f, vec({0, 0, 2})), AxisError);
    CHECK_THROWS(make_projection(Vec::Zero(3), Vec::Zero(3)));
  }

  TEST_CASE("coordinate form matches the general map") {
    std::mt19937_64 g(6);
    std::uniform_real_distribution<double> u(-2, 2);
    CircularProjection f = make_projection(Vec::Zero(3), vec({0, 0, 1}));
    for (int t = 0; t < 1000; ++t) {
      Vec x = vec({u(g), u(g), u(g)});
      if (axis_distance(f, x) < 1e-3) continue;
      CHECK((project_coordinate_form(x) - project_point(f, x)).norm() <= 1e-12);
    }
  }

  TEST_CASE("screen basis is orthonormal and orthogonal to omega") {
    CircularProjection f = make_projection(vec({1, 2, 3}), vec({1, 1, 0}));
    Eigen::MatrixXd B = screen_basis(f);
    CHECK(B.cols() == 2);
    CHECK((B.transpose() * f.omega).norm() <= 1e-12);
    CHECK((B.transpose() * B - Eigen::MatrixXd::Identity(2, 2)).norm() <= 1e-12);
  }

  TEST_CASE("gamma curves: minimum curvature is cos 2 psi, attained at t = pi") {
    for (double psi : {0.15, 0.3, 0.45, 0.524, 0.6, 0.75, 0.9, 1.05}) {
      CAPTURE(psi);
      GammaPsiCurve c = gamma_psi_curve(psi, 3600);
      CHECK(c.min_curvature == doctest::Approx(std::cos(2 * psi)).epsilon(1e-9));
      CHECK(c.argmin_t == doctest::Approx(M_PI).epsilon(1e-12));
      for (double t : {0.0, 0.7, 2.0, M_PI, 4.4}) {
        CHECK(std::abs(gamma_psi_curvature(psi, t) - gamma_psi_curvature_fd(psi, t)) <= 1e-6);
        CHECK((gamma_psi_point(psi, t) - gamma_psi_point_projected(psi, t)).norm() <= 1e-12);
      }
    }
    CHECK(gamma_psi_curve(M_PI / 6, 3600).min_curvature == doctest::Approx(0.5).epsilon(1e-12));
  }

  TEST_CASE("sphere image on the boundary of the admissible range") {
    const double psi = M_PI / 6;
    CircularProjection f = make_projection(Vec::Zero(3), vec({0, 0, 1}));
    Ball S{vec({0, 2 * std::cos(psi), 2 * std::sin(psi)}), 1.0};
    Lemma3Report r = lemma3_check(f, S, 100);
    CHECK(r.lambda == doctest::Approx(0.5));
    CHECK(r.min_profile_curvature >= 0.5 - 1e-9);
    CHECK(r.enclosing_ball_ok);
    CHECK(r.profile_residual <= 1e-9);
    ProfileCurve p = sphere_image_profile(f, S);
    CHECK(p.closed);
    CHECK(p.symmetry_deviation <= 1e-9);
  }

  TEST_CASE("sphere image preconditions") {
    CircularProjection f = make_projection(Vec::Zero(3), vec({0, 0, 1}));
    CHECK_THROWS_AS(lemma3_check(f, Ball{vec({0, 1.5, 0}), 1.0}), PreconditionError);   // lambda > 1/2
    CHECK_THROWS_AS(lemma3_check(f, Ball{vec({0, 1.0, 1.8}), 0.5}), PreconditionError);  // psi > pi/6
  }

  TEST_CASE("image of a body raster") {
    Grid g = rasterize(ball(vec({0, 2, 0}), 0.5), 0.05);
    CircularProjection f = make_projection(Vec::Zero(3), vec({0, 0, 1}));
    ScreenImage s = project_body(f, g);
    CHECK(s.raster.dim == 2);
    CHECK(s.raster.count(Cell::outside) < s.raster.size());
    for (Eigen::Index j = 0; j < s.points.cols(); ++j) CHECK(std::abs(s.points(2, j)) <= 1e-12);
  }
}
