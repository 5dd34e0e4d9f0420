#include "doctest.h"

#include "epsc/classes.hpp"

using namespace epsc;

namespace {

bool chain_ok(Status inner, Status outer) { return !(inner == Status::satisfied && outer == Status::violated); }

}  // namespace

TEST_SUITE("classes") {
  TEST_CASE("status combination") {
    CHECK(combine(Status::satisfied, Status::satisfied) == Status::satisfied);
    CHECK(combine(Status::satisfied, Status::unknown) == Status::unknown);
    CHECK(combine(Status::unknown, Status::violated) == Status::violated);
    CHECK(std::string(to_string(Status::violated)) == "violated");
  }

  TEST_CASE("a disc lies in every class once 1/eps exceeds its radius") {
    Grid g = rasterize(ball(vec({0, 0}), 0.5), 0.025);
    for (double eps : {0.5, 1.0, 1.9}) {
      CAPTURE(eps);
      CHECK(check_K1(g, eps).status == Status::satisfied);
      CHECK(check_K2(g, eps).status == Status::satisfied);
      CHECK(check_K3(g, eps, K3Mode::viaK5).status == Status::satisfied);
      CHECK(check_K3(g, eps, K3Mode::viaK4).status == Status::satisfied);
    }
  }

  TEST_CASE("eq3 at eps = 1: K1 holds and K2 fails near the origin") {
    Grid g = rasterize(gallery("eq3"), 0.025);
    ClassVerdict k1 = check_K1(g, 1.0);
    ClassVerdict k2 = check_K2(g, 1.0);
    CHECK(k1.status == Status::satisfied);
    REQUIRE(k2.status == Status::violated);
    REQUIRE(k2.witness_point);
    CHECK(k2.witness_point->norm() <= 2 * 0.025);
    CHECK(k2.witness_deficit > 0);
    CHECK(k2.violations > 0);
  }

  TEST_CASE("witness cells: boundary for K1, exterior for K2") {
    Grid g = rasterize(gallery("two_balls"), 0.04);
    ClassVerdict v = check_K1(g, 0.2);
    REQUIRE(v.status == Status::violated);
    REQUIRE(v.witness_point);
    long idx = g.locate(*v.witness_point);
    REQUIRE(idx >= 0);
    CHECK(g.cells[static_cast<size_t>(idx)] == Cell::boundary);
    ClassVerdict w = check_K2(g, 0.2);
    REQUIRE(w.status == Status::violated);
    REQUIRE(w.witness_point);
    idx = g.locate(*w.witness_point);
    REQUIRE(idx >= 0);
    CHECK(g.cells[static_cast<size_t>(idx)] == Cell::outside);
    CHECK(w.witness_rho > 0);
    CHECK(w.witness_rho < 5.0);
  }

  TEST_CASE("class inclusions and monotonicity in eps on gallery bodies") {
    for (auto [name, h] : std::vector<std::pair<const char*, double>>{{"two_balls", 0.04}, {"ring", 0.04}, {"eq3", 0.04}}) {
      CAPTURE(name);
      Grid g = rasterize(gallery(name), h);
      Budget b;
      b.stop_at_first_violation = true;
      Status prev[4] = {Status::unknown, Status::unknown, Status::unknown, Status::unknown};
      for (double eps : {0.2, 0.5, 1.0, 2.0}) {
        CAPTURE(eps);
        Status s[4] = {check_K1(g, eps, b).status, check_K2(g, eps, b).status,
                       check_K3(g, eps, K3Mode::viaK5, b).status, check_K3(g, eps, K3Mode::viaK4, b).status};
        CHECK(chain_ok(s[1], s[0]));
        CHECK(chain_ok(s[2], s[1]));
        CHECK(s[2] == s[3]);
        for (int i = 0; i < 4; ++i) CHECK(chain_ok(prev[i], s[i]));
        std::copy(s, s + 4, prev);
      }
    }
  }

  TEST_CASE("subsampled runs never claim satisfied") {
    Grid g = rasterize(ball(vec({0, 0}), 0.5), 0.025);
    Budget b;
    b.max_test_points = 50;
    ClassVerdict v = check_K1(g, 1.0, b);
    CHECK(v.subsampled);
    CHECK(v.status != Status::satisfied);
    CHECK(v.tested_points <= 60);
  }

  TEST_CASE("worker count does not change the verdict") {
    Grid g = rasterize(gallery("eq3"), 0.04);
    Budget one, many;
    many.workers = 4;
    ClassVerdict a = check_K2(g, 1.0, one), b = check_K2(g, 1.0, many);
    CHECK(a.status == b.status);
    CHECK(a.violations == b.violations);
    REQUIRE(a.witness_point);
    REQUIRE(b.witness_point);
    CHECK((*a.witness_point - *b.witness_point).norm() == 0.0);

    // Early stopping: counters must not depend on how far other workers got.
    one.stop_at_first_violation = many.stop_at_first_violation = true;
    Grid fine = rasterize(gallery("eq3"), 0.02);
    a = check_K2(fine, 1.0, one);
    b = check_K2(fine, 1.0, many);
    CHECK(a.status == b.status);
    CHECK(a.tested_points == b.tested_points);
    CHECK(a.candidates == b.candidates);
  }

  TEST_CASE("cover directions are unit vectors") {
    for (int n = 2; n <= 3; ++n)
      for (const Vec& v : cover_directions(n, 64)) CHECK(std::abs(v.norm() - 1.0) <= 1e-12);
  }

  TEST_CASE("cylinder orientations are orthonormal frames") {
    for (const auto& A : cylinder_orientations(3, 1, 20)) {
      CHECK(A.rows() == 3);
      CHECK(A.cols() == 1);
      CHECK((A.transpose() * A - Eigen::MatrixXd::Identity(1, 1)).norm() <= 1e-12);
    }
  }
}
