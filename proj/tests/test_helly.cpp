#include "doctest.h"

#include "epsc/helly.hpp"

#include <random>

using namespace epsc;

namespace {

std::vector<Grid> on_one_frame(const std::vector<BodyExpr>& bodies, double h) {
  std::vector<BBox> boxes;
  for (const auto& b : bodies) boxes.push_back(bounding_box(b));
  Grid fr = frame_for(boxes, h, 2 * h);
  std::vector<Grid> out;
  for (const auto& b : bodies) out.push_back(rasterize_in(b, fr.lo, fr.n, h));
  return out;
}

}  // namespace

TEST_SUITE("helly") {
  TEST_CASE("bound formula") {
    CHECK(helly_bound(3, 2, 0.9, 0.5, 0.1) == doctest::Approx(0.1));
    CHECK(helly_bound(6, 2, 0.8, 0.5, 0.05) == doctest::Approx(0.05 + 0.5 * 3 * 0.64 / 2));
    CHECK_THROWS(helly_bound(4, 2, 1.0, 0.5, 0.1));
  }

  TEST_CASE("Radon partitions reproduce a common point from convex weights") {
    std::mt19937_64 g(4);
    std::normal_distribution<double> N;
    for (int n = 2; n <= 4; ++n)
      for (int t = 0; t < 25; ++t) {
        Points P(n, n + 2);
        for (int j = 0; j < n + 2; ++j)
          for (int i = 0; i < n; ++i) P(i, j) = N(g);
        RadonPartition r = radon_partition(P);
        CHECK(r.A1.size() + r.A2.size() == static_cast<size_t>(n + 2));
        CHECK_FALSE(r.A1.empty());
        CHECK_FALSE(r.A2.empty());
        CHECK(r.coeff1.minCoeff() >= -1e-12);
        CHECK(r.coeff2.minCoeff() >= -1e-12);
        CHECK(r.coeff1.sum() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(r.coeff2.sum() == doctest::Approx(1.0).epsilon(1e-12));
        Vec a = Vec::Zero(n), b = Vec::Zero(n);
        for (size_t k = 0; k < r.A1.size(); ++k) a += r.coeff1[static_cast<Eigen::Index>(k)] * P.col(r.A1[k]);
        for (size_t k = 0; k < r.A2.size(); ++k) b += r.coeff2[static_cast<Eigen::Index>(k)] * P.col(r.A2[k]);
        CHECK((a - r.common).norm() <= 1e-9);
        CHECK((b - r.common).norm() <= 1e-9);
      }
  }

  TEST_CASE("ball minus cap") {
    BodyExpr b = ball_minus_cap(vec({0, 0}), 0.4, 0.5, 0.1, vec({0, 1}));
    CHECK(contains(b, vec({0, 0})));
    CHECK(contains(b, vec({0, -0.39})));
    CHECK_FALSE(contains(b, vec({0, 0.35})));
    CHECK(contains(b, vec({0, 0.29})));
  }

  TEST_CASE("discs through a common point: zero distance") {
    auto fam = on_one_frame({ball(vec({0.2, 0}), 0.3), ball(vec({-0.2, 0}), 0.3), ball(vec({0, 0.2}), 0.3),
                             ball(vec({0, -0.2}), 0.3)},
                            0.02);
    HellyReport r = verify_helly(fam, 0.5, 0.05);
    CHECK(r.hypothesis_ok);
    CHECK(r.max_dist == 0.0);
    CHECK(r.margin >= 0.0);
    CHECK(r.m == 4);
    CHECK(r.n == 2);
  }

  TEST_CASE("random families respect the bound") {
    std::mt19937_64 g(12);
    std::uniform_real_distribution<double> u(0, 1);
    int accepted = 0;
    for (int t = 0; t < 40 && accepted < 8; ++t) {
      std::vector<BodyExpr> bodies;
      for (int i = 0; i < 5; ++i) {
        double a = 2 * M_PI * u(g), r = 0.3 + 0.15 * u(g);
        Vec w = vec({std::cos(a), std::sin(a)});
        bodies.push_back(ball_minus_cap(-(r - 0.06 * u(g) + 0.03) * w, r, 0.5 / 1.2, 0.05 + 0.1 * u(g), w));
      }
      HellyReport rep = verify_helly(on_one_frame(bodies, 0.02), 0.5, 0.05);
      if (!rep.hypothesis_ok) continue;
      ++accepted;
      CHECK(rep.max_dist <= rep.bound + rep.slack);
    }
    CHECK(accepted >= 4);
  }

  TEST_CASE("preconditions") {
    auto fam = on_one_frame({ball(vec({0, 0}), 0.5), ball(vec({0.3, 0}), 0.5), ball(vec({0, 0.3}), 0.5)}, 0.05);
    CHECK_THROWS_AS(verify_helly(fam, 1.0, 0.05), PreconditionError);  // diameter 1 >= 1/(2 eps)
    Grid other = rasterize(ball(vec({5, 5}), 0.2), 0.05);
    CHECK_THROWS_AS(verify_helly({fam[0], fam[1], other}, 0.5, 0.05), PreconditionError);
  }
}
