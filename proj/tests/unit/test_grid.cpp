#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "../support/oracles.hpp"
#include "tvdd/errors.hpp"
#include "tvdd/grid.hpp"

using namespace tvdd;

TEST_SUITE("grid_core") {

TEST_CASE("gradient of a constant image vanishes") {
  const DualField g = gradient(Image(5, 7, 0.3));
  CHECK(max_magnitude(g) == 0.0);
}

TEST_CASE("gradient fixture 2x2") {
  const Image u(2, 2, {0.0, 1.0, 2.0, 3.0});
  const DualField g = gradient(u);
  CHECK(g.down(0, 0) == 2.0);
  CHECK(g.down(0, 1) == 2.0);
  CHECK(g.down(1, 0) == 0.0);
  CHECK(g.down(1, 1) == 0.0);
  CHECK(g.right(0, 0) == 1.0);
  CHECK(g.right(0, 1) == 0.0);
  CHECK(g.right(1, 0) == 1.0);
  CHECK(g.right(1, 1) == 0.0);
}

TEST_CASE("divergence of zero field is zero") {
  const Image d = divergence(DualField(4, 6));
  for (double v : d.values()) CHECK(v == 0.0);
}

TEST_CASE("divergence on a 1x1 grid is identically zero") {
  // The only adjoint of the (zero) gradient on one pixel is zero.
  const DualField p(1, 1, {0.7}, {-0.4});
  CHECK(divergence(p)(0, 0) == 0.0);
}

TEST_CASE("degenerate strips: one row or one column") {
  std::mt19937_64 rng(11);
  for (auto [m, n] : {std::pair{1, 6}, std::pair{6, 1}}) {
    const DualField p = oracle::random_field(m, n, rng);
    const Image u = oracle::random_image(m, n, rng);
    CHECK(std::abs(inner_product(gradient(u), p) + inner_product(u, divergence(p))) < 1e-13);
  }
}

TEST_CASE("gradient and divergence match the reference case split") {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 10; ++trial) {
    std::uniform_int_distribution<int> dim(1, 20);
    const int m = dim(rng);
    const int n = dim(rng);
    const DualField p = oracle::random_field(m, n, rng);
    const Image u = oracle::random_image(m, n, rng);
    const Image d = divergence(p);
    const Image dr = oracle::divergence(p);
    for (std::size_t k = 0; k < d.values().size(); ++k) CHECK(d.values()[k] == doctest::Approx(dr.values()[k]).epsilon(1e-15));
    CHECK(gradient(u) == oracle::gradient(u));
  }
}

TEST_CASE("adjointness on random 7x5 to 1e-12") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const Image u = oracle::random_image(7, 5, rng, -1.0, 1.0);
    const DualField p = oracle::random_field(7, 5, rng);
    const double lhs = oracle::dot(oracle::gradient(u), p);
    const double rhs = -oracle::dot(u, divergence(p));
    CHECK(std::abs(lhs - rhs) <= 1e-12);
  }
}

TEST_CASE("adjointness on random grids up to 64x64") {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> dim(1, 64);
  for (int trial = 0; trial < 30; ++trial) {
    const int m = dim(rng);
    const int n = dim(rng);
    const Image u = oracle::random_image(m, n, rng, -1.0, 1.0);
    const DualField p = oracle::random_field(m, n, rng);
    const double a = inner_product(gradient(u), p);
    const double b = inner_product(u, divergence(p));
    CHECK(std::abs(a + b) <= 1e-10 * (1.0 + std::abs(a)));
  }
}

TEST_CASE("divergence operator norm bound 8") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const DualField p = oracle::random_field(16, 12, rng);
    CHECK(squared_norm(divergence(p)) <= 8.0 * squared_norm(p));
  }
  // Checkerboard of alternating signs comes close to the bound.
  DualField p(32, 32);
  for (int i = 0; i < 32; ++i)
    for (int j = 0; j < 32; ++j) p.down(i, j) = p.right(i, j) = ((i + j) % 2 == 0 ? 1.0 : -1.0);
  CHECK(squared_norm(divergence(p)) <= 8.0 * squared_norm(p));
  CHECK(squared_norm(divergence(p)) > 7.0 * squared_norm(p));
}

TEST_CASE("dual energy values") {
  std::mt19937_64 rng(5);
  const Image f = oracle::random_image(4, 4, rng);
  SUBCASE("zero field gives alpha^2 ||f||^2 / 2") {
    const RofProblem prob(f, 3.0);
    CHECK(dual_energy(DualField(4, 4), prob) == doctest::Approx(0.5 * 9.0 * oracle::norm2(f)).epsilon(1e-14));
  }
  SUBCASE("zero data and zero field") {
    CHECK(dual_energy(DualField(4, 4), RofProblem(Image(4, 4), 1.0)) == 0.0);
  }
  SUBCASE("fixed field against elementwise summation") {
    const DualField p = oracle::random_field(4, 4, rng);
    const RofProblem prob(f, 2.5);
    CHECK(dual_energy(p, prob) == doctest::Approx(oracle::energy(p, f, 2.5)).epsilon(1e-14));
  }
  SUBCASE("dimension mismatch") {
    CHECK_THROWS_AS(dual_energy(DualField(3, 4), RofProblem(f, 1.0)), InvalidArgument);
  }
}

TEST_CASE("problem rejects nonpositive alpha") {
  CHECK_THROWS_AS(RofProblem(Image(2, 2), 0.0), InvalidArgument);
  CHECK_THROWS_AS(RofProblem(Image(2, 2), -1.0), InvalidArgument);
  CHECK_THROWS_AS(RofProblem(Image(2, 2), std::nan("")), InvalidArgument);
}

TEST_CASE("dual energy is convex along segments") {
  std::mt19937_64 rng(9);
  const RofProblem prob(oracle::random_image(10, 9, rng), 4.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const DualField p = oracle::random_field(10, 9, rng);
    const DualField q = oracle::random_field(10, 9, rng);
    const double t = unit(rng);
    const double mid = dual_energy(t * p + (1.0 - t) * q, prob);
    CHECK(mid <= t * dual_energy(p, prob) + (1.0 - t) * dual_energy(q, prob) + 1e-10);
  }
}

TEST_CASE("energy gradient matches central differences") {
  std::mt19937_64 rng(13);
  const RofProblem prob(oracle::random_image(6, 5, rng), 2.0);
  const DualField p = oracle::random_field(6, 5, rng);
  const DualField g = dual_energy_gradient(p, prob);
  const DualField dir = oracle::random_field(6, 5, rng);
  const double h = 1e-5;
  const double fd = (dual_energy(p + h * dir, prob) - dual_energy(p - (h * dir), prob)) / (2.0 * h);
  const double an = oracle::dot(g, dir);
  CHECK(std::abs(fd - an) <= 1e-6 * std::max(1.0, std::abs(an)));
}

TEST_CASE("projection onto unit disks") {
  SUBCASE("feasible fields are unchanged") {
    std::mt19937_64 rng(17);
    const DualField p = oracle::random_feasible(8, 8, rng);
    CHECK(project_to_unit_disks(p) == p);
  }
  SUBCASE("radial scaling of a single pixel") {
    const DualField q = project_to_unit_disks(DualField(1, 1, {2.0}, {0.0}));
    CHECK(q.down(0, 0) == 1.0);
    CHECK(q.right(0, 0) == 0.0);
  }
  SUBCASE("idempotent and nonexpansive") {
    std::mt19937_64 rng(19);
    for (int trial = 0; trial < 50; ++trial) {
      const DualField p = oracle::random_field(7, 6, rng, 3.0);
      const DualField q = oracle::random_field(7, 6, rng, 3.0);
      const DualField pp = project_to_unit_disks(p);
      CHECK(project_to_unit_disks(pp) == pp);
      CHECK(max_magnitude(pp) <= 1.0 + 1e-15);
      CHECK(squared_norm(pp - project_to_unit_disks(q)) <= squared_norm(p - q) + 1e-12);
    }
  }
}

TEST_CASE("primal recovery") {
  std::mt19937_64 rng(23);
  const Image f = oracle::random_image(5, 4, rng);
  SUBCASE("zero field returns the data") {
    const Image u = recover_primal(DualField(5, 4), RofProblem(f, 3.0));
    CHECK(u.values().size() == f.values().size());
    for (std::size_t k = 0; k < f.values().size(); ++k) CHECK(u.values()[k] == f.values()[k]);
  }
  SUBCASE("alpha 1 and zero data give div p") {
    const DualField p = oracle::random_field(5, 4, rng);
    const Image u = recover_primal(p, RofProblem(Image(5, 4), 1.0));
    const Image d = oracle::divergence(p);
    for (std::size_t k = 0; k < d.values().size(); ++k) CHECK(u.values()[k] == doctest::Approx(d.values()[k]).epsilon(1e-15));
  }
}

TEST_CASE("recovered primal solves the primal ROF problem on 8x8") {
  // Certificate: with u = f + div p / alpha and P the primal objective,
  //   alpha/2 ||u - u*||^2 <= P(u) - P(u*) <= P(u) - (alpha/2 ||f||^2 - F(p)/alpha),
  // so a tiny duality gap pins u to the primal minimizer. Subgradient descent
  // from scratch must not find anything better.
  std::mt19937_64 rng(29);
  const double alpha = 6.0;
  const Image f = oracle::random_image(8, 8, rng);
  const RofProblem prob(f, alpha);
  DualField p = oracle::projected_gradient(f, alpha, 200000, DualField(8, 8));
  const Image u = recover_primal(p, prob);
  const double dual_value = 0.5 * alpha * oracle::norm2(f) - oracle::energy(p, f, alpha) / alpha;
  const double gap = oracle::primal(u, f, alpha) - dual_value;
  CHECK(gap >= -1e-10);
  const double distance_bound = std::sqrt(2.0 * std::max(gap, 0.0) / alpha);
  CHECK(distance_bound < 1e-4);

  Image v = f;
  Image best = v;
  double best_value = oracle::primal(v, f, alpha);
  for (int k = 0; k < 200000; ++k) {
    // Subgradient of TV at v plus alpha (v - f), step 1 / (alpha (k + 1)).
    const DualField g = oracle::gradient(v);
    DualField unit(8, 8);
    for (int i = 0; i < 8; ++i) {
      for (int j = 0; j < 8; ++j) {
        const double m = std::hypot(g.down(i, j), g.right(i, j));
        if (m > 0.0) {
          unit.down(i, j) = g.down(i, j) / m;
          unit.right(i, j) = g.right(i, j) / m;
        }
      }
    }
    const Image tv_sub = oracle::divergence(unit);  // subgradient is -div(unit)
    const double step = 1.0 / (alpha * (k + 1));
    for (int i = 0; i < 8; ++i)
      for (int j = 0; j < 8; ++j) v(i, j) -= step * (-tv_sub(i, j) + alpha * (v(i, j) - f(i, j)));
    const double value = oracle::primal(v, f, alpha);
    if (value < best_value) {
      best_value = value;
      best = v;
    }
  }
  CHECK(oracle::primal(u, f, alpha) <= best_value + 1e-9);
  // Strong convexity also bounds the subgradient iterate's distance.
  const double sub_distance = std::sqrt(2.0 * (best_value - dual_value) / alpha);
  double max_diff = 0.0;
  for (std::size_t k = 0; k < u.values().size(); ++k)
    max_diff = std::max(max_diff, std::abs(u.values()[k] - best.values()[k]));
  CHECK(max_diff <= sub_distance + distance_bound + 1e-12);
}

TEST_CASE("psnr") {
  SUBCASE("2x2 with squared error 0.04 is 20 dB") {
    const Image ref(2, 2, 0.5);
    const Image u(2, 2, {0.6, 0.5, 0.5, 0.5 + std::sqrt(0.03)});
    CHECK(psnr(u, ref) == doctest::Approx(20.0).epsilon(1e-12));
  }
  SUBCASE("squared error equal to pixel count is 0 dB") {
    CHECK(psnr(Image(3, 3, 1.0), Image(3, 3, 0.0)) == doctest::Approx(0.0));
  }
  SUBCASE("identical images") {
    CHECK(psnr(Image(2, 3, 0.25), Image(2, 3, 0.25)) == std::numeric_limits<double>::infinity());
  }
  SUBCASE("mismatched sizes") {
    CHECK_THROWS_AS(psnr(Image(2, 3), Image(3, 2)), InvalidArgument);
  }
}

}  // TEST_SUITE
