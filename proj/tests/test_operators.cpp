#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "splitstab/operators.hpp"

using namespace splitstab;

namespace {

double sbp_defect(const Operator& op) {
  Mat Q = op.q_mat();
  return (Q + Q.transpose() - op.e_mat).array().abs().maxCoeff();
}

// Largest relative error of D x^k vs k x^(k-1) over rows [r0, r1).
double exactness_err(const Operator& op, int k, int r0, int r1) {
  Vec xk = op.nodes.array().pow(k);
  Vec want = (k == 0) ? Vec::Zero(op.n_nodes)
                      : Vec(double(k) * op.nodes.array().pow(k - 1));
  Vec got = op.d_mat * xk;
  double scale = std::max(1.0, want.array().abs().maxCoeff());
  double err = 0.0;
  for (int i = r0; i < r1; ++i) err = std::max(err, std::abs(got(i) - want(i)) / scale);
  return err;
}

double quadrature_err(const Operator& op, int k) {
  double got = (op.h_diag.array() * op.nodes.array().pow(k)).sum();
  return std::abs(got - 1.0 / (k + 1));
}

}  // namespace

TEST_CASE("csbp p=1 basics") {
  auto op = build_csbp(1, 5);
  REQUIRE(op.n_nodes == 5);
  REQUIRE((op.d_mat * Vec::Ones(5)).array().abs().maxCoeff() < 1e-14);

  Mat QQt = op.q_mat() + op.q_mat().transpose();
  Mat want = Mat::Zero(5, 5);
  want(0, 0) = -1.0;
  want(4, 4) = 1.0;
  REQUIRE((QQt - want).array().abs().maxCoeff() < 1e-14);

  // Closure rows are the one-sided differences of the classical operator.
  const double h = 0.25;
  REQUIRE(op.d_mat(0, 0) == Catch::Approx(-1.0 / h).margin(1e-13));
  REQUIRE(op.d_mat(0, 1) == Catch::Approx(1.0 / h).margin(1e-13));
  REQUIRE(op.d_mat(2, 1) == Catch::Approx(-0.5 / h).margin(1e-13));
  REQUIRE(op.d_mat(2, 3) == Catch::Approx(0.5 / h).margin(1e-13));
}

TEST_CASE("csbp p=2 interior order") {
  auto op = build_csbp(2, 12);
  REQUIRE(exactness_err(op, 3, 4, 8) < 1e-12);  // D x^3 = 3x^2 on interior rows
}

TEST_CASE("csbp invariants across p") {
  for (int p = 1; p <= 4; ++p) {
    for (int n : {5 * p, 25}) {
      INFO("p=" << p << " n=" << n);
      auto op = build_csbp(p, n);
      REQUIRE(op.h_diag.minCoeff() > 0.0);
      REQUIRE(sbp_defect(op) < 1e-13);
      Mat ewant = op.tr * op.tr.transpose() - op.tl * op.tl.transpose();
      REQUIRE((op.e_mat - ewant).array().abs().maxCoeff() == 0.0);

      const int r = 2 * p;
      for (int k = 0; k <= p; ++k) REQUIRE(exactness_err(op, k, 0, n) < 1e-12);
      for (int k = 0; k <= 2 * p; ++k) REQUIRE(exactness_err(op, k, r, n - r) < 1e-12);
      for (int k = 0; k <= p; ++k) REQUIRE(quadrature_err(op, k) < 1e-12);
    }
  }
}

TEST_CASE("csbp p=3 uses the pinned boundary norm") {
  auto op = build_csbp(3, 25);
  const double h = 1.0 / 24.0;
  REQUIRE(op.h_diag(0) / h == Catch::Approx(13649.0 / 43200.0).epsilon(1e-13));
  REQUIRE(op.h_diag(5) / h == Catch::Approx(43801.0 / 43200.0).epsilon(1e-13));
}

TEST_CASE("csbp size errors name the minimum") {
  REQUIRE_THROWS_AS(build_csbp(2, 9), std::invalid_argument);
  try {
    build_csbp(2, 9);
  } catch (const std::invalid_argument& e) {
    REQUIRE(std::string(e.what()).find("10") != std::string::npos);
  }
  REQUIRE_THROWS_AS(build_csbp(0, 40), std::invalid_argument);
  REQUIRE_THROWS_AS(build_csbp(5, 40), std::invalid_argument);
}

TEST_CASE("circulant order 2 stencil") {
  const double h = 0.2;
  auto op = build_circulant(2, 5, h);
  Mat D = op.d_mat;
  for (int i = 0; i < 5; ++i) {
    REQUIRE(D(i, i) == 0.0);
    REQUIRE(D(i, (i + 1) % 5) == Catch::Approx(1.0 / (2 * h)).margin(1e-14));
    REQUIRE(D(i, (i + 4) % 5) == Catch::Approx(-1.0 / (2 * h)).margin(1e-14));
  }
  REQUIRE((op.d_mat * Vec::Ones(5)).array().abs().maxCoeff() == 0.0);
  Mat Q = op.q_mat();
  REQUIRE((Q + Q.transpose()).array().abs().maxCoeff() == 0.0);
  REQUIRE(op.e_mat.array().abs().maxCoeff() == 0.0);
}

TEST_CASE("circulant order 8 converges at 8th order") {
  auto err_for = [](int n) {
    auto op = build_circulant(8, n, 1.0 / n);
    Vec f(n), want(n);
    for (int i = 0; i < n; ++i) {
      const double x = double(i) / n;
      f(i) = std::sin(2 * M_PI * x);
      want(i) = 2 * M_PI * std::cos(2 * M_PI * x);
    }
    return ((op.d_mat * f - want).array().abs()).maxCoeff();
  };
  const double e1 = err_for(39), e2 = err_for(78);
  REQUIRE(e1 < 1e-6);
  const double ratio = e1 / e2;
  REQUIRE(ratio > 180.0);
  REQUIRE(ratio < 330.0);
}

TEST_CASE("circulant rejects short grids") {
  REQUIRE_THROWS_AS(build_circulant(8, 8, 0.1), std::invalid_argument);
  REQUIRE_THROWS_AS(build_circulant(3, 30, 0.1), std::invalid_argument);
  REQUIRE_THROWS_AS(build_circulant(2, 5, 0.0), std::invalid_argument);
}

TEST_CASE("lgl p=1 analytic operator") {
  auto op = build_lgl(1);
  REQUIRE(op.nodes(0) == Catch::Approx(0.0).margin(1e-15));
  REQUIRE(op.nodes(1) == Catch::Approx(1.0).margin(1e-15));
  REQUIRE(op.h_diag(0) == Catch::Approx(0.5).margin(1e-15));
  REQUIRE(op.h_diag(1) == Catch::Approx(0.5).margin(1e-15));
  Mat want(2, 2);
  want << -1, 1, -1, 1;
  REQUIRE((op.d_mat - want).array().abs().maxCoeff() < 1e-14);
}

TEST_CASE("lgl p=4 quadrature and exactness") {
  auto op = build_lgl(4);
  REQUIRE(op.h_diag.sum() == Catch::Approx(1.0).epsilon(1e-14));
  REQUIRE(exactness_err(op, 4, 0, op.n_nodes) < 1e-12);
  for (int k = 0; k <= 7; ++k) REQUIRE(quadrature_err(op, k) < 1e-12);  // degree 2p-1
  REQUIRE(sbp_defect(op) < 1e-13);
}

TEST_CASE("lgl invariants across p") {
  for (int p : {2, 5, 9, 15}) {
    INFO("p=" << p);
    auto op = build_lgl(p);
    REQUIRE(op.n_nodes == p + 1);
    REQUIRE(op.h_diag.minCoeff() > 0.0);
    REQUIRE(sbp_defect(op) < 1e-13);
    for (int k = 0; k <= p; ++k) REQUIRE(exactness_err(op, k, 0, op.n_nodes) < 1e-12);
  }
  REQUIRE_THROWS_AS(build_lgl(0), std::invalid_argument);
  REQUIRE_THROWS_AS(build_lgl(16), std::invalid_argument);
}

TEST_CASE("grid assembly") {
  SECTION("single csbp block on [0,1]") {
    auto g = assemble_grid(0.0, 1.0, 1, build_csbp(1, 40));
    REQUIRE(g.n_total() == 40);
    REQUIRE(std::abs(g.h_global.sum() - 1.0) < 1e-13);
    REQUIRE(g.x(0) == 0.0);
    REQUIRE(g.x(39) == 1.0);
  }
  SECTION("two blocks share the interface coordinate") {
    auto g = assemble_grid(-1.0, 1.0, 2, build_csbp(2, 11));
    REQUIRE(g.n_total() == 22);
    REQUIRE(g.x(g.gid(0, 10)) == g.x(g.gid(1, 0)));
    REQUIRE(g.x(g.gid(0, 10)) == 0.0);
    REQUIRE(std::abs(g.h_global.sum() - 2.0) < 1e-13);
  }
  SECTION("20 lgl p=4 elements give 100 nodes") {
    auto g = assemble_grid(0.0, 1.0, 20, build_lgl(4));
    REQUIRE(g.n_total() == 100);
    REQUIRE(std::abs(g.h_global.sum() - 1.0) < 1e-13);
  }
  SECTION("circulant block covers the periodic cell") {
    auto g = assemble_grid(-1.0, 1.0, 1, build_circulant(8, 39, 1.0 / 39.0));
    REQUIRE(g.n_total() == 39);
    REQUIRE(std::abs(g.h_global.sum() - 2.0) < 1e-13);
    REQUIRE(g.x(0) == -1.0);
    REQUIRE(g.x(38) == Catch::Approx(-1.0 + 2.0 * 38.0 / 39.0).margin(1e-14));
    REQUIRE_THROWS_AS(assemble_grid(0.0, 1.0, 2, build_circulant(8, 39, 1.0 / 39.0)),
                      std::invalid_argument);
  }
}
