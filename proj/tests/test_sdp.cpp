#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <random>
#include <sstream>

#include "switchcert/sdp.hpp"

using namespace switchcert;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

MatrixXd random_sym(std::mt19937_64& rng, int n, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  MatrixXd m(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) m(i, j) = m(j, i) = u(rng);
  }
  return m;
}

MatrixXd random_spd(std::mt19937_64& rng, int n) {
  MatrixXd g = random_sym(rng, n);
  return g * g.transpose() + 0.5 * MatrixXd::Identity(n, n);
}

void add_sym_block(sdp::Problem& prob, int row, int block, const MatrixXd& a) {
  for (int i = 0; i < a.rows(); ++i) {
    for (int j = 0; j <= i; ++j) {
      if (a(i, j) != 0.0) prob.add_entry(row, block, i, j, a(i, j));
    }
  }
}

}  // namespace

TEST_CASE("minimum eigenvalue program") {
  sdp::Problem prob({2});
  prob.add_objective_entry(0, 0, 0, 1.0);
  prob.add_objective_entry(0, 1, 1, 2.0);
  const int r = prob.add_constraint(1.0);
  prob.add_entry(r, 0, 0, 0, 1.0);
  prob.add_entry(r, 0, 1, 1, 1.0);

  const auto sol = sdp::solve(prob);
  REQUIRE(sol.status == sdp::Status::Optimal);
  CHECK(sol.primal_obj == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(sol.X[0](0, 0) == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(sol.X[0](1, 1) == doctest::Approx(0.0).epsilon(1e-5));
  CHECK(sol.primal_res <= 1e-7);
  CHECK(sol.dual_res <= 1e-7);
}

TEST_CASE("trace of a psd matrix cannot be negative") {
  sdp::Problem prob({2});
  const int r = prob.add_constraint(-1.0);
  prob.add_entry(r, 0, 0, 0, 1.0);
  prob.add_entry(r, 0, 1, 1, 1.0);

  const auto sol = sdp::solve(prob);
  REQUIRE(sol.status == sdp::Status::PrimalInfeasible);
  REQUIRE(sol.infeasibility_ray.size() == 1);
  const double y = sol.infeasibility_ray[0];
  CHECK(-1.0 * y > 0);            // b'y > 0
  CHECK(y <= 1e-8);               // y * I must be psd-negative
}

TEST_CASE("weak duality holds along the trace") {
  std::mt19937_64 rng(5);
  sdp::Problem prob({3});
  const MatrixXd c = random_sym(rng, 3) + 3 * MatrixXd::Identity(3, 3);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j <= i; ++j) prob.add_objective_entry(0, i, j, c(i, j));
  }
  const int r = prob.add_constraint(1.0);
  prob.add_entry(r, 0, 0, 0, 1.0);
  prob.add_entry(r, 0, 1, 1, 1.0);
  prob.add_entry(r, 0, 2, 2, 1.0);

  const auto sol = sdp::solve(prob);
  REQUIRE(sol.status == sdp::Status::Optimal);
  for (const auto& it : sol.trace) {
    CHECK(it.primal_obj >= it.dual_obj - 1e-6 * (1 + std::abs(it.primal_obj)) - it.gap);
  }
}

TEST_CASE("random strictly feasible problems are solved to KKT accuracy") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 8; ++trial) {
    const std::vector<int> dims{5};
    const int k = 8;
    sdp::Problem prob(dims);

    const MatrixXd x0 = random_spd(rng, 5);
    const MatrixXd s0 = random_spd(rng, 5);
    VectorXd y0(k);
    for (int i = 0; i < k; ++i) y0[i] = std::uniform_real_distribution<double>(-1, 1)(rng);

    std::vector<MatrixXd> as;
    MatrixXd cmat = s0;
    for (int i = 0; i < k; ++i) {
      as.push_back(random_sym(rng, 5));
      cmat += y0[i] * as[i];
    }
    for (int i = 0; i < 5; ++i) {
      for (int j = 0; j <= i; ++j) prob.add_objective_entry(0, i, j, cmat(i, j));
    }
    for (int i = 0; i < k; ++i) {
      const double rhs = (as[i].array() * x0.array()).sum();
      const int r = prob.add_constraint(rhs);
      add_sym_block(prob, r, 0, as[i]);
    }

    const auto sol = sdp::solve(prob);
    REQUIRE(sol.status == sdp::Status::Optimal);

    // KKT residuals recomputed from scratch.
    double pres = 0;
    for (int i = 0; i < k; ++i) {
      pres += std::pow((as[i].array() * sol.X[0].array()).sum() - prob.rhs(i), 2);
    }
    pres = std::sqrt(pres);
    MatrixXd slack = cmat;
    for (int i = 0; i < k; ++i) slack -= sol.y[i] * as[i];
    const double dres = (slack - sol.S[0]).norm();
    const double comp = (sol.X[0].array() * sol.S[0].array()).sum();
    CHECK(pres <= 1e-7 * (1 + std::abs(prob.rhs(0))));
    CHECK(dres <= 1e-7 * (1 + cmat.norm()));
    CHECK(comp <= 1e-6 * (1 + std::abs(sol.primal_obj)));
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(sol.X[0]);
    CHECK(es.eigenvalues().minCoeff() >= -1e-8 * (1 + sol.X[0].norm()));
  }
}

TEST_CASE("constructed infeasible problems yield verified rays") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 5; ++trial) {
    const int n = 4, k = 5;
    sdp::Problem prob({n});
    // sum_i A_i = -S0 (strictly negative definite), b with sum b_i = 1:
    // then y = ones is a Farkas certificate and no psd X can satisfy A(X)=b.
    const MatrixXd s0 = random_spd(rng, n);
    std::vector<MatrixXd> as;
    MatrixXd acc = MatrixXd::Zero(n, n);
    for (int i = 0; i < k - 1; ++i) {
      as.push_back(random_sym(rng, n));
      acc += as.back();
    }
    as.push_back(-s0 - acc);
    for (int i = 0; i < k; ++i) {
      const int r = prob.add_constraint(i == 0 ? 1.0 : 0.0);
      add_sym_block(prob, r, 0, as[i]);
    }

    const auto sol = sdp::solve(prob);
    REQUIRE(sol.status == sdp::Status::PrimalInfeasible);
    const VectorXd& ray = sol.infeasibility_ray;
    REQUIRE(ray.size() == k);
    double bty = ray[0];
    CHECK(bty > 0);
    MatrixXd aty = MatrixXd::Zero(n, n);
    for (int i = 0; i < k; ++i) aty += ray[i] * as[i];
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(aty);
    CHECK(es.eigenvalues().maxCoeff() <= 1e-6 * (1 + aty.norm()));
  }
}

TEST_CASE("free variables with objective") {
  // minimize -u subject to X + u = 2 with scalar psd X: optimum u = 2, X = 0.
  sdp::Problem prob({1}, 1);
  prob.add_free_objective(0, -1.0);
  const int r = prob.add_constraint(2.0);
  prob.add_entry(r, 0, 0, 0, 1.0);
  prob.add_free_entry(r, 0, 1.0);

  const auto sol = sdp::solve(prob);
  REQUIRE(sol.status == sdp::Status::Optimal);
  CHECK(sol.free_values[0] == doctest::Approx(2.0).epsilon(1e-5));
  CHECK(sol.X[0](0, 0) == doctest::Approx(0.0).epsilon(1e-4));
  CHECK(sol.primal_obj == doctest::Approx(-2.0).epsilon(1e-5));
}

TEST_CASE("linearly inconsistent rows are reported infeasible with a ray") {
  sdp::Problem prob({2}, 1);
  // Same linear functional forced to two different values.
  const int r1 = prob.add_constraint(1.0);
  prob.add_entry(r1, 0, 0, 0, 1.0);
  prob.add_free_entry(r1, 0, 1.0);
  const int r2 = prob.add_constraint(2.0);
  prob.add_entry(r2, 0, 0, 0, 1.0);
  prob.add_free_entry(r2, 0, 1.0);

  const auto sol = sdp::solve(prob);
  REQUIRE(sol.status == sdp::Status::PrimalInfeasible);
  REQUIRE(sol.infeasibility_ray.size() == 2);
  // Ray must annihilate both the psd and the free columns and have b'y > 0.
  CHECK(std::abs(sol.infeasibility_ray[0] + sol.infeasibility_ray[1]) <= 1e-9);
  CHECK(sol.infeasibility_ray[0] + 2 * sol.infeasibility_ray[1] > 0.5);
}

TEST_CASE("redundant consistent rows are tolerated") {
  sdp::Problem prob({2}, 1);
  const int r1 = prob.add_constraint(1.0);
  prob.add_entry(r1, 0, 0, 0, 1.0);
  prob.add_free_entry(r1, 0, 1.0);
  const int r2 = prob.add_constraint(2.0);  // exactly twice row 1
  prob.add_entry(r2, 0, 0, 0, 2.0);
  prob.add_free_entry(r2, 0, 2.0);
  const int r3 = prob.add_constraint(0.5);
  prob.add_entry(r3, 0, 1, 1, 1.0);

  const auto sol = sdp::solve(prob);
  REQUIRE(sol.status == sdp::Status::Optimal);
  CHECK(sol.X[0](1, 1) == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(sol.X[0](0, 0) + sol.free_values[0] == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("debug dump has one line per nonzero") {
  sdp::Problem prob({2}, 1);
  prob.add_objective_entry(0, 1, 0, 3.0);
  const int r = prob.add_constraint(1.0);
  prob.add_entry(r, 0, 0, 0, 1.0);
  prob.add_free_entry(r, 0, -1.0);
  std::ostringstream os;
  prob.write_debug_dump(os);
  const std::string dump = os.str();
  CHECK(dump.find("c 0 0 1 0 3") != std::string::npos);
  CHECK(dump.find("a 1 0 0 0 1") != std::string::npos);
  CHECK(dump.find("f 1 0 0 0 -1") != std::string::npos);
  CHECK(dump.find("b 1 0 0 0 1") != std::string::npos);
}
