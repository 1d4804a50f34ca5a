#include <doctest.h>

#include <random>

#include "tvaoi/generator.hpp"

using namespace tvaoi;

namespace {
const StateSpace kOne(1);
const RateSample kUnitRates{{1.0}, {2.0}};
}  // namespace

TEST_CASE("N=1 generator rows") {
  const auto g = build_generator(kOne, kUnitRates);
  CHECK(g.Q.row(0) == Eigen::RowVector3d(-1, 1, 0));
  CHECK(g.Q.row(1) == Eigen::RowVector3d(2, -3, 1));
  CHECK(g.Q.row(2) == Eigen::RowVector3d(0, 2, -2));
  CHECK(g.M_comp.row(2) == Eigen::RowVector3d(0, 2, 0));
  CHECK(g.M_comp.row(1) == Eigen::RowVector3d(2, 0, 0));
  CHECK(g.M_next[0].row(2) == Eigen::RowVector3d(0, 2, 0));
  CHECK(g.M_next[0].row(1).isZero());
}

TEST_CASE("indicators") {
  const auto one = indicators(kOne);
  CHECK(one.busy == Eigen::RowVector3d(0, 1, 1));
  CHECK(one.waiting_class(1) == Eigen::RowVector3d(0, 0, 1));
  const StateSpace two(2);
  const auto ind = indicators(two);
  for (std::size_t pos = 0; pos < two.size(); ++pos) {
    CHECK(ind.next_class_is(1)(static_cast<Eigen::Index>(pos)) == (two[pos].waiting(1) ? 1.0 : 0.0));
  }
  CHECK(ind.busy == ind.serving_class(1) + ind.serving_class(2));
  CHECK(ind.serving_class(1).dot(ind.serving_class(2)) == 0.0);
}

TEST_CASE("N=1 reduction matches the hand-derived form") {
  const auto r = reduce(build_generator(kOne, kUnitRates));
  Eigen::Matrix2d expected;
  expected << -1, -1, 2, -5;
  CHECK(r.Q_red.isApprox(expected));
  CHECK(r.beta.isApprox(Eigen::RowVector2d(0, 2)));
  CHECK((r.Q_red.rowwise().sum().array() < 0).all());
}

TEST_CASE("reduction equals the explicit T Q E and b Q E products") {
  const StateSpace space(3);
  const auto g = build_generator(space, reference_scenario(), 1.3);
  const auto n = static_cast<Eigen::Index>(space.size());
  const Eigen::Index m = n - 1;
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, n);
  T.leftCols(m).setIdentity();
  T.col(m).setConstant(-1.0);
  Eigen::MatrixXd E = Eigen::MatrixXd::Zero(n, m);
  E.topRows(m).setIdentity();
  Eigen::RowVectorXd b = Eigen::RowVectorXd::Zero(n);
  b(m) = 1.0;
  const auto r = reduce(g);
  CHECK((r.Q_red - T * g.Q * E).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK((r.beta - b * g.Q * E).cwiseAbs().maxCoeff() <= 1e-12);

  // Identity sanity: p = e_last gives beta.
  CHECK(r.beta.isApprox(g.Q.row(m).head(m)));

  // Random probability vectors.
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 20; ++i) {
    Eigen::RowVectorXd p(n);
    for (Eigen::Index j = 0; j < n; ++j) p(j) = u(rng);
    p /= p.sum();
    const Eigen::RowVectorXd lhs = p * g.Q * E;
    const Eigen::RowVectorXd rhs = p.head(m) * r.Q_red + r.beta;
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-12);
  }
  CHECK((r.Q_red.rowwise().sum().array() < 0).all());
}

TEST_CASE("generator invariants on random times") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ut(0.0, 10.0);
  const Scenario sc = reference_scenario();
  for (int n = 1; n <= 3; ++n) {
    std::vector<RateProfile> arr, ser;
    for (int k = 1; k <= n; ++k) {
      arr.push_back(sc.arrival(k));
      ser.push_back(sc.service(k));
    }
    const Scenario s(10.0, arr, ser);
    const StateSpace space(n);
    for (int i = 0; i < 30; ++i) {
      const auto g = build_generator(space, s, ut(rng));
      CHECK(g.Q.rowwise().sum().cwiseAbs().maxCoeff() <= 1e-12);
      Eigen::MatrixXd off = g.Q;
      off.diagonal().setZero();
      CHECK(off.minCoeff() >= 0.0);
      Eigen::MatrixXd sum_class = Eigen::MatrixXd::Zero(g.Q.rows(), g.Q.cols());
      Eigen::MatrixXd sum_next = sum_class;
      for (int k = 0; k < n; ++k) {
        sum_class += g.M_class[static_cast<std::size_t>(k)];
        sum_next += g.M_next[static_cast<std::size_t>(k)];
        CHECK((g.M_class[static_cast<std::size_t>(k)].array() <= g.M_comp.array()).all());
        CHECK(g.M_next[static_cast<std::size_t>(k)].diagonal().isZero());
      }
      CHECK(sum_class == g.M_comp);
      // Completions not counted by any M_next go to idle.
      Eigen::MatrixXd to_idle = g.M_comp - sum_next;
      CHECK(to_idle.rightCols(to_idle.cols() - 1).isZero());
      CHECK(g.M_comp.diagonal().isZero());
      CHECK(g.M_comp.minCoeff() >= 0.0);
      for (Eigen::Index r = 0; r < g.Q.rows(); ++r) {
        for (Eigen::Index c = 0; c < g.Q.cols(); ++c) {
          if (g.M_comp(r, c) != 0.0) CHECK(g.M_comp(r, c) == g.Q(r, c));
        }
      }
    }
  }
}

TEST_CASE("outage nullity") {
  const StateSpace space(3);
  const auto g = build_generator(space, reference_scenario(), 7.0);
  CHECK(g.M_comp.isZero());
  for (std::size_t pos = 0; pos < space.size(); ++pos) {
    if (space[pos].is_idle()) continue;
    CHECK(g.Q(static_cast<Eigen::Index>(pos), static_cast<Eigen::Index>(space.completion_target_at(pos))) == 0.0);
  }
}
