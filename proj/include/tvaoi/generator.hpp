#pragma once

#include <Eigen/Dense>
#include <vector>

#include "tvaoi/rates.hpp"
#include "tvaoi/state_space.hpp"

namespace tvaoi {

/// Arrival and service rates of every class at one instant; entry k-1
/// holds class k.
struct RateSample {
  std::vector<double> lambda;
  std::vector<double> mu;
};

RateSample sample_rates(const Scenario& scenario, double t, Side side = Side::right);

/// Dense generator and completion matrices at one instant.
///
/// Every nonzero entry of an M matrix sits at (s, completion target of s) and
/// equals the matching entry of Q. `M_class[k-1]` keeps the completions of
/// class k; `M_next[k-1]` keeps the completions after which class k enters
/// service.
struct GeneratorSet {
  double t = 0.0;
  Eigen::MatrixXd Q;
  Eigen::MatrixXd M_comp;
  std::vector<Eigen::MatrixXd> M_class;
  std::vector<Eigen::MatrixXd> M_next;
};

GeneratorSet build_generator(const StateSpace& space, const RateSample& rates, double t = 0.0);
GeneratorSet build_generator(const StateSpace& space, const Scenario& scenario, double t,
                             Side side = Side::right);

/// Time-independent 0/1 state-predicate row vectors. Class indices are 1-based.
struct IndicatorVectors {
  Eigen::RowVectorXd busy;                   // J != 0
  std::vector<Eigen::RowVectorXd> serving;   // J == k
  std::vector<Eigen::RowVectorXd> waiting;   // B_k == 1
  std::vector<Eigen::RowVectorXd> next_is;   // next(s) == k

  const Eigen::RowVectorXd& serving_class(int k) const { return serving.at(static_cast<std::size_t>(k - 1)); }
  const Eigen::RowVectorXd& waiting_class(int k) const { return waiting.at(static_cast<std::size_t>(k - 1)); }
  const Eigen::RowVectorXd& next_class_is(int k) const { return next_is.at(static_cast<std::size_t>(k - 1)); }
};

IndicatorVectors indicators(const StateSpace& space);

/// Generator of the first |Q|-1 probabilities once the last one is
/// eliminated through the unit-sum constraint:
///   p_red' = p_red * Q_red + beta.
struct ReducedGenerator {
  Eigen::MatrixXd Q_red;
  Eigen::RowVectorXd beta;
};

ReducedGenerator reduce(const GeneratorSet& generators);

}  // namespace tvaoi
