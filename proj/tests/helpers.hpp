#pragma once

// Shared generators and oracles for the test suites.

#include <Eigen/Dense>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "symbdisc/dataset.hpp"
#include "symbdisc/fqp.hpp"
#include "symbdisc/histogram.hpp"
#include "symbdisc/quantile.hpp"

namespace testutil {

inline Eigen::MatrixXd random_psd(std::mt19937_64& rng, int d, int rank,
                                  double scale = 1.0) {
  std::normal_distribution<double> gauss(0.0, scale);
  Eigen::MatrixXd g(d, rank);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < rank; ++j) g(i, j) = gauss(rng);
  return g * g.transpose() / static_cast<double>(rank);
}

// Dirichlet-weighted simplex search plus the axes: the independent optimum
// oracle for the ratio problem.
inline double simplex_grid_oracle(const Eigen::MatrixXd& b, const Eigen::MatrixXd& w,
                                  long points, std::uint64_t seed) {
  const int d = static_cast<int>(b.rows());
  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> expo(1.0);
  const double w_scale = std::max(1.0, w.cwiseAbs().maxCoeff());
  double best = -std::numeric_limits<double>::infinity();
  const auto consider = [&](const Eigen::VectorXd& g) {
    const double den = g.dot(w * g);
    if (den > 1e-14 * w_scale) best = std::max(best, g.dot(b * g) / den);
  };
  for (int i = 0; i < d; ++i) consider(Eigen::VectorXd::Unit(d, i));
  Eigen::VectorXd g(d);
  for (long k = 0; k < points; ++k) {
    double total = 0.0;
    for (int i = 0; i < d; ++i) {
      g[i] = expo(rng);
      total += g[i];
    }
    g /= total;
    consider(g);
  }
  return best;
}

// A unit observation on the quintile grid: 5 equal-weight bins around a
// location, with per-unit spread.
inline symbdisc::QuantileFunction random_quintile_obs(std::mt19937_64& rng,
                                                      double location,
                                                      double spread) {
  std::normal_distribution<double> gauss(location, spread);
  std::vector<double> values(40);
  for (double& v : values) v = gauss(rng);
  return symbdisc::to_quantile(symbdisc::equal_weight_histogram(values, 5));
}

// Fully labeled random dataset on the shared quintile grid.
inline symbdisc::GroupedDataset random_dataset(std::mt19937_64& rng, int n, int p,
                                               double separation = 2.0) {
  std::vector<symbdisc::DatasetUnit> units;
  std::vector<std::string> vars;
  for (int j = 0; j < p; ++j) vars.push_back("X" + std::to_string(j + 1));
  for (int i = 0; i < n; ++i) {
    const int group = i % 2;
    symbdisc::DatasetUnit u;
    u.id = "u" + std::to_string(i);
    u.group = group;
    for (int j = 0; j < p; ++j) {
      const double loc = (group == 0 ? -separation : separation) *
                             std::uniform_real_distribution<double>(0.5, 1.5)(rng) +
                         10.0 * j;
      u.observations.push_back(random_quintile_obs(rng, loc, 1.0 + 0.2 * j));
    }
    units.push_back(std::move(u));
  }
  return symbdisc::GroupedDataset::build(std::move(units), std::move(vars));
}

}  // namespace testutil
