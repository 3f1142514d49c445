#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "symbdisc/error.hpp"
#include "symbdisc/quantile.hpp"

namespace symbdisc {

struct DatasetUnit {
  std::string id;
  std::optional<int> group;  // 0 or 1 when labeled
  std::vector<QuantileFunction> observations;  // one per variable
};

// n units described by p distributional variables, rewritten onto one shared
// symmetric weight grid. The symmetric grid (cell weights mirror around 1/2)
// is what makes the reflected terms of the discriminant score line up cell by
// cell, so it is enforced here once and relied on everywhere downstream.
class GroupedDataset {
 public:
  static GroupedDataset build(std::vector<DatasetUnit> raw,
                              std::vector<std::string> variables,
                              std::array<std::string, 2> group_names = {"G1", "G2"}) {
    if (raw.empty()) fail(ErrorCode::EmptyInput, "dataset has no units");
    if (variables.empty()) fail(ErrorCode::EmptyInput, "dataset has no variables");
    const std::size_t p = variables.size();
    std::vector<QuantileFunction> all;
    for (const auto& u : raw) {
      if (u.observations.size() != p)
        fail(ErrorCode::GridMismatch,
             "unit '" + u.id + "' does not have one observation per variable");
      if (u.group && *u.group != 0 && *u.group != 1)
        fail(ErrorCode::InvalidParameters, "group labels must be 0 or 1");
      all.insert(all.end(), u.observations.begin(), u.observations.end());
    }
    const WeightGrid grid = union_grid(all).symmetrized();
    if (!grid.is_symmetric(1e-9))
      fail(ErrorCode::AsymmetricGrid, "weight grid could not be symmetrized");

    GroupedDataset ds(std::move(variables), group_names, grid);
    for (auto& u : raw) {
      for (auto& q : u.observations) q = rebin(q, grid);
      ds.units_.push_back(std::move(u));
    }
    ds.cache_cells();
    return ds;
  }

  std::size_t n() const { return units_.size(); }
  std::size_t p() const { return variables_.size(); }
  std::size_t m() const { return grid_.cells(); }

  const WeightGrid& grid() const { return grid_; }
  const std::vector<std::string>& variables() const { return variables_; }
  const std::array<std::string, 2>& group_names() const { return group_names_; }
  const std::vector<DatasetUnit>& units() const { return units_; }
  const DatasetUnit& unit(std::size_t i) const { return units_[i]; }

  std::vector<std::size_t> labeled_indices() const {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < units_.size(); ++i)
      if (units_[i].group) idx.push_back(i);
    return idx;
  }

  std::size_t group_size(int k) const {
    std::size_t c = 0;
    for (const auto& u : units_)
      if (u.group && *u.group == k) ++c;
    return c;
  }

  // Per-variable cell matrices (n x m), used by the score and SSCP assembly.
  const Eigen::MatrixXd& centers(std::size_t var) const { return centers_[var]; }
  const Eigen::MatrixXd& half_ranges(std::size_t var) const { return half_ranges_[var]; }

  Eigen::VectorXd cell_weights() const {
    Eigen::VectorXd w(static_cast<Eigen::Index>(m()));
    for (std::size_t l = 0; l < m(); ++l)
      w[static_cast<Eigen::Index>(l)] = grid_.cell_weight(l);
    return w;
  }

  // A copy of the dataset without one unit; grids are unchanged since all
  // remaining observations already live on this grid.
  GroupedDataset without_unit(std::size_t drop) const {
    GroupedDataset ds(variables_, group_names_, grid_);
    for (std::size_t i = 0; i < units_.size(); ++i)
      if (i != drop) ds.units_.push_back(units_[i]);
    if (ds.units_.empty()) fail(ErrorCode::EmptyInput, "dataset has no units");
    ds.cache_cells();
    return ds;
  }

 private:
  GroupedDataset(std::vector<std::string> variables, std::array<std::string, 2> names,
                 WeightGrid grid)
      : variables_(std::move(variables)), group_names_(std::move(names)),
        grid_(std::move(grid)) {}

  void cache_cells() {
    const auto rows = static_cast<Eigen::Index>(units_.size());
    const auto cols = static_cast<Eigen::Index>(grid_.cells());
    centers_.assign(variables_.size(), Eigen::MatrixXd(rows, cols));
    half_ranges_.assign(variables_.size(), Eigen::MatrixXd(rows, cols));
    for (Eigen::Index i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < variables_.size(); ++j) {
        const auto& pieces = units_[static_cast<std::size_t>(i)].observations[j].pieces();
        for (Eigen::Index l = 0; l < cols; ++l) {
          centers_[j](i, l) = pieces[static_cast<std::size_t>(l)].center;
          half_ranges_[j](i, l) = pieces[static_cast<std::size_t>(l)].half_range;
        }
      }
  }

  std::vector<std::string> variables_;
  std::array<std::string, 2> group_names_;
  WeightGrid grid_;
  std::vector<DatasetUnit> units_;
  std::vector<Eigen::MatrixXd> centers_;
  std::vector<Eigen::MatrixXd> half_ranges_;
};

}  // namespace symbdisc
