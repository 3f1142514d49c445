#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "symbdisc/dataset.hpp"
#include "symbdisc/error.hpp"
#include "symbdisc/fqp.hpp"
#include "symbdisc/mallows.hpp"
#include "symbdisc/quantile.hpp"

namespace symbdisc {

// Nonnegative discriminant weights: a_j for each variable's own quantile
// function, b_j for its reflection, flattened as [a1 b1 a2 b2 ...].
struct GammaWeights {
  Eigen::VectorXd a;
  Eigen::VectorXd b;

  std::size_t vars() const { return static_cast<std::size_t>(a.size()); }

  Eigen::VectorXd flat() const {
    Eigen::VectorXd g(2 * a.size());
    for (Eigen::Index j = 0; j < a.size(); ++j) {
      g[2 * j] = a[j];
      g[2 * j + 1] = b[j];
    }
    return g;
  }

  static GammaWeights from_flat(const Eigen::VectorXd& g) {
    if (g.size() % 2 != 0 || g.size() == 0)
      fail(ErrorCode::InvalidParameters, "weight vector must have even length");
    if (g.minCoeff() < 0.0)
      fail(ErrorCode::InvalidParameters, "discriminant weights must be nonnegative");
    GammaWeights w;
    w.a.resize(g.size() / 2);
    w.b.resize(g.size() / 2);
    for (Eigen::Index j = 0; j < w.a.size(); ++j) {
      w.a[j] = g[2 * j];
      w.b[j] = g[2 * j + 1];
    }
    return w;
  }
};

struct SscpMatrices {
  Eigen::MatrixXd total;
  Eigen::MatrixXd between;
  Eigen::MatrixXd within;
};

struct DiscriminantModel {
  std::vector<std::string> variables;
  std::array<std::string, 2> group_names;
  WeightGrid grid;
  GammaWeights gamma;
  double lambda = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  double gap = 0.0;
  fqp::SolveStatus status = fqp::SolveStatus::Degenerate;
  std::array<QuantileFunction, 2> group_scores;
};

struct HitReport {
  int n = 0;
  int correct = 0;
  std::array<int, 2> group_n{0, 0};
  std::array<int, 2> group_correct{0, 0};

  double overall() const { return n == 0 ? 0.0 : static_cast<double>(correct) / n; }
  double per_group(int k) const {
    return group_n[static_cast<std::size_t>(k)] == 0
               ? 0.0
               : static_cast<double>(group_correct[static_cast<std::size_t>(k)]) /
                     group_n[static_cast<std::size_t>(k)];
  }
};

struct LooFold {
  std::string id;
  int truth = 0;
  int predicted = -1;
  bool failed = false;
};

struct LooReport {
  HitReport hits;
  std::vector<LooFold> folds;
  int failed_folds = 0;
};

namespace detail {

inline QuantileFunction qf_from_cells(const WeightGrid& grid, const Eigen::VectorXd& c,
                                      const Eigen::VectorXd& r) {
  std::vector<QfPiece> pieces;
  pieces.reserve(grid.cells());
  for (std::size_t l = 0; l < grid.cells(); ++l)
    pieces.push_back({grid.knot(l), grid.knot(l + 1), c[static_cast<Eigen::Index>(l)],
                      r[static_cast<Eigen::Index>(l)]});
  return QuantileFunction::from_pieces(std::move(pieces));
}

// Score cells from per-variable cell rows: center_l = sum_j (a_j c_j,l -
// b_j c_j,m-1-l), half_range_l = sum_j (a_j r_j,l + b_j r_j,m-1-l).
inline QuantileFunction score_cells(const GammaWeights& gamma, const WeightGrid& grid,
                                    const std::vector<Eigen::VectorXd>& centers,
                                    const std::vector<Eigen::VectorXd>& half_ranges) {
  const auto m = static_cast<Eigen::Index>(grid.cells());
  Eigen::VectorXd c = Eigen::VectorXd::Zero(m);
  Eigen::VectorXd r = Eigen::VectorXd::Zero(m);
  for (std::size_t j = 0; j < gamma.vars(); ++j) {
    const auto jj = static_cast<Eigen::Index>(j);
    for (Eigen::Index l = 0; l < m; ++l) {
      const Eigen::Index lm = m - 1 - l;
      c[l] += gamma.a[jj] * centers[j][l] - gamma.b[jj] * centers[j][lm];
      r[l] += gamma.a[jj] * half_ranges[j][l] + gamma.b[jj] * half_ranges[j][lm];
    }
  }
  return qf_from_cells(grid, c, r);
}

inline void check_gamma(const GammaWeights& gamma, std::size_t p) {
  if (gamma.vars() != p)
    fail(ErrorCode::GridMismatch, "weight vector does not match the variable count");
  if (gamma.a.minCoeff() < 0.0 || gamma.b.minCoeff() < 0.0)
    fail(ErrorCode::InvalidParameters, "discriminant weights must be nonnegative");
}

}  // namespace detail

// Discriminant score of one unit: the linear combination of its quantile
// functions and their reflections. Observations must share one symmetric grid.
inline QuantileFunction score(const GammaWeights& gamma,
                              const std::vector<QuantileFunction>& observations) {
  if (observations.empty()) fail(ErrorCode::EmptyInput, "no observations");
  detail::check_gamma(gamma, observations.size());
  for (std::size_t j = 1; j < observations.size(); ++j)
    if (!observations[0].same_knots(observations[j]))
      fail(ErrorCode::GridMismatch, "observations are not on one grid");
  const WeightGrid grid = observations[0].grid();
  if (!grid.is_symmetric(1e-9))
    fail(ErrorCode::AsymmetricGrid, "score requires a symmetric weight grid");

  std::vector<Eigen::VectorXd> c(observations.size()), r(observations.size());
  const auto m = static_cast<Eigen::Index>(grid.cells());
  for (std::size_t j = 0; j < observations.size(); ++j) {
    c[j].resize(m);
    r[j].resize(m);
    for (Eigen::Index l = 0; l < m; ++l) {
      c[j][l] = observations[j].pieces()[static_cast<std::size_t>(l)].center;
      r[j][l] = observations[j].pieces()[static_cast<std::size_t>(l)].half_range;
    }
  }
  return detail::score_cells(gamma, grid, c, r);
}

inline QuantileFunction score(const GammaWeights& gamma, const GroupedDataset& ds,
                              std::size_t unit) {
  detail::check_gamma(gamma, ds.p());
  std::vector<Eigen::VectorXd> c(ds.p()), r(ds.p());
  for (std::size_t j = 0; j < ds.p(); ++j) {
    c[j] = ds.centers(j).row(static_cast<Eigen::Index>(unit)).transpose();
    r[j] = ds.half_ranges(j).row(static_cast<Eigen::Index>(unit)).transpose();
  }
  return detail::score_cells(gamma, ds.grid(), c, r);
}

// Barycentric score: the score built from variable-wise mean cells, which by
// linearity equals the barycenter of all unit scores.
inline QuantileFunction barycentric_score(const GammaWeights& gamma,
                                          const GroupedDataset& ds) {
  detail::check_gamma(gamma, ds.p());
  std::vector<Eigen::VectorXd> c(ds.p()), r(ds.p());
  for (std::size_t j = 0; j < ds.p(); ++j) {
    c[j] = ds.centers(j).colwise().mean().transpose();
    r[j] = ds.half_ranges(j).colwise().mean().transpose();
  }
  return detail::score_cells(gamma, ds.grid(), c, r);
}

inline std::array<QuantileFunction, 2> group_barycentric_scores(
    const GammaWeights& gamma, const GroupedDataset& ds) {
  detail::check_gamma(gamma, ds.p());
  std::array<std::vector<Eigen::VectorXd>, 2> c{
      std::vector<Eigen::VectorXd>(ds.p()), std::vector<Eigen::VectorXd>(ds.p())};
  auto r = c;
  for (int k = 0; k < 2; ++k) {
    std::vector<Eigen::Index> members;
    for (std::size_t i = 0; i < ds.n(); ++i)
      if (ds.unit(i).group && *ds.unit(i).group == k)
        members.push_back(static_cast<Eigen::Index>(i));
    if (members.empty())
      fail(ErrorCode::SingleGroup,
           "group '" + ds.group_names()[static_cast<std::size_t>(k)] + "' has no units");
    const auto m = static_cast<Eigen::Index>(ds.m());
    for (std::size_t j = 0; j < ds.p(); ++j) {
      Eigen::VectorXd cs = Eigen::VectorXd::Zero(m);
      Eigen::VectorXd rs = Eigen::VectorXd::Zero(m);
      for (const Eigen::Index i : members) {
        cs += ds.centers(j).row(i).transpose();
        rs += ds.half_ranges(j).row(i).transpose();
      }
      c[static_cast<std::size_t>(k)][j] = cs / static_cast<double>(members.size());
      r[static_cast<std::size_t>(k)][j] = rs / static_cast<double>(members.size());
    }
  }
  return {detail::score_cells(gamma, ds.grid(), c[0], r[0]),
          detail::score_cells(gamma, ds.grid(), c[1], r[1])};
}

// Total / between / within SSCP matrices of order 2p. Assembled in Gram form
// from centered cell values, which makes each matrix positive semidefinite by
// construction and T = B + W an exact cellwise identity.
inline SscpMatrices build_sscp(const GroupedDataset& ds) {
  const auto labeled = ds.labeled_indices();
  if (labeled.empty()) fail(ErrorCode::MissingLabels, "no labeled units");
  if (!ds.grid().is_symmetric(1e-9))
    fail(ErrorCode::AsymmetricGrid, "SSCP requires a symmetric weight grid");

  const auto p = static_cast<Eigen::Index>(ds.p());
  const auto m = static_cast<Eigen::Index>(ds.m());
  const Eigen::Index d = 2 * p;
  const Eigen::VectorXd pw = ds.cell_weights();

  // means over labeled units, global and per group
  std::vector<Eigen::VectorXd> cbar(ds.p()), rbar(ds.p());
  std::array<std::vector<Eigen::VectorXd>, 2> cbar_k, rbar_k;
  std::array<std::vector<std::size_t>, 2> members;
  for (const std::size_t i : labeled)
    members[static_cast<std::size_t>(*ds.unit(i).group)].push_back(i);

  for (std::size_t j = 0; j < ds.p(); ++j) {
    Eigen::VectorXd cs = Eigen::VectorXd::Zero(m), rs = Eigen::VectorXd::Zero(m);
    for (const std::size_t i : labeled) {
      cs += ds.centers(j).row(static_cast<Eigen::Index>(i)).transpose();
      rs += ds.half_ranges(j).row(static_cast<Eigen::Index>(i)).transpose();
    }
    cbar[j] = cs / static_cast<double>(labeled.size());
    rbar[j] = rs / static_cast<double>(labeled.size());
  }
  for (int k = 0; k < 2; ++k) {
    cbar_k[static_cast<std::size_t>(k)].resize(ds.p());
    rbar_k[static_cast<std::size_t>(k)].resize(ds.p());
    for (std::size_t j = 0; j < ds.p(); ++j) {
      Eigen::VectorXd cs = Eigen::VectorXd::Zero(m), rs = Eigen::VectorXd::Zero(m);
      for (const std::size_t i : members[static_cast<std::size_t>(k)]) {
        cs += ds.centers(j).row(static_cast<Eigen::Index>(i)).transpose();
        rs += ds.half_ranges(j).row(static_cast<Eigen::Index>(i)).transpose();
      }
      const double nk = std::max<std::size_t>(members[static_cast<std::size_t>(k)].size(), 1);
      cbar_k[static_cast<std::size_t>(k)][j] = cs / nk;
      rbar_k[static_cast<std::size_t>(k)][j] = rs / nk;
    }
  }

  SscpMatrices out{Eigen::MatrixXd::Zero(d, d), Eigen::MatrixXd::Zero(d, d),
                   Eigen::MatrixXd::Zero(d, d)};
  Eigen::VectorXd alpha(d), beta(d);
  const auto accumulate = [&](Eigen::MatrixXd& target, double weight, Eigen::Index l,
                              const auto& cval, const auto& rval) {
    const Eigen::Index lm = m - 1 - l;
    for (Eigen::Index j = 0; j < p; ++j) {
      alpha[2 * j] = cval(j, l) - cbar[static_cast<std::size_t>(j)][l];
      alpha[2 * j + 1] = -(cval(j, lm) - cbar[static_cast<std::size_t>(j)][lm]);
      beta[2 * j] = rval(j, l) - rbar[static_cast<std::size_t>(j)][l];
      beta[2 * j + 1] = rval(j, lm) - rbar[static_cast<std::size_t>(j)][lm];
    }
    target.noalias() += weight * pw[l] * (alpha * alpha.transpose());
    target.noalias() += weight * pw[l] / 3.0 * (beta * beta.transpose());
  };

  for (const std::size_t i : labeled) {
    const auto row = static_cast<Eigen::Index>(i);
    const auto cval = [&](Eigen::Index j, Eigen::Index l) {
      return ds.centers(static_cast<std::size_t>(j))(row, l);
    };
    const auto rval = [&](Eigen::Index j, Eigen::Index l) {
      return ds.half_ranges(static_cast<std::size_t>(j))(row, l);
    };
    for (Eigen::Index l = 0; l < m; ++l) accumulate(out.total, 1.0, l, cval, rval);
  }
  for (int k = 0; k < 2; ++k) {
    const auto nk = static_cast<double>(members[static_cast<std::size_t>(k)].size());
    if (nk == 0) continue;
    const auto cval = [&](Eigen::Index j, Eigen::Index l) {
      return cbar_k[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)][l];
    };
    const auto rval = [&](Eigen::Index j, Eigen::Index l) {
      return rbar_k[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)][l];
    };
    for (Eigen::Index l = 0; l < m; ++l) accumulate(out.between, nk, l, cval, rval);
  }
  for (int k = 0; k < 2; ++k) {
    for (const std::size_t i : members[static_cast<std::size_t>(k)]) {
      const auto row = static_cast<Eigen::Index>(i);
      const auto cval = [&](Eigen::Index j, Eigen::Index l) {
        return ds.centers(static_cast<std::size_t>(j))(row, l) -
               cbar_k[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)][l] +
               cbar[static_cast<std::size_t>(j)][l];
      };
      const auto rval = [&](Eigen::Index j, Eigen::Index l) {
        return ds.half_ranges(static_cast<std::size_t>(j))(row, l) -
               rbar_k[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)][l] +
               rbar[static_cast<std::size_t>(j)][l];
      };
      for (Eigen::Index l = 0; l < m; ++l) accumulate(out.within, 1.0, l, cval, rval);
    }
  }
  return out;
}

inline DiscriminantModel fit(const GroupedDataset& ds,
                             const fqp::SolveOptions& opts = {}) {
  if (ds.group_size(0) == 0 || ds.group_size(1) == 0)
    fail(ErrorCode::SingleGroup, "fitting needs units in both groups");
  const SscpMatrices sscp = build_sscp(ds);
  const auto inst = fqp::FqpInstance::make(sscp.between, sscp.within);
  const fqp::FqpSolution sol = fqp::solve(inst, opts);
  if (sol.status == fqp::SolveStatus::Degenerate)
    fail(ErrorCode::DegenerateWithin,
         sol.diagnostic.empty() ? "degenerate ratio problem" : sol.diagnostic);

  const GammaWeights gamma = GammaWeights::from_flat(sol.gamma);
  auto scores = group_barycentric_scores(gamma, ds);
  return DiscriminantModel{ds.variables(), ds.group_names(), ds.grid(),
                           gamma,          sol.lower,        sol.lower,
                           sol.upper,      sol.gap,          sol.status,
                           std::move(scores)};
}

// Assigns a unit to the group whose barycentric score is nearest in Mallows
// distance; ties go to the first group.
inline int classify(const DiscriminantModel& model,
                    const std::vector<QuantileFunction>& observations) {
  if (observations.size() != model.variables.size())
    fail(ErrorCode::GridMismatch, "observation count does not match the model");
  for (const auto& q : observations)
    if (!(q.grid().same_knots(model.grid)))
      fail(ErrorCode::GridMismatch, "observations are not on the model grid");
  const QuantileFunction s = score(model.gamma, observations);
  const double d0 = mallows_sq(AlignedPair(s, model.group_scores[0]));
  const double d1 = mallows_sq(AlignedPair(s, model.group_scores[1]));
  return d0 <= d1 ? 0 : 1;
}

inline HitReport evaluate(const DiscriminantModel& model, const GroupedDataset& ds) {
  if (!ds.grid().same_knots(model.grid))
    fail(ErrorCode::GridMismatch, "dataset is not on the model grid");
  HitReport report;
  for (const std::size_t i : ds.labeled_indices()) {
    const int truth = *ds.unit(i).group;
    const int predicted = classify(model, ds.unit(i).observations);
    ++report.n;
    ++report.group_n[static_cast<std::size_t>(truth)];
    if (predicted == truth) {
      ++report.correct;
      ++report.group_correct[static_cast<std::size_t>(truth)];
    }
  }
  return report;
}

// Refits on n-1 units and classifies the held-out one. Folds whose reduced
// problem is degenerate are excluded from the rates and counted.
inline LooReport leave_one_out(const GroupedDataset& ds,
                               const fqp::SolveOptions& opts = {}) {
  LooReport report;
  for (const std::size_t i : ds.labeled_indices()) {
    LooFold fold;
    fold.id = ds.unit(i).id;
    fold.truth = *ds.unit(i).group;
    try {
      const DiscriminantModel model = fit(ds.without_unit(i), opts);
      fold.predicted = classify(model, ds.unit(i).observations);
    } catch (const Error& e) {
      if (e.category() != ErrorCategory::Solver) throw;
      fold.failed = true;
    }
    if (fold.failed) {
      ++report.failed_folds;
    } else {
      ++report.hits.n;
      ++report.hits.group_n[static_cast<std::size_t>(fold.truth)];
      if (fold.predicted == fold.truth) {
        ++report.hits.correct;
        ++report.hits.group_correct[static_cast<std::size_t>(fold.truth)];
      }
    }
    report.folds.push_back(std::move(fold));
  }
  return report;
}

}  // namespace symbdisc
