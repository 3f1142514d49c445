#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "symbdisc/error.hpp"
#include "symbdisc/quantile.hpp"

namespace symbdisc {

// Two quantile functions written on one shared grid.
struct AlignedPair {
  QuantileFunction first;
  QuantileFunction second;

  AlignedPair(QuantileFunction a, QuantileFunction b)
      : first(std::move(a)), second(std::move(b)) {
    if (!first.same_knots(second))
      fail(ErrorCode::NotAligned, "quantile functions have different knot sequences");
  }

  // Rebins both functions onto their union grid.
  static AlignedPair make(const QuantileFunction& a, const QuantileFunction& b) {
    const WeightGrid grid = union_grid({a, b});
    return AlignedPair(rebin(a, grid), rebin(b, grid));
  }
};

// Squared Mallows distance in closed form: cellwise weighted center and
// half-range gaps, the latter at weight 1/3.
inline double mallows_sq(const AlignedPair& pair) {
  double d2 = 0.0;
  for (std::size_t l = 0; l < pair.first.piece_count(); ++l) {
    const auto& x = pair.first.pieces()[l];
    const auto& y = pair.second.pieces()[l];
    const double dc = x.center - y.center;
    const double dr = x.half_range - y.half_range;
    d2 += x.width() * (dc * dc + dr * dr / 3.0);
  }
  return d2;
}

inline double mallows_sq(const QuantileFunction& a, const QuantileFunction& b) {
  if (a.same_knots(b)) return mallows_sq(AlignedPair(a, b));
  return mallows_sq(AlignedPair::make(a, b));
}

inline double mallows(const QuantileFunction& a, const QuantileFunction& b) {
  return std::sqrt(mallows_sq(a, b));
}

// Quadrature of the defining integral, independent of the closed form.
// Composite midpoint rule; the panel budget is spread over the aligned
// pieces so narrow cells are not undersampled.
inline double mallows_sq_numeric(const QuantileFunction& a, const QuantileFunction& b,
                                 long panels = 10000) {
  const AlignedPair pair = AlignedPair::make(a, b);
  double integral = 0.0;
  for (std::size_t l = 0; l < pair.first.piece_count(); ++l) {
    const auto& x = pair.first.pieces()[l];
    const auto& y = pair.second.pieces()[l];
    const double width = x.width();
    const long n = std::max<long>(16, std::lround(static_cast<double>(panels) * width));
    const double h = width / static_cast<double>(n);
    double sum = 0.0;
    for (long i = 0; i < n; ++i) {
      const double t = x.w_lo + (static_cast<double>(i) + 0.5) * h;
      const double d = x.value_at(t) - y.value_at(t);
      sum += d * d;
    }
    integral += sum * h;
  }
  return integral;
}

// Fréchet mean under the Mallows distance: cellwise mean of centers and
// half-ranges on the union grid.
inline QuantileFunction barycenter(const std::vector<QuantileFunction>& qs) {
  if (qs.empty()) fail(ErrorCode::EmptyInput, "barycenter of no functions");
  return mean_qf(qs);
}

struct GroupInertia {
  std::string id;
  std::size_t size = 0;
  double within = 0.0;
};

struct InertiaReport {
  double total = 0.0;
  double between = 0.0;
  double within = 0.0;
  std::vector<GroupInertia> per_group;
};

// Huygens decomposition of the total inertia around the global barycenter
// into between- and within-group terms.
inline InertiaReport huygens(
    const std::vector<std::pair<std::string, std::vector<QuantileFunction>>>& groups) {
  if (groups.empty()) fail(ErrorCode::EmptyInput, "no groups");
  std::vector<QuantileFunction> all;
  for (const auto& [id, members] : groups) {
    if (members.empty()) fail(ErrorCode::EmptyGroup, "group '" + id + "' is empty");
    all.insert(all.end(), members.begin(), members.end());
  }
  const WeightGrid grid = union_grid(all);
  std::vector<QuantileFunction> aligned;
  aligned.reserve(all.size());
  for (const auto& q : all) aligned.push_back(rebin(q, grid));
  const QuantileFunction global = mean_qf(aligned);

  InertiaReport report;
  std::size_t offset = 0;
  for (const auto& [id, members] : groups) {
    std::vector<QuantileFunction> g(aligned.begin() + static_cast<std::ptrdiff_t>(offset),
                                    aligned.begin() + static_cast<std::ptrdiff_t>(offset + members.size()));
    offset += members.size();
    const QuantileFunction centroid = mean_qf(g);
    double wi = 0.0;
    for (const auto& q : g) wi += mallows_sq(AlignedPair(q, centroid));
    report.within += wi;
    report.between += static_cast<double>(g.size()) * mallows_sq(AlignedPair(centroid, global));
    report.per_group.push_back({id, g.size(), wi});
  }
  for (const auto& q : aligned) report.total += mallows_sq(AlignedPair(q, global));
  return report;
}

}  // namespace symbdisc
