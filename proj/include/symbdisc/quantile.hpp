#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <sstream>
#include <utility>
#include <vector>

#include "symbdisc/error.hpp"
#include "symbdisc/histogram.hpp"

namespace symbdisc {

// Tolerances shared across the quantile-function algebra. Knot dedup is
// tight (doubles carry the exact cut positions); value comparisons get the
// looser bound suited to magnitudes up to ~1e3.
inline constexpr double kKnotTol = 1e-12;
inline constexpr double kValueTol = 1e-9;

// One linear piece of a quantile function on the cumulative-weight cell
// [w_lo, w_hi): value(t) = center + (2(t-w_lo)/(w_hi-w_lo) - 1) * half_range.
struct QfPiece {
  double w_lo = 0.0;
  double w_hi = 1.0;
  double center = 0.0;
  double half_range = 0.0;

  double width() const { return w_hi - w_lo; }
  double lower_value() const { return center - half_range; }
  double upper_value() const { return center + half_range; }
  double value_at(double t) const {
    return center + (2.0 * (t - w_lo) / (w_hi - w_lo) - 1.0) * half_range;
  }
};

// Shared cumulative-weight grid: 0 = w_0 < w_1 < ... < w_m = 1.
class WeightGrid {
 public:
  static WeightGrid from_knots(std::vector<double> knots) {
    if (knots.size() < 2) fail(ErrorCode::InvalidParameters, "grid needs at least two knots");
    std::sort(knots.begin(), knots.end());
    if (std::abs(knots.front()) > kKnotTol || std::abs(knots.back() - 1.0) > kKnotTol)
      fail(ErrorCode::InvalidParameters, "grid must span [0,1]");
    knots.front() = 0.0;
    knots.back() = 1.0;
    for (std::size_t i = 1; i < knots.size(); ++i)
      if (knots[i] <= knots[i - 1])
        fail(ErrorCode::InvalidParameters, "grid knots must be strictly increasing");
    return WeightGrid(std::move(knots));
  }

  const std::vector<double>& knots() const { return knots_; }
  std::size_t cells() const { return knots_.size() - 1; }
  double knot(std::size_t i) const { return knots_[i]; }
  double cell_weight(std::size_t cell) const { return knots_[cell + 1] - knots_[cell]; }

  bool same_knots(const WeightGrid& other) const { return knots_ == other.knots_; }

  // Cell weights mirror around 1/2, the precondition of the discriminant score.
  bool is_symmetric(double tol = kKnotTol) const {
    const std::size_t m = cells();
    for (std::size_t l = 0; l < m; ++l)
      if (std::abs(cell_weight(l) - cell_weight(m - 1 - l)) > tol) return false;
    return true;
  }

  // Union with the mirrored knot set {1 - w}; result is symmetric.
  WeightGrid symmetrized() const;

 private:
  explicit WeightGrid(std::vector<double> knots) : knots_(std::move(knots)) {}
  std::vector<double> knots_;
};

// Piecewise-linear non-decreasing function on [0,1]; the computational
// representation of every histogram/interval observation.
class QuantileFunction {
 public:
  static QuantileFunction from_pieces(std::vector<QfPiece> pieces) {
    if (pieces.empty()) fail(ErrorCode::EmptyInput, "quantile function has no pieces");
    if (pieces.front().w_lo != 0.0 || pieces.back().w_hi != 1.0)
      fail(ErrorCode::InvalidParameters, "quantile function must cover [0,1]");
    for (std::size_t i = 0; i < pieces.size(); ++i) {
      auto& p = pieces[i];
      if (!(p.w_hi > p.w_lo))
        fail(ErrorCode::InvalidParameters, "piece has non-positive width");
      if (i > 0 && pieces[i - 1].w_hi != p.w_lo)
        fail(ErrorCode::InvalidParameters, "piece domains are not contiguous");
      if (p.half_range < 0.0) {
        if (p.half_range < -kValueTol)
          fail(ErrorCode::InvalidParameters, "piece is decreasing (negative half-range)");
        p.half_range = 0.0;  // rounding residue from arithmetic on monotone data
      }
      if (i > 0 && p.lower_value() < pieces[i - 1].upper_value() - kValueTol)
        fail(ErrorCode::InvalidParameters, "quantile function is not non-decreasing");
    }
    return QuantileFunction(std::move(pieces));
  }

  const std::vector<QfPiece>& pieces() const { return pieces_; }
  std::size_t piece_count() const { return pieces_.size(); }

  std::vector<double> knots() const {
    std::vector<double> k;
    k.reserve(pieces_.size() + 1);
    k.push_back(pieces_.front().w_lo);
    for (const auto& p : pieces_) k.push_back(p.w_hi);
    return k;
  }

  WeightGrid grid() const { return WeightGrid::from_knots(knots()); }

  bool same_knots(const QuantileFunction& other) const {
    if (pieces_.size() != other.pieces_.size()) return false;
    for (std::size_t i = 0; i < pieces_.size(); ++i)
      if (pieces_[i].w_lo != other.pieces_[i].w_lo || pieces_[i].w_hi != other.pieces_[i].w_hi)
        return false;
    return true;
  }

  // Value at t; at an interior knot the right piece wins, at t = 1 the last
  // piece is used.
  double operator()(double t) const {
    if (t < 0.0 || t > 1.0) {
      std::ostringstream os;
      os << "quantile argument " << t << " outside [0,1]";
      fail(ErrorCode::DomainError, os.str());
    }
    if (t >= pieces_.back().w_lo) return pieces_.back().value_at(t);
    // first piece whose w_lo exceeds t, then step back
    std::size_t lo = 0, hi = pieces_.size() - 1;
    while (lo < hi) {
      const std::size_t mid = (lo + hi + 1) / 2;
      if (pieces_[mid].w_lo <= t)
        lo = mid;
      else
        hi = mid - 1;
    }
    return pieces_[lo].value_at(t);
  }

  double min_value() const { return pieces_.front().lower_value(); }
  double max_value() const { return pieces_.back().upper_value(); }

  // Exact integral over [0,1]: the slope terms cancel per piece.
  double mean_value() const {
    double m = 0.0;
    for (const auto& p : pieces_) m += p.width() * p.center;
    return m;
  }

 private:
  explicit QuantileFunction(std::vector<QfPiece> pieces) : pieces_(std::move(pieces)) {}
  std::vector<QfPiece> pieces_;
};

inline QuantileFunction to_quantile(const Histogram& h) {
  std::vector<QfPiece> pieces;
  pieces.reserve(h.size());
  double w = 0.0;
  for (std::size_t l = 0; l < h.size(); ++l) {
    const auto& s = h.subintervals()[l];
    const double w_next = (l + 1 == h.size()) ? 1.0 : w + s.weight;
    pieces.push_back({w, w_next, s.center(), s.half_range()});
    w = w_next;
  }
  return QuantileFunction::from_pieces(std::move(pieces));
}

inline QuantileFunction to_quantile(const Interval& iv) {
  return to_quantile(iv.to_histogram());
}

namespace detail {

inline std::vector<double> dedup_sorted_knots(std::vector<double> k) {
  std::sort(k.begin(), k.end());
  std::vector<double> out;
  out.reserve(k.size());
  for (double v : k)
    if (out.empty() || v - out.back() > kKnotTol) out.push_back(v);
  out.front() = 0.0;
  if (std::abs(out.back() - 1.0) <= kKnotTol)
    out.back() = 1.0;
  return out;
}

}  // namespace detail

inline WeightGrid WeightGrid::symmetrized() const {
  std::vector<double> k = knots_;
  k.reserve(2 * knots_.size());
  for (double w : knots_) k.push_back(1.0 - w);
  return WeightGrid::from_knots(detail::dedup_sorted_knots(std::move(k)));
}

// Sorted, deduplicated union of the knots of all functions.
inline WeightGrid union_grid(const std::vector<QuantileFunction>& qs) {
  if (qs.empty()) fail(ErrorCode::EmptyInput, "union grid of no functions");
  std::vector<double> k;
  for (const auto& q : qs) {
    k.push_back(q.pieces().front().w_lo);
    for (const auto& p : q.pieces()) k.push_back(p.w_hi);
  }
  return WeightGrid::from_knots(detail::dedup_sorted_knots(std::move(k)));
}

// Re-expresses q on the target grid without changing its values. Cutting at
// a refinement of q's knots is exact; a target cell that spans an interior
// knot is accepted only where q is actually linear across it, otherwise the
// rebinning would be lossy and is refused.
inline QuantileFunction rebin(const QuantileFunction& q, const WeightGrid& grid) {
  const auto& pieces = q.pieces();
  std::vector<QfPiece> out;
  out.reserve(grid.cells());
  std::size_t src = 0;
  for (std::size_t cell = 0; cell < grid.cells(); ++cell) {
    const double a = grid.knot(cell);
    const double b = grid.knot(cell + 1);
    while (src + 1 < pieces.size() && pieces[src].w_hi <= a) ++src;
    std::size_t last = src;
    while (last + 1 < pieces.size() && pieces[last].w_hi < b) ++last;
    const double va = pieces[src].value_at(std::max(a, pieces[src].w_lo));
    const double vb = pieces[last].value_at(std::min(b, pieces[last].w_hi));
    if (last != src) {
      // cell spans interior knots of q: accept only if q is one line there
      for (std::size_t i = src; i < last; ++i) {
        const double kk = pieces[i].w_hi;
        const double line = va + (kk - a) / (b - a) * (vb - va);
        const double v_left = pieces[i].value_at(kk);
        const double v_right = pieces[i + 1].value_at(kk);
        if (std::abs(v_left - line) > kValueTol || std::abs(v_right - line) > kValueTol) {
          std::ostringstream os;
          os << "target cell [" << a << "," << b << ") spans knot " << kk
             << " where the function is not linear";
          fail(ErrorCode::GridIncompatible, os.str());
        }
      }
    }
    out.push_back({a, b, 0.5 * (va + vb), 0.5 * (vb - va)});
    src = last;
  }
  return QuantileFunction::from_pieces(std::move(out));
}

// The quantile function of the symmetric distribution: -q(1-t). Pieces are
// reversed and re-centred; half-ranges are preserved, so the result is again
// non-decreasing.
inline QuantileFunction reflect(const QuantileFunction& q) {
  std::vector<QfPiece> out;
  out.reserve(q.piece_count());
  const auto& pieces = q.pieces();
  for (auto it = pieces.rbegin(); it != pieces.rend(); ++it)
    out.push_back({1.0 - it->w_hi, 1.0 - it->w_lo, -it->center, it->half_range});
  out.front().w_lo = 0.0;
  out.back().w_hi = 1.0;
  for (std::size_t i = 1; i < out.size(); ++i) out[i].w_lo = out[i - 1].w_hi;
  return QuantileFunction::from_pieces(std::move(out));
}

// Cellwise mean of the functions on their union grid; per the barycenter
// characterization this is the Mallows barycenter.
inline QuantileFunction mean_qf(const std::vector<QuantileFunction>& qs) {
  if (qs.empty()) fail(ErrorCode::EmptyInput, "mean of no quantile functions");
  const WeightGrid grid = union_grid(qs);
  const double inv_n = 1.0 / static_cast<double>(qs.size());
  std::vector<QfPiece> acc;
  acc.reserve(grid.cells());
  for (std::size_t cell = 0; cell < grid.cells(); ++cell)
    acc.push_back({grid.knot(cell), grid.knot(cell + 1), 0.0, 0.0});
  for (const auto& q : qs) {
    const QuantileFunction r = rebin(q, grid);
    for (std::size_t cell = 0; cell < grid.cells(); ++cell) {
      acc[cell].center += inv_n * r.pieces()[cell].center;
      acc[cell].half_range += inv_n * r.pieces()[cell].half_range;
    }
  }
  return QuantileFunction::from_pieces(std::move(acc));
}

// Mean of a histogram-valued column: average of weighted subinterval centers.
inline double symbolic_mean(const std::vector<Histogram>& column) {
  if (column.empty()) fail(ErrorCode::EmptyInput, "symbolic mean of empty column");
  double total = 0.0;
  for (const auto& h : column) total += h.mean();
  return total / static_cast<double>(column.size());
}

}  // namespace symbdisc
