#pragma once

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>
#include <vector>

#include "symbdisc/error.hpp"

namespace symbdisc {

// One weighted subinterval of a histogram observation.
struct Subinterval {
  double lower = 0.0;
  double upper = 0.0;
  double weight = 0.0;

  double center() const { return 0.5 * (lower + upper); }
  double half_range() const { return 0.5 * (upper - lower); }
};

// A distributional observation: ordered, non-overlapping subintervals whose
// weights sum to one. Interior gaps are allowed; overlaps are not.
class Histogram {
 public:
  // Validates and canonicalizes raw subintervals: sorts by lower bound,
  // drops zero-weight entries, renormalizes weights when the sum is within
  // 1e-6 of one, refuses overlapping input.
  static Histogram normalize(std::vector<Subinterval> raw) {
    if (raw.empty()) fail(ErrorCode::EmptyInput, "histogram has no subintervals");
    for (const auto& s : raw) {
      if (!std::isfinite(s.lower) || !std::isfinite(s.upper) || !std::isfinite(s.weight))
        fail(ErrorCode::InvalidParameters, "non-finite subinterval");
      if (s.weight < 0.0)
        fail(ErrorCode::InvalidParameters, "negative subinterval weight");
      if (s.lower > s.upper)
        fail(ErrorCode::InvalidParameters, "subinterval lower bound exceeds upper bound");
    }
    std::erase_if(raw, [](const Subinterval& s) { return s.weight == 0.0; });
    if (raw.empty()) fail(ErrorCode::EmptyInput, "all subintervals have zero weight");

    std::stable_sort(raw.begin(), raw.end(), [](const Subinterval& a, const Subinterval& b) {
      return a.lower != b.lower ? a.lower < b.lower : a.upper < b.upper;
    });
    double sum = 0.0;
    for (std::size_t i = 0; i < raw.size(); ++i) {
      if (i > 0 && raw[i - 1].upper > raw[i].lower) {
        std::ostringstream os;
        os << "subintervals [" << raw[i - 1].lower << "," << raw[i - 1].upper << "] and ["
           << raw[i].lower << "," << raw[i].upper << "] overlap";
        fail(ErrorCode::OverlappingSubintervals, os.str());
      }
      sum += raw[i].weight;
    }
    if (std::abs(sum - 1.0) > 1e-6) {
      std::ostringstream os;
      os << "subinterval weights sum to " << sum;
      fail(ErrorCode::WeightSumOutOfTolerance, os.str());
    }
    for (auto& s : raw) s.weight /= sum;
    return Histogram(std::move(raw));
  }

  const std::vector<Subinterval>& subintervals() const { return subs_; }
  std::size_t size() const { return subs_.size(); }

  double support_lower() const { return subs_.front().lower; }
  double support_upper() const { return subs_.back().upper; }

  // Mean of the distribution: sum of weighted subinterval centers.
  double mean() const {
    double m = 0.0;
    for (const auto& s : subs_) m += s.center() * s.weight;
    return m;
  }

 private:
  explicit Histogram(std::vector<Subinterval> subs) : subs_(std::move(subs)) {}
  std::vector<Subinterval> subs_;
};

// Interval observation; semantically a one-subinterval histogram of weight 1.
struct Interval {
  double lower = 0.0;
  double upper = 0.0;

  Histogram to_histogram() const {
    return Histogram::normalize({{lower, upper, 1.0}});
  }
};

namespace detail {

// Type-7 quantile of sorted data: linear interpolation between order statistics.
inline double sorted_quantile(const std::vector<double>& sorted, double p) {
  const std::size_t n = sorted.size();
  if (n == 1) return sorted[0];
  const double h = static_cast<double>(n - 1) * p;
  const auto j = static_cast<std::size_t>(h);
  if (j + 1 >= n) return sorted.back();
  const double frac = h - static_cast<double>(j);
  return sorted[j] + frac * (sorted[j + 1] - sorted[j]);
}

}  // namespace detail

// Bins a sample into `bins` equal-weight subintervals cut at the empirical
// quantiles; the outer bounds are the sample min/max.
inline Histogram equal_weight_histogram(std::vector<double> values, int bins) {
  if (values.empty()) fail(ErrorCode::EmptyInput, "no values to bin");
  if (bins < 1) fail(ErrorCode::InvalidParameters, "bins must be positive");
  for (double v : values)
    if (!std::isfinite(v)) fail(ErrorCode::InvalidParameters, "non-finite sample value");
  std::sort(values.begin(), values.end());

  std::vector<double> breaks(static_cast<std::size_t>(bins) + 1);
  breaks.front() = values.front();
  breaks.back() = values.back();
  for (int k = 1; k < bins; ++k)
    breaks[static_cast<std::size_t>(k)] =
        detail::sorted_quantile(values, static_cast<double>(k) / bins);

  const double w = 1.0 / bins;
  std::vector<Subinterval> subs;
  subs.reserve(static_cast<std::size_t>(bins));
  for (int k = 0; k < bins; ++k)
    subs.push_back({breaks[static_cast<std::size_t>(k)],
                    breaks[static_cast<std::size_t>(k) + 1], w});
  return Histogram::normalize(std::move(subs));
}

}  // namespace symbdisc
