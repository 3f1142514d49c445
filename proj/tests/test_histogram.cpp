#include <catch2/catch_amalgamated.hpp>

#include "symbdisc/histogram.hpp"

using namespace symbdisc;
using Catch::Approx;

TEST_CASE("normalize sorts out-of-order subintervals") {
  const Histogram h = Histogram::normalize({{1.0, 2.0, 0.5}, {0.0, 1.0, 0.5}});
  REQUIRE(h.size() == 2);
  CHECK(h.subintervals()[0].lower == 0.0);
  CHECK(h.subintervals()[0].upper == 1.0);
  CHECK(h.subintervals()[1].lower == 1.0);
  CHECK(h.subintervals()[0].weight == Approx(0.5));
}

TEST_CASE("normalize refuses overlapping subintervals") {
  REQUIRE_THROWS_MATCHES(Histogram::normalize({{0.0, 1.0, 0.3}, {0.5, 2.0, 0.7}}), Error,
                         Catch::Matchers::Predicate<Error>([](const Error& e) {
                           return e.code() == ErrorCode::OverlappingSubintervals;
                         }));
}

TEST_CASE("the 9E air-time histogram is accepted unchanged") {
  const Histogram h = Histogram::normalize(
      {{21.0, 56.5, 0.3}, {56.5, 106.0, 0.4}, {106.0, 196.0, 0.2}, {196.0, 272.0, 0.1}});
  REQUIRE(h.size() == 4);
  CHECK(h.subintervals()[0].lower == 21.0);
  CHECK(h.subintervals()[3].upper == 272.0);
  CHECK(h.subintervals()[1].weight == Approx(0.4));
  CHECK(h.subintervals()[1].center() == Approx(81.25));
  CHECK(h.subintervals()[1].half_range() == Approx(24.75));
}

TEST_CASE("normalize drops zero-weight subintervals") {
  const Histogram h = Histogram::normalize({{0.0, 1.0, 0.5}, {1.0, 2.0, 0.0}, {2.0, 3.0, 0.5}});
  REQUIRE(h.size() == 2);
  CHECK(h.subintervals()[1].lower == 2.0);
}

TEST_CASE("normalize renormalizes near-unit weight sums and rejects bad sums") {
  const Histogram h = Histogram::normalize({{0.0, 1.0, 0.5000001}, {1.0, 2.0, 0.5}});
  CHECK(h.subintervals()[0].weight + h.subintervals()[1].weight == Approx(1.0).margin(1e-12));

  REQUIRE_THROWS_MATCHES(Histogram::normalize({{0.0, 1.0, 0.4}, {1.0, 2.0, 0.4}}), Error,
                         Catch::Matchers::Predicate<Error>([](const Error& e) {
                           return e.code() == ErrorCode::WeightSumOutOfTolerance;
                         }));
}

TEST_CASE("normalize rejects empty and invalid input") {
  CHECK_THROWS_AS(Histogram::normalize({}), Error);
  CHECK_THROWS_AS(Histogram::normalize({{2.0, 1.0, 1.0}}), Error);
  CHECK_THROWS_AS(Histogram::normalize({{0.0, 1.0, -0.2}, {1.0, 2.0, 1.2}}), Error);
}

TEST_CASE("gaps between subintervals are allowed") {
  const Histogram h = Histogram::normalize({{0.0, 1.0, 0.5}, {3.0, 4.0, 0.5}});
  REQUIRE(h.size() == 2);
  CHECK(h.mean() == Approx(0.5 * 0.5 + 3.5 * 0.5));
}

TEST_CASE("interval converts to a one-subinterval histogram") {
  const Histogram h = Interval{-68.0, 744.0}.to_histogram();
  REQUIRE(h.size() == 1);
  CHECK(h.subintervals()[0].center() == Approx(338.0));
  CHECK(h.subintervals()[0].half_range() == Approx(406.0));
  CHECK(h.subintervals()[0].weight == 1.0);
}

TEST_CASE("equal-weight binning of {1..5} uses interpolated quantile cuts") {
  const Histogram h = equal_weight_histogram({5.0, 3.0, 1.0, 4.0, 2.0}, 5);
  REQUIRE(h.size() == 5);
  const auto& s = h.subintervals();
  CHECK(s[0].lower == Approx(1.0));
  CHECK(s[0].upper == Approx(1.8));
  CHECK(s[1].upper == Approx(2.6));
  CHECK(s[2].upper == Approx(3.4));
  CHECK(s[3].upper == Approx(4.2));
  CHECK(s[4].upper == Approx(5.0));
  for (const auto& sub : s) CHECK(sub.weight == Approx(0.2));
}

TEST_CASE("equal-weight binning tolerates ties and single values") {
  const Histogram tied = equal_weight_histogram({2.0, 2.0, 2.0, 2.0}, 5);
  REQUIRE(tied.size() == 5);
  CHECK(tied.support_lower() == 2.0);
  CHECK(tied.support_upper() == 2.0);
  CHECK_THROWS_AS(equal_weight_histogram({}, 5), Error);
}
