#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "symbdisc/mallows.hpp"

using namespace symbdisc;
using Catch::Approx;

namespace {

QuantileFunction interval_qf(double center, double half_range) {
  return to_quantile(Interval{center - half_range, center + half_range});
}

QuantileFunction random_qf(std::mt19937_64& rng, int max_pieces = 5,
                           double center_scale = 200.0, double hr_scale = 30.0) {
  std::uniform_int_distribution<int> npieces(1, max_pieces);
  const int m = npieces(rng);
  std::vector<double> cuts{0.0, 1.0};
  std::uniform_real_distribution<double> cut(0.05, 0.95);
  for (int i = 1; i < m; ++i) cuts.push_back(cut(rng));
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end(),
                         [](double a, double b) { return b - a < 0.02; }),
             cuts.end());
  if (cuts.back() != 1.0) cuts.back() = 1.0;
  std::vector<QfPiece> pieces;
  double v = std::uniform_real_distribution<double>(-center_scale, center_scale)(rng);
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double hr = std::uniform_real_distribution<double>(0.0, hr_scale)(rng);
    const double jump = std::uniform_real_distribution<double>(0.0, hr_scale / 3.0)(rng);
    pieces.push_back({cuts[i], cuts[i + 1], v + jump + hr, hr});
    v += jump + 2 * hr;
  }
  return QuantileFunction::from_pieces(std::move(pieces));
}

}  // namespace

TEST_CASE("distance of a function to itself is zero") {
  std::mt19937_64 rng(551);
  const QuantileFunction q = random_qf(rng);
  CHECK(mallows_sq(q, q) == 0.0);
  CHECK(mallows_sq_numeric(q, q) == Approx(0.0).margin(1e-12));
}

TEST_CASE("degenerate intervals recover the squared Euclidean distance") {
  const QuantileFunction a = interval_qf(2.0, 0.0);
  const QuantileFunction b = interval_qf(-5.0, 0.0);
  CHECK(mallows_sq(a, b) == Approx(49.0));
}

TEST_CASE("closed form on a simple interval pair, with quadrature cross-check") {
  const QuantileFunction a = interval_qf(0.0, 1.0);
  const QuantileFunction b = interval_qf(2.0, 4.0);
  CHECK(mallows_sq(a, b) == Approx(7.0));  // 2^2 + (1/3)*3^2
  CHECK(mallows_sq_numeric(a, b, 200000) == Approx(7.0).margin(1e-6));
}

TEST_CASE("quadrature reproduces an analytic integral") {
  // difference 2(2t-1): integral of its square is 4/3
  const QuantileFunction a = interval_qf(0.0, 2.0);
  const QuantileFunction b = interval_qf(0.0, 0.0);
  CHECK(mallows_sq(a, b) == Approx(4.0 / 3.0));
  CHECK(mallows_sq_numeric(a, b, 200000) == Approx(4.0 / 3.0).margin(1e-6));
}

TEST_CASE("a symmetric function has distance zero to its reflection") {
  const QuantileFunction q = interval_qf(0.0, 1.0);
  CHECK(mallows_sq(q, reflect(q)) == Approx(0.0).margin(1e-15));
}

TEST_CASE("misaligned pair construction is refused") {
  const QuantileFunction a =
      to_quantile(Histogram::normalize({{0, 1, 0.3}, {1, 2, 0.7}}));
  const QuantileFunction b = interval_qf(0.0, 1.0);
  CHECK_THROWS_AS(AlignedPair(a, b), Error);
  CHECK_NOTHROW(AlignedPair::make(a, b));
}

TEST_CASE("closed form matches quadrature on random pairs") {
  std::mt19937_64 rng(552);
  for (int it = 0; it < 60; ++it) {
    const QuantileFunction a = random_qf(rng, 5, 500.0, 5.0);
    const QuantileFunction b = random_qf(rng, 5, 500.0, 5.0);
    const double exact = mallows_sq(a, b);
    const double numeric = mallows_sq_numeric(a, b, 400000);
    CHECK(std::abs(exact - numeric) <= 1e-6);
  }
}

TEST_CASE("square root of the closed form satisfies the triangle inequality") {
  std::mt19937_64 rng(553);
  for (int it = 0; it < 120; ++it) {
    const QuantileFunction a = random_qf(rng);
    const QuantileFunction b = random_qf(rng);
    const QuantileFunction c = random_qf(rng);
    CHECK(mallows(a, c) <= mallows(a, b) + mallows(b, c) + 1e-9);
  }
}

TEST_CASE("center gaps carry weight one and half-range gaps weight one third") {
  const QuantileFunction base = interval_qf(0.0, 1.0);
  const QuantileFunction c_off = interval_qf(3.0, 1.0);
  const QuantileFunction r_off = interval_qf(0.0, 4.0);
  CHECK(mallows_sq(base, c_off) == Approx(9.0));
  CHECK(mallows_sq(base, r_off) == Approx(3.0));
  // doubling only the half-range gap scales its term by four
  const QuantileFunction r_off2 = interval_qf(0.0, 7.0);
  CHECK(mallows_sq(base, r_off2) == Approx(12.0));
}

TEST_CASE("barycenter of n copies is the function") {
  std::mt19937_64 rng(554);
  const QuantileFunction q = random_qf(rng);
  const QuantileFunction b = barycenter({q, q, q, q});
  for (int i = 0; i <= 100; ++i)
    CHECK(b(i / 100.0) == Approx(q(i / 100.0)).margin(1e-12));
}

TEST_CASE("barycenter of two degenerate values is their midpoint") {
  const QuantileFunction b = barycenter({interval_qf(2.0, 0.0), interval_qf(8.0, 0.0)});
  CHECK(b(0.0) == Approx(5.0));
  CHECK(b(1.0) == Approx(5.0));
}

TEST_CASE("barycenter of the air-time column has the column mean") {
  std::vector<QuantileFunction> qs{
      to_quantile(Histogram::normalize(
          {{21, 56.5, 0.3}, {56.5, 106, 0.4}, {106, 196, 0.2}, {196, 272, 0.1}})),
      to_quantile(Histogram::normalize(
          {{20, 49, 0.2}, {49, 76, 0.2}, {76, 97, 0.2}, {97, 124, 0.2}, {124, 286, 0.2}})),
      to_quantile(Histogram::normalize(
          {{33, 68, 0.2}, {68, 77, 0.2}, {77, 105, 0.3}, {105, 236, 0.3}})),
      to_quantile(Histogram::normalize({{50, 68, 0.4}, {68, 70, 0.2}, {70, 177, 0.4}})),
      to_quantile(Histogram::normalize(
          {{32, 47, 0.2}, {47, 51, 0.2}, {51, 77, 0.2}, {77, 85, 0.2}, {85, 122, 0.2}})),
  };
  const QuantileFunction b = barycenter(qs);
  double mean_of_means = 0.0;
  for (const auto& q : qs) mean_of_means += q.mean_value();
  mean_of_means /= static_cast<double>(qs.size());
  CHECK(b.mean_value() == Approx(mean_of_means).margin(1e-9));
}

TEST_CASE("barycenter minimizes the sum of squared distances") {
  std::mt19937_64 rng(555);
  for (int it = 0; it < 40; ++it) {
    std::vector<QuantileFunction> qs;
    const int n = 2 + static_cast<int>(rng() % 5);
    for (int i = 0; i < n; ++i) qs.push_back(random_qf(rng));
    const WeightGrid grid = union_grid(qs);
    std::vector<QuantileFunction> aligned;
    for (const auto& q : qs) aligned.push_back(rebin(q, grid));
    const QuantileFunction b = barycenter(aligned);

    const auto objective = [&](const QuantileFunction& cand) {
      double s = 0.0;
      for (const auto& q : aligned) s += mallows_sq(AlignedPair(q, cand));
      return s;
    };
    const double at_bary = objective(b);
    for (std::size_t cell = 0; cell < b.piece_count(); ++cell) {
      for (const double delta : {1e-3, -1e-3}) {
        for (const bool perturb_center : {true, false}) {
          auto pieces = b.pieces();
          if (perturb_center)
            pieces[cell].center += delta;
          else
            pieces[cell].half_range += delta;
          if (pieces[cell].half_range < 0.0) continue;
          QuantileFunction cand = QuantileFunction::from_pieces(pieces);
          bool valid = true;
          for (std::size_t i = 1; i < cand.piece_count(); ++i)
            if (cand.pieces()[i].lower_value() <
                cand.pieces()[i - 1].upper_value() - 1e-12)
              valid = false;
          if (!valid) continue;
          CHECK(objective(cand) >= at_bary);
        }
      }
    }
  }
}

TEST_CASE("one group puts all inertia within") {
  std::mt19937_64 rng(556);
  std::vector<QuantileFunction> members;
  for (int i = 0; i < 6; ++i) members.push_back(random_qf(rng));
  const InertiaReport r = huygens({{"only", members}});
  CHECK(r.between == Approx(0.0).margin(1e-9));
  CHECK(r.total == Approx(r.within).margin(1e-9 * (1.0 + r.total)));
}

TEST_CASE("identical units give zero inertia everywhere") {
  const QuantileFunction q = interval_qf(3.0, 1.0);
  const InertiaReport r = huygens({{"a", {q, q}}, {"b", {q, q, q}}});
  CHECK(r.total == Approx(0.0).margin(1e-12));
  CHECK(r.between == Approx(0.0).margin(1e-12));
  CHECK(r.within == Approx(0.0).margin(1e-12));
}

TEST_CASE("Huygens identity holds for random groupings") {
  std::mt19937_64 rng(557);
  for (int it = 0; it < 100; ++it) {
    const int s = 2 + static_cast<int>(rng() % 2);  // 2 or 3 groups
    std::vector<std::pair<std::string, std::vector<QuantileFunction>>> groups;
    for (int k = 0; k < s; ++k) {
      std::vector<QuantileFunction> members;
      const int nk = 1 + static_cast<int>(rng() % 5);
      for (int i = 0; i < nk; ++i) members.push_back(random_qf(rng));
      groups.emplace_back("g" + std::to_string(k), std::move(members));
    }
    const InertiaReport r = huygens(groups);
    CHECK(r.total == Approx(r.between + r.within).epsilon(1e-9).margin(1e-9));
    CHECK(r.total >= -1e-12);
    CHECK(r.between >= -1e-12);
    CHECK(r.within >= -1e-12);
  }
}

TEST_CASE("empty group is refused") {
  CHECK_THROWS_AS(huygens({{"a", {}}}), Error);
  CHECK_THROWS_AS(huygens({}), Error);
}
