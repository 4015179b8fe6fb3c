#include <cmath>
#include <random>

#include "doctest.h"
#include "eigentube/lattice.hpp"

using namespace eigentube;

namespace {

TorusEigenfunction random_circle_function(long long n, std::uint64_t seed) {
  TorusEigenfunction e{n, {}};
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  for (const auto& p : lattice_circle_points(n))
    e.coefficients.push_back({p, cplx{gauss(rng), gauss(rng)}});
  return e;
}

// Oracle for the maximal-arc count: try every window start at a point and
// count by explicit double-precision angles (guard-banded).
int arc_count_oracle(long long n, double aperture_exp) {
  auto pts = lattice_circle_points(n);
  if (pts.empty()) return 0;
  double lambda = std::sqrt((double)n);
  double win = std::pow(lambda, 1.0 + aperture_exp) / lambda;
  if (win >= kTwoPi - 1e-12) return static_cast<int>(pts.size());
  std::vector<double> ang;
  for (const auto& p : pts) {
    double a = std::atan2((double)p.y, (double)p.x);
    ang.push_back(a < 0 ? a + kTwoPi : a);
  }
  std::sort(ang.begin(), ang.end());
  int best = 0;
  for (std::size_t i = 0; i < ang.size(); ++i) {
    int cnt = 0;
    for (std::size_t j = 0; j < ang.size(); ++j) {
      double d = ang[j] - ang[i];
      if (d < 0) d += kTwoPi;
      if (d <= win + 1e-12) ++cnt;
    }
    best = std::max(best, cnt);
  }
  return best;
}

}  // namespace

TEST_CASE("r2 spot checks by enumeration") {
  CHECK(r2_count(5) == 8);
  CHECK(r2_count(25) == 12);
  CHECK(r2_count(65) == 16);
  CHECK(r2_count(325) == 24);
}

TEST_CASE("max_arc_count: unit window on n=1 sees one point") {
  // points spaced pi/2 apart along the circle, window arclength 1 < pi/2
  auto r = max_arc_count({1, -0.5});
  CHECK(r.total_points == 4);
  CHECK(r.count == 1);
}

TEST_CASE("max_arc_count: window of length zero counts the point itself") {
  auto r = max_arc_count({25, -1e9});
  CHECK(r.count == 1);
}

TEST_CASE("max_arc_count agrees with the sliding oracle; n=25 arclength-25 window") {
  // With aperture exponent a = +1 the window arclength is lambda^2 = 25,
  // shorter than the circumference 10*pi; the best 11-point run spans
  // 2*pi - 2*atan(3/4) = 4.9961 < 5 while all 12 span 5.6397. So 11.
  auto r = max_arc_count({25, 1.0});
  CHECK(r.count == 11);
  CHECK(arc_count_oracle(25, 1.0) == 11);

  for (long long n : {2, 5, 25, 65, 325, 1105}) {
    for (double a : {-0.7, -0.5, -0.2, 0.3, 1.0}) {
      CHECK(max_arc_count({n, a}).count == arc_count_oracle(n, a));
    }
  }
}

TEST_CASE("max_arc_count: windows at least the circumference count all points") {
  auto r = max_arc_count({25, 3.0});
  CHECK(r.count == 12);
}

TEST_CASE("max_arc_count is invariant under quarter-turn symmetry") {
  // rotating the point set by pi/2 permutes the circle points, so the
  // maximal window count is unchanged; spot-check via the oracle at
  // apertures that are not symmetric in any special way.
  for (double a : {-0.55, -0.4, 0.1}) {
    int c = max_arc_count({325, a}).count;
    CHECK(c == arc_count_oracle(325, a));
  }
}

TEST_CASE("cc_regime_scan basics") {
  CHECK(cc_regime_scan(1, 0.1).empty());  // N < 2: empty table
  CHECK(cc_regime_scan(2, 0.1).size() == 2);

  auto table = cc_regime_scan(2000, 0.1);
  CHECK(!table.empty());
  int running = 0;
  for (const auto& row : table) {
    running = std::max(running, row.count);
    CHECK(row.running_max == running);
    CHECK(row.r2 == r2_count(row.n));
  }
}

TEST_CASE("zygmund_l4: single wave, cosine pair, convolution vs quadrature") {
  TorusEigenfunction single{1, {{{1, 0}, 3.0}}};
  CHECK(std::abs(zygmund_l4(single) - 1.0) < 1e-14);

  TorusEigenfunction pair{2, {{{1, 1}, 1.0}, {{-1, -1}, 1.0}}};
  CHECK(std::abs(zygmund_l4(pair) - std::pow(1.5, 0.25)) < 1e-14);

  // quadrature oracle: normalized measure, L2-normalized field
  TorusEigenfunction e{25, {}};
  for (const auto& p : lattice_circle_points(25))
    e.coefficients.push_back({p, cplx{1.0 / std::sqrt(12.0), 0.0}});
  auto grid = torus_grid(64);
  auto f = eval_torus_eigenfunction(e, grid);
  double l2sq = 0, l4sq = 0;
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    double w = grid->weight(i) / (kTwoPi * kTwoPi);
    l2sq += w * std::norm(f.values[i]);
    l4sq += w * std::norm(f.values[i]) * std::norm(f.values[i]);
  }
  double quad = std::pow(l4sq, 0.25) / std::sqrt(l2sq);
  CHECK(std::abs(zygmund_l4(e) - quad) < 1e-10);
}

TEST_CASE("zygmund bound: |e|_4/|e|_2 <= 3^{1/4} over random coefficients") {
  std::mt19937_64 seeds(2024);
  for (long long n : {5, 25, 65, 325, 1105, 4225}) {
    for (int trial = 0; trial < 20; ++trial) {
      auto e = random_circle_function(n, seeds());
      CHECK(zygmund_l4(e) <= std::pow(3.0, 0.25) + 1e-9);
    }
  }
}

TEST_CASE("torus_restriction: plane wave, resonant pair, constant direction") {
  TorusEigenfunction wave{1, {{{1, 0}, 2.0}}};
  TorusLine diag{1, 1, 0.2};
  double v = torus_restriction(wave, diag, 256);
  CHECK(std::abs(v - 4.0 * diag.length() / (kTwoPi * kTwoPi)) < 1e-12);

  // frequencies (0,5) and (3,4) share the projection onto (3,-3)... choose a
  // direction where two circle points project equally: (3,4) and (4,3) onto (1,1).
  TorusEigenfunction reso{25, {{{3, 4}, 1.0}, {{4, 3}, cplx{0.0, 1.0}}}};
  TorusLine l11{1, 1, 0.0};
  double p = torus_restriction(reso, l11, 2048);  // cross-check runs inside
  CHECK(p > 0.0);

  // direction (1,0) sees frequencies (0,+-5) as constants along the line
  TorusEigenfunction vert{25, {{{0, 5}, 1.0}, {{0, -5}, 1.0}}};
  TorusLine horiz{1, 0, 1.0};
  auto pts = std::vector<std::array<double, 2>>{};
  double r = torus_restriction(vert, horiz, 512);
  // |e| is constant along the line; value depends on the offset through the
  // cosine, but Parseval collapses both frequencies onto k=0
  double c0 = std::norm(cplx{std::polar(1.0 / kTwoPi, 5.0 * 1.0)} +
                        cplx{std::polar(1.0 / kTwoPi, -5.0 * 1.0)});
  CHECK(std::abs(r - horiz.length() * c0) < 1e-12);
}

TEST_CASE("torus_restriction cross-check triggers on too-few points") {
  // projections onto (1,1) differ (7 vs 5); 2 samples alias them onto the
  // same bin, the cross term breaks Parseval and the guard must fire
  TorusEigenfunction two{25, {{{3, 4}, 1.0}, {{0, 5}, 1.0}}};
  TorusLine l11{1, 1, 0.0};
  CHECK_THROWS_AS(torus_restriction(two, l11, 2), std::logic_error);
}
