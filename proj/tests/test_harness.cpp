#include <cmath>
#include <random>

#include "doctest.h"
#include "eigentube/harness.hpp"

using namespace eigentube;

TEST_CASE("fit_loglog: exact powers, constants, noisy eighth power") {
  std::vector<double> lam = {10, 20, 40, 80, 160};
  std::vector<double> sq, c, noisy;
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-0.01, 0.01);
  for (double x : lam) {
    sq.push_back(x * x);
    c.push_back(3.0);
    noisy.push_back(std::pow(x, 0.125) * (1.0 + u(rng)));
  }
  auto f1 = fit_loglog(lam, sq);
  CHECK(std::abs(f1.slope - 2.0) < 1e-12);
  auto f2 = fit_loglog(lam, c);
  CHECK(std::abs(f2.slope) < 1e-12);
  auto f3 = fit_loglog(lam, noisy);
  CHECK(std::abs(f3.slope - 0.125) < 0.01);

  // rescaling v -> c v: slope unchanged, intercept shifts by log c
  std::vector<double> scaled;
  for (double v : sq) scaled.push_back(5.0 * v);
  auto f4 = fit_loglog(lam, scaled);
  CHECK(std::abs(f4.slope - f1.slope) < 1e-12);
  CHECK(std::abs(f4.intercept - f1.intercept - std::log(5.0)) < 1e-12);

  std::vector<double> bad = {1.0, -2.0, 3.0, 4.0, 5.0};
  CHECK_THROWS_AS(fit_loglog(lam, bad), std::domain_error);
}

TEST_CASE("run_sweep guards") {
  SweepConfig cfg;
  cfg.l_list = {};
  CHECK_THROWS_AS(run_sweep(cfg), std::domain_error);
}

TEST_CASE("run_sweep produces reports and reproducible bytes") {
  SweepConfig cfg;
  cfg.family = SphereFamily::highest_weight;
  cfg.l_list = {8, 16, 32};
  cfg.eps0_list = {0.1};
  cfg.grid_k = 32;
  cfg.restriction_k = 32;
  cfg.seed = 7;
  auto r1 = run_sweep(cfg);
  CHECK(r1.failures.empty());
  CHECK(r1.rows.size() == 3);
  CHECK(!r1.reports.empty());

  std::string j1 = sweep_to_json(r1).dump();
  std::string j2 = sweep_to_json(run_sweep(cfg)).dump();
  CHECK(j1 == j2);
  CHECK(j1.find("\"schema\":\"eigentube/1\"") != std::string::npos);
  CHECK(j1.find(r1.config_hash) != std::string::npos);
  CHECK(j1.find("quadrature_error") != std::string::npos);
}

TEST_CASE("highest-weight corollary verdict: consistent, saturated") {
  SweepConfig cfg;
  cfg.family = SphereFamily::highest_weight;
  cfg.l_list = {16, 32, 64};
  cfg.eps0_list = {0.1};
  cfg.grid_k = 64;
  cfg.restriction_k = 32;
  auto r = run_sweep(cfg);
  auto c = corollary_report(r);
  CHECK(c.verdict == "consistent, saturated");
  CHECK(!c.small_l4);
  CHECK(c.implication_holds);
}

TEST_CASE("random-family corollary: tube exponent near -1/4, L4 flat") {
  double tube_l2_slope = 0.0, l4_slope = 0.0;
  int seeds = 0;
  for (std::uint64_t seed : {11ull, 12ull, 13ull, 14ull, 15ull}) {
    SweepConfig cfg;
    cfg.family = SphereFamily::random_gaussian;
    cfg.l_list = {16, 32, 64};
    cfg.eps0_list = {0.1};
    cfg.grid_k = 64;
    cfg.restriction_k = 32;
    cfg.seed = seed;
    cfg.quadrature_check = false;
    auto r = run_sweep(cfg);
    auto c = corollary_report(r);
    tube_l2_slope += c.exp_tube_l2;
    l4_slope += c.exp_l4;
    ++seeds;
    CHECK(c.implication_holds);
  }
  tube_l2_slope /= seeds;
  l4_slope /= seeds;
  CHECK(std::abs(tube_l2_slope + 0.25) < 0.1);
  CHECK(std::abs(l4_slope) < 0.1);
}

TEST_CASE("pick_circles: deterministic, admissible, sorted") {
  auto a = pick_circles(100000, 50);
  auto b = pick_circles(100000, 50);
  CHECK(a == b);
  CHECK(a.size() == 50);
  CHECK(std::is_sorted(a.begin(), a.end()));
  for (long long n : a) CHECK(r2_count(n) >= 8);
}

TEST_CASE("microlocal check report carries the schema and domination table") {
  MicrolocalCheckConfig cfg;
  cfg.lambda = 32.0;
  cfg.grid = 128;
  cfg.fields = 2;
  auto j = microlocal_check(cfg).dump();
  CHECK(j.find("\"schema\":\"eigentube/1\"") != std::string::npos);
  CHECK(j.find("domination_constant") != std::string::npos);
  CHECK(j.find("partition_identity_error") != std::string::npos);
  // reproducible bytes
  CHECK(j == microlocal_check(cfg).dump());
}

TEST_CASE("torus-l4 and lattice-arcs tables have headers and rows") {
  auto csv = torus_l4_csv(2000, 3, 2, 9);
  CHECK(csv.rfind("n,r2,trial,l4_over_l2,bound_margin\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 3 * 2);

  auto arcs = lattice_arcs_csv(500, -0.6);
  CHECK(arcs.rfind("n,r2,count,running_max\n", 0) == 0);
  CHECK(std::count(arcs.begin(), arcs.end(), '\n') > 10);
}
