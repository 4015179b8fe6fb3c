#include <cmath>
#include <random>

#include "doctest.h"
#include "eigentube/geometry.hpp"
#include "eigentube/models.hpp"
#include "eigentube/norms.hpp"

using namespace eigentube;

TEST_CASE("sphere_grid(1): node counts and weight sum") {
  auto g = sphere_grid(1);
  CHECK(g->mu.size() == 3);
  CHECK(g->nphi == 5);
  double sum = 0;
  for (std::size_t i = 0; i < g->size(); ++i) sum += g->weight(i);
  CHECK(std::abs(sum - kFourPi) < 1e-13);
}

TEST_CASE("grid integrates |Y_2^1|^2 to one exactly") {
  auto g = sphere_grid(2);
  SphereHarmonicSpec spec{SphereFamily::single_lm, 2, 1};
  std::vector<Vec3> nodes(g->size());
  for (std::size_t i = 0; i < nodes.size(); ++i) nodes[i] = g->sphere_node(i);
  auto vals = eval_sphere_harmonic_at(spec, nodes);
  double sum = 0;
  for (std::size_t i = 0; i < vals.size(); ++i)
    sum += g->weight(i) * std::norm(vals[i]);
  CHECK(std::abs(sum - 1.0) < 1e-13);
}

TEST_CASE("exactness plateau: |Y_4^4|^4 equal on l_max=4 and l_max=8 grids") {
  double vals[2];
  int k = 0;
  for (int lmax : {4, 8}) {
    auto g = sphere_grid(lmax);
    SphereHarmonicSpec spec{SphereFamily::highest_weight, 4};
    auto f = eval_sphere_harmonic(spec, g);
    double sum = 0;
    for (std::size_t i = 0; i < f.values.size(); ++i) {
      double a = std::norm(f.values[i]);
      sum += g->weight(i) * a * a;
    }
    vals[k++] = sum;
  }
  CHECK(std::abs(vals[0] - vals[1]) < 1e-12);
}

TEST_CASE("dist_to_great_circle") {
  GreatCircle g{Vec3{0, 0, 1}};
  CHECK(std::abs(dist_to_great_circle({0, 0, 1}, g) - kPi / 2) < 1e-15);
  CHECK(dist_to_great_circle({1, 0, 0}, g) == 0.0);
  Vec3 p{std::sqrt(0.75), 0.0, 0.5};  // p.n = 0.5
  CHECK(std::abs(dist_to_great_circle(p, g) - kPi / 6) < 1e-15);
}

TEST_CASE("great-circle pole canonicalization and pole symmetry") {
  GreatCircle g{Vec3{0.3, -0.4, -0.5}};
  GreatCircle c = g.canonical();
  CHECK(c.pole.z > 0);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> gauss;
  for (int k = 0; k < 50; ++k) {
    Vec3 p = Vec3{gauss(rng), gauss(rng), gauss(rng)}.normalized();
    CHECK(dist_to_great_circle(p, g) ==
          doctest::Approx(dist_to_great_circle(p, GreatCircle{g.pole * -1.0}))
              .epsilon(1e-14));
  }
}

TEST_CASE("tube_mask: band fraction, empty tube, torus strip") {
  auto g = sphere_grid_custom(96, 192);
  SampledField ones;
  ones.grid = g;
  ones.manifold = Manifold::sphere;
  ones.values.assign(g->size(), cplx{1.0, 0.0});

  Tube t = Tube::around(GreatCircle{Vec3{0, 0, 1}}, kPi / 4);
  auto mask = tube_mask(*g, t);
  double frac = 0, total = 0;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    frac += mask[i];
    total += g->weight(i);
  }
  CHECK(std::abs(frac / total - std::sin(kPi / 4)) < g->node_spacing());

  Tube tiny = Tube::around(GreatCircle{Vec3{0, 0, 1}}, 1e-9);
  auto empty = tube_mask(*g, tiny);
  for (double w : empty) CHECK(w == 0.0);

  auto tg = torus_grid(64);
  Tube strip = Tube::around(TorusLine{1, 0, 1.0}, 0.1);
  auto tmask = tube_mask(*tg, strip);
  for (std::size_t i = 0; i < tmask.size(); ++i) {
    auto x = tg->torus_node(i);
    bool inside = std::abs(std::remainder(x[1] - 1.0, kTwoPi)) <= 0.1;
    CHECK((tmask[i] > 0) == inside);
  }
}

TEST_CASE("rotation invariance of the constant-field band fraction") {
  auto g = sphere_grid_custom(128, 256);
  SampledField ones;
  ones.grid = g;
  ones.manifold = Manifold::sphere;
  ones.values.assign(g->size(), cplx{1.0, 0.0});
  double delta = 0.2;
  std::mt19937_64 rng(11);
  std::normal_distribution<double> gauss;
  for (int k = 0; k < 6; ++k) {
    GreatCircle c{Vec3{gauss(rng), gauss(rng), gauss(rng)}.normalized()};
    double m = tube_mass(ones, c, delta);
    CHECK(std::abs(m / kFourPi - std::sin(delta)) < 2 * g->node_spacing());
  }
}

TEST_CASE("geodesic_grid_sphere: separation, covering, refinement of covering") {
  auto g16 = geodesic_grid_sphere(16);
  CHECK(g16.poles.size() == 16);
  for (std::size_t a = 0; a < g16.poles.size(); ++a)
    for (std::size_t b = a + 1; b < g16.poles.size(); ++b) {
      double d = std::min(angle_between(g16.poles[a].pole, g16.poles[b].pole),
                          angle_between(g16.poles[a].pole, g16.poles[b].pole * -1.0));
      CHECK(d >= 0.3);
    }
  // the equator's pole is covered within the measured resolution
  double dmin = kPi;
  for (const auto& c : g16.poles)
    dmin = std::min(dmin, angle_between(c.pole, Vec3{0, 0, 1}));
  CHECK(dmin <= g16.resolution);
  CHECK(g16.resolution <= 1.5 * std::sqrt(kTwoPi / 16));

  // measured covering radius shrinks by >= 1.3 per doubling at the default
  // scale, and on geometric average across the ladder
  auto g256 = geodesic_grid_sphere(256);
  auto g512 = geodesic_grid_sphere(512);
  CHECK(g256.resolution / g512.resolution >= 1.3);
  auto g1024 = geodesic_grid_sphere(1024);
  double per_doubling =
      std::pow(g16.resolution / g1024.resolution, 1.0 / 6.0);
  CHECK(per_doubling >= 1.3);
}

TEST_CASE("refine_sup: concave model, constant objective") {
  Vec3 target = Vec3{0.2, -0.1, 1.0}.normalized();
  auto objective = [&](const GreatCircle& g) {
    double d = angle_between(g.pole, target);
    return -d * d;
  };
  GreatCircle start{Vec3{0.4, 0.1, 1.0}.normalized()};
  auto r = refine_sup(objective, start, 1e-4, 0.3);
  CHECK(r.converged);
  CHECK(angle_between(r.geodesic.pole, target) < 1e-3);
  CHECK(r.value >= objective(start));

  auto flat = refine_sup([](const GreatCircle&) { return 1.0; }, start, 1e-3);
  CHECK(flat.value == 1.0);
  CHECK(angle_between(flat.geodesic.pole, start.pole) == 0.0);
}

TEST_CASE("refine_sup finds the equatorial tube of a highest-weight field") {
  const int l = 64;
  auto grid = sphere_grid_custom(8 * l, 8 * l);
  SphereHarmonicSpec spec{SphereFamily::highest_weight, l};
  auto f = eval_sphere_harmonic(spec, grid);
  double delta = 1.0 / std::sqrt(spec.lambda());
  auto objective = [&](const GreatCircle& g) { return tube_mass(f, g, delta); };
  GreatCircle start{Vec3{0.25, -0.15, 1.0}.normalized()};
  auto r = refine_sup(objective, start, 1e-3, 0.3);
  double dist_to_z = std::min(angle_between(r.geodesic.pole, Vec3{0, 0, 1}),
                              angle_between(r.geodesic.pole, Vec3{0, 0, -1}));
  CHECK(dist_to_z < 0.05);
}

TEST_CASE("refine_sup never returns less than the coarse best") {
  auto grid = geodesic_grid_sphere(64);
  auto objective = [](const GreatCircle& g) {
    return std::cos(3 * g.pole.x) + std::sin(2 * g.pole.y) + g.pole.z;
  };
  double coarse = -1e30;
  GreatCircle best = grid.poles[0];
  for (const auto& c : grid.poles)
    if (objective(c) > coarse) {
      coarse = objective(c);
      best = c;
    }
  auto r = refine_sup(objective, best, 1e-3, grid.resolution);
  CHECK(r.value >= coarse);
}

TEST_CASE("torus line basics") {
  TorusLine l{2, 3, 0.25};
  CHECK(std::abs(l.length() - kTwoPi * std::sqrt(13.0)) < 1e-12);
  CHECK_THROWS_AS(TorusLine(2, 4, 0.0), std::domain_error);
  // distance is zero along the line itself
  for (double t : {0.0, 1.0, 2.5, 7.0})
    CHECK(dist_to_torus_line(l.point(t), l) < 1e-12);
  // offset wraps into [0, period)
  TorusLine wrapped{1, 0, kTwoPi + 0.3};
  CHECK(wrapped.offset == doctest::Approx(0.3));
}

TEST_CASE("gauss_legendre integrates high-degree polynomials exactly") {
  std::vector<double> x, w;
  gauss_legendre(64, x, w);
  // int_{-1}^{1} x^{2k} dx = 2/(2k+1), exact up to degree 127
  for (int k : {0, 5, 31, 63}) {
    double s = 0;
    for (int i = 0; i < 64; ++i) s += w[i] * std::pow(x[i], 2 * k);
    CHECK(std::abs(s - 2.0 / (2 * k + 1)) < 1e-13);
  }
}
