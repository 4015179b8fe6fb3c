#include "eigentube/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace eigentube {

GreatCircle::GreatCircle(Vec3 n) : pole(n.normalized()) {
  if (std::abs(pole.norm() - 1.0) > 1e-14)
    throw std::domain_error("great-circle pole must be a unit vector");
}

GreatCircle GreatCircle::canonical() const {
  Vec3 n = pole;
  double lead = n.z != 0.0 ? n.z : (n.y != 0.0 ? n.y : n.x);
  if (lead < 0.0) n = n * -1.0;
  return GreatCircle(n);
}

void GreatCircle::frame(Vec3& u, Vec3& v) const {
  Vec3 ref = std::abs(pole.z) < 0.9 ? Vec3{0, 0, 1} : Vec3{1, 0, 0};
  u = pole.cross(ref).normalized();
  v = pole.cross(u);
}

TorusLine::TorusLine(int p_, int q_, double offset_) : p(p_), q(q_), offset(offset_) {
  if (p == 0 && q == 0) throw std::domain_error("torus line needs a direction");
  if (std::gcd(std::abs(p), std::abs(q)) != 1)
    throw std::domain_error("torus line direction must be primitive");
  if (q < 0 || (q == 0 && p < 0)) {
    p = -p;
    q = -q;
  }
  double period = perp_period();
  offset -= period * std::floor(offset / period);
}

double TorusLine::length() const { return kTwoPi * std::hypot((double)p, (double)q); }

double TorusLine::perp_period() const {
  return kTwoPi / std::hypot((double)p, (double)q);
}

std::array<double, 2> TorusLine::point(double t) const {
  double h = std::hypot((double)p, (double)q);
  // anchor = normal * offset, normal = (-q, p)/h
  double x1 = -q / h * offset + t * p / h;
  double x2 = p / h * offset + t * q / h;
  x1 -= kTwoPi * std::floor(x1 / kTwoPi);
  x2 -= kTwoPi * std::floor(x2 / kTwoPi);
  return {x1, x2};
}

Tube Tube::around(const GreatCircle& g, double radius) {
  if (!(radius > 0.0 && radius < kPi / 2))
    throw std::domain_error("tube radius must lie in (0, pi/2)");
  Tube t{Manifold::sphere, g, TorusLine{}, radius};
  return t;
}

Tube Tube::around(const TorusLine& l, double radius) {
  if (!(radius > 0.0 && radius < kPi / 2))
    throw std::domain_error("tube radius must lie in (0, pi/2)");
  Tube t{Manifold::torus, GreatCircle{Vec3{0, 0, 1}}, l, radius};
  return t;
}

std::size_t QuadratureGrid::size() const {
  return manifold == Manifold::sphere ? mu.size() * nphi
                                      : static_cast<std::size_t>(n) * n;
}

double QuadratureGrid::weight(std::size_t i) const {
  if (manifold == Manifold::sphere) return wmu[i / nphi] * (kTwoPi / nphi);
  double h = kTwoPi / n;
  return h * h;
}

Vec3 QuadratureGrid::sphere_node(std::size_t i) const {
  std::size_t it = i / nphi, j = i % nphi;
  double m = mu[it];
  double s = std::sqrt(std::max(0.0, 1.0 - m * m));
  double phi = kTwoPi * j / nphi;
  return {s * std::cos(phi), s * std::sin(phi), m};
}

std::array<double, 2> QuadratureGrid::torus_node(std::size_t i) const {
  double h = kTwoPi / n;
  return {h * static_cast<double>(i / n), h * static_cast<double>(i % n)};
}

double QuadratureGrid::node_spacing() const {
  if (manifold == Manifold::torus) return kTwoPi / n;
  return std::max(kPi / static_cast<double>(mu.size()), kTwoPi / nphi);
}

void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    // Tricomi-style initial guess for the i-th root from the top.
    double t = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = t;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (t * p1 - p0) / (t * t - 1.0);
      double dt = p1 / dp;
      t -= dt;
      if (std::abs(dt) < 1e-15) break;
    }
    x[n - 1 - i] = t;
    x[i] = -t;
    double ww = 2.0 / ((1.0 - t * t) * dp * dp);
    w[i] = ww;
    w[n - 1 - i] = ww;
  }
  if (n % 2 == 1) {
    // Middle node is exactly zero; recompute its weight directly.
    double t = 0.0, p0 = 1.0, p1 = t;
    for (int k = 2; k <= n; ++k) {
      double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    double dp = n * (t * p1 - p0) / (t * t - 1.0);
    x[n / 2] = 0.0;
    w[n / 2] = 2.0 / (dp * dp);
  }
}

std::shared_ptr<const QuadratureGrid> sphere_grid_custom(int n_theta, int n_phi) {
  auto g = std::make_shared<QuadratureGrid>();
  g->manifold = Manifold::sphere;
  gauss_legendre(n_theta, g->mu, g->wmu);
  g->nphi = n_phi;
  g->exactness = std::min(2 * n_theta - 1, n_phi - 1);
  return g;
}

std::shared_ptr<const QuadratureGrid> sphere_grid(int l_max) {
  if (l_max < 1) throw std::domain_error("sphere_grid requires l_max >= 1");
  return sphere_grid_custom(2 * l_max + 1, 4 * l_max + 1);
}

std::shared_ptr<const QuadratureGrid> torus_grid(int n_per_axis) {
  if (n_per_axis < 2) throw std::domain_error("torus grid too small");
  auto g = std::make_shared<QuadratureGrid>();
  g->manifold = Manifold::torus;
  g->n = n_per_axis;
  g->exactness = n_per_axis - 1;
  return g;
}

double dist_to_great_circle(const Vec3& p, const GreatCircle& g) {
  double c = std::clamp(p.dot(g.pole), -1.0, 1.0);
  return std::abs(std::asin(c));
}

double dist_to_torus_line(const std::array<double, 2>& x, const TorusLine& l) {
  double h = std::hypot((double)l.p, (double)l.q);
  double u = (-l.q * x[0] + l.p * x[1]) / h - l.offset;
  return std::abs(std::remainder(u, l.perp_period()));
}

std::vector<double> tube_mask(const QuadratureGrid& grid, const Tube& t) {
  if (grid.manifold != t.manifold)
    throw std::domain_error("tube and grid live on different manifolds");
  std::vector<double> mask(grid.size(), 0.0);
  if (t.manifold == Manifold::sphere) {
    double sr = std::sin(t.radius);
    const double wphi = kTwoPi / grid.nphi;
    for (std::size_t it = 0; it < grid.mu.size(); ++it) {
      double m = grid.mu[it];
      double s = std::sqrt(std::max(0.0, 1.0 - m * m));
      double w = grid.wmu[it] * wphi;
      for (int j = 0; j < grid.nphi; ++j) {
        double phi = kTwoPi * j / grid.nphi;
        Vec3 p{s * std::cos(phi), s * std::sin(phi), m};
        if (std::abs(p.dot(t.circle.pole)) <= sr) mask[it * grid.nphi + j] = w;
      }
    }
  } else {
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (dist_to_torus_line(grid.torus_node(i), t.line) <= t.radius)
        mask[i] = grid.weight(i);
    }
  }
  return mask;
}

namespace {

double covering_distance(const Vec3& p, const std::vector<GreatCircle>& poles) {
  double best = kPi;
  for (const auto& c : poles) {
    double d = std::min(angle_between(p, c.pole),
                        angle_between(p, c.pole * -1.0));
    best = std::min(best, d);
  }
  return best;
}

}  // namespace

GeodesicGrid geodesic_grid_sphere(int K) {
  if (K < 16) throw std::domain_error("geodesic grid needs K >= 16");
  GeodesicGrid g;
  g.manifold = Manifold::sphere;
  g.poles.reserve(K);
  const double golden = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int i = 0; i < K; ++i) {
    double z = (i + 0.5) / K;  // upper hemisphere only: antipodes identified
    double phi = kTwoPi * std::fmod(golden * i, 1.0);
    double s = std::sqrt(std::max(0.0, 1.0 - z * z));
    g.poles.emplace_back(Vec3{s * std::cos(phi), s * std::sin(phi), z});
  }
  // Measured covering radius over a fixed random sample.
  std::mt19937_64 rng(0x9e3779b97f4a7c15ull);
  std::normal_distribution<double> gauss(0.0, 1.0);
  double radius = 0.0;
  for (int k = 0; k < 2000; ++k) {
    Vec3 p{gauss(rng), gauss(rng), gauss(rng)};
    if (p.norm() == 0.0) continue;
    p = p.normalized();
    radius = std::max(radius, covering_distance(p, g.poles));
  }
  g.resolution = radius;
  return g;
}

GeodesicGrid geodesic_grid_torus(int qmax, double spacing) {
  if (qmax < 1 || spacing <= 0.0)
    throw std::domain_error("bad torus geodesic grid parameters");
  GeodesicGrid g;
  g.manifold = Manifold::torus;
  std::vector<std::pair<int, int>> dirs;
  dirs.emplace_back(1, 0);
  for (int q = 1; q <= qmax; ++q)
    for (int p = -qmax; p <= qmax; ++p)
      if (std::gcd(std::abs(p), q) == 1) dirs.emplace_back(p, q);
  for (auto [p, q] : dirs) {
    TorusLine base(p, q, 0.0);
    double period = base.perp_period();
    int cnt = std::max(1, static_cast<int>(std::ceil(period / spacing)));
    for (int k = 0; k < cnt; ++k) g.lines.emplace_back(p, q, period * k / cnt);
  }
  g.resolution = spacing;
  return g;
}

RefineResult refine_sup(const std::function<double(const GreatCircle&)>& objective,
                        const GreatCircle& start, double tol, double initial_step,
                        int max_rounds) {
  if (!(tol > 0.0)) throw std::domain_error("refine_sup requires tol > 0");
  RefineResult r;
  r.geodesic = start;
  r.value = objective(start);
  r.evaluations = 1;
  double step = initial_step;
  int rounds = 0;
  while (step >= tol && rounds < max_rounds) {
    ++rounds;
    Vec3 u, v;
    r.geodesic.frame(u, v);
    bool moved = false;
    const Vec3 dirs[4] = {u, u * -1.0, v, v * -1.0};
    for (const Vec3& d : dirs) {
      GreatCircle cand((r.geodesic.pole + d * step).normalized());
      double val = objective(cand);
      ++r.evaluations;
      if (val > r.value) {
        r.value = val;
        r.geodesic = cand;
        moved = true;
        break;
      }
    }
    if (!moved) step *= 0.5;
  }
  r.converged = step < tol;
  return r;
}

RefineResult refine_sup_torus(const std::function<double(const TorusLine&)>& objective,
                              const TorusLine& start, double tol,
                              double initial_step, int max_rounds) {
  if (!(tol > 0.0)) throw std::domain_error("refine_sup requires tol > 0");
  RefineResult r;
  r.line = start;
  r.value = objective(start);
  r.evaluations = 1;
  double step = initial_step;
  int rounds = 0;
  while (step >= tol && rounds < max_rounds) {
    ++rounds;
    bool moved = false;
    for (double sgn : {1.0, -1.0}) {
      TorusLine cand(r.line.p, r.line.q, r.line.offset + sgn * step);
      double val = objective(cand);
      ++r.evaluations;
      if (val > r.value) {
        r.value = val;
        r.line = cand;
        moved = true;
        break;
      }
    }
    if (!moved) step *= 0.5;
  }
  r.converged = step < tol;
  return r;
}

}  // namespace eigentube
