#include "eigentube/norms.hpp"

#include <algorithm>
#include <cmath>

namespace eigentube {

namespace {

// Precomputed |v|^2 w and |v|^4 w with the sphere row structure cached, so
// the sup search can evaluate thousands of tube masses cheaply.
class TubeMassEvaluator {
 public:
  explicit TubeMassEvaluator(const SampledField& f) : grid_(*f.grid) {
    const std::size_t n = f.values.size();
    w2_.resize(n);
    w4_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      double w = grid_.weight(i);
      double a2 = std::norm(f.values[i]);
      w2_[i] = w * a2;
      w4_[i] = w * a2 * a2;
    }
    if (grid_.manifold == Manifold::sphere) {
      const int nphi = grid_.nphi;
      cphi_.resize(nphi);
      sphi_.resize(nphi);
      for (int j = 0; j < nphi; ++j) {
        double phi = kTwoPi * j / nphi;
        cphi_[j] = std::cos(phi);
        sphi_[j] = std::sin(phi);
      }
      sin_t_.resize(grid_.mu.size());
      for (std::size_t it = 0; it < grid_.mu.size(); ++it)
        sin_t_[it] = std::sqrt(std::max(0.0, 1.0 - grid_.mu[it] * grid_.mu[it]));
    }
  }

  double mass(const GreatCircle& g, double radius, bool fourth = false) const {
    const double sr = std::sin(radius);
    const Vec3 n = g.pole;
    const int nphi = grid_.nphi;
    const std::size_t rows = grid_.mu.size();
    std::vector<double> a(nphi);
    for (int j = 0; j < nphi; ++j) a[j] = n.x * cphi_[j] + n.y * sphi_[j];
    const std::vector<double>& wv = fourth ? w4_ : w2_;
    return parallel_sum(rows * nphi, [&](std::size_t i0, std::size_t i1) {
      double acc = 0.0;
      for (std::size_t i = i0; i < i1; ++i) {
        std::size_t it = i / nphi, j = i % nphi;
        double t = sin_t_[it] * a[j] + grid_.mu[it] * n.z;
        if (std::abs(t) <= sr) acc += wv[i];
      }
      return acc;
    });
  }

  double mass(const TorusLine& line, double radius, bool fourth = false) const {
    const std::vector<double>& wv = fourth ? w4_ : w2_;
    const int n = grid_.n;
    const double h = kTwoPi / n;
    const double hyp = std::hypot((double)line.p, (double)line.q);
    const double period = line.perp_period();
    return parallel_sum(wv.size(), [&](std::size_t i0, std::size_t i1) {
      double acc = 0.0;
      for (std::size_t i = i0; i < i1; ++i) {
        double x1 = h * static_cast<double>(i / n);
        double x2 = h * static_cast<double>(i % n);
        double u = (-line.q * x1 + line.p * x2) / hyp - line.offset;
        if (std::abs(std::remainder(u, period)) <= radius) acc += wv[i];
      }
      return acc;
    });
  }

  // Max mass over unit-arclength parameter windows along the geodesic.
  double unit_arc_mass(const GreatCircle& g, double radius) const {
    Vec3 u, v;
    g.frame(u, v);
    const double sr = std::sin(radius);
    std::vector<std::pair<double, double>> items;  // (parameter, mass)
    for (std::size_t i = 0; i < w2_.size(); ++i) {
      Vec3 p = grid_.sphere_node(i);
      if (std::abs(p.dot(g.pole)) > sr) continue;
      double t = std::atan2(p.dot(v), p.dot(u));
      items.emplace_back(t < 0 ? t + kTwoPi : t, w2_[i]);
    }
    return sliding_window_max(items, kTwoPi, 1.0);
  }

  double unit_arc_mass(const TorusLine& line, double radius) const {
    const double hyp = std::hypot((double)line.p, (double)line.q);
    const double L = line.length();
    std::vector<std::pair<double, double>> items;
    for (std::size_t i = 0; i < w2_.size(); ++i) {
      auto x = grid_.torus_node(i);
      if (dist_to_torus_line(x, line) > radius) continue;
      // arclength parameter of the projection onto the line, mod L
      double t = (line.p * x[0] + line.q * x[1]) / hyp;
      t -= L * std::floor(t / L);
      items.emplace_back(t, w2_[i]);
    }
    return sliding_window_max(items, L, 1.0);
  }

 private:
  static double sliding_window_max(std::vector<std::pair<double, double>>& items,
                                   double period, double window) {
    if (items.empty()) return 0.0;
    if (window >= period) {
      double s = 0.0;
      for (auto& [t, m] : items) s += m;
      return s;
    }
    std::sort(items.begin(), items.end());
    const std::size_t n = items.size();
    std::vector<double> prefix(2 * n + 1, 0.0);
    for (std::size_t i = 0; i < 2 * n; ++i)
      prefix[i + 1] = prefix[i] + items[i % n].second;
    double best = 0.0;
    std::size_t j = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (j < i) j = i;
      while (j + 1 < i + n &&
             (j + 1 < n ? items[j + 1].first : items[j + 1 - n].first + period) -
                     items[i].first <=
                 window)
        ++j;
      best = std::max(best, prefix[j + 1] - prefix[i]);
    }
    return best;
  }

  const QuadratureGrid& grid_;
  std::vector<double> w2_, w4_;
  std::vector<double> cphi_, sphi_, sin_t_;
};

struct SupSearch {
  double coarse_value = 0.0;
  double value = 0.0;
  bool converged = false;
  GreatCircle circle{Vec3{0, 0, 1}};
  TorusLine line;
};

SupSearch sup_over_geodesics(const TubeMassEvaluator& ev, Manifold manifold,
                             const GeodesicGrid& cand, double radius,
                             double refine_tol, bool fourth) {
  if (cand.manifold != manifold)
    throw std::domain_error("geodesic grid manifold mismatch");
  SupSearch out;
  if (manifold == Manifold::sphere) {
    std::size_t best = 0;
    double best_val = -1.0;
    std::vector<double> vals(cand.poles.size());
    for (std::size_t k = 0; k < cand.poles.size(); ++k)
      vals[k] = ev.mass(cand.poles[k], radius, fourth);
    for (std::size_t k = 0; k < vals.size(); ++k)
      if (vals[k] > best_val) {
        best_val = vals[k];
        best = k;
      }
    out.coarse_value = best_val;
    auto refined = refine_sup(
        [&](const GreatCircle& g) { return ev.mass(g, radius, fourth); },
        cand.poles[best], refine_tol, std::max(cand.resolution, refine_tol));
    out.value = refined.value;
    out.circle = refined.geodesic.canonical();
    out.converged = refined.converged;
  } else {
    std::size_t best = 0;
    double best_val = -1.0;
    std::vector<double> vals(cand.lines.size());
    for (std::size_t k = 0; k < cand.lines.size(); ++k)
      vals[k] = ev.mass(cand.lines[k], radius, fourth);
    for (std::size_t k = 0; k < vals.size(); ++k)
      if (vals[k] > best_val) {
        best_val = vals[k];
        best = k;
      }
    out.coarse_value = best_val;
    auto refined = refine_sup_torus(
        [&](const TorusLine& l) { return ev.mass(l, radius, fourth); },
        cand.lines[best], refine_tol, std::max(cand.resolution / 2, refine_tol));
    out.value = refined.value;
    out.line = refined.line;
    out.converged = refined.converged;
  }
  return out;
}

}  // namespace

double lp_norm(const SampledField& f, double p) {
  if (!(p >= 1.0)) throw std::domain_error("lp_norm requires p >= 1");
  const QuadratureGrid& g = *f.grid;
  if (std::isinf(p)) {
    double m = 0.0;
    for (const cplx& v : f.values) m = std::max(m, std::abs(v));
    return m;
  }
  double s = parallel_sum(f.values.size(), [&](std::size_t i0, std::size_t i1) {
    std::vector<double> terms;
    terms.reserve(i1 - i0);
    for (std::size_t i = i0; i < i1; ++i)
      terms.push_back(g.weight(i) * std::pow(std::abs(f.values[i]), p));
    return pairwise_sum(terms);
  });
  return std::pow(s, 1.0 / p);
}

double lp_norm_masked(const SampledField& f, std::span<const double> mask, double p) {
  if (mask.size() != f.values.size()) throw std::invalid_argument("mask size");
  if (!(p >= 1.0)) throw std::domain_error("lp_norm requires p >= 1");
  double s = 0.0;
  for (std::size_t i = 0; i < mask.size(); ++i)
    if (mask[i] > 0.0) s += mask[i] * std::pow(std::abs(f.values[i]), p);
  return std::pow(s, 1.0 / p);
}

double restriction_norm(const SphereHarmonicSpec& spec, const GreatCircle& g,
                        int n_pts) {
  if (n_pts < 8 * spec.l)
    throw std::domain_error("restriction rule needs n_pts >= 8l");
  Vec3 u, v;
  g.frame(u, v);
  std::vector<Vec3> pts(n_pts);
  for (int k = 0; k < n_pts; ++k) {
    double t = kTwoPi * k / n_pts;
    pts[k] = u * std::cos(t) + v * std::sin(t);
  }
  auto vals = eval_sphere_harmonic_at(spec, pts);
  std::vector<double> terms(n_pts);
  for (int k = 0; k < n_pts; ++k) terms[k] = std::norm(vals[k]);
  return pairwise_sum(std::span<const double>(terms)) * (kTwoPi / n_pts);
}

double restriction_norm(const TorusEigenfunction& e, const TorusLine& line,
                        int n_pts) {
  double min_pts = 8.0 * std::sqrt(static_cast<double>(e.n)) *
                   std::hypot((double)line.p, (double)line.q);
  if (n_pts < min_pts)
    throw std::domain_error("restriction rule needs n_pts >= 8 sqrt(n) |dir|");
  const double L = line.length();
  std::vector<std::array<double, 2>> pts(n_pts);
  for (int k = 0; k < n_pts; ++k) pts[k] = line.point(L * k / n_pts);
  auto vals = eval_torus_eigenfunction_at(e, pts);
  std::vector<double> terms(n_pts);
  for (int k = 0; k < n_pts; ++k) terms[k] = std::norm(vals[k]);
  return pairwise_sum(std::span<const double>(terms)) * (L / n_pts);
}

double tube_mass(const SampledField& f, const GreatCircle& g, double radius) {
  return TubeMassEvaluator(f).mass(g, radius);
}

double tube_mass(const SampledField& f, const TorusLine& line, double radius) {
  return TubeMassEvaluator(f).mass(line, radius);
}

KNResult kn_norm(const SampledField& f, double lambda, double eps0,
                 const GeodesicGrid& candidates, double refine_tol) {
  if (!(eps0 > 0.0 && eps0 <= 0.5)) throw std::domain_error("need 0 < eps0 <= 1/2");
  double radius = std::pow(lambda, -0.5 + eps0);
  if (!(radius < kPi / 2)) throw std::domain_error("tube width out of range");
  if (radius < 3.0 * f.grid->node_spacing())
    throw std::runtime_error(
        "under-resolved: tube width below 3 grid spacings, use a finer grid");

  TubeMassEvaluator ev(f);
  auto sup = sup_over_geodesics(ev, f.manifold, candidates, radius, refine_tol,
                                /*fourth=*/false);
  KNResult r;
  r.lambda = lambda;
  r.eps0 = eps0;
  r.tube_radius = radius;
  r.sup_tube_mass = sup.value;
  r.coarse_tube_mass = sup.coarse_value;
  r.kn_value = std::sqrt(std::pow(lambda, 0.5 - eps0) * sup.value);
  r.refinement_converged = sup.converged;
  r.manifold = f.manifold;
  r.argmax_circle = sup.circle;
  r.argmax_line = sup.line;
  r.unit_arc_mass = f.manifold == Manifold::sphere
                        ? ev.unit_arc_mass(sup.circle, radius)
                        : ev.unit_arc_mass(sup.line, radius);
  return r;
}

double ratio_l4_tube(const SampledField& f, double lambda, double eps0,
                     const GeodesicGrid& candidates) {
  KNResult kn = kn_norm(f, lambda, eps0, candidates);
  if (!(kn.sup_tube_mass > 0.0))
    throw std::domain_error("degenerate zero sup tube mass");
  double l4 = lp_norm(f, 4.0);
  double l2 = lp_norm(f, 2.0);
  return l4 / (std::pow(lambda, 0.125) * std::sqrt(l2) *
               std::pow(kn.sup_tube_mass, 0.25));
}

TubeRatioPair ratio_l4_tube_halfwidth(const SampledField& f, double lambda,
                                      const GeodesicGrid& candidates) {
  double radius = std::pow(lambda, -0.5);
  if (radius < 3.0 * f.grid->node_spacing())
    throw std::runtime_error(
        "under-resolved: tube width below 3 grid spacings, use a finer grid");
  TubeMassEvaluator ev(f);
  auto sup2 = sup_over_geodesics(ev, f.manifold, candidates, radius, 1e-3, false);
  auto sup4 = sup_over_geodesics(ev, f.manifold, candidates, radius, 1e-3, true);
  TubeRatioPair out;
  out.sup_tube_l2 = std::sqrt(sup2.value);
  out.sup_tube_l4 = std::pow(sup4.value, 0.25);
  double l4 = lp_norm(f, 4.0);
  out.vs_tube_l2 = l4 / (std::pow(lambda, 0.125) * std::sqrt(out.sup_tube_l2));
  out.vs_tube_l4 = l4 / (std::pow(lambda, 1.0 / 16.0) * std::sqrt(out.sup_tube_l4));
  return out;
}

}  // namespace eigentube
