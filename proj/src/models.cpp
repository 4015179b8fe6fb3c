#include "eigentube/models.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "eigentube/fft.hpp"

namespace eigentube {

namespace {

constexpr int kMaxDegree = 4096;

long long isqrt_ll(long long v) {
  if (v < 0) return -1;
  long long s = static_cast<long long>(std::floor(std::sqrt(static_cast<double>(v))));
  while (s > 0 && s * s > v) --s;
  while ((s + 1) * (s + 1) <= v) ++s;
  return s;
}

// Half-log of the sectoral prefactor: P~_m^m(x) = sign * exp(H(m) + (m/2)log(1-x^2))
// with H(m) = 0.5*log((2m+1)/(4pi)) + 0.5*sum_{k<=m} log((2k-1)/(2k)).
double sectoral_half_log(int m) {
  static const std::vector<double> table = [] {
    std::vector<double> t(kMaxDegree + 1, 0.0);
    for (int k = 1; k <= kMaxDegree; ++k)
      t[k] = t[k - 1] + std::log((2.0 * k - 1.0) / (2.0 * k));
    return t;
  }();
  return 0.5 * (std::log((2.0 * m + 1.0) / kFourPi) + table[m]);
}

double sectoral(int m, double x) {
  if (m == 0) return std::sqrt(1.0 / kFourPi);
  double om = (1.0 - x) * (1.0 + x);
  if (om <= 0.0) return 0.0;
  double v = std::exp(sectoral_half_log(m) + 0.5 * m * std::log(om));
  return (m & 1) ? -v : v;
}

void check_degree(int l, int m) {
  if (l > kMaxDegree) throw std::domain_error("degree overflow: l > 4096");
  if (l < 0 || std::abs(m) > l)
    throw std::domain_error("require 0 <= |m| <= l");
}

double recurrence_factor(int l, int m) {
  return std::sqrt((4.0 * l * l - 1.0) / (static_cast<double>(l) * l - static_cast<double>(m) * m));
}

}  // namespace

double normalized_plm(int l, int m, double x) {
  m = std::abs(m);
  check_degree(l, m);
  double pmm = sectoral(m, x);
  if (l == m) return pmm;
  double pm1 = x * std::sqrt(2.0 * m + 3.0) * pmm;
  if (l == m + 1) return pm1;
  double prev_a = std::sqrt(2.0 * m + 3.0);
  for (int k = m + 2; k <= l; ++k) {
    double a = recurrence_factor(k, m);
    double p = a * (x * pm1 - pmm / prev_a);
    pmm = pm1;
    pm1 = p;
    prev_a = a;
  }
  return pm1;
}

void normalized_plm_many(int l, int m, std::span<const double> x,
                         std::span<double> out) {
  m = std::abs(m);
  check_degree(l, m);
  if (out.size() != x.size()) throw std::invalid_argument("size mismatch");
  for (std::size_t j = 0; j < x.size(); ++j) out[j] = normalized_plm(l, m, x[j]);
}

void normalized_plm_all_m(int l, double x, std::span<double> out) {
  check_degree(l, 0);
  if (static_cast<int>(out.size()) != l + 1)
    throw std::invalid_argument("output must have l+1 entries");
  for (int m = 0; m <= l; ++m) out[m] = normalized_plm(l, m, x);
}

std::vector<LatticePoint> lattice_circle_points(long long n) {
  if (n < 1) throw std::domain_error("n must be positive");
  std::vector<LatticePoint> pts;
  long long a_max = isqrt_ll(n);
  for (long long a = -a_max; a <= a_max; ++a) {
    long long rem = n - a * a;
    long long b = isqrt_ll(rem);
    if (b * b != rem) continue;
    pts.push_back({a, b});
    if (b != 0) pts.push_back({a, -b});
  }
  auto half = [](const LatticePoint& p) {
    return (p.y < 0 || (p.y == 0 && p.x < 0)) ? 1 : 0;
  };
  std::sort(pts.begin(), pts.end(), [&](const LatticePoint& a, const LatticePoint& b) {
    int ha = half(a), hb = half(b);
    if (ha != hb) return ha < hb;
    return a.x * b.y - a.y * b.x > 0;
  });
  return pts;
}

std::vector<cplx> family_coefficients(const SphereHarmonicSpec& spec) {
  const int l = spec.l;
  check_degree(l, spec.family == SphereFamily::single_lm ? spec.m : 0);
  if (l < 1 && spec.family != SphereFamily::single_lm)
    throw std::domain_error("l >= 1 required for nonconstant families");
  std::vector<cplx> c(2 * l + 1, cplx{0.0, 0.0});
  auto at = [&](int m) -> cplx& { return c[m + l]; };
  switch (spec.family) {
    case SphereFamily::zonal:
      at(0) = 1.0;
      break;
    case SphereFamily::highest_weight:
      at(l) = 1.0;
      break;
    case SphereFamily::single_lm:
      at(spec.m) = 1.0;
      break;
    case SphereFamily::random_gaussian: {
      std::mt19937_64 rng(spec.seed);
      std::normal_distribution<double> gauss(0.0, 1.0);
      double s2 = std::sqrt(0.5);
      for (int m = -l; m <= l; ++m) {
        double re = gauss(rng), im = gauss(rng);
        at(m) = cplx{re * s2, im * s2};
      }
      double norm2 = 0.0;
      for (const cplx& z : c) norm2 += std::norm(z);
      double inv = 1.0 / std::sqrt(norm2);
      for (cplx& z : c) z *= inv;
      break;
    }
  }
  return c;
}

SampledField eval_sphere_harmonic(const SphereHarmonicSpec& spec,
                                  std::shared_ptr<const QuadratureGrid> grid) {
  if (!grid || grid->manifold != Manifold::sphere)
    throw std::domain_error("sphere grid required");
  const int l = spec.l;
  const auto coeffs = family_coefficients(spec);
  if (grid->nphi <= 2 * l)
    throw std::domain_error("grid under-resolved: nphi must exceed 2l");

  const int ntheta = static_cast<int>(grid->mu.size());
  const int nphi = grid->nphi;
  SampledField f;
  f.grid = grid;
  f.manifold = Manifold::sphere;
  f.values.assign(static_cast<std::size_t>(ntheta) * nphi, cplx{});
  Dft1D dft(nphi);

  // Active |m| list keeps single-m families cheap.
  std::vector<int> active;
  for (int m = 0; m <= l; ++m)
    if (std::norm(coeffs[l + m]) > 0.0 || std::norm(coeffs[l - m]) > 0.0)
      active.push_back(m);

  parallel_chunks(ntheta, [&](std::size_t row0, std::size_t row1) {
    std::vector<cplx> freq(nphi);
    for (std::size_t it = row0; it < row1; ++it) {
      double x = grid->mu[it];
      std::fill(freq.begin(), freq.end(), cplx{});
      for (int m : active) {
        double p = normalized_plm(l, m, x);
        cplx cp = coeffs[l + m];
        if (std::norm(cp) > 0.0) freq[freq_bin(m, nphi)] += cp * p;
        if (m > 0) {
          cplx cn = coeffs[l - m];
          double sign = (m & 1) ? -1.0 : 1.0;
          if (std::norm(cn) > 0.0) freq[freq_bin(-m, nphi)] += cn * sign * p;
        }
      }
      dft.backward(freq.data());
      std::copy(freq.begin(), freq.end(), f.values.begin() + it * nphi);
    }
  });

  return l2_normalize(f);
}

std::vector<cplx> eval_sphere_harmonic_at(const SphereHarmonicSpec& spec,
                                          std::span<const Vec3> points) {
  const int l = spec.l;
  const auto coeffs = family_coefficients(spec);
  std::vector<int> active;
  for (int m = 0; m <= l; ++m)
    if (std::norm(coeffs[l + m]) > 0.0 || std::norm(coeffs[l - m]) > 0.0)
      active.push_back(m);

  std::vector<cplx> out(points.size());
  parallel_chunks(points.size(), [&](std::size_t i0, std::size_t i1) {
    for (std::size_t i = i0; i < i1; ++i) {
      const Vec3& p = points[i];
      double x = std::clamp(p.z, -1.0, 1.0);
      double phi = std::atan2(p.y, p.x);
      cplx acc{};
      for (int m : active) {
        double pv = normalized_plm(l, m, x);
        cplx e = std::polar(1.0, m * phi);
        acc += coeffs[l + m] * pv * e;
        if (m > 0) {
          double sign = (m & 1) ? -1.0 : 1.0;
          acc += coeffs[l - m] * sign * pv * std::conj(e);
        }
      }
      out[i] = acc;
    }
  });
  return out;
}

namespace {

void validate_torus(const TorusEigenfunction& e) {
  if (e.coefficients.empty())
    throw std::domain_error("torus eigenfunction has no coefficients");
  if (e.n < 1) throw std::domain_error("n must be positive");
  for (const auto& [pt, a] : e.coefficients) {
    if (pt.x * pt.x + pt.y * pt.y != e.n)
      throw std::domain_error("coefficient index off the lattice circle");
  }
}

}  // namespace

SampledField eval_torus_eigenfunction(const TorusEigenfunction& e,
                                      std::shared_ptr<const QuadratureGrid> grid) {
  validate_torus(e);
  if (!grid || grid->manifold != Manifold::torus)
    throw std::domain_error("torus grid required");
  const int n = grid->n;
  if (n < 4.0 * std::sqrt(static_cast<double>(e.n)))
    throw std::domain_error("torus grid needs >= 4*sqrt(n) nodes per axis");

  SampledField f;
  f.grid = grid;
  f.manifold = Manifold::torus;
  f.values.assign(static_cast<std::size_t>(n) * n, cplx{});
  const double scale = 1.0 / kTwoPi;
  for (const auto& [pt, a] : e.coefficients) {
    int b0 = freq_bin(static_cast<int>(pt.x), n);
    int b1 = freq_bin(static_cast<int>(pt.y), n);
    f.values[static_cast<std::size_t>(b0) * n + b1] += a * scale;
  }
  Dft2D dft(n, n);
  dft.backward(f.values.data());
  return f;
}

std::vector<cplx> eval_torus_eigenfunction_at(
    const TorusEigenfunction& e, std::span<const std::array<double, 2>> points) {
  validate_torus(e);
  std::vector<cplx> out(points.size());
  const double scale = 1.0 / kTwoPi;
  for (std::size_t i = 0; i < points.size(); ++i) {
    cplx acc{};
    for (const auto& [pt, a] : e.coefficients)
      acc += a * std::polar(1.0, pt.x * points[i][0] + pt.y * points[i][1]);
    out[i] = acc * scale;
  }
  return out;
}

double l2_norm(const SampledField& f) {
  const QuadratureGrid& g = *f.grid;
  double s = parallel_sum(f.values.size(), [&](std::size_t i0, std::size_t i1) {
    std::vector<double> terms;
    terms.reserve(i1 - i0);
    for (std::size_t i = i0; i < i1; ++i)
      terms.push_back(g.weight(i) * std::norm(f.values[i]));
    return pairwise_sum(terms);
  });
  return std::sqrt(s);
}

SampledField l2_normalize(const SampledField& f) {
  double nrm = l2_norm(f);
  if (!(nrm > 0.0)) throw std::domain_error("cannot normalize a zero field");
  SampledField out = f;
  double inv = 1.0 / nrm;
  for (cplx& v : out.values) v *= inv;
  return out;
}

}  // namespace eigentube
