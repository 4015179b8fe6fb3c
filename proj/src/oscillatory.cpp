#include "eigentube/oscillatory.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "eigentube/mollifiers.hpp"

namespace eigentube {

namespace {

// Radial profile R(d) and its first derivative for the active metric.
inline double radial(const ModelPhase& p, double d) {
  if (p.metric == MetricKind::euclidean) return d;
  return d * (1.0 + p.eta * std::sin(2.0 * d));
}

inline double radial_prime(const ModelPhase& p, double d) {
  if (p.metric == MetricKind::euclidean) return 1.0;
  return 1.0 + p.eta * (std::sin(2.0 * d) + 2.0 * d * std::cos(2.0 * d));
}

inline double radial_second(const ModelPhase& p, double d) {
  if (p.metric == MetricKind::euclidean) return 0.0;
  return p.eta * (4.0 * std::cos(2.0 * d) - 4.0 * d * std::sin(2.0 * d));
}

// d^2 psi / (d y1 d x2) = (y1-x1)(x2-y2) (R'' d - R') / d^3.
double mixed_y1x2(const ModelPhase& p, double x1, double x2, double yy1,
                  double yy2) {
  double d = std::hypot(x1 - yy1, x2 - yy2);
  double rp = radial_prime(p, d), rpp = radial_second(p, d);
  return (yy1 - x1) * (x2 - yy2) * (rpp * d - rp) / (d * d * d);
}

// The transversal-separation proxy A = d/dx2 d/dt Psi (the angle condition
// of the tile-pair support).
double angle_proxy(const ModelPhase& p, double x1, double x2, double s,
                   double t) {
  return mixed_y1x2(p, x1, x2, s + t, p.y2) - mixed_y1x2(p, x1, x2, s - t, p.y2p);
}

constexpr double kX2Lo = -0.41, kX2Hi = 0.35;

// Normalized transversality proxy: dividing A by the vertical geometric
// factor 1/(y2-x2)^2 makes the window select |2t| comparable to theta
// uniformly across the x2 slab.
double angle_proxy_normalized(const ModelPhase& p, double x1, double x2,
                              double s, double t) {
  double v = p.y2 - x2;
  return angle_proxy(p, x1, x2, s, t) * v * v;
}

}  // namespace

double ModelPhase::psi(double x1, double x2, double yy1, double yy2) const {
  return radial(*this, std::hypot(x1 - yy1, x2 - yy2));
}

double ModelPhase::value(double x1, double x2, double s, double t) const {
  return psi(x1, x2, s + t, y2) + psi(x1, x2, s - t, y2p);
}

double CutoffProfile::support_constant() const {
  // |x1| < theta, |s| < theta, |t| < 2.2 theta
  return 4.2;
}

double CutoffProfile::value(const ModelPhase& phase, double x1, double x2,
                            double s, double t) const {
  if (amplitude == 0.0) return 0.0;
  double b = round_bump(x1 / theta) * round_bump(s / theta) *
             round_bump(t / (2.2 * theta)) *
             plateau(x2, kX2Lo, kX2Lo + 0.08, kX2Hi - 0.08, kX2Hi);
  if (b == 0.0) return 0.0;
  // Transversal-separation window at the top of the admissible band: the
  // stronger lever brings the lambda^{-1} theta^{-1/2} cancellation into
  // the desk-scale lambda range.
  double a = std::abs(angle_proxy_normalized(phase, x1, x2, s, t)) / theta;
  return amplitude * b * plateau(a, 1.2, 1.8, 3.6, 4.4);
}

OscillatorMatrix assemble(const ModelPhase& phase, const CutoffProfile& cutoff,
                          double lambda, double theta, double resolution) {
  if (!(theta > 0.0 && theta <= 0.5))
    throw std::domain_error("theta must lie in (0, 1/2]");
  if (!(lambda >= 4.0)) throw std::domain_error("lambda too small");
  if (!(resolution >= 1.0)) throw std::domain_error("resolution factor >= 1");

  const double eta = phase.metric == MetricKind::euclidean ? 0.0 : phase.eta;
  // Reduced-phase gradient bounds per direction. The center-line vertical
  // phase Psi(0,x2;0,0) is factored out as a unitary row modulation (it
  // absorbs the metric perturbation as well), leaving only the O(theta^2)
  // horizontal corrections in the x2 direction.
  const double g_slow = std::min(2.2, 8.5 * theta + 3.0 * eta + 0.05);
  const double g_x2 = 0.45 + 2.0 * eta;

  auto build_axis = [&](double lo, double hi, double g) {
    double spacing = kTwoPi / (lambda * g * resolution);
    int n = std::max(33, static_cast<int>(std::ceil((hi - lo) / spacing)));
    std::vector<double> nodes(n);
    for (int i = 0; i < n; ++i) nodes[i] = lo + (hi - lo) * (i + 0.5) / n;
    return nodes;
  };

  OscillatorMatrix m;
  m.lambda = lambda;
  m.theta = theta;
  m.x1 = build_axis(-theta, theta, g_slow);
  m.x2 = build_axis(kX2Lo, kX2Hi, g_x2);
  m.s = build_axis(-theta, theta, g_slow);
  m.t = build_axis(-2.2 * theta, 2.2 * theta, g_slow);
  m.n_x1 = static_cast<int>(m.x1.size());
  m.n_x2 = static_cast<int>(m.x2.size());
  m.n_s = static_cast<int>(m.s.size());
  m.n_t = static_cast<int>(m.t.size());
  m.nyquist_margin = resolution / 2.0;

  if (m.rows() * m.cols() > 200'000'000ull)
    throw std::runtime_error("memory guard: more than 2e8 matrix entries");

  m.wx = (2.0 * theta / m.n_x1) * ((kX2Hi - kX2Lo) / m.n_x2);
  m.wst = (2.0 * theta / m.n_s) * (4.4 * theta / m.n_t);
  const double sw = std::sqrt(m.wx) * std::sqrt(m.wst);

  m.entries.assign(m.rows() * m.cols(), cplx{});
  const std::size_t cols = m.cols();
  parallel_chunks(m.rows(), [&](std::size_t r0, std::size_t r1) {
    for (std::size_t r = r0; r < r1; ++r) {
      double x1 = m.x1[r / m.n_x2];
      double x2 = m.x2[r % m.n_x2];
      double center_phase = phase.value(0.0, x2, 0.0, 0.0);
      cplx* row = &m.entries[r * cols];
      for (std::size_t c = 0; c < cols; ++c) {
        double s = m.s[c / m.n_t];
        double t = m.t[c % m.n_t];
        double b = cutoff.value(phase, x1, x2, s, t);
        if (b == 0.0) continue;
        double ph = lambda * (phase.value(x1, x2, s, t) - center_phase);
        row[c] = std::polar(sw * b, ph);
      }
    }
  }, 64);
  return m;
}

namespace {

void matvec(const OscillatorMatrix& m, const std::vector<cplx>& v,
            std::vector<cplx>& out) {
  const std::size_t cols = m.cols();
  out.assign(m.rows(), cplx{});
  parallel_chunks(m.rows(), [&](std::size_t r0, std::size_t r1) {
    for (std::size_t r = r0; r < r1; ++r) {
      const cplx* row = &m.entries[r * cols];
      cplx acc{};
      for (std::size_t c = 0; c < cols; ++c) acc += row[c] * v[c];
      out[r] = acc;
    }
  }, 256);
}

void matvec_adjoint(const OscillatorMatrix& m, const std::vector<cplx>& y,
                    std::vector<cplx>& out) {
  const std::size_t cols = m.cols();
  out.assign(cols, cplx{});
  parallel_chunks(cols, [&](std::size_t c0, std::size_t c1) {
    for (std::size_t r = 0; r < m.rows(); ++r) {
      const cplx* row = &m.entries[r * cols];
      cplx w = y[r];
      for (std::size_t c = c0; c < c1; ++c) out[c] += std::conj(row[c]) * w;
    }
  }, 512);
}

double vec_norm(const std::vector<cplx>& v) {
  double s = 0.0;
  for (const cplx& z : v) s += std::norm(z);
  return std::sqrt(s);
}

}  // namespace

OpNormResult op_norm(const OscillatorMatrix& m, std::uint64_t seed, int restarts,
                     double tol) {
  OpNormResult best;
  if (m.entries.empty() || m.rows() == 0 || m.cols() == 0) return best;
  std::vector<cplx> v(m.cols()), av, back;
  for (int r = 0; r < restarts; ++r) {
    std::mt19937_64 rng(seed + 0x9e3779b97f4a7c15ull * (r + 1));
    std::normal_distribution<double> gauss;
    for (cplx& z : v) z = cplx{gauss(rng), gauss(rng)};
    double nv = vec_norm(v);
    if (nv == 0.0) continue;
    for (cplx& z : v) z /= nv;

    double sigma = 0.0, prev = -1.0;
    bool converged = false;
    int it = 0;
    for (; it < 300; ++it) {
      matvec(m, v, av);
      sigma = vec_norm(av);
      if (sigma == 0.0) { converged = true; break; }
      if (prev >= 0.0 && std::abs(sigma - prev) <= tol * sigma) {
        converged = true;
        break;
      }
      prev = sigma;
      matvec_adjoint(m, av, back);
      double nb = vec_norm(back);
      if (nb == 0.0) break;
      for (std::size_t k = 0; k < back.size(); ++k) v[k] = back[k] / nb;
    }
    if (sigma > best.value) {
      best.value = sigma;
      best.converged = converged;
      best.iterations = it + 1;
    }
  }
  return best;
}

SlopeFit fit_powerlaw(std::span<const double> x, std::span<const double> v) {
  if (x.size() != v.size() || x.size() < 3)
    throw std::domain_error("power-law fit needs >= 3 points");
  const int n = static_cast<int>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    if (!(x[i] > 0.0) || !(v[i] > 0.0))
      throw std::domain_error("power-law fit needs positive data");
    double lx = std::log(x[i]), ly = std::log(v[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  SlopeFit fit;
  fit.points = n;
  double det = n * sxx - sx * sx;
  fit.slope = (n * sxy - sx * sy) / det;
  fit.intercept = (sy * sxx - sx * sxy) / det;
  for (int i = 0; i < n; ++i) {
    double res = std::log(v[i]) - (fit.slope * std::log(x[i]) + fit.intercept);
    fit.max_residual = std::max(fit.max_residual, std::abs(res));
  }
  return fit;
}

OscScalingReport scaling_fit(const ModelPhase& phase, double resolution,
                             const std::vector<double>& lambdas,
                             double theta_fixed,
                             const std::vector<double>& thetas,
                             double lambda_fixed) {
  if (lambdas.size() < 4 || thetas.size() < 4)
    throw std::domain_error("need >= 4 values per swept parameter");
  OscScalingReport rep;
  rep.theta_fixed = theta_fixed;
  rep.lambda_fixed = lambda_fixed;

  std::vector<double> xs, vs;
  for (double lam : lambdas) {
    CutoffProfile cutoff{theta_fixed};
    auto m = assemble(phase, cutoff, lam, theta_fixed, resolution);
    auto nr = op_norm(m, 17);
    rep.lambda_sweep.push_back({lam, theta_fixed, nr.value, nr.converged});
    xs.push_back(lam);
    vs.push_back(nr.value);
  }
  rep.lambda_fit = fit_powerlaw(xs, vs);

  xs.clear();
  vs.clear();
  for (double th : thetas) {
    CutoffProfile cutoff{th};
    auto m = assemble(phase, cutoff, lambda_fixed, th, resolution);
    auto nr = op_norm(m, 17);
    rep.theta_sweep.push_back({lambda_fixed, th, nr.value, nr.converged});
    xs.push_back(th);
    vs.push_back(nr.value);
  }
  rep.theta_fit = fit_powerlaw(xs, vs);
  return rep;
}

EnvelopeReport kernel_envelope_check(const ModelPhase& phase,
                                     const CutoffProfile& cutoff, double lambda,
                                     double theta, int sample_count,
                                     std::uint64_t seed, double resolution) {
  if (!(lambda * theta * theta >= 1.0))
    throw std::domain_error("requires lambda * theta^2 >= 1");
  if (!(resolution >= 1.0)) throw std::domain_error("resolution factor >= 1");

  const double eta = phase.metric == MetricKind::euclidean ? 0.0 : phase.eta;
  const double g_slow = std::min(2.2, 8.5 * theta + 3.0 * eta + 0.05);
  const double g_x2 = 0.45 + 2.0 * eta;
  auto axis = [&](double lo, double hi, double g) {
    double spacing = kTwoPi / (lambda * g * resolution);
    int n = std::max(33, static_cast<int>(std::ceil((hi - lo) / spacing)));
    std::vector<double> nodes(n);
    for (int i = 0; i < n; ++i) nodes[i] = lo + (hi - lo) * (i + 0.5) / n;
    return nodes;
  };
  auto x1g = axis(-theta, theta, g_slow);
  auto x2g = axis(kX2Lo, kX2Hi, g_x2);
  const double wx = (2.0 * theta / x1g.size()) * ((kX2Hi - kX2Lo) / x2g.size());

  // K(s,t;s',t') = int e^{i lambda (Psi - Psi')} b bbar' dx; the common
  // vertical modulation cancels in the difference.
  auto kernel = [&](double s, double t, double sp, double tp) {
    cplx acc{};
    for (double x1 : x1g)
      for (double x2 : x2g) {
        double b1 = cutoff.value(phase, x1, x2, s, t);
        double b2 = cutoff.value(phase, x1, x2, sp, tp);
        if (b1 == 0.0 || b2 == 0.0) continue;
        double ph = lambda * (phase.value(x1, x2, s, t) - phase.value(x1, x2, sp, tp));
        acc += std::polar(b1 * b2, ph);
      }
    return acc * wx;
  };

  EnvelopeReport rep;
  double bsq = 0.0;
  for (double x1 : x1g)
    for (double x2 : x2g) {
      double b = cutoff.value(phase, x1, x2, 0.3 * theta, 1.3 * theta);
      bsq += b * b;
    }
  rep.coincident_bound = bsq * wx;
  rep.coincident_value = std::abs(kernel(0.3 * theta, 1.3 * theta, 0.3 * theta, 1.3 * theta));

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> us(-theta, theta);
  std::uniform_real_distribution<double> ut(-2.2 * theta, 2.2 * theta);
  auto envelope = [&](double dist, int N) {
    return std::pow(theta, 1.0 - N) * std::pow(1.0 + lambda * dist, -N) +
           theta * std::pow(1.0 + lambda * theta * dist, -N);
  };
  for (int k = 0; k < sample_count; ++k) {
    double s = us(rng), sp = us(rng);
    double t = ut(rng), tp = ut(rng);
    double dist = std::hypot(s - sp, t - tp);
    double mag = std::abs(kernel(s, t, sp, tp));
    if (mag == 0.0) continue;
    rep.c_n0 = std::max(rep.c_n0, mag / envelope(dist, 0));
    rep.c_n3 = std::max(rep.c_n3, mag / envelope(dist, 3));
    rep.samples += 1;
  }
  return rep;
}

}  // namespace eigentube
