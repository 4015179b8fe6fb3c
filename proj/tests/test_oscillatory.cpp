#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "doctest.h"
#include "eigentube/mollifiers.hpp"
#include "eigentube/oscillatory.hpp"

using namespace eigentube;

namespace {

OscillatorMatrix matrix_from(const std::vector<std::vector<cplx>>& rows) {
  OscillatorMatrix m;
  m.n_x1 = 1;
  m.n_x2 = static_cast<int>(rows.size());
  m.n_s = 1;
  m.n_t = static_cast<int>(rows.front().size());
  for (const auto& r : rows)
    m.entries.insert(m.entries.end(), r.begin(), r.end());
  return m;
}

double svd_top(const OscillatorMatrix& m) {
  Eigen::MatrixXcd a(m.rows(), m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c)
      a(r, c) = m.entries[r * m.cols() + c];
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(a);
  return svd.singularValues()(0);
}

// Nondegenerate control phase Psi = x.y with product bump cutoffs;
// the classical nondegenerate lemma gives |T| ~ c lambda^{-1} here.
OscillatorMatrix control_matrix(double lambda, double r = 4.0) {
  int n = std::max(17, static_cast<int>(std::ceil(2.0 * lambda * r / kTwoPi)));
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = -1.0 + 2.0 * (i + 0.5) / n;
  double w = 2.0 / n;
  OscillatorMatrix m;
  m.lambda = lambda;
  m.n_x1 = m.n_x2 = m.n_s = m.n_t = n;
  m.entries.assign(static_cast<std::size_t>(n) * n * n * n, cplx{});
  for (int i1 = 0; i1 < n; ++i1)
    for (int i2 = 0; i2 < n; ++i2) {
      double bx = round_bump(g[i1]) * round_bump(g[i2]);
      std::size_t row = static_cast<std::size_t>(i1) * n + i2;
      for (int j1 = 0; j1 < n; ++j1)
        for (int j2 = 0; j2 < n; ++j2) {
          double by = round_bump(g[j1]) * round_bump(g[j2]);
          double ph = lambda * (g[i1] * g[j1] + g[i2] * g[j2]);
          m.entries[row * n * n + j1 * n + j2] = std::polar(w * w * bx * by, ph);
        }
    }
  return m;
}

}  // namespace

TEST_CASE("op_norm: diagonal and rank-one matrices") {
  std::vector<std::vector<cplx>> diag = {
      {cplx{0.3, 0}, 0, 0}, {0, cplx{-1.7, 0}, 0}, {0, 0, cplx{0, 0.9}}};
  auto m = matrix_from(diag);
  CHECK(op_norm(m, 1, 3, 1e-12).value == doctest::Approx(1.7).epsilon(1e-9));

  std::vector<cplx> u = {cplx{1, 1}, cplx{0, 2}, cplx{3, 0}};
  std::vector<cplx> v = {cplx{2, 0}, cplx{0, -1}};
  std::vector<std::vector<cplx>> rank1(u.size(), std::vector<cplx>(v.size()));
  double nu = 0, nv = 0;
  for (auto& z : u) nu += std::norm(z);
  for (auto& z : v) nv += std::norm(z);
  for (std::size_t i = 0; i < u.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j) rank1[i][j] = u[i] * std::conj(v[j]);
  auto m1 = matrix_from(rank1);
  CHECK(op_norm(m1).value ==
        doctest::Approx(std::sqrt(nu) * std::sqrt(nv)).epsilon(1e-9));
}

TEST_CASE("power iteration agrees with full SVD") {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> gauss;
  std::vector<std::vector<cplx>> rows(40, std::vector<cplx>(25));
  for (auto& r : rows)
    for (auto& z : r) z = cplx{gauss(rng), gauss(rng)};
  auto m = matrix_from(rows);
  double pi_val = op_norm(m, 1, 3, 1e-12).value;
  CHECK(std::abs(pi_val - svd_top(m)) <= 1e-8 * svd_top(m));

  // and on a small sub-block of a genuinely assembled instance
  ModelPhase phase;
  CutoffProfile cutoff{0.3};
  auto t = assemble(phase, cutoff, 8.0, 0.3, 1.0);
  OscillatorMatrix sub;
  sub.n_x1 = 1;
  sub.n_s = 1;
  sub.n_x2 = 400;
  sub.n_t = 380;
  for (int r = 0; r < sub.n_x2; ++r) {
    std::size_t rr = (r * t.rows()) / sub.n_x2;
    for (int c = 0; c < sub.n_t; ++c) {
      std::size_t cc = (c * t.cols()) / sub.n_t;
      sub.entries.push_back(t.entries[rr * t.cols() + cc]);
    }
  }
  double pv = op_norm(sub, 1, 3, 1e-12).value;
  CHECK(std::abs(pv - svd_top(sub)) <= 1e-8 * svd_top(sub));
}

TEST_CASE("control phase: norm halves when lambda doubles") {
  auto m1 = control_matrix(16.0);
  auto m2 = control_matrix(32.0);
  double v1 = op_norm(m1).value;
  double v2 = op_norm(m2).value;
  CHECK(v2 / v1 == doctest::Approx(0.5).epsilon(0.10));
}

TEST_CASE("assemble: guards, margins, amplitude scaling") {
  ModelPhase phase;
  CHECK_THROWS_AS(assemble(phase, CutoffProfile{0.6}, 50.0, 0.6), std::domain_error);

  CutoffProfile cutoff{0.2};
  auto m = assemble(phase, cutoff, 50.0, 0.2);
  CHECK(m.nyquist_margin >= 2.0);
  CHECK(m.rows() > 0);
  bool any = false;
  for (const cplx& z : m.entries) {
    CHECK(std::isfinite(z.real()));
    if (std::norm(z) > 0) any = true;
  }
  CHECK(any);

  CutoffProfile dead{0.2, 0.0};
  auto zero = assemble(phase, dead, 50.0, 0.2);
  for (const cplx& z : zero.entries) CHECK(z == cplx{});

  // norm is linear under scalar multiplication of b
  CutoffProfile doubled{0.2, 2.0};
  auto m2 = assemble(phase, doubled, 50.0, 0.2);
  CHECK(op_norm(m2).value == doctest::Approx(2.0 * op_norm(m).value).epsilon(1e-6));
}

TEST_CASE("phase structure at the degenerate point (finite differences)") {
  ModelPhase phase;
  const double h = 1e-5;
  auto psi = [&](double x1, double x2, double s, double t) {
    return phase.value(x1, x2, s, t);
  };
  for (double x2 : {-0.3, 0.0, 0.2}) {
    // mixed x2-s, x2-t derivatives and d/dx1 all vanish at (0,x2;0,0)
    double dx2s = (psi(0, x2 + h, h, 0) - psi(0, x2 + h, -h, 0) -
                   psi(0, x2 - h, h, 0) + psi(0, x2 - h, -h, 0)) /
                  (4 * h * h);
    double dx2t = (psi(0, x2 + h, 0, h) - psi(0, x2 + h, 0, -h) -
                   psi(0, x2 - h, 0, h) + psi(0, x2 - h, 0, -h)) /
                  (4 * h * h);
    double dx1 = (psi(h, x2, 0, 0) - psi(-h, x2, 0, 0)) / (2 * h);
    CHECK(std::abs(dx2s) <= 1e-8);
    CHECK(std::abs(dx2t) <= 1e-8);
    CHECK(std::abs(dx1) <= 1e-8);
    // but the x1-s mixed derivative is bounded away from zero
    double dx1s = (psi(h, x2, h, 0) - psi(h, x2, -h, 0) - psi(-h, x2, h, 0) +
                   psi(-h, x2, -h, 0)) /
                  (4 * h * h);
    CHECK(std::abs(dx1s) >= 0.1);
  }
}

TEST_CASE("transversality and near-degeneracy proxies on the cutoff support") {
  for (auto metric : {MetricKind::euclidean, MetricKind::radial_perturbation}) {
    ModelPhase phase;
    phase.metric = metric;
    phase.eta = metric == MetricKind::euclidean ? 0.0 : 0.05;
    const double theta = 0.2;
    CutoffProfile cutoff{theta};
    const double h = 1e-5;
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> ux1(-theta, theta);
    std::uniform_real_distribution<double> ux2(-0.41, 0.35);
    std::uniform_real_distribution<double> ut(-2.2 * theta, 2.2 * theta);
    int on_support = 0;
    for (int k = 0; k < 20000 && on_support < 200; ++k) {
      double x1 = ux1(rng), x2 = ux2(rng), s = ux1(rng), t = ut(rng);
      if (cutoff.value(phase, x1, x2, s, t) <= 0.0) continue;
      ++on_support;
      // |d/dx2 d/dt Psi| >= c theta on supp b; the window floor gives
      // c = 1.2/max(y2-x2)^2 = 0.36
      double a = (phase.value(x1, x2 + h, s, t + h) - phase.value(x1, x2 + h, s, t - h) -
                  phase.value(x1, x2 - h, s, t + h) + phase.value(x1, x2 - h, s, t - h)) /
                 (4 * h * h);
      CHECK(std::abs(a) >= 0.36 * theta * (1.0 - 1e-3));
      // near-degeneracy in x1-t at t = 0: bounded by the y2 separation
      double b = (phase.value(x1 + h, x2, s, h) - phase.value(x1 + h, x2, s, -h) -
                  phase.value(x1 - h, x2, s, h) + phase.value(x1 - h, x2, s, -h)) /
                 (4 * h * h);
      CHECK(std::abs(b) <= 2.0 * std::abs(phase.y2p - phase.y2));
    }
    CHECK(on_support >= 200);
  }
}

TEST_CASE("cutoff: support box and derivative scales") {
  ModelPhase phase;
  const double theta = 0.1;
  CutoffProfile cutoff{theta};
  const double C = cutoff.support_constant();
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-2.0 * theta, 2.0 * theta);
  std::uniform_real_distribution<double> ux2(-0.6, 0.4);
  double max_d1 = 0.0, max_d2 = 0.0;
  for (int k = 0; k < 3000; ++k) {
    double x1 = u(rng), x2 = ux2(rng), s = u(rng), t = u(rng);
    double v = cutoff.value(phase, x1, x2, s, t);
    if (std::abs(x1) + std::abs(s) + std::abs(t) >= C * theta) CHECK(v == 0.0);
    const double h = 1e-5;
    double d1 = (cutoff.value(phase, x1 + h, x2, s, t) -
                 cutoff.value(phase, x1 - h, x2, s, t)) / (2 * h);
    double d2 = (cutoff.value(phase, x1, x2 + h, s, t) -
                 cutoff.value(phase, x1, x2 - h, s, t)) / (2 * h);
    max_d1 = std::max(max_d1, std::abs(d1));
    max_d2 = std::max(max_d2, std::abs(d2));
  }
  CHECK(max_d1 <= 20.0 / theta);  // O(theta^{-1})
  CHECK(max_d2 <= 40.0);          // O(1)
}

TEST_CASE("euclidean symmetric phase is even in t when y2 = y2'") {
  ModelPhase phase;
  phase.y2p = phase.y2;
  for (double t : {0.01, 0.2, 0.5})
    CHECK(phase.value(0.03, -0.2, 0.05, t) ==
          doctest::Approx(phase.value(0.03, -0.2, 0.05, -t)).epsilon(1e-15));
}

TEST_CASE("fit_powerlaw: exact scaling and degenerate inputs") {
  std::vector<double> x = {50, 100, 200, 400};
  std::vector<double> v;
  for (double xi : x) v.push_back(3.7 / xi);
  auto fit = fit_powerlaw(x, v);
  CHECK(std::abs(fit.slope + 1.0) < 1e-12);
  CHECK(fit.max_residual < 1e-12);

  std::vector<double> c = {2, 2, 2, 2};
  CHECK(std::abs(fit_powerlaw(x, c).slope) < 1e-12);
  CHECK_THROWS_AS(fit_powerlaw(std::vector<double>{1, 2}, std::vector<double>{1, 2}),
                  std::domain_error);
}

TEST_CASE("model norms decay in lambda with steepening local slope") {
  // Desk-scale lambda straddles the Hilbert-Schmidt / asymptote crossover,
  // so the decay rate grows toward -1 without reaching it; assert the
  // monotone facts that do hold here.
  ModelPhase phase;
  CutoffProfile cutoff{0.2};
  std::vector<double> lams = {50.0, 100.0, 200.0};
  std::vector<double> norms;
  for (double lam : lams)
    norms.push_back(op_norm(assemble(phase, cutoff, lam, 0.2, 2.4), 5).value);
  CHECK(norms[1] < norms[0]);
  CHECK(norms[2] < norms[1]);
  double s1 = std::log(norms[1] / norms[0]) / std::log(2.0);
  double s2 = std::log(norms[2] / norms[1]) / std::log(2.0);
  CHECK(s2 < s1);  // local slope steepens toward the asymptote
}

TEST_CASE("kernel envelope: coincident value, constants, lambda stability") {
  ModelPhase phase;
  CutoffProfile cutoff{0.2};
  auto rep = kernel_envelope_check(phase, cutoff, 64.0, 0.2, 400, 2);
  CHECK(rep.coincident_value <= rep.coincident_bound * (1 + 1e-12));
  CHECK(rep.c_n0 > 0.0);
  CHECK(rep.c_n3 > 0.0);
  CHECK(rep.samples >= 100);

  // The N=0 constant is scale-free and must be stable under doubling; the
  // N=3 constant keeps growing until the kernel reaches its asymptotic
  // regime (same crossover as the norm scaling), so it is only reported.
  auto rep2 = kernel_envelope_check(phase, cutoff, 128.0, 0.2, 400, 2);
  CHECK(rep2.c_n0 / rep.c_n0 <= 2.0);
  CHECK(rep.c_n0 / rep2.c_n0 <= 2.0);
  CHECK(rep2.c_n3 > 0.0);

  CHECK_THROWS_AS(kernel_envelope_check(phase, cutoff, 10.0, 0.2, 10, 1),
                  std::domain_error);
}
