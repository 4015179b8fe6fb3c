#include "eigentube/microlocal.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "eigentube/mollifiers.hpp"

namespace eigentube {

cplx SpectralCutoff::rho(double s) const {
  double u = 0.25 * s;
  double sc = std::abs(u) < 1e-8 ? 1.0 - u * u / 6.0 : std::sin(u) / u;
  return std::polar(sc * sc, 1.5 * s);
}

double partition_bump(double z1, double z2) {
  return unit_bump(z1) * unit_bump(z2);
}

std::array<double, 2> phi_map(const std::array<double, 2>& x,
                              const std::array<double, 2>& xi) {
  double nrm = std::hypot(xi[0], xi[1]);
  if (nrm == 0.0) throw std::domain_error("zero covector");
  if (std::abs(xi[1]) < 0.5 * nrm)
    throw std::domain_error("near-tangent direction: |xi_2| < |xi|/2");
  return {x[0] - x[1] * xi[0] / xi[1], xi[0] / nrm};
}

double TorusPhaseSpace::alpha_cut(double x1, double x2) {
  double r = std::hypot(x1 - kPatchX1, x2 - kPatchX2);
  return 1.0 - smooth_step((r - 1.75 * kDelta) / (0.5 * kDelta));
}

double TorusPhaseSpace::upsilon(double s) {
  return plateau(s, 0.5 * kUpsilonC, kUpsilonC, 1.0 / kUpsilonC,
                 2.0 / kUpsilonC);
}

TorusPhaseSpace::TorusPhaseSpace(std::shared_ptr<const QuadratureGrid> grid,
                                 double lambda, double eps0)
    : grid_(std::move(grid)), lambda_(lambda), eps0_(eps0) {
  if (!grid_ || grid_->manifold != Manifold::torus)
    throw std::domain_error("torus grid required");
  if (!(lambda_ >= 1.0)) throw std::domain_error("lambda >= 1 required");
  if (!(eps0_ > 0.0 && eps0_ <= 0.5))
    throw std::domain_error("need 0 < eps0 <= 1/2");
  n_ = grid_->n;
  if (n_ / 2 < lambda_)
    throw std::domain_error("grid under-resolved for this lambda");
  theta0_ = std::pow(lambda_, -0.5 + eps0_);
  double th = theta0_;
  while (th < 1.0 - 1e-12) {
    levels_.push_back(th);
    th *= 2.0;
  }
  levels_.push_back(1.0);

  dft_ = std::make_unique<Dft2D>(n_, n_);
  node_weight_ = (kTwoPi / n_) * (kTwoPi / n_);

  // Admissible chart frequencies: in the Upsilon pass band and in the
  // downward transversal cone xi_2 <= -|xi|/2.
  for (int k0 = 0; k0 < n_; ++k0) {
    for (int k1 = 0; k1 < n_; ++k1) {
      double l1 = signed_freq(k0, n_);
      double l2 = signed_freq(k1, n_);
      double nrm = std::hypot(l1, l2);
      if (nrm == 0.0) continue;
      double ups = upsilon(nrm / lambda_);
      if (ups <= 0.0) continue;
      if (!(l2 < 0.0 && std::abs(l2) >= 0.5 * nrm)) continue;
      freqs_.push_back({k0 * n_ + k1, l1, l2, nrm, l1 / nrm, l1 / l2, ups});
    }
  }

  for (std::size_t i = 0; i < grid_->size(); ++i) {
    auto x = grid_->torus_node(i);
    double x1 = x[0] > kPi ? x[0] - kTwoPi : x[0];
    double a = alpha_cut(x1, x[1]);
    if (a > 0.0) patch_.push_back({i, x1, x[1], a, node_weight_});
  }
}

double TorusPhaseSpace::symbol(const PhaseSpaceTile& t, double x1, double x2,
                               double l1, double l2) const {
  double nrm = std::hypot(l1, l2);
  if (nrm == 0.0) return 0.0;
  if (!(l2 < 0.0 && std::abs(l2) >= 0.5 * nrm)) return 0.0;
  double s = x1 - x2 * l1 / l2;
  double omega = l1 / nrm;
  return alpha_cut(x1, x2) * unit_bump(s / t.theta + t.nu1) *
         unit_bump(omega / t.theta + t.nu2) * upsilon(nrm / lambda_);
}

std::vector<cplx> TorusPhaseSpace::forward_hat(const std::vector<cplx>& values) const {
  std::vector<cplx> hat = values;
  dft_->forward(hat.data());
  double inv = 1.0 / (static_cast<double>(n_) * n_);
  for (cplx& z : hat) z *= inv;
  return hat;
}

void TorusPhaseSpace::synth_inplace(std::vector<cplx>& hat) const {
  dft_->backward(hat.data());
}

void TorusPhaseSpace::chi_multiply(std::vector<cplx>& hat) const {
  SpectralCutoff cutoff{lambda_};
  for (int k0 = 0; k0 < n_; ++k0) {
    for (int k1 = 0; k1 < n_; ++k1) {
      double l1 = signed_freq(k0, n_);
      double l2 = signed_freq(k1, n_);
      hat[static_cast<std::size_t>(k0) * n_ + k1] *=
          cutoff.rho(lambda_ - std::hypot(l1, l2));
    }
  }
}

double TorusPhaseSpace::weighted_l2(const std::vector<cplx>& values) const {
  double s = 0.0;
  for (const cplx& v : values) s += std::norm(v);
  return std::sqrt(node_weight_ * s);
}

SampledField TorusPhaseSpace::apply_chi(const SampledField& f) const {
  if (f.grid->n != n_) throw std::domain_error("grid mismatch");
  std::vector<cplx> hat = forward_hat(f.values);
  chi_multiply(hat);
  synth_inplace(hat);
  SampledField out;
  out.grid = grid_;
  out.manifold = Manifold::torus;
  out.values = std::move(hat);
  return out;
}

std::vector<cplx> TorusPhaseSpace::tile_apply_patch(
    const PhaseSpaceTile& t, const std::vector<cplx>& hat) const {
  double peak2 = 0.0;
  for (const cplx& z : hat) peak2 = std::max(peak2, std::norm(z));
  const double thr2 = peak2 * 1e-24;  // amplitude threshold 1e-12 of peak

  std::vector<cplx> out(patch_.size(), cplx{});
  const double inv_theta = 1.0 / t.theta;
  for (const Freq& fr : freqs_) {
    const cplx a = hat[fr.bin];
    if (std::norm(a) <= thr2) continue;
    double b2 = unit_bump(fr.omega * inv_theta + t.nu2);
    if (b2 == 0.0) continue;
    const cplx z = a * (fr.ups * b2);
    for (std::size_t k = 0; k < patch_.size(); ++k) {
      const PatchNode& nd = patch_[k];
      double b1 = unit_bump((nd.x1 - nd.x2 * fr.slope) * inv_theta + t.nu1);
      if (b1 == 0.0) continue;
      out[k] += z * (nd.alpha * b1) *
                std::polar(1.0, nd.x1 * fr.l1 + nd.x2 * fr.l2);
    }
  }
  return out;
}

std::vector<cplx> TorusPhaseSpace::tile_adjoint_hat(
    const PhaseSpaceTile& t, const std::vector<cplx>& g_patch) const {
  std::vector<cplx> hat(static_cast<std::size_t>(n_) * n_, cplx{});
  const double inv_theta = 1.0 / t.theta;
  const double inv_n2 = 1.0 / (static_cast<double>(n_) * n_);
  for (const Freq& fr : freqs_) {
    double b2 = unit_bump(fr.omega * inv_theta + t.nu2);
    if (b2 == 0.0) continue;
    cplx acc{};
    for (std::size_t k = 0; k < patch_.size(); ++k) {
      const PatchNode& nd = patch_[k];
      double b1 = unit_bump((nd.x1 - nd.x2 * fr.slope) * inv_theta + t.nu1);
      if (b1 == 0.0) continue;
      acc += (nd.alpha * b1) * g_patch[k] *
             std::polar(1.0, -(nd.x1 * fr.l1 + nd.x2 * fr.l2));
    }
    hat[fr.bin] = acc * (fr.ups * b2) * inv_n2;
  }
  return hat;
}

std::vector<cplx> TorusPhaseSpace::chi_tile_field(
    const PhaseSpaceTile& t, const std::vector<cplx>& hat) const {
  std::vector<cplx> patch_out = tile_apply_patch(t, hat);
  std::vector<cplx> full(static_cast<std::size_t>(n_) * n_, cplx{});
  for (std::size_t k = 0; k < patch_.size(); ++k)
    full[patch_[k].idx] = patch_out[k];
  std::vector<cplx> h = forward_hat(full);
  chi_multiply(h);
  synth_inplace(h);
  return h;
}

SampledField TorusPhaseSpace::apply_tile(const PhaseSpaceTile& t,
                                         const SampledField& f) const {
  if (f.grid->n != n_) throw std::domain_error("grid mismatch");
  std::vector<cplx> hat = forward_hat(f.values);
  std::vector<cplx> patch_out = tile_apply_patch(t, hat);
  SampledField out;
  out.grid = grid_;
  out.manifold = Manifold::torus;
  out.values.assign(static_cast<std::size_t>(n_) * n_, cplx{});
  for (std::size_t k = 0; k < patch_.size(); ++k)
    out.values[patch_[k].idx] = patch_out[k];
  return out;
}

SampledField TorusPhaseSpace::apply_chi_tile(const PhaseSpaceTile& t,
                                             const SampledField& f) const {
  if (f.grid->n != n_) throw std::domain_error("grid mismatch");
  std::vector<cplx> hat = forward_hat(f.values);
  SampledField out;
  out.grid = grid_;
  out.manifold = Manifold::torus;
  out.values = chi_tile_field(t, hat);
  return out;
}

namespace {

// Tile accumulator over a dense (nu1, nu2) box; entries allocate on touch.
struct TileBox {
  int n1b, n2b;
  std::size_t patch_size;
  std::vector<std::vector<cplx>> cells;

  TileBox(int n1b_, int n2b_, std::size_t ps)
      : n1b(n1b_), n2b(n2b_), patch_size(ps),
        cells((2 * n1b_ + 1) * (2 * n2b_ + 1)) {}

  std::vector<cplx>* cell(int k1, int k2) {
    if (std::abs(k1) > n1b || std::abs(k2) > n2b) return nullptr;
    auto& c = cells[(k1 + n1b) * (2 * n2b + 1) + (k2 + n2b)];
    if (c.empty()) c.assign(patch_size, cplx{});
    return &c;
  }
};

}  // namespace

MKNResult TorusPhaseSpace::mkn_norm(const SampledField& f) const {
  if (f.grid->n != n_) throw std::domain_error("grid mismatch");

  double total = 0.0;
  for (const cplx& v : f.values) total += std::norm(v);
  total *= node_weight_;
  double inside = 0.0;
  for (const PatchNode& nd : patch_) inside += std::norm(f.values[nd.idx]);
  inside *= node_weight_;
  if (total > 0.0 && total - inside > 1e-6 * total)
    throw std::domain_error("field carries mass outside the alpha patch");

  MKNResult res;
  res.lambda = lambda_;
  res.eps0 = eps0_;
  res.l2_term = std::sqrt(total);

  std::vector<cplx> hat = forward_hat(f.values);
  double peak2 = 0.0;
  for (const cplx& z : hat) peak2 = std::max(peak2, std::norm(z));
  const double thr2 = peak2 * 1e-24;

  for (double theta : levels_) {
    const double inv_theta = 1.0 / theta;
    const int n1b = static_cast<int>(std::ceil(2.9 * inv_theta)) + 1;
    const int n2b = static_cast<int>(std::ceil(0.9 * inv_theta)) + 1;
    TileBox box(n1b, n2b, patch_.size());

    for (const Freq& fr : freqs_) {
      const cplx a = hat[fr.bin];
      if (std::norm(a) <= thr2) continue;
      const double u2 = fr.omega * inv_theta;
      const cplx zu = a * fr.ups;
      for (int k2 = static_cast<int>(std::ceil(-u2)) - 1;
           k2 <= static_cast<int>(std::floor(-u2)) + 1; ++k2) {
        double b2 = unit_bump(u2 + k2);
        if (b2 == 0.0) continue;
        const cplx z = zu * b2;
        for (std::size_t k = 0; k < patch_.size(); ++k) {
          const PatchNode& nd = patch_[k];
          double u1 = (nd.x1 - nd.x2 * fr.slope) * inv_theta;
          cplx ph = z * nd.alpha * std::polar(1.0, nd.x1 * fr.l1 + nd.x2 * fr.l2);
          for (int k1 = static_cast<int>(std::ceil(-u1)) - 1;
               k1 <= static_cast<int>(std::floor(-u1)) + 1; ++k1) {
            double b1 = unit_bump(u1 + k1);
            if (b1 == 0.0) continue;
            if (auto* c = box.cell(k1, k2)) (*c)[k] += ph * b1;
          }
        }
      }
    }

    const double scale = std::pow(theta, -0.5);
    for (int k1 = -box.n1b; k1 <= box.n1b; ++k1) {
      for (int k2 = -box.n2b; k2 <= box.n2b; ++k2) {
        auto& c = box.cells[(k1 + box.n1b) * (2 * box.n2b + 1) + (k2 + box.n2b)];
        if (c.empty()) continue;
        double s = 0.0;
        for (const cplx& z : c) s += std::norm(z);
        double v = scale * std::sqrt(node_weight_ * s);
        if (v <= 0.0) continue;
        res.tile_values.push_back({theta, k1, k2, v});
        if (v > res.sup) {
          res.sup = v;
          res.argmax = {theta, k1, k2, v};
        }
      }
    }
  }
  res.total = res.sup + res.l2_term;
  return res;
}

double TorusPhaseSpace::tile_operator_norm(const PhaseSpaceTile& t,
                                           std::uint64_t seed, int restarts,
                                           double tol) const {
  double best = 0.0;
  const std::size_t sz = static_cast<std::size_t>(n_) * n_;
  for (int r = 0; r < restarts; ++r) {
    std::mt19937_64 rng(seed + 0x9e3779b97f4a7c15ull * (r + 1));
    std::normal_distribution<double> gauss;
    std::vector<cplx> v(sz);
    for (cplx& z : v) z = cplx{gauss(rng), gauss(rng)};
    double nv = weighted_l2(v);
    for (cplx& z : v) z /= nv;

    double sigma = 0.0, prev = -1.0;
    for (int it = 0; it < 100; ++it) {
      std::vector<cplx> hat = forward_hat(v);
      std::vector<cplx> qv = tile_apply_patch(t, hat);
      double s = 0.0;
      for (const cplx& z : qv) s += std::norm(z);
      sigma = std::sqrt(node_weight_ * s);
      if (sigma == 0.0) break;
      if (prev >= 0.0 && std::abs(sigma - prev) <= tol * sigma) break;
      prev = sigma;
      std::vector<cplx> back = tile_adjoint_hat(t, qv);
      synth_inplace(back);
      double nb = weighted_l2(back);
      if (nb == 0.0) break;
      for (cplx& z : back) z /= nb;
      v = std::move(back);
    }
    best = std::max(best, sigma);
  }
  return best;
}

double TorusPhaseSpace::square_function_norm(double theta, std::uint64_t seed,
                                             int restarts, double tol) const {
  const double inv_theta = 1.0 / theta;
  const int n1b = static_cast<int>(std::ceil(2.9 * inv_theta)) + 1;
  const int n2b = static_cast<int>(std::ceil(0.9 * inv_theta)) + 1;
  const std::size_t sz = static_cast<std::size_t>(n_) * n_;

  // One application of sum_nu (Q^nu)* Q^nu.
  auto apply_S = [&](const std::vector<cplx>& v) {
    std::vector<cplx> hat = forward_hat(v);
    double peak2 = 0.0;
    for (const cplx& z : hat) peak2 = std::max(peak2, std::norm(z));
    const double thr2 = peak2 * 1e-24;

    TileBox box(n1b, n2b, patch_.size());
    for (const Freq& fr : freqs_) {
      const cplx a = hat[fr.bin];
      if (std::norm(a) <= thr2) continue;
      const double u2 = fr.omega * inv_theta;
      const cplx zu = a * fr.ups;
      for (int k2 = static_cast<int>(std::ceil(-u2)) - 1;
           k2 <= static_cast<int>(std::floor(-u2)) + 1; ++k2) {
        double b2 = unit_bump(u2 + k2);
        if (b2 == 0.0) continue;
        const cplx z = zu * b2;
        for (std::size_t k = 0; k < patch_.size(); ++k) {
          const PatchNode& nd = patch_[k];
          double u1 = (nd.x1 - nd.x2 * fr.slope) * inv_theta;
          cplx ph = z * nd.alpha * std::polar(1.0, nd.x1 * fr.l1 + nd.x2 * fr.l2);
          for (int k1 = static_cast<int>(std::ceil(-u1)) - 1;
               k1 <= static_cast<int>(std::floor(-u1)) + 1; ++k1) {
            double b1 = unit_bump(u1 + k1);
            if (b1 == 0.0) continue;
            if (auto* c = box.cell(k1, k2)) (*c)[k] += ph * b1;
          }
        }
      }
    }

    // Combined adjoint pass: h_hat(l) = (1/N^2) sum_x e^{-ixl} sum_nu q_nu out_nu(x).
    std::vector<cplx> out_hat(sz, cplx{});
    const double inv_n2 = 1.0 / (static_cast<double>(n_) * n_);
    for (const Freq& fr : freqs_) {
      const double u2 = fr.omega * inv_theta;
      cplx acc{};
      for (int k2 = static_cast<int>(std::ceil(-u2)) - 1;
           k2 <= static_cast<int>(std::floor(-u2)) + 1; ++k2) {
        double b2 = unit_bump(u2 + k2);
        if (b2 == 0.0) continue;
        for (std::size_t k = 0; k < patch_.size(); ++k) {
          const PatchNode& nd = patch_[k];
          double u1 = (nd.x1 - nd.x2 * fr.slope) * inv_theta;
          cplx ph = std::polar(1.0, -(nd.x1 * fr.l1 + nd.x2 * fr.l2));
          for (int k1 = static_cast<int>(std::ceil(-u1)) - 1;
               k1 <= static_cast<int>(std::floor(-u1)) + 1; ++k1) {
            double b1 = unit_bump(u1 + k1);
            if (b1 == 0.0) continue;
            auto* c = box.cell(k1, k2);
            if (!c) continue;
            acc += (nd.alpha * b1 * b2 * fr.ups) * (*c)[k] * ph;
          }
        }
      }
      out_hat[fr.bin] = acc * inv_n2;
    }
    synth_inplace(out_hat);
    return out_hat;
  };

  double best = 0.0;
  for (int r = 0; r < restarts; ++r) {
    std::mt19937_64 rng(seed + 0xa24baed4963ee407ull * (r + 1));
    std::normal_distribution<double> gauss;
    std::vector<cplx> v(sz);
    for (cplx& z : v) z = cplx{gauss(rng), gauss(rng)};
    double nv = weighted_l2(v);
    for (cplx& z : v) z /= nv;

    double val = 0.0, prev = -1.0;
    for (int it = 0; it < 60; ++it) {
      std::vector<cplx> sv = apply_S(v);
      val = weighted_l2(sv);
      if (val == 0.0) break;
      if (prev >= 0.0 && std::abs(val - prev) <= tol * val) break;
      prev = val;
      for (cplx& z : sv) z /= val;
      v = std::move(sv);
    }
    best = std::max(best, val);
  }
  return best;
}

std::array<double, 2> TorusPhaseSpace::tile_line(const PhaseSpaceTile& t) const {
  double omega = -t.theta * t.nu2;
  if (std::abs(omega) >= std::sqrt(3.0) / 2.0)
    throw std::domain_error("tile center outside the chart cone");
  double slope = -omega / std::sqrt(1.0 - omega * omega);
  return {slope, -t.theta * t.nu1};
}

PhaseSpaceTile TorusPhaseSpace::tile_through_patch(double theta, int nu2) const {
  double omega = -theta * nu2;
  if (std::abs(omega) >= std::sqrt(3.0) / 2.0)
    throw std::domain_error("nu2 outside the chart cone at this theta");
  double slope = -omega / std::sqrt(1.0 - omega * omega);
  double s_center = kPatchX1 - kPatchX2 * slope;
  return {theta, static_cast<int>(std::lround(-s_center / theta)), nu2};
}

TubeLeakResult TorusPhaseSpace::kernel_tube_leak(const PhaseSpaceTile& t,
                                                 double c_tube,
                                                 double y_perp_offset) const {
  if (lambda_ < 32.0) throw std::domain_error("kernel_tube_leak needs lambda >= 32");
  auto [slope, s0] = tile_line(t);
  const double hyp = std::sqrt(1.0 + slope * slope);

  // grid node nearest the line point at patch height, shifted off the line
  // by y_perp_offset along the unit normal (1, -slope)/hyp
  double y1 = s0 + slope * kPatchX2 + y_perp_offset / hyp;
  double y2 = kPatchX2 - y_perp_offset * slope / hyp;
  const double h = kTwoPi / n_;
  int i0 = static_cast<int>(std::lround(y1 / h));
  int i1 = static_cast<int>(std::lround(y2 / h));
  i0 = ((i0 % n_) + n_) % n_;
  i1 = ((i1 % n_) + n_) % n_;
  double yn1 = i0 * h > kPi ? i0 * h - kTwoPi : i0 * h;
  double yn2 = i1 * h;

  // point mass at the node: f_hat(l) = e^{-i y.l} / N^2 on every bin
  const std::size_t sz = static_cast<std::size_t>(n_) * n_;
  std::vector<cplx> hat(sz);
  const double inv_n2 = 1.0 / (static_cast<double>(n_) * n_);
  for (int k0 = 0; k0 < n_; ++k0)
    for (int k1 = 0; k1 < n_; ++k1) {
      double l1 = signed_freq(k0, n_), l2 = signed_freq(k1, n_);
      hat[static_cast<std::size_t>(k0) * n_ + k1] =
          std::polar(inv_n2, -(yn1 * l1 + yn2 * l2));
    }

  std::vector<cplx> g = chi_tile_field(t, hat);

  // The kernel propagates distance (1,2) along the geodesic, so the relevant
  // tube surrounds the length-5 segment through the patch, not the full line.
  const double cx1 = s0 + slope * kPatchX2, cx2 = kPatchX2;
  const double ux1 = slope / hyp, ux2 = 1.0 / hyp;
  auto line_dist = [&](double x1, double x2) {
    double best = 1e30;
    for (int a = -1; a <= 1; ++a)
      for (int b = -1; b <= 1; ++b) {
        double d1 = x1 + kTwoPi * a - cx1;
        double d2 = x2 + kTwoPi * b - cx2;
        double t = std::clamp(d1 * ux1 + d2 * ux2, -2.5, 2.5);
        best = std::min(best, std::hypot(d1 - t * ux1, d2 - t * ux2));
      }
    return best;
  };

  const double radius = c_tube * t.theta;
  double total = 0.0, outside = 0.0;
  for (std::size_t i = 0; i < sz; ++i) {
    double m = std::norm(g[i]);
    if (m == 0.0) continue;
    total += m;
    auto x = grid_->torus_node(i);
    double x1 = x[0] > kPi ? x[0] - kTwoPi : x[0];
    if (line_dist(x1, x[1]) > radius) outside += m;
  }

  TubeLeakResult res;
  res.leak_fraction = total > 0.0 ? outside / total : 0.0;
  // input mass is the unit value at one node; the node weight cancels
  res.output_mass_ratio = total;
  return res;
}

OrthogonalityTable TorusPhaseSpace::orthogonality_quad(const SampledField& f,
                                                       int max_tiles) const {
  if (f.grid->n != n_) throw std::domain_error("grid mismatch");
  MKNResult mkn = mkn_norm(f);

  auto tiles_at = [&](double theta) {
    std::vector<TileValue> v;
    for (const auto& tv : mkn.tile_values)
      if (tv.theta == theta) v.push_back(tv);
    std::sort(v.begin(), v.end(),
              [](const TileValue& a, const TileValue& b) { return a.value > b.value; });
    return v;
  };

  std::vector<cplx> hat = forward_hat(f.values);
  OrthogonalityTable out;

  // Bilinear-square decay at theta0.
  {
    auto tv = tiles_at(levels_.front());
    int keep = std::min<int>(max_tiles, static_cast<int>(tv.size()));
    std::vector<std::vector<cplx>> g(keep);
    for (int i = 0; i < keep; ++i) {
      PhaseSpaceTile t{tv[i].theta, tv[i].nu1, tv[i].nu2};
      g[i] = chi_tile_field(t, hat);
      for (cplx& z : g[i]) z *= z;  // g_nu^2
    }
    std::map<int, SeparationBin> bins;
    for (int i = 0; i < keep; ++i) {
      for (int j = i; j < keep; ++j) {
        double d1 = tv[i].nu1 - tv[j].nu1, d2 = tv[i].nu2 - tv[j].nu2;
        double sep = std::hypot(d1, d2);
        cplx acc{};
        for (std::size_t k = 0; k < g[i].size(); ++k)
          acc += g[i][k] * std::conj(g[j][k]);
        double mag = std::abs(acc) * node_weight_;
        auto& bin = bins[static_cast<int>(std::lround(sep))];
        bin.separation = std::lround(sep);
        bin.max_abs = std::max(bin.max_abs, mag);
        bin.mean_abs += mag;
        bin.count += 1;
      }
    }
    for (auto& [k, b] : bins) {
      b.mean_abs /= std::max(1, b.count);
      out.bilinear.push_back(b);
    }
  }

  // Quadrilinear variant at the next coarser theta.
  {
    double theta_c = levels_.size() > 1 ? levels_[1] : levels_[0];
    auto tv = tiles_at(theta_c);
    int keep = std::min<int>(12, static_cast<int>(tv.size()));
    // neighbor pairs (mu, mu') with |mu - mu'| <= 2
    struct Pair {
      int a, b;
      std::vector<cplx> prod;
    };
    std::vector<Pair> pairs;
    std::vector<std::vector<cplx>> g(keep);
    for (int i = 0; i < keep; ++i) {
      PhaseSpaceTile t{theta_c, tv[i].nu1, tv[i].nu2};
      g[i] = chi_tile_field(t, hat);
    }
    for (int i = 0; i < keep && pairs.size() < 16; ++i)
      for (int j = i; j < keep && pairs.size() < 16; ++j) {
        double sep = std::hypot<double>(tv[i].nu1 - tv[j].nu1, tv[i].nu2 - tv[j].nu2);
        if (sep > 2.0) continue;
        Pair p{i, j, {}};
        p.prod.resize(g[i].size());
        for (std::size_t k = 0; k < g[i].size(); ++k) p.prod[k] = g[i][k] * g[j][k];
        pairs.push_back(std::move(p));
      }
    double near = 0.0, far = 0.0, far_sep = 0.0;
    for (std::size_t a = 0; a < pairs.size(); ++a) {
      for (std::size_t b = a; b < pairs.size(); ++b) {
        const auto& pa = pairs[a];
        const auto& pb = pairs[b];
        double sep = std::hypot<double>(tv[pa.a].nu1 - tv[pb.a].nu1,
                                        tv[pa.a].nu2 - tv[pb.a].nu2) +
                     std::hypot<double>(tv[pa.b].nu1 - tv[pb.b].nu1,
                                        tv[pa.b].nu2 - tv[pb.b].nu2);
        cplx acc{};
        for (std::size_t k = 0; k < pa.prod.size(); ++k)
          acc += pa.prod[k] * std::conj(pb.prod[k]);
        double mag = std::abs(acc) * node_weight_;
        if (sep <= 1.0) near = std::max(near, mag);
        if (sep > far_sep) {
          far_sep = sep;
          far = mag;
        } else if (sep == far_sep) {
          far = std::max(far, mag);
        }
      }
    }
    out.quad_near = near;
    out.quad_far = far;
    out.far_separation = far_sep;
    out.far_over_near = near > 0.0 ? far / near : 0.0;
  }
  return out;
}

BilinearBound TorusPhaseSpace::bilinear_lower_bound(const PhaseSpaceTile& mu,
                                                    const PhaseSpaceTile& mu_prime,
                                                    std::uint64_t seed,
                                                    int max_alternations) const {
  if (mu.theta != mu_prime.theta)
    throw std::domain_error("tiles must share the angular scale");
  double sep = std::hypot<double>(mu.nu1 - mu_prime.nu1, mu.nu2 - mu_prime.nu2);
  if (!(sep >= 4.0 && sep <= 8.0))
    throw std::domain_error("tile separation must lie in [N0, N1] = [4, 8]");

  const std::size_t sz = static_cast<std::size_t>(n_) * n_;

  auto apply_A = [&](const PhaseSpaceTile& t, const std::vector<cplx>& v) {
    std::vector<cplx> hat(v);
    dft_->forward(hat.data());
    double inv = 1.0 / (static_cast<double>(n_) * n_);
    for (cplx& z : hat) z *= inv;
    return chi_tile_field(t, hat);
  };
  auto apply_Astar = [&](const PhaseSpaceTile& t, const std::vector<cplx>& gfull) {
    std::vector<cplx> hat(gfull);
    dft_->forward(hat.data());
    double inv = 1.0 / (static_cast<double>(n_) * n_);
    for (cplx& z : hat) z *= inv;
    SpectralCutoff cutoff{lambda_};
    for (int k0 = 0; k0 < n_; ++k0)
      for (int k1 = 0; k1 < n_; ++k1) {
        double l1 = signed_freq(k0, n_), l2 = signed_freq(k1, n_);
        hat[static_cast<std::size_t>(k0) * n_ + k1] *=
            std::conj(cutoff.rho(lambda_ - std::hypot(l1, l2)));
      }
    synth_inplace(hat);  // chi* g on the grid
    std::vector<cplx> gp(patch_.size());
    for (std::size_t k = 0; k < patch_.size(); ++k) gp[k] = hat[patch_[k].idx];
    std::vector<cplx> back = tile_adjoint_hat(t, gp);
    synth_inplace(back);
    return back;
  };

  // maximize |(A f) .* h|_2 over unit f by power iteration on M*M
  auto optimize = [&](const PhaseSpaceTile& t, const std::vector<cplx>& hfixed,
                      std::vector<cplx>& fio) {
    double sigma = 0.0, prev = -1.0;
    for (int it = 0; it < 40; ++it) {
      std::vector<cplx> af = apply_A(t, fio);
      for (std::size_t k = 0; k < sz; ++k) af[k] *= hfixed[k];
      sigma = weighted_l2(af);
      if (sigma == 0.0) break;
      if (prev >= 0.0 && std::abs(sigma - prev) <= 1e-4 * sigma) break;
      prev = sigma;
      for (std::size_t k = 0; k < sz; ++k) af[k] *= std::conj(hfixed[k]);
      std::vector<cplx> back = apply_Astar(t, af);
      double nb = weighted_l2(back);
      if (nb == 0.0) break;
      for (cplx& z : back) z /= nb;
      fio = std::move(back);
    }
    return sigma;
  };

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  std::vector<cplx> f1(sz), f2(sz);
  for (cplx& z : f1) z = cplx{gauss(rng), gauss(rng)};
  for (cplx& z : f2) z = cplx{gauss(rng), gauss(rng)};
  for (auto* v : {&f1, &f2}) {
    double nv = weighted_l2(*v);
    for (cplx& z : *v) z /= nv;
  }

  BilinearBound res;
  double prev = -1.0;
  for (int alt = 0; alt < max_alternations; ++alt) {
    res.alternations = alt + 1;
    std::vector<cplx> h2 = apply_A(mu_prime, f2);
    optimize(mu, h2, f1);
    std::vector<cplx> h1 = apply_A(mu, f1);
    double val = optimize(mu_prime, h1, f2);
    res.value = val;
    if (prev >= 0.0 && std::abs(val - prev) <= 1e-3 * std::max(val, 1e-300)) {
      res.converged = true;
      break;
    }
    prev = val;
  }
  return res;
}

SampledField TorusPhaseSpace::random_patch_field(std::uint64_t seed) const {
  const std::size_t sz = static_cast<std::size_t>(n_) * n_;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  std::vector<cplx> noise(sz);
  for (cplx& z : noise) z = cplx{gauss(rng), gauss(rng)};
  std::vector<cplx> hat = noise;
  dft_->forward(hat.data());
  double inv = 1.0 / (static_cast<double>(n_) * n_);
  for (cplx& z : hat) z *= inv;
  chi_multiply(hat);
  synth_inplace(hat);

  SampledField f;
  f.grid = grid_;
  f.manifold = Manifold::torus;
  f.values.assign(sz, cplx{});
  for (const PatchNode& nd : patch_) f.values[nd.idx] = hat[nd.idx] * nd.alpha;
  return l2_normalize(f);
}

}  // namespace eigentube
