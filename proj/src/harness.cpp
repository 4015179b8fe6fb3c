#include "eigentube/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <sstream>

namespace eigentube {

std::string family_name(SphereFamily f) {
  switch (f) {
    case SphereFamily::zonal: return "zonal";
    case SphereFamily::highest_weight: return "highest";
    case SphereFamily::random_gaussian: return "random";
    case SphereFamily::single_lm: return "single";
  }
  return "?";
}

std::string SweepConfig::canonical() const {
  std::ostringstream os;
  os << "family=" << family_name(family) << ";m=" << m << ";l=";
  for (std::size_t i = 0; i < l_list.size(); ++i)
    os << (i ? "," : "") << l_list[i];
  os << ";eps0=";
  for (std::size_t i = 0; i < eps0_list.size(); ++i)
    os << (i ? "," : "") << format_float(eps0_list[i]);
  os << ";grid_k=" << grid_k << ";restriction_k=" << restriction_k
     << ";oversample=" << oversample << ";seed=" << seed
     << ";quadcheck=" << (quadrature_check ? 1 : 0);
  return os.str();
}

SlopeFit fit_loglog(std::span<const double> lambda, std::span<const double> value) {
  return fit_powerlaw(lambda, value);
}

namespace {

double restriction_sup_search(const SphereHarmonicSpec& spec, int k_candidates,
                              int n_pts) {
  auto grid = geodesic_grid_sphere(k_candidates);
  double best = -1.0;
  GreatCircle best_circle{Vec3{0, 0, 1}};
  for (const auto& c : grid.poles) {
    double v = restriction_norm(spec, c, n_pts);
    if (v > best) {
      best = v;
      best_circle = c;
    }
  }
  auto refined = refine_sup(
      [&](const GreatCircle& g) { return restriction_norm(spec, g, n_pts); },
      best_circle, 1e-3, grid.resolution);
  return refined.value;
}

void add_report(SweepResult& out, const std::string& quantity,
                const std::vector<std::pair<double, double>>& pts) {
  if (pts.size() < 3) return;
  std::vector<double> xs, vs;
  for (auto& [x, v] : pts)
    if (v > 0.0) {
      xs.push_back(x);
      vs.push_back(v);
    }
  if (xs.size() < 3) return;
  ScalingReport rep;
  rep.quantity = quantity;
  rep.family = family_name(out.cfg.family);
  rep.config_hash = out.config_hash;
  for (std::size_t i = 0; i < xs.size(); ++i) rep.points.emplace_back(xs[i], vs[i]);
  auto fit = fit_loglog(xs, vs);
  rep.slope = fit.slope;
  rep.intercept = fit.intercept;
  rep.max_residual = fit.max_residual;
  out.reports.push_back(std::move(rep));
}

}  // namespace

SweepResult run_sweep(const SweepConfig& cfg) {
  if (cfg.l_list.empty()) throw std::domain_error("empty degree list");
  if (cfg.eps0_list.empty()) throw std::domain_error("empty eps0 list");

  SweepResult out;
  out.cfg = cfg;
  out.config_hash = cfg.hash();

  for (int l : cfg.l_list) {
    try {
      SphereHarmonicSpec spec{cfg.family, l, cfg.m, cfg.seed};
      FamilySweepRow row;
      row.l = l;
      row.lambda = spec.lambda();

      auto norm_grid = sphere_grid(l);
      auto nf = eval_sphere_harmonic(spec, norm_grid);
      row.l2 = lp_norm(nf, 2.0);
      row.l4 = lp_norm(nf, 4.0);
      row.linf = lp_norm(nf, std::numeric_limits<double>::infinity());
      row.norm_grid_theta = static_cast<int>(norm_grid->mu.size());
      row.norm_grid_phi = norm_grid->nphi;

      int nt = std::max(64, cfg.oversample * l);
      auto tube_grid = sphere_grid_custom(nt, nt);
      auto tf = eval_sphere_harmonic(spec, tube_grid);
      row.tube_grid_theta = nt;
      row.tube_grid_phi = nt;

      auto candidates = geodesic_grid_sphere(cfg.grid_k);
      for (double eps0 : cfg.eps0_list) {
        KNRow kr;
        kr.eps0 = eps0;
        kr.kn = kn_norm(tf, row.lambda, eps0, candidates);
        kr.ratio_11pp = row.l4 / (std::pow(row.lambda, 0.125) * std::sqrt(row.l2) *
                                  std::pow(kr.kn.sup_tube_mass, 0.25));
        if (cfg.quadrature_check) {
          auto fine_grid = sphere_grid_custom(2 * nt, 2 * nt);
          auto ff = eval_sphere_harmonic(spec, fine_grid);
          double fine = tube_mass(ff, kr.kn.argmax_circle, kr.kn.tube_radius);
          kr.kn.quadrature_error = std::abs(fine - kr.kn.sup_tube_mass);
        }
        row.kn_rows.push_back(std::move(kr));
      }

      row.halfwidth = ratio_l4_tube_halfwidth(tf, row.lambda, candidates);
      row.restriction_sup =
          restriction_sup_search(spec, cfg.restriction_k, 8 * std::max(1, l));

      out.rows.push_back(std::move(row));
    } catch (const std::exception& e) {
      std::ostringstream os;
      os << "l=" << l << ": " << e.what();
      out.failures.push_back(os.str());
    }
  }

  auto collect = [&](auto&& get) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& row : out.rows) pts.emplace_back(row.lambda, get(row));
    return pts;
  };

  add_report(out, "l4_norm", collect([](const FamilySweepRow& r) { return r.l4; }));
  add_report(out, "linf_norm", collect([](const FamilySweepRow& r) { return r.linf; }));
  add_report(out, "restriction_sup",
             collect([](const FamilySweepRow& r) { return r.restriction_sup; }));
  add_report(out, "tube_l2_halfwidth",
             collect([](const FamilySweepRow& r) { return r.halfwidth.sup_tube_l2; }));
  add_report(out, "tube_l4_halfwidth",
             collect([](const FamilySweepRow& r) { return r.halfwidth.sup_tube_l4; }));
  for (std::size_t j = 0; j < cfg.eps0_list.size(); ++j) {
    std::ostringstream kn2, ratio;
    kn2 << "kn2_eps" << format_float(cfg.eps0_list[j]);
    ratio << "ratio_11pp_eps" << format_float(cfg.eps0_list[j]);
    add_report(out, kn2.str(), collect([j](const FamilySweepRow& r) {
                 return r.kn_rows[j].kn.kn_value * r.kn_rows[j].kn.kn_value;
               }));
    add_report(out, ratio.str(),
               collect([j](const FamilySweepRow& r) { return r.kn_rows[j].ratio_11pp; }));
  }
  return out;
}

Json sweep_to_json(const SweepResult& r) {
  Json root = Json::object();
  root.set("schema", "eigentube/1");
  root.set("kind", "sphere_sweep");
  root.set("config", r.cfg.canonical());
  root.set("config_hash", r.config_hash);
  root.set("family", family_name(r.cfg.family));
  root.set("lambda_convention", "lambda = sqrt(l(l+1))");

  Json rows = Json::array();
  for (const auto& row : r.rows) {
    Json jr = Json::object();
    jr.set("l", row.l);
    jr.set("lambda", row.lambda);
    jr.set("l2", row.l2);
    jr.set("l4", row.l4);
    jr.set("linf", row.linf);
    jr.set("restriction_sup", row.restriction_sup);
    jr.set("norm_grid", Json::array().push(row.norm_grid_theta).push(row.norm_grid_phi));
    jr.set("tube_grid", Json::array().push(row.tube_grid_theta).push(row.tube_grid_phi));
    Json kns = Json::array();
    for (const auto& kr : row.kn_rows) {
      Json jk = Json::object();
      jk.set("eps0", kr.eps0);
      jk.set("tube_radius", kr.kn.tube_radius);
      jk.set("sup_tube_mass", kr.kn.sup_tube_mass);
      jk.set("coarse_tube_mass", kr.kn.coarse_tube_mass);
      jk.set("kn_value", kr.kn.kn_value);
      jk.set("unit_arc_mass", kr.kn.unit_arc_mass);
      jk.set("refinement_converged", kr.kn.refinement_converged);
      jk.set("ratio_11pp", kr.ratio_11pp);
      if (kr.kn.quadrature_error)
        jk.set("quadrature_error", *kr.kn.quadrature_error);
      Json pole = Json::array();
      pole.push(kr.kn.argmax_circle.pole.x)
          .push(kr.kn.argmax_circle.pole.y)
          .push(kr.kn.argmax_circle.pole.z);
      jk.set("argmax_pole", std::move(pole));
      kns.push(std::move(jk));
    }
    jr.set("kn", std::move(kns));
    Json hw = Json::object();
    hw.set("sup_tube_l2", row.halfwidth.sup_tube_l2);
    hw.set("sup_tube_l4", row.halfwidth.sup_tube_l4);
    hw.set("ratio_vs_tube_l2", row.halfwidth.vs_tube_l2);
    hw.set("ratio_vs_tube_l4", row.halfwidth.vs_tube_l4);
    jr.set("halfwidth", std::move(hw));
    rows.push(std::move(jr));
  }
  root.set("rows", std::move(rows));

  Json reps = Json::array();
  for (const auto& rep : r.reports) {
    Json jr = Json::object();
    jr.set("quantity", rep.quantity);
    jr.set("slope", rep.slope);
    jr.set("intercept", rep.intercept);
    jr.set("max_residual", rep.max_residual);
    Json pts = Json::array();
    for (auto& [x, v] : rep.points)
      pts.push(Json::array().push(x).push(v));
    jr.set("points", std::move(pts));
    reps.push(std::move(jr));
  }
  root.set("reports", std::move(reps));

  Json fails = Json::array();
  for (const auto& f : r.failures) fails.push(f);
  root.set("failures", std::move(fails));
  return root;
}

namespace {

const ScalingReport* find_report(const SweepResult& r, const std::string& q) {
  for (const auto& rep : r.reports)
    if (rep.quantity == q) return &rep;
  return nullptr;
}

}  // namespace

CorollaryReport corollary_report(const SweepResult& r) {
  const auto* l4 = find_report(r, "l4_norm");
  const auto* t4 = find_report(r, "tube_l4_halfwidth");
  const auto* t2 = find_report(r, "tube_l2_halfwidth");
  const auto* rs = find_report(r, "restriction_sup");
  std::string missing;
  if (!l4) missing += " l4_norm";
  if (!t4) missing += " tube_l4_halfwidth";
  if (!t2) missing += " tube_l2_halfwidth";
  if (!rs) missing += " restriction_sup";
  if (!missing.empty())
    throw std::domain_error("corollary report missing quantities:" + missing);

  CorollaryReport c;
  c.family = family_name(r.cfg.family);
  c.exp_l4 = l4->slope;
  c.exp_tube_l4 = t4->slope;
  c.exp_tube_l2 = t2->slope;
  c.exp_restriction = rs->slope;

  c.small_l4 = c.exp_l4 <= 0.125 - c.margin;
  c.small_tube_l4 = c.exp_tube_l4 <= 0.125 - c.margin;
  c.small_tube_l2 = c.exp_tube_l2 <= 0.0 - c.margin;
  c.consistent = (c.small_l4 == c.small_tube_l4) && (c.small_tube_l4 == c.small_tube_l2);

  c.premise_restriction = c.exp_restriction <= 0.0 + c.tol;
  c.premise_tube_l2 = c.exp_tube_l2 <= -0.25 + c.tol;
  c.conclusion_l4 = c.exp_l4 <= 0.0 + c.tol;
  c.implication_holds =
      (!c.premise_restriction && !c.premise_tube_l2) || c.conclusion_l4;

  if (c.consistent && !c.small_l4) c.verdict = "consistent, saturated";
  else if (c.consistent) c.verdict = "consistent, small";
  else c.verdict = "mixed: log-limited resolution";
  return c;
}

std::string MicrolocalCheckConfig::canonical() const {
  std::ostringstream os;
  os << "lambda=" << format_float(lambda) << ";grid=" << grid
     << ";eps0=" << format_float(eps0) << ";seed=" << seed
     << ";fields=" << fields;
  return os.str();
}

Json microlocal_check(const MicrolocalCheckConfig& cfg) {
  TorusPhaseSpace ps(torus_grid(cfg.grid), cfg.lambda, cfg.eps0);

  Json root = Json::object();
  root.set("schema", "eigentube/1");
  root.set("kind", "microlocal_check");
  root.set("config", cfg.canonical());
  root.set("config_hash", cfg.hash());
  root.set("lambda", cfg.lambda);
  root.set("grid", cfg.grid);
  root.set("eps0", cfg.eps0);
  root.set("theta0", ps.theta0());

  // partition identity on a seeded chart sample
  {
    std::mt19937_64 rng(cfg.seed ^ 0xabcdef12345ull);
    std::uniform_real_distribution<double> ux(-0.1, 0.1);
    std::uniform_real_distribution<double> uy(1.4, 1.6);
    std::uniform_real_distribution<double> uo(-0.85, 0.85);
    double worst = 0.0;
    for (int k = 0; k < 300; ++k) {
      double omega = uo(rng);
      double l2 = -std::sqrt(1.0 - omega * omega);
      auto sw = phi_map({ux(rng), uy(rng)}, {omega, l2});
      double sum = 0.0;
      double u1 = sw[0] / ps.theta0(), u2 = sw[1] / ps.theta0();
      for (int a = -2; a <= 2; ++a)
        for (int b = -2; b <= 2; ++b)
          sum += partition_bump(u1 + std::floor(-u1) + a, u2 + std::floor(-u2) + b);
      worst = std::max(worst, std::abs(sum - 1.0));
    }
    root.set("partition_identity_error", worst);
  }

  // kernel tube leak at the vertical tile
  {
    PhaseSpaceTile t = ps.tile_through_patch(ps.theta0(), 0);
    auto leak = ps.kernel_tube_leak(t, 10.0);
    root.set("tube_leak_c10", leak.leak_fraction);
    root.set("tube_leak_output_mass", leak.output_mass_ratio);
  }

  // tile operator norms over the two finest levels
  {
    Json norms = Json::array();
    for (int level = 0; level < 2 && level < (int)ps.theta_levels().size(); ++level) {
      double th = ps.theta_levels()[level];
      for (int nu2 : {-1, 0, 1}) {
        PhaseSpaceTile t = ps.tile_through_patch(th, nu2);
        Json j = Json::object();
        j.set("theta", th);
        j.set("nu1", t.nu1);
        j.set("nu2", t.nu2);
        j.set("norm", ps.tile_operator_norm(t, cfg.seed ^ 77, 3, 1e-3));
        norms.push(std::move(j));
      }
    }
    root.set("tile_norms", std::move(norms));
  }

  // MKN vs KN domination on seeded patch fields
  {
    auto cand = geodesic_grid_torus(8, 0.07);
    Json table = Json::array();
    double cmax = 0.0;
    for (int k = 0; k < cfg.fields; ++k) {
      auto f = ps.random_patch_field(cfg.seed + 1000 * (k + 1));
      auto mkn = ps.mkn_norm(f);
      auto kn = kn_norm(f, cfg.lambda, cfg.eps0, cand);
      double ratio = (mkn.total - 1e-6) / kn.kn_value;
      cmax = std::max(cmax, ratio);
      Json j = Json::object();
      j.set("seed", static_cast<long long>(cfg.seed + 1000 * (k + 1)));
      j.set("mkn_total", mkn.total);
      j.set("mkn_sup", mkn.sup);
      j.set("kn", kn.kn_value);
      j.set("ratio", ratio);
      table.push(std::move(j));
    }
    root.set("domination", std::move(table));
    root.set("domination_constant", cmax);
  }
  return root;
}

std::string OscNormConfig::canonical() const {
  std::ostringstream os;
  os << "lambdas=";
  for (std::size_t i = 0; i < lambdas.size(); ++i)
    os << (i ? "," : "") << format_float(lambdas[i]);
  os << ";thetas=";
  for (std::size_t i = 0; i < thetas.size(); ++i)
    os << (i ? "," : "") << format_float(thetas[i]);
  os << ";theta_fixed=" << format_float(theta_fixed)
     << ";lambda_fixed=" << format_float(lambda_fixed)
     << ";eta=" << format_float(eta)
     << ";resolution=" << format_float(resolution);
  return os.str();
}

Json osc_norm_report(const OscNormConfig& cfg) {
  ModelPhase phase;
  if (cfg.eta > 0.0) {
    phase.metric = MetricKind::radial_perturbation;
    phase.eta = cfg.eta;
  }
  auto rep = scaling_fit(phase, cfg.resolution, cfg.lambdas, cfg.theta_fixed,
                         cfg.thetas, cfg.lambda_fixed);

  Json root = Json::object();
  root.set("schema", "eigentube/1");
  root.set("kind", "osc_norm");
  root.set("config", cfg.canonical());
  root.set("config_hash", cfg.hash());
  root.set("metric", cfg.eta > 0.0 ? "radial_perturbation" : "euclidean");
  root.set("eta", cfg.eta);
  root.set("resolution", cfg.resolution);

  auto sweep_json = [](const std::vector<NormPoint>& pts, const SlopeFit& fit) {
    Json j = Json::object();
    Json arr = Json::array();
    double cmax = 0.0;
    for (const auto& p : pts) {
      Json q = Json::object();
      q.set("lambda", p.lambda);
      q.set("theta", p.theta);
      q.set("norm", p.norm);
      q.set("converged", p.converged);
      // desk-verifiable shadow of the lemma bound: C = norm * lambda * sqrt(theta)
      q.set("bound_constant", p.norm * p.lambda * std::sqrt(p.theta));
      cmax = std::max(cmax, p.norm * p.lambda * std::sqrt(p.theta));
      arr.push(std::move(q));
    }
    j.set("points", std::move(arr));
    j.set("slope", fit.slope);
    j.set("intercept", fit.intercept);
    j.set("max_residual", fit.max_residual);
    j.set("max_bound_constant", cmax);
    return j;
  };
  root.set("lambda_sweep", sweep_json(rep.lambda_sweep, rep.lambda_fit));
  root.set("theta_sweep", sweep_json(rep.theta_sweep, rep.theta_fit));
  return root;
}

std::vector<long long> pick_circles(long long nmax, int count) {
  if (nmax < 32) throw std::domain_error("nmax too small");
  std::vector<long long> out;
  double lo = std::log(32.0), hi = std::log(static_cast<double>(nmax));
  for (int i = 0; i < count; ++i) {
    double target = std::exp(lo + (hi - lo) * (i + 1) / count);
    long long n = std::llround(target);
    // walk outward to the nearest fresh circle with at least 8 points
    for (long long d = 0;; ++d) {
      for (long long cand : {n - d, n + d}) {
        if (cand < 1 || cand > nmax) continue;
        if (r2_count(cand) < 8) continue;
        if (std::find(out.begin(), out.end(), cand) != out.end()) continue;
        out.push_back(cand);
        d = -1;
        break;
      }
      if (d == -1) break;
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::string torus_l4_csv(long long nmax, int circles, int trials,
                         std::uint64_t seed) {
  std::string out = csv_line({"n", "r2", "trial", "l4_over_l2", "bound_margin"});
  const double bound = std::pow(3.0, 0.25);
  for (long long n : pick_circles(nmax, circles)) {
    auto pts = lattice_circle_points(n);
    for (int trial = 0; trial < trials; ++trial) {
      std::mt19937_64 rng(seed ^ (0x51ed2701ull * n) ^ (0xc3a5c85c97cb3127ull * trial));
      std::normal_distribution<double> gauss;
      TorusEigenfunction e{n, {}};
      for (const auto& p : pts)
        e.coefficients.push_back({p, cplx{gauss(rng), gauss(rng)}});
      double v = zygmund_l4(e);
      out += csv_line({std::to_string(n), std::to_string(pts.size()),
                       std::to_string(trial), format_float(v),
                       format_float(bound - v)});
    }
  }
  return out;
}

std::string lattice_arcs_csv(long long nmax, double aperture_exp) {
  double delta = -0.5 - aperture_exp;
  auto table = cc_regime_scan(nmax, delta);
  std::string out = csv_line({"n", "r2", "count", "running_max"});
  for (const auto& row : table)
    out += csv_line({std::to_string(row.n), std::to_string(row.r2),
                     std::to_string(row.count), std::to_string(row.running_max)});
  return out;
}

Json corollary_to_json(const CorollaryReport& c) {
  Json j = Json::object();
  j.set("schema", "eigentube/1");
  j.set("kind", "corollary");
  j.set("family", c.family);
  j.set("exp_l4", c.exp_l4);
  j.set("exp_tube_l4", c.exp_tube_l4);
  j.set("exp_tube_l2", c.exp_tube_l2);
  j.set("exp_restriction", c.exp_restriction);
  j.set("small_l4", c.small_l4);
  j.set("small_tube_l4", c.small_tube_l4);
  j.set("small_tube_l2", c.small_tube_l2);
  j.set("consistent", c.consistent);
  j.set("premise_restriction", c.premise_restriction);
  j.set("premise_tube_l2", c.premise_tube_l2);
  j.set("conclusion_l4", c.conclusion_l4);
  j.set("implication_holds", c.implication_holds);
  j.set("verdict", c.verdict);
  j.set("tolerance", c.tol);
  j.set("o_minus_margin", c.margin);
  return j;
}

}  // namespace eigentube
