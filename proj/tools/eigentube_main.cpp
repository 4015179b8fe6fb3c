// eigentube: numerical experiments for eigenfunction concentration on the
// sphere and flat torus. Subcommands mirror the report kinds; all runs are
// deterministic given (config, seed). EIGENTUBE_THREADS caps parallelism.

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "eigentube/acceptance.hpp"
#include "eigentube/harness.hpp"

using namespace eigentube;

namespace {

std::vector<int> parse_ints(const std::string& csv) {
  std::vector<int> out;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(std::stoi(tok));
  return out;
}

std::vector<double> parse_doubles(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
  return out;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open output file: " + path);
  os << content;
}

SphereFamily parse_family(const std::string& name) {
  if (name == "zonal") return SphereFamily::zonal;
  if (name == "highest") return SphereFamily::highest_weight;
  if (name == "random") return SphereFamily::random_gaussian;
  if (name == "single") return SphereFamily::single_lm;
  throw CLI::ValidationError("--family", "unknown family: " + name);
}

// Config files are JSON objects whose keys mirror the long flag names;
// values present in the file act as defaults for flags not given on the
// command line.
void apply_config(CLI::App* sub, const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot read config file: " + path);
  nlohmann::json j;
  is >> j;
  for (auto& [key, value] : j.items()) {
    CLI::Option* opt = sub->get_option_no_throw("--" + key);
    if (!opt || opt->count() > 0) continue;
    std::string text = value.is_string() ? value.get<std::string>() : value.dump();
    opt->add_result(text);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"eigenfunction concentration laboratory"};
  app.require_subcommand(1);

  // sphere-sweep
  auto* sweep = app.add_subcommand("sphere-sweep", "family sweep on S^2");
  std::string family = "zonal", l_csv = "16,32,64,128,256", eps_csv = "0.1";
  std::string out_path, config_path;
  int grid_k = 512, m_order = 0, oversample = 8;
  std::uint64_t seed = 7;
  sweep->add_option("--family", family, "zonal|highest|random|single");
  sweep->add_option("--l", l_csv, "comma list of degrees");
  sweep->add_option("--eps0", eps_csv, "comma list of eps0 values");
  sweep->add_option("--grid-k", grid_k, "geodesic grid size");
  sweep->add_option("--m", m_order, "order for the single family");
  sweep->add_option("--oversample", oversample, "tube grid rows per degree");
  sweep->add_option("--seed", seed, "random seed");
  sweep->add_option("--out", out_path, "output JSON path")->required();
  sweep->add_option("--config", config_path, "JSON config mirroring the flags");

  // torus-l4
  auto* tl4 = app.add_subcommand("torus-l4", "toral L4 ratios over random circles");
  long long nmax = 100000;
  int trials = 100, circles = 50;
  std::string tl4_out;
  std::uint64_t tl4_seed = 7;
  tl4->add_option("--nmax", nmax, "largest circle radius^2");
  tl4->add_option("--trials", trials, "random vectors per circle");
  tl4->add_option("--circles", circles, "number of circles");
  tl4->add_option("--seed", tl4_seed, "random seed");
  tl4->add_option("--out", tl4_out, "output CSV path")->required();

  // lattice-arcs
  auto* arcs = app.add_subcommand("lattice-arcs", "max lattice points on arcs");
  long long arcs_nmax = 100000;
  double aperture_exp = -0.6;
  std::string arcs_out;
  arcs->add_option("--nmax", arcs_nmax, "largest circle radius^2");
  arcs->add_option("--aperture-exp", aperture_exp, "arclength exponent a");
  arcs->add_option("--out", arcs_out, "output CSV path")->required();

  // microlocal-check
  auto* micro = app.add_subcommand("microlocal-check", "phase-space suite on T^2");
  MicrolocalCheckConfig mc;
  micro->add_option("--lambda", mc.lambda, "frequency");
  micro->add_option("--grid", mc.grid, "nodes per axis");
  micro->add_option("--eps0", mc.eps0, "angular exponent");
  micro->add_option("--seed", mc.seed, "random seed");
  micro->add_option("--fields", mc.fields, "random fields for the domination table");
  std::string micro_out;
  micro->add_option("--out", micro_out, "output JSON path")->required();

  // osc-norm
  auto* osc = app.add_subcommand("osc-norm", "oscillatory operator norm sweeps");
  std::string lam_csv = "50,100,200,400", th_csv = "0.4,0.2,0.1,0.05";
  OscNormConfig oc;
  std::string osc_out;
  osc->add_option("--lambdas", lam_csv, "comma list for the lambda sweep");
  osc->add_option("--thetas", th_csv, "comma list for the theta sweep");
  osc->add_option("--theta-fixed", oc.theta_fixed, "theta for the lambda sweep");
  osc->add_option("--lambda-fixed", oc.lambda_fixed, "lambda for the theta sweep");
  osc->add_option("--eta", oc.eta, "metric perturbation amplitude (0 = euclidean)");
  osc->add_option("--resolution", oc.resolution, "samples per reduced wavelength");
  osc->add_option("--out", osc_out, "output JSON path")->required();

  // verify
  auto* verify = app.add_subcommand("verify", "run the acceptance suite");
  std::uint64_t verify_seed = 7;
  std::string verify_out;
  verify->add_option("--seed", verify_seed, "random seed");
  verify->add_option("--out", verify_out, "directory for report dumps");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sweep->parsed()) {
      if (!config_path.empty()) apply_config(sweep, config_path);
      SweepConfig cfg;
      cfg.family = parse_family(family);
      cfg.m = m_order;
      cfg.l_list = parse_ints(l_csv);
      cfg.eps0_list = parse_doubles(eps_csv);
      cfg.grid_k = grid_k;
      cfg.oversample = oversample;
      cfg.seed = seed;
      write_file(out_path, sweep_to_json(run_sweep(cfg)).dump() + "\n");
    } else if (tl4->parsed()) {
      write_file(tl4_out, torus_l4_csv(nmax, circles, trials, tl4_seed));
    } else if (arcs->parsed()) {
      write_file(arcs_out, lattice_arcs_csv(arcs_nmax, aperture_exp));
    } else if (micro->parsed()) {
      write_file(micro_out, microlocal_check(mc).dump() + "\n");
    } else if (osc->parsed()) {
      oc.lambdas = parse_doubles(lam_csv);
      oc.thetas = parse_doubles(th_csv);
      write_file(osc_out, osc_norm_report(oc).dump() + "\n");
    } else if (verify->parsed()) {
      AcceptanceOptions opt;
      opt.seed = verify_seed;
      opt.out_dir = verify_out;
      auto outcome = verify_all(std::cout, opt);
      return outcome.all_passed() ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
