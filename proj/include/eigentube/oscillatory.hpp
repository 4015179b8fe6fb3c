#ifndef EIGENTUBE_OSCILLATORY_HPP
#define EIGENTUBE_OSCILLATORY_HPP

#include <cstdint>
#include <vector>

#include "eigentube/common.hpp"

namespace eigentube {

enum class MetricKind { euclidean, radial_perturbation };

// Two-distance phase Psi(x; s, t) = psi(x,(s+t,y2)) + psi(x,(s-t,y2')) with
// psi the metric distance. The perturbed metric is
// psi(x,y) = |x-y| (1 + eta sin(2|x-y|)), checkable by finite differences.
struct ModelPhase {
  MetricKind metric = MetricKind::euclidean;
  double eta = 0.0;     // radial perturbation amplitude, |eta| <= 0.05
  double y2 = 1.4;
  double y2p = 1.4 + 0.025;  // y2 + delta/2 with delta = 1/20

  double psi(double x1, double x2, double yy1, double yy2) const;
  double value(double x1, double x2, double s, double t) const;
};

// Smooth cutoff b(x;s,t) supported in {|x1|,|s|,|t| <= theta} x {x2 in
// (-0.5, 0.3)}, times the angle window that keeps the transversal
// separation comparable to theta (the support of the tile-pair products).
struct CutoffProfile {
  double theta = 0.2;
  double amplitude = 1.0;
  double support_constant() const;  // C with b = 0 when |x1|+|s|+|t| >= C theta

  double value(const ModelPhase& phase, double x1, double x2, double s,
               double t) const;
};

struct OscillatorMatrix {
  double lambda = 0.0, theta = 0.0;
  int n_x1 = 0, n_x2 = 0, n_s = 0, n_t = 0;
  std::vector<double> x1, x2, s, t;   // grid nodes
  double wx = 0.0, wst = 0.0;         // cell areas
  // row-major rows = x-grid, cols = (s,t)-grid; sqrt-weights folded in
  std::vector<cplx> entries;
  double nyquist_margin = 0.0;

  std::size_t rows() const { return static_cast<std::size_t>(n_x1) * n_x2; }
  std::size_t cols() const { return static_cast<std::size_t>(n_s) * n_t; }
};

// Discretize T_lambda F(x) = int e^{i lambda Psi} b F ds dt with trapezoid
// weights; r points per local wavelength in every active direction
// (default r = 4, reported margin is r/2). Guards: theta <= 1/2, at most
// 2e8 entries.
OscillatorMatrix assemble(const ModelPhase& phase, const CutoffProfile& cutoff,
                          double lambda, double theta, double resolution = 4.0);

struct OpNormResult {
  double value = 0.0;
  bool converged = false;
  int iterations = 0;
};

// Largest singular value by power iteration on T*T (3 restarts, 1e-6 rel).
OpNormResult op_norm(const OscillatorMatrix& m, std::uint64_t seed = 1,
                     int restarts = 3, double tol = 1e-6);

struct NormPoint {
  double lambda = 0.0, theta = 0.0;
  double norm = 0.0;
  bool converged = false;
};

struct SlopeFit {
  double slope = 0.0, intercept = 0.0, max_residual = 0.0;
  int points = 0;
};

struct OscScalingReport {
  std::vector<NormPoint> lambda_sweep;  // theta fixed
  std::vector<NormPoint> theta_sweep;   // lambda fixed
  SlopeFit lambda_fit;                   // slope of log|T| vs log(lambda)
  SlopeFit theta_fit;                    // slope of log|T| vs log(theta)
  double theta_fixed = 0.0, lambda_fixed = 0.0;
};

// Norm sweeps over the given lists: the lambda fit runs at theta_fixed, the
// theta fit at lambda_fixed; both need >= 4 points.
OscScalingReport scaling_fit(const ModelPhase& phase, double resolution,
                             const std::vector<double>& lambdas,
                             double theta_fixed,
                             const std::vector<double>& thetas,
                             double lambda_fixed);

SlopeFit fit_powerlaw(std::span<const double> x, std::span<const double> v);

struct EnvelopeReport {
  double c_n0 = 0.0;         // smallest C for the N=0 envelope on the sample
  double c_n3 = 0.0;         // smallest C for the N=3 envelope
  double coincident_bound = 0.0;  // int |b|^2 dx (the N=0 diagonal value)
  double coincident_value = 0.0;  // |K| at coincident arguments
  int samples = 0;
};

// Monte-Carlo check of the kernel envelope
// |K(s,t;s',t')| <= C [ theta^{1-N} (1+lambda|D|)^{-N} + theta (1+lambda
// theta |D|)^{-N} ] for N in {0,3}, D = (s-s', t-t'). Requires
// lambda theta^2 >= 1.
EnvelopeReport kernel_envelope_check(const ModelPhase& phase,
                                     const CutoffProfile& cutoff, double lambda,
                                     double theta, int sample_count,
                                     std::uint64_t seed = 1,
                                     double resolution = 4.0);

}  // namespace eigentube

#endif
