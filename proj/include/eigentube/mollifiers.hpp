#ifndef EIGENTUBE_MOLLIFIERS_HPP
#define EIGENTUBE_MOLLIFIERS_HPP

#include <cmath>

namespace eigentube {

// exp(-1/u) for u > 0, extended by 0. All derivatives vanish at u = 0.
inline double exp_tail(double u) { return u > 0.0 ? std::exp(-1.0 / u) : 0.0; }

// C-infinity step: 0 for t <= -1/2, 1 for t >= 1/2, strictly monotone between.
// Closed form H(t) = e(t+1/2) / (e(t+1/2) + e(1/2-t)) with e(u) = exp(-1/u).
inline double smooth_step(double t) {
  if (t <= -0.5) return 0.0;
  if (t >= 0.5) return 1.0;
  double a = exp_tail(t + 0.5);
  double b = exp_tail(0.5 - t);
  return a / (a + b);
}

// Step difference B(t) = H(t+1/2) - H(t-1/2): nonnegative, supported in
// (-1,1), B(0) = 1, and sum_k B(t+k) = 1 for every t (telescoping).
inline double unit_bump(double t) {
  return smooth_step(t + 0.5) - smooth_step(t - 0.5);
}

// Plateau window: 0 off (a,d), 1 on [b,c], smooth ramps on (a,b) and (c,d).
inline double plateau(double s, double a, double b, double c, double d) {
  double up = smooth_step((s - 0.5 * (a + b)) / (b - a));
  double down = 1.0 - smooth_step((s - 0.5 * (c + d)) / (d - c));
  return up * down;
}

// Symmetric bump supported in |t| < 1 with bump(0) = 1; used where a plain
// single-lobe cutoff is wanted rather than the partition bump.
inline double round_bump(double t) {
  double u = 1.0 - t * t;
  return u > 0.0 ? std::exp(1.0 - 1.0 / u) : 0.0;
}

}  // namespace eigentube

#endif
