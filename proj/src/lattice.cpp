#include "eigentube/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace eigentube {

namespace {

// Counterclockwise angular span from a to b decided against the window angle;
// exact integer chords settle boundary cases instead of transcendental
// angles. Angles are precomputed in long double only to order the points.
struct AngularWindow {
  double lambda2;      // n, the squared radius
  double window_angle; // aperture in radians

  bool contains(long double ang_diff, const LatticePoint& a,
                const LatticePoint& b) const {
    const long double guard = 1e-12L;
    if (ang_diff <= window_angle - guard) return true;
    if (ang_diff >= window_angle + guard) return false;
    if (window_angle > kPi) return true;  // gray zone past pi: chord ambiguous
    long double chord2 =
        (long double)(a.x - b.x) * (a.x - b.x) + (long double)(a.y - b.y) * (a.y - b.y);
    long double s = std::sin((long double)window_angle / 2.0L);
    return chord2 <= 4.0L * lambda2 * s * s * (1.0L + 1e-12L);
  }
};

}  // namespace

int r2_count(long long n) {
  return static_cast<int>(lattice_circle_points(n).size());
}

ArcCountResult max_arc_count(const ArcQuery& q) {
  if (q.n < 1) throw std::domain_error("n must be positive");
  ArcCountResult out;
  auto pts = lattice_circle_points(q.n);
  out.total_points = static_cast<int>(pts.size());
  if (pts.empty()) return out;

  const double lambda = std::sqrt(static_cast<double>(q.n));
  const double arclength = std::pow(lambda, 1.0 + q.aperture_exp);
  const double angle = arclength / lambda;
  if (angle >= kTwoPi - 1e-12) {
    out.count = out.total_points;
    out.window_first = pts.front();
    out.window_last = pts.back();
    return out;
  }

  const std::size_t n = pts.size();
  std::vector<long double> ang(n);
  for (std::size_t i = 0; i < n; ++i)
    ang[i] = std::atan2((long double)pts[i].y, (long double)pts[i].x);
  for (std::size_t i = 0; i < n; ++i)
    if (ang[i] < 0) ang[i] += 2.0L * (long double)kPi;

  AngularWindow win{static_cast<double>(q.n), angle};
  std::size_t j = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (j < i) j = i;
    while (j + 1 < i + n) {
      std::size_t jn = (j + 1) % n;
      long double diff = (j + 1 < n ? ang[j + 1] : ang[jn] + 2.0L * (long double)kPi) - ang[i];
      if (!win.contains(diff, pts[i], pts[jn])) break;
      ++j;
    }
    int cnt = static_cast<int>(j - i + 1);
    if (cnt > out.count) {
      out.count = cnt;
      out.window_first = pts[i];
      out.window_last = pts[j % n];
    }
  }
  return out;
}

std::vector<ArcScanRow> cc_regime_scan(long long N, double delta) {
  if (N > 1000000) throw std::domain_error("scan guard: N <= 1e6");
  std::vector<ArcScanRow> table;
  if (N < 2) return table;

  // Smallest-prime-factor sieve classifies sum-of-two-squares n quickly.
  std::vector<int> spf(N + 1, 0);
  for (long long i = 2; i <= N; ++i) {
    if (spf[i] == 0)
      for (long long j = i; j <= N; j += i)
        if (spf[j] == 0) spf[j] = static_cast<int>(i);
  }
  auto two_squares = [&](long long n) {
    while (n > 1) {
      int p = spf[n];
      int e = 0;
      while (n % p == 0) {
        n /= p;
        ++e;
      }
      if (p % 4 == 3 && (e & 1)) return false;
    }
    return true;
  };

  int running = 0;
  for (long long n = 1; n <= N; ++n) {
    if (!two_squares(n)) continue;
    ArcCountResult r = max_arc_count({n, -0.5 - delta});
    if (r.total_points == 0) continue;
    running = std::max(running, r.count);
    table.push_back({n, r.total_points, r.count, running});
  }
  return table;
}

double zygmund_l4(const TorusEigenfunction& e) {
  if (e.coefficients.empty()) throw std::domain_error("no coefficients");
  double norm2 = 0.0;
  for (const auto& [pt, a] : e.coefficients) norm2 += std::norm(a);
  if (!(norm2 > 0.0)) throw std::domain_error("zero eigenfunction");
  const double inv = 1.0 / std::sqrt(norm2);

  std::map<std::pair<long long, long long>, cplx> conv;
  for (const auto& [p1, a1] : e.coefficients)
    for (const auto& [p2, a2] : e.coefficients)
      conv[{p1.x + p2.x, p1.y + p2.y}] += (a1 * inv) * (a2 * inv);
  double sum = 0.0;
  for (const auto& [s, c] : conv) sum += std::norm(c);
  return std::pow(sum, 0.25);
}

double torus_restriction(const TorusEigenfunction& e, const TorusLine& line,
                         int n_pts) {
  if (e.coefficients.empty()) throw std::domain_error("no coefficients");
  const double h = std::hypot((double)line.p, (double)line.q);
  const double L = line.length();
  // anchor point of the line: normal * offset
  const double x0 = -line.q / h * line.offset;
  const double y0 = line.p / h * line.offset;

  std::map<long long, cplx> restricted;  // projected integer frequency k
  for (const auto& [pt, a] : e.coefficients) {
    long long k = pt.x * line.p + pt.y * line.q;
    restricted[k] += a * std::polar(1.0 / kTwoPi, pt.x * x0 + pt.y * y0);
  }
  double sum = 0.0;
  for (const auto& [k, c] : restricted) sum += std::norm(c);
  double parseval = L * sum;

  if (n_pts > 0) {
    std::vector<std::array<double, 2>> pts(n_pts);
    for (int k = 0; k < n_pts; ++k) pts[k] = line.point(L * k / n_pts);
    auto vals = eval_torus_eigenfunction_at(e, pts);
    double trap = 0.0;
    for (const cplx& v : vals) trap += std::norm(v);
    trap *= L / n_pts;
    double scale = std::max(parseval, trap);
    if (scale > 0.0 && std::abs(parseval - trap) > 1e-8 * scale)
      throw std::logic_error("restriction cross-check failed: raise n_pts");
  }
  return parseval;
}

}  // namespace eigentube
