#include "ellip/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "ellip/errors.hpp"

namespace ellip {

namespace {

// Adaptive Simpson with an absolute tolerance.
double simpson(double fa, double fm, double fb, double a, double b) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

template <class F>
double adaptive_simpson(const F& f, double a, double m, double b, double fa, double fm,
                        double fb, double whole, double tol, int depth) {
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double left = simpson(fa, flm, fm, a, m);
  double right = simpson(fm, frm, fb, m, b);
  if (depth <= 0) fail(Errc::QuadratureNonConvergence, "adaptive quadrature depth exhausted");
  if (std::abs(left + right - whole) <= 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return adaptive_simpson(f, a, lm, m, fa, flm, fm, left, tol * 0.5, depth - 1) +
         adaptive_simpson(f, m, rm, b, fm, frm, fb, right, tol * 0.5, depth - 1);
}

template <class F>
double integrate(const F& f, double a, double b, double tol) {
  double m = 0.5 * (a + b);
  double fa = f(a), fm = f(m), fb = f(b);
  return adaptive_simpson(f, a, m, b, fa, fm, fb, simpson(fa, fm, fb, a, b), tol, 48);
}

double sin_power_integral(int d, double theta) {
  auto f = [d](double t) { return std::pow(std::sin(t), (double)(d - 1)); };
  return integrate(f, 0.0, theta, 1e-12);
}

// Deterministic portable generator for cap centers off S^2 (xorshift + inverse
// transform via Box-Muller on explicitly generated uniforms).
struct DetRng {
  u64 state = 0x9e3779b97f4a7c15ULL;
  double uniform() {
    state ^= state << 13;
    state ^= state >> 7;
    state ^= state << 17;
    return (double)(state >> 11) * (1.0 / 9007199254740992.0);
  }
  double gauss() {
    double u1 = std::max(uniform(), 1e-300);
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }
};

}  // namespace

double cap_measure(int d, double theta) {
  if (d < 2) fail(Errc::UsageError, "sphere dimension must be at least 2");
  if (!(theta > 0.0) || theta > M_PI + 1e-12)
    fail(Errc::UsageError, "cap angle must lie in (0, pi]");
  theta = std::min(theta, M_PI);
  return sin_power_integral(d, theta) / sin_power_integral(d, M_PI);
}

std::vector<CapSpec> default_cap_family(int d) {
  if (d < 2) fail(Errc::UsageError, "sphere dimension must be at least 2");
  const double angles[3] = {M_PI / 6.0, M_PI / 3.0, M_PI / 2.0};
  std::vector<CapSpec> caps;
  caps.reserve(100);
  if (d == 2) {
    double golden = M_PI * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < 100; ++i) {
      double z = 1.0 - (2.0 * i + 1.0) / 100.0;
      double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
      double phi = golden * (double)i;
      Eigen::VectorXd c(3);
      c << rho * std::cos(phi), rho * std::sin(phi), z;
      caps.push_back({c, angles[i % 3]});
    }
    return caps;
  }
  DetRng rng;
  for (int i = 0; i < 100; ++i) {
    Eigen::VectorXd c(d + 1);
    do {
      for (int k = 0; k <= d; ++k) c(k) = rng.gauss();
    } while (c.norm() < 1e-6);
    c.normalize();
    caps.push_back({c, angles[i % 3]});
  }
  return caps;
}

std::vector<Eigen::VectorXd> map_points_to_sphere(const QuadraticForm& form,
                                                  const std::vector<RationalPoint>& points) {
  SphereMap sm = sphere_map(form);
  std::vector<Eigen::VectorXd> out;
  out.reserve(points.size());
  for (const RationalPoint& p : points) {
    Eigen::VectorXd v = sm.B * p.m.cast<double>() / (double)p.n;
    double nn = v.norm();
    if (std::abs(nn - 1.0) > 1e-9)
      fail(Errc::MismatchDetected, "point fails the unit-norm identity Q(m) = n^2");
    out.push_back(v / nn);
  }
  return out;
}

double discrepancy(const std::vector<Eigen::VectorXd>& points,
                   const std::vector<CapSpec>& caps) {
  if (points.empty()) fail(Errc::EmptyPointSet, "no points to test");
  if (caps.empty()) fail(Errc::EmptyPointSet, "no caps to test against");
  int d = (int)points.front().size() - 1;
  std::map<double, double> measure_cache;
  double worst = 0.0;
  for (const CapSpec& cap : caps) {
    if (std::abs(cap.center.norm() - 1.0) > 1e-9)
      fail(Errc::UsageError, "cap center must be a unit vector");
    double cosang = std::cos(cap.angle);
    i64 inside = 0;
    for (const auto& p : points)
      if (p.dot(cap.center) >= cosang) ++inside;
    auto it = measure_cache.find(cap.angle);
    if (it == measure_cache.end())
      it = measure_cache.emplace(cap.angle, cap_measure(d, cap.angle)).first;
    double dev = std::abs((double)inside / (double)points.size() - it->second);
    worst = std::max(worst, dev);
  }
  return worst;
}

FitResult fit_power_law(const std::vector<std::pair<double, double>>& pairs) {
  if (pairs.size() < 5) fail(Errc::UsageError, "power-law fit needs at least 5 points");
  double x0 = std::log(pairs.front().first);
  bool all_equal = true;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [T, count] : pairs) {
    if (!(T > 0.0) || !(count > 0.0))
      fail(Errc::DegenerateData, "fit requires positive abscissae and counts");
    double x = std::log(T), y = std::log(count);
    if (std::abs(x - x0) > 1e-12) all_equal = false;
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  if (all_equal) fail(Errc::DegenerateData, "all abscissae coincide");
  double n = (double)pairs.size();
  double denom = n * sxx - sx * sx;
  FitResult res;
  res.exponent = (n * sxy - sx * sy) / denom;
  res.log_constant = (sy - res.exponent * sx) / n;
  for (const auto& [T, count] : pairs) {
    double r = std::log(count) - (res.exponent * std::log(T) + res.log_constant);
    res.max_abs_residual = std::max(res.max_abs_residual, std::abs(r));
  }
  return res;
}

// ---- truncated Perron integral ----------------------------------------------

namespace {

// 7-15 Gauss-Kronrod pair (QUADPACK dqk15 constants).
constexpr double kXgk[8] = {0.9914553711208126, 0.9491079123427585, 0.8648644233597691,
                            0.7415311855993944, 0.5860872354676911, 0.4058451513773972,
                            0.2077849550078985, 0.0};
constexpr double kWgk[8] = {0.0229353220105292, 0.0630920926299785, 0.1047900103222502,
                            0.1406532597155259, 0.1690047266392679, 0.1903505780647854,
                            0.2044329400752989, 0.2094821410847278};
constexpr double kWg[4] = {0.1294849661688697, 0.2797053914892767, 0.3818300505051189,
                           0.4179591836734694};

struct PerronIntegrand {
  std::vector<double> coef;  // a(n) n^{-beta}, real coefficients
  std::vector<double> logn;
  double beta;
  double logT;

  // Rhat(beta+it) T^{beta+it} / (beta+it), as a function of t.
  cplx operator()(double t) const {
    double sr = 0, si = 0, cr = 0, ci = 0;  // compensated real/imag sums
    for (size_t i = 0; i < coef.size(); ++i) {
      double ph = -t * logn[i];
      double tr = coef[i] * std::cos(ph), ti = coef[i] * std::sin(ph);
      double yr = tr - cr, yi = ti - ci;
      double nr = sr + yr, ni = si + yi;
      cr = (nr - sr) - yr;
      ci = (ni - si) - yi;
      sr = nr;
      si = ni;
    }
    cplx rhat(sr, si);
    cplx s(beta, t);
    cplx Ts = std::exp(s * logT);
    return rhat * Ts / s;
  }
};

struct GkResult {
  cplx value;
  double error;
};

GkResult gk15(const PerronIntegrand& f, double a, double b) {
  double c = 0.5 * (a + b), h = 0.5 * (b - a);
  cplx fc = f(c);
  cplx kron = kWgk[7] * fc;
  cplx gauss = kWg[3] * fc;
  for (int i = 0; i < 7; ++i) {
    cplx f1 = f(c - h * kXgk[i]);
    cplx f2 = f(c + h * kXgk[i]);
    kron += kWgk[i] * (f1 + f2);
    if (i % 2 == 1) gauss += kWg[i / 2] * (f1 + f2);
  }
  kron *= h;
  gauss *= h;
  return {kron, std::abs(kron - gauss)};
}

cplx adapt_panel(const PerronIntegrand& f, double a, double b, double tol, int depth) {
  GkResult r = gk15(f, a, b);
  if (r.error <= tol || b - a < 1e-12) return r.value;
  if (depth <= 0)
    fail(Errc::QuadratureNonConvergence, "Perron quadrature failed to converge");
  double m = 0.5 * (a + b);
  return adapt_panel(f, a, m, 0.5 * tol, depth - 1) +
         adapt_panel(f, m, b, 0.5 * tol, depth - 1);
}

}  // namespace

cplx perron_truncated(const CoeffSeq& rq, double T, double beta, double H,
                      double* tail_estimate) {
  double frac = T - std::floor(T);
  if (std::abs(frac - 0.5) > 1e-9)
    fail(Errc::UsageError, "T must be a half-integer to keep jump points off the cut");
  if (H <= 1.0) fail(Errc::UsageError, "H must exceed the panel split at 1");
  if (beta <= 1.0) fail(Errc::UsageError, "beta must exceed the abscissa of convergence");

  PerronIntegrand f;
  f.beta = beta;
  f.logT = std::log(T);
  f.coef.reserve((size_t)rq.M);
  f.logn.reserve((size_t)rq.M);
  for (i64 n = 1; n <= rq.M; ++n) {
    double an = rq.a[(size_t)n].real();
    if (an == 0.0) continue;
    f.coef.push_back(an * std::pow((double)n, -beta));
    f.logn.push_back(std::log((double)n));
  }

  cplx total = adapt_panel(f, -H, -1.0, 1e-8, 60);
  total += adapt_panel(f, -1.0, 1.0, 1e-8, 60);
  total += adapt_panel(f, 1.0, H, 1e-8, 60);
  total /= 2.0 * M_PI;

  if (tail_estimate) {
    // Coefficient tail beyond M, from the empirical growth |Omega_n| <= C n^{d-1}
    // visible in the data itself, integrated against the 1/(H log(n/T)) decay of
    // the truncated Perron kernel.
    std::vector<std::pair<double, double>> growth;
    for (i64 n = std::max<i64>(1, rq.M / 2); n <= rq.M; ++n)
      if (rq.a[(size_t)n].real() > 0.0) growth.push_back({(double)n, rq.a[(size_t)n].real()});
    double p = 1.0;
    if (growth.size() >= 5) p = fit_power_law(growth).exponent;
    p = std::clamp(p, 0.0, beta - 1.01);
    double C = 0.0;
    for (const auto& [n, an] : growth) C = std::max(C, an / std::pow(n, p));
    double M = (double)rq.M;
    double tail_sum = C * std::pow(T, beta) * std::pow(M, p + 1.0 - beta) / (beta - p - 1.0);
    *tail_estimate = tail_sum / (H * std::max(std::log(M / T), 0.5));
  }
  return total;
}

cplx perron_truncated(const QuadraticForm& form, double T, double beta, double H, i64 M,
                      double* tail_estimate) {
  if (beta <= (double)(form.r - 1))
    fail(Errc::UsageError, "beta must exceed the abscissa of absolute convergence");
  CoeffSeq rq = build_RQ(form, M);
  return perron_truncated(rq, T, beta, H, tail_estimate);
}

RateReport rate_report(const QuadraticForm& form, const std::vector<i64>& heights,
                       const std::vector<i64>& Ts, const std::vector<CapSpec>& caps) {
  RateReport report;
  int d = form.r - 1;
  report.thm_cap_exponent = -((double)d - 1.0) / (2.0 * d + 3.0);
  report.thm_point_exponent = -(double)d / (2.0 * d + 2.0);

  i64 nmax = 0;
  for (i64 n : heights) nmax = std::max(nmax, n);
  for (i64 T : Ts) nmax = std::max(nmax, T);
  if (nmax < 1) fail(Errc::UsageError, "no heights requested");

  // One traversal: collect unit vectors per square shell under the gcd filter.
  SphereMap sm = sphere_map(form);
  i64 bound = nmax * nmax;
  std::vector<int32_t> sq((size_t)bound + 1, -1);
  for (i64 n = 0; n <= nmax; ++n) sq[(size_t)(n * n)] = (int32_t)n;
  std::vector<std::vector<Eigen::VectorXd>> shell((size_t)nmax + 1);
  auto visit = [&](const i64* m, i64 q, i64) {
    if (q > bound) return;
    int32_t n = sq[(size_t)q];
    if (n <= 0) return;
    i64 g = n;
    for (int i = 0; i < form.r && g != 1; ++i) g = std::gcd(g, m[i] < 0 ? -m[i] : m[i]);
    if (g != 1) return;
    Eigen::VectorXd v(form.r);
    for (int i = 0; i < form.r; ++i) v(i) = (double)m[i];
    v = sm.B * v / (double)n;
    shell[(size_t)n].push_back(v / v.norm());
  };
  enumerate_ball(form, sm.B, bound, false, visit);

  std::vector<std::pair<double, double>> n_pairs;
  for (i64 n : heights) {
    if (std::gcd(n, form.level) != 1) continue;
    const auto& pts = shell[(size_t)n];
    RateRow row{n, (i64)pts.size(), std::numeric_limits<double>::quiet_NaN()};
    if (!pts.empty()) {
      row.discrepancy = discrepancy(pts, caps);
      n_pairs.push_back({(double)n, row.discrepancy});
    }
    report.per_n.push_back(row);
  }
  if (n_pairs.size() >= 5) report.per_n_fit = fit_power_law(n_pairs);

  std::vector<i64> ts_sorted = Ts;
  std::sort(ts_sorted.begin(), ts_sorted.end());
  std::vector<Eigen::VectorXd> cumulative;
  i64 next_n = 1;
  std::vector<std::pair<double, double>> t_pairs;
  for (i64 T : ts_sorted) {
    for (; next_n <= T; ++next_n)
      cumulative.insert(cumulative.end(), shell[(size_t)next_n].begin(),
                        shell[(size_t)next_n].end());
    RateRow row{T, (i64)cumulative.size(), std::numeric_limits<double>::quiet_NaN()};
    if (!cumulative.empty()) {
      row.discrepancy = discrepancy(cumulative, caps);
      t_pairs.push_back({(double)T, row.discrepancy});
    }
    report.per_T.push_back(row);
  }
  if (t_pairs.size() >= 5) report.per_T_fit = fit_power_law(t_pairs);
  return report;
}

}  // namespace ellip
