#include "ellip/sphharm.hpp"

#include <quadmath.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "ellip/arith.hpp"
#include "ellip/errors.hpp"

namespace ellip {

namespace {

i64 binom(i64 n, i64 k) {
  if (k < 0 || k > n || n < 0) return 0;
  if (k > n - k) k = n - k;
  i128 r = 1;
  for (i64 i = 1; i <= k; ++i) r = mul_checked(r, n - k + i) / i;
  if (r > (i128)std::numeric_limits<i64>::max()) fail(Errc::Overflow, "binomial out of range");
  return (i64)r;
}

// Homogeneous degree-deg multi-indices over r variables, first exponent
// descending; the fixed order makes every basis deterministic.
void gen_monomials(int r, int deg, int pos, std::vector<int>& cur,
                   std::vector<std::vector<int>>& out) {
  if (pos == r - 1) {
    cur[(size_t)pos] = deg;
    out.push_back(cur);
    return;
  }
  for (int e = deg; e >= 0; --e) {
    cur[(size_t)pos] = e;
    gen_monomials(r, deg - e, pos + 1, cur, out);
  }
}

std::vector<std::vector<int>> monomials(int r, int deg) {
  std::vector<std::vector<int>> out;
  if (deg < 0) return out;
  std::vector<int> cur((size_t)r, 0);
  gen_monomials(r, deg, 0, cur, out);
  return out;
}

i128 lcm_i128(i128 a, i128 b) { return mul_checked(a / gcd_i128(a, b), b); }

}  // namespace

i64 dim_harmonic(int d, int nu) {
  if (d < 2 || nu < 0) fail(Errc::UsageError, "need d >= 2 and nu >= 0");
  return binom(d + nu, nu) - binom(d - 2 + nu, nu - 2);
}

double gegenbauer(int nu, double lambda, double t) {
  if (lambda <= 0.0) fail(Errc::UsageError, "Gegenbauer index must be positive");
  if (nu < 0) fail(Errc::UsageError, "degree must be non-negative");
  if (nu == 0) return 1.0;
  double prev = 1.0;
  double cur = 2.0 * lambda * t;
  for (int n = 2; n <= nu; ++n) {
    double next = (2.0 * t * ((double)n - 1.0 + lambda) * cur -
                   ((double)n - 2.0 + 2.0 * lambda) * prev) /
                  (double)n;
    prev = cur;
    cur = next;
  }
  return cur;
}

double zonal(const ZonalSpec& spec, const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  if (spec.d < 2 || spec.nu < 0) fail(Errc::UsageError, "invalid zonal parameters");
  if (x.size() != spec.d + 1 || y.size() != spec.d + 1)
    fail(Errc::LengthMismatch, "vectors must live in R^{d+1}");
  if (std::abs(x.norm() - 1.0) > 1e-9 || std::abs(y.norm() - 1.0) > 1e-9)
    fail(Errc::UsageError, "unit vectors required");
  double lambda = ((double)spec.d - 1.0) / 2.0;
  double t = std::clamp(x.dot(y), -1.0, 1.0);
  double c1 = gegenbauer(spec.nu, lambda, 1.0);
  if (std::abs(c1) < 1e-300) fail(Errc::DegenerateGegenbauer, "vanishing normalization");
  return (double)dim_harmonic(spec.d, spec.nu) * gegenbauer(spec.nu, lambda, t) / c1;
}

Rat HarmonicPoly::eval_integer(const VecZ& m) const {
  if ((int)m.size() != r) fail(Errc::LengthMismatch, "point dimension mismatch");
  Rat acc(0);
  for (const auto& [alpha, coef] : terms) {
    i128 p = 1;
    for (int i = 0; i < r; ++i)
      for (int e = 0; e < alpha[(size_t)i]; ++e) p = mul_checked(p, (i128)m(i));
    acc = acc + coef * Rat(p);
  }
  return acc;
}

double HarmonicPoly::eval_real(const Eigen::VectorXd& x) const {
  if ((int)x.size() != r) fail(Errc::LengthMismatch, "point dimension mismatch");
  double acc = 0.0;
  for (const auto& [alpha, coef] : terms) {
    double p = coef.to_double();
    for (int i = 0; i < r; ++i)
      for (int e = 0; e < alpha[(size_t)i]; ++e) p *= x(i);
    acc += p;
  }
  return acc;
}

HarmonicPoly constant_poly(int r) {
  HarmonicPoly p;
  p.r = r;
  p.degree = 0;
  p.terms.push_back({std::vector<int>((size_t)r, 0), Rat(1)});
  return p;
}

std::vector<HarmonicPoly> harmonic_basis(const QuadraticForm& form, int nu) {
  if (nu < 0) fail(Errc::UsageError, "degree must be non-negative");
  int r = form.r;
  auto cols = monomials(r, nu);
  auto rows = monomials(r, nu - 2);
  std::map<std::vector<int>, int> row_index;
  for (size_t i = 0; i < rows.size(); ++i) row_index[rows[i]] = (int)i;

  size_t R = rows.size(), N = cols.size();
  std::vector<std::vector<Rat>> mat(R, std::vector<Rat>(N, Rat(0)));
  for (size_t c = 0; c < N; ++c) {
    const auto& alpha = cols[c];
    for (int i = 0; i < r; ++i) {
      if (alpha[(size_t)i] >= 2) {
        auto target = alpha;
        target[(size_t)i] -= 2;
        i128 coef = mul_checked((i128)form.adjugate(i, i),
                                (i128)alpha[(size_t)i] * (alpha[(size_t)i] - 1));
        mat[(size_t)row_index.at(target)][c] = mat[(size_t)row_index.at(target)][c] + Rat(coef);
      }
      for (int j = i + 1; j < r; ++j) {
        if (alpha[(size_t)i] >= 1 && alpha[(size_t)j] >= 1) {
          auto target = alpha;
          target[(size_t)i] -= 1;
          target[(size_t)j] -= 1;
          i128 coef = mul_checked(mul_checked((i128)2, (i128)form.adjugate(i, j)),
                                  (i128)alpha[(size_t)i] * alpha[(size_t)j]);
          mat[(size_t)row_index.at(target)][c] =
              mat[(size_t)row_index.at(target)][c] + Rat(coef);
        }
      }
    }
  }

  // Reduced row echelon form over exact rationals.
  std::vector<int> pivot_col;
  size_t prow = 0;
  for (size_t c = 0; c < N && prow < R; ++c) {
    size_t sel = prow;
    while (sel < R && mat[sel][c].is_zero()) ++sel;
    if (sel == R) continue;
    std::swap(mat[prow], mat[sel]);
    Rat inv = Rat(1) / mat[prow][c];
    for (size_t k = c; k < N; ++k) mat[prow][k] = mat[prow][k] * inv;
    for (size_t i = 0; i < R; ++i) {
      if (i == prow || mat[i][c].is_zero()) continue;
      Rat f = mat[i][c];
      for (size_t k = c; k < N; ++k) mat[i][k] = mat[i][k] - f * mat[prow][k];
    }
    pivot_col.push_back((int)c);
    ++prow;
  }

  std::vector<HarmonicPoly> basis;
  std::vector<bool> is_pivot(N, false);
  for (int c : pivot_col) is_pivot[(size_t)c] = true;
  for (size_t f = 0; f < N; ++f) {
    if (is_pivot[f]) continue;
    std::vector<Rat> v(N, Rat(0));
    v[f] = Rat(1);
    for (size_t p = 0; p < pivot_col.size(); ++p)
      v[(size_t)pivot_col[p]] = Rat(0) - mat[p][f];

    i128 den_lcm = 1;
    for (const Rat& x : v)
      if (!x.is_zero()) den_lcm = lcm_i128(den_lcm, x.den());
    i128 g = 0;
    std::vector<i128> scaled(N, 0);
    for (size_t c = 0; c < N; ++c) {
      if (v[c].is_zero()) continue;
      scaled[c] = mul_checked(v[c].num(), den_lcm / v[c].den());
      g = gcd_i128(g, scaled[c]);
    }
    i128 sign = 0;
    for (size_t c = 0; c < N && sign == 0; ++c)
      if (scaled[c] != 0) sign = scaled[c] > 0 ? 1 : -1;

    HarmonicPoly poly;
    poly.r = r;
    poly.degree = nu;
    for (size_t c = 0; c < N; ++c)
      if (scaled[c] != 0) poly.terms.push_back({cols[c], Rat(sign * scaled[c] / g)});
    basis.push_back(std::move(poly));
  }

  if ((i64)basis.size() != dim_harmonic(r - 1, nu))
    fail(Errc::MismatchDetected, "harmonic nullspace dimension disagrees with the binomial formula");
  return basis;
}

// ---- theta coefficients and Weyl sums ---------------------------------------

namespace {

// P rescaled to integer coefficients: P = (1/den) * sum coef * x^alpha.
struct IntPoly {
  int r = 0;
  int nterms = 0;
  int exps[64][16] = {};
  i128 coefs[64] = {};
  i128 den = 1;

  i128 eval(const i64* m) const {
    i128 acc = 0;
    for (int t = 0; t < nterms; ++t) {
      i128 p = coefs[t];
      for (int i = 0; i < r; ++i)
        for (int e = 0; e < exps[t][i]; ++e) p = mul_checked(p, (i128)m[i]);
      acc = add_checked(acc, p);
    }
    return acc;
  }
};

IntPoly scale_to_integer(const HarmonicPoly& P) {
  if (P.terms.size() > 64) fail(Errc::UsageError, "polynomial has too many terms");
  if (P.r > 16) fail(Errc::UsageError, "too many variables");
  IntPoly out;
  out.r = P.r;
  out.nterms = (int)P.terms.size();
  i128 den_lcm = 1;
  for (const auto& [alpha, coef] : P.terms) den_lcm = lcm_i128(den_lcm, coef.den());
  out.den = den_lcm;
  for (int t = 0; t < out.nterms; ++t) {
    const auto& [alpha, coef] = P.terms[(size_t)t];
    for (int i = 0; i < P.r; ++i) out.exps[t][i] = alpha[(size_t)i];
    out.coefs[t] = mul_checked(coef.num(), den_lcm / coef.den());
  }
  return out;
}

i64 gcd_with_height(i64 n, const i64* m, int r) {
  i64 g = n;
  for (int i = 0; i < r && g != 1; ++i) g = std::gcd(g, m[i] < 0 ? -m[i] : m[i]);
  return g;
}

}  // namespace

Rat theta_coeff(const QuadraticForm& form, const HarmonicPoly& P, i64 n) {
  if (n < 0) fail(Errc::UsageError, "theta index must be non-negative");
  Rat acc(0);
  for (const VecZ& m : representations(form, n)) acc = acc + P.eval_integer(m);
  return acc;
}

std::vector<Rat> theta_table(const QuadraticForm& form, const HarmonicPoly& P, i64 kmax) {
  if (kmax < 0) fail(Errc::UsageError, "theta range must be non-negative");
  IntPoly ip = scale_to_integer(P);
  SphereMap sm = sphere_map(form);
  std::vector<i128> acc((size_t)kmax + 1, 0);
  bool halve = P.degree % 2 == 0;
  auto visit = [&](const i64* m, i64 q, i64 w) {
    if (q > kmax) return;
    acc[(size_t)q] = add_checked(acc[(size_t)q], mul_checked((i128)w, ip.eval(m)));
  };
  enumerate_ball(form, sm.B, kmax, halve, visit);
  std::vector<Rat> out;
  out.reserve((size_t)kmax + 1);
  for (i64 k = 0; k <= kmax; ++k) out.emplace_back(acc[(size_t)k], ip.den);
  return out;
}

std::vector<WeylRecord> weyl_sums(const QuadraticForm& form, const HarmonicPoly& P, i64 nmax) {
  if (nmax < 1) fail(Errc::UsageError, "height range must be positive");
  if (nmax > 100000) fail(Errc::UsageError, "height range too large");
  IntPoly ip = scale_to_integer(P);
  SphereMap sm = sphere_map(form);
  i64 bound = nmax * nmax;

  std::vector<int32_t> sq((size_t)bound + 1, -1);
  for (i64 n = 0; n <= nmax; ++n) sq[(size_t)(n * n)] = (int32_t)n;

  std::vector<i128> theta_acc((size_t)bound + 1, 0);
  std::vector<i128> omega_acc((size_t)nmax + 1, 0);
  bool halve = P.degree % 2 == 0;
  auto visit = [&](const i64* m, i64 q, i64 w) {
    if (q > bound) return;
    i128 val = mul_checked((i128)w, ip.eval(m));
    theta_acc[(size_t)q] = add_checked(theta_acc[(size_t)q], val);
    int32_t n = sq[(size_t)q];
    if (n > 0 && gcd_with_height(n, m, form.r) == 1)
      omega_acc[(size_t)n] = add_checked(omega_acc[(size_t)n], val);
  };
  enumerate_ball(form, sm.B, bound, halve, visit);

  std::vector<WeylRecord> out;
  out.reserve((size_t)nmax);
  for (i64 n = 1; n <= nmax; ++n) {
    i128 mob = 0;
    for (i64 d : divisors(n)) {
      int mu = mobius(d);
      if (mu == 0) continue;
      i64 q = (n / d) * (n / d);
      mob = add_checked(mob, mul_checked((i128)mu * pow_checked(d, P.degree),
                                         theta_acc[(size_t)q]));
    }
    i128 scale = mul_checked(ip.den, pow_checked(n, P.degree));
    Rat direct(omega_acc[(size_t)n], scale);
    Rat mobius_side(mob, scale);
    if (!(direct == mobius_side))
      fail(Errc::MismatchDetected,
           "direct and Moebius-theta Weyl sums disagree at height " + std::to_string(n));
    out.push_back({n, direct, mobius_side});
  }
  return out;
}

Rat weyl_sum(const QuadraticForm& form, const HarmonicPoly& P, i64 n) {
  if (n < 1) fail(Errc::UsageError, "height must be positive");
  return weyl_sums(form, P, n).back().direct;
}

// ---- quad-precision spectral projection on S^2 -------------------------------

namespace {

struct QVec {
  f128 x, y, z;
};

f128 qdot(const QVec& a, const QVec& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

// Legendre P_nu(t) in 128-bit floating point.
f128 legendre_q(int nu, f128 t) {
  if (nu == 0) return 1;
  f128 prev = 1, cur = t;
  for (int n = 2; n <= nu; ++n) {
    f128 next = ((2 * n - 1) * t * cur - (n - 1) * prev) / n;
    prev = cur;
    cur = next;
  }
  return cur;
}

// Gauss-Legendre nodes and weights on [-1,1], Newton-refined in 128-bit.
void gauss_legendre(int n, std::vector<f128>& xs, std::vector<f128>& ws) {
  xs.assign((size_t)n, 0);
  ws.assign((size_t)n, 0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    f128 x = cosq(M_PIq * (i + 0.75Q) / (n + 0.5Q));
    f128 dp = 0;
    for (int iter = 0; iter < 8; ++iter) {
      f128 p0 = 1, p1 = x;
      for (int k = 2; k <= n; ++k) {
        f128 p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1);
      x -= p1 / dp;
    }
    f128 w = 2 / ((1 - x * x) * dp * dp);
    xs[(size_t)i] = -x;
    ws[(size_t)i] = w;
    xs[(size_t)(n - 1 - i)] = x;
    ws[(size_t)(n - 1 - i)] = w;
  }
}

std::vector<QVec> fibonacci_grid_q(int K) {
  std::vector<QVec> pts;
  pts.reserve((size_t)K);
  f128 golden = M_PIq * (3 - sqrtq(5.0Q));
  for (int i = 0; i < K; ++i) {
    f128 z = 1 - (2 * i + 1) / (f128)K;
    f128 rho = sqrtq(1 - z * z);
    f128 phi = golden * i;
    pts.push_back({rho * cosq(phi), rho * sinq(phi), z});
  }
  return pts;
}

struct QuadratureNodes {
  std::vector<QVec> pos;
  std::vector<f128> wgt;  // includes the normalized-measure factor
};

QuadratureNodes product_nodes(int n_polar, int n_azimuth) {
  std::vector<f128> gx, gw;
  gauss_legendre(n_polar, gx, gw);
  QuadratureNodes nodes;
  nodes.pos.reserve((size_t)n_polar * n_azimuth);
  nodes.wgt.reserve((size_t)n_polar * n_azimuth);
  for (int i = 0; i < n_polar; ++i) {
    f128 z = gx[(size_t)i];
    f128 rho = sqrtq(1 - z * z);
    f128 w = gw[(size_t)i] / (2 * n_azimuth);  // dmu = du dphi / (4 pi)
    for (int k = 0; k < n_azimuth; ++k) {
      f128 phi = 2 * M_PIq * k / n_azimuth;
      nodes.pos.push_back({rho * cosq(phi), rho * sinq(phi), z});
      nodes.wgt.push_back(w);
    }
  }
  return nodes;
}

std::vector<f128> project_on_grid(const QuadratureNodes& nodes, const std::vector<f128>& fvals,
                                  const std::vector<QVec>& grid, int nu) {
  f128 zfac = 2 * nu + 1;  // Z_nu = (2 nu + 1) P_nu on S^2
  std::vector<f128> out;
  out.reserve(grid.size());
  for (const QVec& x : grid) {
    f128 acc = 0;
    for (size_t j = 0; j < nodes.pos.size(); ++j)
      acc += nodes.wgt[j] * fvals[j] * legendre_q(nu, qdot(x, nodes.pos[j]));
    out.push_back(zfac * acc);
  }
  return out;
}

}  // namespace

std::vector<Eigen::Vector3d> spectral_test_grid() {
  std::vector<Eigen::Vector3d> out;
  for (const QVec& p : fibonacci_grid_q(100))
    out.emplace_back((double)p.x, (double)p.y, (double)p.z);
  return out;
}

SpectralResult spectral_project(const std::function<f128(f128, f128, f128)>& F, int nu,
                                int n_polar, int n_azimuth) {
  if (nu < 0 || nu > 64) fail(Errc::UsageError, "degree out of supported range");
  if (n_polar < 4 || n_azimuth < 4) fail(Errc::GridTooCoarse, "quadrature grid too small");
  QuadratureNodes nodes = product_nodes(n_polar, n_azimuth);
  std::vector<QVec> grid = fibonacci_grid_q(100);

  // Built-in validation: a degree-nu zonal harmonic must reproduce itself.
  QVec pole{1.0Q / 3, 2.0Q / 3, 2.0Q / 3};
  std::vector<f128> gvals;
  gvals.reserve(nodes.pos.size());
  for (const QVec& y : nodes.pos)
    gvals.push_back((2 * nu + 1) * legendre_q(nu, qdot(y, pole)));
  std::vector<f128> gproj = project_on_grid(nodes, gvals, grid, nu);
  f128 resid = 0;
  for (size_t i = 0; i < grid.size(); ++i) {
    f128 diff = gproj[i] - (2 * nu + 1) * legendre_q(nu, qdot(grid[i], pole));
    if (diff < 0) diff = -diff;
    if (diff > resid) resid = diff;
  }
  if ((double)resid > 1e-6)
    fail(Errc::GridTooCoarse, "zonal self-reproduction failed at the requested resolution");

  std::vector<f128> fvals;
  fvals.reserve(nodes.pos.size());
  for (const QVec& y : nodes.pos) fvals.push_back(F(y.x, y.y, y.z));
  std::vector<f128> proj = project_on_grid(nodes, fvals, grid, nu);

  SpectralResult res;
  res.self_check_residual = (double)resid;
  res.values.reserve(grid.size());
  f128 sup = 0;
  for (f128 v : proj) {
    res.values.push_back((double)v);
    f128 a = v < 0 ? -v : v;
    if (a > sup) sup = a;
  }
  res.sup_norm = (double)sup;
  return res;
}

}  // namespace ellip
