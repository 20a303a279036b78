#include "ellip/dseries.hpp"

#include <cmath>

#include "ellip/errors.hpp"

namespace ellip {

namespace {

double to_d(i128 v) { return (double)v; }

void mirror(CoeffSeq& s) {
  for (i64 n = 0; n <= s.M; ++n) s.a[(size_t)n] = cplx(to_d((*s.exact)[(size_t)n]), 0.0);
}

void check_M(i64 M) {
  if (M < 1) fail(Errc::UsageError, "truncation length must be positive");
  if (M > 2000000) fail(Errc::UsageError, "truncation length too large");
}

}  // namespace

CoeffSeq zero_seq(i64 M) {
  check_M(M);
  CoeffSeq s;
  s.M = M;
  s.a.assign((size_t)M + 1, cplx(0, 0));
  s.exact = std::vector<i128>((size_t)M + 1, 0);
  return s;
}

CoeffSeq unit_seq(i64 M) {
  CoeffSeq s = zero_seq(M);
  s.a[1] = 1.0;
  (*s.exact)[1] = 1;
  return s;
}

CoeffSeq ones_seq(i64 M) {
  CoeffSeq s = zero_seq(M);
  for (i64 n = 1; n <= M; ++n) {
    s.a[(size_t)n] = 1.0;
    (*s.exact)[(size_t)n] = 1;
  }
  return s;
}

CoeffSeq dirichlet_convolve(const CoeffSeq& a, const CoeffSeq& b) {
  if (a.M != b.M) fail(Errc::LengthMismatch, "convolution needs equal truncation lengths");
  i64 M = a.M;
  CoeffSeq c = zero_seq(M);
  if (a.is_exact() && b.is_exact()) {
    const auto& ae = *a.exact;
    const auto& be = *b.exact;
    auto& ce = *c.exact;
    for (i64 d = 1; d <= M; ++d) {
      if (ae[(size_t)d] == 0) continue;
      for (i64 e = 1; d * e <= M; ++e)
        ce[(size_t)(d * e)] =
            add_checked(ce[(size_t)(d * e)], mul_checked(ae[(size_t)d], be[(size_t)e]));
    }
    mirror(c);
    return c;
  }
  c.exact.reset();
  for (i64 d = 1; d <= M; ++d) {
    if (a.a[(size_t)d] == cplx(0, 0)) continue;
    for (i64 e = 1; d * e <= M; ++e) c.a[(size_t)(d * e)] += a.a[(size_t)d] * b.a[(size_t)e];
  }
  return c;
}

CoeffSeq dirichlet_inverse(const CoeffSeq& a) {
  i64 M = a.M;
  check_M(M);
  CoeffSeq b = zero_seq(M);
  if (a.is_exact()) {
    i128 a1 = (*a.exact)[1];
    if (a1 == 1 || a1 == -1) {
      const auto& ae = *a.exact;
      auto& be = *b.exact;
      std::vector<i128> acc((size_t)M + 1, 0);
      for (i64 n = 1; n <= M; ++n) {
        be[(size_t)n] = (n == 1) ? a1 : mul_checked(-a1, acc[(size_t)n]);
        if (be[(size_t)n] == 0) continue;
        for (i64 k = 2; n * k <= M; ++k)
          acc[(size_t)(n * k)] =
              add_checked(acc[(size_t)(n * k)], mul_checked(be[(size_t)n], ae[(size_t)k]));
      }
      mirror(b);
      return b;
    }
    if (a1 == 0) fail(Errc::NonInvertible, "leading coefficient is zero");
  }
  cplx a1 = a.a[1];
  if (std::abs(a1) < 1e-14) fail(Errc::NonInvertible, "leading coefficient is zero");
  b.exact.reset();
  std::vector<cplx> acc((size_t)M + 1, cplx(0, 0));
  for (i64 n = 1; n <= M; ++n) {
    b.a[(size_t)n] = (n == 1) ? 1.0 / a1 : -acc[(size_t)n] / a1;
    if (b.a[(size_t)n] == cplx(0, 0)) continue;
    for (i64 k = 2; n * k <= M; ++k) acc[(size_t)(n * k)] += b.a[(size_t)n] * a.a[(size_t)k];
  }
  return b;
}

CoeffSeq lseries_coeffs(const Character& chi, int shift, i64 M) {
  check_M(M);
  if (shift < 0) fail(Errc::UsageError, "shift must be non-negative");
  CoeffSeq s = zero_seq(M);
  if (chi.is_real()) {
    auto& se = *s.exact;
    for (i64 n = 1; n <= M; ++n)
      se[(size_t)n] = mul_checked((i128)chi.exact_at(n), pow_checked(n, shift));
    mirror(s);
    return s;
  }
  s.exact.reset();
  for (i64 n = 1; n <= M; ++n) s.a[(size_t)n] = chi(n) * std::pow((double)n, (double)shift);
  return s;
}

CoeffSeq square_embed(const CoeffSeq& c, i64 M_out) {
  check_M(M_out);
  CoeffSeq b = zero_seq(M_out);
  if (!c.is_exact()) b.exact.reset();
  for (i64 m = 1; m * m <= M_out; ++m) {
    if (m > c.M) fail(Errc::LengthMismatch, "square embedding needs c up to sqrt(M_out)");
    b.a[(size_t)(m * m)] = c.a[(size_t)m];
    if (b.is_exact()) (*b.exact)[(size_t)(m * m)] = (*c.exact)[(size_t)m];
  }
  return b;
}

CoeffSeq square_embed(const CoeffSeq& c) { return square_embed(c, c.M); }

CoeffSeq build_RQ(const FormTables& tables, i64 M) {
  if (M < 1 || M > tables.tmax) fail(Errc::UsageError, "coefficient range exceeds the tables");
  CoeffSeq omega = zero_seq(M);
  auto& oe = *omega.exact;
  for (i64 n = 1; n <= M; ++n) oe[(size_t)n] = tables.omega_direct[(size_t)n];
  mirror(omega);

  // mu * r_Q(n^2) must reproduce |Omega_n| exactly.
  CoeffSeq rsq = zero_seq(M);
  CoeffSeq mu = zero_seq(M);
  for (i64 n = 1; n <= M; ++n) {
    (*rsq.exact)[(size_t)n] = tables.rep[(size_t)(n * n)];
    (*mu.exact)[(size_t)n] = mobius(n);
  }
  mirror(rsq);
  mirror(mu);
  CoeffSeq conv = dirichlet_convolve(mu, rsq);
  for (i64 n = 1; n <= M; ++n)
    if ((*conv.exact)[(size_t)n] != oe[(size_t)n])
      fail(Errc::MismatchDetected,
           "Moebius convolution of r_Q(n^2) disagrees with the direct point count at n = " +
               std::to_string(n));
  return omega;
}

CoeffSeq build_RQ(const QuadraticForm& form, i64 M) {
  return build_RQ(form_tables(form, M), M);
}

cplx eval_partial(const CoeffSeq& seq, cplx s) {
  cplx sum(0, 0), comp(0, 0);
  for (i64 n = 1; n <= seq.M; ++n) {
    cplx an = seq.a[(size_t)n];
    if (an == cplx(0, 0)) continue;
    cplx term = an * std::exp(-s * std::log((double)n));
    cplx y = term - comp;
    cplx t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return sum;
}

namespace {

// Coefficientwise comparison of two sequences, exact when both carry exact
// tracks; otherwise the max absolute complex deviation.
VerifyResult compare_seqs(const CoeffSeq& lhs, const CoeffSeq& rhs) {
  VerifyResult res;
  res.exact = lhs.is_exact() && rhs.is_exact();
  double dev = 0.0;
  if (res.exact) {
    for (i64 n = 1; n <= lhs.M; ++n) {
      i128 d = (*lhs.exact)[(size_t)n] - (*rhs.exact)[(size_t)n];
      dev = std::max(dev, std::abs(to_d(d)));
    }
  } else {
    for (i64 n = 1; n <= lhs.M; ++n) dev = std::max(dev, std::abs(lhs.a[(size_t)n] - rhs.a[(size_t)n]));
  }
  res.max_deviation = dev;
  res.tail_bound = 0.0;  // per-coefficient identity, no truncation enters
  return res;
}

CoeffSeq sigma_seq(const DivisorSumSpec& spec, i64 M, bool square_argument) {
  CoeffSeq s = zero_seq(M);
  bool ex = spec.chi1.is_real() && spec.chi2.is_real();
  if (!ex) s.exact.reset();
  for (i64 n = 1; n <= M; ++n) {
    i64 arg = square_argument ? n * n : n;
    if (ex)
      (*s.exact)[(size_t)n] = sigma_twisted_exact(spec, arg);
    else
      s.a[(size_t)n] = sigma_twisted(spec, arg);
  }
  if (ex) mirror(s);
  return s;
}

cplx pow_cplx(double base, cplx e) { return std::exp(e * std::log(base)); }

std::vector<cplx> sample_points(double sigma0) {
  std::vector<cplx> pts;
  for (int t = -2; t <= 2; ++t) pts.emplace_back(sigma0, (double)t);
  return pts;
}

// Largest |coef(n)| / n^alpha over the top decade of the sequence, the growth
// constant feeding the integral tail estimate.
double growth_const(const CoeffSeq& s, int alpha) {
  double g = 0.0;
  i64 from = std::max<i64>(1, (i64)(0.9 * (double)s.M));
  for (i64 n = from; n <= s.M; ++n)
    g = std::max(g, std::abs(s.a[(size_t)n]) / std::pow((double)n, (double)alpha));
  return g;
}

double tail_integral(double g, int alpha, double sigma0, i64 M) {
  // sum_{n > M} g n^{alpha - sigma0} <= g M^{alpha + 1 - sigma0} / (sigma0 - alpha - 1)
  double p = (double)alpha + 1.0 - sigma0;
  return g * std::pow((double)M, p) / (sigma0 - (double)alpha - 1.0);
}

}  // namespace

VerifyResult verify_ramanujan(int k, int l, const Character& chi1, const Character& chi2,
                              i64 M) {
  if (M > 10000) fail(Errc::UsageError, "coefficientwise checks capped at M = 10^4");
  if (k < 0 || l < 0) fail(Errc::UsageError, "shifts must be non-negative");
  DivisorSumSpec sk{k, chi1, chi2};
  DivisorSumSpec sl{l, chi1, chi2};
  CoeffSeq lhs;
  {
    CoeffSeq a = sigma_seq(sk, M, false);
    CoeffSeq b = sigma_seq(sl, M, false);
    lhs = zero_seq(M);
    if (a.is_exact() && b.is_exact()) {
      for (i64 n = 1; n <= M; ++n)
        (*lhs.exact)[(size_t)n] = mul_checked((*a.exact)[(size_t)n], (*b.exact)[(size_t)n]);
      mirror(lhs);
    } else {
      lhs.exact.reset();
      for (i64 n = 1; n <= M; ++n) lhs.a[(size_t)n] = a.a[(size_t)n] * b.a[(size_t)n];
    }
  }
  Character chi = product_character(chi1, chi2);
  CoeffSeq rhs = dirichlet_convolve(
      dirichlet_convolve(lseries_coeffs(square_character(chi1), k + l, M),
                         lseries_coeffs(square_character(chi2), 0, M)),
      dirichlet_convolve(lseries_coeffs(chi, k, M), lseries_coeffs(chi, l, M)));
  rhs = dirichlet_convolve(
      rhs, dirichlet_inverse(square_embed(lseries_coeffs(square_character(chi), k + l, M))));
  return compare_seqs(lhs, rhs);
}

VerifyResult verify_square_identity(int k, const Character& chi1, const Character& chi2,
                                    i64 M) {
  if (M > 10000) fail(Errc::UsageError, "coefficientwise checks capped at M = 10^4");
  if (k < 0) fail(Errc::UsageError, "shift must be non-negative");
  DivisorSumSpec sk{k, chi1, chi2};
  CoeffSeq lhs = sigma_seq(sk, M, true);
  Character chi = product_character(chi1, chi2);
  CoeffSeq rhs = dirichlet_convolve(
      dirichlet_convolve(lseries_coeffs(square_character(chi1), 2 * k, M),
                         lseries_coeffs(square_character(chi2), 0, M)),
      lseries_coeffs(chi, k, M));
  rhs = dirichlet_convolve(
      rhs, dirichlet_inverse(square_embed(lseries_coeffs(square_character(chi), 2 * k, M))));
  return compare_seqs(lhs, rhs);
}

VerifyResult verify_delta_identity(int k, const Character& chi1, const Character& chi2,
                                   i64 delta, i64 M) {
  if (delta < 1) fail(Errc::UsageError, "delta must be positive");
  if (k < 0) fail(Errc::UsageError, "shift must be non-negative");
  int j = 0;
  i64 dprime = delta;
  while (dprime % 2 == 0) {
    dprime /= 2;
    ++j;
  }
  if (!is_squarefree(dprime))
    fail(Errc::NotSquarefreeOddPart, "odd part of delta must be squarefree");
  int eps = j & 1;
  i64 c = (eps ? 2 : 1) * dprime;
  double D = std::pow(2.0, (double)((j + 1) / 2)) * (double)dprime;

  DivisorSumSpec sk{k, chi1, chi2};
  Character chi = product_character(chi1, chi2);

  // Both sides run over the same index m after substituting n = 2^ceil(j/2) delta' m.
  CoeffSeq seqL = zero_seq(M);
  seqL.exact.reset();
  for (i64 m = 1; m <= M; ++m) seqL.a[(size_t)m] = sigma_twisted(sk, c * m * m);
  CoeffSeq seqR = sigma_seq(sk, M, true);

  cplx num = sigma_twisted(sk, c);
  double sigma0 = std::max(2 * k + 1, k + j + 1) + 2.5;

  VerifyResult res;
  res.exact = false;
  double rhs_mag_at_real = 0.0;
  cplx factor_at_real(0, 0);
  for (cplx s : sample_points(sigma0)) {
    cplx den = sigma_char_cexp(chi, c, cplx((double)k, 0) - s);
    if (std::abs(den) < 1e-12)
      fail(Errc::SingularFactor, "vanishing divisor-sum factor at a sample point");
    cplx pref = pow_cplx(D, -s);
    cplx lhs_val = pref * eval_partial(seqL, s);
    cplx rhs_val = pref * (num / den) * eval_partial(seqR, s);
    double mag = std::max(std::abs(rhs_val), 1e-300);
    res.max_deviation = std::max(res.max_deviation, std::abs(lhs_val - rhs_val) / mag);
    if (s.imag() == 0.0) {
      rhs_mag_at_real = mag;
      factor_at_real = num / den;
    }
  }
  double gL = growth_const(seqL, 2 * k);
  double gR = growth_const(seqR, 2 * k);
  double tail = tail_integral(gL + std::abs(factor_at_real) * gR, 2 * k, sigma0, M);
  res.tail_bound = std::pow(D, -sigma0) * tail / rhs_mag_at_real;
  return res;
}

VerifyResult verify_odd_identity(int k, int j, const Character& chi1, const Character& chi2,
                                 const Character& chi3, i64 M) {
  if (k < 0 || j < 0) fail(Errc::UsageError, "shifts must be non-negative");
  check_M(M);
  DivisorSumSpec sk{k, chi1, chi2};

  // LHS: Moebius-twisted convolution restricted to odd support.
  CoeffSeq tw = zero_seq(M);
  tw.exact.reset();
  for (i64 n = 1; n <= M; ++n)
    tw.a[(size_t)n] = (double)mobius(n) * chi3(n) * std::pow((double)n, (double)j);
  CoeffSeq sig = zero_seq(M);
  sig.exact.reset();
  for (i64 n = 1; n <= M; ++n) sig.a[(size_t)n] = sigma_twisted(sk, n);
  CoeffSeq lhs = dirichlet_convolve(tw, sig);
  for (i64 n = 2; n <= M; n += 2) lhs.a[(size_t)n] = cplx(0, 0);

  CoeffSeq rhs = dirichlet_convolve(
      dirichlet_convolve(lseries_coeffs(chi1, k, M), lseries_coeffs(chi2, 0, M)),
      dirichlet_inverse(lseries_coeffs(chi3, j, M)));

  double sigma0 = std::max(2 * k + 1, k + j + 1) + 2.5;
  cplx c12 = chi1(2), c22 = chi2(2), c32 = chi3(2);

  VerifyResult res;
  res.exact = false;
  double rhs_mag_at_real = 1.0;
  for (cplx s : sample_points(sigma0)) {
    cplx den = cplx(1, 0) - c32 * pow_cplx(2.0, cplx((double)j, 0) - s);
    if (std::abs(den) < 1e-12)
      fail(Errc::SingularFactor, "vanishing Euler factor at a sample point");
    cplx two_factor = (cplx(1, 0) - c22 * pow_cplx(2.0, -s)) *
                      (cplx(1, 0) - c12 * pow_cplx(2.0, cplx((double)k, 0) - s)) / den;
    cplx lhs_val = eval_partial(lhs, s);
    cplx rhs_val = two_factor * eval_partial(rhs, s);
    double mag = std::max(std::abs(rhs_val), 1e-300);
    res.max_deviation = std::max(res.max_deviation, std::abs(lhs_val - rhs_val) / mag);
    if (s.imag() == 0.0) rhs_mag_at_real = mag;
  }
  int alpha = std::max(j, k);
  double g = std::max(growth_const(lhs, alpha), growth_const(rhs, alpha));
  res.tail_bound = 2.0 * tail_integral(g, alpha, sigma0, M) / rhs_mag_at_real;
  return res;
}

bool verify_mult_relation(int k, const Character& chi1, const Character& chi2, i64 m, i64 n) {
  if (m < 1 || n < 1) fail(Errc::UsageError, "arguments must be positive");
  if ((i128)m * (i128)n > (i128)4000000000000000000LL)
    fail(Errc::Overflow, "product out of range");
  DivisorSumSpec sk{k, chi1, chi2};
  Character chi = product_character(chi1, chi2);
  i64 g = std::gcd(m, n);
  if (chi1.is_real() && chi2.is_real()) {
    i128 lhs = mul_checked(sigma_twisted_exact(sk, m), sigma_twisted_exact(sk, n));
    i128 rhs = 0;
    for (i64 d : divisors(g))
      rhs = add_checked(rhs, mul_checked(mul_checked((i128)chi.exact_at(d), pow_checked(d, k)),
                                         sigma_twisted_exact(sk, (m / d) * (n / d))));
    return lhs == rhs;
  }
  cplx lhs = sigma_twisted(sk, m) * sigma_twisted(sk, n);
  cplx rhs(0, 0);
  for (i64 d : divisors(g))
    rhs += chi(d) * std::pow((double)d, (double)k) * sigma_twisted(sk, (m / d) * (n / d));
  return std::abs(lhs - rhs) <= 1e-10 * std::max(1.0, std::abs(lhs));
}

}  // namespace ellip
