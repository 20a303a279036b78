#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "ellip/arith.hpp"
#include "ellip/lattice_enum.hpp"

namespace ellip {

// Truncated Dirichlet-series coefficients a(1)..a(M). a[0] is unused padding.
// When every input is integer-valued the parallel exact sequence is carried
// along and all arithmetic on it is overflow-checked 128-bit.
struct CoeffSeq {
  i64 M = 0;
  std::vector<cplx> a;
  std::optional<std::vector<i128>> exact;

  bool is_exact() const { return exact.has_value(); }
};

CoeffSeq zero_seq(i64 M);
CoeffSeq unit_seq(i64 M);  // 1, 0, 0, ... (convolution identity)
CoeffSeq ones_seq(i64 M);  // coefficients of zeta

// c(n) = sum over de = n of a(d) b(e). Requires equal truncation length.
CoeffSeq dirichlet_convolve(const CoeffSeq& a, const CoeffSeq& b);

// b with a * b = unit, by the standard recursion; needs a(1) != 0. The exact
// sequence survives only when a(1) is a unit of Z.
CoeffSeq dirichlet_inverse(const CoeffSeq& a);

// a(n) = chi(n) n^shift, the coefficients of L(s - shift, chi).
CoeffSeq lseries_coeffs(const Character& chi, int shift, i64 M);

// b(m^2) = c(m), zero off the squares: series in 2s re-expressed in s.
CoeffSeq square_embed(const CoeffSeq& c, i64 M_out);
CoeffSeq square_embed(const CoeffSeq& c);

// Coefficients a(n) = |Omega_n| of the height zeta function, cross-checked
// against the Moebius convolution with n -> r_Q(n^2) by exact arithmetic.
CoeffSeq build_RQ(const FormTables& tables, i64 M);
CoeffSeq build_RQ(const QuadraticForm& form, i64 M);

// Partial sum sum_{n<=M} a(n) n^{-s}, compensated summation.
cplx eval_partial(const CoeffSeq& a, cplx s);

struct VerifyResult {
  double max_deviation = 0.0;
  bool exact = false;      // both sides compared as exact integers
  double tail_bound = 0.0; // estimated truncation effect for sampled checks
};

// sum sigma_k(n) sigma_l(n) n^{-s} =
//   L(s-k-l, chi1^2) L(s, chi2^2) L(s-k, chi) L(s-l, chi) / L(2s-k-l, chi^2),
// chi = chi1 chi2, compared coefficientwise up to M.
VerifyResult verify_ramanujan(int k, int l, const Character& chi1, const Character& chi2,
                              i64 M);

// sum sigma_k(n^2) n^{-s} =
//   L(s-2k, chi1^2) L(s, chi2^2) L(s-k, chi) / L(2s-2k, chi^2), coefficientwise.
VerifyResult verify_square_identity(int k, const Character& chi1, const Character& chi2,
                                    i64 M);

// For delta = 2^j delta' with delta' odd squarefree,
//   sum_{delta | n^2} sigma_k(n^2/delta) n^{-s}
//     = (2^ceil(j/2) delta')^{-s} sigma_k(2^eps delta') / sigma_{k-s}(chi, 2^eps delta')
//       * sum sigma_k(n^2) n^{-s},
// eps = j mod 2, chi = chi1 chi2. The scalar factor depends on s, so both sides
// are evaluated as truncated sums at five sample points deep in the region of
// absolute convergence; the returned deviation is relative and the estimated
// truncation tail is reported alongside.
VerifyResult verify_delta_identity(int k, const Character& chi1, const Character& chi2,
                                   i64 delta, i64 M);

// sum_{n odd} n^{-s} sum_{delta|n} mu(delta) chi3(delta) delta^j sigma_k(n/delta)
//   = (1 - chi2(2) 2^{-s})(1 - chi1(2) 2^{k-s}) / (1 - chi3(2) 2^{j-s})
//     * L(s-k, chi1) L(s, chi2) / L(s-j, chi3),
// evaluated at five sample points as above.
VerifyResult verify_odd_identity(int k, int j, const Character& chi1, const Character& chi2,
                                 const Character& chi3, i64 M);

// sigma_k(m) sigma_k(n) = sum_{delta | gcd(m,n)} chi(delta) delta^k sigma_k(mn/delta^2),
// chi = chi1 chi2; exact comparison for real characters, 1e-10 otherwise.
bool verify_mult_relation(int k, const Character& chi1, const Character& chi2, i64 m, i64 n);

}  // namespace ellip
