#pragma once

#include <complex>
#include <optional>
#include <utility>
#include <vector>

#include "ellip/int128.hpp"

namespace ellip {

using cplx = std::complex<double>;

// ---- multiplicative basics -------------------------------------------------

// Prime factorization of n >= 1, ascending primes. Trial division up to 1e6,
// Pollard rho (Brent) for whatever survives; deterministic throughout.
std::vector<std::pair<i64, int>> factorize(i64 n);

std::vector<i64> divisors(i64 n);  // ascending
bool is_squarefree(i64 n);
i64 euler_phi(i64 n);
int mobius(i64 n);

// Kronecker symbol (a/n), standard conventions at 2, -1 and 0.
int kronecker(i64 a, i64 n);

// ---- Dirichlet characters as explicit residue tables ------------------------

struct Character {
  i64 modulus = 1;
  std::vector<cplx> values;                // indexed by residue 0..N-1
  std::optional<std::vector<int>> exact;   // parallel {-1,0,1} table when real-valued
  bool is_principal = false;
  bool is_quadratic = false;               // order exactly 2
  int parity = 1;                          // chi(-1), read off at residue N-1

  bool is_real() const { return exact.has_value(); }

  cplx operator()(i64 n) const {
    i64 a = n % modulus;
    if (a < 0) a += modulus;
    return values[(size_t)a];
  }
  int exact_at(i64 n) const {
    i64 a = n % modulus;
    if (a < 0) a += modulus;
    return (*exact)[(size_t)a];
  }
};

// All phi(N) characters mod N via CRT decomposition of (Z/NZ)^x and discrete
// logs on fixed generators; element 0 is the principal character and the
// enumeration order is deterministic.
std::vector<Character> character_group(i64 N);

Character principal_character(i64 N);

// Pointwise product, a character mod N1*N2.
Character product_character(const Character& c1, const Character& c2);

// chi^2 at the same modulus.
Character square_character(const Character& c);

// The character a -> kronecker(D, a) tabulated mod N. Checks that the table is
// supported on units mod N and completely multiplicative (i.e. that N really
// is a period), so a bad (D, N) pairing cannot slip through silently.
Character kronecker_character(i64 D, i64 N);

// ---- twisted divisor sums ---------------------------------------------------

struct DivisorSumSpec {
  int k = 0;
  Character chi1, chi2;
};

// sigma_k(chi1, chi2, n) = sum over d|n of chi1(d) chi2(n/d) d^k.
cplx sigma_twisted(const DivisorSumSpec& spec, i64 n);

// Exact value; requires both characters real-valued.
i128 sigma_twisted_exact(const DivisorSumSpec& spec, i64 n);

// One-character sum sigma_t(chi, n) = sum over d|n of chi(d) d^t.
cplx sigma_char(int t, const Character& chi, i64 n);

// Same sum with a complex exponent, for s-dependent scalar factors.
cplx sigma_char_cexp(const Character& chi, i64 n, cplx t);

}  // namespace ellip
