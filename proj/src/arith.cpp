#include "ellip/arith.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "ellip/errors.hpp"

namespace ellip {

namespace {

constexpr i64 kTrialLimit = 1'000'000;
constexpr double kPi = 3.14159265358979323846264338327950288;

u64 mulmod(u64 a, u64 b, u64 m) { return (u64)((u128)a * b % m); }

u64 powmod(u64 a, u64 e, u64 m) {
  u64 r = 1;
  a %= m;
  while (e) {
    if (e & 1) r = mulmod(r, a, m);
    a = mulmod(a, a, m);
    e >>= 1;
  }
  return r;
}

bool miller_rabin(u64 n) {
  if (n < 2) return false;
  for (u64 p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    if (n % p == 0) return n == p;
  }
  u64 d = n - 1;
  int s = 0;
  while ((d & 1) == 0) d >>= 1, ++s;
  // Deterministic witness set for all 64-bit inputs.
  for (u64 a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    u64 x = powmod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int i = 1; i < s; ++i) {
      x = mulmod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

u64 pollard_rho(u64 n) {
  if ((n & 1) == 0) return 2;
  // Brent's cycle variant with a fixed, deterministic schedule of offsets.
  for (u64 c = 1;; ++c) {
    u64 x = 2, y = 2, d = 1;
    u64 q = 1;
    int lam = 1;
    while (d == 1) {
      x = y;
      for (int i = 0; i < lam; ++i) y = (mulmod(y, y, n) + c) % n;
      int k = 0;
      while (k < lam && d == 1) {
        int span = std::min(128, lam - k);
        u64 ys = y;
        for (int i = 0; i < span; ++i) {
          y = (mulmod(y, y, n) + c) % n;
          q = mulmod(q, x > y ? x - y : y - x, n);
        }
        d = std::gcd(q, n);
        if (d == n) {
          // Backtrack one step at a time.
          d = 1;
          y = ys;
          while (d == 1) {
            y = (mulmod(y, y, n) + c) % n;
            d = std::gcd(x > y ? x - y : y - x, n);
          }
          break;
        }
        k += span;
      }
      lam *= 2;
    }
    if (d != n) return d;
  }
}

void factor_into(u64 n, std::vector<u64>& out) {
  if (n == 1) return;
  if (miller_rabin(n)) {
    out.push_back(n);
    return;
  }
  u64 d = pollard_rho(n);
  factor_into(d, out);
  factor_into(n / d, out);
}

}  // namespace

std::vector<std::pair<i64, int>> factorize(i64 n) {
  if (n < 1) fail(Errc::Overflow, "factorize requires n >= 1");
  std::vector<std::pair<i64, int>> out;
  u64 m = (u64)n;
  for (i64 p = 2; p <= kTrialLimit && (u64)p * (u64)p <= m; p += (p == 2 ? 1 : 2)) {
    if (m % (u64)p == 0) {
      int e = 0;
      while (m % (u64)p == 0) m /= (u64)p, ++e;
      out.push_back({p, e});
    }
  }
  if (m > 1) {
    if (m <= (u64)kTrialLimit * (u64)kTrialLimit) {
      out.push_back({(i64)m, 1});  // single prime above the trial range
    } else {
      std::vector<u64> primes;
      factor_into(m, primes);
      std::sort(primes.begin(), primes.end());
      for (size_t i = 0; i < primes.size();) {
        size_t j = i;
        while (j < primes.size() && primes[j] == primes[i]) ++j;
        out.push_back({(i64)primes[i], (int)(j - i)});
        i = j;
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<i64> divisors(i64 n) {
  auto fac = factorize(n);
  std::vector<i64> divs = {1};
  for (auto [p, e] : fac) {
    size_t sz = divs.size();
    i64 pk = 1;
    for (int i = 1; i <= e; ++i) {
      pk *= p;
      for (size_t j = 0; j < sz; ++j) divs.push_back(divs[j] * pk);
    }
  }
  std::sort(divs.begin(), divs.end());
  return divs;
}

bool is_squarefree(i64 n) {
  for (auto [p, e] : factorize(n)) {
    (void)p;
    if (e > 1) return false;
  }
  return true;
}

i64 euler_phi(i64 n) {
  i64 r = n;
  for (auto [p, e] : factorize(n)) {
    (void)e;
    r -= r / p;
  }
  return r;
}

int mobius(i64 n) {
  auto fac = factorize(n);
  for (auto [p, e] : fac) {
    (void)p;
    if (e > 1) return 0;
  }
  return fac.size() % 2 == 0 ? 1 : -1;
}

int kronecker(i64 a, i64 n) {
  if (n == 0) return (a == 1 || a == -1) ? 1 : 0;
  if ((a & 1) == 0 && (n & 1) == 0) return 0;
  int result = 1;
  if (n < 0) {
    n = -n;
    if (a < 0) result = -result;  // (a / -1)
  }
  int v = 0;
  while ((n & 1) == 0) n >>= 1, ++v;
  if (v & 1) {
    i64 am = a % 8;
    if (am < 0) am += 8;
    if (am == 3 || am == 5) result = -result;  // supplement at 2: a odd here
  }
  a %= n;
  if (a < 0) a += n;
  // Jacobi loop with quadratic reciprocity; n odd positive from here on.
  while (a != 0) {
    v = 0;
    while ((a & 1) == 0) a >>= 1, ++v;
    if (v & 1) {
      i64 nm = n % 8;
      if (nm == 3 || nm == 5) result = -result;
    }
    if ((a & n & 2) != 0) result = -result;  // both ≡ 3 mod 4
    i64 t = n % a;
    n = a;
    a = t;
  }
  return n == 1 ? result : 0;
}

// ---- character group construction -------------------------------------------

namespace {

// One CRT factor p^e of the modulus: generators of (Z/p^e)^x with their orders
// and a discrete-log table (exponent vector per residue, -1 marking non-units).
struct CrtFactor {
  i64 pe = 1;
  std::vector<i64> orders;
  std::vector<std::vector<int>> dlog;  // dlog[a][j] for a in 0..pe-1
};

CrtFactor build_crt_factor(i64 p, int e) {
  CrtFactor f;
  f.pe = 1;
  for (int i = 0; i < e; ++i) f.pe *= p;
  std::vector<i64> gens;
  if (p == 2) {
    if (e == 1) {
      // trivial unit group
    } else if (e == 2) {
      gens = {3};
      f.orders = {2};
    } else {
      gens = {f.pe - 1, 5};  // -1 and 5 generate (Z/2^e)^x
      f.orders = {2, f.pe / 4};
    }
  } else {
    i64 phi = (f.pe / p) * (p - 1);
    for (i64 g = 2; g < f.pe; ++g) {
      if (std::gcd(g, f.pe) != 1) continue;
      // g is a generator iff g^(phi/q) != 1 for every prime q | phi
      bool ok = true;
      for (auto [q, qe] : factorize(phi)) {
        (void)qe;
        if (powmod((u64)g, (u64)(phi / q), (u64)f.pe) == 1) {
          ok = false;
          break;
        }
      }
      if (ok) {
        gens = {g};
        f.orders = {phi};
        break;
      }
    }
  }
  f.dlog.assign((size_t)f.pe, {});
  size_t ng = gens.size();
  std::vector<int> exps(ng, 0);
  // Walk the whole unit group as a product of generator powers.
  std::function<void(size_t, i64)> walk = [&](size_t j, i64 acc) {
    if (j == ng) {
      f.dlog[(size_t)acc] = exps;
      return;
    }
    i64 cur = acc;
    for (int k = 0; k < f.orders[j]; ++k) {
      exps[j] = k;
      walk(j + 1, cur);
      cur = (i64)mulmod((u64)cur, (u64)gens[j], (u64)f.pe);
    }
  };
  walk(0, 1 % f.pe);
  return f;
}

void finish_flags(Character& c) {
  // Realness decides whether an exact table exists; principality and order-2
  // are read off the table. Constructed values are exact at the 1e-12 scale.
  bool real = true, principal = true, has_minus = false;
  for (size_t a = 0; a < c.values.size(); ++a) {
    const cplx& v = c.values[a];
    if (v == cplx(0.0, 0.0)) continue;
    if (std::abs(v.imag()) > 1e-12) real = false;
    if (std::abs(v - cplx(1.0, 0.0)) > 1e-12) principal = false;
    if (std::abs(v - cplx(-1.0, 0.0)) < 1e-12) has_minus = true;
  }
  c.is_principal = principal;
  c.is_quadratic = real && !principal && has_minus;
  if (real) {
    std::vector<int> ex(c.values.size(), 0);
    for (size_t a = 0; a < c.values.size(); ++a) {
      if (c.values[a] == cplx(0.0, 0.0))
        ex[a] = 0;
      else
        ex[a] = c.values[a].real() > 0 ? 1 : -1;
    }
    c.exact = std::move(ex);
  } else {
    c.exact.reset();
  }
  i64 N = c.modulus;
  c.parity = N == 1 ? 1 : (int)std::llround(c.values[(size_t)(N - 1)].real());
}

}  // namespace

std::vector<Character> character_group(i64 N) {
  if (N < 1) fail(Errc::ModulusTooLarge, "modulus must be positive");
  if (N > 10'000) fail(Errc::ModulusTooLarge, "character_group limited to moduli <= 10^4");

  std::vector<CrtFactor> factors;
  for (auto [p, e] : factorize(N)) factors.push_back(build_crt_factor(p, e));
  if (N == 1) factors.clear();

  // Flatten the generator list; a character is one exponent tuple against it.
  std::vector<i64> all_orders;
  for (const auto& f : factors)
    for (i64 o : f.orders) all_orders.push_back(o);
  size_t ng = all_orders.size();

  i64 denom_lcm = 1;
  for (i64 o : all_orders) denom_lcm = std::lcm(denom_lcm, o);

  size_t count = 1;
  for (i64 o : all_orders) count *= (size_t)o;  // = phi(N)

  std::vector<Character> group;
  group.reserve(count);
  std::vector<i64> kvec(ng, 0);
  for (size_t idx = 0; idx < count; ++idx) {
    Character c;
    c.modulus = N;
    c.values.assign((size_t)N, cplx(0.0, 0.0));
    for (i64 a = 0; a < N; ++a) {
      if (std::gcd(a, N) != 1 && N > 1) continue;
      // Assemble the rational angle sum_j k_j * dlog_j(a) / ord_j exactly.
      i64 num = 0;
      size_t j = 0;
      bool unit = true;
      for (const auto& f : factors) {
        i64 res = a % f.pe;
        const auto& dl = f.dlog[(size_t)res];
        if (dl.empty() && !f.orders.empty()) {
          unit = false;
          break;
        }
        for (size_t t = 0; t < f.orders.size(); ++t, ++j) {
          i64 contrib = (kvec[j] * (i64)dl[t]) % all_orders[j];
          num = (num + contrib * (denom_lcm / all_orders[j])) % denom_lcm;
        }
      }
      if (!unit) continue;
      double angle = 2.0 * kPi * (double)num / (double)denom_lcm;
      cplx v(std::cos(angle), std::sin(angle));
      // Snap exact lattice values so real characters are exactly ±1.
      if (std::abs(v.real()) < 1e-15) v.real(0.0);
      if (std::abs(v.imag()) < 1e-15) v.imag(0.0);
      if (std::abs(v.real() - 1.0) < 1e-15) v.real(1.0);
      if (std::abs(v.real() + 1.0) < 1e-15) v.real(-1.0);
      c.values[(size_t)a] = v;
    }
    finish_flags(c);
    group.push_back(std::move(c));
    // Odometer over exponent tuples; first generator slowest.
    for (size_t j = ng; j-- > 0;) {
      if (++kvec[j] < all_orders[j]) break;
      kvec[j] = 0;
    }
  }
  return group;
}

Character principal_character(i64 N) {
  if (N < 1) fail(Errc::ModulusTooLarge, "modulus must be positive");
  Character c;
  c.modulus = N;
  c.values.assign((size_t)N, cplx(0.0, 0.0));
  for (i64 a = 0; a < N; ++a)
    if (std::gcd(a, N) == 1 || N == 1) c.values[(size_t)a] = cplx(1.0, 0.0);
  finish_flags(c);
  return c;
}

Character product_character(const Character& c1, const Character& c2) {
  i64 N = c1.modulus * c2.modulus;
  if (N > 1'000'000) fail(Errc::ModulusTooLarge, "product character modulus too large");
  Character c;
  c.modulus = N;
  c.values.assign((size_t)N, cplx(0.0, 0.0));
  if (c1.exact && c2.exact) {
    std::vector<int> ex((size_t)N, 0);
    for (i64 a = 0; a < N; ++a) {
      int v = c1.exact_at(a) * c2.exact_at(a);
      ex[(size_t)a] = v;
      c.values[(size_t)a] = cplx((double)v, 0.0);
    }
  } else {
    for (i64 a = 0; a < N; ++a) c.values[(size_t)a] = c1(a) * c2(a);
  }
  finish_flags(c);
  return c;
}

Character square_character(const Character& c0) {
  Character c;
  c.modulus = c0.modulus;
  c.values.resize(c0.values.size());
  for (size_t a = 0; a < c0.values.size(); ++a) c.values[a] = c0.values[a] * c0.values[a];
  finish_flags(c);
  return c;
}

Character kronecker_character(i64 D, i64 N) {
  if (N < 1 || N > 1'000'000) fail(Errc::ModulusTooLarge, "kronecker character modulus out of range");
  Character c;
  c.modulus = N;
  c.values.assign((size_t)N, cplx(0.0, 0.0));
  for (i64 a = 0; a < N; ++a) {
    int v = (std::gcd(a, N) == 1 || N == 1) ? kronecker(D, a) : 0;
    c.values[(size_t)a] = cplx((double)v, 0.0);
  }
  finish_flags(c);
  // N must be a period of kronecker(D, .) on units; check multiplicativity and
  // periodicity on a sample so an incompatible (D, N) pair fails loudly.
  for (i64 a = 1; a < std::min<i64>(N, 64); ++a) {
    for (i64 b = 1; b < std::min<i64>(N, 64); ++b) {
      cplx lhs = c(a * b), rhs = c(a) * c(b);
      if (std::abs(lhs - rhs) > 1e-12)
        fail(Errc::MismatchDetected, "kronecker table not multiplicative mod N");
    }
    if (std::gcd(a, N) == 1 && kronecker(D, a + N) != kronecker(D, a))
      fail(Errc::MismatchDetected, "kronecker symbol not N-periodic");
  }
  return c;
}

// ---- twisted divisor sums ----------------------------------------------------

cplx sigma_twisted(const DivisorSumSpec& spec, i64 n) {
  if (n < 1) fail(Errc::Overflow, "sigma_twisted requires n >= 1");
  if (spec.chi1.exact && spec.chi2.exact) {
    i128 v = sigma_twisted_exact(spec, n);
    return cplx((double)v, 0.0);
  }
  cplx total(0.0, 0.0);
  for (i64 d : divisors(n)) {
    cplx a = spec.chi1(d), b = spec.chi2(n / d);
    if (a == cplx(0.0, 0.0) || b == cplx(0.0, 0.0)) continue;
    total += a * b * std::pow((double)d, (double)spec.k);
  }
  return total;
}

i128 sigma_twisted_exact(const DivisorSumSpec& spec, i64 n) {
  if (n < 1) fail(Errc::Overflow, "sigma_twisted requires n >= 1");
  if (!spec.chi1.exact || !spec.chi2.exact)
    fail(Errc::MismatchDetected, "exact divisor sum needs real-valued characters");
  i128 total = 0;
  for (i64 d : divisors(n)) {
    int a = spec.chi1.exact_at(d);
    int b = spec.chi2.exact_at(n / d);
    if (a == 0 || b == 0) continue;
    total = add_checked(total, mul_checked((i128)(a * b), pow_checked(d, spec.k)));
  }
  return total;
}

cplx sigma_char(int t, const Character& chi, i64 n) {
  DivisorSumSpec spec{t, chi, principal_character(1)};
  return sigma_twisted(spec, n);
}

cplx sigma_char_cexp(const Character& chi, i64 n, cplx t) {
  if (n < 1) fail(Errc::Overflow, "sigma_char requires n >= 1");
  cplx total(0.0, 0.0);
  for (i64 d : divisors(n)) {
    cplx a = chi(d);
    if (a == cplx(0.0, 0.0)) continue;
    total += a * std::exp(t * std::log((double)d));
  }
  return total;
}

}  // namespace ellip
