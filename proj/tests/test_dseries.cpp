#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>

#include "ellip/arith.hpp"
#include "ellip/dseries.hpp"
#include "ellip/errors.hpp"
#include "ellip/quadform.hpp"

using namespace ellip;

namespace {

CoeffSeq random_int_seq(i64 M, u64 seed, bool unit_lead) {
  CoeffSeq s = zero_seq(M);
  u64 x = seed;
  for (i64 n = 1; n <= M; ++n) {
    x ^= x << 13;
    x ^= x >> 7;
    x ^= x << 17;
    i64 v = (i64)(x % 19) - 9;
    (*s.exact)[(size_t)n] = v;
    s.a[(size_t)n] = (double)v;
  }
  if (unit_lead) {
    (*s.exact)[1] = 1;
    s.a[1] = 1.0;
  }
  return s;
}

bool seq_equal_exact(const CoeffSeq& a, const CoeffSeq& b) {
  REQUIRE(a.is_exact());
  REQUIRE(b.is_exact());
  REQUIRE(a.M == b.M);
  for (i64 n = 1; n <= a.M; ++n)
    if ((*a.exact)[(size_t)n] != (*b.exact)[(size_t)n]) return false;
  return true;
}

}  // namespace

TEST_SUITE("coefficient algebra") {
  TEST_CASE("convolution identities") {
    CoeffSeq b = random_int_seq(200, 42, false);
    CoeffSeq u = unit_seq(200);
    CHECK(seq_equal_exact(dirichlet_convolve(u, b), b));

    CoeffSeq ones = ones_seq(100);
    CoeffSeq dd = dirichlet_convolve(ones, ones);
    CHECK((*dd.exact)[12] == 6);
    CHECK((*dd.exact)[1] == 1);

    // inverse of ones is the Moebius sequence; their convolution is the unit
    CoeffSeq mu = dirichlet_inverse(ones);
    for (i64 n = 1; n <= 100; ++n) CHECK((*mu.exact)[(size_t)n] == mobius(n));
    CHECK(seq_equal_exact(dirichlet_convolve(mu, ones), unit_seq(100)));
  }
  TEST_CASE("convolution is associative and commutative") {
    CoeffSeq a = random_int_seq(300, 1, false);
    CoeffSeq b = random_int_seq(300, 2, false);
    CoeffSeq c = random_int_seq(300, 3, false);
    CHECK(seq_equal_exact(dirichlet_convolve(a, b), dirichlet_convolve(b, a)));
    CHECK(seq_equal_exact(dirichlet_convolve(dirichlet_convolve(a, b), c),
                          dirichlet_convolve(a, dirichlet_convolve(b, c))));
  }
  TEST_CASE("length mismatch is rejected") {
    CHECK_THROWS_AS(dirichlet_convolve(ones_seq(10), ones_seq(11)), Error);
  }
  TEST_CASE("inverse of a completely multiplicative sequence") {
    Character c4 = character_group(4)[1];
    CoeffSeq L = lseries_coeffs(c4, 0, 1000);
    CoeffSeq inv = dirichlet_inverse(L);
    for (i64 n = 1; n <= 1000; ++n)
      CHECK((*inv.exact)[(size_t)n] == mobius(n) * c4.exact_at(n));
    CHECK(seq_equal_exact(dirichlet_convolve(L, inv), unit_seq(1000)));
  }
  TEST_CASE("inverse is an involution") {
    CoeffSeq a = random_int_seq(500, 99, true);
    CHECK(seq_equal_exact(dirichlet_inverse(dirichlet_inverse(a)), a));
  }
  TEST_CASE("non-invertible input") {
    CoeffSeq z = zero_seq(10);
    CHECK_THROWS_AS(dirichlet_inverse(z), Error);
  }
  TEST_CASE("lseries coefficients") {
    CoeffSeq zeta = lseries_coeffs(principal_character(1), 0, 50);
    for (i64 n = 1; n <= 50; ++n) CHECK((*zeta.exact)[(size_t)n] == 1);
    Character c4 = character_group(4)[1];
    CoeffSeq l4 = lseries_coeffs(c4, 1, 5);
    i128 expect[] = {0, 1, 0, -3, 0, 5};
    for (i64 n = 1; n <= 5; ++n) CHECK((*l4.exact)[(size_t)n] == expect[n]);
  }
  TEST_CASE("square embedding") {
    CHECK(seq_equal_exact(square_embed(unit_seq(50)), unit_seq(50)));
    CoeffSeq sq = square_embed(ones_seq(50));
    for (i64 n = 1; n <= 50; ++n) {
      i64 r = (i64)std::llround(std::sqrt((double)n));
      CHECK((*sq.exact)[(size_t)n] == (r * r == n ? 1 : 0));
    }
    CoeffSeq msq = zero_seq(10);
    for (i64 m = 1; m <= 10; ++m) {
      (*msq.exact)[(size_t)m] = m * m;
      msq.a[(size_t)m] = (double)(m * m);
    }
    CoeffSeq emb = square_embed(msq, 100);
    CHECK((*emb.exact)[9] == 9);
    CHECK((*emb.exact)[8] == 0);
  }
}

TEST_SUITE("height zeta coefficients") {
  TEST_CASE("pinned sphere values") {
    CoeffSeq rq2 = build_RQ(sphere_form(2), 10);
    CHECK((*rq2.exact)[1] == 6);
    CHECK((*rq2.exact)[2] == 0);
    CHECK((*rq2.exact)[3] == 24);
    CoeffSeq rq3 = build_RQ(sphere_form(3), 5);
    CHECK((*rq3.exact)[1] == 8);
    CHECK((*rq3.exact)[3] == 96);
  }
  TEST_CASE("partial sums") {
    CHECK(std::abs(eval_partial(unit_seq(10), cplx(2.5, 7.0)) - cplx(1, 0)) < 1e-15);
    CoeffSeq ones = ones_seq(1000000);
    double zeta2 = M_PI * M_PI / 6.0;
    CHECK(std::abs(eval_partial(ones, cplx(2, 0)).real() - zeta2) < 1e-6);

    CoeffSeq rq = build_RQ(sphere_form(2), 200);
    cplx direct = 0;
    for (i64 n = 200; n >= 1; --n)
      direct += rq.a[(size_t)n] * std::pow((double)n, -3.0);
    CHECK(std::abs(eval_partial(rq, cplx(3, 0)) - direct) < 1e-9);
  }
}

TEST_SUITE("identity verifiers") {
  TEST_CASE("ramanujan identity") {
    Character one = principal_character(1);
    VerifyResult r = verify_ramanujan(0, 0, one, one, 500);
    CHECK(r.exact);
    CHECK(r.max_deviation == 0.0);
    r = verify_ramanujan(1, 0, one, one, 500);
    CHECK(r.exact);
    CHECK(r.max_deviation == 0.0);
    auto g4 = character_group(4);
    r = verify_ramanujan(2, 1, g4[0], g4[1], 2000);
    CHECK(r.max_deviation < 1e-8);
    CHECK_THROWS_AS(verify_ramanujan(0, 0, one, one, 20000), Error);
  }
  TEST_CASE("square identity") {
    Character one = principal_character(1);
    VerifyResult r = verify_square_identity(0, one, one, 500);
    CHECK(r.exact);
    CHECK(r.max_deviation == 0.0);
    r = verify_square_identity(1, one, one, 2000);
    CHECK(r.exact);
    CHECK(r.max_deviation == 0.0);
    r = verify_square_identity(1, kronecker_character(5, 5), one, 2000);
    CHECK(r.max_deviation < 1e-8);
  }
  TEST_CASE("shifted-divisor identity in the square sum") {
    Character one = principal_character(1);
    VerifyResult r = verify_delta_identity(1, one, one, 1, 500);
    CHECK(r.max_deviation == 0.0);
    r = verify_delta_identity(1, one, one, 2, 5000);
    CHECK(r.max_deviation < 1e-6);
    CHECK(r.tail_bound < 1e-6);
    r = verify_delta_identity(1, one, one, 3, 5000);
    CHECK(r.max_deviation < 1e-6);
    CHECK_THROWS_AS(verify_delta_identity(1, one, one, 9, 500), Error);
    CHECK_THROWS_AS(verify_delta_identity(1, one, one, 18, 500), Error);
  }
  TEST_CASE("odd-restriction identity") {
    Character one = principal_character(1);
    auto g4 = character_group(4);
    VerifyResult r = verify_odd_identity(0, 0, one, one, g4[1], 10000);
    CHECK(r.max_deviation < 1e-8);
    r = verify_odd_identity(0, 0, one, one, one, 10000);
    CHECK(r.max_deviation < 1e-8);
    r = verify_odd_identity(2, 1, g4[0], g4[0], kronecker_character(5, 5), 5000);
    CHECK(r.max_deviation < 1e-6);
  }
  TEST_CASE("explicit multiplicativity relation") {
    Character one = principal_character(1);
    // sigma(2)^2 = 9 = sigma(4) + 2 sigma(1) = 7 + 2
    CHECK(verify_mult_relation(1, one, one, 2, 2));
    Character c4 = character_group(4)[1];
    CHECK(verify_mult_relation(2, c4, one, 6, 4));
    Character k5 = kronecker_character(5, 5);
    for (i64 m = 1; m <= 60; ++m)
      for (i64 n = 1; n <= 60; ++n) {
        CHECK(verify_mult_relation(1, one, one, m, n));
        CHECK(verify_mult_relation(1, c4, k5, m, n));
        CHECK(verify_mult_relation(2, k5, k5, m, n));
      }
  }
}
