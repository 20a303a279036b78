#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "ellip/quadform.hpp"

namespace ellip {

struct RationalPoint {
  VecZ m;   // integer coordinates, Q(m) = n^2
  i64 n;    // height, gcd(gcd(m), n) = 1
};

struct CountRecord {
  i64 n;
  i64 rep_sq;       // r_Q(n^2)
  i64 omega;        // |Omega_n|
  i128 cumulative;  // |Omega_T| at T = n
};

// Branch-and-bound traversal (Fincke-Pohst) of all integer vectors with
// Q(m) <= bound. Interval bounds per coordinate come from the Cholesky factor
// in floating point, widened by a relative slack; the exact value Q(m) is
// maintained incrementally in integer arithmetic and handed to the visitor, so
// spurious candidates admitted by the slack are the visitor's to reject and no
// true solution is ever lost.
//
// With halve = true only vectors whose highest-index nonzero coordinate is
// positive are visited and carry weight 2 (the zero vector appears once with
// weight 1); correct for any visitor even under m -> -m.
//
// Visitor signature: visit(const i64* m, i64 q, i64 weight).
template <class Visitor>
class BallTraverser {
 public:
  static constexpr int kMaxRank = 16;

  BallTraverser(const QuadraticForm& form, const Eigen::MatrixXd& B, i64 bound, Visitor& visit)
      : r_(form.r), bound_(bound), visit_(visit) {
    for (int i = 0; i < r_; ++i)
      for (int j = 0; j < r_; ++j) {
        Bf_[i][j] = B(i, j);
        Ai_[i][j] = form.A(i, j);
      }
  }

  void run(bool halve) {
    if (bound_ < 0) return;
    descend(r_ - 1, 0.0, 0, 1, halve);
  }

  // One top-level branch m_{r-1} = v, for external work partitioning. The
  // caller supplies weight/allzero exactly as run() would: weight 2 for v > 0
  // under halving, allzero only for v = 0.
  void run_top_value(i64 v, i64 weight, bool allzero) {
    if (bound_ < 0) return;
    int k = r_ - 1;
    m_[k] = v;
    double term = Bf_[k][k] * (double)v;
    i64 q = (Ai_[k][k] / 2) * v * v;
    descend(k - 1, term * term, q, weight, allzero && v == 0);
  }

  // Upper bound for the top-level coordinate under the current bound.
  i64 top_range() const {
    double w = widen(std::sqrt((double)bound_));
    return (i64)std::floor(w / Bf_[r_ - 1][r_ - 1]);
  }

 private:
  static double widen(double w) { return w + 1e-6 * w + 1e-9; }

  void descend(int k, double partial, i64 qsuf, i64 weight, bool allzero) {
    double rem = (double)bound_ - partial;
    if (rem < -0.5) return;
    double w = widen(std::sqrt(std::max(rem, 0.0)));
    double u = 0.0;
    for (int j = k + 1; j < r_; ++j) u += Bf_[k][j] * (double)m_[j];
    i64 t = 0;
    for (int j = k + 1; j < r_; ++j) t += Ai_[k][j] * m_[j];
    double bkk = Bf_[k][k];
    i64 lo = (i64)std::ceil((-w - u) / bkk);
    i64 hi = (i64)std::floor((w - u) / bkk);
    if (allzero && lo < 0) lo = 0;
    if (lo > hi) return;
    i64 ah = Ai_[k][k] / 2;

    if (k == 0) {
      i64 q = qsuf + ah * lo * lo + t * lo;
      i64 dq = ah * (2 * lo + 1) + t;
      for (i64 x = lo; x <= hi; ++x) {
        m_[0] = x;
        i64 wgt = allzero ? (x > 0 ? 2 * weight : weight) : weight;
        visit_(m_, q, wgt);
        q += dq;
        dq += 2 * ah;
      }
      return;
    }
    for (i64 x = lo; x <= hi; ++x) {
      m_[k] = x;
      double term = bkk * (double)x + u;
      i64 wgt = weight;
      bool az = allzero;
      if (allzero && x > 0) {
        wgt = 2 * weight;
        az = false;
      }
      descend(k - 1, partial + term * term, qsuf + ah * x * x + t * x, wgt, az);
    }
  }

  int r_;
  i64 bound_;
  Visitor& visit_;
  double Bf_[kMaxRank][kMaxRank] = {};
  i64 Ai_[kMaxRank][kMaxRank] = {};
  i64 m_[kMaxRank] = {};
};

template <class Visitor>
void enumerate_ball(const QuadraticForm& form, const Eigen::MatrixXd& B, i64 bound, bool halve,
                    Visitor&& visit) {
  BallTraverser<std::remove_reference_t<Visitor>> tr(form, B, bound, visit);
  tr.run(halve);
}

// Complete, lexicographically ordered list of solutions of Q(m) = n.
std::vector<VecZ> representations(const QuadraticForm& form, i64 n);

// r_Q(n) by counting traversal, no materialization.
i64 rep_count(const QuadraticForm& form, i64 n);

// Independent oracle: exhaustive search of the box |m_i| <= ceil(sqrt(2n/lambda_min)).
std::vector<VecZ> representations_boxsearch(const QuadraticForm& form, i64 n);

// Rational points of height n: representations of n^2 with gcd(gcd(m), n) = 1.
std::vector<RationalPoint> omega_points(const QuadraticForm& form, i64 n);

// |Omega_n| via the Moebius formula sum_{delta | n} mu(delta) r_Q(n^2/delta^2).
i64 omega_count_mobius(const QuadraticForm& form, i64 n);

// Batched traversal products for all heights up to T: rep[k] = r_Q(k) for
// k <= T^2 and omega_direct[n] = |Omega_n| counted point by point under the
// gcd condition. One ball traversal, partitioned across `jobs` workers with an
// order-independent exact merge.
struct FormTables {
  i64 tmax = 0;
  std::vector<i64> rep;           // index 0..T^2
  std::vector<i64> omega_direct;  // index 0..T
};
FormTables form_tables(const QuadraticForm& form, i64 T, int jobs = 1);

// Moebius-sieved |Omega_n| out of a representation table (rep[k] = r_Q(k)).
i64 omega_count_mobius(const std::vector<i64>& rep, i64 n);

// Records for n = 1..T. omega comes from the Moebius formula and is checked
// against the directly counted value; a disagreement is an implementation bug.
std::vector<CountRecord> omega_cumulative(const QuadraticForm& form, i64 T, int jobs = 1);
std::vector<CountRecord> omega_cumulative(const FormTables& tables);

}  // namespace ellip
