#pragma once

#include <Eigen/Dense>
#include <optional>
#include <utility>
#include <vector>

#include "ellip/dseries.hpp"
#include "ellip/lattice_enum.hpp"
#include "ellip/quadform.hpp"

namespace ellip {

struct CapSpec {
  Eigen::VectorXd center;  // unit vector in R^{d+1}
  double angle = 0.0;      // radians in (0, pi]
};

struct FitResult {
  double exponent = 0.0;
  double log_constant = 0.0;
  double max_abs_residual = 0.0;
};

// Normalized measure of a polar cap of opening angle theta on S^d, by
// adaptive quadrature of sin^{d-1}; absolute error below 1e-10.
double cap_measure(int d, double theta);

// The fixed deterministic 100-cap family: Fibonacci-lattice centers (exact
// spiral layout on S^2, a reproducible seeded layout in other dimensions) with
// opening angles cycling through pi/6, pi/3, pi/2.
std::vector<CapSpec> default_cap_family(int d);

// Unit vectors B m / n for height-n points; the exact relation Q(m) = n^2
// makes these unit up to rounding, which is checked and then cleaned.
std::vector<Eigen::VectorXd> map_points_to_sphere(const QuadraticForm& form,
                                                  const std::vector<RationalPoint>& points);

// max over caps of |empirical fraction in cap - cap measure|, closed caps.
double discrepancy(const std::vector<Eigen::VectorXd>& points, const std::vector<CapSpec>& caps);

// Least squares in log-log coordinates: count ~ exp(log_constant) T^exponent.
FitResult fit_power_law(const std::vector<std::pair<double, double>>& pairs);

// (1/2pi) int_{-H}^{H} Rhat(beta+it) T^{beta+it} / (beta+it) dt with Rhat the
// M-term partial sum of the height zeta function; adaptive Gauss-Kronrod on
// the panels split at t = +-1, tolerance 1e-8 per panel. The real part
// approximates the cumulative count |Omega_T|. tail_estimate, when given,
// receives an estimate of the coefficient-tail bias sum_{n>M} |Omega_n| n^{-beta}
// relative to the 1/H Perron truncation scale.
cplx perron_truncated(const CoeffSeq& rq, double T, double beta, double H,
                      double* tail_estimate = nullptr);
cplx perron_truncated(const QuadraticForm& form, double T, double beta, double H, i64 M,
                      double* tail_estimate = nullptr);

struct RateRow {
  i64 n_or_T;
  i64 npoints;
  double discrepancy;  // NaN when the height carries no points
};

struct RateReport {
  std::vector<RateRow> per_n;
  std::vector<RateRow> per_T;
  std::optional<FitResult> per_n_fit;
  std::optional<FitResult> per_T_fit;
  double thm_cap_exponent = 0.0;    // -(d-1)/(2d+3), the cap-discrepancy rate
  double thm_point_exponent = 0.0;  // -d/(2d+2), the pointwise rate
};

// Discrepancy diagnostics: per-height rows restricted to gcd(n, level) = 1 and
// cumulative rows per T, with log-log decay fits where enough data exists. The
// theorem exponents are attached for comparison only.
RateReport rate_report(const QuadraticForm& form, const std::vector<i64>& heights,
                       const std::vector<i64>& Ts, const std::vector<CapSpec>& caps);

}  // namespace ellip
