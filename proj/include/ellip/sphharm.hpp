#pragma once

#include <Eigen/Dense>
#include <functional>
#include <utility>
#include <vector>

#include "ellip/lattice_enum.hpp"
#include "ellip/quadform.hpp"
#include "ellip/rational.hpp"

namespace ellip {

using f128 = __float128;

// Homogeneous polynomial with exact rational coefficients, harmonic for the
// form's Laplacian when produced by harmonic_basis.
struct HarmonicPoly {
  int r = 0;
  int degree = 0;
  // multi-index (length r, entries summing to degree) -> nonzero coefficient
  std::vector<std::pair<std::vector<int>, Rat>> terms;

  Rat eval_integer(const VecZ& m) const;
  double eval_real(const Eigen::VectorXd& x) const;
};

struct ZonalSpec {
  int d = 2;  // sphere dimension, ambient R^{d+1}
  int nu = 0;
};

// dim of the degree-nu spherical-harmonic space on S^d:
// C(d+nu, nu) - C(d-2+nu, nu-2), negative lower index reading as zero.
i64 dim_harmonic(int d, int nu);

// Gegenbauer C_nu^lambda(t) by the three-term recurrence.
double gegenbauer(int nu, double lambda, double t);

// Z_nu(x,y) = n(nu) C_nu^lambda(<x,y>) / C_nu^lambda(1), lambda = (d-1)/2.
double zonal(const ZonalSpec& spec, const Eigen::VectorXd& x, const Eigen::VectorXd& y);

// Basis of the exact rational nullspace of the form's Laplacian
// sum_{ij} adj(A)_{ij} d_i d_j on homogeneous degree-nu polynomials, each
// element scaled to a primitive integer coefficient vector. The dimension is
// checked against the binomial formula.
std::vector<HarmonicPoly> harmonic_basis(const QuadraticForm& form, int nu);

HarmonicPoly constant_poly(int r);

// r_Theta(n) = sum of P(m) over representations of n, exact.
Rat theta_coeff(const QuadraticForm& form, const HarmonicPoly& P, i64 n);

// All shells at once: out[k] = r_Theta(k) for k <= kmax, one traversal.
std::vector<Rat> theta_table(const QuadraticForm& form, const HarmonicPoly& P, i64 kmax);

struct WeylRecord {
  i64 n;
  Rat direct;       // summed over the height-n points
  Rat mobius_side;  // Moebius-twisted theta combination; must equal direct
};

// Weyl sum P_nu(Omega_n) = n^{-nu} sum_{x in Omega_n} P(m): computed directly
// over the height-n points and again as n^{-nu} sum_{delta|n} mu(delta)
// delta^nu r_Theta(n^2/delta^2); the two must agree exactly.
Rat weyl_sum(const QuadraticForm& form, const HarmonicPoly& P, i64 n);
std::vector<WeylRecord> weyl_sums(const QuadraticForm& form, const HarmonicPoly& P, i64 nmax);

struct SpectralResult {
  double sup_norm = 0.0;
  std::vector<double> values;       // projection sampled on the fixed test grid
  double self_check_residual = 0.0; // reproduction error of the built-in zonal check
};

// The fixed 100-point test grid on S^2 where projections are sampled.
std::vector<Eigen::Vector3d> spectral_test_grid();

// Degree-nu spectral projection on S^2: F_nu(x) = int F(y) Z_nu(x,y) dmu(y),
// by Gauss-Legendre (polar) x uniform (azimuth) product quadrature carried out
// in 128-bit floating point; smooth projections down at the 1e-25 scale stay
// above the rounding floor. The quadrature is validated on every call by
// projecting a zonal harmonic of the same degree onto itself.
SpectralResult spectral_project(const std::function<f128(f128, f128, f128)>& F, int nu,
                                int n_polar = 48, int n_azimuth = 96);

}  // namespace ellip
