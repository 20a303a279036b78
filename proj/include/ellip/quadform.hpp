#pragma once

#include <Eigen/Dense>
#include <string>

#include "ellip/int128.hpp"

namespace ellip {

using MatZ = Eigen::Matrix<i64, Eigen::Dynamic, Eigen::Dynamic>;
using VecZ = Eigen::Matrix<i64, Eigen::Dynamic, 1>;

// A validated integral positive definite form Q(x) = (1/2) x^T A x with even
// diagonal, together with its exactly computed invariants.
struct QuadraticForm {
  int r = 0;                  // number of variables, r = d + 1
  MatZ A;                     // Gram matrix
  MatZ adjugate;              // adj(A) = detA * A^{-1}, exact
  i64 detA = 0;
  i64 level = 0;              // least N with N*A^{-1} integral, even diagonal
  i64 nebentypus_disc = 0;    // D with character n -> kronecker(D, n)
  bool paper_compliant = false;  // N = 4 * (odd squarefree)
  std::string name;
};

struct SphereMap {
  Eigen::MatrixXd B;     // upper triangular, A = 2 B^T B
  Eigen::MatrixXd Binv;
};

// Checks symmetry, integral even diagonal, positive definiteness (leading
// principal minors, exact), and computes determinant, adjugate, level,
// Nebentypus discriminant and the compliance flag.
QuadraticForm validate_form(const MatZ& A, const std::string& name = "");

// Same, after verifying every entry is an exact integer.
QuadraticForm validate_form(const Eigen::MatrixXd& A, const std::string& name = "");

// Least positive N such that N*A^{-1} is integral with even diagonal; searched
// over divisors of 2*detA in increasing order.
i64 compute_level(const QuadraticForm& form);

// Discriminant argument of the theta character: (-1)^{r/2} detA for even r,
// 2 detA for odd r.
i64 nebentypus(const QuadraticForm& form);

SphereMap sphere_map(const QuadraticForm& form);

// Q(m), exact and non-negative for integer vectors.
i64 q_value(const QuadraticForm& form, const VecZ& m);

// The unit sphere form A = 2 I_{d+1}.
QuadraticForm sphere_form(int d);

// Reads {"gram": [[...]], "name": "..."} with exact integer entries.
QuadraticForm load_form_file(const std::string& path);

}  // namespace ellip
