#include "ellip/quadform.hpp"

#include <cmath>
#include <fstream>
#include <vector>

#include "ellip/arith.hpp"
#include "ellip/errors.hpp"
#include "json.hpp"

namespace ellip {

namespace {

// Fraction-free (Bareiss) elimination; returns the leading principal minors
// d_1..d_r exactly. For a symmetric matrix these decide positive definiteness.
std::vector<i128> leading_minors(const MatZ& A) {
  int r = (int)A.rows();
  std::vector<std::vector<i128>> m(r, std::vector<i128>(r));
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) m[i][j] = A(i, j);
  std::vector<i128> minors(r);
  i128 prev = 1;
  for (int k = 0; k < r; ++k) {
    minors[k] = m[k][k];
    if (k == r - 1) break;
    if (m[k][k] == 0) {
      // A zero pivot already rules out positive definiteness; later minors are
      // reported as zero and the caller rejects.
      for (int t = k + 1; t < r; ++t) minors[t] = 0;
      break;
    }
    for (int i = k + 1; i < r; ++i)
      for (int j = k + 1; j < r; ++j)
        m[i][j] = (mul_checked(m[k][k], m[i][j]) - mul_checked(m[i][k], m[k][j])) / prev;
    prev = m[k][k];
  }
  return minors;
}

i128 det_exact(const MatZ& A) {
  if (A.rows() == 0) return 1;
  // General fraction-free elimination with row pivoting (for minors that need
  // not be positive definite).
  int r = (int)A.rows();
  std::vector<std::vector<i128>> m(r, std::vector<i128>(r));
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) m[i][j] = A(i, j);
  i128 prev = 1;
  int sign = 1;
  for (int k = 0; k < r - 1; ++k) {
    if (m[k][k] == 0) {
      int piv = -1;
      for (int i = k + 1; i < r; ++i)
        if (m[i][k] != 0) {
          piv = i;
          break;
        }
      if (piv < 0) return 0;
      std::swap(m[k], m[piv]);
      sign = -sign;
    }
    for (int i = k + 1; i < r; ++i)
      for (int j = k + 1; j < r; ++j)
        m[i][j] = (mul_checked(m[k][k], m[i][j]) - mul_checked(m[i][k], m[k][j])) / prev;
    prev = m[k][k];
  }
  return sign * m[r - 1][r - 1];
}

MatZ adjugate_exact(const MatZ& A) {
  int r = (int)A.rows();
  MatZ adj(r, r);
  MatZ minor(r - 1, r - 1);
  for (int i = 0; i < r; ++i) {
    for (int j = 0; j < r; ++j) {
      for (int ii = 0, mi = 0; ii < r; ++ii) {
        if (ii == i) continue;
        for (int jj = 0, mj = 0; jj < r; ++jj) {
          if (jj == j) continue;
          minor(mi, mj) = A(ii, jj);
          ++mj;
        }
        ++mi;
      }
      i128 c = det_exact(minor);
      if (((i + j) & 1) != 0) c = -c;
      if (c > INT64_MAX || c < INT64_MIN) fail(Errc::Overflow, "adjugate entry exceeds 64 bits");
      adj(j, i) = (i64)c;  // transpose of the cofactor matrix
    }
  }
  return adj;
}

i64 level_from_adjugate(const MatZ& adj, i64 det) {
  int r = (int)adj.rows();
  for (i64 N : divisors(2 * det)) {
    bool ok = true;
    for (int i = 0; i < r && ok; ++i) {
      for (int j = 0; j < r && ok; ++j) {
        i128 num = mul_checked((i128)N, (i128)adj(i, j));
        if (num % det != 0) ok = false;
        else if (i == j && ((num / det) & 1) != 0) ok = false;
      }
    }
    if (ok) return N;
  }
  fail(Errc::NumericalBreakdown, "no level found below 2*detA");
}

}  // namespace

QuadraticForm validate_form(const MatZ& A, const std::string& name) {
  if (A.rows() != A.cols()) fail(Errc::NotSymmetric, "Gram matrix must be square");
  int r = (int)A.rows();
  if (r < 3) fail(Errc::UsageError, "forms need at least 3 variables");
  for (int i = 0; i < r; ++i)
    for (int j = i + 1; j < r; ++j)
      if (A(i, j) != A(j, i)) fail(Errc::NotSymmetric, "Gram matrix must be symmetric");
  for (int i = 0; i < r; ++i)
    if ((A(i, i) & 1) != 0) fail(Errc::OddDiagonal, "diagonal entries must be even");

  auto minors = leading_minors(A);
  for (i128 m : minors)
    if (m <= 0) fail(Errc::NotPositiveDefinite, "a leading principal minor is not positive");
  i128 det = minors.back();
  if (det > INT64_MAX) fail(Errc::Overflow, "determinant exceeds 64 bits");

  QuadraticForm form;
  form.r = r;
  form.A = A;
  form.detA = (i64)det;
  form.adjugate = adjugate_exact(A);
  form.name = name;

  // adj(A) * A = det * I is cheap to confirm and guards the cofactor code.
  MatZ prod = form.adjugate * A;
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j)
      if (prod(i, j) != (i == j ? form.detA : 0))
        fail(Errc::NumericalBreakdown, "adjugate identity failed");

  form.level = level_from_adjugate(form.adjugate, form.detA);
  form.paper_compliant =
      form.level % 4 == 0 && (form.level / 4) % 2 == 1 && is_squarefree(form.level / 4);
  form.nebentypus_disc =
      r % 2 == 0 ? ((r / 2) % 2 == 0 ? form.detA : -form.detA) : 2 * form.detA;
  return form;
}

QuadraticForm validate_form(const Eigen::MatrixXd& A, const std::string& name) {
  MatZ Z(A.rows(), A.cols());
  for (int i = 0; i < A.rows(); ++i)
    for (int j = 0; j < A.cols(); ++j) {
      double v = A(i, j);
      double rounded = std::nearbyint(v);
      if (std::abs(v - rounded) > 1e-9) fail(Errc::NotIntegral, "Gram entries must be integers");
      Z(i, j) = (i64)rounded;
    }
  return validate_form(Z, name);
}

i64 compute_level(const QuadraticForm& form) {
  return level_from_adjugate(form.adjugate, form.detA);
}

i64 nebentypus(const QuadraticForm& form) { return form.nebentypus_disc; }

SphereMap sphere_map(const QuadraticForm& form) {
  Eigen::MatrixXd half = form.A.cast<double>() * 0.5;
  Eigen::LLT<Eigen::MatrixXd> llt(half);
  if (llt.info() != Eigen::Success)
    fail(Errc::NumericalBreakdown, "Cholesky factorization of A/2 failed");
  SphereMap map;
  map.B = llt.matrixL().transpose();  // upper triangular, A/2 = B^T B
  map.Binv = map.B.inverse();
  double residual = (form.A.cast<double>() - 2.0 * map.B.transpose() * map.B)
                        .cwiseAbs()
                        .maxCoeff();
  if (residual > 1e-9 * std::max(1.0, form.A.cast<double>().cwiseAbs().maxCoeff()))
    fail(Errc::NumericalBreakdown, "factorization residual too large");
  return map;
}

i64 q_value(const QuadraticForm& form, const VecZ& m) {
  if ((int)m.size() != form.r) fail(Errc::LengthMismatch, "vector length != form rank");
  i128 twice = 0;
  for (int i = 0; i < form.r; ++i) {
    i128 row = 0;
    for (int j = 0; j < form.r; ++j) row = add_checked(row, mul_checked((i128)form.A(i, j), (i128)m(j)));
    twice = add_checked(twice, mul_checked((i128)m(i), row));
  }
  // m^T A m is even: diagonal terms have even coefficients and off-diagonal
  // pairs appear twice.
  i128 q = twice / 2;
  if (q < 0 || q > INT64_MAX) fail(Errc::Overflow, "Q(m) out of 64-bit range");
  return (i64)q;
}

QuadraticForm sphere_form(int d) {
  if (d < 2) fail(Errc::UsageError, "sphere dimension must be >= 2");
  MatZ A = MatZ::Identity(d + 1, d + 1) * 2;
  return validate_form(A, "sphere");
}

QuadraticForm load_form_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::UsageError, "cannot open form file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    fail(Errc::UsageError, std::string("invalid JSON in form file: ") + e.what());
  }
  if (!j.contains("gram") || !j["gram"].is_array())
    fail(Errc::UsageError, "form file needs a \"gram\" matrix");
  const auto& rows = j["gram"];
  int r = (int)rows.size();
  MatZ A(r, r);
  for (int i = 0; i < r; ++i) {
    if (!rows[i].is_array() || (int)rows[i].size() != r)
      fail(Errc::UsageError, "gram matrix must be square");
    for (int k = 0; k < r; ++k) {
      if (!rows[i][k].is_number_integer())
        fail(Errc::NotIntegral, "gram entries must be exact integers");
      A(i, k) = rows[i][k].get<i64>();
    }
  }
  std::string name = j.value("name", std::string{});
  return validate_form(A, name);
}

}  // namespace ellip
