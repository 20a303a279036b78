#include "ellip/lattice_enum.hpp"

#include <Eigen/Eigenvalues>
#include <atomic>
#include <cstdlib>
#include <mutex>
#include <thread>

#include "ellip/arith.hpp"
#include "ellip/errors.hpp"

namespace ellip {

namespace {

bool lex_less(const VecZ& a, const VecZ& b) {
  for (int i = 0; i < a.size(); ++i)
    if (a(i) != b(i)) return a(i) < b(i);
  return false;
}

// gcd(n, m_0, ..., m_{r-1}) with early exit at 1.
i64 gcd_with(i64 n, const i64* m, int r) {
  i64 g = n;
  for (int i = 0; i < r && g != 1; ++i) g = std::gcd(g, m[i] < 0 ? -m[i] : m[i]);
  return g;
}

}  // namespace

std::vector<VecZ> representations(const QuadraticForm& form, i64 n) {
  if (n < 0) return {};
  SphereMap sm = sphere_map(form);
  std::vector<VecZ> out;
  auto visit = [&](const i64* m, i64 q, i64) {
    if (q != n) return;
    out.emplace_back(Eigen::Map<const VecZ>(m, form.r));
  };
  enumerate_ball(form, sm.B, n, false, visit);
  std::sort(out.begin(), out.end(), lex_less);
  return out;
}

i64 rep_count(const QuadraticForm& form, i64 n) {
  if (n < 0) return 0;
  SphereMap sm = sphere_map(form);
  i64 count = 0;
  auto visit = [&](const i64*, i64 q, i64 w) {
    if (q == n) count += w;
  };
  enumerate_ball(form, sm.B, n, true, visit);
  return count;
}

std::vector<VecZ> representations_boxsearch(const QuadraticForm& form, i64 n) {
  if (n < 0) return {};
  if (n == 0) return {VecZ::Zero(form.r)};
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(form.A.cast<double>());
  double lmin = es.eigenvalues()(0);
  if (lmin <= 0.0) fail(Errc::NotPositiveDefinite, "box search needs a positive definite form");
  i64 L = (i64)std::ceil(std::sqrt(2.0 * (double)n / lmin) + 1e-9);
  std::vector<VecZ> out;
  VecZ m = VecZ::Constant(form.r, -L);
  for (;;) {
    if (q_value(form, m) == (i128)n) out.push_back(m);
    int k = 0;
    while (k < form.r && m(k) == L) m(k++) = -L;
    if (k == form.r) break;
    ++m(k);
  }
  std::sort(out.begin(), out.end(), lex_less);
  return out;
}

std::vector<RationalPoint> omega_points(const QuadraticForm& form, i64 n) {
  if (n <= 0) fail(Errc::UsageError, "height must be positive");
  SphereMap sm = sphere_map(form);
  if (n > 3000000000LL) fail(Errc::Overflow, "height too large");
  i64 nsq = n * n;
  std::vector<RationalPoint> out;
  auto visit = [&](const i64* m, i64 q, i64) {
    if (q != nsq) return;
    if (gcd_with(n, m, form.r) != 1) return;
    out.push_back({Eigen::Map<const VecZ>(m, form.r), n});
  };
  enumerate_ball(form, sm.B, nsq, false, visit);
  std::sort(out.begin(), out.end(),
            [](const RationalPoint& a, const RationalPoint& b) { return lex_less(a.m, b.m); });
  return out;
}

i64 omega_count_mobius(const QuadraticForm& form, i64 n) {
  if (n <= 0) fail(Errc::UsageError, "height must be positive");
  i64 total = 0;
  for (i64 d : divisors(n)) {
    int mu = mobius(d);
    if (mu == 0) continue;
    i64 q = (n / d) * (n / d);
    total += mu * rep_count(form, q);
  }
  return total;
}

i64 omega_count_mobius(const std::vector<i64>& rep, i64 n) {
  if (n <= 0) fail(Errc::UsageError, "height must be positive");
  if ((i64)rep.size() <= n * n) fail(Errc::UsageError, "representation table too short");
  i64 total = 0;
  for (i64 d : divisors(n)) {
    int mu = mobius(d);
    if (mu == 0) continue;
    i64 q = (n / d) * (n / d);
    total += mu * rep[q];
  }
  return total;
}

namespace {

struct TableVisitor {
  i64 bound;
  const int32_t* sq;
  int r;
  i64* rep;
  i64* omega;
  void operator()(const i64* m, i64 q, i64 w) {
    if (q > bound) return;  // slack admits a thin shell past the bound
    rep[q] += w;
    int32_t n = sq[q];
    if (n > 0 && gcd_with(n, m, r) == 1) omega[n] += w;
  }
};

}  // namespace

FormTables form_tables(const QuadraticForm& form, i64 T, int jobs) {
  if (T < 1) fail(Errc::UsageError, "height bound must be positive");
  if (T > 3000000) fail(Errc::UsageError, "height bound too large for a dense table");
  i64 bound = T * T;
  SphereMap sm = sphere_map(form);

  std::vector<int32_t> sq(bound + 1, -1);
  for (i64 n = 0; n <= T; ++n) sq[n * n] = (int32_t)n;

  FormTables tables;
  tables.tmax = T;
  tables.rep.assign(bound + 1, 0);
  tables.omega_direct.assign(T + 1, 0);

  if (jobs < 1) jobs = 1;
  if (jobs > 64) jobs = 64;

  TableVisitor main_visit{bound, sq.data(), form.r, tables.rep.data(),
                          tables.omega_direct.data()};
  BallTraverser<TableVisitor> probe(form, sm.B, bound, main_visit);
  i64 vmax = probe.top_range();

  if (jobs == 1 || vmax < 2) {
    probe.run(true);
    return tables;
  }

  std::atomic<i64> next{0};
  std::mutex merge_mutex;
  auto worker = [&]() {
    std::vector<i64> rep_local(bound + 1, 0);
    std::vector<i64> omega_local(T + 1, 0);
    TableVisitor visit{bound, sq.data(), form.r, rep_local.data(), omega_local.data()};
    BallTraverser<TableVisitor> tr(form, sm.B, bound, visit);
    for (;;) {
      i64 v = next.fetch_add(1);
      if (v > vmax) break;
      tr.run_top_value(v, v > 0 ? 2 : 1, v == 0);
    }
    std::lock_guard<std::mutex> lock(merge_mutex);
    for (i64 k = 0; k <= bound; ++k) tables.rep[k] += rep_local[k];
    for (i64 n = 0; n <= T; ++n) tables.omega_direct[n] += omega_local[n];
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  return tables;
}

std::vector<CountRecord> omega_cumulative(const FormTables& tables) {
  std::vector<CountRecord> records;
  records.reserve(tables.tmax);
  i128 cumulative = 0;
  for (i64 n = 1; n <= tables.tmax; ++n) {
    i64 omega = omega_count_mobius(tables.rep, n);
    if (omega != tables.omega_direct[n])
      fail(Errc::MismatchDetected,
           "sieved and directly counted point totals disagree at height " + std::to_string(n));
    cumulative += omega;
    records.push_back({n, tables.rep[n * n], omega, cumulative});
  }
  return records;
}

std::vector<CountRecord> omega_cumulative(const QuadraticForm& form, i64 T, int jobs) {
  return omega_cumulative(form_tables(form, T, jobs));
}

}  // namespace ellip
