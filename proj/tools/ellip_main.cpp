// Command line front end. Every subcommand resolves a quadratic form, runs a
// library routine and writes CSV or JSON to --out (default stdout). Exit codes:
// 0 success, 1 bad usage or bad input, 2 a computation-level invariant failed.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "ellip/analysis.hpp"
#include "ellip/arith.hpp"
#include "ellip/dseries.hpp"
#include "ellip/errors.hpp"
#include "ellip/lattice_enum.hpp"
#include "ellip/quadform.hpp"
#include "ellip/sphharm.hpp"

using json = nlohmann::ordered_json;
using namespace ellip;

namespace {

// Input-shaped failures exit 1, violated computation invariants exit 2.
int exit_code_for(Errc c) {
  switch (c) {
    case Errc::UsageError:
    case Errc::NotSymmetric:
    case Errc::NotPositiveDefinite:
    case Errc::OddDiagonal:
    case Errc::NotIntegral:
    case Errc::ModulusTooLarge:
    case Errc::NotSquarefreeOddPart:
    case Errc::EmptyPointSet:
    case Errc::DegenerateData:
      return 1;
    default:
      return 2;
  }
}

std::string fmt_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

// Output sink: file when --out is given, stdout otherwise. LF line endings and
// '.' decimals come from never touching the classic C locale.
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary);
      if (!file_) fail(Errc::UsageError, "cannot open output file " + path);
    }
  }
  std::ostream& os() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

QuadraticForm resolve_form(const std::string& spec, int dim, bool dim_given) {
  if (spec == "sphere") return sphere_form(dim);
  if (dim_given) fail(Errc::UsageError, "--dim applies only to --form sphere");
  return load_form_file(spec);
}

// principal:N | kronecker:D:N | mod:N:INDEX (index into the deterministic
// enumeration of the full character group mod N).
Character parse_character(const std::string& spec) {
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  auto as_int = [&](const std::string& s) -> i64 {
    try {
      size_t pos = 0;
      i64 v = std::stoll(s, &pos);
      if (pos != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      fail(Errc::UsageError, "bad integer '" + s + "' in character spec " + spec);
    }
  };
  if (parts.size() == 2 && parts[0] == "principal") return principal_character(as_int(parts[1]));
  if (parts.size() == 3 && parts[0] == "kronecker")
    return kronecker_character(as_int(parts[1]), as_int(parts[2]));
  if (parts.size() == 3 && parts[0] == "mod") {
    i64 N = as_int(parts[1]);
    i64 idx = as_int(parts[2]);
    std::vector<Character> group = character_group(N);
    if (idx < 0 || idx >= (i64)group.size())
      fail(Errc::UsageError, "character index out of range for modulus " + std::to_string(N));
    return group[(size_t)idx];
  }
  fail(Errc::UsageError,
       "character spec must be principal:N, kronecker:D:N or mod:N:INDEX, got " + spec);
}

struct FormOpts {
  std::string form = "sphere";
  int dim = 2;
  bool dim_given = false;
};

void add_form_options(CLI::App* sc, FormOpts* fo) {
  sc->add_option("--form", fo->form, "'sphere' or a path to a JSON Gram matrix file")
      ->capture_default_str();
  sc->add_option("--dim", fo->dim, "sphere dimension d (points live on S^d)")
      ->capture_default_str();
}

// ---- subcommand bodies -------------------------------------------------------

int run_info(const QuadraticForm& form, const std::string& out) {
  Sink sink(out);
  json j;
  j["r"] = form.r;
  j["det"] = form.detA;
  j["level"] = form.level;
  j["nebentypus_disc"] = form.nebentypus_disc;
  j["paper_compliant"] = form.paper_compliant;
  sink.os() << j.dump(2) << "\n";
  return 0;
}

int run_count(const QuadraticForm& form, i64 tmax, int jobs, const std::string& out,
              const std::string& points_out) {
  std::vector<CountRecord> rows = omega_cumulative(form, tmax, jobs);
  Sink sink(out);
  std::ostream& os = sink.os();
  os << "n,rep_sq,omega,cumulative\n";
  for (const CountRecord& r : rows)
    os << r.n << ',' << r.rep_sq << ',' << r.omega << ',' << i128_to_string(r.cumulative)
       << '\n';
  if (!points_out.empty()) {
    Sink psink(points_out);
    std::ostream& ps = psink.os();
    ps << "n";
    for (int i = 1; i <= form.r; ++i) ps << ",m" << i;
    ps << '\n';
    for (const CountRecord& r : rows) {
      if (r.omega == 0) continue;
      for (const RationalPoint& p : omega_points(form, r.n)) {
        ps << p.n;
        for (int i = 0; i < form.r; ++i) ps << ',' << p.m(i);
        ps << '\n';
      }
    }
  }
  return 0;
}

int run_points(const QuadraticForm& form, i64 height, const std::string& out) {
  std::vector<RationalPoint> pts = omega_points(form, height);
  Sink sink(out);
  std::ostream& os = sink.os();
  os << "n";
  for (int i = 1; i <= form.r; ++i) os << ",m" << i;
  os << '\n';
  for (const RationalPoint& p : pts) {
    os << p.n;
    for (int i = 0; i < form.r; ++i) os << ',' << p.m(i);
    os << '\n';
  }
  return 0;
}

int run_weyl(const QuadraticForm& form, int degree, int index, i64 nmax, const std::string& out) {
  std::vector<HarmonicPoly> basis = harmonic_basis(form, degree);
  if (index < 0 || index >= (int)basis.size())
    fail(Errc::UsageError, "--index out of range: the degree-" + std::to_string(degree) +
                               " space has dimension " + std::to_string(basis.size()));
  std::vector<WeylRecord> rows = weyl_sums(form, basis[(size_t)index], nmax);
  Sink sink(out);
  std::ostream& os = sink.os();
  os << "n,weyl_direct_num,weyl_direct_den,weyl_mobius_num,weyl_mobius_den,agree\n";
  for (const WeylRecord& r : rows)
    os << r.n << ',' << i128_to_string(r.direct.num()) << ',' << i128_to_string(r.direct.den())
       << ',' << i128_to_string(r.mobius_side.num()) << ','
       << i128_to_string(r.mobius_side.den()) << ','
       << (r.direct == r.mobius_side ? "true" : "false") << '\n';
  return 0;
}

struct IdentityOpts {
  std::string which;
  int k = 0, l = 0, j = 0;
  i64 delta = 1, m = 2, n = 3, M = 5000;
  std::string chi1 = "principal:1", chi2 = "principal:1", chi3 = "principal:1";
};

int run_identities(const IdentityOpts& o, const std::string& out) {
  Character c1 = parse_character(o.chi1);
  Character c2 = parse_character(o.chi2);
  json params;
  json j;
  j["identity"] = o.which;
  VerifyResult res;
  bool holds = true;
  if (o.which == "ramanujan") {
    params = {{"k", o.k}, {"l", o.l}, {"chi1", o.chi1}, {"chi2", o.chi2}, {"M", o.M}};
    res = verify_ramanujan(o.k, o.l, c1, c2, o.M);
  } else if (o.which == "square") {
    params = {{"k", o.k}, {"chi1", o.chi1}, {"chi2", o.chi2}, {"M", o.M}};
    res = verify_square_identity(o.k, c1, c2, o.M);
  } else if (o.which == "delta") {
    params = {{"k", o.k}, {"delta", o.delta}, {"chi1", o.chi1}, {"chi2", o.chi2}, {"M", o.M}};
    res = verify_delta_identity(o.k, c1, c2, o.delta, o.M);
  } else if (o.which == "odd") {
    params = {{"k", o.k},       {"j", o.j},       {"chi1", o.chi1},
              {"chi2", o.chi2}, {"chi3", o.chi3}, {"M", o.M}};
    res = verify_odd_identity(o.k, o.j, c1, c2, parse_character(o.chi3), o.M);
  } else if (o.which == "mult") {
    params = {{"k", o.k}, {"chi1", o.chi1}, {"chi2", o.chi2}, {"m", o.m}, {"n", o.n}};
    holds = verify_mult_relation(o.k, c1, c2, o.m, o.n);
    res.exact = c1.is_real() && c2.is_real();
    res.max_deviation = holds ? 0.0 : 1.0;
  } else {
    fail(Errc::UsageError, "unknown identity " + o.which);
  }
  j["params"] = params;
  j["max_deviation"] = res.max_deviation;
  j["mode"] = res.exact ? "exact" : "sampled";
  j["tail_bound"] = res.tail_bound;
  if (o.which == "mult") j["holds"] = holds;
  Sink sink(out);
  sink.os() << j.dump(2) << "\n";
  // A violated arithmetic identity with valid inputs is an implementation bug.
  return holds ? 0 : 2;
}

int run_discrepancy(const QuadraticForm& form, i64 tmax, const std::string& by,
                    const std::string& caps_name, const std::string& out) {
  if (caps_name != "default") fail(Errc::UsageError, "only --caps default is available");
  std::vector<CapSpec> caps = default_cap_family(form.r - 1);
  std::vector<i64> heights, Ts;
  if (by == "n") {
    for (i64 n = 1; n <= tmax; ++n) heights.push_back(n);
  } else {
    for (i64 div : {8, 4, 2, 1}) {
      i64 T = tmax / div;
      if (T >= 1 && (Ts.empty() || Ts.back() != T)) Ts.push_back(T);
    }
  }
  RateReport rep = rate_report(form, heights, Ts, caps);
  Sink sink(out);
  std::ostream& os = sink.os();
  os << "T_or_n,npoints,discrepancy\n";
  for (const RateRow& r : (by == "n" ? rep.per_n : rep.per_T))
    os << r.n_or_T << ',' << r.npoints << ',' << fmt_double(r.discrepancy) << '\n';
  const std::optional<FitResult>& fit = by == "n" ? rep.per_n_fit : rep.per_T_fit;
  if (fit)
    std::cerr << "fitted decay exponent " << fmt_double(fit->exponent)
              << " (cap-rate reference " << fmt_double(rep.thm_cap_exponent)
              << ", pointwise reference " << fmt_double(rep.thm_point_exponent) << ")\n";
  return 0;
}

int run_perron(const QuadraticForm& form, double T, double beta, const std::vector<double>& Hs,
               i64 M, const std::string& out) {
  if (M < (i64)T + 1) fail(Errc::UsageError, "--M must exceed T");
  CoeffSeq rq = build_RQ(form, M);
  i128 exact = 0;
  for (i64 n = 1; n <= (i64)T; ++n) exact += (*rq.exact)[(size_t)n];
  // compute every row before emitting so parameter errors leave no partial file
  std::ostringstream rows;
  for (double H : Hs) {
    double tail = 0.0;
    cplx val = perron_truncated(rq, T, beta, H, &tail);
    double err = std::abs(val.real() - (double)exact);
    rows << fmt_double(H) << ',' << fmt_double(val.real()) << ',' << fmt_double(val.imag()) << ','
         << i128_to_string(exact) << ',' << fmt_double(err) << '\n';
    std::cerr << "H=" << fmt_double(H) << " coefficient-tail estimate " << fmt_double(tail)
              << "\n";
  }
  Sink sink(out);
  sink.os() << "H,re,im,exact,abs_error\n" << rows.str();
  return 0;
}

int run_char_table(i64 modulus, const std::string& out) {
  std::vector<Character> group = character_group(modulus);
  Sink sink(out);
  std::ostream& os = sink.os();
  os << "residue,char_index,re,im\n";
  for (size_t idx = 0; idx < group.size(); ++idx)
    for (i64 a = 0; a < modulus; ++a) {
      cplx v = group[idx](a);
      os << a << ',' << idx << ',' << fmt_double(v.real()) << ',' << fmt_double(v.imag())
         << '\n';
    }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rational points on spheres and ellipsoids: counting, identities, distribution"};
  app.require_subcommand(1);
  app.fallthrough();  // lets global options like --jobs appear after the subcommand

  int jobs = 1;
  app.add_option("--jobs", jobs, "worker threads for ball traversals")
      ->envname("ELLIP_JOBS")
      ->check(CLI::Range(1, 64));

  FormOpts fo_count, fo_points, fo_weyl, fo_disc, fo_perron, fo_info;
  std::string out_count, out_points, out_weyl, out_ident, out_disc, out_perron, out_char,
      out_info;

  CLI::App* sc_count = app.add_subcommand("count", "per-height point counts up to --tmax (CSV)");
  add_form_options(sc_count, &fo_count);
  i64 count_tmax = 10;
  sc_count->add_option("--tmax", count_tmax, "largest height")->required();
  sc_count->add_option("--out", out_count, "output path (default stdout)");
  std::string points_out;
  sc_count->add_option("--points", points_out, "also write every point (CSV n,m1..mr) to this file");

  CLI::App* sc_points =
      app.add_subcommand("points", "integer coordinates of the height-n points (CSV)");
  add_form_options(sc_points, &fo_points);
  i64 points_height = 1;
  sc_points->add_option("--height", points_height, "height n")->required();
  sc_points->add_option("--out", out_points, "output path (default stdout)");

  CLI::App* sc_weyl = app.add_subcommand(
      "weyl", "Weyl sums of a harmonic basis element, direct vs Moebius-theta (CSV)");
  add_form_options(sc_weyl, &fo_weyl);
  int weyl_degree = 2, weyl_index = 0;
  i64 weyl_nmax = 50;
  sc_weyl->add_option("--degree", weyl_degree, "harmonic degree")->required();
  sc_weyl->add_option("--index", weyl_index, "basis element index")->capture_default_str();
  sc_weyl->add_option("--nmax", weyl_nmax, "largest height")->required();
  sc_weyl->add_option("--out", out_weyl, "output path (default stdout)");

  CLI::App* sc_ident =
      app.add_subcommand("identities", "verify a divisor-sum identity, report deviation (JSON)");
  IdentityOpts io;
  sc_ident->add_option("--which", io.which, "ramanujan | square | delta | odd | mult")
      ->required()
      ->check(CLI::IsMember({"ramanujan", "square", "delta", "odd", "mult"}));
  sc_ident->add_option("--k", io.k, "first weight")->capture_default_str();
  sc_ident->add_option("--l", io.l, "second weight (ramanujan)")->capture_default_str();
  sc_ident->add_option("--j", io.j, "twist weight (odd)")->capture_default_str();
  sc_ident->add_option("--delta", io.delta, "shift divisor (delta)")->capture_default_str();
  sc_ident->add_option("--m", io.m, "first argument (mult)")->capture_default_str();
  sc_ident->add_option("--n", io.n, "second argument (mult)")->capture_default_str();
  sc_ident->add_option("--M", io.M, "truncation length")->capture_default_str();
  sc_ident->add_option("--chi1", io.chi1, "character spec")->capture_default_str();
  sc_ident->add_option("--chi2", io.chi2, "character spec")->capture_default_str();
  sc_ident->add_option("--chi3", io.chi3, "character spec (odd)")->capture_default_str();
  sc_ident->add_option("--out", out_ident, "output path (default stdout)");

  CLI::App* sc_disc = app.add_subcommand(
      "discrepancy", "cap discrepancy per height or cumulatively per threshold (CSV)");
  add_form_options(sc_disc, &fo_disc);
  i64 disc_tmax = 100;
  std::string disc_by = "T", disc_caps = "default";
  sc_disc->add_option("--tmax", disc_tmax, "largest height")->required();
  sc_disc->add_option("--by", disc_by, "T: cumulative ladder tmax/8..tmax; n: per height")
      ->check(CLI::IsMember({"T", "n"}))
      ->capture_default_str();
  sc_disc->add_option("--caps", disc_caps, "cap family")->capture_default_str();
  sc_disc->add_option("--out", out_disc, "output path (default stdout)");

  CLI::App* sc_perron =
      app.add_subcommand("perron", "truncated Perron integral vs the exact count (CSV)");
  add_form_options(sc_perron, &fo_perron);
  double perron_T = 20.5, perron_beta = 2.5;
  std::vector<double> perron_H{100.0};
  i64 perron_M = 500;
  sc_perron->add_option("--T", perron_T, "half-integer threshold")->required();
  sc_perron->add_option("--beta", perron_beta, "abscissa, must exceed the growth degree")
      ->required();
  sc_perron->add_option("--H", perron_H, "integration heights (repeat or comma separated)")
      ->required()
      ->delimiter(',');
  sc_perron->add_option("--M", perron_M, "coefficient truncation")->capture_default_str();
  sc_perron->add_option("--out", out_perron, "output path (default stdout)");

  CLI::App* sc_char = app.add_subcommand("char-table", "full character group mod N (CSV)");
  i64 char_modulus = 4;
  sc_char->add_option("--modulus", char_modulus, "modulus N")->required();
  sc_char->add_option("--out", out_char, "output path (default stdout)");

  CLI::App* sc_info = app.add_subcommand("info", "invariants of the resolved form (JSON)");
  add_form_options(sc_info, &fo_info);
  sc_info->add_option("--out", out_info, "output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    auto form_of = [](CLI::App* sc, const FormOpts& fo) {
      return resolve_form(fo.form, fo.dim, sc->count("--dim") > 0);
    };
    if (*sc_info) return run_info(form_of(sc_info, fo_info), out_info);
    if (*sc_count)
      return run_count(form_of(sc_count, fo_count), count_tmax, jobs, out_count, points_out);
    if (*sc_points) return run_points(form_of(sc_points, fo_points), points_height, out_points);
    if (*sc_weyl)
      return run_weyl(form_of(sc_weyl, fo_weyl), weyl_degree, weyl_index, weyl_nmax, out_weyl);
    if (*sc_ident) return run_identities(io, out_ident);
    if (*sc_disc)
      return run_discrepancy(form_of(sc_disc, fo_disc), disc_tmax, disc_by, disc_caps, out_disc);
    if (*sc_perron)
      return run_perron(form_of(sc_perron, fo_perron), perron_T, perron_beta, perron_H,
                        perron_M, out_perron);
    if (*sc_char) return run_char_table(char_modulus, out_char);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
