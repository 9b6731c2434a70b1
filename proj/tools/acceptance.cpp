// Acceptance gate: eight timed end-to-end checks over the library and the
// CLI, one [PASS]/[FAIL] line each.  Exits with the number of failures.
//
// The CLI check needs the binary; it looks at $CLASSFORGE_BIN first and
// falls back to the build-time path.

#include <gmpxx.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "classforge/arith.hpp"
#include "classforge/cubic.hpp"
#include "classforge/descent.hpp"
#include "classforge/elliptic.hpp"
#include "classforge/errors.hpp"
#include "classforge/family.hpp"
#include "classforge/quadform.hpp"
#include "classforge/report.hpp"

#ifndef CLASSFORGE_DEFAULT_BIN
#define CLASSFORGE_DEFAULT_BIN "classforge"
#endif

namespace {

using namespace classforge;
using nlohmann::json;

std::string str(const mpz_class& z) { return z.get_str(); }

template <class... A>
std::string msg(A&&... a) {
  std::ostringstream os;
  (os << ... << a);
  return os.str();
}

// ---- 1. torsion pins with #E(F_p) divisibility ---------------------------

std::string check_torsion() {
  struct Case {
    long b;
    std::vector<long> divisors;
  };
  const Case cases[] = {{1, {6}}, {4, {3}}, {-1, {2}}, {17, {}}};
  for (const auto& cs : cases) {
    ec::CurveQ c = ec::make_curve(0, cs.b);
    ec::TorsionGroup t = ec::torsion_subgroup(c);
    std::vector<mpz_class> want(cs.divisors.begin(), cs.divisors.end());
    if (t.structure.divisors != want)
      return msg("torsion of y^2 = x^3 + (", cs.b, ") has ",
                 t.structure.divisors.size(), " invariant factors, wrong");
    long order = static_cast<long>(t.points.size());
    int used = 0;
    for (long p = 3; used < 3; p += 2) {
      if (!arith::is_prime(p)) continue;
      if (mpz_class(c.disc_quantity().get_num() % p) == 0) continue;
      long np = ec::count_points_mod_p(c, p);
      if (np % order != 0)
        return msg("|torsion| = ", order, " does not divide |E(F_", p,
                   ")| = ", np, " for b = ", cs.b);
      ++used;
    }
  }
  return {};
}

// ---- 2. exact group law on random triples --------------------------------

std::string check_group_law() {
  std::mt19937_64 rng(0x5eed6a77ULL);
  auto pick = [&](long lo, long hi) {
    return lo + static_cast<long>(rng() % static_cast<unsigned long>(hi - lo + 1));
  };
  int done = 0;
  while (done < 1000) {
    long x1 = pick(-9, 9), y1 = pick(1, 9) * (rng() & 1 ? 1 : -1);
    long x2 = pick(-9, 9), y2 = pick(1, 9) * (rng() & 1 ? 1 : -1);
    if (x1 == x2) continue;
    // the curve through both points: two conditions, linear in (a, b)
    mpq_class c1 = mpq_class(y1) * y1 - mpq_class(x1) * x1 * x1;
    mpq_class c2 = mpq_class(y2) * y2 - mpq_class(x2) * x2 * x2;
    mpq_class a = (c1 - c2) / (x1 - x2);
    mpq_class b = c1 - a * x1;
    if (4 * a * a * a + 27 * b * b == 0) continue;
    ec::CurveQ c = ec::make_curve(a, b);
    ec::PointQ P = ec::PointQ::affine(x1, y1);
    ec::PointQ Q = ec::PointQ::affine(x2, y2);
    ec::PointQ R = (rng() & 1) ? ec::add(c, P, Q) : ec::add(c, P, P);
    if (!ec::on_curve(c, R)) return msg("sum off curve at triple ", done);
    if (!(ec::add(c, ec::add(c, P, Q), R) == ec::add(c, P, ec::add(c, Q, R))))
      return msg("associativity failed at triple ", done);
    if (!(ec::add(c, P, Q) == ec::add(c, Q, P)))
      return msg("commutativity failed at triple ", done);
    if (!(ec::add(c, P, ec::PointQ::infinity()) == P))
      return msg("identity failed at triple ", done);
    if (!(ec::add(c, P, ec::negate_point(P)) == ec::PointQ::infinity()))
      return msg("inverse failed at triple ", done);
    ++done;
  }
  return {};
}

// ---- 3. quadratic class groups -------------------------------------------

std::string check_quadratic() {
  const std::pair<long, long> pins[] = {{-23, 3}, {-7, 1}, {-26, 6}, {-31, 3}};
  for (auto [d, h] : pins) {
    qf::ClassGroup cg = qf::class_group(qf::make_quad_field(d));
    if (cg.h != h)
      return msg("h(", cg.field.disc.get_str(), ") = ", str(cg.h), ", want ",
                 h);
  }
  for (long disc = -3; disc >= -4000; --disc) {
    long d;
    if (((disc % 4) + 4) % 4 == 1) {
      d = disc;
    } else if (disc % 4 == 0) {
      d = disc / 4;
      long r = ((d % 4) + 4) % 4;
      if (r != 2 && r != 3) continue;
    } else {
      continue;
    }
    if (arith::squarefree_kernel(d).second != 1) continue;
    qf::ClassGroup cg = qf::class_group(qf::make_quad_field(d));
    std::set<qf::BQF, qf::FormLess> forms(cg.forms.begin(), cg.forms.end());
    for (const auto& f : cg.forms) {
      for (const auto& g : cg.forms)
        if (!forms.count(qf::compose(f, g)))
          return msg("composition leaves the class set at disc ", disc);
      if (cg.h % qf::class_order(cg, f) != 0)
        return msg("class order does not divide h at disc ", disc);
    }
  }
  return {};
}

// ---- 4. norm-power specialization ----------------------------------------

std::string check_specialization() {
  qf::ClassGroup c26 = qf::class_group(qf::make_quad_field(-26));
  qf::BQF f26 = qf::norm_power_class(-26, 1, 3, 3);
  if (qf::class_order(c26, f26) != 3)
    return msg("order of the (-26, 1, 3, 3) class is ",
               str(qf::class_order(c26, f26)), ", want 3");

  const std::tuple<long, long, long, long> degenerate[] = {{-7, 1, 2, 3},
                                                           {-2, 5, 3, 3}};
  for (auto [d, u, w, p] : degenerate) {
    qf::ClassGroup cg = qf::class_group(qf::make_quad_field(d));
    qf::BQF f = qf::norm_power_class(d, u, w, p);
    if (qf::class_order(cg, f) != 1)
      return msg("degenerate case d = ", d, " is not principal");
  }

  std::mt19937_64 rng(0x5eed4a11ULL);
  int done = 0, guard = 0;
  while (done < 50) {
    if (++guard > 20000) return msg("only ", done, " valid random instances");
    long p = std::array<long, 3>{3, 5, 7}[rng() % 3];
    long wmax = p == 3 ? 290 : p == 5 ? 28 : 11;
    long w = 2 + static_cast<long>(rng() % static_cast<unsigned long>(wmax - 1));
    mpz_class wp;
    mpz_ui_pow_ui(wp.get_mpz_t(), static_cast<unsigned long>(w),
                  static_cast<unsigned long>(p));
    unsigned long umax = mpz_class(arith::isqrt(wp - 1)).get_ui();
    if (umax == 0) continue;
    mpz_class u = 1 + static_cast<unsigned long>(rng() % umax);
    mpz_class d = u * u - wp;
    if (arith::squarefree_kernel(d).second != 1) continue;
    qf::BQF cls;
    try {
      cls = qf::norm_power_class(d, u, w, p);
    } catch (const invalid_input&) {
      continue;  // construction refused the instance; not a valid case
    }
    mpz_class disc = ((d % 4) + 4) % 4 == 1 ? d : 4 * d;
    qf::BQF acc = qf::principal_form(disc.get_si());
    for (long i = 0; i < p; ++i) acc = qf::compose(acc, cls);
    if (!(acc == qf::principal_form(disc.get_si())))
      return msg("class^", p, " not principal at d = ", str(d), ", u = ",
                 str(u), ", w = ", w);
    ++done;
  }
  return {};
}

// ---- 5. pure cubic fields -------------------------------------------------

std::string check_cubic() {
  if (class_group_cubic(cubic::make_field(2)).h != 1)
    return "h of the field of cbrt(2) is not 1";

  for (long m = 2; m <= 50; ++m) {
    if (arith::squarefree_kernel(m).second != 1) continue;
    cubic::PureCubicField f = cubic::make_field(m);
    // index criterion at 3 for T^3 - m: with t = m mod 3 = +-1 the residual
    // gcd is nontrivial exactly when m = t (mod 9); 3 | m is always tame
    bool wild;
    if (m % 3 == 0) {
      wild = false;
    } else {
      long t = m % 3 == 1 ? 1 : -1;
      wild = (m - t) % 9 == 0;
    }
    if (f.index3 != wild)
      return msg("index-3 split disagrees with the criterion at m = ", m);
    mpz_class want = (wild ? -3 : -27) * mpz_class(m) * m;
    if (f.disc != want)
      return msg("disc(", m, ") = ", str(f.disc), ", want ", str(want));
    for (long p = 2; p <= 100; ++p) {
      if (!arith::is_prime(p)) continue;
      auto factors = cubic::factor_prime(f, p);
      unsigned ef = 0;
      cubic::CubicIdeal prod = cubic::principal_ideal(f, {1, 0, 0});
      for (const auto& pf : factors) {
        ef += pf.e * pf.f;
        for (unsigned i = 0; i < pf.e; ++i)
          prod = cubic::ideal_mul(f, prod, pf.ideal);
      }
      if (ef != 3) return msg("sum of e*f = ", ef, " at m = ", m, ", p = ", p);
      if (!(prod == cubic::principal_ideal(f, {p, 0, 0})))
        return msg("prime factors do not rebuild (", p, ") at m = ", m);
    }
  }

  for (long m : {2, 3, 5, 7, 17}) {
    cubic::PureCubicField f = cubic::make_field(m);
    cubic::CubicClassGroup cg = cubic::class_group_cubic(f);
    cubic::CubicClassGroup wider =
        cubic::class_group_cubic(f, nullptr, 2 * cg.sweep_radius);
    if (!(wider.structure == cg.structure) || wider.h != cg.h)
      return msg("doubling the sweep radius changed the group at m = ", m);
  }
  return {};
}

// ---- 6. descent on y^2 = x^3 + 17 ----------------------------------------

std::string check_descent() {
  std::vector<ec::PointQ> pts = descent::point_search(17, 100);
  const std::pair<long, long> classical[] = {
      {-2, 3}, {-1, 4}, {2, 5}, {4, 9}, {8, 23}};
  for (auto [x, y] : classical) {
    for (long s : {1L, -1L}) {
      ec::PointQ p = ec::PointQ::affine(x, s * y);
      if (std::find(pts.begin(), pts.end(), p) == pts.end())
        return msg("point search missed (", x, ", ", s * y, ")");
    }
  }

  descent::DescentReport two = descent::two_descent_rank(
      17, {ec::PointQ::affine(-2, 3), ec::PointQ::affine(2, 5)});
  if (two.f2_rank != 2)
    return msg("rank of the (-2,3),(2,5) image is ", two.f2_rank, ", want 2");

  // homomorphism on 100 pairs drawn from the found points
  cubic::PureCubicField f = cubic::make_field(-17);
  ec::CurveQ c = ec::make_curve(0, 17);
  auto x_minus_theta = [&](const ec::PointQ& p) {
    return cubic::FieldElem{p.x, f.negated ? 1 : -1, 0};
  };
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = 0; j < pts.size(); ++j) pairs.emplace_back(i, j);
  std::mt19937_64 rng(0x5eedde5cULL);
  std::shuffle(pairs.begin(), pairs.end(), rng);
  int tested = 0;
  for (const auto& [i, j] : pairs) {
    if (tested >= 100) break;
    const ec::PointQ& P = pts[i];
    const ec::PointQ& Q = pts[j];
    ec::PointQ S = ec::add(c, P, Q);
    if (S.at_infinity || S.y == 0) continue;
    try {
      WorkMeter wm(50000000);
      cubic::SquareClass dP = cubic::square_class(f, x_minus_theta(P), &wm);
      cubic::SquareClass dQ = cubic::square_class(f, x_minus_theta(Q), &wm);
      cubic::SquareClass dS = cubic::square_class(f, x_minus_theta(S), &wm);
      cubic::SquareClass sum = cubic::square_class_add(f, dP, dQ);
      if (!cubic::square_class_equal(f, sum, dS, &wm))
        return msg("map not additive at pair (", i, ", ", j, ")");
      ++tested;
    } catch (const limit_exceeded&) {
      continue;  // pair too tall for the per-pair work cap
    }
  }
  if (tested < 100) return msg("only ", tested, " pairs fit the work cap");

  descent::DescentReport rep = descent::selmer_to_classgroup(17, pts);
  if (rep.rows.size() != pts.size())
    return msg("expected ", pts.size(), " class rows, got ", rep.rows.size());
  for (const auto& row : rep.rows) {
    cubic::CubicIdeal sq = cubic::ideal_pow(f, row.cls.a, 2);
    if (!(cubic::ideal_mul(f, sq, row.cls.b) ==
          cubic::principal_ideal(f, row.cls.generator)))
      return msg("a^2 b is not the principal ideal of x - theta at x = ",
                 row.point.x.get_str());
  }
  return {};
}

// ---- 7. family scan -------------------------------------------------------

std::string check_family() {
  family::QuadFamilyReport rep = family::scan_quadratic(1, 2, 2, 50);
  if (rep.rows.size() != 49)
    return msg("expected 49 rows, got ", rep.rows.size());

  std::map<long, qf::ClassGroup> groups;
  for (const auto& row : rep.rows) {
    if (row.skipped) return msg("unexpected skipped row at m = ", str(row.m));
    mpz_class raw = 1 - row.m * row.m * row.m;
    if (row.raw != raw) return msg("raw value wrong at m = ", str(row.m));
    auto [d, s] = arith::squarefree_kernel(raw);
    if (row.d != d) return msg("squarefree kernel wrong at m = ", str(row.m));
    qf::ClassGroup cg = qf::class_group(qf::make_quad_field(d));
    if (cg.field.disc != row.disc || cg.h != row.h ||
        cg.structure.divisors != row.divisors ||
        qf::l_rank(cg, 2) != row.lrank)
      return msg("row disagrees with a direct recomputation at m = ",
                 str(row.m));
    groups.emplace(row.m.get_si(), std::move(cg));
  }

  if (report::scan_report(1, 2, 2, 50, "json") !=
      report::scan_report(1, 2, 2, 50, "json"))
    return "scan report bytes differ between two runs";

  // multiset rule: modal rank (smallest on ties), rows off it are the
  // counterexamples; all-equal is "constant", empty is "vacuous"
  std::map<int, long> hist;
  for (const auto& row : rep.rows) ++hist[row.lrank];
  std::string verdict;
  std::vector<mpz_class> counter;
  if (hist.empty()) {
    verdict = "vacuous";
  } else if (hist.size() == 1) {
    verdict = "constant";
  } else {
    verdict = "not constant";
    int modal = hist.begin()->first;
    for (const auto& [r, k] : hist)
      if (k > hist.at(modal)) modal = r;
    for (const auto& row : rep.rows)
      if (row.lrank != modal) counter.push_back(row.m);
  }
  if (rep.summary.histogram != hist || rep.summary.verdict != verdict ||
      rep.summary.counterexamples != counter)
    return "summary disagrees with the multiset rule";

  json audit = json::parse(report::audit_report());
  const json* entry = nullptr;
  for (const auto& e : audit.at("entries"))
    if (e.at("id") == "quad-2-and-4-torsion") entry = &e;
  if (!entry) return "audit entry for the torsion family claim is missing";
  const json& rows = entry->at("rows");
  if (rows.size() != 49)
    return msg("audit truth table has ", rows.size(), " rows, want 49");
  long holds = 0;
  for (const auto& jr : rows) {
    long m = std::stol(jr.at("m").get<std::string>());
    const qf::ClassGroup& cg = groups.at(m);
    bool two = cg.h % 2 == 0;
    bool four = false;
    for (const auto& form : cg.forms)
      if (qf::class_order(cg, form) % 4 == 0) {
        four = true;
        break;
      }
    if (jr.at("two_torsion").get<bool>() != two ||
        jr.at("four_torsion").get<bool>() != four)
      return msg("audit truth values wrong at m = ", m);
    if (two && four) ++holds;
  }
  if (entry->at("computed") !=
      std::to_string(holds) + "/49 rows for m in [2, 50]")
    return "audit tally does not match the truth table";
  return {};
}

// ---- 8. CLI contract -------------------------------------------------------

struct RunResult {
  int code = -1;
  std::string out;
};

RunResult run_cli(const std::string& bin, const std::string& args) {
  RunResult r;
  std::string cmd = "\"" + bin + "\" " + args + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  std::size_t k;
  while ((k = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, k);
  int st = pclose(p);
  if (WIFEXITED(st)) r.code = WEXITSTATUS(st);
  return r;
}

std::string check_cli(const std::string& bin) {
  if (run_cli(bin, "--help").code != 0)
    return msg("CLI not reachable at ", bin);

  struct Probe {
    std::string args;
    std::function<std::string(const json&)> inspect;
  };
  const Probe probes[] = {
      {"torsion --a 0 --b 1",
       [](const json& j) -> std::string {
         if (j.at("command") != "torsion" || j.at("order") != "6") return "order";
         if (j.at("structure") != json::array({"6"})) return "structure";
         if (j.at("affine_points").size() != 5) return "affine_points";
         return {};
       }},
      {"classgroup --d -23",
       [](const json& j) -> std::string {
         if (j.at("h") != "3" || j.at("discriminant") != "-23") return "h";
         if (j.at("reduced_forms").size() != 3) return "reduced_forms";
         if (!j.at("reduced_forms")[0].at("a").is_string()) return "encoding";
         return {};
       }},
      {"cubic --m 7",
       [](const json& j) -> std::string {
         if (j.at("h") != "3" || j.at("discriminant") != "-1323") return "h";
         if (j.at("index_three") != false) return "index_three";
         return {};
       }},
      {"specialize --d -26 --u 1 --w 3 --p 3",
       [](const json& j) -> std::string {
         if (j.at("order") != "3") return "order";
         if (j.at("class").at("a") != "3") return "class";
         return {};
       }},
      {"descent --n 17 --search-bound 30",
       [](const json& j) -> std::string {
         if (j.at("f2_rank") != "2" || j.at("subgroup_order") != "4")
           return "f2_rank";
         if (j.at("points").size() != j.at("class_rows").size())
           return "class_rows";
         return {};
       }},
      {"scan --n 1 --l 2 --m-from 2 --m-to 5",
       [](const json& j) -> std::string {
         if (j.at("rows").size() != 4) return "rows";
         if (j.at("summary").at("verdict") != "not constant") return "verdict";
         if (!j.at("rows")[0].at("h").is_string()) return "encoding";
         return {};
       }},
      {"scan-cubic --from 2 --to 5",
       [](const json& j) -> std::string {
         if (j.at("rows").size() != 4) return "rows";
         return {};
       }},
      {"audit",
       [](const json& j) -> std::string {
         if (j.at("entries").size() != 5) return "entries";
         return {};
       }},
  };
  for (const auto& probe : probes) {
    RunResult r = run_cli(bin, probe.args);
    if (r.code != 0) return msg("`", probe.args, "` exited ", r.code);
    json j;
    try {
      j = json::parse(r.out);
    } catch (const json::exception&) {
      return msg("`", probe.args, "` did not print JSON");
    }
    std::string bad = probe.inspect(j);
    if (!bad.empty())
      return msg("`", probe.args, "` schema check failed: ", bad);
  }

  RunResult csv = run_cli(bin, "scan --n 1 --l 2 --m-from 2 --m-to 5 --format csv");
  if (csv.code != 0 ||
      csv.out.rfind("m,raw,d,discriminant,h,divisors,l_rank,status", 0) != 0)
    return "CSV header wrong";

  const std::pair<std::string, int> codes[] = {
      {"torsion --a 0", 2},
      {"bogus", 2},
      {"descent --n 12 --search-bound 10", 2},
      {"classgroup --d -104729104729 --budget 100", 3},
  };
  for (const auto& [args, want] : codes) {
    int got = run_cli(bin, args).code;
    if (got != want)
      return msg("`", args, "` exited ", got, ", want ", want);
  }

  std::string cache =
      "/tmp/classforge_acceptance_" + std::to_string(getpid()) + ".json";
  std::remove(cache.c_str());
  RunResult cold = run_cli(bin, "classgroup --d -23 --cache " + cache);
  RunResult warm = run_cli(bin, "classgroup --d -23 --cache " + cache);
  RunResult bare = run_cli(bin, "classgroup --d -23");
  std::remove(cache.c_str());
  if (cold.code != 0 || warm.code != 0 || bare.code != 0)
    return "cached runs did not exit 0";
  if (cold.out != warm.out || cold.out != bare.out)
    return "cache changed the output bytes";
  return {};
}

}  // namespace

int main() {
  const char* env = std::getenv("CLASSFORGE_BIN");
  std::string bin = env && *env ? env : CLASSFORGE_DEFAULT_BIN;

  struct Criterion {
    int id;
    const char* label;
    double budget_s;  // 0 = untimed
    std::function<std::string()> body;
  };
  const Criterion table[] = {
      {1, "rational torsion structures with #E(F_p) cross-check", 1.0,
       check_torsion},
      {2, "exact group law on 1000 random triples", 0, check_group_law},
      {3, "quadratic class numbers, closure, and order divisibility", 5.0,
       check_quadratic},
      {4, "norm-power specialization orders", 0, check_specialization},
      {5, "cubic discriminants, prime splitting, and saturation", 60.0,
       check_cubic},
      {6, "descent rank, homomorphism, and class-group rows", 10.0,
       check_descent},
      {7, "family scan consistency and audit truth table", 60.0, check_family},
      {8, "CLI schema, exit codes, and cache determinism", 0,
       [&bin] { return check_cli(bin); }},
  };

  int failures = 0;
  for (const auto& cr : table) {
    auto t0 = std::chrono::steady_clock::now();
    std::string err;
    try {
      err = cr.body();
    } catch (const std::exception& e) {
      err = msg("exception: ", e.what());
    }
    double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                              t0)
                    .count();
    if (err.empty() && cr.budget_s > 0 && dt >= cr.budget_s)
      err = msg("took ", dt, "s, budget ", cr.budget_s, "s");
    char timing[64];
    if (cr.budget_s > 0)
      std::snprintf(timing, sizeof timing, "%.2fs / %.0fs", dt, cr.budget_s);
    else
      std::snprintf(timing, sizeof timing, "%.2fs", dt);
    if (err.empty()) {
      std::printf("[PASS] %d. %s (%s)\n", cr.id, cr.label, timing);
    } else {
      std::printf("[FAIL] %d. %s (%s): %s\n", cr.id, cr.label, timing,
                  err.c_str());
      ++failures;
    }
    std::fflush(stdout);
  }
  return failures;
}
