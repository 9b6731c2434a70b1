#include "classforge/family.hpp"

#include <utility>

#include "classforge/arith.hpp"
#include "classforge/cubic.hpp"
#include "classforge/quadform.hpp"

namespace classforge::family {

namespace {

constexpr long kRangeCap = 100000;
constexpr unsigned long kSpecUMax = 1000;

void check_range(const mpz_class& from, const mpz_class& to, const char* who) {
  if (from > to)
    throw invalid_input("bad-range", std::string(who) + ": from > to");
  if (to - from > kRangeCap)
    throw limit_exceeded("range-budget",
                         std::string(who) + ": range wider than 1e5");
}

// summary over the (key, rank) pairs of the unskipped rows
ScanSummary summarize(const std::vector<std::pair<mpz_class, int>>& ranks) {
  ScanSummary s;
  if (ranks.empty()) {
    s.verdict = "vacuous";
    return s;
  }
  s.has_ranks = true;
  s.min_rank = s.max_rank = ranks.front().second;
  for (const auto& [key, r] : ranks) {
    s.min_rank = std::min(s.min_rank, r);
    s.max_rank = std::max(s.max_rank, r);
    ++s.histogram[r];
  }
  s.verdict = s.min_rank == s.max_rank ? "constant" : "not constant";
  if (s.verdict == "constant") return s;
  int modal = s.min_rank;
  for (const auto& [r, count] : s.histogram)
    if (count > s.histogram[modal]) modal = r;
  for (const auto& [key, r] : ranks)
    if (r != modal) s.counterexamples.push_back(key);
  return s;
}

void specialize_row(QuadRow& row, const qf::ClassGroup& cg, const mpz_class& l,
                    WorkMeter& meter) {
  unsigned long lu = l.get_ui();
  for (unsigned long u = 1; u <= kSpecUMax; ++u) {
    meter.charge(1, "specialization search");
    mpz_class t = mpz_class(u) * u - row.d;
    mpz_class w;
    if (mpz_root(w.get_mpz_t(), t.get_mpz_t(), lu) == 0) continue;
    if (w <= 1) continue;
    qf::BQF cls;
    try {
      cls = qf::norm_power_class(row.d, mpz_class(u), w, l, &meter);
    } catch (const invalid_input&) {
      continue;  // e.g. imprimitive ideal; later u may still work
    }
    row.spec_found = true;
    row.spec_u = u;
    row.spec_w = w;
    row.spec_order = qf::class_order(cg, cls);
    return;
  }
}

QuadRow quad_row(const mpz_class& n, const mpz_class& l, const mpz_class& m,
                 WorkMeter& meter) {
  QuadRow row;
  row.m = m;
  row.raw = n - m * m * m;
  row.d = arith::squarefree_kernel(row.raw, &meter).first;
  qf::QuadField k = qf::make_quad_field(row.d);
  row.disc = k.disc;
  qf::ClassGroup cg = qf::class_group(k, &meter);
  row.h = cg.h;
  row.divisors = cg.structure.divisors;
  row.lrank = qf::l_rank(cg, l);
  specialize_row(row, cg, l, meter);
  return row;
}

CubicRow cubic_row(const mpz_class& n, WorkMeter& meter) {
  CubicRow row;
  row.n = n;
  cubic::PureCubicField f = cubic::make_field(n, &meter);
  cubic::CubicClassGroup cg = cubic::class_group_cubic(f, &meter);
  row.h = cg.h;
  row.divisors = cg.structure.divisors;
  row.rank3 = cg.structure.rank_at(3);
  return row;
}

}  // namespace

QuadFamilyReport scan_quadratic(const mpz_class& n, const mpz_class& l,
                                const mpz_class& m_from, const mpz_class& m_to,
                                WorkMeter* meter) {
  check_range(m_from, m_to, "scan_quadratic");
  if (!l.fits_ulong_p() || !arith::is_prime(l))
    throw invalid_input("bad-prime", "scan_quadratic: l must be prime");

  QuadFamilyReport rep;
  rep.n = n;
  rep.l = l;
  rep.m_from = m_from;
  rep.m_to = m_to;
  std::vector<std::pair<mpz_class, int>> ranks;
  for (mpz_class m = m_from; m <= m_to; ++m) {
    if (n - m * m * m >= 0) {
      rep.excluded.push_back(m);
      continue;
    }
    WorkMeter local;
    WorkMeter& mm = meter ? *meter : local;
    QuadRow row;
    try {
      row = quad_row(n, l, m, mm);
    } catch (const limit_exceeded& e) {
      row = QuadRow{};
      row.m = m;
      row.raw = n - m * m * m;
      row.skipped = true;
      row.skip_reason = e.code();
    }
    if (!row.skipped) ranks.emplace_back(m, row.lrank);
    rep.rows.push_back(std::move(row));
  }
  rep.summary = summarize(ranks);
  return rep;
}

CubicFamilyReport scan_cubic(const mpz_class& n_from, const mpz_class& n_to,
                             WorkMeter* meter) {
  check_range(n_from, n_to, "scan_cubic");

  CubicFamilyReport rep;
  rep.n_from = n_from;
  rep.n_to = n_to;
  std::vector<std::pair<mpz_class, int>> ranks;
  for (mpz_class n = n_from; n <= n_to; ++n) {
    WorkMeter local;
    WorkMeter& mm = meter ? *meter : local;
    CubicRow row;
    try {
      row = cubic_row(n, mm);
    } catch (const invalid_input& e) {
      row = CubicRow{};
      row.n = n;
      row.skipped = true;
      row.skip_reason = e.code();
    } catch (const limit_exceeded& e) {
      row = CubicRow{};
      row.n = n;
      row.skipped = true;
      row.skip_reason = e.code();
    }
    if (!row.skipped) ranks.emplace_back(n, row.rank3);
    rep.rows.push_back(std::move(row));
  }
  rep.summary = summarize(ranks);
  return rep;
}

}  // namespace classforge::family
