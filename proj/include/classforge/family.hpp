#ifndef CLASSFORGE_FAMILY_HPP
#define CLASSFORGE_FAMILY_HPP

#include <gmpxx.h>

#include <map>
#include <string>
#include <vector>

#include "classforge/errors.hpp"

// Finite-window family scans: the imaginary quadratic fields Q(sqrt(n - m^3))
// over a range of m, and the pure cubic fields Q(cbrt(n)) over a range of n.
// Every qualifying member gets a row; members a budget knocks out are kept as
// skipped rows, never dropped.

namespace classforge::family {

struct QuadRow {
  mpz_class m;
  mpz_class raw;   // n - m^3 (< 0 for a row to exist)
  mpz_class d;     // squarefree kernel of raw
  mpz_class disc;  // fundamental: d when d = 1 mod 4, else 4d
  mpz_class h;
  std::vector<mpz_class> divisors;
  int lrank = 0;
  bool skipped = false;
  std::string skip_reason;
  // norm-power specialization: smallest u in [1, 1000] with u^2 - d = w^l,
  // w > 1, admitting a primitive ideal of norm w; "n/a" when none does
  bool spec_found = false;
  mpz_class spec_u, spec_w, spec_order;
};

struct CubicRow {
  mpz_class n;
  mpz_class h;
  std::vector<mpz_class> divisors;
  int rank3 = 0;
  bool skipped = false;
  std::string skip_reason;
};

struct ScanSummary {
  bool has_ranks = false;  // false when every row is skipped or absent
  int min_rank = 0, max_rank = 0;
  std::map<int, long> histogram;
  std::string verdict;  // "constant" | "not constant" | "vacuous"
  std::vector<mpz_class> counterexamples;  // keys off the modal rank
};

struct QuadFamilyReport {
  mpz_class n, l, m_from, m_to;
  std::vector<QuadRow> rows;            // sorted by m
  std::vector<mpz_class> excluded;      // m with n - m^3 >= 0 (real side)
  ScanSummary summary;
};

struct CubicFamilyReport {
  mpz_class n_from, n_to;
  std::vector<CubicRow> rows;  // sorted by n
  ScanSummary summary;
};

// pre: m_from <= m_to, range at most 1e5 wide, l prime
QuadFamilyReport scan_quadratic(const mpz_class& n, const mpz_class& l,
                                const mpz_class& m_from,
                                const mpz_class& m_to,
                                WorkMeter* meter = nullptr);

// pre: n_from <= n_to, range at most 1e5 wide
CubicFamilyReport scan_cubic(const mpz_class& n_from, const mpz_class& n_to,
                             WorkMeter* meter = nullptr);

}  // namespace classforge::family

#endif
