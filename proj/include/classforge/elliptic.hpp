#ifndef CLASSFORGE_ELLIPTIC_HPP
#define CLASSFORGE_ELLIPTIC_HPP

#include <gmpxx.h>

#include <compare>
#include <vector>

#include "classforge/arith.hpp"
#include "classforge/errors.hpp"

namespace classforge::ec {

// Short Weierstrass curve y^2 = x^3 + a x + b over Q, nonsingular.
struct CurveQ {
  mpq_class a, b;

  mpq_class disc_quantity() const;  // 4a^3 + 27b^2, nonzero
  bool is_integral() const;
};

CurveQ make_curve(const mpq_class& a, const mpq_class& b);

struct PointQ {
  bool at_infinity = true;
  mpq_class x, y;

  static PointQ infinity() { return {}; }
  static PointQ affine(mpq_class px, mpq_class py) {
    PointQ p;
    p.at_infinity = false;
    p.x = std::move(px);
    p.y = std::move(py);
    return p;
  }

  bool operator==(const PointQ& o) const {
    if (at_infinity || o.at_infinity) return at_infinity == o.at_infinity;
    return x == o.x && y == o.y;
  }
};

// infinity first, then lexicographic by (x, y)
bool point_less(const PointQ& p, const PointQ& q);

bool on_curve(const CurveQ& c, const PointQ& p);
PointQ negate_point(const PointQ& p);
PointQ add(const CurveQ& c, const PointQ& p, const PointQ& q);
PointQ multiply(const CurveQ& c, const mpz_class& k, const PointQ& p);

// Candidate integral torsion points: y = 0 or y^2 | 4a^3 + 27b^2.
// pre: a, b integers.  Sorted by (x, y), both signs of y included.
std::vector<PointQ> integral_torsion_candidates(const CurveQ& c,
                                                WorkMeter* meter = nullptr);

struct TorsionGroup {
  std::vector<PointQ> points;  // the whole subgroup, infinity first
  arith::AbelianStructure structure;
  std::vector<PointQ> generators;  // aligned with structure.divisors
};

// pre: a, b integers.  Candidates are filtered by order <= 12; the
// resulting set is checked to be closed under addition and its structure is
// required to land on the short list of torsion groups possible over Q.
TorsionGroup torsion_subgroup(const CurveQ& c, WorkMeter* meter = nullptr);

// |E(F_p)| including the point at infinity, naive O(p) scan.
// pre: p odd prime of good reduction, p <= 1e5 (cap -> limit_exceeded).
long count_points_mod_p(const CurveQ& c, long p);

}  // namespace classforge::ec

#endif
