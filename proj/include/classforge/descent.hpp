#ifndef CLASSFORGE_DESCENT_HPP
#define CLASSFORGE_DESCENT_HPP

#include <gmpxx.h>

#include <string>
#include <utility>
#include <vector>

#include "classforge/cubic.hpp"
#include "classforge/elliptic.hpp"
#include "classforge/errors.hpp"

// Descent through the cubic field: rational points on y^2 = x^3 + n map by
// P -> x(P) - th (th^3 = -n) into square classes of Q(th), an injection of
// E(Q)/2E(Q) into K*/(K*)^2.  Only the image of the points supplied is
// computed, never the full 2-Selmer group, so every rank reported here is a
// lower bound; reports carry that tag explicitly.

namespace classforge::descent {

struct ClassGroupRow {
  ec::PointQ point;
  cubic::PointClass cls;  // (x - th) cleared to a^2 b
  mpz_class order;        // of [a] in the class group
};

struct DescentReport {
  mpz_class n;
  std::vector<ec::PointQ> points;  // mapped points: affine, y != 0, in order
  // matrix layout: one row per mapped point; parity columns (one per prime
  // ideal in any row's support), the norm-sign bit, then an exact block of
  // coordinates over the greedy class basis.  The parity part alone can
  // collapse distinct classes (even-valuation unit obstructions), so the
  // exact block is what makes rank(matrix) the true rank of the subgroup
  // the classes generate.
  std::vector<std::pair<mpz_class, unsigned>> parity_columns;
  std::size_t unit_columns = 0;
  std::vector<std::vector<int>> matrix;
  int f2_rank = 0;
  std::vector<ClassGroupRow> rows;  // filled by selmer_to_classgroup
  std::string subgroup = "lower-bound subgroup";
};

// All rational points on y^2 = x^3 + n with x = u/e^2, |u| <= height,
// e <= height^(1/4); both y signs, sorted, deterministic.
// pre: n != 0, 1 <= height <= 1e6
std::vector<ec::PointQ> point_search(const mpz_class& n, long height,
                                     WorkMeter* meter = nullptr);

// Square-class matrix and exact F2-rank of the image of the given points.
// Points at infinity and 2-torsion points are excluded from the map (x - th
// degenerates there); T^3 + n must be irreducible.
DescentReport two_descent_rank(const mpz_class& n,
                               const std::vector<ec::PointQ>& points,
                               WorkMeter* meter = nullptr);

// two_descent_rank plus the class-group side: each mapped point's (x - th)
// factored as a^2 b and the order of [a] in Cl(Q(th)).
DescentReport selmer_to_classgroup(const mpz_class& n,
                                   const std::vector<ec::PointQ>& points,
                                   WorkMeter* meter = nullptr);

}  // namespace classforge::descent

#endif
