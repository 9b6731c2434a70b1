#ifndef CLASSFORGE_QUADFORM_HPP
#define CLASSFORGE_QUADFORM_HPP

#include <gmpxx.h>

#include <vector>

#include "classforge/arith.hpp"
#include "classforge/errors.hpp"
#include "classforge/group_structure.hpp"

namespace classforge::qf {

// Imaginary quadratic field Q(sqrt(d)), d < 0 squarefree.
struct QuadField {
  mpz_class d;
  mpz_class disc;  // d when d = 1 mod 4, else 4d
};

QuadField make_quad_field(const mpz_class& d);

// Primitive positive definite integral form a x^2 + b xy + c y^2.
// Coefficients stay within long; every routine that can grow them works
// through __int128 and the discriminant budget keeps that safe.
struct BQF {
  long a = 1, b = 0, c = 0;

  long disc() const;
  bool operator==(const BQF&) const = default;
};

struct FormLess {
  bool operator()(const BQF& f, const BQF& g) const {
    if (f.a != g.a) return f.a < g.a;
    if (f.b != g.b) return f.b < g.b;
    return f.c < g.c;
  }
};

BQF principal_form(long disc);
bool is_reduced(const BQF& f);
BQF reduce(BQF f, WorkMeter* meter = nullptr);
BQF inverse_form(const BQF& f);
// Gauss composition, result reduced.  pre: equal discriminants.
BQF compose(const BQF& f, const BQF& g, WorkMeter* meter = nullptr);

using FormChart = grp::StructureResult<BQF, FormLess>;

struct ClassGroup {
  QuadField field;
  std::vector<BQF> forms;  // all reduced forms, ordered by (a, b, c)
  mpz_class h;
  arith::AbelianStructure structure;
  std::vector<BQF> generators;  // aligned with structure.divisors
  FormChart chart;
};

// pre: |disc| <= 1e8 and h <= 1e4 (both are work budgets).
ClassGroup class_group(const QuadField& k, WorkMeter* meter = nullptr);

mpz_class class_order(const ClassGroup& cg, const BQF& f);
int l_rank(const ClassGroup& cg, const mpz_class& l);

// u^2 - d = w^p picks out the ideal (w, u + sqrt(d)) of norm w; this is its
// form class, reduced.  The class of its p-th power is principal.
// pre: d < 0 squarefree, w > 1, p prime, u^2 - d = w^p exactly.
BQF norm_power_class(const mpz_class& d, const mpz_class& u,
                     const mpz_class& w, const mpz_class& p,
                     WorkMeter* meter = nullptr);

}  // namespace classforge::qf

#endif
