#ifndef CLASSFORGE_CUBIC_HPP
#define CLASSFORGE_CUBIC_HPP

#include <gmpxx.h>

#include <array>
#include <map>
#include <utility>
#include <vector>

#include "classforge/arith.hpp"
#include "classforge/errors.hpp"

// Pure cubic fields K = Q(th), th^3 = m, with m squarefree.  Elements and
// ideals are written over the integral basis {1, th, nu}:
//
//   nu = th^2                     when m != +-1 (mod 9)
//   nu = (1 + t*th + th^2)/3      when m  = +-1 (mod 9), t = +-1, t = m (mod 3)
//
// In the second case 3 divides [O_K : Z[th]] and disc = -3m^2; otherwise
// disc = -27m^2.  A field built from negative m is stored as Q(cbrt(|m|))
// with the `negated` flag, since the two are the same field under th -> -th.

namespace classforge::cubic {

struct PureCubicField {
  mpz_class m;                // normalized radicand, >= 2, squarefree
  bool negated = false;       // built from -m
  bool index3 = false;        // 3 | [O_K : Z[th]]
  int t = 0;                  // see header comment; 0 unless index3
  mpz_class disc;
  mpq_class minkowski_bound;  // rational upper estimate of (8/9pi)sqrt|disc|
  long minkowski_floor = 0;   // exact floor of the true bound

  bool operator==(const PureCubicField&) const = default;
};

PureCubicField make_field(const mpz_class& m, WorkMeter* meter = nullptr);

// integral elements, coordinates over {1, th, nu}
using OrderElem = std::array<mpz_class, 3>;

OrderElem o_mul(const PureCubicField& f, const OrderElem& a,
                const OrderElem& b);
mpz_class o_norm(const PureCubicField& f, const OrderElem& a);
mpz_class o_trace(const PureCubicField& f, const OrderElem& a);

// field elements, rational coordinates over the same basis
struct FieldElem {
  mpq_class x, y, z;

  bool operator==(const FieldElem&) const = default;
};

FieldElem to_field(const OrderElem& a);
bool f_zero(const FieldElem& a);
FieldElem f_add(const FieldElem& a, const FieldElem& b);
FieldElem f_scale(const mpq_class& c, const FieldElem& a);
FieldElem f_mul(const PureCubicField& f, const FieldElem& a,
                const FieldElem& b);
FieldElem f_inv(const PureCubicField& f, const FieldElem& a);
mpq_class f_norm(const PureCubicField& f, const FieldElem& a);
mpq_class f_trace(const PureCubicField& f, const FieldElem& a);

// Nonzero ideals of O_K as row Hermite normal forms over {1, th, nu}:
// rows (a,b,c), (0,d,e), (0,0,g) with a,d,g > 0, 0 <= b < d, 0 <= c,e < g.
// norm = index in O_K = a*d*g.
struct CubicIdeal {
  std::array<mpz_class, 9> m{};

  mpz_class& at(int i, int j) { return m[static_cast<std::size_t>(3 * i + j)]; }
  const mpz_class& at(int i, int j) const {
    return m[static_cast<std::size_t>(3 * i + j)];
  }
  OrderElem row(int i) const { return {at(i, 0), at(i, 1), at(i, 2)}; }
  mpz_class norm() const { return at(0, 0) * at(1, 1) * at(2, 2); }
  bool operator==(const CubicIdeal&) const = default;
  bool operator<(const CubicIdeal& o) const { return m < o.m; }
};

CubicIdeal ideal_from_generators(const PureCubicField& f,
                                 const std::vector<OrderElem>& gens,
                                 WorkMeter* meter = nullptr);
CubicIdeal principal_ideal(const PureCubicField& f, const OrderElem& g,
                           WorkMeter* meter = nullptr);
CubicIdeal ideal_mul(const PureCubicField& f, const CubicIdeal& a,
                     const CubicIdeal& b, WorkMeter* meter = nullptr);
CubicIdeal ideal_pow(const PureCubicField& f, const CubicIdeal& a,
                     unsigned long k, WorkMeter* meter = nullptr);
bool ideal_contains(const CubicIdeal& a, const OrderElem& e);
// b subset of a, i.e. a | b
bool ideal_divides(const CubicIdeal& a, const CubicIdeal& b);
unsigned ideal_valuation(const PureCubicField& f, const CubicIdeal& a,
                         const CubicIdeal& p, WorkMeter* meter = nullptr);

struct PrimeFactor {
  CubicIdeal ideal;
  unsigned e = 1, f = 1;

  bool operator==(const PrimeFactor&) const = default;
};

// Factorization of (p); entries sorted by (f, HNF).  Kummer-Dedekind on
// T^3 - m when p does not divide the index; the wild p = 3 index case is
// found by enumerating the index-3 ideal sublattices of O_K directly.
// Every answer is verified by multiplying back to (p) before returning.
std::vector<PrimeFactor> factor_prime(const PureCubicField& f,
                                      const mpz_class& p,
                                      WorkMeter* meter = nullptr);

struct FactorBaseEntry {
  long p = 0;
  std::vector<PrimeFactor> primes;
  std::size_t offset = 0;  // flat column index of primes[0]
};

struct CubicClassGroup {
  PureCubicField field;
  mpz_class h = 1;
  arith::AbelianStructure structure;
  std::vector<FactorBaseEntry> base;
  std::size_t fb_size = 0;
  arith::IntMat relations;              // saturated relation rows
  arith::IntMat chart;                  // V: valuation vector -> cyclic coords
  std::vector<mpz_class> full_divisors;  // length fb_size, trivial 1s kept
  long sweep_radius = 0;                 // radius at which SNF stabilized
};

// Relation harvest over principal ideals (x + y th + z nu) with factor-base
// smooth norm, swept over doubling cube shells until the Smith form stops
// changing.  |disc| capped at 1e6.  min_radius forces the sweep past the
// first stable shell, which lets a caller recheck saturation at a larger
// radius.
CubicClassGroup class_group_cubic(const PureCubicField& f,
                                  WorkMeter* meter = nullptr,
                                  long min_radius = 0);

// Chart coordinates of the class [a]; primes outside the factor base are
// rewritten through an equivalent smooth ideal first (a Minkowski-ball
// element of the prime gives one).
std::vector<mpz_class> ideal_class_coords(const CubicClassGroup& cg,
                                          const CubicIdeal& a,
                                          WorkMeter* meter = nullptr);
mpz_class ideal_class_order(const CubicClassGroup& cg, const CubicIdeal& a,
                            WorkMeter* meter = nullptr);

// alpha * (K*)^2, represented by the odd part of the valuation vector of
// (alpha) plus the sign of the real embedding (= sign of the norm).  Keys
// are (p, i): i-th prime above p in factor_prime order.
struct SquareClass {
  std::map<std::pair<mpz_class, unsigned>, int> parity;  // value always 1
  bool minus = false;
  FieldElem rep;
};

SquareClass square_class(const PureCubicField& f, const FieldElem& a,
                         WorkMeter* meter = nullptr);
SquareClass square_class_add(const PureCubicField& f, const SquareClass& a,
                             const SquareClass& b);
// Exact: decides a.rep / b.rep in (K*)^2, using the parity data as a
// fast negative.
bool square_class_equal(const PureCubicField& f, const SquareClass& a,
                        const SquareClass& b, WorkMeter* meter = nullptr);

// Exact squareness in K: the trace of a square root is a rational root of
// p^4 - 2 e1 p^2 - 8 r p + (e1^2 - 4 e2) with r^2 = N(a); candidates are
// enumerated from divisors and every hit is verified by squaring.
bool is_square(const PureCubicField& f, const FieldElem& a,
               FieldElem* witness = nullptr, WorkMeter* meter = nullptr);

struct PointClass {
  CubicIdeal a, b;      // (u - e^2 th) = a^2 b with b squarefree-supported
  OrderElem generator;  // u - e^2 th over {1, th, nu}
  mpz_class e;
};

// Descent-side factorization for a rational point (px, py) on
// y^2 = x^3 + n, where f realizes Q(th), th^3 = -n.
PointClass class_from_point(const PureCubicField& f, const mpz_class& n,
                            const mpq_class& px, const mpq_class& py,
                            WorkMeter* meter = nullptr);

}  // namespace classforge::cubic

#endif
