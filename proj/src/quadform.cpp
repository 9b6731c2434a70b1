#include "classforge/quadform.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "classforge/kernels.hpp"

namespace classforge::qf {

namespace {

using i128 = __int128;

constexpr long kDiscBudget = 100000000;  // |disc| cap
constexpr std::size_t kClassBudget = 10000;

// extended gcd, g = s*a + t*b, g >= 0
i128 ext_gcd(i128 a, i128 b, i128& s, i128& t) {
  i128 old_r = a, r = b;
  i128 old_s = 1, cur_s = 0, old_t = 0, cur_t = 1;
  while (r != 0) {
    i128 q = old_r / r;
    i128 tmp = old_r - q * r;
    old_r = r;
    r = tmp;
    tmp = old_s - q * cur_s;
    old_s = cur_s;
    cur_s = tmp;
    tmp = old_t - q * cur_t;
    old_t = cur_t;
    cur_t = tmp;
  }
  if (old_r < 0) {
    old_r = -old_r;
    old_s = -old_s;
    old_t = -old_t;
  }
  s = old_s;
  t = old_t;
  return old_r;
}

long i128_mod(i128 v, long m) {
  long r = static_cast<long>(v % m);
  return r < 0 ? r + m : r;
}

i128 gcd128(i128 a, i128 b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    i128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

}  // namespace

QuadField make_quad_field(const mpz_class& d) {
  if (d >= 0)
    throw invalid_input("nonnegative-d",
                        "make_quad_field: d must be negative");
  for (const auto& [p, e] : arith::factor(d).primes)
    if (e > 1)
      throw invalid_input("not-squarefree",
                          "make_quad_field: d must be squarefree");
  QuadField k;
  k.d = d;
  mpz_class r = d % 4;  // in (-4, 0]
  k.disc = (r == -3) ? d : 4 * d;  // d = 1 mod 4 iff d % 4 == -3
  return k;
}

long BQF::disc() const {
  i128 v = static_cast<i128>(b) * b - 4 * static_cast<i128>(a) * c;
  return static_cast<long>(v);
}

BQF principal_form(long disc) {
  long b = ((disc % 2) + 2) % 2;
  return {1, b, static_cast<long>((static_cast<i128>(b) - disc) / 4)};
}

bool is_reduced(const BQF& f) {
  if (!(-f.a < f.b && f.b <= f.a && f.a <= f.c)) return false;
  if (f.a == f.c && f.b < 0) return false;
  return true;
}

BQF reduce(BQF f, WorkMeter* meter) {
  if (f.a <= 0 || f.disc() >= 0)
    throw invalid_input("not-positive-definite",
                        "reduce: form must be positive definite");
  WorkMeter local;
  WorkMeter& m = meter ? *meter : local;
  for (;;) {
    m.charge(1, "reduce");
    if (f.b > f.a || f.b <= -f.a) {
      // translate b into (-a, a]
      long r = i128_mod(f.b, 2 * f.a);
      if (r > f.a) r -= 2 * f.a;
      i128 k = (static_cast<i128>(f.b) - r) / (2 * f.a);
      // c' = c - k (b + r) / 2
      i128 nc = static_cast<i128>(f.c) - k * ((static_cast<i128>(f.b) + r) / 2);
      f.b = r;
      f.c = static_cast<long>(nc);
    } else if (f.a > f.c) {
      f = {f.c, -f.b, f.a};
    } else {
      if (f.a == f.c && f.b < 0) f.b = -f.b;
      break;
    }
  }
  return f;
}

BQF inverse_form(const BQF& f) { return reduce({f.a, -f.b, f.c}); }

// Composition of primitive forms of the same discriminant, computed as the
// product of the corresponding ideals.  With w = (D + sqrt(D))/2 the form
// (a, b, c) maps to the lattice spanned by (a, 0) and (-m, 1) in the basis
// {1, w}, where m = (b + D)/2.  The four pairwise products of generators
// span the product lattice; reducing those rows to the Hermite basis
// (A, 0), (B, g) gives A g = a1 a2, and dividing out the content g leaves
// the primitive composite with a3 = a1 a2 / g^2 and b3 = -2 B/g - D.
BQF compose(const BQF& f1, const BQF& f2, WorkMeter* meter) {
  if (f1.disc() != f2.disc())
    throw invalid_input("disc-mismatch",
                        "compose: forms have different discriminants");
  const i128 d = f1.disc();
  const i128 m1 = (static_cast<i128>(f1.b) + d) / 2;
  const i128 m2 = (static_cast<i128>(f2.b) + d) / 2;

  i128 rows[4][2] = {
      {static_cast<i128>(f1.a) * f2.a, 0},
      {-static_cast<i128>(f1.a) * m2, f1.a},
      {-static_cast<i128>(f2.a) * m1, f2.a},
      {m1 * m2 + (d - d * d) / 4, d - m1 - m2},
  };

  i128 bx = 0, by = 0, acc = 0;
  for (auto& row : rows) {
    if (row[1] == 0) {
      acc = gcd128(acc, row[0]);
      continue;
    }
    i128 u, v;
    i128 g = ext_gcd(by, row[1], u, v);
    i128 nx = u * bx + v * row[0];
    acc = gcd128(acc, (row[1] / g) * bx - (by / g) * row[0]);
    bx = nx;
    by = g;
  }

  const i128 big_a = acc < 0 ? -acc : acc;
  const i128 g = by;
  if (g <= 0 || big_a * g != static_cast<i128>(f1.a) * f2.a ||
      bx % g != 0 || big_a % g != 0)
    throw std::logic_error("compose: product lattice is not an ideal");

  i128 b0 = bx % big_a;
  if (b0 < 0) b0 += big_a;
  const i128 a3 = big_a / g;
  const i128 b3 = -2 * (b0 / g) - d;
  if ((b3 * b3 - d) % (4 * a3) != 0)
    throw std::logic_error("compose: composite form is not integral");
  const i128 c3 = (b3 * b3 - d) / (4 * a3);
  BQF out{static_cast<long>(a3), static_cast<long>(b3),
          static_cast<long>(c3)};
  return reduce(out, meter);
}

ClassGroup class_group(const QuadField& k, WorkMeter* meter) {
  WorkMeter local;
  WorkMeter& m = meter ? *meter : local;
  if (abs(k.disc) > kDiscBudget)
    throw limit_exceeded("disc-budget",
                         "class_group: |disc| above the 1e8 budget");
  long disc = k.disc.get_si();

  auto rows = kernels::forms_enumerate_auto(disc, m);
  if (rows.size() > kClassBudget)
    throw limit_exceeded("class-number-budget",
                         "class_group: h above the 1e4 budget");

  ClassGroup cg;
  cg.field = k;
  cg.forms.reserve(rows.size());
  for (const auto& r : rows) cg.forms.push_back({r.a, r.b, r.c});
  cg.h = static_cast<unsigned long>(cg.forms.size());

  auto comp = [&m](const BQF& x, const BQF& y) { return compose(x, y, &m); };
  cg.chart =
      grp::abelian_structure(cg.forms, principal_form(disc), comp, FormLess{}, m);
  cg.structure = cg.chart.structure;
  cg.generators = cg.chart.generators;
  return cg;
}

mpz_class class_order(const ClassGroup& cg, const BQF& f) {
  return cg.chart.order_of(reduce(BQF(f)));
}

int l_rank(const ClassGroup& cg, const mpz_class& l) {
  return cg.structure.rank_at(l);
}

BQF norm_power_class(const mpz_class& d, const mpz_class& u,
                     const mpz_class& w, const mpz_class& p,
                     WorkMeter* meter) {
  QuadField k = make_quad_field(d);
  if (w <= 1)
    throw invalid_input("bad-norm", "norm_power_class: w must exceed 1");
  if (!arith::is_prime(p))
    throw invalid_input("bad-exponent", "norm_power_class: p must be prime");
  mpz_class wp;
  mpz_pow_ui(wp.get_mpz_t(), w.get_mpz_t(), p.get_ui());
  if (u * u - d != wp)
    throw invalid_input("not-norm-power",
                        "norm_power_class: u^2 - d != w^p");
  if (abs(k.disc) > kDiscBudget || w > kDiscBudget)
    throw limit_exceeded("disc-budget",
                         "norm_power_class: |disc| above the 1e8 budget");

  long wl = w.get_si();
  long disc = k.disc.get_si();
  bool even_disc = k.disc % 2 == 0;

  auto mod_2w = [&](const mpz_class& v) {
    mpz_class r = v % (2 * w);
    if (r < 0) r += 2 * w;
    return r.get_si();
  };

  // b is pinned mod 2w by u; for odd disc the two lifts of u mod w are
  // tested against b^2 = disc (mod 4w) and at most one survives.
  std::vector<long> cands;
  if (even_disc) {
    cands.push_back(mod_2w(2 * u));
  } else {
    long u0 = mod_2w(u);
    cands.push_back(u0);
    cands.push_back((u0 + wl) % (2 * wl));
  }
  for (long b : cands) {
    if ((b & 1) != (disc & 1)) continue;
    i128 num = static_cast<i128>(b) * b - disc;
    if (num % (4 * static_cast<i128>(wl)) != 0) continue;
    long c = static_cast<long>(num / (4 * wl));
    if (std::gcd(std::gcd(wl, b), c) != 1)
      throw invalid_input("imprimitive-form",
                          "norm_power_class: form is not primitive");
    BQF cls = reduce({wl, b, c}, meter);
    // the construction only yields a p-torsion class when the primes of w
    // stay separated from their conjugates (e.g. even w over d = 1 mod 8
    // breaks it); verify the defining property instead of trusting it
    BQF acc = principal_form(disc);
    for (unsigned long i = 0; i < p.get_ui(); ++i) acc = compose(acc, cls, meter);
    if (!(acc == principal_form(disc)))
      throw invalid_input("obstructed-ideal",
                          "norm_power_class: class^p is not principal");
    return cls;
  }
  throw invalid_input("no-ideal",
                      "norm_power_class: no ideal of norm w exists");
}

}  // namespace classforge::qf
