#include "classforge/elliptic.hpp"

#include <algorithm>

#include "classforge/group_structure.hpp"
#include "classforge/kernels.hpp"

namespace classforge::ec {

mpq_class CurveQ::disc_quantity() const {
  return 4 * a * a * a + 27 * b * b;
}

bool CurveQ::is_integral() const {
  return a.get_den() == 1 && b.get_den() == 1;
}

CurveQ make_curve(const mpq_class& a, const mpq_class& b) {
  CurveQ c{a, b};
  if (c.disc_quantity() == 0)
    throw invalid_input("singular-curve",
                        "make_curve: 4a^3 + 27b^2 = 0, curve is singular");
  return c;
}

bool point_less(const PointQ& p, const PointQ& q) {
  if (p.at_infinity != q.at_infinity) return p.at_infinity;
  if (p.at_infinity) return false;
  int cx = cmp(p.x, q.x);
  if (cx != 0) return cx < 0;
  return cmp(p.y, q.y) < 0;
}

bool on_curve(const CurveQ& c, const PointQ& p) {
  if (p.at_infinity) return true;
  return p.y * p.y == p.x * p.x * p.x + c.a * p.x + c.b;
}

PointQ negate_point(const PointQ& p) {
  if (p.at_infinity) return p;
  return PointQ::affine(p.x, -p.y);
}

PointQ add(const CurveQ& c, const PointQ& p, const PointQ& q) {
  if (!on_curve(c, p) || !on_curve(c, q))
    throw invalid_input("point-off-curve", "add: point is not on the curve");
  if (p.at_infinity) return q;
  if (q.at_infinity) return p;

  mpq_class lambda;
  if (p.x == q.x) {
    if (p.y == -q.y) return PointQ::infinity();
    lambda = (3 * p.x * p.x + c.a) / (2 * p.y);
  } else {
    lambda = (q.y - p.y) / (q.x - p.x);
  }
  mpq_class x3 = lambda * lambda - p.x - q.x;
  mpq_class y3 = lambda * (p.x - x3) - p.y;
  x3.canonicalize();
  y3.canonicalize();
  return PointQ::affine(x3, y3);
}

PointQ multiply(const CurveQ& c, const mpz_class& k, const PointQ& p) {
  mpz_class e = k;
  PointQ base = p;
  if (e < 0) {
    e = -e;
    base = negate_point(base);
  }
  PointQ acc = PointQ::infinity();
  while (e > 0) {
    if (mpz_odd_p(e.get_mpz_t())) acc = add(c, acc, base);
    base = add(c, base, base);
    e >>= 1;
  }
  return acc;
}

namespace {

// integer roots of x^3 + a x + b
std::vector<mpz_class> integer_cubic_roots(const mpz_class& a,
                                           const mpz_class& b,
                                           WorkMeter& meter) {
  std::vector<mpz_class> roots;
  auto check = [&](const mpz_class& x) {
    if (x * x * x + a * x + b == 0) roots.push_back(x);
  };
  if (b == 0) {
    roots.push_back(0);
    if (a < 0) {
      mpz_class r;
      if (arith::is_square(-a, &r) && r != 0) {
        roots.push_back(r);
        roots.push_back(-r);
      }
    }
  } else if (a == 0) {
    mpz_class r, nb = -b;
    if (mpz_root(r.get_mpz_t(), nb.get_mpz_t(), 3)) check(r);
  } else {
    for (const mpz_class& d : arith::divisors(arith::factor(b, &meter), &meter)) {
      check(d);
      check(-d);
    }
  }
  std::sort(roots.begin(), roots.end());
  roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
  return roots;
}

}  // namespace

std::vector<PointQ> integral_torsion_candidates(const CurveQ& c,
                                                WorkMeter* meter) {
  if (!c.is_integral())
    throw invalid_input("nonintegral-model",
                        "torsion candidates need integer a, b");
  WorkMeter local;
  WorkMeter& m = meter ? *meter : local;

  mpz_class az = c.a.get_num(), bz = c.b.get_num();
  std::vector<PointQ> out;
  for (const mpz_class& r : integer_cubic_roots(az, bz, m))
    out.push_back(PointQ::affine(mpq_class(r), mpq_class(0)));

  // y != 0 forces y^2 | 4a^3 + 27b^2, i.e. y divides its square part
  mpz_class D = abs(mpz_class(4 * az * az * az + 27 * bz * bz));
  auto [d, s] = arith::squarefree_kernel(D, &m);
  for (const mpz_class& y : arith::divisors(arith::factor(s, &m), &m)) {
    for (const mpz_class& r : integer_cubic_roots(az, bz - y * y, m)) {
      out.push_back(PointQ::affine(mpq_class(r), mpq_class(y)));
      out.push_back(PointQ::affine(mpq_class(r), mpq_class(-y)));
    }
  }
  std::sort(out.begin(), out.end(), point_less);
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

TorsionGroup torsion_subgroup(const CurveQ& c, WorkMeter* meter) {
  WorkMeter local;
  WorkMeter& m = meter ? *meter : local;

  std::vector<PointQ> members{PointQ::infinity()};
  for (const PointQ& p : integral_torsion_candidates(c, &m)) {
    PointQ acc = p;
    for (int j = 1; j <= 12; ++j) {
      if (acc.at_infinity) {
        members.push_back(p);
        break;
      }
      acc = add(c, acc, p);
      m.charge(1, "torsion");
    }
  }

  std::sort(members.begin(), members.end(), point_less);

  // the filtered set must already be a group
  for (const PointQ& p : members)
    for (const PointQ& q : members) {
      PointQ s = add(c, p, q);
      if (!std::binary_search(members.begin(), members.end(), s, point_less))
        throw std::logic_error("torsion_subgroup: candidate set not closed");
    }

  auto compose = [&c](const PointQ& p, const PointQ& q) { return add(c, p, q); };
  auto res = grp::abelian_structure(members, PointQ::infinity(), compose,
                                    point_less, m);

  // every torsion group over Q is cyclic of order 1..10 or 12, or
  // (2, 2M) with M <= 4
  const auto& dv = res.structure.divisors;
  bool ok = false;
  if (dv.empty()) ok = true;
  if (dv.size() == 1)
    ok = (dv[0] >= 2 && dv[0] <= 10) || dv[0] == 12;
  if (dv.size() == 2)
    ok = dv[0] == 2 && (dv[1] == 2 || dv[1] == 4 || dv[1] == 6 || dv[1] == 8);
  if (!ok) throw std::logic_error("torsion_subgroup: structure off the list");

  TorsionGroup g;
  g.points = members;
  g.structure = res.structure;
  g.generators = res.generators;
  return g;
}

long count_points_mod_p(const CurveQ& c, long p) {
  if (p < 3 || !arith::is_prime(p))
    throw invalid_input("bad-prime", "count_points_mod_p: p must be an odd prime");
  if (p > 100000)
    throw limit_exceeded("point-count-cap",
                         "count_points_mod_p: naive scan is capped at p <= 1e5");
  mpz_class pm(p);
  auto reduce = [&](const mpq_class& r) -> long {
    mpz_class den = r.get_den(), inv;
    if (!mpz_invert(inv.get_mpz_t(), den.get_mpz_t(), pm.get_mpz_t()))
      throw invalid_input("bad-reduction",
                          "count_points_mod_p: denominator vanishes mod p");
    mpz_class v = r.get_num() * inv % pm;
    if (v < 0) v += pm;
    return v.get_si();
  };
  long ar = reduce(c.a), br = reduce(c.b);
  mpz_class fr =
      (4 * mpz_class(ar) * ar * ar + 27 * mpz_class(br) * br) % pm;
  if (fr == 0)
    throw invalid_input("bad-reduction",
                        "count_points_mod_p: curve is singular mod p");
  return kernels::ec_count_auto(ar, br, p);
}

}  // namespace classforge::ec
