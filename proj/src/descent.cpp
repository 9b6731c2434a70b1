#include "classforge/descent.hpp"

#include <algorithm>
#include <set>

#include "classforge/kernels.hpp"

namespace classforge::descent {

namespace {

constexpr long kHeightCap = 1000000;

// x - th over the coordinates of f.  f stores Q(cbrt(m)) with m = |n|; when
// n > 0 the actual generator is -cbrt(m), so x - th = x + th_stored.
cubic::FieldElem x_minus_theta(const cubic::PureCubicField& f,
                               const mpq_class& x) {
  return {x, mpq_class(f.negated ? 1 : -1), mpq_class(0)};
}

bool on_cubic_curve(const mpz_class& n, const ec::PointQ& p) {
  return p.y * p.y == p.x * p.x * p.x + n;
}

}  // namespace

std::vector<ec::PointQ> point_search(const mpz_class& n, long height,
                                     WorkMeter* meter) {
  if (n == 0)
    throw invalid_input("singular-curve", "point_search: y^2 = x^3 is singular");
  if (height < 1 || height > kHeightCap)
    throw invalid_input("height-bound",
                        "point_search: height must be in [1, 1e6]");
  WorkMeter local;
  WorkMeter& m = meter ? *meter : local;

  std::vector<ec::PointQ> out;
  for (const auto& hit : kernels::point_sweep_auto(n, height, m)) {
    mpz_class e2 = mpz_class(hit.e) * hit.e;
    mpq_class x(mpz_class(hit.u), e2);
    x.canonicalize();
    if (hit.v == 0) {
      out.push_back(ec::PointQ::affine(x, mpq_class(0)));
      continue;
    }
    mpq_class y(hit.v, e2 * hit.e);
    y.canonicalize();
    out.push_back(ec::PointQ::affine(x, y));
    out.push_back(ec::PointQ::affine(x, -y));
  }
  std::sort(out.begin(), out.end(), ec::point_less);
  return out;
}

DescentReport two_descent_rank(const mpz_class& n,
                               const std::vector<ec::PointQ>& points,
                               WorkMeter* meter) {
  mpz_class na = abs(n), root;
  if (n == 0 || mpz_root(root.get_mpz_t(), na.get_mpz_t(), 3) != 0)
    throw invalid_input("reducible-cubic",
                        "two_descent_rank: T^3 + n has a rational root");
  cubic::PureCubicField f = cubic::make_field(-n, meter);

  DescentReport rep;
  rep.n = n;
  std::vector<cubic::SquareClass> classes;
  for (const auto& p : points) {
    if (p.at_infinity || p.y == 0) continue;
    if (!on_cubic_curve(n, p))
      throw invalid_input("point-off-curve",
                          "two_descent_rank: point not on y^2 = x^3 + n");
    rep.points.push_back(p);
    classes.push_back(cubic::square_class(f, x_minus_theta(f, p.x), meter));
  }

  std::set<std::pair<mpz_class, unsigned>> keys;
  for (const auto& c : classes)
    for (const auto& kv : c.parity) keys.insert(kv.first);
  rep.parity_columns.assign(keys.begin(), keys.end());

  // Exact Gaussian elimination in K*/(K*)^2 over the greedy basis of the
  // classes seen so far; the squareness oracle is the zero test.  A class is
  // dependent iff exactly one basis subset sums to it, so the first matching
  // mask is the coordinate vector.
  std::vector<cubic::SquareClass> basis;
  std::vector<unsigned long> coords;
  for (const auto& c : classes) {
    bool dependent = false;
    unsigned long expr = 0;
    for (unsigned long mask = 0; mask < (1ul << basis.size()); ++mask) {
      cubic::SquareClass cand = c;
      for (std::size_t j = 0; j < basis.size(); ++j)
        if (mask >> j & 1ul) cand = cubic::square_class_add(f, cand, basis[j]);
      if (!cand.parity.empty() || cand.minus) continue;
      if (cubic::is_square(f, cand.rep, nullptr, meter)) {
        dependent = true;
        expr = mask;
        break;
      }
    }
    if (!dependent) {
      basis.push_back(c);
      expr = 1ul << (basis.size() - 1);
    }
    coords.push_back(expr);
  }

  rep.unit_columns = basis.size();
  rep.f2_rank = static_cast<int>(basis.size());
  for (std::size_t i = 0; i < classes.size(); ++i) {
    std::vector<int> row;
    row.reserve(rep.parity_columns.size() + 1 + rep.unit_columns);
    for (const auto& key : rep.parity_columns)
      row.push_back(classes[i].parity.count(key) ? 1 : 0);
    row.push_back(classes[i].minus ? 1 : 0);
    for (std::size_t j = 0; j < rep.unit_columns; ++j)
      row.push_back(coords[i] >> j & 1ul ? 1 : 0);
    rep.matrix.push_back(std::move(row));
  }
  return rep;
}

DescentReport selmer_to_classgroup(const mpz_class& n,
                                   const std::vector<ec::PointQ>& points,
                                   WorkMeter* meter) {
  DescentReport rep = two_descent_rank(n, points, meter);
  cubic::PureCubicField f = cubic::make_field(-n, meter);
  cubic::CubicClassGroup cg = cubic::class_group_cubic(f, meter);
  for (const auto& p : rep.points) {
    ClassGroupRow row;
    row.point = p;
    row.cls = cubic::class_from_point(f, n, p.x, p.y, meter);
    row.order = cubic::ideal_class_order(cg, row.cls.a, meter);
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

}  // namespace classforge::descent
