#include "classforge/cubic.hpp"

#include <algorithm>
#include <optional>
#include <set>
#include <stdexcept>

#include "classforge/kernels.hpp"

namespace classforge::cubic {

namespace {

constexpr long kDiscBudget = 1000000;   // |disc| cap for class groups
constexpr long kSweepCap = 256;         // relation sweep radius cap
constexpr long kResolveCap = 64;        // out-of-base rewrite radius cap
constexpr unsigned kValuationCap = 200;

mpz_class exact_div(const mpz_class& a, const mpz_class& b, const char* who) {
  if (b == 0 || !mpz_divisible_p(a.get_mpz_t(), b.get_mpz_t()))
    throw std::logic_error(std::string(who) + ": expected exact division");
  mpz_class q;
  mpz_divexact(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return q;
}

// theta-power coordinates with denominator 3 (index3) or 1
struct ThetaCoords {
  mpz_class x, y, z;
};

ThetaCoords to_theta(const PureCubicField& f, const OrderElem& a) {
  if (!f.index3) return {a[0], a[1], a[2]};
  return {3 * a[0] + a[2], 3 * a[1] + f.t * a[2], a[2]};
}

}  // namespace

OrderElem o_mul(const PureCubicField& f, const OrderElem& a,
                const OrderElem& b) {
  ThetaCoords u = to_theta(f, a), v = to_theta(f, b);
  const mpz_class& m = f.m;
  mpz_class c0 = u.x * v.x + m * (u.y * v.z + u.z * v.y);
  mpz_class c1 = u.x * v.y + u.y * v.x + m * (u.z * v.z);
  mpz_class c2 = u.x * v.z + u.z * v.x + u.y * v.y;
  if (!f.index3) return {c0, c1, c2};
  return {exact_div(c0 - c2, 9, "o_mul"),
          exact_div(c1 - f.t * c2, 9, "o_mul"), exact_div(c2, 3, "o_mul")};
}

mpz_class o_norm(const PureCubicField& f, const OrderElem& a) {
  ThetaCoords u = to_theta(f, a);
  const mpz_class& m = f.m;
  mpz_class n = u.x * u.x * u.x + m * u.y * u.y * u.y +
                m * m * u.z * u.z * u.z - 3 * m * u.x * u.y * u.z;
  return f.index3 ? exact_div(n, 27, "o_norm") : n;
}

mpz_class o_trace(const PureCubicField& f, const OrderElem& a) {
  return f.index3 ? mpz_class(3 * a[0] + a[2]) : mpz_class(3 * a[0]);
}

FieldElem to_field(const OrderElem& a) {
  return {mpq_class(a[0]), mpq_class(a[1]), mpq_class(a[2])};
}

bool f_zero(const FieldElem& a) { return a.x == 0 && a.y == 0 && a.z == 0; }

FieldElem f_add(const FieldElem& a, const FieldElem& b) {
  return {a.x + b.x, a.y + b.y, a.z + b.z};
}

FieldElem f_scale(const mpq_class& c, const FieldElem& a) {
  return {c * a.x, c * a.y, c * a.z};
}

namespace {

struct ThetaQ {
  mpq_class x, y, z;
};

ThetaQ to_theta_q(const PureCubicField& f, const FieldElem& a) {
  if (!f.index3) return {a.x, a.y, a.z};
  mpq_class third(1, 3);
  return {a.x + third * a.z, a.y + f.t * third * a.z, third * a.z};
}

FieldElem from_theta_q(const PureCubicField& f, const ThetaQ& u) {
  if (!f.index3) return {u.x, u.y, u.z};
  return {u.x - u.z, u.y - f.t * u.z, 3 * u.z};
}

mpq_class theta_norm(const PureCubicField& f, const ThetaQ& u) {
  mpq_class m(f.m);
  return u.x * u.x * u.x + m * u.y * u.y * u.y + m * m * u.z * u.z * u.z -
         3 * m * u.x * u.y * u.z;
}

}  // namespace

FieldElem f_mul(const PureCubicField& f, const FieldElem& a,
                const FieldElem& b) {
  ThetaQ u = to_theta_q(f, a), v = to_theta_q(f, b);
  mpq_class m(f.m);
  ThetaQ w{u.x * v.x + m * (u.y * v.z + u.z * v.y),
           u.x * v.y + u.y * v.x + m * (u.z * v.z),
           u.x * v.z + u.z * v.x + u.y * v.y};
  return from_theta_q(f, w);
}

FieldElem f_inv(const PureCubicField& f, const FieldElem& a) {
  if (f_zero(a)) throw invalid_input("zero-element", "f_inv: zero element");
  ThetaQ u = to_theta_q(f, a);
  mpq_class m(f.m);
  mpq_class n = theta_norm(f, u);
  ThetaQ adj{(u.x * u.x - m * u.y * u.z) / n, (m * u.z * u.z - u.x * u.y) / n,
             (u.y * u.y - u.x * u.z) / n};
  FieldElem inv = from_theta_q(f, adj);
  FieldElem check = f_mul(f, a, inv);
  if (check.x != 1 || check.y != 0 || check.z != 0)
    throw std::logic_error("f_inv: inverse check failed");
  return inv;
}

mpq_class f_norm(const PureCubicField& f, const FieldElem& a) {
  return theta_norm(f, to_theta_q(f, a));
}

mpq_class f_trace(const PureCubicField& f, const FieldElem& a) {
  return 3 * to_theta_q(f, a).x;
}

namespace {

void row_axpy(OrderElem& r, const mpz_class& c, const OrderElem& s) {
  for (int k = 0; k < 3; ++k) r[static_cast<std::size_t>(k)] += c * s[static_cast<std::size_t>(k)];
}

// Hermite normal form of the Z-module spanned by `rows`; must be full rank.
CubicIdeal hnf3(std::vector<OrderElem> rows, WorkMeter* meter) {
  if (meter) meter->charge(static_cast<long>(rows.size()) * 4, "cubic-hnf");
  std::array<OrderElem, 3> out;
  int found = 0;
  for (int col = 0; col < 3; ++col) {
    std::size_t c = static_cast<std::size_t>(col);
    bool have = false;
    OrderElem pivot{};
    for (auto& r : rows) {
      if (r[c] == 0) continue;
      if (!have) {
        pivot = r;
        r = OrderElem{};
        have = true;
        continue;
      }
      mpz_class g, u, v;
      mpz_gcdext(g.get_mpz_t(), u.get_mpz_t(), v.get_mpz_t(),
                 pivot[c].get_mpz_t(), r[c].get_mpz_t());
      mpz_class q1 = exact_div(r[c], g, "hnf3");
      mpz_class q2 = exact_div(pivot[c], g, "hnf3");
      OrderElem np{}, left{};
      for (std::size_t k = 0; k < 3; ++k) {
        np[k] = u * pivot[k] + v * r[k];
        left[k] = q1 * pivot[k] - q2 * r[k];
      }
      pivot = np;
      r = left;
    }
    if (!have) throw std::logic_error("hnf3: module is rank deficient");
    if (pivot[c] < 0)
      for (auto& e : pivot) e = -e;
    out[static_cast<std::size_t>(found++)] = pivot;
  }
  // canonical range above the diagonal
  mpz_class q;
  mpz_fdiv_q(q.get_mpz_t(), out[0][1].get_mpz_t(), out[1][1].get_mpz_t());
  row_axpy(out[0], -q, out[1]);
  mpz_fdiv_q(q.get_mpz_t(), out[0][2].get_mpz_t(), out[2][2].get_mpz_t());
  row_axpy(out[0], -q, out[2]);
  mpz_fdiv_q(q.get_mpz_t(), out[1][2].get_mpz_t(), out[2][2].get_mpz_t());
  row_axpy(out[1], -q, out[2]);

  CubicIdeal res;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      res.at(i, j) = out[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  return res;
}

const OrderElem kTheta{0, 1, 0};
const OrderElem kNu{0, 0, 1};

bool elem_zero(const OrderElem& a) {
  return a[0] == 0 && a[1] == 0 && a[2] == 0;
}

}  // namespace

CubicIdeal ideal_from_generators(const PureCubicField& f,
                                 const std::vector<OrderElem>& gens,
                                 WorkMeter* meter) {
  std::vector<OrderElem> rows;
  rows.reserve(gens.size() * 3);
  for (const auto& g : gens) {
    rows.push_back(g);
    rows.push_back(o_mul(f, g, kTheta));
    rows.push_back(o_mul(f, g, kNu));
  }
  return hnf3(std::move(rows), meter);
}

CubicIdeal principal_ideal(const PureCubicField& f, const OrderElem& g,
                           WorkMeter* meter) {
  if (elem_zero(g))
    throw invalid_input("zero-element", "principal_ideal: zero generator");
  return ideal_from_generators(f, {g}, meter);
}

CubicIdeal ideal_mul(const PureCubicField& f, const CubicIdeal& a,
                     const CubicIdeal& b, WorkMeter* meter) {
  std::vector<OrderElem> rows;
  rows.reserve(9);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) rows.push_back(o_mul(f, a.row(i), b.row(j)));
  return hnf3(std::move(rows), meter);
}

CubicIdeal ideal_pow(const PureCubicField& f, const CubicIdeal& a,
                     unsigned long k, WorkMeter* meter) {
  CubicIdeal acc = principal_ideal(f, {1, 0, 0}, meter);
  for (unsigned long i = 0; i < k; ++i) acc = ideal_mul(f, acc, a, meter);
  return acc;
}

bool ideal_contains(const CubicIdeal& a, const OrderElem& e) {
  mpz_class rem[3] = {e[0], e[1], e[2]};
  for (int i = 0; i < 3; ++i) {
    const mpz_class& d = a.at(i, i);
    if (!mpz_divisible_p(rem[i].get_mpz_t(), d.get_mpz_t())) return false;
    mpz_class q;
    mpz_divexact(q.get_mpz_t(), rem[i].get_mpz_t(), d.get_mpz_t());
    for (int j = i; j < 3; ++j) rem[j] -= q * a.at(i, j);
  }
  return rem[0] == 0 && rem[1] == 0 && rem[2] == 0;
}

bool ideal_divides(const CubicIdeal& a, const CubicIdeal& b) {
  for (int i = 0; i < 3; ++i)
    if (!ideal_contains(a, b.row(i))) return false;
  return true;
}

unsigned ideal_valuation(const PureCubicField& f, const CubicIdeal& a,
                         const CubicIdeal& p, WorkMeter* meter) {
  unsigned v = 0;
  CubicIdeal pk = p;
  while (ideal_divides(pk, a)) {
    if (++v > kValuationCap)
      throw std::logic_error("ideal_valuation: runaway valuation");
    pk = ideal_mul(f, pk, p, meter);
  }
  return v;
}

// ---------------------------------------------------------------- fields

namespace {

// 10^50 * pi lies strictly between kPiScaled and kPiScaled + 1
const mpz_class kPiScaled(
    "314159265358979323846264338327950288419716939937510");

mpz_class pow10(unsigned k) {
  mpz_class r;
  mpz_ui_pow_ui(r.get_mpz_t(), 10, k);
  return r;
}

// floor of (8/(9 pi)) sqrt(d) plus a rational upper estimate
std::pair<long, mpq_class> minkowski_data(const mpz_class& disc_abs) {
  mpz_class n64 = 64 * disc_abs * pow10(100);
  mpz_class pi_lo = kPiScaled, pi_hi = kPiScaled + 1;
  mpz_class k_est = arith::isqrt(n64 / (81 * pi_lo * pi_lo));
  if (!k_est.fits_slong_p())
    throw limit_exceeded("radicand-budget",
                         "make_field: Minkowski bound does not fit a long");
  long base = std::max(0L, k_est.get_si() - 3);
  for (long k = base; k <= k_est.get_si() + 3; ++k) {
    // k <= bound certainly, and k + 1 > bound certainly
    bool le = 81 * mpz_class(k) * k * pi_hi * pi_hi <= n64;
    bool gt = 81 * mpz_class(k + 1) * (k + 1) * pi_lo * pi_lo > n64;
    if (le && gt) {
      mpz_class num = 8 * (arith::isqrt(disc_abs * pow10(100)) + 1);
      mpz_class den = 9 * pi_lo;
      mpq_class bound(num, den);
      bound.canonicalize();
      return {k, bound};
    }
  }
  throw std::logic_error("minkowski_data: 50-digit pi sandwich undecided");
}

}  // namespace

PureCubicField make_field(const mpz_class& m, WorkMeter* meter) {
  mpz_class am = abs(m);
  if (am < 2)
    throw invalid_input("bad-radicand", "make_field: need |m| >= 2");
  if (arith::squarefree_kernel(m, meter).second != 1)
    throw invalid_input("not-squarefree", "make_field: m must be squarefree");

  PureCubicField f;
  f.m = am;
  f.negated = m < 0;
  long m9 = mpz_class(am % 9).get_si();
  f.index3 = (m9 == 1 || m9 == 8);
  f.t = f.index3 ? (mpz_class(am % 3) == 1 ? 1 : -1) : 0;
  f.disc = (f.index3 ? -3 : -27) * am * am;
  auto [floor_, bound] = minkowski_data(abs(f.disc));
  f.minkowski_floor = floor_;
  f.minkowski_bound = bound;
  return f;
}

// ---------------------------------------------------------- prime ideals

namespace {

OrderElem theta_sq_elem(const PureCubicField& f) {
  // th^2 over {1, th, nu}
  if (!f.index3) return {0, 0, 1};
  return {-1, -f.t, 3};
}

std::vector<PrimeFactor> factor_three_with_index(const PureCubicField& f,
                                                 WorkMeter* meter) {
  // Norm-3 primes are the index-3 sublattices of O containing 3O that are
  // closed under multiplication by th and nu; scan the 13 functionals.
  std::vector<CubicIdeal> primes;
  auto try_functional = [&](long a, long b, long c) {
    std::vector<OrderElem> rows{{3, 0, 0}, {0, 3, 0}, {0, 0, 3}};
    if (a == 1) {
      rows.push_back({(3 - b) % 3, 1, 0});
      rows.push_back({(3 - c) % 3, 0, 1});
    } else if (b == 1) {
      rows.push_back({1, 0, 0});
      rows.push_back({0, (3 - c) % 3, 1});
    } else {
      rows.push_back({1, 0, 0});
      rows.push_back({0, 1, 0});
    }
    CubicIdeal lat = hnf3(std::move(rows), meter);
    if (lat.norm() != 3)
      throw std::logic_error("factor_prime: bad index-3 sublattice");
    for (int i = 0; i < 3; ++i) {
      if (!ideal_contains(lat, o_mul(f, lat.row(i), kTheta))) return;
      if (!ideal_contains(lat, o_mul(f, lat.row(i), kNu))) return;
    }
    primes.push_back(lat);
  };
  for (long b = 0; b < 3; ++b)
    for (long c = 0; c < 3; ++c) try_functional(1, b, c);
  for (long c = 0; c < 3; ++c) try_functional(0, 1, c);
  try_functional(0, 0, 1);

  std::sort(primes.begin(), primes.end());
  CubicIdeal three = principal_ideal(f, {3, 0, 0}, meter);
  std::vector<PrimeFactor> out;
  for (const auto& p : primes) {
    unsigned e = ideal_valuation(f, three, p, meter);
    if (e == 0) throw std::logic_error("factor_prime: stray norm-3 ideal");
    out.push_back({p, e, 1});
  }
  return out;
}

}  // namespace

std::vector<PrimeFactor> factor_prime(const PureCubicField& f,
                                      const mpz_class& p, WorkMeter* meter) {
  if (p < 2 || !arith::is_prime(p))
    throw invalid_input("bad-prime", "factor_prime: p must be prime");
  if (p > 1000000)
    throw limit_exceeded("prime-budget", "factor_prime: p above 1e6");

  std::vector<PrimeFactor> out;
  if (p == 3 && f.index3) {
    out = factor_three_with_index(f, meter);
  } else {
    long pl = p.get_si();
    if (meter) meter->charge(pl, "factor-prime-roots");
    long mm = mpz_class(f.m % p).get_si();
    std::vector<long> roots;
    for (long r = 0; r < pl; ++r)
      if (((r * r % pl) * r - mm) % pl == 0) roots.push_back(r);

    auto linear = [&](long r) {
      return ideal_from_generators(f, {{p, 0, 0}, {-r, 1, 0}}, meter);
    };
    if (roots.empty()) {
      out.push_back({principal_ideal(f, {p, 0, 0}, meter), 1, 3});
    } else if (roots.size() == 3) {
      for (long r : roots) out.push_back({linear(r), 1, 1});
    } else {
      long r = roots[0];
      bool triple = (pl == 3) || (mm == 0);
      if (triple) {
        out.push_back({linear(r), 3, 1});
      } else {
        OrderElem quad = theta_sq_elem(f);
        quad[0] += mpz_class(r) * r;
        quad[1] += r;
        out.push_back({linear(r), 1, 1});
        out.push_back({ideal_from_generators(f, {{p, 0, 0}, quad}, meter), 1, 2});
      }
    }
  }

  std::sort(out.begin(), out.end(), [](const PrimeFactor& a, const PrimeFactor& b) {
    return a.f != b.f ? a.f < b.f : a.ideal < b.ideal;
  });

  unsigned ef = 0;
  CubicIdeal prod = principal_ideal(f, {1, 0, 0}, meter);
  for (const auto& pf : out) {
    ef += pf.e * pf.f;
    for (unsigned i = 0; i < pf.e; ++i) prod = ideal_mul(f, prod, pf.ideal, meter);
  }
  if (ef != 3 || prod != principal_ideal(f, {p, 0, 0}, meter))
    throw std::logic_error("factor_prime: reconstruction check failed");
  return out;
}

// ------------------------------------------------------------ class group

namespace {

struct StructureSnapshot {
  arith::AbelianStructure structure;
  arith::IntMat chart;
  std::vector<mpz_class> full_divisors;
};

std::optional<StructureSnapshot> structure_from_rows(
    const std::vector<std::vector<long>>& rows, std::size_t k,
    WorkMeter* meter) {
  arith::IntMat m(rows.size(), k);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < k; ++j) m.at(i, j) = rows[i][j];
  arith::SmithResult s = arith::smith_decompose(m, meter);
  if (s.rank < k) return std::nullopt;  // quotient still infinite
  StructureSnapshot snap;
  snap.full_divisors.assign(s.divisors.begin(), s.divisors.begin() + static_cast<long>(k));
  for (const auto& d : snap.full_divisors)
    if (d > 1) snap.structure.divisors.push_back(d);
  snap.chart = s.v;
  return snap;
}

}  // namespace

CubicClassGroup class_group_cubic(const PureCubicField& f, WorkMeter* meter,
                                  long min_radius) {
  WorkMeter local;
  WorkMeter& m = meter ? *meter : local;
  if (abs(f.disc) > kDiscBudget)
    throw limit_exceeded("disc-budget",
                         "class_group_cubic: |disc| above the 1e6 budget");

  CubicClassGroup cg;
  cg.field = f;

  std::vector<long> rational;
  for (long q = 2; q <= f.minkowski_floor; ++q)
    if (arith::is_prime(q)) rational.push_back(q);

  std::size_t k = 0;
  for (long q : rational) {
    FactorBaseEntry e;
    e.p = q;
    e.primes = factor_prime(f, q, &m);
    e.offset = k;
    k += e.primes.size();
    cg.base.push_back(std::move(e));
  }
  cg.fb_size = k;
  if (k == 0) {
    cg.h = 1;
    return cg;
  }

  std::vector<std::vector<long>> rows;
  std::set<std::vector<long>> seen;
  auto push_row = [&](std::vector<long> r) {
    if (seen.insert(r).second) rows.push_back(std::move(r));
  };
  for (const auto& e : cg.base) {
    std::vector<long> r(k, 0);
    for (std::size_t i = 0; i < e.primes.size(); ++i)
      r[e.offset + i] = e.primes[i].e;
    push_row(std::move(r));
  }

  // valuation vector of a principal ideal with factor-base-smooth norm
  auto valuations = [&](const OrderElem& alpha, const mpz_class& norm_abs) {
    CubicIdeal a = principal_ideal(f, alpha, &m);
    std::vector<long> r(k, 0);
    mpz_class left = norm_abs;
    for (const auto& e : cg.base) {
      if (!mpz_divisible_ui_p(left.get_mpz_t(), static_cast<unsigned long>(e.p)))
        continue;
      unsigned long check = 0;
      for (std::size_t i = 0; i < e.primes.size(); ++i) {
        unsigned v = ideal_valuation(f, a, e.primes[i].ideal, &m);
        r[e.offset + i] = static_cast<long>(v);
        check += static_cast<unsigned long>(v) * e.primes[i].f;
      }
      mpz_class pe;
      mpz_ui_pow_ui(pe.get_mpz_t(), static_cast<unsigned long>(e.p), check);
      left = exact_div(left, pe, "class_group_cubic");
    }
    if (left != 1)
      throw std::logic_error("class_group_cubic: norm escaped the base");
    return r;
  };

  kernels::CubicShape shape{f.m.get_si(), f.index3, f.t};
  std::optional<StructureSnapshot> prev;
  long r_done = 0;
  for (long radius = 4; radius <= kSweepCap; radius *= 2) {
    auto hits = kernels::smooth_scan_auto(shape, r_done, radius, rational, m);
    r_done = radius;
    for (const auto& h : hits) {
      if (h.norm_abs == 1) continue;
      push_row(valuations({h.x, h.y, h.z}, h.norm_abs));
    }
    auto cur = structure_from_rows(rows, k, &m);
    if (radius >= min_radius && prev && cur &&
        prev->structure == cur->structure) {
      cg.structure = cur->structure;
      cg.chart = cur->chart;
      cg.full_divisors = cur->full_divisors;
      cg.h = cg.structure.order();
      cg.sweep_radius = radius;
      arith::IntMat rel(rows.size(), k);
      for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < k; ++j) rel.at(i, j) = rows[i][j];
      cg.relations = rel;
      return cg;
    }
    prev = std::move(cur);
  }
  throw limit_exceeded("relation-budget",
                       "class_group_cubic: relations did not saturate");
}

namespace {

// [q_prime] written over the factor base: search beta in the prime with
// |N(beta)| = q^f * smooth; Minkowski guarantees one in a small ball.
std::vector<mpz_class> resolve_out_of_base(const CubicClassGroup& cg,
                                           const CubicIdeal& q_prime,
                                           const mpz_class& q, unsigned fdeg,
                                           WorkMeter* meter) {
  const PureCubicField& f = cg.field;
  mpz_class qf;
  mpz_pow_ui(qf.get_mpz_t(), q.get_mpz_t(), fdeg);
  for (long radius = 1; radius <= kResolveCap; radius *= 2) {
    if (meter)
      meter->charge((2 * radius + 1) * (2 * radius + 1) * (2 * radius + 1),
                    "resolve-out-of-base");
    for (long c0 = -radius; c0 <= radius; ++c0)
      for (long c1 = -radius; c1 <= radius; ++c1)
        for (long c2 = -radius; c2 <= radius; ++c2) {
          if (std::max({labs(c0), labs(c1), labs(c2)}) <= radius / 2 &&
              radius > 1)
            continue;  // covered by the previous shell
          OrderElem beta{};
          row_axpy(beta, c0, q_prime.row(0));
          row_axpy(beta, c1, q_prime.row(1));
          row_axpy(beta, c2, q_prime.row(2));
          if (elem_zero(beta)) continue;
          mpz_class nb = abs(o_norm(f, beta));
          if (!mpz_divisible_p(nb.get_mpz_t(), qf.get_mpz_t())) continue;
          mpz_class cof = nb / qf;
          if (mpz_divisible_p(cof.get_mpz_t(), q.get_mpz_t())) continue;
          mpz_class left = cof;
          for (const auto& e : cg.base)
            while (mpz_divisible_ui_p(left.get_mpz_t(),
                                      static_cast<unsigned long>(e.p)))
              left /= e.p;
          if (left != 1) continue;  // cofactor not smooth

          CubicIdeal a = principal_ideal(f, beta, meter);
          if (ideal_valuation(f, a, q_prime, meter) != 1) continue;
          std::vector<mpz_class> w(cg.fb_size, 0);
          mpz_class reconstructed = qf;
          for (const auto& e : cg.base) {
            for (std::size_t i = 0; i < e.primes.size(); ++i) {
              unsigned v = ideal_valuation(f, a, e.primes[i].ideal, meter);
              if (v == 0) continue;
              w[e.offset + i] = v;
              mpz_class pe;
              mpz_ui_pow_ui(pe.get_mpz_t(), static_cast<unsigned long>(e.p),
                            static_cast<unsigned long>(v) * e.primes[i].f);
              reconstructed *= pe;
            }
          }
          if (reconstructed != nb) continue;  // another prime above q divides
          for (auto& x : w) x = -x;
          return w;
        }
  }
  throw limit_exceeded("resolve-budget",
                       "ideal_class_coords: no smooth rewrite found");
}

}  // namespace

std::vector<mpz_class> ideal_class_coords(const CubicClassGroup& cg,
                                          const CubicIdeal& a,
                                          WorkMeter* meter) {
  std::vector<mpz_class> vec(cg.fb_size, 0);
  if (cg.fb_size == 0) return vec;
  const PureCubicField& f = cg.field;
  mpz_class n = a.norm();
  if (n != 1) {
    arith::Factorization fac = arith::factor(n, meter);
    for (const auto& [q, e] : fac.primes) {
      const FactorBaseEntry* ent = nullptr;
      for (const auto& b : cg.base)
        if (b.p == q) ent = &b;
      unsigned long check = 0;
      if (ent) {
        for (std::size_t i = 0; i < ent->primes.size(); ++i) {
          unsigned v = ideal_valuation(f, a, ent->primes[i].ideal, meter);
          vec[ent->offset + i] += v;
          check += static_cast<unsigned long>(v) * ent->primes[i].f;
        }
      } else {
        for (const auto& pf : factor_prime(f, q, meter)) {
          unsigned v = ideal_valuation(f, a, pf.ideal, meter);
          if (v == 0) continue;
          check += static_cast<unsigned long>(v) * pf.f;
          auto w = resolve_out_of_base(cg, pf.ideal, q, pf.f, meter);
          for (std::size_t j = 0; j < cg.fb_size; ++j) vec[j] += mpz_class(v) * w[j];
        }
      }
      if (check != e)
        throw std::logic_error("ideal_class_coords: valuation mismatch");
    }
  }

  std::vector<mpz_class> coords(cg.fb_size, 0);
  for (std::size_t j = 0; j < cg.fb_size; ++j) {
    mpz_class s = 0;
    for (std::size_t i = 0; i < cg.fb_size; ++i)
      s += vec[i] * cg.chart.at(i, j);
    if (cg.full_divisors[j] != 0)
      mpz_fdiv_r(s.get_mpz_t(), s.get_mpz_t(),
                 cg.full_divisors[j].get_mpz_t());
    coords[j] = s;
  }
  return coords;
}

mpz_class ideal_class_order(const CubicClassGroup& cg, const CubicIdeal& a,
                            WorkMeter* meter) {
  if (cg.fb_size == 0) return 1;
  arith::AbelianStructure full;
  full.divisors = cg.full_divisors;
  return arith::element_order_in(full, ideal_class_coords(cg, a, meter));
}

// ----------------------------------------------------------- square side

SquareClass square_class(const PureCubicField& f, const FieldElem& a,
                         WorkMeter* meter) {
  if (f_zero(a))
    throw invalid_input("zero-element", "square_class: zero element");
  mpz_class den = lcm(mpz_class(lcm(a.x.get_den(), a.y.get_den())),
                      a.z.get_den());
  mpq_class d2(mpz_class(den * den));
  OrderElem o{mpq_class(d2 * a.x).get_num(), mpq_class(d2 * a.y).get_num(),
              mpq_class(d2 * a.z).get_num()};

  SquareClass s;
  s.rep = a;
  mpz_class n = o_norm(f, o);
  s.minus = n < 0;
  mpz_class na = abs(n);
  if (na != 1) {
    CubicIdeal ia = principal_ideal(f, o, meter);
    arith::Factorization fac = arith::factor(na, meter);
    for (const auto& [q, e] : fac.primes) {
      unsigned long check = 0;
      auto primes = factor_prime(f, q, meter);
      for (unsigned i = 0; i < primes.size(); ++i) {
        unsigned v = ideal_valuation(f, ia, primes[i].ideal, meter);
        check += static_cast<unsigned long>(v) * primes[i].f;
        if (v % 2) s.parity[{q, i}] = 1;
      }
      if (check != e)
        throw std::logic_error("square_class: valuation mismatch");
    }
  }
  return s;
}

SquareClass square_class_add(const PureCubicField& f, const SquareClass& a,
                             const SquareClass& b) {
  SquareClass s;
  s.rep = f_mul(f, a.rep, b.rep);
  s.minus = a.minus != b.minus;
  s.parity = a.parity;
  for (const auto& [key, bit] : b.parity) {
    auto it = s.parity.find(key);
    if (it == s.parity.end())
      s.parity[key] = bit;
    else
      s.parity.erase(it);
  }
  return s;
}

bool square_class_equal(const PureCubicField& f, const SquareClass& a,
                        const SquareClass& b, WorkMeter* meter) {
  if (a.minus != b.minus || a.parity != b.parity) return false;
  return is_square(f, f_mul(f, a.rep, b.rep), nullptr, meter);
}

namespace {

// distinct rational roots of an integer polynomial, ascending degree coeffs
std::vector<mpq_class> rational_roots(std::vector<mpz_class> c,
                                      WorkMeter* meter) {
  std::vector<mpq_class> out;
  while (!c.empty() && c.back() == 0) c.pop_back();
  if (c.size() <= 1) return out;  // zero or constant polynomial
  bool zero_root = false;
  while (c.front() == 0) {
    zero_root = true;
    c.erase(c.begin());
  }
  if (zero_root) out.emplace_back(0);
  if (c.size() <= 1) return out;

  auto eval = [&](const mpq_class& x) {
    mpq_class acc = 0;
    for (std::size_t i = c.size(); i-- > 0;) acc = acc * x + mpq_class(c[i]);
    return acc;
  };
  auto tail_divs = arith::divisors(arith::factor(c.front(), meter), meter);
  auto lead_divs = arith::divisors(arith::factor(c.back(), meter), meter);
  for (const auto& num : tail_divs)
    for (const auto& den : lead_divs) {
      mpq_class cand(num, den);
      cand.canonicalize();
      if (eval(cand) == 0) out.push_back(cand);
      cand = -cand;
      if (eval(cand) == 0) out.push_back(cand);
    }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool rational_square(const mpq_class& q, mpq_class* root) {
  if (q < 0) return false;
  mpz_class rn, rd;
  if (!arith::is_square(q.get_num(), &rn)) return false;
  if (!arith::is_square(q.get_den(), &rd)) return false;
  if (root) *root = mpq_class(rn, rd);
  return true;
}

}  // namespace

bool is_square(const PureCubicField& f, const FieldElem& a, FieldElem* witness,
               WorkMeter* meter) {
  if (f_zero(a)) {
    if (witness) *witness = {0, 0, 0};
    return true;
  }
  ThetaQ u = to_theta_q(f, a);
  if (u.y == 0 && u.z == 0) {
    // rational: the field has no quadratic subfield, so the root is rational
    mpq_class r;
    if (!rational_square(u.x, &r)) return false;
    if (witness) *witness = {r, 0, 0};
    return true;
  }

  mpq_class e1 = 3 * u.x;
  mpq_class tr2 = f_trace(f, f_mul(f, a, a));
  mpq_class e2 = (e1 * e1 - tr2) / 2;
  mpq_class e3 = f_norm(f, a);
  mpq_class r0;
  if (e3 <= 0 || !rational_square(e3, &r0)) return false;

  for (int sign = 0; sign < 2; ++sign) {
    mpq_class r = sign ? mpq_class(-r0) : r0;
    // p^4 - 2 e1 p^2 - 8 r p + (e1^2 - 4 e2) = 0 for p = Tr(sqrt(a))
    mpq_class q0 = e1 * e1 - 4 * e2, q1 = -8 * r, q2 = -2 * e1;
    mpz_class den = lcm(lcm(q0.get_den(), q1.get_den()), q2.get_den());
    std::vector<mpz_class> poly{mpq_class(q0 * den).get_num(),
                                mpq_class(q1 * den).get_num(),
                                mpq_class(q2 * den).get_num(), 0, den};
    for (const auto& p : rational_roots(poly, meter)) {
      mpq_class qq = (p * p - e1) / 2;
      FieldElem d = f_add(a, {qq, 0, 0});
      if (f_zero(d)) continue;
      FieldElem num = f_add(f_scale(p, a), {r, 0, 0});
      FieldElem cand = f_mul(f, num, f_inv(f, d));
      if (f_mul(f, cand, cand) == a) {
        if (witness) *witness = cand;
        return true;
      }
    }
  }
  return false;
}

// ------------------------------------------------------------- descent IO

PointClass class_from_point(const PureCubicField& f, const mpz_class& n,
                            const mpq_class& px, const mpq_class& py,
                            WorkMeter* meter) {
  if (f.m != abs(n) || f.negated != (n > 0))
    throw invalid_input("field-mismatch",
                        "class_from_point: field does not match the curve");
  if (py * py != px * px * px + n)
    throw invalid_input("point-off-curve",
                        "class_from_point: point not on y^2 = x^3 + n");
  if (py == 0)
    throw invalid_input("two-torsion-point",
                        "class_from_point: x - th degenerates at 2-torsion");

  mpz_class e, e2 = px.get_den();
  if (!arith::is_square(e2, &e) || py.get_den() != e * e2)
    throw std::logic_error("class_from_point: denominator is not (e^2, e^3)");

  PointClass pc;
  pc.e = e;
  pc.generator = {px.get_num(), n > 0 ? e2 : mpz_class(-e2), 0};
  mpz_class w = abs(py.get_num());
  if (o_norm(f, pc.generator) != w * w)
    throw std::logic_error("class_from_point: norm is not the square it must be");

  CubicIdeal full = principal_ideal(f, pc.generator, meter);
  CubicIdeal sq = principal_ideal(f, {1, 0, 0}, meter);
  CubicIdeal odd = sq;
  if (w != 1) {
    arith::Factorization fac = arith::factor(w, meter);
    for (const auto& [q, e_unused] : fac.primes) {
      (void)e_unused;
      for (const auto& pf : factor_prime(f, q, meter)) {
        unsigned v = ideal_valuation(f, full, pf.ideal, meter);
        if (v == 0) continue;
        sq = ideal_mul(f, sq, ideal_pow(f, pf.ideal, v / 2, meter), meter);
        if (v % 2) odd = ideal_mul(f, odd, pf.ideal, meter);
      }
    }
  }
  pc.a = sq;
  pc.b = odd;
  if (ideal_mul(f, ideal_mul(f, sq, sq, meter), odd, meter) != full)
    throw std::logic_error("class_from_point: a^2 b reconstruction failed");
  return pc;
}

}  // namespace classforge::cubic
