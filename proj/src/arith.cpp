#include "classforge/arith.hpp"

#include <algorithm>
#include <atomic>

namespace classforge {

namespace {
std::atomic<std::uint64_t> g_budget{100000000};  // 1e8 work units
}

std::uint64_t work_budget() noexcept { return g_budget.load(); }
void set_work_budget(std::uint64_t units) noexcept { g_budget.store(units); }

}  // namespace classforge

namespace classforge::arith {

namespace {

// Deterministic Miller-Rabin witness set, sufficient for n < 3.3e24.
constexpr unsigned long kWitnesses[] = {2,  3,  5,  7,  11, 13,
                                        17, 19, 23, 29, 31, 37};

bool miller_rabin(const mpz_class& n) {
  mpz_class d = n - 1;
  unsigned long s = mpz_scan1(d.get_mpz_t(), 0);
  mpz_fdiv_q_2exp(d.get_mpz_t(), d.get_mpz_t(), s);
  mpz_class x, nm1 = n - 1;
  for (unsigned long a : kWitnesses) {
    if (mpz_cmp_ui(n.get_mpz_t(), a) <= 0) return true;
    mpz_class base(a);
    mpz_powm(x.get_mpz_t(), base.get_mpz_t(), d.get_mpz_t(), n.get_mpz_t());
    if (x == 1 || x == nm1) continue;
    bool witness = true;
    for (unsigned long r = 1; r < s; ++r) {
      x = x * x % n;
      if (x == nm1) {
        witness = false;
        break;
      }
    }
    if (witness) return false;
  }
  return true;
}

constexpr unsigned long kTrialLimit = 1000000;

// Brent's cycle variant of Pollard rho.  Returns a nontrivial factor or n
// itself (caller bumps c and retries).
mpz_class brent_rho(const mpz_class& n, unsigned long c, WorkMeter& meter) {
  if (mpz_even_p(n.get_mpz_t())) return 2;
  mpz_class y = 2, x, ys, q = 1, g = 1, diff;
  unsigned long r = 1, m = 128;
  while (g == 1) {
    x = y;
    for (unsigned long i = 0; i < r; ++i) y = (y * y + c) % n;
    meter.charge(r, "factor");
    unsigned long k = 0;
    while (k < r && g == 1) {
      ys = y;
      unsigned long steps = std::min(m, r - k);
      for (unsigned long i = 0; i < steps; ++i) {
        y = (y * y + c) % n;
        diff = x - y;
        q = q * abs(diff) % n;
      }
      meter.charge(steps, "factor");
      g = gcd(q, n);
      k += m;
    }
    r *= 2;
  }
  if (g == n) {
    do {
      ys = (ys * ys + c) % n;
      diff = x - ys;
      g = gcd(abs(diff), n);
      meter.charge(1, "factor");
    } while (g == 1);
  }
  return g;
}

void factor_into(mpz_class n, std::vector<mpz_class>& out, WorkMeter& meter) {
  if (n == 1) return;
  if (is_prime(n)) {
    out.push_back(n);
    return;
  }
  mpz_class d = n;
  for (unsigned long c = 1; d == n; ++c) d = brent_rho(n, c, meter);
  factor_into(d, out, meter);
  factor_into(n / d, out, meter);
}

}  // namespace

bool is_prime(const mpz_class& n) {
  if (n < 2) return false;
  for (unsigned long p : {2ul, 3ul, 5ul, 7ul, 11ul, 13ul, 17ul, 19ul, 23ul,
                          29ul, 31ul, 37ul}) {
    if (mpz_cmp_ui(n.get_mpz_t(), p) == 0) return true;
    if (mpz_divisible_ui_p(n.get_mpz_t(), p)) return false;
  }
  return miller_rabin(n);
}

mpz_class Factorization::value() const {
  mpz_class v = sign;
  for (const auto& [p, e] : primes)
    for (unsigned i = 0; i < e; ++i) v *= p;
  return v;
}

unsigned Factorization::exponent_of(const mpz_class& p) const {
  for (const auto& [q, e] : primes)
    if (q == p) return e;
  return 0;
}

Factorization factor(const mpz_class& n, WorkMeter* meter) {
  if (n == 0) throw invalid_input("factor-zero", "factor: n must be nonzero");
  if (mpz_sizeinbase(n.get_mpz_t(), 2) > 128)
    throw invalid_input("factor-range", "factor: |n| must be below 2^128");
  WorkMeter local;
  WorkMeter& m = meter ? *meter : local;

  Factorization f;
  f.sign = sgn(n);
  mpz_class rest = abs(n);

  std::vector<mpz_class> found;
  auto strip = [&](unsigned long p) {
    if (!mpz_divisible_ui_p(rest.get_mpz_t(), p)) return;
    unsigned e = 0;
    while (mpz_divisible_ui_p(rest.get_mpz_t(), p)) {
      rest /= p;
      ++e;
    }
    f.primes.emplace_back(p, e);
  };
  strip(2);
  strip(3);
  for (unsigned long p = 5; p <= kTrialLimit && rest > 1; p += 6) {
    strip(p);
    strip(p + 2);
    if ((p & 8191) == 5) m.charge(8192 / 3, "factor");
  }
  if (rest > 1) {
    factor_into(rest, found, m);
    std::sort(found.begin(), found.end());
    for (std::size_t i = 0; i < found.size();) {
      std::size_t j = i;
      while (j < found.size() && found[j] == found[i]) ++j;
      f.primes.emplace_back(found[i], static_cast<unsigned>(j - i));
      i = j;
    }
  }
  std::sort(f.primes.begin(), f.primes.end());
  return f;
}

std::pair<mpz_class, mpz_class> squarefree_kernel(const mpz_class& n,
                                                  WorkMeter* meter) {
  Factorization f = factor(n, meter);
  mpz_class d = f.sign, s = 1;
  for (const auto& [p, e] : f.primes) {
    if (e & 1) d *= p;
    for (unsigned i = 0; i < e / 2; ++i) s *= p;
  }
  return {d, s};
}

std::optional<std::pair<mpz_class, unsigned>> perfect_power(
    const mpz_class& n) {
  if (n <= 1)
    throw invalid_input("perfect-power-range", "perfect_power: need n > 1");
  unsigned maxk = static_cast<unsigned>(mpz_sizeinbase(n.get_mpz_t(), 2));
  mpz_class root;
  for (unsigned k = maxk; k >= 2; --k) {
    if (mpz_root(root.get_mpz_t(), n.get_mpz_t(), k))
      return std::make_pair(root, k);
  }
  return std::nullopt;
}

std::vector<mpz_class> divisors(const Factorization& f, WorkMeter* meter) {
  WorkMeter local;
  WorkMeter& m = meter ? *meter : local;
  std::uint64_t count = 1;
  for (const auto& [p, e] : f.primes) count *= (e + 1);
  m.charge(count, "divisors");

  std::vector<mpz_class> out{1};
  for (const auto& [p, e] : f.primes) {
    std::size_t base = out.size();
    mpz_class pk = 1;
    for (unsigned i = 1; i <= e; ++i) {
      pk *= p;
      for (std::size_t j = 0; j < base; ++j) out.push_back(out[j] * pk);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

mpz_class AbelianStructure::order() const {
  mpz_class o = 1;
  for (const auto& d : divisors) o *= d;
  return o;
}

mpz_class AbelianStructure::exponent() const {
  return divisors.empty() ? mpz_class(1) : divisors.back();
}

int AbelianStructure::rank_at(const mpz_class& l) const {
  int r = 0;
  for (const auto& d : divisors)
    if (mpz_divisible_p(d.get_mpz_t(), l.get_mpz_t())) ++r;
  return r;
}

IntMat IntMat::identity(std::size_t n) {
  IntMat m(n, n);
  for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1;
  return m;
}

IntMat IntMat::transposed() const {
  IntMat t(cols, rows);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) t.at(j, i) = at(i, j);
  return t;
}

namespace {

// Quotient nearest to a/b, |a - qb| <= |b|/2.
mpz_class nearest_div(const mpz_class& a, const mpz_class& b) {
  mpz_class q, r;
  mpz_fdiv_qr(q.get_mpz_t(), r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  if (2 * r > abs(b)) ++q;
  return q;
}

struct SmithWork {
  IntMat d, v, vinv;
  WorkMeter& meter;

  // Column ops on d carry over to v (same op) and to vinv (inverse row op),
  // so that d0 * v == prod-of-ops applied and v * vinv == I throughout.
  void col_swap(std::size_t i, std::size_t j) {
    for (std::size_t r = 0; r < d.rows; ++r) swap(d.at(r, i), d.at(r, j));
    for (std::size_t r = 0; r < v.rows; ++r) swap(v.at(r, i), v.at(r, j));
    for (std::size_t c = 0; c < vinv.cols; ++c)
      swap(vinv.at(i, c), vinv.at(j, c));
    meter.charge(d.rows + 2 * v.rows, "smith");
  }
  // col_j += q * col_i
  void col_add(std::size_t j, const mpz_class& q, std::size_t i) {
    for (std::size_t r = 0; r < d.rows; ++r) d.at(r, j) += q * d.at(r, i);
    for (std::size_t r = 0; r < v.rows; ++r) v.at(r, j) += q * v.at(r, i);
    for (std::size_t c = 0; c < vinv.cols; ++c)
      vinv.at(i, c) -= q * vinv.at(j, c);
    meter.charge(d.rows + 2 * v.rows, "smith");
  }
  void col_negate(std::size_t i) {
    for (std::size_t r = 0; r < d.rows; ++r) d.at(r, i) = -d.at(r, i);
    for (std::size_t r = 0; r < v.rows; ++r) v.at(r, i) = -v.at(r, i);
    for (std::size_t c = 0; c < vinv.cols; ++c)
      vinv.at(i, c) = -vinv.at(i, c);
  }
  void row_swap(std::size_t i, std::size_t j) {
    for (std::size_t c = 0; c < d.cols; ++c) swap(d.at(i, c), d.at(j, c));
    meter.charge(d.cols, "smith");
  }
  // row_j -= q * row_i
  void row_sub(std::size_t j, const mpz_class& q, std::size_t i) {
    for (std::size_t c = 0; c < d.cols; ++c) d.at(j, c) -= q * d.at(i, c);
    meter.charge(d.cols, "smith");
  }

  void diagonalize() {
    std::size_t n = std::min(d.rows, d.cols);
    for (std::size_t t = 0; t < n; ++t) {
      // smallest |nonzero| of the trailing block into the pivot slot
      std::size_t pi = t, pj = t;
      mpz_class best = 0;
      for (std::size_t i = t; i < d.rows; ++i)
        for (std::size_t j = t; j < d.cols; ++j) {
          if (d.at(i, j) == 0) continue;
          mpz_class a = abs(d.at(i, j));
          if (best == 0 || a < best) {
            best = a;
            pi = i;
            pj = j;
          }
        }
      meter.charge((d.rows - t) * (d.cols - t), "smith");
      if (best == 0) return;  // trailing block is zero
      if (pi != t) row_swap(pi, t);
      if (pj != t) col_swap(pj, t);

      bool dirty = true;
      while (dirty) {
        dirty = false;
        for (std::size_t i = t + 1; i < d.rows; ++i) {
          if (d.at(i, t) == 0) continue;
          mpz_class q = nearest_div(d.at(i, t), d.at(t, t));
          row_sub(i, q, t);
          if (d.at(i, t) != 0) {
            row_swap(i, t);
            dirty = true;
          }
        }
        for (std::size_t j = t + 1; j < d.cols; ++j) {
          if (d.at(t, j) == 0) continue;
          mpz_class q = nearest_div(d.at(t, j), d.at(t, t));
          col_add(j, -q, t);
          if (d.at(t, j) != 0) {
            col_swap(j, t);
            dirty = true;
          }
        }
      }
    }
  }

  void run() {
    std::size_t n = std::min(d.rows, d.cols);
    for (;;) {
      diagonalize();
      for (std::size_t i = 0; i < n; ++i)
        if (d.at(i, i) < 0) col_negate(i);
      bool chained = true;
      for (std::size_t i = 0; i + 1 < n && chained; ++i) {
        if (d.at(i, i) == 0) break;
        for (std::size_t j = i + 1; j < n; ++j) {
          if (d.at(j, j) == 0) break;
          if (!mpz_divisible_p(d.at(j, j).get_mpz_t(),
                               d.at(i, i).get_mpz_t())) {
            col_add(i, 1, j);  // pulls d(j,j) into column i; re-reduce
            chained = false;
            break;
          }
        }
      }
      if (chained) return;
    }
  }
};

}  // namespace

SmithResult smith_decompose(const IntMat& m, WorkMeter* meter) {
  if (m.rows == 0 || m.cols == 0)
    throw invalid_input("empty-matrix", "smith: matrix must be nonempty");
  WorkMeter local;
  SmithWork w{m, IntMat::identity(m.cols), IntMat::identity(m.cols),
              meter ? *meter : local};
  w.run();
  SmithResult res;
  std::size_t n = std::min(m.rows, m.cols);
  res.divisors.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    res.divisors[i] = w.d.at(i, i);
    if (res.divisors[i] != 0) ++res.rank;
  }
  res.v = std::move(w.v);
  res.v_inv = std::move(w.vinv);
  return res;
}

namespace {

AbelianStructure finite_quotient(const SmithResult& s, std::size_t ambient,
                                 const char* what) {
  if (s.rank < ambient)
    throw invalid_input("infinite-quotient",
                        std::string(what) + ": quotient has free rank " +
                            std::to_string(ambient - s.rank));
  AbelianStructure g;
  for (const auto& d : s.divisors)
    if (d > 1) g.divisors.push_back(d);
  return g;
}

}  // namespace

AbelianStructure smith_normal_form(const IntMat& m, WorkMeter* meter) {
  return finite_quotient(smith_decompose(m, meter), m.rows, "smith_normal_form");
}

AbelianStructure quotient_structure(const IntMat& m, WorkMeter* meter) {
  return finite_quotient(smith_decompose(m, meter), m.cols,
                         "quotient_structure");
}

mpz_class element_order_in(const AbelianStructure& g,
                           const std::vector<mpz_class>& coords) {
  mpz_class ord = 1;
  for (std::size_t i = 0; i < g.divisors.size(); ++i) {
    mpz_class c = i < coords.size() ? coords[i] % g.divisors[i] : mpz_class(0);
    mpz_class k = g.divisors[i] / gcd(g.divisors[i], c);
    ord = lcm(ord, k);
  }
  return ord;
}

mpz_class isqrt(const mpz_class& n) {
  mpz_class r;
  mpz_sqrt(r.get_mpz_t(), n.get_mpz_t());
  return r;
}

bool is_square(const mpz_class& n, mpz_class* root) {
  if (n < 0) return false;
  if (!mpz_perfect_square_p(n.get_mpz_t())) return false;
  if (root) mpz_sqrt(root->get_mpz_t(), n.get_mpz_t());
  return true;
}

bool is_kth_power(const mpz_class& n, unsigned k, mpz_class* root) {
  if (n < 0) return false;
  mpz_class r;
  if (!mpz_root(r.get_mpz_t(), n.get_mpz_t(), k)) return false;
  if (root) *root = r;
  return true;
}

}  // namespace classforge::arith
